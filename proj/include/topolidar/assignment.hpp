#ifndef TOPOLIDAR_ASSIGNMENT_HPP
#define TOPOLIDAR_ASSIGNMENT_HPP

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace topolidar {

/// Exact minimum-cost assignment (shortest augmenting paths with potentials,
/// O(rows^2 * cols)). Requires rows <= cols. Returns the column assigned to
/// each row.
std::vector<std::size_t> solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace topolidar

#endif  // TOPOLIDAR_ASSIGNMENT_HPP
