#ifndef TOPOLIDAR_SRC_CLI_COMMANDS_HPP
#define TOPOLIDAR_SRC_CLI_COMMANDS_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "topolidar/cli.hpp"

namespace topolidar::cli {

using std::filesystem::path;

struct PhOptions {
  path input;
  std::optional<double> alpha_max;
  path out;
};

struct ImagePhOptions {
  path input;
  std::string connectivity = "4";
  bool keep_zero = false;
  path out;
};

struct LossGradOptions {
  path input;
  path out;
};

struct OptimizeOptions {
  path input;
  path target;
  std::size_t steps = 200;
  double lr = 0.05;
  double anchor = 0.0;
  std::size_t record_every = 10;
  bool no_backtracking = false;
  path out;
};

struct EncodeOptions {
  path input;
  std::size_t k = 20;
  std::vector<std::size_t> widths{64, 128, 256, 512};
  bool diagrams = false;
  path out;
};

struct MetricsOptions {
  path a;
  path b;
  std::vector<std::string> skip;
  std::vector<std::size_t> bins{100, 100};
  std::vector<double> extent{-50.0, 50.0, -50.0, 50.0};
  std::string bandwidth = "median";
  path out;
};

struct TrajEvalOptions {
  path ground_truth;
  path estimate;
  std::size_t delta = 1;
  path out;
};

struct PairgenOptions {
  path scan;
  path mask;
  std::size_t sectors = 8;
  std::vector<std::size_t> targets;
  std::size_t max_targets = 1;
  double threshold = 0.02;
  path out;
};

struct ConvertOptions {
  path input;
  path output;
  std::size_t height = 64;
  std::size_t width = 1024;
  double fov_up = 3.0;
  double fov_down = -25.0;
};

struct SparsifyOptions {
  path input;
  std::size_t rows = 4;
  std::size_t cols = 8;
  path out;
};

// Each command validates its inputs, computes everything in memory and only
// then writes outputs. Data problems surface as exceptions.
void run_ph(const PhOptions& o, std::ostream& out);
void run_image_ph(const ImagePhOptions& o, std::ostream& out);
void run_loss_grad(const LossGradOptions& o, std::ostream& out);
void run_optimize(const OptimizeOptions& o, std::ostream& out);
void run_encode(const EncodeOptions& o, const RunConfig& cfg, std::ostream& out);
void run_metrics(const MetricsOptions& o, std::ostream& out);
void run_traj_eval(const TrajEvalOptions& o, std::ostream& out);
void run_pairgen(const PairgenOptions& o, std::ostream& out);
void run_convert(const ConvertOptions& o, std::ostream& out);
void run_sparsify(const SparsifyOptions& o, std::ostream& out);

}  // namespace topolidar::cli

#endif  // TOPOLIDAR_SRC_CLI_COMMANDS_HPP
