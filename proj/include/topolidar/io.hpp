#ifndef TOPOLIDAR_IO_HPP
#define TOPOLIDAR_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "topolidar/geometry.hpp"
#include "topolidar/pairgen.hpp"
#include "topolidar/persistence.hpp"
#include "topolidar/slam_eval.hpp"

namespace topolidar::io {

/// Shortest decimal that round-trips; "inf"/"-inf"/"nan" for non-finite.
std::string format_real(double v);

// ASCII XYZ: one "x y z" per line; blank lines and '#' comments are skipped.
PointCloud read_xyz(std::istream& in);
void write_xyz(std::ostream& out, const PointCloud& cloud);

// PLY: reads ascii or binary_little_endian vertex x/y/z; writes binary
// little-endian float32.
PointCloud read_ply(std::istream& in);
void write_ply(std::ostream& out, const PointCloud& cloud);

// Range image: "RIMG", u32 H, u32 W, then H*W*(x,y,z,range) float32, all
// little-endian, row-major. range 0 marks an invalid cell.
RangeImage read_rimg(std::istream& in);
void write_rimg(std::ostream& out, const RangeImage& img);

// Persistence diagram CSV: "birth,death" header, "inf" for essential deaths.
void write_diagram_csv(std::ostream& out, const PersistenceDiagram& pd);
PersistenceDiagram read_diagram_csv(std::istream& in);

// KITTI poses: 12 floats per line, row-major [R|t]. Rotations within 1e-4 of
// orthonormal are projected onto SO(3); worse ones are rejected.
PoseTrajectory read_kitti_poses(std::istream& in);
void write_kitti_poses(std::ostream& out, const PoseTrajectory& traj);

// Binary PGM (P5) masks: 0 invalid, 64 ground, 128 static, 255 dynamic.
SegmentationMask read_pgm_mask(std::istream& in);
void write_pgm_mask(std::ostream& out, const SegmentationMask& mask);

/// Whitespace- or comma-separated numeric grid, one image row per line.
ScalarGrid read_scalar_grid(std::istream& in);

// Path-based helpers. Point clouds dispatch on extension: .ply, .rimg
// (valid cells), anything else as XYZ.
PointCloud load_point_cloud(const std::filesystem::path& path);
void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud);
RangeImage load_range_image(const std::filesystem::path& path);
void save_range_image(const std::filesystem::path& path, const RangeImage& img);
PoseTrajectory load_kitti_poses(const std::filesystem::path& path);
SegmentationMask load_pgm_mask(const std::filesystem::path& path);
void save_pgm_mask(const std::filesystem::path& path, const SegmentationMask& mask);
ScalarGrid load_scalar_grid(const std::filesystem::path& path);

/// Writes `contents` to `path` in binary mode, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace topolidar::io

#endif  // TOPOLIDAR_IO_HPP
