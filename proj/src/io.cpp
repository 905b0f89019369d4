#include "topolidar/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace topolidar::io {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

double parse_real(std::string_view tok) {
  if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
  if (tok == "-inf") return -std::numeric_limits<double>::infinity();
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw std::invalid_argument("malformed number '" + std::string(tok) + "'");
  }
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto is_sep = [](char c) {
    return c == ' ' || c == '\t' || c == ',' || c == '\r';
  };
  while (i < line.size()) {
    while (i < line.size() && is_sep(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_sep(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool skippable(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

void put_f32(std::ostream& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw std::invalid_argument("unexpected end of binary data");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f32(std::istream& in) {
  return static_cast<double>(std::bit_cast<float>(get_u32(in)));
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

}  // namespace

PointCloud read_xyz(std::istream& in) {
  std::vector<Point3> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto f = split_fields(line);
    if (f.size() < 3) {
      throw std::invalid_argument("xyz line " + std::to_string(lineno) +
                                  ": expected 3 values");
    }
    pts.emplace_back(parse_real(f[0]), parse_real(f[1]), parse_real(f[2]));
  }
  return PointCloud(std::move(pts));
}

void write_xyz(std::ostream& out, const PointCloud& cloud) {
  for (const auto& p : cloud.points()) {
    out << format_real(p.x()) << ' ' << format_real(p.y()) << ' '
        << format_real(p.z()) << '\n';
  }
}

namespace {

struct PlyProperty {
  std::string name;
  std::string type;
};

std::size_t ply_type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "int32" || t == "uint32" ||
      t == "float" || t == "float32")
    return 4;
  if (t == "double" || t == "float64") return 8;
  throw std::invalid_argument("unsupported PLY property type '" + t + "'");
}

double ply_decode(const unsigned char* p, const std::string& t) {
  std::uint64_t raw = 0;
  const std::size_t n = ply_type_size(t);
  for (std::size_t i = 0; i < n; ++i) raw |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  if (t == "float" || t == "float32") {
    return std::bit_cast<float>(static_cast<std::uint32_t>(raw));
  }
  if (t == "double" || t == "float64") return std::bit_cast<double>(raw);
  if (t == "char" || t == "int8") return static_cast<std::int8_t>(raw);
  if (t == "short" || t == "int16") return static_cast<std::int16_t>(raw);
  if (t == "int" || t == "int32") return static_cast<std::int32_t>(raw);
  return static_cast<double>(raw);
}

}  // namespace

PointCloud read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) {
    throw std::invalid_argument("not a PLY file");
  }
  std::string format;
  std::size_t vertex_count = 0;
  bool in_vertex = false;
  bool seen_element = false;
  std::vector<PlyProperty> props;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "format") {
      ls >> format;
    } else if (key == "element") {
      std::string name;
      std::size_t count = 0;
      ls >> name >> count;
      if (name == "vertex") {
        if (seen_element) {
          throw std::invalid_argument("PLY vertex element must come first");
        }
        vertex_count = count;
        in_vertex = true;
      } else {
        in_vertex = false;
      }
      seen_element = true;
    } else if (key == "property" && in_vertex) {
      std::string type, name;
      ls >> type;
      if (type == "list") throw std::invalid_argument("PLY vertex lists unsupported");
      ls >> name;
      props.push_back({name, type});
    } else if (key == "end_header") {
      break;
    }
  }
  int ix = -1, iy = -1, iz = -1;
  for (std::size_t i = 0; i < props.size(); ++i) {
    if (props[i].name == "x") ix = static_cast<int>(i);
    if (props[i].name == "y") iy = static_cast<int>(i);
    if (props[i].name == "z") iz = static_cast<int>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0) {
    throw std::invalid_argument("PLY vertex lacks x/y/z properties");
  }

  std::vector<Point3> pts;
  pts.reserve(vertex_count);
  if (format == "ascii") {
    for (std::size_t v = 0; v < vertex_count; ++v) {
      if (!std::getline(in, line)) throw std::invalid_argument("truncated PLY");
      const auto f = split_fields(line);
      if (f.size() < props.size()) throw std::invalid_argument("short PLY row");
      pts.emplace_back(parse_real(f[static_cast<std::size_t>(ix)]),
                       parse_real(f[static_cast<std::size_t>(iy)]),
                       parse_real(f[static_cast<std::size_t>(iz)]));
    }
  } else if (format == "binary_little_endian") {
    std::vector<std::size_t> offset(props.size());
    std::size_t stride = 0;
    for (std::size_t i = 0; i < props.size(); ++i) {
      offset[i] = stride;
      stride += ply_type_size(props[i].type);
    }
    std::vector<unsigned char> row(stride);
    auto field = [&](int i) {
      const auto k = static_cast<std::size_t>(i);
      return ply_decode(row.data() + offset[k], props[k].type);
    };
    for (std::size_t v = 0; v < vertex_count; ++v) {
      if (!in.read(reinterpret_cast<char*>(row.data()),
                   static_cast<std::streamsize>(stride))) {
        throw std::invalid_argument("truncated PLY");
      }
      pts.emplace_back(field(ix), field(iy), field(iz));
    }
  } else {
    throw std::invalid_argument("unsupported PLY format '" + format + "'");
  }
  return PointCloud(std::move(pts));
}

void write_ply(std::ostream& out, const PointCloud& cloud) {
  out << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  for (const auto& p : cloud.points()) {
    put_f32(out, p.x());
    put_f32(out, p.y());
    put_f32(out, p.z());
  }
}

RangeImage read_rimg(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "RIMG", 4) != 0) {
    throw std::invalid_argument("not a RIMG range image");
  }
  const std::uint32_t h = get_u32(in);
  const std::uint32_t w = get_u32(in);
  RangeImage img(h, w);
  for (std::uint32_t r = 0; r < h; ++r) {
    for (std::uint32_t c = 0; c < w; ++c) {
      RangeCell cell;
      cell.x = get_f32(in);
      cell.y = get_f32(in);
      cell.z = get_f32(in);
      cell.range = get_f32(in);
      if (!std::isfinite(cell.x) || !std::isfinite(cell.y) ||
          !std::isfinite(cell.z) || !std::isfinite(cell.range) || cell.range < 0.0) {
        throw std::invalid_argument("RIMG cell holds a non-finite or negative value");
      }
      cell.valid = cell.range > 0.0;
      img.at(r, c) = cell.valid ? cell : RangeCell{};
    }
  }
  return img;
}

void write_rimg(std::ostream& out, const RangeImage& img) {
  out.write("RIMG", 4);
  put_u32(out, static_cast<std::uint32_t>(img.height()));
  put_u32(out, static_cast<std::uint32_t>(img.width()));
  for (const auto& c : img.cells()) {
    put_f32(out, c.valid ? c.x : 0.0);
    put_f32(out, c.valid ? c.y : 0.0);
    put_f32(out, c.valid ? c.z : 0.0);
    put_f32(out, c.valid ? c.range : 0.0);
  }
}

void write_diagram_csv(std::ostream& out, const PersistenceDiagram& pd) {
  out << "birth,death\n";
  for (const auto& p : pd.finite_pairs) {
    out << format_real(p.birth) << ',' << format_real(p.death) << '\n';
  }
  for (double b : pd.essential_births) out << format_real(b) << ",inf\n";
}

PersistenceDiagram read_diagram_csv(std::istream& in) {
  PersistenceDiagram pd;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    if (header) {
      header = false;
      if (line.rfind("birth", 0) == 0) continue;
    }
    const auto f = split_fields(line);
    if (f.size() != 2) throw std::invalid_argument("diagram rows need 2 fields");
    const double birth = parse_real(f[0]);
    const double death = parse_real(f[1]);
    if (std::isinf(death)) {
      pd.essential_births.push_back(birth);
    } else {
      pd.finite_pairs.push_back({birth, death, {}});
    }
  }
  return pd;
}

PoseTrajectory read_kitti_poses(std::istream& in) {
  std::vector<RigidTransform> poses;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto f = split_fields(line);
    if (f.size() != 12) {
      throw std::invalid_argument("pose line " + std::to_string(lineno) +
                                  ": expected 12 values");
    }
    RigidTransform t;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        t.rotation(r, c) = parse_real(f[static_cast<std::size_t>(4 * r + c)]);
      }
      t.translation(r) = parse_real(f[static_cast<std::size_t>(4 * r + 3)]);
    }
    if (!t.rotation.allFinite() || !t.translation.allFinite()) {
      throw std::invalid_argument("pose line " + std::to_string(lineno) +
                                  ": non-finite value");
    }
    const double ortho =
        (t.rotation.transpose() * t.rotation - Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff();
    if (ortho > 1e-4 || t.rotation.determinant() <= 0.0) {
      throw std::invalid_argument("pose line " + std::to_string(lineno) +
                                  ": rotation is not orthonormal");
    }
    // text round-off: snap to the nearest rotation
    const Eigen::JacobiSVD<Eigen::Matrix3d> svd(
        t.rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
    t.rotation = svd.matrixU() * svd.matrixV().transpose();
    poses.push_back(t);
  }
  return PoseTrajectory(std::move(poses));
}

void write_kitti_poses(std::ostream& out, const PoseTrajectory& traj) {
  for (const auto& p : traj.poses()) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        const double v = c < 3 ? p.rotation(r, c) : p.translation(r);
        out << format_real(v) << (r == 2 && c == 3 ? '\n' : ' ');
      }
    }
  }
}

namespace {

std::string pgm_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  if (tok.empty()) throw std::invalid_argument("truncated PGM header");
  return tok;
}

std::uint8_t label_to_gray(CellLabel l) {
  switch (l) {
    case CellLabel::Invalid: return 0;
    case CellLabel::Ground: return 64;
    case CellLabel::Static: return 128;
    case CellLabel::Dynamic: return 255;
  }
  return 0;
}

CellLabel gray_to_label(unsigned v) {
  switch (v) {
    case 0: return CellLabel::Invalid;
    case 64: return CellLabel::Ground;
    case 128: return CellLabel::Static;
    case 255: return CellLabel::Dynamic;
    default:
      throw std::invalid_argument("mask value " + std::to_string(v) +
                                  " is not one of 0/64/128/255");
  }
}

std::size_t parse_size(const std::string& tok) {
  std::size_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw std::invalid_argument("malformed integer '" + tok + "'");
  }
  return v;
}

}  // namespace

SegmentationMask read_pgm_mask(std::istream& in) {
  const std::string magic = pgm_token(in);
  if (magic != "P5" && magic != "P2") throw std::invalid_argument("not a PGM file");
  const std::size_t w = parse_size(pgm_token(in));
  const std::size_t h = parse_size(pgm_token(in));
  const std::size_t maxval = parse_size(pgm_token(in));
  if (maxval != 255) throw std::invalid_argument("PGM mask must use maxval 255");
  SegmentationMask mask(h, w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      unsigned v = 0;
      if (magic == "P5") {
        char ch;
        if (!in.get(ch)) throw std::invalid_argument("truncated PGM data");
        v = static_cast<unsigned char>(ch);
      } else {
        v = static_cast<unsigned>(parse_size(pgm_token(in)));
      }
      mask.at(r, c) = gray_to_label(v);
    }
  }
  return mask;
}

void write_pgm_mask(std::ostream& out, const SegmentationMask& mask) {
  out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
  for (CellLabel l : mask.labels()) out.put(static_cast<char>(label_to_gray(l)));
}

ScalarGrid read_scalar_grid(std::istream& in) {
  ScalarGrid grid;
  std::string line;
  while (std::getline(in, line)) {
    if (skippable(line)) continue;
    const auto f = split_fields(line);
    if (grid.rows == 0) {
      grid.cols = f.size();
    } else if (f.size() != grid.cols) {
      throw std::invalid_argument("ragged scalar grid");
    }
    for (auto tok : f) grid.values.push_back(parse_real(tok));
    ++grid.rows;
  }
  if (grid.rows == 0 || grid.cols == 0) throw std::invalid_argument("empty input");
  return grid;
}

PointCloud load_point_cloud(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".rimg") return to_point_cloud(load_range_image(path));
  auto in = open_in(path);
  if (ext == ".ply") return read_ply(in);
  return read_xyz(in);
}

void save_point_cloud(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ostringstream out(std::ios::binary);
  if (path.extension() == ".ply") {
    write_ply(out, cloud);
  } else {
    write_xyz(out, cloud);
  }
  write_file(path, out.str());
}

RangeImage load_range_image(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_rimg(in);
}

void save_range_image(const std::filesystem::path& path, const RangeImage& img) {
  std::ostringstream out(std::ios::binary);
  write_rimg(out, img);
  write_file(path, out.str());
}

PoseTrajectory load_kitti_poses(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_kitti_poses(in);
}

SegmentationMask load_pgm_mask(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pgm_mask(in);
}

void save_pgm_mask(const std::filesystem::path& path, const SegmentationMask& mask) {
  std::ostringstream out(std::ios::binary);
  write_pgm_mask(out, mask);
  write_file(path, out.str());
}

ScalarGrid load_scalar_grid(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_scalar_grid(in);
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace topolidar::io
