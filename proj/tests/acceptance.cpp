// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <Eigen/Geometry>

#include "oracles.hpp"
#include "topolidar/backbone.hpp"
#include "topolidar/cli.hpp"
#include "topolidar/graph_layer.hpp"
#include "topolidar/io.hpp"
#include "topolidar/metrics.hpp"
#include "topolidar/slam_eval.hpp"
#include "topolidar/topo_loss.hpp"

using namespace topolidar;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared corpus for criteria 1 and 2.
std::vector<FeatureMatrix> flag_corpus() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> n(4, 64);
  std::vector<FeatureMatrix> out;
  for (int i = 0; i < 200; ++i) out.push_back(oracle::random_points(rng, n(rng), 2 + i % 2));
  return out;
}

Outcome c1_flag_oracle() {
  const auto corpus = flag_corpus();
  const auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (const auto& p : corpus) {
    const PersistenceDiagram pd = flag_ph0(p);
    std::multiset<double> got;
    for (const auto& pair : pd.finite_pairs) got.insert(pair.death);
    const auto want = oracle::kruskal_deaths(p);
    if (got != std::multiset<double>(want.begin(), want.end())) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5.0,
          std::to_string(mismatches) + " mismatches in 200 clouds, " + fmt("%.3f s", secs)};
}

Outcome c2_mst_identity() {
  double worst = 0.0;
  for (const auto& p : flag_corpus()) {
    worst = std::max(worst, std::abs(topo_loss(flag_ph0(p)) - oracle::mst_weight(p)));
  }
  return {worst <= 1e-12, fmt("max |sum persistence - MST weight| = %.3g", worst)};
}

Outcome c3_capped() {
  std::mt19937_64 rng(1003);
  FeatureMatrix a = oracle::random_points(rng, 25, 3, 0.0, 0.5);
  FeatureMatrix b = oracle::random_points(rng, 25, 3, 0.0, 0.5);
  b.col(0).array() += 10.0;
  FeatureMatrix p(50, 3);
  p << a, b;
  const std::size_t bars = flag_ph0(p, 1.0).essential_births.size();
  return {bars == 2, std::to_string(bars) + " essential bars"};
}

Outcome c4_sublevel_oracle() {
  int mismatches = 0;
  auto compare = [&](const ScalarGrid& g, bool tri) {
    const auto pd = sublevel_ph0(
        g, {tri ? GridConnectivity::Triangulated : GridConnectivity::Four});
    const auto [bars, essential] = oracle::sweep_sublevel(g, tri);
    std::multiset<oracle::Bar> got;
    for (const auto& p : pd.finite_pairs) got.emplace(p.birth, p.death);
    const std::multiset<double> ess(pd.essential_births.begin(), pd.essential_births.end());
    if (got != bars || ess != essential) ++mismatches;
  };
  std::mt19937_64 rng(1004);
  std::uniform_int_distribution<int> val(0, 15);
  for (int i = 0; i < 200; ++i) {
    ScalarGrid g{8, 8, {}};
    for (int c = 0; c < 64; ++c) g.values.push_back(val(rng));
    compare(g, false);
    compare(g, true);
  }
  const ScalarGrid worked{1, 5, {2, 5, 1, 6, 3}};
  compare(worked, false);
  compare(worked, true);
  const auto pd = sublevel_ph0(worked);
  std::multiset<oracle::Bar> got;
  for (const auto& p : pd.finite_pairs) got.emplace(p.birth, p.death);
  const bool example = got == std::multiset<oracle::Bar>{{2, 5}, {3, 6}} &&
                       pd.essential_births == std::vector<double>{1.0};
  return {mismatches == 0 && example,
          std::to_string(mismatches) + " mismatches in 400 filtrations + worked example " +
              (example ? "ok" : "wrong")};
}

Outcome c5_gradient() {
  std::mt19937_64 rng(1005);
  int accepted = 0, rejected = 0;
  double worst = 0.0;
  while (accepted < 100) {
    const FeatureMatrix p = oracle::random_points(rng, 20, 3);
    // a 1e-6 perturbation moves any distance by at most 1e-6, so a gap of
    // 1e-5 keeps the edge order, and with it the MST, fixed
    if (oracle::min_distance_gap(p) < 1e-5) {
      ++rejected;
      continue;
    }
    const FeatureMatrix g = topo_loss_grad(p).per_point_grad;
    const FeatureMatrix fd = oracle::fd_gradient(p, 1e-6);
    worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff());
    ++accepted;
  }
  return {worst < 1e-5, fmt("max relative error %.3g", worst) + " over 100 clouds (" +
                            std::to_string(rejected) + " near-tie clouds skipped)"};
}

Outcome c6_backbone() {
  const auto t0 = std::chrono::steady_clock::now();
  int monotone = 0, reduced = 0;
  for (int seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(6000 + seed));
    FeatureMatrix p = oracle::random_points(rng, 50, 3);
    p.col(2).setZero();
    const auto trace = optimize_backbone(PointCloud::from_matrix(p), std::nullopt, {});
    bool ok = true;
    for (std::size_t i = 1; i < trace.history.size(); ++i) {
      ok = ok && trace.history[i].total <= trace.history[i - 1].total;
    }
    monotone += ok;
    reduced += trace.history.back().topo < 0.1 * trace.history.front().topo;
  }
  const double secs = seconds_since(t0);
  return {monotone == 50 && reduced >= 45 && secs < 30.0,
          std::to_string(monotone) + "/50 monotone, " + std::to_string(reduced) +
              "/50 below 10% of initial, " + fmt("%.2f s", secs)};
}

Outcome c7_emd() {
  std::mt19937_64 rng(1007);
  std::uniform_int_distribution<std::size_t> n(1, 6);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t k = n(rng);
    const PointCloud s = oracle::random_cloud(rng, k, -5, 5);
    const PointCloud t = oracle::random_cloud(rng, k, -5, 5);
    worst = std::max(worst, std::abs(emd_exact(s, t) -
                                     oracle::permutation_emd(s.coordinates(), t.coordinates())));
  }
  return {worst <= 1e-9, fmt("max deviation from permutation minimum %.3g", worst)};
}

Outcome c8_metric_identities() {
  std::mt19937_64 rng(1008);
  double self = 0.0, asym = 0.0;
  bool bounded = true;
  for (int i = 0; i < 30; ++i) {
    const PointCloud s = oracle::random_cloud(rng, 40, -30, 30);
    const PointCloud t = oracle::random_cloud(rng, 40, -30, 30);
    self = std::max({self, chamfer(s, s), emd_exact(s, s), mmd(s, s), jsd(s, s)});
    const double j = jsd(s, t);
    bounded = bounded && j >= 0.0 && j <= std::numbers::ln2;
    asym = std::max({asym, std::abs(chamfer(s, t) - chamfer(t, s)),
                     std::abs(emd_exact(s, t) - emd_exact(t, s)),
                     std::abs(mmd(s, t) - mmd(t, s)), std::abs(j - jsd(t, s))});
  }
  return {self <= 1e-12 && asym <= 1e-12 && bounded,
          fmt("max self-distance %.3g", self) + fmt(", max asymmetry %.3g", asym) +
              (bounded ? ", jsd in [0, ln 2]" : ", jsd out of range")};
}

RigidTransform random_rigid(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  RigidTransform g;
  g.rotation = Eigen::AngleAxisd(std::numbers::pi * n(rng),
                                 Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized())
                   .toRotationMatrix();
  g.translation = 20.0 * Eigen::Vector3d(n(rng), n(rng), n(rng));
  return g;
}

PoseTrajectory random_trajectory(std::mt19937_64& rng, std::size_t len) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<RigidTransform> poses{RigidTransform::identity()};
  while (poses.size() < len) {
    RigidTransform step;
    step.rotation = Eigen::AngleAxisd(0.1 * n(rng), Eigen::Vector3d(n(rng), n(rng), n(rng)).normalized())
                        .toRotationMatrix();
    step.translation = Eigen::Vector3d(1.0 + 0.2 * n(rng), 0.3 * n(rng), 0.1 * n(rng));
    poses.push_back(poses.back() * step);
  }
  return PoseTrajectory(poses);
}

Outcome c9_ate_invariance() {
  std::mt19937_64 rng(1009);
  std::normal_distribution<double> noise(0.0, 0.2);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const PoseTrajectory ref = random_trajectory(rng, 100);
    std::vector<RigidTransform> est = ref.poses();
    for (auto& p : est) p.translation += Eigen::Vector3d(noise(rng), noise(rng), noise(rng));
    const PoseTrajectory e(est);
    worst = std::max(worst, std::abs(ate(e.transformed(random_rigid(rng)), ref) - ate(e, ref)));
  }
  return {worst < 1e-9, fmt("max ATE change %.3g", worst)};
}

Outcome c10_rpe_line() {
  std::vector<RigidTransform> gt(50), est(50);
  for (std::size_t i = 0; i < 50; ++i) {
    gt[i].translation.x() = static_cast<double>(i);
    est[i].translation.x() = 1.1 * static_cast<double>(i);
  }
  const auto r = rpe(PoseTrajectory(est), PoseTrajectory(gt), 1);
  const bool ok = std::abs(r.trans - 0.1) <= 1e-10 && std::abs(r.rot) <= 1e-10;
  return {ok, fmt("rpe_trans %.12g", r.trans) + fmt(", rpe_rot %.3g", r.rot)};
}

Outcome c11_umeyama() {
  std::mt19937_64 rng(1011);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const PoseTrajectory est = random_trajectory(rng, 60);
    const RigidTransform g = random_rigid(rng);
    const RigidTransform s = align_umeyama(est, est.transformed(g));
    worst = std::max({worst, (s.rotation - g.rotation).cwiseAbs().maxCoeff(),
                      (s.translation - g.translation).cwiseAbs().maxCoeff()});
  }
  return {worst <= 1e-9, fmt("max parameter error %.3g", worst)};
}

Outcome c12_sparsify() {
  const RangeImage a = sparsify(RangeImage(64, 1024), 4, 8);
  const RangeImage b = sparsify(RangeImage(16, 1024), 1, 8);
  const bool ok = a.height() == 16 && a.width() == 128 && b.height() == 16 && b.width() == 128;
  return {ok, "64x1024 -> " + std::to_string(a.height()) + "x" + std::to_string(a.width()) +
                  ", 16x1024 -> " + std::to_string(b.height()) + "x" + std::to_string(b.width())};
}

Outcome c13_pairgen() {
  std::mt19937_64 rng(1013);
  const std::size_t h = 16, w = 256, sectors = 8;
  const SectorLayout layout = divide_sectors(w, sectors);
  int scenes = 0, count_bad = 0, outside_bad = 0;
  double range_err = 0.0;
  while (scenes < 50) {
    const auto s = oracle::random_scene(rng, h, w, sectors);
    const auto counts = dynamic_counts(s.mask, layout);
    if (*std::max_element(counts.begin(), counts.end()) == 0) continue;
    const std::size_t src = select_source_sector(s.mask, layout);
    std::vector<std::size_t> targets;
    for (std::size_t b = 0; b < sectors && targets.size() < 2; ++b) {
      if (b != src && (b + static_cast<std::size_t>(scenes)) % 3 == 0) targets.push_back(b);
    }
    const ScanPair p = generate_pair(s.img, s.mask, layout, src, targets);
    for (std::size_t t : targets) {
      const ColumnBand band = layout.bands[t];
      const std::ptrdiff_t shift = transplant_shift(s.mask, layout, src, t);
      std::size_t moved = 0;
      for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = band.begin; c < band.end; ++c)
          moved += p.mask.at(r, c) == CellLabel::Dynamic;
      count_bad += moved != counts[src];
      for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = layout.bands[src].begin; c < layout.bands[src].end; ++c) {
          if (s.mask.at(r, c) != CellLabel::Dynamic) continue;
          const RangeCell& to = p.dynamic_scan.at(r, static_cast<std::size_t>(static_cast<std::ptrdiff_t>(c) + shift));
          const double norm = std::sqrt(to.x * to.x + to.y * to.y + to.z * to.z);
          range_err = std::max({range_err, std::abs(to.range - s.img.at(r, c).range),
                                std::abs(norm - s.img.at(r, c).range)});
        }
      }
    }
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t b = layout.sector_of(c);
      if (std::find(targets.begin(), targets.end(), b) != targets.end()) continue;
      for (std::size_t r = 0; r < h; ++r)
        outside_bad += !(p.dynamic_scan.at(r, c) == p.static_scan.at(r, c));
    }
    ++scenes;
  }
  return {count_bad == 0 && outside_bad == 0 && range_err <= 1e-6,
          std::to_string(count_bad) + " count mismatches, " + std::to_string(outside_bad) +
              " differing non-target cells, " + fmt("max range error %.3g", range_err)};
}

Outcome c14_equivariance() {
  std::mt19937_64 rng(1014);
  const PointCloud cloud = oracle::random_cloud(rng, 30, -1, 1);
  int broken = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::size_t> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Point3> shuffled;
    for (std::size_t i : perm) shuffled.push_back(cloud[i]);
    const auto a = stack_encoder(cloud, {16, 32, 16}, 8, 1234);
    const auto b = stack_encoder(PointCloud(shuffled), {16, 32, 16}, 8, 1234);
    for (std::size_t l = 0; l < a.size(); ++l)
      for (std::size_t i = 0; i < 30; ++i)
        broken += b[l].row(static_cast<Eigen::Index>(i)) != a[l].row(static_cast<Eigen::Index>(perm[i]));
  }
  const FeatureMatrix x = cloud.coordinates();
  const auto id = stack_encoder(x, {identity_block_weights(3), identity_block_weights(3)}, 8);
  const bool identity = id[0] == x && id[1] == x;
  return {broken == 0 && identity, std::to_string(broken) + " permuted rows differ; identity block " +
                                       (identity ? "exact" : "inexact")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every regular file under `dir`, keyed by relative path, plus stdout.
std::map<std::string, std::string> run_and_capture(const std::vector<std::string>& args,
                                                   const fs::path& dir, int& status) {
  std::ostringstream out, err;
  status = cli::run(args, out, err);
  std::map<std::string, std::string> files{{"<stdout>", out.str()}};
  if (fs::exists(dir)) {
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
      if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
    }
  }
  return files;
}

Outcome c15_determinism() {
  const fs::path root = fs::temp_directory_path() / "topolidar_acceptance";
  fs::remove_all(root);
  fs::create_directories(root / "in");
  std::mt19937_64 rng(1015);
  const fs::path in = root / "in";
  io::save_point_cloud(in / "a.xyz", oracle::random_cloud(rng, 60, -20, 20));
  io::save_point_cloud(in / "b.xyz", oracle::random_cloud(rng, 60, -20, 20));
  auto scene = oracle::random_scene(rng, 16, 256, 8);
  scene.img.set_point(3, 40, {4, 7, -1});
  scene.mask.at(3, 40) = CellLabel::Dynamic;
  io::save_range_image(in / "scan.rimg", scene.img);
  io::save_pgm_mask(in / "mask.pgm", scene.mask);
  {
    std::ofstream gt(in / "gt.txt"), est(in / "est.txt");
    io::write_kitti_poses(gt, random_trajectory(rng, 30));
    io::write_kitti_poses(est, random_trajectory(rng, 30));
  }
  {
    std::ofstream grid(in / "grid.txt");
    std::uniform_int_distribution<int> v(0, 9);
    for (int r = 0; r < 8; ++r) {
      for (int c = 0; c < 8; ++c) grid << (c ? " " : "") << v(rng);
      grid << "\n";
    }
  }

  const std::string I = in.string();
  using Make = std::function<std::vector<std::string>(const std::string&)>;
  const std::vector<std::pair<std::string, Make>> commands = {
      {"ph", [&](const std::string& o) { return std::vector<std::string>{"ph", I + "/a.xyz", "--out", o + "/pd.csv"}; }},
      {"image-ph", [&](const std::string& o) { return std::vector<std::string>{"image-ph", I + "/grid.txt", "--connectivity", "tri", "--out", o + "/pd.csv"}; }},
      {"loss-grad", [&](const std::string& o) { return std::vector<std::string>{"loss-grad", I + "/a.xyz", "--out", o + "/grad.csv"}; }},
      {"optimize", [&](const std::string& o) { return std::vector<std::string>{"optimize", I + "/a.xyz", "--target", I + "/a.xyz", "--anchor", "0.5", "--steps", "50", "--out", o}; }},
      {"encode", [&](const std::string& o) { return std::vector<std::string>{"encode", I + "/a.xyz", "--seed", "42", "--k", "8", "--widths", "16,32", "--diagrams", "--out", o}; }},
      {"metrics", [&](const std::string& o) { return std::vector<std::string>{"metrics", I + "/a.xyz", I + "/b.xyz", "--out", o + "/m.json"}; }},
      {"traj-eval", [&](const std::string& o) { return std::vector<std::string>{"traj-eval", I + "/gt.txt", I + "/est.txt", "--delta", "2", "--out", o + "/t.json"}; }},
      {"pairgen", [&](const std::string& o) { return std::vector<std::string>{"pairgen", I + "/scan.rimg", I + "/mask.pgm", "--max-targets", "2", "--threshold", "0.5", "--out", o}; }},
      {"convert", [&](const std::string& o) { return std::vector<std::string>{"convert", I + "/a.xyz", o + "/a.rimg", "--height", "16", "--width", "256"}; }},
      {"sparsify", [&](const std::string& o) { return std::vector<std::string>{"sparsify", I + "/scan.rimg", "--rows", "4", "--cols", "8", "--out", o + "/s.rimg"}; }},
  };

  std::vector<std::string> failed;
  for (const auto& [name, make] : commands) {
    std::map<std::string, std::string> runs[2];
    int status[2] = {-1, -1};
    for (int r = 0; r < 2; ++r) {
      const fs::path out = root / (name + "_" + std::to_string(r));
      fs::create_directories(out);
      runs[r] = run_and_capture(make(out.string()), out, status[r]);
    }
    if (status[0] != 0 || status[1] != 0 || runs[0] != runs[1] || runs[0].size() < 2) {
      failed.push_back(name);
    }
  }
  fs::remove_all(root);
  std::string detail = std::to_string(commands.size() - failed.size()) + "/" +
                       std::to_string(commands.size()) + " commands byte-identical on rerun";
  for (const auto& f : failed) detail += " [" + f + " differs or failed]";
  return {failed.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"flag-PH equals brute-force Kruskal", c1_flag_oracle},
      {"persistence sum equals MST weight", c2_mst_identity},
      {"capped filtration keeps two clusters apart", c3_capped},
      {"sub-level PH equals flood-fill sweep", c4_sublevel_oracle},
      {"gradient matches central differences", c5_gradient},
      {"backbone optimization", c6_backbone},
      {"EMD equals permutation minimum", c7_emd},
      {"metric identities", c8_metric_identities},
      {"ATE invariant to global rigid motion", c9_ate_invariance},
      {"RPE straight-line case", c10_rpe_line},
      {"Umeyama recovers known transform", c11_umeyama},
      {"sparsification shapes", c12_sparsify},
      {"pairgen conservation", c13_pairgen},
      {"graph-layer equivariance", c14_equivariance},
      {"CLI determinism", c15_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures),
              criteria.size());
  return failures == 0 ? 0 : 1;
}
