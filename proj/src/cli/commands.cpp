#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "topolidar/backbone.hpp"
#include "topolidar/geometry.hpp"
#include "topolidar/graph_layer.hpp"
#include "topolidar/io.hpp"
#include "topolidar/metrics.hpp"
#include "topolidar/pairgen.hpp"
#include "topolidar/persistence.hpp"
#include "topolidar/slam_eval.hpp"
#include "topolidar/topo_loss.hpp"

namespace topolidar::cli {

using Json = nlohmann::ordered_json;

namespace {

// Pending output files, written together once every computation succeeded.
class OutputSet {
 public:
  void add(path p, std::string contents) {
    files_.emplace_back(std::move(p), std::move(contents));
  }
  void commit() const {
    for (const auto& [p, contents] : files_) io::write_file(p, contents);
  }

 private:
  std::vector<std::pair<path, std::string>> files_;
};

// Writes to `file` if given, else to the result stream.
void emit(const path& file, const std::string& contents, std::ostream& out) {
  if (file.empty()) {
    out << contents;
  } else {
    io::write_file(file, contents);
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json real_or_null(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

bool is_image_path(const path& p) { return p.extension() == ".rimg"; }

std::string padded(std::size_t v, int width) {
  std::string s = std::to_string(v);
  if (static_cast<int>(s.size()) < width) {
    s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
  }
  return s;
}

std::string diagram_csv(const PersistenceDiagram& pd) {
  std::ostringstream s;
  io::write_diagram_csv(s, pd);
  return s.str();
}

}  // namespace

void run_ph(const PhOptions& o, std::ostream& out) {
  if (o.alpha_max && !(*o.alpha_max >= 0.0)) {
    throw std::invalid_argument("--alpha-max must be non-negative");
  }
  const PointCloud cloud = io::load_point_cloud(o.input);
  emit(o.out, diagram_csv(flag_ph0(cloud, o.alpha_max)), out);
}

void run_image_ph(const ImagePhOptions& o, std::ostream& out) {
  SublevelOptions opts;
  opts.keep_zero_persistence = o.keep_zero;
  opts.connectivity = o.connectivity == "tri" ? GridConnectivity::Triangulated
                                              : GridConnectivity::Four;
  ScalarGrid grid;
  if (is_image_path(o.input)) {
    // range channel; invalid cells enter last, at the largest valid range
    const RangeImage img = io::load_range_image(o.input);
    double fill = 0.0;
    for (const auto& c : img.cells()) {
      if (c.valid) fill = std::max(fill, c.range);
    }
    grid.rows = img.height();
    grid.cols = img.width();
    for (const auto& c : img.cells()) grid.values.push_back(c.valid ? c.range : fill);
  } else {
    grid = io::load_scalar_grid(o.input);
  }
  emit(o.out, diagram_csv(sublevel_ph0(grid, opts)), out);
}

void run_loss_grad(const LossGradOptions& o, std::ostream& out) {
  const PointCloud cloud = io::load_point_cloud(o.input);
  const TopoLossReport report = topo_loss_grad(cloud);

  std::ostringstream csv;
  csv << "# loss=" << io::format_real(report.loss)
      << " degenerate=" << (report.degenerate ? 1 : 0) << "\n";
  csv << "idx,gx,gy,gz\n";
  for (Eigen::Index i = 0; i < report.per_point_grad.rows(); ++i) {
    csv << i;
    for (Eigen::Index d = 0; d < 3; ++d) {
      csv << ',' << io::format_real(report.per_point_grad(i, d));
    }
    csv << '\n';
  }
  if (o.out.empty()) {
    out << csv.str();
    return;
  }
  io::write_file(o.out, csv.str());
  Json summary;
  summary["loss"] = report.loss;
  summary["mst_edges"] = report.contributing_edges.size();
  summary["degenerate"] = report.degenerate;
  out << dump(summary);
}

void run_optimize(const OptimizeOptions& o, std::ostream& out) {
  OptimizerConfig cfg;
  cfg.steps = o.steps;
  cfg.step_size = o.lr;
  cfg.anchor_weight = o.anchor;
  cfg.record_every = o.record_every;
  cfg.backtracking = !o.no_backtracking;
  cfg.validate();
  if (o.anchor > 0.0 && o.target.empty()) {
    throw std::invalid_argument("--anchor requires --target");
  }

  const PointCloud cloud = io::load_point_cloud(o.input);
  std::optional<PointCloud> target;
  if (!o.target.empty()) target = io::load_point_cloud(o.target);
  const OptimizationTrace trace = optimize_backbone(cloud, target, cfg);

  OutputSet files;
  std::ostringstream history;
  history << "step,topo,anchor,total\n";
  for (const auto& r : trace.history) {
    history << r.step << ',' << io::format_real(r.topo) << ','
            << io::format_real(r.anchor) << ',' << io::format_real(r.total) << '\n';
  }
  files.add(o.out / "history.csv", history.str());
  for (const auto& snap : trace.snapshots) {
    std::ostringstream xyz;
    io::write_xyz(xyz, snap.cloud);
    files.add(o.out / ("snapshot_" + padded(snap.step, 6) + ".xyz"), xyz.str());
  }
  std::ostringstream final_xyz;
  io::write_xyz(final_xyz, trace.final);
  files.add(o.out / "final.xyz", final_xyz.str());
  files.commit();

  Json summary;
  summary["steps"] = cfg.steps;
  summary["initial_topo"] = trace.history.front().topo;
  summary["final_topo"] = trace.history.back().topo;
  summary["final_total"] = trace.history.back().total;
  summary["snapshots"] = trace.snapshots.size();
  out << dump(summary);
}

void run_encode(const EncodeOptions& o, const RunConfig& cfg, std::ostream& out) {
  if (o.widths.empty()) throw std::invalid_argument("--widths must not be empty");
  for (std::size_t w : o.widths) {
    if (w < 1) throw std::invalid_argument("--widths entries must be positive");
  }
  if (o.k < 1) throw std::invalid_argument("--k must be at least 1");

  const PointCloud cloud = io::load_point_cloud(o.input);
  const auto layers = stack_encoder(cloud, o.widths, o.k, cfg.seed);

  OutputSet files;
  Json summary;
  summary["seed"] = cfg.seed;
  summary["k"] = o.k;
  summary["points"] = cloud.size();
  Json layer_info = Json::array();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const FeatureMatrix& f = layers[l];
    std::ostringstream csv;
    csv << "# seed=" << cfg.seed << " layer=" << (l + 1) << " k=" << o.k
        << " dim=" << f.cols() << "\n";
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index d = 0; d < f.cols(); ++d) {
        if (d > 0) csv << ',';
        csv << io::format_real(f(i, d));
      }
      csv << '\n';
    }
    const std::string stem = "layer_" + std::to_string(l + 1);
    files.add(o.out / (stem + ".csv"), csv.str());

    Json info;
    info["layer"] = l + 1;
    info["dim"] = f.cols();
    if (o.diagrams) {
      const PersistenceDiagram pd = flag_ph0(f);
      info["topo_loss"] = topo_loss(pd);
      files.add(o.out / (stem + "_pd.csv"), "# seed=" + std::to_string(cfg.seed) +
                                                "\n" + diagram_csv(pd));
    }
    layer_info.push_back(info);
  }
  summary["layers"] = layer_info;
  files.commit();
  out << dump(summary);
}

void run_metrics(const MetricsOptions& o, std::ostream& out) {
  static const std::vector<std::string> kNames{"cd", "jsd", "mmd", "rmse", "emd"};
  for (const auto& s : o.skip) {
    if (std::find(kNames.begin(), kNames.end(), s) == kNames.end()) {
      throw std::invalid_argument("unknown metric in --skip: " + s);
    }
  }
  auto wanted = [&](const std::string& name) {
    return std::find(o.skip.begin(), o.skip.end(), name) == o.skip.end();
  };
  if (o.bins.size() != 2) throw std::invalid_argument("--bins expects BX,BY");
  if (o.extent.size() != 4) {
    throw std::invalid_argument("--extent expects xmin,xmax,ymin,ymax");
  }
  HistogramConfig hist;
  hist.bins_x = o.bins[0];
  hist.bins_y = o.bins[1];
  hist.xmin = o.extent[0];
  hist.xmax = o.extent[1];
  hist.ymin = o.extent[2];
  hist.ymax = o.extent[3];
  hist.validate();
  KernelConfig kernel;
  if (o.bandwidth != "median") {
    std::size_t used = 0;
    double bw = 0.0;
    try {
      bw = std::stod(o.bandwidth, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != o.bandwidth.size() || !(bw > 0.0)) {
      throw std::invalid_argument("--bandwidth must be 'median' or a positive number");
    }
    kernel.bandwidth = bw;
  }

  std::optional<RangeImage> img_a, img_b;
  if (is_image_path(o.a)) img_a = io::load_range_image(o.a);
  if (is_image_path(o.b)) img_b = io::load_range_image(o.b);
  const PointCloud a = img_a ? to_point_cloud(*img_a) : io::load_point_cloud(o.a);
  const PointCloud b = img_b ? to_point_cloud(*img_b) : io::load_point_cloud(o.b);
  if (wanted("emd") && a.size() != b.size()) {
    throw std::invalid_argument("EMD requires equal sizes (use --skip emd)");
  }

  std::optional<double> cd, js, md, rm, em;
  if (wanted("cd")) cd = chamfer(a, b);
  if (wanted("jsd")) js = jsd(a, b, hist);
  if (wanted("mmd")) md = mmd(a, b, kernel);
  if (wanted("rmse") && img_a && img_b) rm = rmse(*img_a, *img_b);
  if (wanted("emd")) em = emd_exact(a, b);

  Json j;
  j["cd"] = real_or_null(cd);
  j["jsd"] = real_or_null(js);
  j["mmd"] = real_or_null(md);
  j["rmse"] = real_or_null(rm);
  j["emd"] = real_or_null(em);
  emit(o.out, dump(j), out);
}

void run_traj_eval(const TrajEvalOptions& o, std::ostream& out) {
  if (o.delta < 1) throw std::invalid_argument("--delta must be at least 1");
  const PoseTrajectory gt = io::load_kitti_poses(o.ground_truth);
  const PoseTrajectory est = io::load_kitti_poses(o.estimate);
  const double a = ate(est, gt);
  const RelativePoseError r = rpe(est, gt, o.delta);
  Json j;
  j["ate"] = a;
  j["rpe_trans"] = r.trans;
  j["rpe_rot"] = r.rot;
  emit(o.out, dump(j), out);
}

void run_pairgen(const PairgenOptions& o, std::ostream& out) {
  if (o.max_targets < 1) throw std::invalid_argument("--max-targets must be >= 1");
  if (!(o.threshold >= 0.0 && o.threshold <= 1.0)) {
    throw std::invalid_argument("--threshold must lie in [0, 1]");
  }
  const RangeImage img = io::load_range_image(o.scan);
  const SegmentationMask mask = io::load_pgm_mask(o.mask);
  mask.validate_against(img);
  const SectorLayout layout = divide_sectors(img.width(), o.sectors);
  const std::size_t source = select_source_sector(mask, layout);
  const std::vector<std::size_t> targets =
      o.targets.empty()
          ? select_target_sectors(img, mask, layout, source, o.max_targets, o.threshold)
          : o.targets;
  const ScanPair pair = generate_pair(img, mask, layout, source, targets);

  std::size_t transplanted = 0;
  for (std::size_t i = 0; i < pair.mask.labels().size(); ++i) {
    if (pair.mask.labels()[i] == CellLabel::Dynamic) ++transplanted;
  }

  OutputSet files;
  std::ostringstream s_img(std::ios::binary), d_img(std::ios::binary),
      d_mask(std::ios::binary);
  io::write_rimg(s_img, pair.static_scan);
  io::write_rimg(d_img, pair.dynamic_scan);
  io::write_pgm_mask(d_mask, pair.mask);
  files.add(o.out / "static.rimg", s_img.str());
  files.add(o.out / "dynamic.rimg", d_img.str());
  files.add(o.out / "dynamic_mask.pgm", d_mask.str());
  files.commit();

  Json j;
  j["source"] = source;
  j["targets"] = targets;
  j["transplanted_cells"] = transplanted;
  out << dump(j);
}

void run_convert(const ConvertOptions& o, std::ostream& out) {
  ProjectionConfig cfg{o.height, o.width, o.fov_up, o.fov_down};
  cfg.validate();
  const bool to_image = is_image_path(o.output);
  std::ostringstream buf(std::ios::binary);
  std::size_t count = 0;
  if (to_image) {
    const RangeImage img = is_image_path(o.input)
                               ? io::load_range_image(o.input)
                               : to_range_image(io::load_point_cloud(o.input), cfg);
    io::write_rimg(buf, img);
    count = img.valid_count();
  } else {
    const PointCloud cloud = io::load_point_cloud(o.input);
    if (o.output.extension() == ".ply") {
      io::write_ply(buf, cloud);
    } else {
      io::write_xyz(buf, cloud);
    }
    count = cloud.size();
  }
  io::write_file(o.output, buf.str());
  Json j;
  j["points"] = count;
  out << dump(j);
}

void run_sparsify(const SparsifyOptions& o, std::ostream& out) {
  if (o.rows < 1 || o.cols < 1) throw std::invalid_argument("strides must be >= 1");
  const RangeImage img = io::load_range_image(o.input);
  const RangeImage sparse = sparsify(img, o.rows, o.cols);
  std::ostringstream buf(std::ios::binary);
  io::write_rimg(buf, sparse);
  io::write_file(o.out, buf.str());
  Json j;
  j["height"] = sparse.height();
  j["width"] = sparse.width();
  j["valid"] = sparse.valid_count();
  out << dump(j);
}

}  // namespace topolidar::cli
