#include "topolidar/cli.hpp"

#include <exception>
#include <functional>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace topolidar::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Topological persistence tools for LiDAR scans", "topolidar"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  RunConfig cfg;
  std::function<void()> action;

  PhOptions ph;
  auto* ph_cmd = app.add_subcommand("ph", "0-dim persistence of a point cloud's flag filtration");
  ph_cmd->add_option("input", ph.input, "Point cloud (.xyz, .ply, .rimg)")->required();
  ph_cmd->add_option("--alpha-max", ph.alpha_max, "Ignore edges longer than this");
  ph_cmd->add_option("--out", ph.out, "Diagram CSV (default: stdout)");
  ph_cmd->callback([&] { action = [&] { run_ph(ph, out); }; });

  ImagePhOptions iph;
  auto* iph_cmd = app.add_subcommand("image-ph", "0-dim sub-level persistence of an image");
  iph_cmd->add_option("input", iph.input, "Range image (.rimg) or numeric grid")->required();
  iph_cmd->add_option("--connectivity", iph.connectivity, "4 or tri")
      ->check(CLI::IsMember({"4", "tri"}));
  iph_cmd->add_flag("--keep-zero", iph.keep_zero, "Keep zero-persistence pairs");
  iph_cmd->add_option("--out", iph.out, "Diagram CSV (default: stdout)");
  iph_cmd->callback([&] { action = [&] { run_image_ph(iph, out); }; });

  LossGradOptions lg;
  auto* lg_cmd = app.add_subcommand("loss-grad", "Topological loss and per-point gradient");
  lg_cmd->add_option("input", lg.input, "Point cloud")->required();
  lg_cmd->add_option("--out", lg.out, "Gradient CSV (default: stdout)");
  lg_cmd->callback([&] { action = [&] { run_loss_grad(lg, out); }; });

  OptimizeOptions opt;
  auto* opt_cmd = app.add_subcommand("optimize", "Optimize coordinates toward a single component");
  opt_cmd->add_option("input", opt.input, "Point cloud")->required();
  opt_cmd->add_option("--target", opt.target, "Anchor target with matching point order");
  opt_cmd->add_option("--steps", opt.steps, "Gradient steps")->check(CLI::PositiveNumber);
  opt_cmd->add_option("--lr", opt.lr, "Initial step size")->check(CLI::PositiveNumber);
  opt_cmd->add_option("--anchor", opt.anchor, "Anchor weight")->check(CLI::NonNegativeNumber);
  opt_cmd->add_option("--record-every", opt.record_every, "Snapshot interval")
      ->check(CLI::PositiveNumber);
  opt_cmd->add_flag("--no-backtracking", opt.no_backtracking, "Fixed step size");
  opt_cmd->add_option("--out", opt.out, "Output directory")->required();
  opt_cmd->callback([&] { action = [&] { run_optimize(opt, out); }; });

  EncodeOptions enc;
  auto* enc_cmd = app.add_subcommand("encode", "Run the seeded graph-layer encoder");
  enc_cmd->add_option("input", enc.input, "Point cloud")->required();
  enc_cmd->add_option("--k", enc.k, "Neighbors per node")->check(CLI::PositiveNumber);
  enc_cmd->add_option("--widths", enc.widths, "Layer widths")->delimiter(',');
  enc_cmd->add_option("--seed", cfg.seed, "Weight seed")->required();
  enc_cmd->add_flag("--diagrams", enc.diagrams, "Also write per-layer diagrams");
  enc_cmd->add_option("--out", enc.out, "Output directory")->required();
  enc_cmd->callback([&] { action = [&] { run_encode(enc, cfg, out); }; });

  MetricsOptions met;
  auto* met_cmd = app.add_subcommand("metrics", "Compare two scans");
  met_cmd->add_option("a", met.a, "First scan")->required();
  met_cmd->add_option("b", met.b, "Second scan")->required();
  met_cmd->add_option("--skip", met.skip, "Metrics to skip (cd,jsd,mmd,rmse,emd)")
      ->delimiter(',');
  met_cmd->add_option("--bins", met.bins, "Histogram bins BX,BY")->delimiter(',');
  met_cmd->add_option("--extent", met.extent, "Histogram extent xmin,xmax,ymin,ymax")
      ->delimiter(',');
  met_cmd->add_option("--bandwidth", met.bandwidth, "'median' or kernel sigma");
  met_cmd->add_option("--out", met.out, "JSON output (default: stdout)");
  met_cmd->callback([&] { action = [&] { run_metrics(met, out); }; });

  TrajEvalOptions te;
  auto* te_cmd = app.add_subcommand("traj-eval", "ATE and RPE of KITTI pose files");
  te_cmd->add_option("ground_truth", te.ground_truth, "Reference poses")->required();
  te_cmd->add_option("estimate", te.estimate, "Estimated poses")->required();
  te_cmd->add_option("--delta", te.delta, "RPE window")->check(CLI::PositiveNumber);
  te_cmd->add_option("--out", te.out, "JSON output (default: stdout)");
  te_cmd->callback([&] { action = [&] { run_traj_eval(te, out); }; });

  PairgenOptions pg;
  auto* pg_cmd = app.add_subcommand("pairgen", "Build a static/dynamic scan pair");
  pg_cmd->add_option("scan", pg.scan, "Range image (.rimg)")->required();
  pg_cmd->add_option("mask", pg.mask, "Label mask (.pgm)")->required();
  pg_cmd->add_option("--sectors", pg.sectors, "Sector count")->check(CLI::PositiveNumber);
  pg_cmd->add_option("--targets", pg.targets, "Target sectors, e.g. 0,3")->delimiter(',');
  pg_cmd->add_option("--max-targets", pg.max_targets, "Automatic target limit");
  pg_cmd->add_option("--threshold", pg.threshold, "Occupancy threshold");
  pg_cmd->add_option("--out", pg.out, "Output directory")->required();
  pg_cmd->callback([&] { action = [&] { run_pairgen(pg, out); }; });

  ConvertOptions cv;
  auto* cv_cmd = app.add_subcommand("convert", "Convert between .xyz, .ply and .rimg");
  cv_cmd->add_option("input", cv.input, "Input file")->required();
  cv_cmd->add_option("output", cv.output, "Output file")->required();
  cv_cmd->add_option("--height", cv.height, "Range image rows")->check(CLI::PositiveNumber);
  cv_cmd->add_option("--width", cv.width, "Range image columns")->check(CLI::PositiveNumber);
  cv_cmd->add_option("--fov-up", cv.fov_up, "Upper vertical FOV (deg)");
  cv_cmd->add_option("--fov-down", cv.fov_down, "Lower vertical FOV (deg)");
  cv_cmd->callback([&] { action = [&] { run_convert(cv, out); }; });

  SparsifyOptions sp;
  auto* sp_cmd = app.add_subcommand("sparsify", "Keep every n-th beam and column");
  sp_cmd->add_option("input", sp.input, "Range image (.rimg)")->required();
  sp_cmd->add_option("--rows", sp.rows, "Row stride")->check(CLI::PositiveNumber);
  sp_cmd->add_option("--cols", sp.cols, "Column stride")->check(CLI::PositiveNumber);
  sp_cmd->add_option("--out", sp.out, "Output range image")->required();
  sp_cmd->callback([&] { action = [&] { run_sparsify(sp, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsageError;
  }

  for (const auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
  try {
    action();
  } catch (const std::exception& e) {
    err << "error: " << cfg.subcommand << ": " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("topolidar");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace topolidar::cli
