#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bobench/bench.hpp"

namespace {

using namespace bobench;
namespace fs = std::filesystem;

struct CommonOpts {
  std::string function = "ackley";
  std::string acq = "ucb";
  std::string beta = "1";
  std::string xi = "0";
  std::string batch = "lp";
  int batch_size = 4;
  int init = 24;
  int iters = 50;
  int seeds = 99;
  std::uint64_t seed_base = 0;
  std::string noise_mode = "none";
  std::string noise_level = "0";
  double ref_amplitude = 0.0;  // 0 = per-function default
  std::string out = "bobench_out";
  int parallel = 1;
  bool fast = false;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o, bool lists_allowed) {
  const char* many = lists_allowed ? " (comma-separated list sweeps the axis)" : "";
  cmd->add_option("--function", o.function, "Objective: ackley|hartmann")
      ->envname("BOBENCH_FUNCTION");
  cmd->add_option("--acq", o.acq, std::string("Acquisition: ucb|ei") + many)
      ->envname("BOBENCH_ACQ");
  cmd->add_option("--beta", o.beta, std::string("UCB exploration beta") + many)
      ->envname("BOBENCH_BETA");
  cmd->add_option("--xi", o.xi, std::string("EI exploration xi") + many)
      ->envname("BOBENCH_XI");
  cmd->add_option("--batch", o.batch, std::string("Batch method: lp|kb|cl") + many)
      ->envname("BOBENCH_BATCH");
  cmd->add_option("--batch-size", o.batch_size, "Points per batch")
      ->envname("BOBENCH_BATCH_SIZE");
  cmd->add_option("--init", o.init, "Initial LHS design size")
      ->envname("BOBENCH_INIT");
  cmd->add_option("--iters", o.iters, "Optimization iterations")
      ->envname("BOBENCH_ITERS");
  cmd->add_option("--seeds", o.seeds, "Number of initial-sampling seeds")
      ->envname("BOBENCH_SEEDS");
  cmd->add_option("--seed-base", o.seed_base, "Seed offset; run k uses seed-base + k")
      ->envname("BOBENCH_SEED_BASE");
  cmd->add_option("--noise-mode", o.noise_mode,
                  std::string("Noise mode: none|gtmax|kernel") + many)
      ->envname("BOBENCH_NOISE_MODE");
  cmd->add_option("--noise-level", o.noise_level,
                  std::string("Noise proportion in [0,1]") + many)
      ->envname("BOBENCH_NOISE_LEVEL");
  cmd->add_option("--ref-amplitude", o.ref_amplitude,
                  "Normalized reference amplitude for kernel-mode noise")
      ->envname("BOBENCH_REF_AMPLITUDE");
  cmd->add_option("--out", o.out, "Output directory")->envname("BOBENCH_OUT");
  cmd->add_option("--parallel", o.parallel, "Worker threads across seeds")
      ->envname("BOBENCH_PARALLEL");
  cmd->add_flag("--fast", o.fast, "Reduced preset: 20 seeds")
      ->envname("BOBENCH_FAST");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  if (out.empty()) throw std::invalid_argument("empty option list");
  return out;
}

double single_double(const std::string& s, const char* what) {
  const auto items = split_list(s);
  if (items.size() != 1)
    throw std::invalid_argument(std::string(what) + " expects a single value here");
  return parse_double(items[0]);
}

SweepConfig build_sweep_config(const CommonOpts& o, bool lists_allowed,
                               const CLI::App* cmd) {
  SweepConfig cfg;
  cfg.base.gt = objective_from_string(o.function);
  cfg.base.policy.q = o.batch_size;
  cfg.base.n_init = o.init;
  cfg.base.n_iter = o.iters;
  cfg.n_seeds = o.seeds;
  if (o.fast && cmd->count("--seeds") == 0) cfg.n_seeds = 20;
  cfg.seed_base = o.seed_base;
  cfg.parallelism = o.parallel;
  cfg.base.noise.reference_amplitude = o.ref_amplitude;

  if (lists_allowed) {
    for (const auto& s : split_list(o.acq))
      cfg.axes.acq_kinds.push_back(acquisition_from_string(s));
    for (const auto& s : split_list(o.beta))
      cfg.axes.betas.push_back(parse_double(s));
    for (const auto& s : split_list(o.xi))
      cfg.axes.xis.push_back(parse_double(s));
    for (const auto& s : split_list(o.batch))
      cfg.axes.batch_methods.push_back(batch_from_string(s));
    for (const auto& s : split_list(o.noise_mode))
      cfg.axes.noise_modes.push_back(noise_mode_from_string(s));
    for (const auto& s : split_list(o.noise_level))
      cfg.axes.noise_levels.push_back(parse_double(s));
    cfg.base.acquisition.kind = cfg.axes.acq_kinds.front();
    cfg.base.acquisition.beta = cfg.axes.betas.front();
    cfg.base.acquisition.xi = cfg.axes.xis.front();
    cfg.base.policy.method = cfg.axes.batch_methods.front();
    cfg.base.noise.mode = cfg.axes.noise_modes.front();
    cfg.base.noise.level = cfg.axes.noise_levels.front();
  } else {
    cfg.base.acquisition.kind = acquisition_from_string(o.acq);
    cfg.base.acquisition.beta = single_double(o.beta, "--beta");
    cfg.base.acquisition.xi = single_double(o.xi, "--xi");
    cfg.base.policy.method = batch_from_string(o.batch);
    cfg.base.noise.mode = noise_mode_from_string(o.noise_mode);
    cfg.base.noise.level = single_double(o.noise_level, "--noise-level");
  }
  if (cfg.base.noise.reference_amplitude == 0.0)
    cfg.base.noise.reference_amplitude = default_reference_amplitude(cfg.base.gt);
  return cfg;
}

void print_rows(const std::vector<SummaryRow>& rows) {
  for (const auto& r : rows) {
    std::cout << r.cell << ": <IR(X)> = " << fmt17(r.summary.mean_ir_x)
              << ", <IR(y)> = " << fmt17(r.summary.mean_ir_y)
              << ", <CR(X)> = " << fmt17(r.summary.mean_cr_x)
              << ", <CR(y)> = " << fmt17(r.summary.mean_cr_y);
    if (r.summary.basin)
      std::cout << ", basin_fraction = " << fmt17(*r.summary.basin);
    std::cout << '\n';
  }
}

std::pair<int, int> parse_pair(const std::string& s) {
  const auto items = split_list(s);
  if (items.size() != 2) throw std::invalid_argument("--pair expects two dims, e.g. 1,2");
  const int a = std::stoi(items[0]), b = std::stoi(items[1]);
  if (a < 1 || b < 1 || a > 6 || b > 6)
    throw std::invalid_argument("--pair dims are 1-based in 1..6");
  return {a - 1, b - 1};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch Bayesian-optimization benchmark on 6D Ackley/Hartmann"};
  app.require_subcommand(1);

  CommonOpts run_o, sweep_o, cal_o, proj_o, frames_o, sum_o;

  auto* run_cmd = app.add_subcommand("run", "Run one configuration over seeds");
  add_common_flags(run_cmd, run_o, false);

  auto* sweep_cmd =
      app.add_subcommand("sweep", "Cross-product sweep over listed axes");
  add_common_flags(sweep_cmd, sweep_o, true);

  auto* cal_cmd = app.add_subcommand(
      "calibrate", "Noiseless kernel-amplitude calibration for a function");
  add_common_flags(cal_cmd, cal_o, false);

  auto* proj_cmd = app.add_subcommand(
      "project", "Emit a max-projection grid (ground truth or stored surrogate)");
  add_common_flags(proj_cmd, proj_o, false);
  std::string proj_pair = "1,2", proj_cell;
  int proj_res = 60, proj_samples = 2000, proj_seed = 0;
  bool proj_surrogate = false;
  proj_cmd->add_option("--pair", proj_pair, "Dimension pair, 1-based");
  proj_cmd->add_option("--resolution", proj_res, "Cells per axis");
  proj_cmd->add_option("--samples", proj_samples, "Random-search budget per cell");
  proj_cmd->add_flag("--surrogate", proj_surrogate,
                     "Project a stored run's final model instead of the ground truth");
  proj_cmd->add_option("--cell", proj_cell, "Cell id inside --out (surrogate mode)");
  proj_cmd->add_option("--seed", proj_seed, "1-based seed index (surrogate mode)");

  auto* frames_cmd = app.add_subcommand(
      "frames", "Emit per-iteration surrogate grids from a stored run");
  add_common_flags(frames_cmd, frames_o, false);
  std::string frames_pair = "1,2", frames_cell, frame_iters = "0,10,20,30,40,50";
  int frames_res = 60, frames_seed = 1;
  frames_cmd->add_option("--pair", frames_pair, "Dimension pair, 1-based");
  frames_cmd->add_option("--resolution", frames_res, "Cells per axis");
  frames_cmd->add_option("--cell", frames_cell, "Cell id inside --out");
  frames_cmd->add_option("--seed", frames_seed, "1-based seed index");
  frames_cmd->add_option("--frame-iters", frame_iters,
                         "Iterations to render, comma-separated");

  auto* sum_cmd = app.add_subcommand(
      "summarize", "Recompute summary rows from a stored run's per-seed files");
  add_common_flags(sum_cmd, sum_o, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const SweepConfig cfg = build_sweep_config(run_o, false, run_cmd);
      const BenchResult res = bench_run(cfg, run_o.out);
      print_rows(res.rows);
      std::cout << "wrote " << (fs::path(run_o.out) / "manifest.txt").string()
                << '\n';
    } else if (sweep_cmd->parsed()) {
      const SweepConfig cfg = build_sweep_config(sweep_o, true, sweep_cmd);
      const BenchResult res = bench_run(cfg, sweep_o.out);
      print_rows(res.rows);
      std::cout << "wrote " << (fs::path(sweep_o.out) / "manifest.txt").string()
                << '\n';
    } else if (cal_cmd->parsed()) {
      const SweepConfig cfg = build_sweep_config(cal_o, false, cal_cmd);
      const double amp = calibrate_amplitude(cfg.base.gt, cfg.n_seeds, cfg.base,
                                             cfg.seed_base, cfg.parallelism);
      std::cout << "reference_amplitude " << to_string(cfg.base.gt) << " = "
                << fmt17(amp) << '\n';
      if (cal_cmd->count("--out") > 0) {
        fs::create_directories(cal_o.out);
        const fs::path p =
            fs::path(cal_o.out) / ("calibration_" + to_string(cfg.base.gt) + ".txt");
        std::ofstream f(p, std::ios::binary);
        f << "function = " << to_string(cfg.base.gt) << '\n'
          << "n_seeds = " << cfg.n_seeds << '\n'
          << "seed_base = " << cfg.seed_base << '\n'
          << "reference_amplitude = " << fmt17(amp) << '\n';
        std::cout << "wrote " << p.string() << '\n';
      }
    } else if (proj_cmd->parsed()) {
      const auto [da, db] = parse_pair(proj_pair);
      if (!proj_surrogate) {
        const Objective fn = objective_from_string(proj_o.function);
        fs::create_directories(proj_o.out);
        const fs::path p =
            fs::path(proj_o.out) / ("gt_projection_" + to_string(fn) + "_x" +
                                    std::to_string(da + 1) + "x" +
                                    std::to_string(db + 1) + ".csv");
        emit_projection_gt(fn, da, db, proj_res, p, proj_o.seed_base,
                           proj_samples);
        std::cout << "wrote " << p.string() << '\n';
      } else {
        if (proj_cell.empty())
          throw std::invalid_argument("surrogate projection needs --cell");
        const auto paths = emit_frames(proj_o.out, proj_cell, proj_seed, da, db,
                                       proj_res, {proj_o.iters});
        for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
      }
    } else if (frames_cmd->parsed()) {
      const auto [da, db] = parse_pair(frames_pair);
      if (frames_cell.empty()) throw std::invalid_argument("frames needs --cell");
      std::vector<int> iters;
      for (const auto& s : split_list(frame_iters)) iters.push_back(std::stoi(s));
      const auto paths = emit_frames(frames_o.out, frames_cell, frames_seed, da,
                                     db, frames_res, iters);
      for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
    } else if (sum_cmd->parsed()) {
      const auto rows = summarize_dir(sum_o.out);
      const fs::path p = fs::path(sum_o.out) / "summary_recomputed.csv";
      write_summary_csv(p, rows);
      print_rows(rows);
      std::cout << "wrote " << p.string() << '\n';
    }
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
