#include "bobench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace bobench {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos == 0) throw std::invalid_argument("not a number: " + s);
  return v;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for digest: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const auto n = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// --- enum spellings -----------------------------------------------------------

std::string to_string(Objective v) {
  return v == Objective::Ackley ? "ackley" : "hartmann";
}
std::string to_string(AcquisitionKind v) {
  return v == AcquisitionKind::Ucb ? "ucb" : "ei";
}
std::string to_string(BatchMethod v) {
  switch (v) {
    case BatchMethod::Lp: return "lp";
    case BatchMethod::Kb: return "kb";
    case BatchMethod::Cl: return "cl";
  }
  return "?";
}
std::string to_string(NoiseMode v) {
  switch (v) {
    case NoiseMode::None: return "none";
    case NoiseMode::GtMax: return "gtmax";
    case NoiseMode::KernelAmplitude: return "kernel";
  }
  return "?";
}

Objective objective_from_string(const std::string& s) {
  if (s == "ackley") return Objective::Ackley;
  if (s == "hartmann") return Objective::Hartmann;
  throw std::invalid_argument("unknown function: " + s);
}
AcquisitionKind acquisition_from_string(const std::string& s) {
  if (s == "ucb") return AcquisitionKind::Ucb;
  if (s == "ei") return AcquisitionKind::Ei;
  throw std::invalid_argument("unknown acquisition: " + s);
}
BatchMethod batch_from_string(const std::string& s) {
  if (s == "lp") return BatchMethod::Lp;
  if (s == "kb") return BatchMethod::Kb;
  if (s == "cl") return BatchMethod::Cl;
  throw std::invalid_argument("unknown batch method: " + s);
}
NoiseMode noise_mode_from_string(const std::string& s) {
  if (s == "none") return NoiseMode::None;
  if (s == "gtmax") return NoiseMode::GtMax;
  if (s == "kernel") return NoiseMode::KernelAmplitude;
  throw std::invalid_argument("unknown noise mode: " + s);
}

namespace {

std::string compact_number(double v) {
  std::string s = fmt17(v);
  for (char& c : s)
    if (c == '.' || c == '+' || c == '-') c = 'p';
  return s;
}

}  // namespace

std::string cell_id(const RunConfig& cfg) {
  std::ostringstream id;
  id << to_string(cfg.gt) << '_' << to_string(cfg.acquisition.kind);
  if (cfg.acquisition.kind == AcquisitionKind::Ucb)
    id << "_b" << compact_number(cfg.acquisition.beta);
  else
    id << "_xi" << compact_number(cfg.acquisition.xi);
  id << '_' << to_string(cfg.policy.method);
  id << '_' << to_string(cfg.noise.mode);
  if (cfg.noise.mode != NoiseMode::None)
    id << '_' << compact_number(cfg.noise.level);
  return id.str();
}

std::vector<RunConfig> expand_sweep(const SweepConfig& cfg) {
  const auto& ax = cfg.axes;
  auto modes = ax.noise_modes.empty()
                   ? std::vector<NoiseMode>{cfg.base.noise.mode}
                   : ax.noise_modes;
  auto levels = ax.noise_levels.empty()
                    ? std::vector<double>{cfg.base.noise.level}
                    : ax.noise_levels;
  auto kinds = ax.acq_kinds.empty()
                   ? std::vector<AcquisitionKind>{cfg.base.acquisition.kind}
                   : ax.acq_kinds;
  auto methods = ax.batch_methods.empty()
                     ? std::vector<BatchMethod>{cfg.base.policy.method}
                     : ax.batch_methods;

  std::vector<RunConfig> cells;
  for (NoiseMode mode : modes)
    for (double level : levels)
      for (AcquisitionKind kind : kinds)
        for (BatchMethod method : methods) {
          // The exploration axis matching the acquisition kind applies; the
          // other collapses to the base value.
          auto betas = (kind == AcquisitionKind::Ucb && !ax.betas.empty())
                           ? ax.betas
                           : std::vector<double>{cfg.base.acquisition.beta};
          auto xis = (kind == AcquisitionKind::Ei && !ax.xis.empty())
                         ? ax.xis
                         : std::vector<double>{cfg.base.acquisition.xi};
          for (double beta : betas)
            for (double xi : xis) {
              RunConfig c = cfg.base;
              c.noise.mode = mode;
              c.noise.level = level;
              c.acquisition.kind = kind;
              c.acquisition.beta = beta;
              c.acquisition.xi = xi;
              c.policy.method = method;
              if (c.noise.reference_amplitude == 0.0)
                c.noise.reference_amplitude = default_reference_amplitude(c.gt);
              cells.push_back(c);
            }
        }
  // Sweeping levels against the None mode collapses to one cell.
  std::vector<RunConfig> unique_cells;
  std::vector<std::string> seen;
  for (auto& c : cells) {
    const std::string id = cell_id(c);
    if (std::find(seen.begin(), seen.end(), id) == seen.end()) {
      seen.push_back(id);
      unique_cells.push_back(std::move(c));
    }
  }
  return unique_cells;
}

std::vector<RunHistory> run_seeds(const RunConfig& base, int n_seeds,
                                  std::uint64_t seed_base, int parallelism) {
  if (n_seeds < 1) throw std::invalid_argument("n_seeds must be >= 1");
  std::vector<RunHistory> out(n_seeds);
  std::vector<std::exception_ptr> errors(n_seeds);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= n_seeds) return;
      try {
        RunConfig cfg = base;
        cfg.seed = seed_base + static_cast<std::uint64_t>(k) + 1;
        out[k] = run_bo(cfg);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n_threads = std::clamp(parallelism, 1, n_seeds);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// --- CSV ---------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_curve_row(std::ofstream& out, const IterationRecord& rec) {
  out << rec.iter;
  for (int k = 0; k < rec.incumbent_x.size(); ++k)
    out << ',' << fmt17(rec.incumbent_x[k]);
  out << ',' << fmt17(rec.mu_star) << ',' << fmt17(rec.max_y) << ','
      << fmt17(rec.ir_x) << ',' << fmt17(rec.ir_y);
  for (int k = 0; k < rec.lengthscales.size(); ++k)
    out << ',' << fmt17(rec.lengthscales[k]);
  out << ',' << fmt17(rec.amplitude_sq) << ',' << fmt17(rec.gnv) << '\n';
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_learning_curve_csv(const fs::path& path, const RunHistory& history) {
  auto out = open_out(path);
  out << kCurveHeader << '\n';
  write_curve_row(out, history.init_record);
  for (const auto& rec : history.records) write_curve_row(out, rec);
}

void write_samples_csv(const fs::path& path, const RunHistory& history) {
  auto out = open_out(path);
  out << kSamplesHeader << '\n';
  for (int i = 0; i < history.data.size(); ++i) {
    out << history.data.iteration[i];
    for (int k = 0; k < history.data.x_raw.cols(); ++k)
      out << ',' << fmt17(history.data.x_raw(i, k));
    out << ',' << fmt17(history.data.y_raw[i]) << '\n';
  }
}

std::vector<CurveRow> read_curve_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kCurveHeader)
    throw std::runtime_error("unexpected curve header in " + path.string());
  std::vector<CurveRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 19)
      throw std::runtime_error("malformed curve row in " + path.string());
    CurveRow r;
    r.iter = std::stoi(f[0]);
    r.incumbent_x.resize(6);
    for (int k = 0; k < 6; ++k) r.incumbent_x[k] = parse_double(f[1 + k]);
    r.mu_star = parse_double(f[7]);
    r.max_y = parse_double(f[8]);
    r.ir_x = parse_double(f[9]);
    r.ir_y = parse_double(f[10]);
    r.lengthscales.resize(6);
    for (int k = 0; k < 6; ++k) r.lengthscales[k] = parse_double(f[11 + k]);
    r.amplitude_sq = parse_double(f[17]);
    r.gnv = parse_double(f[18]);
    rows.push_back(std::move(r));
  }
  return rows;
}

SampleRows read_samples_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kSamplesHeader)
    throw std::runtime_error("unexpected samples header in " + path.string());
  std::vector<std::array<double, 7>> vals;
  std::vector<int> iters;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8)
      throw std::runtime_error("malformed sample row in " + path.string());
    iters.push_back(std::stoi(f[0]));
    std::array<double, 7> v;
    for (int k = 0; k < 7; ++k) v[k] = parse_double(f[1 + k]);
    vals.push_back(v);
  }
  SampleRows rows;
  const int n = static_cast<int>(vals.size());
  rows.x.resize(n, 6);
  rows.y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < 6; ++k) rows.x(i, k) = vals[i][k];
    rows.y[i] = vals[i][6];
  }
  rows.iteration = std::move(iters);
  return rows;
}

void write_summary_csv(const fs::path& path, const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  out << "cell,n_seeds,seed_base,mean_ir_x,mean_ir_y,mean_cr_x,mean_cr_y,"
         "mean_rmse_raw,mean_rmse_norm,mean_sqrt_gnv,basin_fraction,"
         "p25_seed,p50_seed,p75_seed\n";
  for (const auto& r : rows) {
    out << r.cell << ',' << r.n_seeds << ',' << r.seed_base << ','
        << fmt17(r.summary.mean_ir_x) << ',' << fmt17(r.summary.mean_ir_y) << ','
        << fmt17(r.summary.mean_cr_x) << ',' << fmt17(r.summary.mean_cr_y) << ','
        << fmt17(r.summary.mean_rmse_raw) << ','
        << fmt17(r.summary.mean_rmse_norm) << ','
        << fmt17(r.summary.mean_sqrt_gnv) << ',';
    if (r.summary.basin) out << fmt17(*r.summary.basin);
    for (int p : {25, 50, 75}) {
      out << ',';
      auto it = r.percentile_seed.find(p);
      if (it != r.percentile_seed.end()) out << it->second;
    }
    out << '\n';
  }
}

// --- manifest ------------------------------------------------------------------

void write_manifest(const fs::path& path, const Manifest& m) {
  auto out = open_out(path);
  for (const auto& [k, v] : m) out << k << " = " << v << '\n';
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read manifest " + path.string());
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    const auto sep = line.find(" = ");
    if (sep == std::string::npos) continue;
    m[line.substr(0, sep)] = line.substr(sep + 3);
  }
  return m;
}

namespace {

std::string mkey(const std::string& cell, const std::string& field) {
  return "cell." + cell + "." + field;
}

void record_cell_config(Manifest& m, const std::string& cell,
                        const RunConfig& c) {
  m[mkey(cell, "function")] = to_string(c.gt);
  m[mkey(cell, "acq")] = to_string(c.acquisition.kind);
  m[mkey(cell, "beta")] = fmt17(c.acquisition.beta);
  m[mkey(cell, "xi")] = fmt17(c.acquisition.xi);
  m[mkey(cell, "batch")] = to_string(c.policy.method);
  m[mkey(cell, "batch_size")] = std::to_string(c.policy.q);
  m[mkey(cell, "init")] = std::to_string(c.n_init);
  m[mkey(cell, "iters")] = std::to_string(c.n_iter);
  m[mkey(cell, "noise_mode")] = to_string(c.noise.mode);
  m[mkey(cell, "noise_level")] = fmt17(c.noise.level);
  m[mkey(cell, "ref_amplitude")] = fmt17(c.noise.reference_amplitude);
  m[mkey(cell, "fit.restarts")] = std::to_string(c.fit.restarts);
  m[mkey(cell, "fit.max_iters")] = std::to_string(c.fit.max_iters);
  m[mkey(cell, "acqmax.candidates")] = std::to_string(c.maximize.n_candidates);
  m[mkey(cell, "acqmax.refine_top")] = std::to_string(c.maximize.refine_top);
  m[mkey(cell, "acqmax.refine_evals")] = std::to_string(c.maximize.refine_evals);
}

std::string seed_tag(int k) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%04d", k);
  return buf;
}

}  // namespace

RunConfig run_config_from_manifest(const Manifest& m, const std::string& cell) {
  auto get = [&](const std::string& field) {
    auto it = m.find(mkey(cell, field));
    if (it == m.end())
      throw std::invalid_argument("manifest missing " + mkey(cell, field));
    return it->second;
  };
  RunConfig c;
  c.gt = objective_from_string(get("function"));
  c.acquisition.kind = acquisition_from_string(get("acq"));
  c.acquisition.beta = parse_double(get("beta"));
  c.acquisition.xi = parse_double(get("xi"));
  c.policy.method = batch_from_string(get("batch"));
  c.policy.q = std::stoi(get("batch_size"));
  c.n_init = std::stoi(get("init"));
  c.n_iter = std::stoi(get("iters"));
  c.noise.mode = noise_mode_from_string(get("noise_mode"));
  c.noise.level = parse_double(get("noise_level"));
  c.noise.reference_amplitude = parse_double(get("ref_amplitude"));
  c.fit.restarts = std::stoi(get("fit.restarts"));
  c.fit.max_iters = std::stoi(get("fit.max_iters"));
  c.maximize.n_candidates = std::stoi(get("acqmax.candidates"));
  c.maximize.refine_top = std::stoi(get("acqmax.refine_top"));
  c.maximize.refine_evals = std::stoi(get("acqmax.refine_evals"));
  return c;
}

BenchResult bench_run(const SweepConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  BenchResult result;
  Manifest& m = result.manifest;
  m["tool.name"] = kToolName;
  m["tool.version"] = kToolVersion;
  m["run.n_seeds"] = std::to_string(cfg.n_seeds);
  m["run.seed_base"] = std::to_string(cfg.seed_base);
  m["run.parallelism"] = std::to_string(cfg.parallelism);

  std::vector<fs::path> files;
  for (const RunConfig& cell_cfg : expand_sweep(cfg)) {
    const std::string cell = cell_id(cell_cfg);
    result.cells.push_back(cell);
    record_cell_config(m, cell, cell_cfg);

    const auto histories =
        run_seeds(cell_cfg, cfg.n_seeds, cfg.seed_base, cfg.parallelism);
    for (int k = 1; k <= cfg.n_seeds; ++k) {
      const RunHistory& h = histories[k - 1];
      m[mkey(cell, "seed." + seed_tag(k) + ".run")] = std::to_string(h.config.seed);
      m[mkey(cell, "seed." + seed_tag(k) + ".stream.init")] =
          hex64(derive_stream_seed(h.config.seed, StreamId::Init));
      m[mkey(cell, "seed." + seed_tag(k) + ".stream.noise")] =
          hex64(derive_stream_seed(h.config.seed, StreamId::Noise));
      m[mkey(cell, "seed." + seed_tag(k) + ".stream.acquisition")] =
          hex64(derive_stream_seed(h.config.seed, StreamId::Acquisition));
      m[mkey(cell, "seed." + seed_tag(k) + ".stream.fitting")] =
          hex64(derive_stream_seed(h.config.seed, StreamId::Fitting));

      const fs::path curve = out / cell / ("curve_" + seed_tag(k) + ".csv");
      const fs::path samples = out / cell / ("samples_" + seed_tag(k) + ".csv");
      write_learning_curve_csv(curve, h);
      write_samples_csv(samples, h);
      files.push_back(curve);
      files.push_back(samples);
    }

    const GroundTruth& gt = GroundTruth::get(cell_cfg.gt);
    SummaryRow row;
    row.cell = cell;
    row.n_seeds = cfg.n_seeds;
    row.seed_base = cfg.seed_base;
    row.summary = summarize_runs(histories, gt);
    for (const auto& [p, idx] : row.summary.percentile_index)
      row.percentile_seed[p] = cfg.seed_base + static_cast<std::uint64_t>(idx) + 1;
    result.rows.push_back(std::move(row));
  }

  {
    std::string joined;
    for (const auto& c : result.cells) {
      if (!joined.empty()) joined += ',';
      joined += c;
    }
    m["run.cells"] = joined;
  }

  const fs::path summary = out / "summary.csv";
  write_summary_csv(summary, result.rows);
  files.push_back(summary);

  for (const auto& f : files)
    m["file." + fs::relative(f, out).generic_string()] = hex64(fnv1a64_file(f));
  write_manifest(out / "manifest.txt", m);
  return result;
}

double calibrate_amplitude(Objective fn, int n_seeds, const RunConfig& proto,
                           std::uint64_t seed_base, int parallelism) {
  if (n_seeds < 3) throw std::invalid_argument("calibration needs >= 3 seeds");
  RunConfig cfg = proto;
  cfg.gt = fn;
  cfg.noise = NoiseSpec{};  // noiseless by definition
  const auto histories = run_seeds(cfg, n_seeds, seed_base, parallelism);
  std::vector<double> amps;
  amps.reserve(histories.size());
  for (const auto& h : histories)
    amps.push_back(std::sqrt(h.final_model.params().amplitude_sq));
  std::sort(amps.begin(), amps.end());
  const std::size_t n = amps.size();
  return n % 2 == 1 ? amps[n / 2] : 0.5 * (amps[n / 2 - 1] + amps[n / 2]);
}

// --- projection grids ------------------------------------------------------------

namespace {

void write_grid_csv(const fs::path& path, const Eigen::MatrixXd& grid,
                    const Domain& domain, int dim_a, int dim_b,
                    const Eigen::MatrixXd* overlay_xy,
                    const std::vector<int>* overlay_iter) {
  auto out = open_out(path);
  out << "i,j,xa,xb,value,pt_xa,pt_xb,pt_iter\n";
  const int res = static_cast<int>(grid.rows());
  const double wa = domain.width(dim_a) / res;
  const double wb = domain.width(dim_b) / res;
  const int n_pts = overlay_xy ? static_cast<int>(overlay_xy->rows()) : 0;
  int row = 0;
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j, ++row) {
      const double a = domain.lower()[dim_a] + (i + 0.5) * wa;
      const double b = domain.lower()[dim_b] + (j + 0.5) * wb;
      out << i << ',' << j << ',' << fmt17(a) << ',' << fmt17(b) << ','
          << fmt17(grid(i, j));
      if (row < n_pts) {
        out << ',' << fmt17((*overlay_xy)(row, 0)) << ','
            << fmt17((*overlay_xy)(row, 1)) << ',' << (*overlay_iter)[row];
      } else {
        out << ",,,";
      }
      out << '\n';
    }
}

}  // namespace

void emit_projection_gt(Objective fn, int dim_a, int dim_b, int resolution,
                        const fs::path& path, std::uint64_t seed, int n_samples) {
  const GroundTruth& gt = GroundTruth::get(fn);
  RngStream rng(seed, StreamId::Scratch);
  const Eigen::MatrixXd grid =
      gt_projection_grid(gt, dim_a, dim_b, resolution, rng, n_samples);
  write_grid_csv(path, grid, gt.domain, dim_a, dim_b, nullptr, nullptr);
}

void emit_projection_surrogate(const GprModel& model, const Dataset& data,
                               const GroundTruth& gt,
                               const Eigen::VectorXd& incumbent_raw, int dim_a,
                               int dim_b, int resolution, const fs::path& path) {
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  const Normalizer norm = Normalizer::for_gt(gt);
  const double wa = gt.domain.width(dim_a) / resolution;
  const double wb = gt.domain.width(dim_b) / resolution;
  Eigen::MatrixXd grid(resolution, resolution);
  Eigen::VectorXd x = incumbent_raw;
  for (int i = 0; i < resolution; ++i) {
    x[dim_a] = gt.domain.lower()[dim_a] + (i + 0.5) * wa;
    for (int j = 0; j < resolution; ++j) {
      x[dim_b] = gt.domain.lower()[dim_b] + (j + 0.5) * wb;
      grid(i, j) = norm.denormalize_y(model.posterior_mean(norm.normalize_x(x)));
    }
  }
  Eigen::MatrixXd overlay(data.size(), 2);
  for (int i = 0; i < data.size(); ++i) {
    overlay(i, 0) = data.x_raw(i, dim_a);
    overlay(i, 1) = data.x_raw(i, dim_b);
  }
  write_grid_csv(path, grid, gt.domain, dim_a, dim_b, &overlay, &data.iteration);
}

namespace {

struct StoredRun {
  RunConfig config;
  SampleRows samples;
  std::vector<CurveRow> curve;  // row 0 is iteration 0
};

StoredRun load_stored_run(const fs::path& run_dir, const std::string& cell,
                          int seed_k) {
  StoredRun r;
  const Manifest m = read_manifest(run_dir / "manifest.txt");
  r.config = run_config_from_manifest(m, cell);
  r.samples = read_samples_csv(run_dir / cell /
                               ("samples_" + seed_tag(seed_k) + ".csv"));
  r.curve =
      read_curve_csv(run_dir / cell / ("curve_" + seed_tag(seed_k) + ".csv"));
  return r;
}

GprModel rebuild_model(const SampleRows& samples, const CurveRow& hyper,
                       const GroundTruth& gt, int max_iter) {
  const Normalizer norm = Normalizer::for_gt(gt);
  std::vector<int> keep;
  for (std::size_t i = 0; i < samples.iteration.size(); ++i)
    if (samples.iteration[i] <= max_iter) keep.push_back(static_cast<int>(i));
  Eigen::MatrixXd x(keep.size(), samples.x.cols());
  Eigen::VectorXd y(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    x.row(i) = samples.x.row(keep[i]);
    y[i] = norm.normalize_y(samples.y[keep[i]]);
  }
  KernelParams params{hyper.amplitude_sq, hyper.lengthscales};
  return GprModel::build(norm.normalize_rows(x), y, params, hyper.gnv);
}

}  // namespace

std::vector<fs::path> emit_frames(const fs::path& run_dir,
                                  const std::string& cell, std::uint64_t seed,
                                  int dim_a, int dim_b, int resolution,
                                  const std::vector<int>& iters) {
  const StoredRun run = load_stored_run(run_dir, cell, static_cast<int>(seed));
  const GroundTruth& gt = GroundTruth::get(run.config.gt);
  const Normalizer norm = Normalizer::for_gt(gt);

  std::vector<fs::path> emitted;
  for (int iter : iters) {
    const auto row = std::find_if(run.curve.begin(), run.curve.end(),
                                  [&](const CurveRow& r) { return r.iter == iter; });
    if (row == run.curve.end())
      throw std::invalid_argument("no recorded iteration " + std::to_string(iter));
    const GprModel model = rebuild_model(run.samples, *row, gt, iter);

    // Overlay only the observations available at this iteration.
    Dataset prefix;
    std::vector<int> keep;
    for (std::size_t i = 0; i < run.samples.iteration.size(); ++i)
      if (run.samples.iteration[i] <= iter) keep.push_back(static_cast<int>(i));
    Eigen::MatrixXd x(keep.size(), run.samples.x.cols());
    Eigen::VectorXd y(keep.size());
    std::vector<int> tags;
    for (std::size_t i = 0; i < keep.size(); ++i) {
      x.row(i) = run.samples.x.row(keep[i]);
      y[i] = run.samples.y[keep[i]];
      tags.push_back(run.samples.iteration[keep[i]]);
    }
    prefix.x_raw = x;
    prefix.y_raw = y;
    prefix.x_norm = norm.normalize_rows(x);
    prefix.y_norm = y;
    prefix.iteration = tags;

    char name[64];
    std::snprintf(name, sizeof(name), "frame_%s_i%03d.csv",
                  seed_tag(static_cast<int>(seed)).c_str(), iter);
    const fs::path path = run_dir / cell / name;
    emit_projection_surrogate(model, prefix, gt, row->incumbent_x, dim_a, dim_b,
                              resolution, path);
    emitted.push_back(path);
  }
  return emitted;
}

std::vector<SummaryRow> summarize_dir(const fs::path& run_dir) {
  const Manifest m = read_manifest(run_dir / "manifest.txt");
  const int n_seeds = std::stoi(m.at("run.n_seeds"));
  const std::uint64_t seed_base = std::stoull(m.at("run.seed_base"));

  // Cell order as emitted, so the recomputed summary matches byte for byte.
  std::vector<std::string> cells;
  {
    std::istringstream in(m.at("run.cells"));
    std::string cell;
    while (std::getline(in, cell, ','))
      if (!cell.empty()) cells.push_back(cell);
  }

  std::vector<SummaryRow> rows;
  for (const std::string& cell : cells) {
    const RunConfig cfg = run_config_from_manifest(m, cell);
    const GroundTruth& gt = GroundTruth::get(cfg.gt);
    const Normalizer norm = Normalizer::for_gt(gt);

    BenchmarkSummary s;
    std::vector<Eigen::VectorXd> final_incumbents;
    for (int k = 1; k <= n_seeds; ++k) {
      const auto samples = read_samples_csv(
          run_dir / cell / ("samples_" + seed_tag(k) + ".csv"));
      const auto curve =
          read_curve_csv(run_dir / cell / ("curve_" + seed_tag(k) + ".csv"));
      if (curve.empty()) throw std::runtime_error("empty curve for " + cell);
      const CurveRow& last = curve.back();

      const Eigen::VectorXd inc_norm = norm.normalize_x(last.incumbent_x);
      const double irx = (inc_norm - norm.normalize_x(gt.x_max)).norm();
      s.per_seed_ir_x.push_back(irx);
      s.mean_ir_x += irx;
      s.mean_ir_y += std::abs(last.mu_star - gt.y_max) / gt.y_range_width();
      double crx = 0.0, cry = 0.0;
      for (const auto& r : curve) {
        if (r.iter == 0) continue;
        crx += r.ir_x;
        cry += r.ir_y;
      }
      s.mean_cr_x += crx;
      s.mean_cr_y += cry;

      const GprModel model =
          rebuild_model(samples, last, gt, std::numeric_limits<int>::max());
      Dataset data;
      data.x_raw = samples.x;
      data.y_raw = samples.y;
      data.x_norm = norm.normalize_rows(samples.x);
      data.y_norm = samples.y;
      data.iteration = samples.iteration;
      const auto [rmse_raw, rmse_norm] = parity_rmse(model, data, gt);
      s.mean_rmse_raw += rmse_raw;
      s.mean_rmse_norm += rmse_norm;
      s.mean_sqrt_gnv += std::sqrt(last.gnv);
      final_incumbents.push_back(inc_norm);
    }
    s.mean_ir_x /= n_seeds;
    s.mean_ir_y /= n_seeds;
    s.mean_cr_x /= n_seeds;
    s.mean_cr_y /= n_seeds;
    s.mean_rmse_raw /= n_seeds;
    s.mean_rmse_norm /= n_seeds;
    s.mean_sqrt_gnv /= n_seeds;
    if (n_seeds >= 3) s.percentile_index = percentile_seeds(s.per_seed_ir_x);
    if (gt.x_max2) {
      const Eigen::VectorXd m1 = norm.normalize_x(gt.x_max);
      const Eigen::VectorXd m2 = norm.normalize_x(*gt.x_max2);
      int near = 0;
      for (const auto& inc : final_incumbents)
        if ((inc - m1).norm() < (inc - m2).norm()) ++near;
      s.basin = static_cast<double>(near) / n_seeds;
    }

    SummaryRow row;
    row.cell = cell;
    row.n_seeds = n_seeds;
    row.seed_base = seed_base;
    row.summary = std::move(s);
    for (const auto& [p, idx] : row.summary.percentile_index)
      row.percentile_seed[p] = seed_base + static_cast<std::uint64_t>(idx) + 1;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace bobench
