#include "cli.hpp"

#include "spdtraj/analysis.hpp"
#include "spdtraj/errors.hpp"
#include "spdtraj/estimation.hpp"
#include "spdtraj/io.hpp"
#include "spdtraj/parallel.hpp"
#include "spdtraj/reduction.hpp"
#include "spdtraj/simgen.hpp"
#include "spdtraj/trajectory_metric.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>

namespace spdtraj::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Collects everything the manifest records about one invocation.
class Run {
 public:
  Run(std::string command, const std::vector<std::string>& argv, fs::path out_dir, int threads)
      : out_dir_(std::move(out_dir)), threads_(threads) {
    m_["tool"] = "spdtraj";
    m_["version"] = kVersion;
    m_["command"] = std::move(command);
    m_["argv"] = argv;
    m_["cwd"] = fs::current_path().string();
    m_["out_dir"] = out_dir_.string();
    m_["threads"] = threads;
    m_["config"] = json::object();
    m_["seeds"] = json::object();
    m_["inputs"] = json::array();
    m_["outputs"] = json::array();
    m_["timings_seconds"] = json::object();
    m_["diagnostics"] = json::object();
    fs::create_directories(out_dir_);
  }

  int threads() const { return threads_; }
  fs::path path(const std::string& rel) const { return out_dir_ / rel; }
  json& config() { return m_["config"]; }
  json& diagnostics() { return m_["diagnostics"]; }
  void seed(const std::string& name, std::uint64_t v) { m_["seeds"][name] = v; }

  void input(const fs::path& p) { m_["inputs"].push_back({{"path", p.string()}, {"sha256", sha256_file(p.string())}}); }
  void output(const std::string& rel, bool deterministic = true) {
    m_["outputs"].push_back({{"path", rel}, {"sha256", sha256_file(path(rel).string())}, {"deterministic", deterministic}});
  }

  template <class F>
  decltype(auto) stage(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Record {
      Run* run;
      std::string name;
      std::chrono::steady_clock::time_point t0;
      ~Record() {
        run->m_["timings_seconds"][name] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    } rec{this, name, t0};
    return f();
  }

  void finish() { io::write_text(path("manifest.json"), m_.dump(2) + "\n"); }

 private:
  fs::path out_dir_;
  int threads_;
  json m_;
};

json options_json(const CLI::App* sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      if (r.size() == 1 && opt->get_expected_max() <= 1) {
        cfg[name] = r.front();
      } else {
        cfg[name] = r;
      }
    } else {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& given, const std::string& ext) {
  std::vector<fs::path> out;
  for (const std::string& g : given) {
    const fs::path p(g);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ext) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      if (found.empty()) throw ConfigError("input directory '" + g + "' contains no " + ext + " files");
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      out.push_back(p);
    } else {
      throw ConfigError("input '" + g + "' does not exist");
    }
  }
  if (out.empty()) throw ConfigError("no inputs given");
  return out;
}

std::vector<std::string> unique_ids(const std::vector<fs::path>& paths) {
  std::vector<std::string> ids;
  std::map<std::string, int> seen;
  for (const auto& p : paths) {
    std::string id = p.stem().string();
    const int k = ++seen[id];
    if (k > 1) id += "#" + std::to_string(k);
    ids.push_back(id);
  }
  return ids;
}

struct Collection {
  std::vector<std::string> ids;
  std::vector<CovarianceTrajectory> trajectories;
};

Collection load_trajectories(Run& run, const std::vector<std::string>& given) {
  Collection c;
  const auto paths = expand_inputs(given, ".spdt");
  c.ids = unique_ids(paths);
  run.stage("load", [&] {
    for (const auto& p : paths) {
      run.input(p);
      c.trajectories.push_back(io::read_trajectory(p));
    }
  });
  return c;
}

std::vector<UnitDetSpd> unit_parts(const std::vector<CovarianceTrajectory>& trajs) {
  std::vector<UnitDetSpd> out;
  for (const auto& t : trajs)
    for (const Spd& p : t.matrices()) out.push_back(normalize_det(p).unit);
  return out;
}

void require_uniform_dim(const std::vector<CovarianceTrajectory>& trajs, const std::string& what) {
  for (const auto& t : trajs) {
    if (t.dim() != trajs.front().dim()) {
      throw DimensionMismatch(what + ": inputs have mixed dimensions (" + std::to_string(trajs.front().dim()) + " and " +
                              std::to_string(t.dim()) + ")");
    }
  }
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s + "\n";
}

// ---- solver flags shared by reduce / distance / classify ----
struct SolverFlags {
  int max_iters = 500;
  double tolerance = 1e-6;
  int restarts = 0;
  std::size_t pair_cap = 2048;
  std::uint64_t seed = 0;
  std::string init = "logpca";

  void add(CLI::App* sub, bool with_seed) {
    sub->add_option("--max-iters", max_iters, "Maximum ascent iterations")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--tolerance", tolerance, "Riemannian gradient norm tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--restarts", restarts, "Extra random restarts")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--pair-cap", pair_cap, "Pair subsample size when the training set exceeds 64 matrices")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sub->add_option("--init", init, "Starting basis")->capture_default_str()->check(CLI::IsMember({"logpca", "random"}));
    if (with_seed) sub->add_option("--seed", seed, "Seed for pair subsampling and random starts")->capture_default_str();
  }

  FitOptions options(int threads) const {
    FitOptions o;
    o.max_iters = max_iters;
    o.tolerance = tolerance;
    o.restarts = restarts;
    o.pair_cap = pair_cap;
    o.seed = seed;
    o.init = init == "random" ? FitInit::Random : FitInit::LogPca;
    o.threads = threads;
    return o;
  }
};

ReductionModel fit_and_record(Run& run, const std::vector<UnitDetSpd>& training, int d, const SolverFlags& flags) {
  const Eigen::Index n = training.front().dim();
  if (d < 1 || d >= n) {
    throw ConfigError("--d=" + std::to_string(d) + " must satisfy 1 <= d < n=" + std::to_string(n) +
                      " (the reduced dimension must be strictly smaller)");
  }
  run.seed("reduce", flags.seed);
  ReductionModel m = run.stage("fit", [&] { return fit(training, d, flags.options(run.threads())); });
  auto& diag = run.diagnostics();
  diag["fit_converged"] = m.converged;
  diag["fit_iterations"] = m.iterations;
  diag["fit_stop_reason"] = m.stop_reason;
  diag["fit_gradient_norm"] = m.gradient_norm;
  diag["fit_pair_count"] = m.pair_count;
  diag["fit_objective"] = m.objective_trace.back();
  diag["projection"] = "B^T P B renormalized to unit determinant; log-det kept as a separate channel";
  return m;
}

void write_objective_trace(Run& run, const ReductionModel& m) {
  std::string s = "iteration,objective\n";
  for (std::size_t k = 0; k < m.objective_trace.size(); ++k) s += std::to_string(k) + "," + io::format_double(m.objective_trace[k]) + "\n";
  io::write_text(run.path("objective_trace.csv"), s);
  run.output("objective_trace.csv");
}

bool is_matrix_metric(const std::string& m) { return m == "spd" || m == "spd-full" || m == "spd-logeuclidean"; }

// Shared by distance and classify: builds the distance matrix from trajectory archives.
struct DistanceFlags {
  std::vector<std::string> inputs;
  std::string metric = "dq";
  std::string basis;
  int reduce = 0;
  std::optional<double> w_det;
  std::size_t grid = 0;
  SolverFlags solver;

  void add(CLI::App* sub, bool inputs_required) {
    auto* in = sub->add_option("--inputs", inputs, "Trajectory archives or directories of them");
    if (inputs_required) in->required();
    sub->add_option("--metric", metric,
                    "dc | dq | logeuclidean (per trajectory) or spd | spd-full | spd-logeuclidean (per matrix)")
        ->capture_default_str()
        ->check(CLI::IsMember({"dc", "dq", "logeuclidean", "spd", "spd-full", "spd-logeuclidean"}));
    sub->add_option("--basis", basis, "Reduction basis archive (STFB) applied before comparing");
    sub->add_option("--reduce", reduce, "Fit a basis of this dimension on the inputs first")->check(CLI::PositiveNumber);
    sub->add_option("--w-det", w_det, "Weight of the log-det channel (trajectories default 0, matrices 1/n)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--grid", grid, "Alignment lattice size (0 = longest input)")->capture_default_str();
    solver.add(sub, true);
  }

  DistanceMatrix compute(Run& run, std::vector<AlignmentRecord>* records) const {
    if (!basis.empty() && reduce > 0) throw ConfigError("--basis and --reduce are mutually exclusive");
    Collection c = load_trajectories(run, inputs);
    std::optional<StiefelBasis> b;
    if (!basis.empty()) {
      run.input(basis);
      b = io::read_basis(basis);
    } else if (reduce > 0) {
      require_uniform_dim(c.trajectories, "--reduce");
      const ReductionModel m = fit_and_record(run, unit_parts(c.trajectories), reduce, solver);
      io::write_basis(run.path("basis.stfb"), m.basis);
      run.output("basis.stfb");
      write_objective_trace(run, m);
      b = m.basis;
    }
    if (b) {
      for (auto& t : c.trajectories) t = reduce_trajectory(t, *b);
      run.diagnostics()["reduced_dimension"] = b->d();
    }
    if (is_matrix_metric(metric)) {
      std::vector<Spd> mats;
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < c.trajectories.size(); ++i) {
        for (std::size_t k = 0; k < c.trajectories[i].length(); ++k) {
          Spd p = c.trajectories[i][k];
          if (b) p = normalize_det(p).unit.spd();  // projected matrices live in the unit-determinant space
          mats.push_back(p);
          ids.push_back(c.ids[i] + ":" + std::to_string(k));
        }
      }
      const MatrixDistance md = metric == "spd" ? MatrixDistance::UnitDet
                                : metric == "spd-full" ? MatrixDistance::Full
                                                       : MatrixDistance::LogEuclidean;
      return run.stage("distance", [&] {
        return matrix_distance_matrix(mats, ids, md, w_det.value_or(-1.0), run.threads());
      });
    }
    DistanceOptions o;
    o.metric = metric == "dc" ? TrajectoryDistance::Dc : metric == "dq" ? TrajectoryDistance::Dq : TrajectoryDistance::LogEuclidean;
    o.trajectory.w_det = w_det.value_or(0.0);
    o.trajectory.grid = grid;
    o.threads = run.threads();
    if (grid == 1) throw ConfigError("--grid must be 0 or at least 2");
    return run.stage("distance", [&] { return distance_matrix(c.trajectories, c.ids, o, records); });
  }
};

// ---- commands ----

void cmd_simulate_exp1(Run& run, const Exp1Config& cfg) {
  run.seed("exp1", cfg.seed);
  const Exp1Data data = run.stage("generate", [&] { return gen_exp1(cfg, run.threads()); });
  std::vector<std::string> ids;
  std::vector<int> labels;
  std::string gen = "id,set,seed,config_hash\n";
  const std::string hash = std::to_string(config_hash(cfg));
  run.stage("write", [&] {
    for (std::size_t i = 0; i < data.sets.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "set_%02zu", i);
      const std::string rel = std::string("sets/") + name + ".spdt";
      io::write_trajectory(run.path(rel), CovarianceTrajectory(data.sets[i]));
      run.output(rel);
      for (std::size_t k = 0; k < data.sets[i].size(); ++k) {
        ids.push_back(std::string(name) + ":" + std::to_string(k));
        labels.push_back(static_cast<int>(i));
        gen += ids.back() + "," + std::to_string(i) + "," + std::to_string(cfg.seed) + "," + hash + "\n";
      }
    }
    io::write_labels_csv(run.path("labels.csv"), ids, labels);
    run.output("labels.csv");
    io::write_text(run.path("generator.csv"), gen);
    run.output("generator.csv");
  });
  run.diagnostics()["matrices"] = ids.size();
}

void cmd_simulate_exp2(Run& run, const Exp2Config& cfg, std::ostream& out) {
  run.seed("exp2", cfg.seed);
  const Exp2Data data = run.stage("generate", [&] { return gen_exp2(cfg, run.threads()); });
  run.stage("write", [&] {
    io::write_trajectory(run.path("original.spdt"), data.original);
    run.output("original.spdt");
    io::write_trajectory(run.path("warped.spdt"), data.warped);
    run.output("warped.spdt");
    io::write_warp_csv(run.path("gamma.csv"), data.gamma);
    run.output("gamma.csv");
    const std::string hash = std::to_string(config_hash(cfg));
    io::write_text(run.path("generator.csv"), "id,set,seed,config_hash\noriginal,0," + std::to_string(cfg.seed) + "," +
                                                  hash + "\nwarped,0," + std::to_string(cfg.seed) + "," + hash + "\n");
    run.output("generator.csv");
  });
  run.diagnostics()["window_count"] = data.window_count;
  out << "sliding windows: " << data.window_count << ", trajectory length: " << data.original.length() << "\n";
}

void cmd_simulate_twoclass(Run& run, const TwoClassConfig& cfg) {
  run.seed("twoclass", cfg.seed);
  const LabeledCollection c = run.stage("generate", [&] { return gen_two_class(cfg, run.threads()); });
  const std::string hash = std::to_string(config_hash(cfg));
  std::string gen = "id,class,seed,config_hash\n";
  run.stage("write", [&] {
    for (std::size_t i = 0; i < c.ids.size(); ++i) {
      const std::string rel = "trajectories/" + c.ids[i] + ".spdt";
      io::write_trajectory(run.path(rel), c.trajectories[i]);
      run.output(rel);
      gen += c.ids[i] + "," + std::to_string(c.labels[i]) + "," + std::to_string(cfg.seed) + "," + hash + "\n";
    }
    io::write_labels_csv(run.path("labels.csv"), c.ids, c.labels);
    run.output("labels.csv");
    io::write_text(run.path("generator.csv"), gen);
    run.output("generator.csv");
  });
  run.diagnostics()["trajectories"] = c.ids.size();
}

struct EstimateFlags {
  std::string input;
  int window = 0;
  int step = 0;
  double sampling_step = 1.0;
  double smooth = 0.0;
  std::size_t out_length = 0;
  std::string name = "trajectory";
};

void cmd_estimate(Run& run, const EstimateFlags& f) {
  run.input(f.input);
  const MultivariateTimeSeries ts = run.stage("load", [&] { return io::read_timeseries_csv(f.input, f.sampling_step); });
  const WindowConfig wc{f.window, f.step};
  window_count(ts.n_times(), wc);  // validates
  CovarianceTrajectory traj = run.stage("estimate", [&] { return estimate_trajectory(ts, wc, run.threads()); });
  std::string diag = "window,start,rho1,rho2,intensity,degenerate\n";
  for (std::size_t k = 0; k < traj.length(); ++k) {
    const Eigen::Index start = static_cast<Eigen::Index>(k) * f.step;
    const ShrinkageDiagnostics d = ledoit_wolf(ts.values().middleRows(start, f.window)).diagnostics;
    diag += std::to_string(k) + "," + std::to_string(start) + "," + io::format_double(d.rho1) + "," +
            io::format_double(d.rho2) + "," + io::format_double(d.intensity) + "," + (d.degenerate ? "1" : "0") + "\n";
  }
  if (f.smooth > 0.0) {
    const std::size_t len = f.out_length ? f.out_length : traj.length();
    traj = run.stage("smooth", [&] { return smooth_resample(traj, f.smooth, len); });
  } else if (f.out_length) {
    traj = traj.resampled(f.out_length);
  }
  io::write_trajectory(run.path(f.name + ".spdt"), traj);
  run.output(f.name + ".spdt");
  io::write_text(run.path("shrinkage.csv"), diag);
  run.output("shrinkage.csv");
  run.diagnostics()["windows"] = window_count(ts.n_times(), wc);
}

void cmd_reduce(Run& run, const std::vector<std::string>& inputs, int d, const SolverFlags& solver, std::ostream& out) {
  const Collection c = load_trajectories(run, inputs);
  require_uniform_dim(c.trajectories, "reduce");
  const ReductionModel m = fit_and_record(run, unit_parts(c.trajectories), d, solver);
  io::write_basis(run.path("basis.stfb"), m.basis);
  run.output("basis.stfb");
  write_objective_trace(run, m);
  out << "objective " << io::format_double(m.objective_trace.back()) << " after " << m.iterations
      << " iterations (" << m.stop_reason << ")\n";
}

void write_distance_outputs(Run& run, const DistanceMatrix& d, const std::vector<AlignmentRecord>& records) {
  io::write_distance_csv(run.path("distances.csv"), d);
  run.output("distances.csv");
  run.diagnostics()["metric"] = d.metric;
  run.diagnostics()["max_asymmetry"] = d.max_asymmetry;
  if (d.metric == "dq") {
    io::write_alignment_report_csv(run.path("alignment_report.csv"), d, records);
    run.output("alignment_report.csv");
    const ReductionHistogram h = alignment_reduction_histogram(records);
    io::write_histogram_csv(run.path("histogram.csv"), h.values);
    run.output("histogram.csv");
    run.diagnostics()["histogram_skipped_pairs"] = h.skipped;
  }
}

void cmd_distance(Run& run, const DistanceFlags& f, std::ostream& out) {
  std::vector<AlignmentRecord> records;
  const DistanceMatrix d = f.compute(run, &records);
  write_distance_outputs(run, d, records);
  out << d.size() << "x" << d.size() << " " << d.metric << " distance matrix";
  if (d.metric == "dq") out << " (max direction gap " << io::format_double(d.max_asymmetry) << ")";
  out << "\n";
}

void cmd_align(Run& run, const std::string& a, const std::string& b, std::size_t grid, double w_det, std::ostream& out) {
  run.input(a);
  run.input(b);
  const CovarianceTrajectory ta = io::read_trajectory(a);
  const CovarianceTrajectory tb = io::read_trajectory(b);
  TrajectoryMetricOptions o;
  o.grid = grid;
  o.w_det = w_det;
  const Alignment al = run.stage("align", [&] { return align_dq(ta, tb, o); });
  io::write_warp_csv(run.path("warp.csv"), al.warp);
  run.output("warp.csv");
  const double rel = al.dc > 0.0 ? (al.dc - al.dq) / al.dc : 0.0;
  io::write_text(run.path("alignment.csv"),
                 "id1,id2,d_c,d_q,relative_reduction\n" +
                     csv_line({fs::path(a).stem().string(), fs::path(b).stem().string(), io::format_double(al.dc),
                               io::format_double(al.dq), io::format_double(rel)}));
  run.output("alignment.csv");
  out << "d_c " << io::format_double(al.dc) << " d_q " << io::format_double(al.dq) << "\n";
}

struct ClassifyFlags {
  std::string distances;
  std::string labels;
  int folds = 5;
  int k = 1;
  std::uint64_t seed = 0;
  DistanceFlags dist;
};

void cmd_classify(Run& run, const ClassifyFlags& f, std::ostream& out) {
  if (f.distances.empty() == f.dist.inputs.empty()) throw ConfigError("give exactly one of --distances or --inputs");
  DistanceMatrix d;
  if (!f.distances.empty()) {
    run.input(f.distances);
    d = io::read_distance_csv(f.distances);
  } else {
    std::vector<AlignmentRecord> records;
    d = f.dist.compute(run, &records);
    write_distance_outputs(run, d, records);
  }
  run.input(f.labels);
  const auto table = io::read_labels_csv(f.labels);
  std::vector<int> labels;
  for (const auto& id : d.ids) {
    const auto it = table.find(id);
    if (it == table.end()) throw ConfigError("labels file has no row for id '" + id + "'");
    labels.push_back(it->second);
  }
  run.seed("folds", f.seed);
  const CrossValidation cv = run.stage("classify", [&] { return cross_validate(d, labels, f.folds, f.k, f.seed); });
  std::string pred = "id,label,predicted,fold\n";
  for (std::size_t i = 0; i < d.ids.size(); ++i)
    pred += csv_line({d.ids[i], std::to_string(labels[i]), std::to_string(cv.predictions[i]), std::to_string(cv.fold[i])});
  io::write_text(run.path("predictions.csv"), pred);
  run.output("predictions.csv");
  io::write_confusion_csv(run.path("confusion.csv"), cv);
  run.output("confusion.csv");
  std::string acc = "class,accuracy\n";
  for (std::size_t c = 0; c < cv.classes.size(); ++c) acc += std::to_string(cv.classes[c]) + "," + io::format_double(cv.class_accuracy[c]) + "\n";
  acc += "overall," + io::format_double(cv.accuracy) + "\n";
  io::write_text(run.path("accuracy.csv"), acc);
  run.output("accuracy.csv");
  run.diagnostics()["accuracy"] = cv.accuracy;
  out << "overall accuracy " << io::format_double(cv.accuracy) << " (" << f.folds << "-fold, k=" << f.k << ")\n";
}

void cmd_logdet(Run& run, const std::vector<std::string>& inputs) {
  const Collection c = load_trajectories(run, inputs);
  std::vector<std::vector<double>> curves;
  std::size_t rows = 0;
  for (const auto& t : c.trajectories) {
    curves.push_back(logdet_curve(t));
    rows = std::max(rows, curves.back().size());
  }
  std::string s = csv_line(c.ids);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::string> cells;
    for (const auto& cv : curves) cells.push_back(r < cv.size() ? io::format_double(cv[r]) : "");
    s += csv_line(cells);
  }
  io::write_text(run.path("logdet.csv"), s);
  run.output("logdet.csv");
}

void cmd_bench(Run& run, const std::vector<int>& sizes, int length, const std::string& align, int repeats,
               std::uint64_t seed, std::ostream& out) {
  if (length < 2) throw ConfigError("--T must be at least 2");
  const bool aligned = align == "on";
  run.seed("bench", seed);
  std::string s = "size,align,seconds_per_pair\n";
  std::vector<double> times;
  for (int n : sizes) {
    TwoClassConfig cfg;
    cfg.n_per_class = 1;
    cfg.n = n;
    cfg.T = length;
    cfg.separation = 0.5;
    cfg.spread = 0.3;
    cfg.seed = seed;
    const LabeledCollection c = gen_two_class(cfg);
    std::vector<double> samples;
    for (int r = 0; r < repeats; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      if (aligned) {
        (void)align_dq(c.trajectories[0], c.trajectories[1]);
      } else {
        (void)dist_dc(c.trajectories[0], c.trajectories[1]);
      }
      samples.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    std::sort(samples.begin(), samples.end());
    times.push_back(samples[samples.size() / 2]);
    s += std::to_string(n) + "," + align + "," + io::format_double(times.back()) + "\n";
  }
  io::write_text(run.path("bench.csv"), s);
  run.output("bench.csv", false);  // wall-clock timings are not reproducible
  bool monotone = true;
  for (std::size_t i = 0; i < sizes.size(); ++i)
    for (std::size_t j = 0; j < sizes.size(); ++j)
      if (sizes[i] < sizes[j] && !(times[i] < times[j])) monotone = false;
  run.diagnostics()["smaller_dimension_faster"] = monotone;
  out << "smaller dimensions strictly faster: " << (monotone ? "yes" : "no") << "\n";
}

void cmd_report(Run& run, const std::vector<std::string>& distances, const std::string& labels_path) {
  std::vector<DistanceMatrix> mats;
  for (const auto& p : distances) {
    run.input(p);
    mats.push_back(io::read_distance_csv(p));
  }
  std::vector<int> labels;
  if (!labels_path.empty()) {
    run.input(labels_path);
    const auto table = io::read_labels_csv(labels_path);
    for (const auto& id : mats.front().ids) {
      const auto it = table.find(id);
      if (it == table.end()) throw ConfigError("labels file has no row for id '" + id + "'");
      labels.push_back(it->second);
    }
  }
  std::string s = "file,items,within_mean,between_mean,ratio,frobenius_gap\n";
  for (std::size_t i = 0; i < mats.size(); ++i) {
    std::vector<std::string> row{fs::path(distances[i]).string(), std::to_string(mats[i].size())};
    if (!labels.empty()) {
      if (mats[i].ids != mats.front().ids) throw ConfigError("distance files list different ids");
      const BlockContrast b = block_contrast(mats[i], labels);
      row.insert(row.end(), {io::format_double(b.within), io::format_double(b.between), io::format_double(b.ratio)});
    } else {
      row.insert(row.end(), {"", "", ""});
    }
    row.push_back(io::format_double(frobenius_gap(mats.front(), mats[i])));
    s += csv_line(row);
  }
  io::write_text(run.path("report.csv"), s);
  run.output("report.csv");
}

std::vector<std::string> replace_out(std::vector<std::string> argv, const std::string& out_dir) {
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < argv.size(); ++i) {
    const std::string& a = argv[i];
    if (a == "--out" || a == "-o") {
      ++i;
      continue;
    }
    if (a.rfind("--out=", 0) == 0) continue;
    kept.push_back(a);
  }
  kept.push_back("--out");
  kept.push_back(out_dir);
  return kept;
}

int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) throw ConfigError("cannot open manifest '" + manifest_path + "'");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
  }
  if (!m.contains("argv") || !m.contains("outputs")) throw ConfigError("manifest lacks argv/outputs");
  const auto argv = m["argv"].get<std::vector<std::string>>();
  if (!argv.empty() && argv.front() == "replay") throw ConfigError("refusing to replay a replay manifest");
  const fs::path target = out_dir.empty() ? fs::path(manifest_path).parent_path() / "replay" : fs::path(out_dir);
  const fs::path abs_target = fs::absolute(target);
  const fs::path here = fs::current_path();
  const fs::path then = m.value("cwd", here.string());
  fs::current_path(then);
  int code = 0;
  try {
    code = run(replace_out(argv, abs_target.string()), out, err);
  } catch (...) {
    fs::current_path(here);
    throw;
  }
  fs::current_path(here);
  if (code != 0) return code;
  std::size_t same = 0, checked = 0, skipped = 0;
  for (const auto& o : m["outputs"]) {
    if (!o.value("deterministic", true)) {
      ++skipped;
      continue;
    }
    ++checked;
    const std::string rel = o["path"].get<std::string>();
    const fs::path p = abs_target / rel;
    const bool ok = fs::exists(p) && sha256_file(p.string()) == o["sha256"].get<std::string>();
    if (ok) {
      ++same;
    } else {
      err << "replay mismatch: " << rel << "\n";
    }
  }
  out << "replay: " << same << "/" << checked << " artifacts identical";
  if (skipped) out << " (" << skipped << " timing artifacts not compared)";
  out << "\n";
  return same == checked ? 0 : 1;
}

}  // namespace

std::string sha256_file(const std::string& path) {
  const std::string data = io::read_text(path);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed for '" + path + "'");
  }
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Covariance trajectories: simulation, reduction, rate-invariant distances and classification", "spdtraj"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  int threads = 0;
  std::string out_dir;
  app.add_option("--threads", threads, "Worker threads (default: $SPDTRAJ_THREADS or 1)")->check(CLI::NonNegativeNumber);
  app.add_option("-o,--out", out_dir, "Output directory (default: $SPDTRAJ_SCRATCH or .)");

  auto* sim = app.add_subcommand("simulate", "Generate synthetic data")->require_subcommand(1, 1);
  Exp1Config e1;
  auto* s1 = sim->add_subcommand("exp1", "k sets of T matrices sharing a per-set factor");
  s1->add_option("--k", e1.k, "Number of sets")->capture_default_str()->check(CLI::PositiveNumber);
  s1->add_option("-T,--T", e1.T, "Matrices per set")->capture_default_str()->check(CLI::PositiveNumber);
  s1->add_option("--n", e1.n, "Dimension")->capture_default_str()->check(CLI::PositiveNumber);
  s1->add_option("--seed", e1.seed, "Seed")->capture_default_str();
  Exp2Config e2;
  auto* s2 = sim->add_subcommand("exp2", "Sliding-window trajectory of white noise and a warped copy");
  s2->add_option("--n", e2.n, "Dimension")->capture_default_str();
  s2->add_option("--length", e2.length, "Series length")->capture_default_str();
  s2->add_option("--window", e2.window, "Window size")->capture_default_str();
  s2->add_option("--step", e2.step, "Window step")->capture_default_str();
  s2->add_option("--out-length", e2.out_length, "Resampled trajectory length")->capture_default_str();
  s2->add_option("--roughness", e2.roughness, "Warp roughness")->capture_default_str();
  s2->add_option("--kernel-width", e2.kernel_width, "Gaussian kernel width in window steps")->capture_default_str();
  s2->add_option("--seed", e2.seed, "Seed")->capture_default_str();
  TwoClassConfig tc;
  auto* s3 = sim->add_subcommand("twoclass", "Two labelled classes of random-walk trajectories");
  s3->add_option("--per-class", tc.n_per_class, "Trajectories per class")->capture_default_str();
  s3->add_option("--n", tc.n, "Dimension")->capture_default_str();
  s3->add_option("-T,--T", tc.T, "Trajectory length")->capture_default_str();
  s3->add_option("--separation", tc.separation, "Geodesic distance between class anchors")->capture_default_str();
  s3->add_option("--spread", tc.spread, "Within-class spread")->capture_default_str();
  s3->add_option("--seed", tc.seed, "Seed")->capture_default_str();

  EstimateFlags ef;
  auto* est = app.add_subcommand("estimate", "Sliding-window shrinkage covariance trajectory from a time-series CSV");
  est->add_option("--input", ef.input, "Time-series CSV (rows = samples)")->required();
  est->add_option("--window", ef.window, "Window size in samples")->required()->check(CLI::PositiveNumber);
  est->add_option("--step", ef.step, "Step size in samples")->required()->check(CLI::PositiveNumber);
  est->add_option("--sampling-step", ef.sampling_step, "Seconds per sample")->capture_default_str()->check(CLI::PositiveNumber);
  est->add_option("--smooth", ef.smooth, "Gaussian smoothing width in window steps (0 = none)")->capture_default_str()->check(CLI::NonNegativeNumber);
  est->add_option("--out-length", ef.out_length, "Resample to this many points");
  est->add_option("--name", ef.name, "Output archive name")->capture_default_str();

  std::vector<std::string> red_inputs;
  int red_d = 0;
  SolverFlags red_solver;
  auto* red = app.add_subcommand("reduce", "Fit a Stiefel reduction basis");
  red->add_option("--inputs", red_inputs, "Training trajectory archives or directories")->required();
  red->add_option("--d", red_d, "Reduced dimension (< n)")->required();
  red_solver.add(red, true);

  DistanceFlags df;
  auto* dist = app.add_subcommand("distance", "Pairwise distance matrix");
  df.add(dist, true);

  std::string al_a, al_b;
  std::size_t al_grid = 0;
  double al_w = 0.0;
  auto* aln = app.add_subcommand("align", "Align the second trajectory to the first");
  aln->add_option("--a", al_a, "Reference trajectory archive")->required();
  aln->add_option("--b", al_b, "Trajectory to register onto the reference")->required();
  aln->add_option("--grid", al_grid, "Lattice size (0 = longest input)")->capture_default_str();
  aln->add_option("--w-det", al_w, "Log-det channel weight")->capture_default_str()->check(CLI::NonNegativeNumber);

  ClassifyFlags cf;
  auto* cls = app.add_subcommand("classify", "Stratified cross-validated k-NN");
  cls->add_option("--distances", cf.distances, "Distance matrix CSV");
  cls->add_option("--labels", cf.labels, "Labels CSV (id,label)")->required();
  cls->add_option("--folds", cf.folds, "Folds")->capture_default_str();
  cls->add_option("--k", cf.k, "Neighbours")->capture_default_str();
  cls->add_option("--fold-seed", cf.seed, "Seed for fold assignment")->capture_default_str();
  cf.dist.add(cls, false);

  std::vector<std::string> ld_inputs;
  auto* ld = app.add_subcommand("logdet", "Per-trajectory (1/n) log det curves");
  ld->add_option("--inputs", ld_inputs, "Trajectory archives or directories")->required();

  std::vector<int> bench_sizes{10, 100};
  int bench_T = 20, bench_repeats = 3;
  std::string bench_align = "on";
  std::uint64_t bench_seed = 0;
  auto* bench = app.add_subcommand("bench", "Time one pairwise distance per matrix size");
  bench->add_option("--sizes", bench_sizes, "Matrix sizes")->delimiter(',')->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("-T,--T", bench_T, "Trajectory length")->capture_default_str();
  bench->add_option("--align", bench_align, "on | off")->capture_default_str()->check(CLI::IsMember({"on", "off"}));
  bench->add_option("--repeats", bench_repeats, "Timed repeats (median reported)")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "Seed")->capture_default_str();

  std::vector<std::string> rep_dist;
  std::string rep_labels;
  auto* rep = app.add_subcommand("report", "Block contrast and Frobenius gaps of distance matrices");
  rep->add_option("--distances", rep_dist, "Distance CSVs; the first is the reference")->required();
  rep->add_option("--labels", rep_labels, "Labels CSV");

  std::string rp_manifest;
  auto* rp = app.add_subcommand("replay", "Re-run a manifest and compare artifact checksums");
  rp->add_option("--manifest", rp_manifest, "manifest.json of an earlier run")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rp->parsed()) return cmd_replay(rp_manifest, out_dir, out, err);

    if (out_dir.empty()) {
      const char* scratch = std::getenv("SPDTRAJ_SCRATCH");
      out_dir = scratch && *scratch ? scratch : ".";
    }
    const int nthreads = resolve_threads(threads);
    CLI::App* sub = app.get_subcommands().front();
    std::string command = sub->get_name();
    CLI::App* leaf = sub;
    if (sub == sim) {
      leaf = sim->get_subcommands().front();
      command += " " + leaf->get_name();
    }
    Run r(command, args, out_dir, nthreads);
    r.config() = options_json(leaf);

    if (s1->parsed()) cmd_simulate_exp1(r, e1);
    else if (s2->parsed()) cmd_simulate_exp2(r, e2, out);
    else if (s3->parsed()) cmd_simulate_twoclass(r, tc);
    else if (est->parsed()) cmd_estimate(r, ef);
    else if (red->parsed()) cmd_reduce(r, red_inputs, red_d, red_solver, out);
    else if (dist->parsed()) cmd_distance(r, df, out);
    else if (aln->parsed()) cmd_align(r, al_a, al_b, al_grid, al_w, out);
    else if (cls->parsed()) cmd_classify(r, cf, out);
    else if (ld->parsed()) cmd_logdet(r, ld_inputs);
    else if (bench->parsed()) cmd_bench(r, bench_sizes, bench_T, bench_align, bench_repeats, bench_seed, out);
    else if (rep->parsed()) cmd_report(r, rep_dist, rep_labels);
    r.finish();
    return 0;
  } catch (const ConfigError& e) {
    err << "spdtraj: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "spdtraj: configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "spdtraj: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace spdtraj::cli
