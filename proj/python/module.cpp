#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spdtraj/analysis.hpp"
#include "spdtraj/errors.hpp"
#include "spdtraj/estimation.hpp"
#include "spdtraj/io.hpp"
#include "spdtraj/reduction.hpp"
#include "spdtraj/simgen.hpp"
#include "spdtraj/trajectory_metric.hpp"

namespace py = pybind11;
using namespace spdtraj;

namespace {

using Array3 = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (T, n, n) array <-> trajectory
CovarianceTrajectory to_trajectory(const Array3& a) {
  if (a.ndim() != 3 || a.shape(1) != a.shape(2)) throw std::invalid_argument("expected an array of shape (T, n, n)");
  const auto t = a.shape(0), n = a.shape(1);
  std::vector<Spd> mats;
  mats.reserve(static_cast<std::size_t>(t));
  const double* p = a.data();
  for (py::ssize_t k = 0; k < t; ++k, p += n * n) {
    mats.emplace_back(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(p, n, n));
  }
  return CovarianceTrajectory(std::move(mats));
}

Array3 from_trajectory(const CovarianceTrajectory& traj) {
  const auto n = static_cast<py::ssize_t>(traj.dim());
  Array3 out({static_cast<py::ssize_t>(traj.length()), n, n});
  double* p = out.mutable_data();
  for (const Spd& s : traj.matrices()) {
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(p, n, n) = s.matrix();
    p += n * n;
  }
  return out;
}

UnitDetSpd unit(const Eigen::MatrixXd& m) { return UnitDetSpd(m); }

std::vector<CovarianceTrajectory> to_trajectories(const std::vector<Array3>& arrays) {
  std::vector<CovarianceTrajectory> out;
  for (const auto& a : arrays) out.push_back(to_trajectory(a));
  return out;
}

py::dict model_dict(const ReductionModel& m) {
  py::dict d;
  d["basis"] = m.basis.matrix();
  d["objective_trace"] = m.objective_trace;
  d["iterations"] = m.iterations;
  d["converged"] = m.converged;
  d["gradient_norm"] = m.gradient_norm;
  d["pair_count"] = m.pair_count;
  d["stop_reason"] = m.stop_reason;
  return d;
}

TrajectoryDistance trajectory_metric(const std::string& s) {
  if (s == "dc") return TrajectoryDistance::Dc;
  if (s == "dq") return TrajectoryDistance::Dq;
  if (s == "logeuclidean") return TrajectoryDistance::LogEuclidean;
  throw std::invalid_argument("metric must be dc, dq or logeuclidean");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "SPD-matrix trajectories: geometry, rate-invariant distances, Stiefel reduction";

  py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);

  // geometry
  m.def("sym_sqrt", [](const Eigen::MatrixXd& p) { return sym_sqrt(Spd(p)).matrix(); });
  m.def("sym_log", [](const Eigen::MatrixXd& p) { return sym_log(Spd(p)).matrix(); });
  m.def("sym_exp", [](const Eigen::MatrixXd& a) { return sym_exp(SymMatrix(a)).matrix(); });
  m.def("normalize_det", [](const Eigen::MatrixXd& p) {
    const DetSplit s = normalize_det(Spd(p));
    return py::make_tuple(s.unit.matrix(), s.channel.value);
  });
  m.def("dist_unitdet", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return dist_unitdet(unit(a), unit(b)); });
  m.def("dist_full",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, std::optional<double> w) { return dist_full(Spd(a), Spd(b), w); },
        py::arg("p1"), py::arg("p2"), py::arg("w_det") = py::none());
  m.def("log_euclidean_dist", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return log_euclidean_dist(Spd(a), Spd(b)); });
  m.def("log_map", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return log_map(unit(a), unit(b)).coords().matrix(); },
        "Tangent coordinates (identity frame) of log_P1(P2)");
  m.def("exp_map", [](const Eigen::MatrixXd& base, const Eigen::MatrixXd& v) {
    return exp_map(TangentVector(unit(base), SymMatrix(v))).matrix();
  });
  m.def("geodesic", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double t) { return geodesic(unit(a), unit(b), t).matrix(); });
  m.def("parallel_transport", [](const Eigen::MatrixXd& v, const Eigen::MatrixXd& from, const Eigen::MatrixXd& to) {
    const UnitDetSpd f = unit(from);
    return parallel_transport(TangentVector(f, SymMatrix(v)), unit(to)).coords().matrix();
  });

  // estimation
  m.def("ledoit_wolf", [](const Eigen::MatrixXd& x) {
    const ShrinkageEstimate e = ledoit_wolf(x);
    py::dict d;
    d["rho1"] = e.diagnostics.rho1;
    d["rho2"] = e.diagnostics.rho2;
    d["intensity"] = e.diagnostics.intensity;
    d["degenerate"] = e.diagnostics.degenerate;
    return py::make_tuple(e.covariance.matrix(), d);
  });
  m.def("estimate_trajectory", [](const Eigen::MatrixXd& values, int window, int step) {
    return from_trajectory(estimate_trajectory(MultivariateTimeSeries(values), WindowConfig{window, step}));
  }, py::arg("values"), py::arg("window"), py::arg("step"));
  m.def("smooth_resample", [](const Array3& t, double width, std::size_t len) {
    return from_trajectory(smooth_resample(to_trajectory(t), width, len));
  });
  m.def("logdet_curve", [](const Array3& t) { return logdet_curve(to_trajectory(t)); });

  // trajectory metric
  m.def("dist_dc", [](const Array3& a, const Array3& b, double w_det) {
    return dist_dc(to_trajectory(a), to_trajectory(b), {w_det, 0});
  }, py::arg("a"), py::arg("b"), py::arg("w_det") = 0.0);
  m.def("align_dq", [](const Array3& a, const Array3& b, std::size_t grid, double w_det) {
    const Alignment al = align_dq(to_trajectory(a), to_trajectory(b), {w_det, grid});
    py::dict d;
    d["dq"] = al.dq;
    d["dc"] = al.dc;
    d["knots"] = al.warp.knots();
    d["values"] = al.warp.values();
    return d;
  }, py::arg("a"), py::arg("b"), py::arg("grid") = 0, py::arg("w_det") = 0.0,
     "Registers b onto a: b(warp(t)) ~ a(t).");
  m.def("random_warp", [](std::size_t t, double roughness, std::uint64_t seed) {
    const WarpingFunction w = random_warp(t, roughness, seed);
    return py::make_tuple(w.knots(), w.values());
  });
  m.def("apply_warp", [](const Array3& traj, std::vector<double> knots, std::vector<double> values) {
    return from_trajectory(apply_warp(to_trajectory(traj), WarpingFunction(std::move(knots), std::move(values))));
  });

  // reduction
  m.def("fit", [](const std::vector<Eigen::MatrixXd>& training, int d, int max_iters, double tolerance, int restarts,
                  std::uint64_t seed, const std::string& init) {
    std::vector<UnitDetSpd> tr;
    for (const auto& p : training) tr.push_back(normalize_det(Spd(p)).unit);
    FitOptions o;
    o.max_iters = max_iters;
    o.tolerance = tolerance;
    o.restarts = restarts;
    o.seed = seed;
    o.init = init == "random" ? FitInit::Random : FitInit::LogPca;
    return model_dict(fit(tr, d, o));
  }, py::arg("training"), py::arg("d"), py::arg("max_iters") = 500, py::arg("tolerance") = 1e-6,
     py::arg("restarts") = 0, py::arg("seed") = 0, py::arg("init") = "logpca");
  m.def("project", [](const Eigen::MatrixXd& p, const Eigen::MatrixXd& b) {
    const DetSplit s = project(normalize_det(Spd(p)).unit, StiefelBasis(b));
    return py::make_tuple(s.unit.matrix(), s.channel.value);
  });
  m.def("pair_matrix", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return pair_matrix(unit(a), unit(b)).matrix(); });
  m.def("lemma1_residual", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& basis) {
    const Lemma1Residual r = lemma1_residual(unit(a), unit(b), StiefelBasis(basis));
    return py::make_tuple(r.via_pseudoinverse, r.via_projection);
  });
  m.def("reduce_trajectory", [](const Array3& t, const Eigen::MatrixXd& b) {
    return from_trajectory(reduce_trajectory(to_trajectory(t), StiefelBasis(b)));
  });
  m.def("principal_angles", &principal_angles);

  // analysis
  m.def("distance_matrix", [](const std::vector<Array3>& items, const std::string& metric, std::size_t grid, double w_det,
                              int threads) {
    DistanceOptions o;
    o.metric = trajectory_metric(metric);
    o.trajectory = {w_det, grid};
    o.threads = threads;
    return distance_matrix(to_trajectories(items), {}, o).values;
  }, py::arg("items"), py::arg("metric") = "dq", py::arg("grid") = 0, py::arg("w_det") = 0.0, py::arg("threads") = 1);
  m.def("cross_validate", [](const Eigen::MatrixXd& d, const std::vector<int>& labels, int folds, int k, std::uint64_t seed) {
    DistanceMatrix dm;
    dm.values = d;
    for (Eigen::Index i = 0; i < d.rows(); ++i) dm.ids.push_back(std::to_string(i));
    const CrossValidation cv = cross_validate(dm, labels, folds, k, seed);
    py::dict r;
    r["accuracy"] = cv.accuracy;
    r["classes"] = cv.classes;
    r["class_accuracy"] = cv.class_accuracy;
    r["confusion"] = Eigen::MatrixXi(cv.confusion);
    r["predictions"] = cv.predictions;
    return r;
  }, py::arg("distances"), py::arg("labels"), py::arg("folds") = 5, py::arg("k") = 1, py::arg("seed") = 0);

  // simulation
  m.def("gen_exp1", [](int k, int t, int n, std::uint64_t seed) {
    const Exp1Data data = gen_exp1({k, t, n, seed});
    std::vector<Eigen::MatrixXd> mats;
    for (const Spd& p : data.matrices()) mats.push_back(p.matrix());
    return py::make_tuple(mats, data.labels());
  }, py::arg("k") = 10, py::arg("T") = 20, py::arg("n") = 100, py::arg("seed") = 0);
  m.def("gen_exp2", [](int n, double roughness, std::uint64_t seed) {
    Exp2Config c;
    c.n = n;
    c.roughness = roughness;
    c.seed = seed;
    const Exp2Data e = gen_exp2(c);
    py::dict d;
    d["original"] = from_trajectory(e.original);
    d["warped"] = from_trajectory(e.warped);
    d["gamma_knots"] = e.gamma.knots();
    d["gamma_values"] = e.gamma.values();
    d["window_count"] = e.window_count;
    return d;
  }, py::arg("n") = 100, py::arg("roughness") = 0.1, py::arg("seed") = 0);
  m.def("gen_two_class", [](int per_class, int n, int t, double separation, double spread, std::uint64_t seed) {
    const LabeledCollection c = gen_two_class({per_class, n, t, separation, spread, seed});
    std::vector<Array3> trajs;
    for (const auto& tr : c.trajectories) trajs.push_back(from_trajectory(tr));
    return py::make_tuple(trajs, c.labels);
  }, py::arg("n_per_class") = 40, py::arg("n") = 4, py::arg("T") = 10, py::arg("separation") = 1.0,
     py::arg("spread") = 0.1, py::arg("seed") = 0);

  // files
  m.def("read_trajectory", [](const std::string& p) { return from_trajectory(io::read_trajectory(p)); });
  m.def("write_trajectory", [](const std::string& p, const Array3& t) { io::write_trajectory(p, to_trajectory(t)); });
}
