#include "support.hpp"

#include "spdtraj/errors.hpp"
#include "spdtraj/io.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

using namespace spdtraj;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("spdtraj_io_" + std::to_string(Catch::getSeed()) + "_" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

void write_raw(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("format_double round-trips exactly", "[io]") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  for (int i = 0; i < 1000; ++i) {
    const double v = n01(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1.0) == "1");
}

TEST_CASE("matrix files round-trip", "[io]") {
  TempDir dir;
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd m = random_spd(rng, 5).matrix();
  io::write_matrix_csv(dir / "m.csv", m);
  CHECK((io::read_matrix_csv(dir / "m.csv").array() == m.array()).all());
  io::write_matrix_binary(dir / "m.bin", m);
  CHECK((io::read_matrix_binary(dir / "m.bin").array() == m.array()).all());
  CHECK(fs::file_size(dir / "m.bin") == 4 + 4 + 25 * 8);
  CHECK_THROWS_AS(io::write_matrix_csv(dir / "r.csv", Eigen::MatrixXd::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("trajectory, basis and warp archives round-trip", "[io]") {
  TempDir dir;
  std::mt19937_64 rng(3);
  const CovarianceTrajectory t = SmoothCurve::random(rng, 4).sample(7);
  io::write_trajectory(dir / "t.spdt", t);
  const CovarianceTrajectory back = io::read_trajectory(dir / "t.spdt");
  REQUIRE(back.length() == 7);
  for (std::size_t k = 0; k < 7; ++k) CHECK((back[k].matrix().array() == t[k].matrix().array()).all());

  const StiefelBasis b(random_stiefel(rng, 6, 2));
  io::write_basis(dir / "b.stfb", b);
  CHECK((io::read_basis(dir / "b.stfb").matrix().array() == b.matrix().array()).all());

  const WarpingFunction w = random_warp(20, 0.3, 5);
  io::write_warp_csv(dir / "w.csv", w);
  const WarpingFunction wb = io::read_warp_csv(dir / "w.csv");
  CHECK(wb.knots() == w.knots());
  CHECK(wb.values() == w.values());
}

TEST_CASE("time series, distance and labels files round-trip", "[io]") {
  TempDir dir;
  std::mt19937_64 rng(4);
  const MultivariateTimeSeries ts(gaussian(rng, 30, 3), 0.5);
  io::write_timeseries_csv(dir / "ts.csv", ts);
  const MultivariateTimeSeries tb = io::read_timeseries_csv(dir / "ts.csv", 0.5);
  CHECK((tb.values().array() == ts.values().array()).all());
  CHECK(tb.sampling_step() == 0.5);

  DistanceMatrix d;
  d.ids = {"a", "b", "c"};
  d.values = Eigen::MatrixXd::Zero(3, 3);
  d.values(0, 1) = d.values(1, 0) = 1.0 / 3.0;
  d.values(0, 2) = d.values(2, 0) = 2.5e-17;
  io::write_distance_csv(dir / "d.csv", d);
  const DistanceMatrix db = io::read_distance_csv(dir / "d.csv", "dq");
  CHECK(db.ids == d.ids);
  CHECK(db.metric == "dq");
  CHECK((db.values.array() == d.values.array()).all());
  CHECK(db.max_asymmetry == 0.0);

  io::write_labels_csv(dir / "l.csv", {"x", "y"}, {3, -1});
  const auto labels = io::read_labels_csv(dir / "l.csv");
  CHECK(labels.at("x") == 3);
  CHECK(labels.at("y") == -1);
  CHECK_THROWS_AS(io::write_labels_csv(dir / "l2.csv", {"x"}, {1, 2}), std::invalid_argument);
}

TEST_CASE("writes are byte-stable", "[io]") {
  TempDir dir;
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd m = random_spd(rng, 4).matrix();
  io::write_matrix_csv(dir / "a.csv", m);
  io::write_matrix_csv(dir / "b.csv", io::read_matrix_csv(dir / "a.csv"));
  CHECK(io::read_text(dir / "a.csv") == io::read_text(dir / "b.csv"));
}

TEST_CASE("headerless time series are read as data", "[io]") {
  TempDir dir;
  write_raw(dir / "ts.csv", "1,2\n3,4\n\n");
  const MultivariateTimeSeries ts = io::read_timeseries_csv(dir / "ts.csv");
  CHECK(ts.n_times() == 2);
  CHECK(ts.values()(1, 0) == 3.0);
}

TEST_CASE("text format errors name the file and line", "[io]") {
  TempDir dir;
  const fs::path ts = dir / "ts.csv";
  write_raw(ts, "a,b\n1,2\n3,x\n");
  CHECK_THAT(error_of([&] { io::read_timeseries_csv(ts); }), Catch::Matchers::ContainsSubstring(ts.string() + ":3"));
  write_raw(ts, "a,b\n1,2\n\n3\n");
  CHECK_THAT(error_of([&] { io::read_timeseries_csv(ts); }), Catch::Matchers::ContainsSubstring(ts.string() + ":3"));

  const fs::path m = dir / "m.csv";
  write_raw(m, "n=2\n1,0\n0\n");
  CHECK_THAT(error_of([&] { io::read_matrix_csv(m); }), Catch::Matchers::ContainsSubstring(m.string() + ":3"));
  write_raw(m, "dim=2\n1,0\n0,1\n");
  CHECK_THAT(error_of([&] { io::read_matrix_csv(m); }), Catch::Matchers::ContainsSubstring("n=<dim>"));
  write_raw(m, "n=2\n1,0\n");
  CHECK_THAT(error_of([&] { io::read_matrix_csv(m); }), Catch::Matchers::ContainsSubstring("expected 2 rows"));

  const fs::path d = dir / "d.csv";
  write_raw(d, "a,b\n0,1\n1,zz\n");
  CHECK_THAT(error_of([&] { io::read_distance_csv(d); }), Catch::Matchers::ContainsSubstring(d.string() + ":3"));

  const fs::path w = dir / "w.csv";
  write_raw(w, "t,gamma\n0,0\n0.5\n1,1\n");
  CHECK_THAT(error_of([&] { io::read_warp_csv(w); }), Catch::Matchers::ContainsSubstring(w.string() + ":3"));

  const fs::path l = dir / "l.csv";
  write_raw(l, "id,label\na,1\nb,one\n");
  CHECK_THAT(error_of([&] { io::read_labels_csv(l); }), Catch::Matchers::ContainsSubstring(l.string() + ":3"));

  CHECK_THAT(error_of([&] { io::read_matrix_csv(dir / "missing.csv"); }), Catch::Matchers::ContainsSubstring("cannot open"));
}

TEST_CASE("duplicate label ids are rejected", "[io]") {
  TempDir dir;
  write_raw(dir / "l.csv", "id,label\na,1\nb,0\na,0\n");
  CHECK_THAT(error_of([&] { io::read_labels_csv(dir / "l.csv"); }), Catch::Matchers::ContainsSubstring("duplicate id 'a'"));
}

TEST_CASE("binary format errors", "[io]") {
  TempDir dir;
  std::mt19937_64 rng(6);
  io::write_matrix_binary(dir / "m.bin", random_spd(rng, 3).matrix());
  const std::string good = io::read_text(dir / "m.bin");

  write_raw(dir / "bad.bin", "XXXX" + good.substr(4));
  CHECK_THAT(error_of([&] { io::read_matrix_binary(dir / "bad.bin"); }), Catch::Matchers::ContainsSubstring("bad magic"));
  write_raw(dir / "bad.bin", good.substr(0, good.size() - 3));
  CHECK_THAT(error_of([&] { io::read_matrix_binary(dir / "bad.bin"); }), Catch::Matchers::ContainsSubstring("truncated"));
  write_raw(dir / "bad.bin", good + "z");
  CHECK_THAT(error_of([&] { io::read_matrix_binary(dir / "bad.bin"); }), Catch::Matchers::ContainsSubstring("trailing"));
  // a matrix archive is not a trajectory archive
  CHECK_THAT(error_of([&] { io::read_trajectory(dir / "m.bin"); }), Catch::Matchers::ContainsSubstring("bad magic"));
}
