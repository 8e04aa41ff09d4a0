#include "spdtraj/io.hpp"

#include "spdtraj/errors.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace spdtraj::io {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    out.push_back(cell.substr(b));
  }
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

double to_double(const std::string& s, const fs::path& path, std::size_t line) {
  double v = 0.0;
  if (!parse_double(s, v)) {
    throw FormatError(path.string() + ":" + std::to_string(line) + ": expected a number, got '" + s + "'");
  }
  return v;
}

std::vector<std::string> lines_of(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // interior blank lines are kept so reported line numbers match the file
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::string join_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  std::string s;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j) s += ',';
    s += format_double(row(j));
  }
  return s;
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
  void magic(const char (&m)[5]) { bytes(m, 4); }
  void u32(std::uint32_t v) { bytes(&v, 4); }
  void f64(double v) { bytes(&v, 8); }
  void matrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("matrix record must be square");
    magic("SPDM");
    u32(static_cast<std::uint32_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
  }
  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(std::string data, fs::path path) : data_(std::move(data)), path_(std::move(path)) {}
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw FormatError(path_.string() + ": truncated file");
  }
  void magic(const char (&m)[5]) {
    need(4);
    if (std::memcmp(data_.data() + pos_, m, 4) != 0) {
      throw FormatError(path_.string() + ": bad magic, expected '" + std::string(m, 4) + "'");
    }
    pos_ += 4;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, data_.data() + pos_, 4);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    double v;
    std::memcpy(&v, data_.data() + pos_, 8);
    pos_ += 8;
    return v;
  }
  Eigen::MatrixXd matrix() {
    magic("SPDM");
    const std::uint32_t n = u32();
    if (n == 0) throw FormatError(path_.string() + ": zero matrix dimension");
    need(static_cast<std::size_t>(n) * n * 8);
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = f64();
    return m;
  }
  void finish() const {
    if (pos_ != data_.size()) throw FormatError(path_.string() + ": trailing bytes after payload");
  }

 private:
  std::string data_;
  fs::path path_;
  std::size_t pos_ = 0;
};

std::string read_binary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw FormatError("failed writing '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) { return read_binary(path); }

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("write_matrix_csv: matrix must be square");
  std::string s = "n=" + std::to_string(m.rows()) + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += join_row(m.row(i)) + "\n";
  write_text(path, s);
}

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
  const auto lines = lines_of(path);
  if (lines.empty() || lines[0].rfind("n=", 0) != 0) throw FormatError(path.string() + ": missing 'n=<dim>' header");
  const std::string dim_str = lines[0].substr(2);
  long n = 0;
  const auto [ptr, ec] = std::from_chars(dim_str.data(), dim_str.data() + dim_str.size(), n);
  if (ec != std::errc() || ptr != dim_str.data() + dim_str.size() || n <= 0) {
    throw FormatError(path.string() + ": bad dimension header '" + lines[0] + "'");
  }
  if (static_cast<long>(lines.size()) != n + 1) {
    throw FormatError(path.string() + ": expected " + std::to_string(n) + " rows, found " + std::to_string(lines.size() - 1));
  }
  Eigen::MatrixXd m(n, n);
  for (long i = 0; i < n; ++i) {
    const auto cells = split(lines[static_cast<std::size_t>(i + 1)]);
    if (static_cast<long>(cells.size()) != n) {
      throw FormatError(path.string() + ":" + std::to_string(i + 2) + ": expected " + std::to_string(n) + " values");
    }
    for (long j = 0; j < n; ++j) m(i, j) = to_double(cells[static_cast<std::size_t>(j)], path, static_cast<std::size_t>(i + 2));
  }
  return m;
}

void write_matrix_binary(const fs::path& path, const Eigen::MatrixXd& m) {
  Writer w;
  w.matrix(m);
  write_text(path, w.str());
}

Eigen::MatrixXd read_matrix_binary(const fs::path& path) {
  Reader r(read_binary(path), path);
  Eigen::MatrixXd m = r.matrix();
  r.finish();
  return m;
}

void write_trajectory(const fs::path& path, const CovarianceTrajectory& traj) {
  Writer w;
  w.magic("SPDT");
  w.u32(static_cast<std::uint32_t>(traj.dim()));
  w.u32(static_cast<std::uint32_t>(traj.length()));
  for (const Spd& p : traj.matrices()) w.matrix(p.matrix());
  write_text(path, w.str());
}

CovarianceTrajectory read_trajectory(const fs::path& path) {
  Reader r(read_binary(path), path);
  r.magic("SPDT");
  const std::uint32_t dim = r.u32();
  const std::uint32_t len = r.u32();
  if (len == 0) throw FormatError(path.string() + ": empty trajectory");
  std::vector<Spd> mats;
  mats.reserve(len);
  for (std::uint32_t k = 0; k < len; ++k) {
    Eigen::MatrixXd m = r.matrix();
    if (m.rows() != dim) throw FormatError(path.string() + ": matrix " + std::to_string(k) + " has wrong dimension");
    mats.emplace_back(m);
  }
  r.finish();
  return CovarianceTrajectory(std::move(mats));
}

void write_basis(const fs::path& path, const StiefelBasis& b) {
  Writer w;
  w.magic("STFB");
  w.u32(static_cast<std::uint32_t>(b.n()));
  w.u32(static_cast<std::uint32_t>(b.d()));
  for (Eigen::Index j = 0; j < b.d(); ++j)
    for (Eigen::Index i = 0; i < b.n(); ++i) w.f64(b.matrix()(i, j));
  write_text(path, w.str());
}

StiefelBasis read_basis(const fs::path& path) {
  Reader r(read_binary(path), path);
  r.magic("STFB");
  const std::uint32_t n = r.u32();
  const std::uint32_t d = r.u32();
  Eigen::MatrixXd b(n, d);
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index i = 0; i < b.rows(); ++i) b(i, j) = r.f64();
  r.finish();
  return StiefelBasis(std::move(b));
}

MultivariateTimeSeries read_timeseries_csv(const fs::path& path, double sampling_step) {
  auto lines = lines_of(path);
  if (lines.empty()) throw FormatError(path.string() + ": empty time-series file");
  std::size_t first = 0;
  {
    const auto cells = split(lines[0]);
    double v;
    bool numeric = true;
    for (const auto& c : cells) numeric = numeric && parse_double(c, v);
    if (!numeric) first = 1;
  }
  if (lines.size() <= first) throw FormatError(path.string() + ": no samples");
  const std::size_t channels = split(lines[first]).size();
  Eigen::MatrixXd values(static_cast<Eigen::Index>(lines.size() - first), static_cast<Eigen::Index>(channels));
  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    if (cells.size() != channels) {
      throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": expected " + std::to_string(channels) +
                        " columns, found " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < channels; ++j)
      values(static_cast<Eigen::Index>(i - first), static_cast<Eigen::Index>(j)) = to_double(cells[j], path, i + 1);
  }
  return MultivariateTimeSeries(std::move(values), sampling_step);
}

void write_timeseries_csv(const fs::path& path, const MultivariateTimeSeries& ts) {
  std::string s;
  for (Eigen::Index j = 0; j < ts.n_channels(); ++j) s += (j ? ",ch" : "ch") + std::to_string(j);
  s += "\n";
  for (Eigen::Index i = 0; i < ts.n_times(); ++i) s += join_row(ts.values().row(i)) + "\n";
  write_text(path, s);
}

void write_warp_csv(const fs::path& path, const WarpingFunction& w) {
  std::string s = "t,gamma\n";
  for (std::size_t k = 0; k < w.knots().size(); ++k) s += format_double(w.knots()[k]) + "," + format_double(w.values()[k]) + "\n";
  write_text(path, s);
}

WarpingFunction read_warp_csv(const fs::path& path) {
  const auto lines = lines_of(path);
  std::vector<double> t, g;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i == 0 && lines[0].rfind("t,", 0) == 0) continue;
    const auto cells = split(lines[i]);
    if (cells.size() != 2) throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": expected two columns");
    t.push_back(to_double(cells[0], path, i + 1));
    g.push_back(to_double(cells[1], path, i + 1));
  }
  return WarpingFunction(std::move(t), std::move(g));
}

void write_distance_csv(const fs::path& path, const DistanceMatrix& d) {
  std::string s;
  for (std::size_t i = 0; i < d.ids.size(); ++i) s += (i ? "," : "") + d.ids[i];
  s += "\n";
  for (Eigen::Index i = 0; i < d.values.rows(); ++i) s += join_row(d.values.row(i)) + "\n";
  write_text(path, s);
}

DistanceMatrix read_distance_csv(const fs::path& path, std::string metric) {
  const auto lines = lines_of(path);
  if (lines.empty()) throw FormatError(path.string() + ": empty distance file");
  DistanceMatrix d;
  d.metric = std::move(metric);
  d.ids = split(lines[0]);
  const std::size_t n = d.ids.size();
  if (lines.size() != n + 1) {
    throw FormatError(path.string() + ": header lists " + std::to_string(n) + " ids but there are " +
                      std::to_string(lines.size() - 1) + " rows");
  }
  d.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto cells = split(lines[i + 1]);
    if (cells.size() != n) throw FormatError(path.string() + ":" + std::to_string(i + 2) + ": expected " + std::to_string(n) + " values");
    for (std::size_t j = 0; j < n; ++j)
      d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(cells[j], path, i + 2);
  }
  d.max_asymmetry = (d.values - d.values.transpose()).cwiseAbs().maxCoeff();
  return d;
}

void write_labels_csv(const fs::path& path, const std::vector<std::string>& ids, const std::vector<int>& labels) {
  if (ids.size() != labels.size()) throw std::invalid_argument("write_labels_csv: id and label counts differ");
  std::string s = "id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) s += ids[i] + "," + std::to_string(labels[i]) + "\n";
  write_text(path, s);
}

std::map<std::string, int> read_labels_csv(const fs::path& path) {
  const auto lines = lines_of(path);
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    if (i == 0 && cells.size() == 2 && cells[0] == "id") continue;
    if (cells.size() != 2) throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": expected 'id,label'");
    int v = 0;
    const auto [ptr, ec] = std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), v);
    if (ec != std::errc() || ptr != cells[1].data() + cells[1].size()) {
      throw FormatError(path.string() + ":" + std::to_string(i + 1) + ": label must be an integer, got '" + cells[1] + "'");
    }
    if (!out.emplace(cells[0], v).second) throw FormatError(path.string() + ": duplicate id '" + cells[0] + "'");
  }
  return out;
}

void write_alignment_report_csv(const fs::path& path, const DistanceMatrix& d, const std::vector<AlignmentRecord>& records) {
  std::string s = "id1,id2,d_c,d_q,relative_reduction\n";
  for (const AlignmentRecord& r : records) {
    const double rel = r.dc > 0.0 ? (r.dc - r.dq) / r.dc : 0.0;
    s += d.ids[r.i] + "," + d.ids[r.j] + "," + format_double(r.dc) + "," + format_double(r.dq) + "," + format_double(rel) + "\n";
  }
  write_text(path, s);
}

void write_confusion_csv(const fs::path& path, const CrossValidation& cv) {
  std::string s = "true\\predicted";
  for (int c : cv.classes) s += "," + std::to_string(c);
  s += ",accuracy\n";
  for (std::size_t i = 0; i < cv.classes.size(); ++i) {
    s += std::to_string(cv.classes[i]);
    for (Eigen::Index j = 0; j < cv.confusion.cols(); ++j) s += "," + std::to_string(cv.confusion(static_cast<Eigen::Index>(i), j));
    s += "," + format_double(cv.class_accuracy[i]) + "\n";
  }
  write_text(path, s);
}

void write_histogram_csv(const fs::path& path, const std::vector<double>& values) {
  std::string s = "relative_reduction\n";
  for (double v : values) s += format_double(v) + "\n";
  write_text(path, s);
}

}  // namespace spdtraj::io
