#include "spdtraj/analysis.hpp"

#include "spdtraj/errors.hpp"
#include "spdtraj/parallel.hpp"
#include "spdtraj/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace spdtraj {

std::string to_string(TrajectoryDistance m) {
  switch (m) {
    case TrajectoryDistance::Dc: return "dc";
    case TrajectoryDistance::Dq: return "dq";
    case TrajectoryDistance::LogEuclidean: return "logeuclidean";
  }
  return "?";
}

std::string to_string(MatrixDistance m) {
  switch (m) {
    case MatrixDistance::UnitDet: return "spd";
    case MatrixDistance::Full: return "spd-full";
    case MatrixDistance::LogEuclidean: return "logeuclidean";
  }
  return "?";
}

namespace {

std::vector<std::string> default_ids(std::vector<std::string> ids, std::size_t n) {
  if (ids.empty()) {
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  }
  if (ids.size() != n) throw std::invalid_argument("distance matrix: id count does not match item count");
  return ids;
}

std::vector<std::pair<std::size_t, std::size_t>> upper_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> p;
  p.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) p.emplace_back(i, j);
  return p;
}

}  // namespace

double log_euclidean_trajectory_dist(const CovarianceTrajectory& a, const CovarianceTrajectory& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("log-Euclidean trajectory distance: dimension mismatch");
  const std::size_t m = std::max(a.length(), b.length());
  if (m < 2) return log_euclidean_dist(a[0], b[0]);
  const CovarianceTrajectory ra = a.resampled(m);
  const CovarianceTrajectory rb = b.resampled(m);
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double d = log_euclidean_dist(ra[k], rb[k]);
    acc += (k == 0 || k + 1 == m) ? 0.5 * d * d : d * d;
  }
  return std::sqrt(acc / static_cast<double>(m - 1));
}

DistanceMatrix distance_matrix(const std::vector<CovarianceTrajectory>& items, std::vector<std::string> ids,
                               const DistanceOptions& opts, std::vector<AlignmentRecord>* records) {
  const std::size_t n = items.size();
  DistanceMatrix out;
  out.metric = to_string(opts.metric);
  out.ids = default_ids(std::move(ids), n);
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& t : items) {
    if (t.dim() != items.front().dim()) {
      throw DimensionMismatch("distance matrix: mixed dimensions (" + std::to_string(items.front().dim()) + " and " +
                              std::to_string(t.dim()) + "); supply a reduction basis");
    }
  }
  const auto pairs = upper_pairs(n);
  std::vector<AlignmentRecord> rec(pairs.size());
  parallel_for(pairs.size(), opts.threads, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    AlignmentRecord& r = rec[p];
    r.i = i;
    r.j = j;
    switch (opts.metric) {
      case TrajectoryDistance::Dc: {
        const double ab = dist_dc(items[i], items[j], opts.trajectory);
        const double ba = dist_dc(items[j], items[i], opts.trajectory);
        r.dc = r.dq = std::max(ab, ba);
        r.asymmetry = std::abs(ab - ba);
        break;
      }
      case TrajectoryDistance::Dq: {
        const Alignment ab = align_dq(items[i], items[j], opts.trajectory);
        const Alignment ba = align_dq(items[j], items[i], opts.trajectory);
        r.dc = std::max(ab.dc, ba.dc);
        r.dq = std::max(ab.dq, ba.dq);
        r.asymmetry = std::abs(ab.dq - ba.dq);
        break;
      }
      case TrajectoryDistance::LogEuclidean:
        r.dc = r.dq = log_euclidean_trajectory_dist(items[i], items[j]);
        break;
    }
  });
  for (const AlignmentRecord& r : rec) {
    const auto i = static_cast<Eigen::Index>(r.i);
    const auto j = static_cast<Eigen::Index>(r.j);
    out.values(i, j) = out.values(j, i) = r.dq;
    out.max_asymmetry = std::max(out.max_asymmetry, r.asymmetry);
  }
  if (records && opts.metric == TrajectoryDistance::Dq) *records = std::move(rec);
  return out;
}

DistanceMatrix matrix_distance_matrix(const std::vector<Spd>& items, std::vector<std::string> ids,
                                      MatrixDistance metric, double w_det, int threads) {
  const std::size_t n = items.size();
  DistanceMatrix out;
  out.metric = to_string(metric);
  out.ids = default_ids(std::move(ids), n);
  out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& p : items) {
    if (p.dim() != items.front().dim()) throw DimensionMismatch("distance matrix: mixed matrix dimensions");
  }
  std::vector<UnitDetSpd> units;
  if (metric == MatrixDistance::UnitDet) {
    units.reserve(n);
    for (const auto& p : items) units.push_back(normalize_det(p).unit);
  }
  const auto pairs = upper_pairs(n);
  std::vector<double> d(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    switch (metric) {
      case MatrixDistance::UnitDet: d[p] = dist_unitdet(units[i], units[j]); break;
      case MatrixDistance::Full:
        d[p] = w_det < 0.0 ? dist_full(items[i], items[j]) : dist_full(items[i], items[j], w_det);
        break;
      case MatrixDistance::LogEuclidean: d[p] = log_euclidean_dist(items[i], items[j]); break;
    }
  });
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto i = static_cast<Eigen::Index>(pairs[p].first);
    const auto j = static_cast<Eigen::Index>(pairs[p].second);
    out.values(i, j) = out.values(j, i) = d[p];
  }
  return out;
}

std::vector<int> knn_classify(const DistanceMatrix& d, const std::vector<int>& labels,
                              const std::vector<std::size_t>& train, const std::vector<std::size_t>& test, int k) {
  if (train.empty()) throw std::invalid_argument("knn_classify: empty training set");
  if (labels.size() != d.size()) throw std::invalid_argument("knn_classify: label count does not match matrix size");
  if (k < 1 || static_cast<std::size_t>(k) > train.size()) {
    throw std::invalid_argument("knn_classify: k=" + std::to_string(k) + " must be in [1, " +
                                std::to_string(train.size()) + "]");
  }
  std::vector<int> out;
  out.reserve(test.size());
  std::vector<std::size_t> order(train.size());
  for (std::size_t t : test) {
    if (t >= d.size()) throw std::out_of_range("knn_classify: test index out of range");
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto dist = [&](std::size_t r) { return d.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(train[r])); };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](std::size_t a, std::size_t b) {
      const double da = dist(a), db = dist(b);
      return da < db || (da == db && train[a] < train[b]);
    });
    std::map<int, std::pair<int, double>> votes;  // class -> (count, distance sum)
    for (int r = 0; r < k; ++r) {
      auto& v = votes[labels[train[order[static_cast<std::size_t>(r)]]]];
      ++v.first;
      v.second += dist(order[static_cast<std::size_t>(r)]);
    }
    int best = votes.begin()->first;
    int best_count = -1;
    double best_mean = 0.0;
    for (const auto& [cls, v] : votes) {  // ascending class id, so the lowest id wins exact ties
      const double mean = v.second / v.first;
      if (v.first > best_count || (v.first == best_count && mean < best_mean)) {
        best = cls;
        best_count = v.first;
        best_mean = mean;
      }
    }
    out.push_back(best);
  }
  return out;
}

CrossValidation cross_validate(const DistanceMatrix& d, const std::vector<int>& labels, int folds, int k,
                               std::uint64_t seed) {
  const std::size_t n = d.size();
  if (labels.size() != n) throw std::invalid_argument("cross_validate: label count does not match matrix size");
  if (folds < 2) throw std::invalid_argument("cross_validate: folds must be at least 2");
  if (static_cast<std::size_t>(folds) > n) throw std::invalid_argument("cross_validate: more folds than items");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) members[labels[i]].push_back(i);

  CrossValidation cv;
  cv.fold.assign(n, 0);
  const bool loo = static_cast<std::size_t>(folds) == n;
  for (auto& [cls, idx] : members) {
    cv.classes.push_back(cls);
    if (loo) {
      for (std::size_t i : idx) cv.fold[i] = static_cast<int>(i);
      continue;
    }
    if (idx.size() < static_cast<std::size_t>(folds)) {
      throw std::invalid_argument("cross_validate: class " + std::to_string(cls) + " has " +
                                  std::to_string(idx.size()) + " members, fewer than " + std::to_string(folds) +
                                  " folds");
    }
    RandomStream rng = RandomStream(seed).derive("cv-folds", static_cast<std::uint64_t>(static_cast<std::int64_t>(cls)));
    for (std::size_t a = idx.size(); a > 1; --a) std::swap(idx[a - 1], idx[rng.below(a)]);
    for (std::size_t p = 0; p < idx.size(); ++p) cv.fold[idx[p]] = static_cast<int>(p % static_cast<std::size_t>(folds));
  }

  cv.predictions.assign(n, 0);
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (cv.fold[i] == f ? test : train).push_back(i);
    if (test.empty()) continue;
    const std::vector<int> pred = knn_classify(d, labels, train, test, k);
    for (std::size_t t = 0; t < test.size(); ++t) cv.predictions[test[t]] = pred[t];
  }

  const auto nc = static_cast<Eigen::Index>(cv.classes.size());
  auto class_index = [&](int c) {
    return static_cast<Eigen::Index>(std::lower_bound(cv.classes.begin(), cv.classes.end(), c) - cv.classes.begin());
  };
  cv.confusion = Eigen::MatrixXi::Zero(nc, nc);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cv.confusion(class_index(labels[i]), class_index(cv.predictions[i])) += 1;
    correct += labels[i] == cv.predictions[i];
  }
  for (Eigen::Index c = 0; c < nc; ++c) {
    const int total = cv.confusion.row(c).sum();
    cv.class_accuracy.push_back(total ? static_cast<double>(cv.confusion(c, c)) / total : 0.0);
  }
  cv.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return cv;
}

double frobenius_gap(const DistanceMatrix& d, const DistanceMatrix& d_reduced) {
  if (d.ids != d_reduced.ids) throw std::invalid_argument("frobenius_gap: id lists differ");
  return (d.values - d_reduced.values).norm();
}

BlockContrast block_contrast(const DistanceMatrix& d, const std::vector<int>& labels) {
  if (labels.size() != d.size()) throw std::invalid_argument("block_contrast: label count does not match matrix size");
  double within = 0.0, between = 0.0;
  std::size_t nw = 0, nb = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (i == j) continue;
      const double v = d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (labels[i] == labels[j]) {
        within += v;
        ++nw;
      } else {
        between += v;
        ++nb;
      }
    }
  }
  if (nb == 0) throw std::invalid_argument("block_contrast: need at least two classes");
  BlockContrast b;
  b.within = nw ? within / static_cast<double>(nw) : 0.0;
  b.between = between / static_cast<double>(nb);
  b.ratio = b.between > 0.0 ? b.within / b.between : 1.0;
  return b;
}

ReductionHistogram alignment_reduction_histogram(const std::vector<AlignmentRecord>& pairs) {
  ReductionHistogram h;
  for (const AlignmentRecord& r : pairs) {
    if (!(r.dc > 0.0)) {
      ++h.skipped;
      continue;
    }
    h.values.push_back((r.dc - r.dq) / r.dc);
  }
  return h;
}

}  // namespace spdtraj
