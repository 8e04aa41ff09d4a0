#pragma once

// File formats. Binary formats are little-endian; text formats write doubles
// in shortest round-trip form so files are byte-stable across runs.

#include "spdtraj/analysis.hpp"
#include "spdtraj/estimation.hpp"
#include "spdtraj/reduction.hpp"
#include "spdtraj/trajectory.hpp"
#include "spdtraj/warp.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace spdtraj::io {

std::string format_double(double v);

// Matrix CSV: header "n=<dim>", then n rows of n values.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

// Binary matrix: "SPDM", u32 dim, dim*dim f64 row-major.
void write_matrix_binary(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_binary(const std::filesystem::path& path);

// Trajectory archive: "SPDT", u32 dim, u32 length, then `length` binary matrix records.
void write_trajectory(const std::filesystem::path& path, const CovarianceTrajectory& traj);
CovarianceTrajectory read_trajectory(const std::filesystem::path& path);

// Basis archive: "STFB", u32 n, u32 d, n*d f64 column-major.
void write_basis(const std::filesystem::path& path, const StiefelBasis& b);
StiefelBasis read_basis(const std::filesystem::path& path);

/// One row per sample, one column per channel; a non-numeric first row is a header.
MultivariateTimeSeries read_timeseries_csv(const std::filesystem::path& path, double sampling_step = 1.0);
void write_timeseries_csv(const std::filesystem::path& path, const MultivariateTimeSeries& ts);

// Warp CSV: header "t,gamma", one knot per row.
void write_warp_csv(const std::filesystem::path& path, const WarpingFunction& w);
WarpingFunction read_warp_csv(const std::filesystem::path& path);

// Distance matrix CSV: header row of ids, then N rows of N values.
void write_distance_csv(const std::filesystem::path& path, const DistanceMatrix& d);
DistanceMatrix read_distance_csv(const std::filesystem::path& path, std::string metric = "");

// Labels CSV: header "id,label".
void write_labels_csv(const std::filesystem::path& path, const std::vector<std::string>& ids,
                      const std::vector<int>& labels);
std::map<std::string, int> read_labels_csv(const std::filesystem::path& path);

void write_alignment_report_csv(const std::filesystem::path& path, const DistanceMatrix& d,
                                const std::vector<AlignmentRecord>& records);
void write_confusion_csv(const std::filesystem::path& path, const CrossValidation& cv);
/// One value per line after a "relative_reduction" header.
void write_histogram_csv(const std::filesystem::path& path, const std::vector<double>& values);

/// Writes text atomically-enough for our purposes: to a temp file, then rename.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace spdtraj::io
