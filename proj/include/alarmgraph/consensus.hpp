#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "alarmgraph/errors.hpp"
#include "alarmgraph/kmeans.hpp"

namespace alarmgraph {

/// Block indicator matrix R = [R^(1) ... R^(M)]: one H x k_r binary block per
/// K-means run, each row of a block summing to exactly 1.
struct IndicatorMatrix {
  std::size_t items = 0;             // H
  std::vector<int> block_cols;       // k_r per run
  std::vector<std::uint8_t> cells;   // row-major, items x total cols

  std::size_t runs() const { return block_cols.size(); }

  std::size_t cols() const {
    std::size_t c = 0;
    for (int k : block_cols) c += static_cast<std::size_t>(k);
    return c;
  }

  std::uint8_t at(std::size_t i, std::size_t c) const { return cells[i * cols() + c]; }

  void append_run(const std::vector<int>& assignments, int k) {
    if (items == 0) items = assignments.size();
    if (assignments.size() != items)
      throw error(errc::shape_mismatch, "assignment length does not match item count");
    const std::size_t old_cols = cols();
    const std::size_t new_cols = old_cols + static_cast<std::size_t>(k);
    std::vector<std::uint8_t> next(items * new_cols, 0);
    for (std::size_t i = 0; i < items; ++i) {
      for (std::size_t c = 0; c < old_cols; ++c) next[i * new_cols + c] = cells[i * old_cols + c];
      int label = assignments[i];
      if (label < 0 || label >= k)
        throw error(errc::invalid_argument, "cluster label out of range");
      next[i * new_cols + old_cols + static_cast<std::size_t>(label)] = 1;
    }
    cells = std::move(next);
    block_cols.push_back(k);
  }

  /// Assemble from a list of (assignments, k) runs in one pass.
  static IndicatorMatrix from_runs(const std::vector<std::pair<std::vector<int>, int>>& runs_list,
                                   std::size_t count) {
    IndicatorMatrix r;
    if (count == 0) return r;
    r.items = runs_list[0].first.size();
    std::size_t total_cols = 0;
    for (std::size_t b = 0; b < count; ++b) {
      r.block_cols.push_back(runs_list[b].second);
      total_cols += static_cast<std::size_t>(runs_list[b].second);
    }
    r.cells.assign(r.items * total_cols, 0);
    std::size_t off = 0;
    for (std::size_t b = 0; b < count; ++b) {
      const auto& [assignments, k] = runs_list[b];
      if (assignments.size() != r.items)
        throw error(errc::shape_mismatch, "assignment length does not match item count");
      for (std::size_t i = 0; i < r.items; ++i)
        r.cells[i * total_cols + off + static_cast<std::size_t>(assignments[i])] = 1;
      off += static_cast<std::size_t>(k);
    }
    return r;
  }
};

/// M_runs independent K-means runs with derived seeds, blocks concatenated in
/// run order.
inline IndicatorMatrix ensemble(const Eigen::MatrixXd& points, int k, int m_runs,
                                std::uint64_t seed) {
  if (m_runs < 1) throw error(errc::invalid_argument, "ensemble needs at least one run");
  IndicatorMatrix r;
  r.items = static_cast<std::size_t>(points.rows());
  for (int m = 0; m < m_runs; ++m) {
    auto run = kmeans(points, k, derive_seed(seed, static_cast<std::uint64_t>(m)));
    r.append_run(run.assignments, k);
  }
  return r;
}

/// Aggregated dissimilarity D = 1 - (1/M) R R^T, computed with integer
/// co-clustering counts before the single division.
struct ConsensusDissimilarity {
  Eigen::MatrixXd d;
  std::size_t pooled_runs = 0;  // M
};

inline ConsensusDissimilarity consensus(const IndicatorMatrix& r, std::size_t m) {
  if (r.runs() != m)
    throw error(errc::shape_mismatch, "indicator matrix holds " + std::to_string(r.runs()) +
                                          " runs, expected " + std::to_string(m));
  const std::size_t h = r.items;
  const std::size_t c = r.cols();
  ConsensusDissimilarity out;
  out.pooled_runs = m;
  out.d.resize(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(h));
  for (std::size_t i = 0; i < h; ++i) {
    out.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 0.0;
    const std::uint8_t* row_i = r.cells.data() + i * c;
    for (std::size_t j = i + 1; j < h; ++j) {
      const std::uint8_t* row_j = r.cells.data() + j * c;
      std::int64_t together = 0;
      for (std::size_t x = 0; x < c; ++x) together += row_i[x] & row_j[x];
      double v = 1.0 - static_cast<double>(together) / static_cast<double>(m);
      out.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      out.d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  return out;
}

/// Sum of squared entry differences over the strict upper triangle.
inline double epsilon_sse(const Eigen::MatrixXd& d_next, const Eigen::MatrixXd& d_curr) {
  if (d_next.rows() != d_curr.rows() || d_next.cols() != d_curr.cols())
    throw error(errc::shape_mismatch, "dissimilarity matrices differ in shape");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < d_next.rows(); ++i)
    for (Eigen::Index j = i + 1; j < d_next.cols(); ++j) {
      double diff = d_next(i, j) - d_curr(i, j);
      sum += diff * diff;
    }
  return sum;
}

/// k-selection by pooled-ensemble convergence. D(k') pools M_runs runs for
/// every k in {2..k'}, so M = (k' - 1) M_runs, and eps(k') compares D(k'+1)
/// against D(k'). k_max is the smallest k' with eps(k') and eps(k'+1) both
/// under eps_tol * H(H-1)/2; reaching k_cap without that pair -> NonConverged.
struct KmaxResult {
  int k_max = 0;
  Eigen::MatrixXd d;               // pooled D(k_max)
  std::vector<double> eps_curve;   // one entry per tested k', starting at k_min
  bool converged = false;
};

inline KmaxResult select_kmax(const Eigen::MatrixXd& points, int k_min, int m_runs,
                              double eps_tol, int k_cap, std::uint64_t seed) {
  if (k_min < 2) throw error(errc::invalid_argument, "k_min must be >= 2");
  if (k_cap < k_min + 1) throw error(errc::invalid_argument, "k_cap must be >= k_min + 1");

  const auto h = static_cast<double>(points.rows());
  const double threshold = eps_tol * h * (h - 1.0) / 2.0;

  std::vector<std::pair<std::vector<int>, int>> all_runs;  // runs for k = 2, 3, ...
  int pooled_up_to = 1;
  auto pool_to = [&](int k_hi) {
    for (int k = pooled_up_to + 1; k <= k_hi; ++k) {
      for (int m = 0; m < m_runs; ++m) {
        auto run = kmeans(points, k,
                          derive_seed(seed, static_cast<std::uint64_t>(k),
                                      static_cast<std::uint64_t>(m)));
        all_runs.emplace_back(std::move(run.assignments), k);
      }
    }
    pooled_up_to = std::max(pooled_up_to, k_hi);
  };
  auto pooled_d = [&](int k_hi) {
    pool_to(k_hi);
    std::size_t want = static_cast<std::size_t>(k_hi - 1) * static_cast<std::size_t>(m_runs);
    return consensus(IndicatorMatrix::from_runs(all_runs, want), want).d;
  };

  KmaxResult result;
  Eigen::MatrixXd d_prev;  // D(m - 1), only meaningful once eps_prev is set
  Eigen::MatrixXd d_curr = pooled_d(k_min);
  Eigen::MatrixXd d_next;
  double eps_prev = -1.0;

  for (int m = k_min; m + 1 <= k_cap; ++m) {
    d_next = pooled_d(m + 1);
    double eps = epsilon_sse(d_next, d_curr);
    result.eps_curve.push_back(eps);
    if (eps_prev >= 0.0 && eps_prev < threshold && eps < threshold) {
      result.k_max = m - 1;
      result.d = std::move(d_prev);
      result.converged = true;
      return result;
    }
    eps_prev = eps;
    d_prev = std::move(d_curr);
    d_curr = std::move(d_next);
  }

  result.k_max = k_cap;
  result.d = pooled_d(k_cap);
  result.converged = false;
  return result;
}

}  // namespace alarmgraph
