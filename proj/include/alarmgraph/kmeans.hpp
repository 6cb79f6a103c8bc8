#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "alarmgraph/errors.hpp"
#include "alarmgraph/rng.hpp"

namespace alarmgraph {

enum class KMeansInit { random_points, plus_plus };

/// One Lloyd run. inertia_history holds the objective after each assignment
/// phase, so monotone descent is checkable.
struct KMeansRun {
  std::vector<int> assignments;
  Eigen::MatrixXd centers;
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> inertia_history;
};

/// Lloyd's algorithm seeded from k distinct data points chosen uniformly.
/// Ties in assignment go to the lowest center index; an emptied cluster is
/// reseeded from the point farthest from its own center.
inline KMeansRun kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                        int max_iter = 300, double tol = 1e-6,
                        KMeansInit init = KMeansInit::random_points) {
  const Eigen::Index h = points.rows();
  const Eigen::Index d = points.cols();
  if (k < 1) throw error(errc::invalid_argument, "k must be >= 1");
  if (h < k)
    throw error(errc::too_few_points, "need at least k=" + std::to_string(k) + " points, got " +
                                          std::to_string(static_cast<long long>(h)));

  rng r(seed);
  Eigen::MatrixXd centers(k, d);
  if (init == KMeansInit::random_points) {
    auto picks = r.sample_without_replacement(static_cast<std::size_t>(h),
                                              static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) centers.row(c) = points.row(static_cast<Eigen::Index>(picks[static_cast<std::size_t>(c)]));
  } else {
    // k-means++: D^2-weighted seeding.
    Eigen::Index first = static_cast<Eigen::Index>(r.below(static_cast<std::uint64_t>(h)));
    centers.row(0) = points.row(first);
    Eigen::VectorXd dist2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
      double total = dist2.sum();
      Eigen::Index pick = 0;
      if (total > 0.0) {
        double u = r.uniform() * total;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < h; ++i) {
          acc += dist2(i);
          if (u < acc) {
            pick = i;
            break;
          }
          pick = i;
        }
      } else {
        pick = static_cast<Eigen::Index>(r.below(static_cast<std::uint64_t>(h)));
      }
      centers.row(c) = points.row(pick);
      dist2 = dist2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }
  }

  KMeansRun run;
  run.assignments.assign(static_cast<std::size_t>(h), 0);
  std::vector<Eigen::Index> cluster_size(static_cast<std::size_t>(k), 0);

  auto assign = [&]() {
    double inertia = 0.0;
    std::fill(cluster_size.begin(), cluster_size.end(), 0);
    for (Eigen::Index i = 0; i < h; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double dd = (points.row(i) - centers.row(c)).squaredNorm();
        if (dd < best_d) {
          best_d = dd;
          best = c;
        }
      }
      run.assignments[static_cast<std::size_t>(i)] = best;
      ++cluster_size[static_cast<std::size_t>(best)];
      inertia += best_d;
    }
    return inertia;
  };

  double inertia = assign();
  run.inertia_history.push_back(inertia);

  for (int iter = 0; iter < max_iter; ++iter) {
    run.iterations = iter + 1;

    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, d);
    for (Eigen::Index i = 0; i < h; ++i)
      next.row(run.assignments[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c)
      if (cluster_size[static_cast<std::size_t>(c)] > 0)
        next.row(c) /= static_cast<double>(cluster_size[static_cast<std::size_t>(c)]);

    // Reseed emptied clusters from the points farthest from their centers.
    std::vector<Eigen::Index> used;
    for (int c = 0; c < k; ++c) {
      if (cluster_size[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < h; ++i) {
        bool taken = false;
        for (Eigen::Index u : used)
          if (u == i) taken = true;
        if (taken) continue;
        double dd = (points.row(i) - centers.row(run.assignments[static_cast<std::size_t>(i)]))
                        .squaredNorm();
        if (dd > far_d) {
          far_d = dd;
          far = i;
        }
      }
      if (far >= 0) {
        next.row(c) = points.row(far);
        used.push_back(far);
      }
    }

    double shift = 0.0;
    for (int c = 0; c < k; ++c)
      shift = std::max(shift, (next.row(c) - centers.row(c)).norm());
    centers = next;

    inertia = assign();
    run.inertia_history.push_back(inertia);
    if (shift < tol) break;
  }

  run.centers = centers;
  run.inertia = inertia;
  return run;
}

/// Inertia curve over a k range (best of 3 seeds per k) plus the elbow
/// suggestion: the k maximizing the second difference of the curve. Ranges
/// shorter than 3 get no suggestion.
struct ElbowResult {
  std::vector<int> ks;
  std::vector<double> inertia;
  std::optional<int> suggested_k;
};

inline ElbowResult elbow(const Eigen::MatrixXd& points, const std::vector<int>& k_range,
                         std::uint64_t seed) {
  if (k_range.empty()) throw error(errc::invalid_argument, "elbow k_range is empty");
  ElbowResult result;
  result.ks = k_range;
  for (std::size_t i = 0; i < k_range.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 3; ++rep) {
      auto run = kmeans(points, k_range[i],
                        derive_seed(seed, static_cast<std::uint64_t>(k_range[i]),
                                    static_cast<std::uint64_t>(rep)));
      best = std::min(best, run.inertia);
    }
    result.inertia.push_back(best);
  }
  if (result.ks.size() >= 3) {
    double best_d2 = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < result.ks.size(); ++i) {
      double d2 = result.inertia[i - 1] - 2.0 * result.inertia[i] + result.inertia[i + 1];
      if (d2 > best_d2) {
        best_d2 = d2;
        result.suggested_k = result.ks[i];
      }
    }
  }
  return result;
}

}  // namespace alarmgraph
