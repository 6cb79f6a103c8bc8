#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alarmgraph/csv.hpp"
#include "alarmgraph/errors.hpp"

namespace alarmgraph {

enum class Linkage { single, complete, average };

inline const char* linkage_name(Linkage l) {
  switch (l) {
    case Linkage::single: return "single";
    case Linkage::complete: return "complete";
    case Linkage::average: return "average";
  }
  return "?";
}

inline std::optional<Linkage> parse_linkage(std::string_view s) {
  if (s == "single") return Linkage::single;
  if (s == "complete") return Linkage::complete;
  if (s == "average") return Linkage::average;
  return std::nullopt;
}

/// One agglomeration step: children (left < right), merge height, merged size.
struct Merge {
  int left = 0;
  int right = 0;
  double height = 0.0;
  int size = 0;
};

/// Merge tree over H leaves: leaf ids 0..H-1, internal ids H..2H-2 in merge
/// order. Heights are non-decreasing for the supported linkages.
struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;
};

/// Agglomerative hierarchical clustering of a symmetric zero-diagonal
/// dissimilarity matrix, via Lance-Williams updates. Ties are broken by the
/// smallest (left id, right id) pair.
inline Dendrogram ahc(const Eigen::MatrixXd& d, Linkage linkage = Linkage::average) {
  const Eigen::Index h = d.rows();
  if (h != d.cols()) throw error(errc::shape_mismatch, "dissimilarity matrix must be square");
  if (h < 2) throw error(errc::too_few_items, "need at least 2 items to cluster");

  struct Active {
    int id;
    int size;
  };
  std::vector<Active> active;
  active.reserve(static_cast<std::size_t>(h));
  for (Eigen::Index i = 0; i < h; ++i) active.push_back({static_cast<int>(i), 1});

  // Working distances between active clusters, indexed by slot.
  Eigen::MatrixXd dist = d;

  Dendrogram out;
  out.leaves = static_cast<std::size_t>(h);
  int next_id = static_cast<int>(h);

  while (active.size() > 1) {
    std::size_t best_a = 0, best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        double v = dist(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        int lo = std::min(active[a].id, active[b].id);
        int hi = std::max(active[a].id, active[b].id);
        int cur_lo = std::min(active[best_a].id, active[best_b].id);
        int cur_hi = std::max(active[best_a].id, active[best_b].id);
        if (v < best ||
            (v == best && std::make_pair(lo, hi) < std::make_pair(cur_lo, cur_hi))) {
          best = v;
          best_a = a;
          best_b = b;
        }
      }
    }

    const int ia = active[best_a].id;
    const int ib = active[best_b].id;
    const int sa = active[best_a].size;
    const int sb = active[best_b].size;
    out.merges.push_back({std::min(ia, ib), std::max(ia, ib), best, sa + sb});

    // Lance-Williams update of the surviving slot (best_a), then drop best_b.
    for (std::size_t x = 0; x < active.size(); ++x) {
      if (x == best_a || x == best_b) continue;
      double da = dist(static_cast<Eigen::Index>(best_a), static_cast<Eigen::Index>(x));
      double db = dist(static_cast<Eigen::Index>(best_b), static_cast<Eigen::Index>(x));
      double v = 0.0;
      switch (linkage) {
        case Linkage::single: v = std::min(da, db); break;
        case Linkage::complete: v = std::max(da, db); break;
        case Linkage::average:
          v = (static_cast<double>(sa) * da + static_cast<double>(sb) * db) /
              static_cast<double>(sa + sb);
          break;
      }
      dist(static_cast<Eigen::Index>(best_a), static_cast<Eigen::Index>(x)) = v;
      dist(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(best_a)) = v;
    }
    active[best_a] = {next_id++, sa + sb};

    const std::size_t last = active.size() - 1;
    if (best_b != last) {
      for (std::size_t x = 0; x < active.size(); ++x) {
        dist(static_cast<Eigen::Index>(best_b), static_cast<Eigen::Index>(x)) =
            dist(static_cast<Eigen::Index>(last), static_cast<Eigen::Index>(x));
        dist(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(best_b)) =
            dist(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(last));
      }
      active[best_b] = active[last];
    }
    active.pop_back();
  }

  return out;
}

namespace detail {

/// Leaf sets after undoing the last merges so that `clusters` remain, labeled
/// 0..clusters-1 in order of each cluster's smallest leaf.
inline std::vector<int> cut_after(const Dendrogram& dendro, std::size_t merges_applied) {
  const std::size_t h = dendro.leaves;
  std::vector<int> parent(2 * h - 1);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (std::size_t m = 0; m < merges_applied; ++m) {
    const Merge& mg = dendro.merges[m];
    int root = static_cast<int>(h + m);
    parent[static_cast<std::size_t>(find(mg.left))] = root;
    parent[static_cast<std::size_t>(find(mg.right))] = root;
  }
  std::vector<int> labels(h, -1);
  std::vector<int> root_label(2 * h - 1, -1);
  int next = 0;
  for (std::size_t i = 0; i < h; ++i) {
    int root = find(static_cast<int>(i));
    if (root_label[static_cast<std::size_t>(root)] < 0)
      root_label[static_cast<std::size_t>(root)] = next++;
    labels[i] = root_label[static_cast<std::size_t>(root)];
  }
  return labels;
}

}  // namespace detail

/// Cut into exactly k clusters. Labels are 0..k-1 ordered by smallest member.
inline std::vector<int> cut_k(const Dendrogram& dendro, int k) {
  const int h = static_cast<int>(dendro.leaves);
  if (k < 1 || k > h)
    throw error(errc::invalid_cut, "cannot cut " + std::to_string(h) + " leaves into " +
                                       std::to_string(k) + " clusters");
  return detail::cut_after(dendro, static_cast<std::size_t>(h - k));
}

/// Group everything merged at height <= cut height.
inline std::vector<int> cut_height(const Dendrogram& dendro, double height) {
  if (height < 0) throw error(errc::invalid_cut, "cut height must be >= 0");
  std::size_t applied = 0;
  while (applied < dendro.merges.size() && dendro.merges[applied].height <= height) ++applied;
  return detail::cut_after(dendro, applied);
}

/// Newick rendering; each node's branch length is the height of the merge
/// that absorbs it.
inline std::string to_newick(const Dendrogram& dendro, const std::vector<std::string>& labels) {
  const std::size_t h = dendro.leaves;
  if (labels.size() != h) throw error(errc::shape_mismatch, "label count != leaf count");
  if (h == 1) return labels.empty() ? ";" : labels[0] + ";";

  auto safe_label = [](const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == ' ') out.push_back('_');
      else out.push_back(c);
    }
    return out;
  };

  std::vector<std::string> rendered(2 * h - 1);
  for (std::size_t i = 0; i < h; ++i) rendered[i] = safe_label(labels[i]);
  for (std::size_t m = 0; m < dendro.merges.size(); ++m) {
    const Merge& mg = dendro.merges[m];
    rendered[h + m] = "(" + rendered[static_cast<std::size_t>(mg.left)] + ":" +
                      format_double(mg.height) + "," +
                      rendered[static_cast<std::size_t>(mg.right)] + ":" +
                      format_double(mg.height) + ")";
  }
  return rendered[2 * h - 2] + ";";
}

}  // namespace alarmgraph
