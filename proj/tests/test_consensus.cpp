#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "alarmgraph/consensus.hpp"
#include "support.hpp"

using namespace alarmgraph;

namespace {

/// Random label vectors -> indicator matrix plus the raw labels for the
/// direct-count oracle.
struct RandomEnsemble {
  IndicatorMatrix r;
  std::vector<std::vector<int>> labels;
};

RandomEnsemble random_ensemble(rng& rr, std::size_t h, std::size_t runs, int max_k) {
  RandomEnsemble out;
  out.r.items = h;
  for (std::size_t m = 0; m < runs; ++m) {
    int k = 1 + static_cast<int>(rr.below(static_cast<std::uint64_t>(max_k)));
    std::vector<int> labels(h);
    for (std::size_t i = 0; i < h; ++i) labels[i] = static_cast<int>(rr.below(static_cast<std::uint64_t>(k)));
    out.r.append_run(labels, k);
    out.labels.push_back(std::move(labels));
  }
  return out;
}

Eigen::MatrixXd four_blobs(std::uint64_t seed, double sigma = 0.3) {
  const double cx[] = {0, 10, 0, 10};
  const double cy[] = {0, 0, 10, 10};
  Eigen::MatrixXd pts(60, 2);
  rng r(seed);
  for (int b = 0; b < 4; ++b)
    for (int i = 0; i < 15; ++i) {
      pts(b * 15 + i, 0) = cx[b] + sigma * r.gaussian();
      pts(b * 15 + i, 1) = cy[b] + sigma * r.gaussian();
    }
  return pts;
}

}  // namespace

TEST_CASE("a single run gives one indicator block") {
  Eigen::MatrixXd pts(5, 1);
  pts << 0, 0.1, 0.2, 10, 10.1;
  auto r = ensemble(pts, 2, 1, 3);
  CHECK(r.runs() == 1);
  CHECK(r.cols() == 2);
  CHECK(r.items == 5);
}

TEST_CASE("indicator blocks concatenate known assignments") {
  IndicatorMatrix r;
  r.append_run({0, 0, 1}, 2);
  r.append_run({1, 0, 0}, 2);
  REQUIRE(r.items == 3);
  REQUIRE(r.cols() == 4);
  // [R^(1), R^(2)] laid out row by row.
  std::vector<std::uint8_t> want = {1, 0, 0, 1,
                                    1, 0, 1, 0,
                                    0, 1, 1, 0};
  CHECK(r.cells == want);
}

TEST_CASE("each block's rows sum to one") {
  rng rr(3);
  auto e = random_ensemble(rr, 8, 10, 4);
  std::size_t off = 0;
  for (std::size_t b = 0; b < e.r.runs(); ++b) {
    for (std::size_t i = 0; i < e.r.items; ++i) {
      int sum = 0;
      for (int c = 0; c < e.r.block_cols[b]; ++c)
        sum += e.r.at(i, off + static_cast<std::size_t>(c));
      CHECK(sum == 1);
    }
    off += static_cast<std::size_t>(e.r.block_cols[b]);
  }
}

TEST_CASE("single-run consensus: co-clustered pairs get zero distance") {
  IndicatorMatrix r;
  r.append_run({0, 0, 1}, 2);
  auto d = consensus(r, 1);
  CHECK(d.d(0, 1) == 0.0);
  CHECK(d.d(0, 2) == 1.0);
  CHECK(d.d(1, 2) == 1.0);
}

TEST_CASE("never co-clustered means distance one") {
  IndicatorMatrix r;
  r.append_run({0, 1}, 2);
  r.append_run({1, 0}, 2);
  auto d = consensus(r, 2);
  CHECK(d.d(0, 1) == 1.0);
}

TEST_CASE("co-clustered in half the runs means one half") {
  IndicatorMatrix r;
  for (int m = 0; m < 100; ++m) r.append_run(m < 50 ? std::vector<int>{0, 0} : std::vector<int>{0, 1}, 2);
  auto d = consensus(r, 100);
  CHECK(d.d(0, 1) == 0.5);
}

TEST_CASE("consensus rejects a run-count mismatch") {
  IndicatorMatrix r;
  r.append_run({0, 1}, 2);
  CHECK_THROWS_AS(consensus(r, 2), error);
}

TEST_CASE("Eq. 4 identity against direct co-clustering counts") {
  rng rr(19);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t h = 2 + rr.below(8);
    std::size_t runs = 1 + rr.below(12);
    auto e = random_ensemble(rr, h, runs, 4);
    auto d = consensus(e.r, runs);

    for (std::size_t i = 0; i < h; ++i) {
      CHECK(d.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) == 0.0);
      for (std::size_t j = i + 1; j < h; ++j) {
        std::int64_t together = 0;
        for (const auto& labels : e.labels)
          if (labels[i] == labels[j]) ++together;
        double want = 1.0 - static_cast<double>(together) / static_cast<double>(runs);
        CHECK(d.d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == want);
        CHECK(d.d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) == want);
      }
    }
  }
}

TEST_CASE("epsilon of identical matrices is zero") {
  Eigen::MatrixXd d(3, 3);
  d.setRandom();
  CHECK(epsilon_sse(d, d) == 0.0);
}

TEST_CASE("epsilon of a single differing off-diagonal pair") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd b = a;
  b(0, 1) = 0.5;
  b(1, 0) = 0.5;
  CHECK(epsilon_sse(b, a) == 0.25);
}

TEST_CASE("epsilon is non-negative and rejects shape mismatches") {
  rng rr(4);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd a(4, 4), b(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        a(i, j) = rr.uniform();
        b(i, j) = rr.uniform();
      }
    CHECK(epsilon_sse(a, b) >= 0.0);
  }
  Eigen::MatrixXd a(2, 2), b(3, 3);
  CHECK_THROWS_AS(epsilon_sse(a, b), error);
}

TEST_CASE("select_kmax converges on four separated blobs") {
  auto pts = four_blobs(101);
  auto result = select_kmax(pts, 2, 20, 1e-3, 10, 77);
  CHECK(result.converged);
  CHECK(result.k_max <= 6);
  CHECK(result.eps_curve.size() >= 2);

  // Once k >= 4 every same-blob pair lands together and cross-blob pairs
  // split: check co-clustering structure directly on the pooled D.
  double same_max = 0.0, cross_min = 1.0;
  for (int i = 0; i < 60; ++i)
    for (int j = i + 1; j < 60; ++j) {
      double v = result.d(i, j);
      if (i / 15 == j / 15) same_max = std::max(same_max, v);
      else cross_min = std::min(cross_min, v);
    }
  CHECK(same_max < cross_min);
}

TEST_CASE("infinite tolerance returns k_min immediately") {
  auto pts = four_blobs(5);
  auto result = select_kmax(pts, 2, 5, std::numeric_limits<double>::infinity(), 10, 3);
  CHECK(result.converged);
  CHECK(result.k_max == 2);
  CHECK(result.eps_curve.size() == 2);
}

TEST_CASE("epsilon curve grows one entry per tested k") {
  auto pts = four_blobs(6);
  auto result = select_kmax(pts, 2, 5, 1e-12, 5, 3);  // tolerance too tight to converge
  CHECK_FALSE(result.converged);
  CHECK(result.k_max == 5);
  CHECK(result.eps_curve.size() == 3);  // tested k' = 2, 3, 4
}

TEST_CASE("select_kmax validates its arguments") {
  auto pts = four_blobs(7);
  CHECK_THROWS_AS(select_kmax(pts, 1, 5, 1e-3, 10, 1), error);
  CHECK_THROWS_AS(select_kmax(pts, 2, 5, 1e-3, 2, 1), error);
}
