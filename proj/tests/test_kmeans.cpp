#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "alarmgraph/kmeans.hpp"
#include "support.hpp"

using namespace alarmgraph;

namespace {

/// Four tight Gaussian blobs in 2-D, 15 points each.
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

TEST_CASE("k = 1 gives the mean and the total squared deviation") {
  Eigen::MatrixXd pts(4, 1);
  pts << 0, 2, 4, 10;
  auto run = kmeans(pts, 1, 7);
  CHECK_THAT(run.centers(0, 0), Catch::Matchers::WithinAbs(4.0, 1e-12));
  double want = 0.0;
  for (int i = 0; i < 4; ++i) want += (pts(i, 0) - 4.0) * (pts(i, 0) - 4.0);
  CHECK_THAT(run.inertia, Catch::Matchers::WithinAbs(want, 1e-12));
}

TEST_CASE("well-separated pairs split correctly for every seed") {
  Eigen::MatrixXd pts(4, 1);
  pts << 0, 0.1, 10, 10.1;

  // Oracle: exhaustive check of both candidate partitions' inertias shows
  // {0,0.1} / {10,10.1} is the optimum Lloyd must reach from any seeding.
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    auto run = kmeans(pts, 2, seed);
    CHECK(run.assignments[0] == run.assignments[1]);
    CHECK(run.assignments[2] == run.assignments[3]);
    CHECK(run.assignments[0] != run.assignments[2]);
  }
}

TEST_CASE("same seed means identical assignments") {
  auto pts = four_blobs(40);
  auto a = kmeans(pts, 4, 11);
  auto b = kmeans(pts, 4, 11);
  CHECK(a.assignments == b.assignments);
  CHECK(a.centers == b.centers);
  CHECK(a.inertia == b.inertia);
}

TEST_CASE("kmeans rejects more clusters than points") {
  Eigen::MatrixXd pts(3, 2);
  pts.setZero();
  CHECK_THROWS_AS(kmeans(pts, 4, 1), error);
  CHECK_THROWS_AS(kmeans(pts, 0, 1), error);
}

TEST_CASE("inertia never increases across Lloyd iterations") {
  auto pts = four_blobs(3, 2.5);  // loose blobs: several iterations to settle
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto run = kmeans(pts, 4, seed);
    REQUIRE(run.inertia_history.size() >= 2);
    for (std::size_t i = 1; i < run.inertia_history.size(); ++i)
      CHECK(run.inertia_history[i] <= run.inertia_history[i - 1] + 1e-9);
  }
}

TEST_CASE("every label is within range and every cluster is non-empty") {
  auto pts = four_blobs(9);
  auto run = kmeans(pts, 5, 13);
  std::vector<int> count(5, 0);
  for (int a : run.assignments) {
    REQUIRE(a >= 0);
    REQUIRE(a < 5);
    ++count[static_cast<std::size_t>(a)];
  }
  for (int c : count) CHECK(c > 0);
}

TEST_CASE("kmeans++ seeding is available and deterministic") {
  auto pts = four_blobs(21);
  auto a = kmeans(pts, 4, 5, 300, 1e-6, KMeansInit::plus_plus);
  auto b = kmeans(pts, 4, 5, 300, 1e-6, KMeansInit::plus_plus);
  CHECK(a.assignments == b.assignments);
  CHECK(a.inertia <= kmeans(pts, 4, 5).inertia * 1.5 + 1e-9);
}

TEST_CASE("elbow suggests four on four separated blobs") {
  auto pts = four_blobs(8);
  std::vector<int> ks{2, 3, 4, 5, 6, 7, 8, 9, 10};  // pipeline default range
  auto result = elbow(pts, ks, 18);
  REQUIRE(result.suggested_k.has_value());
  CHECK(*result.suggested_k == 4);
}

TEST_CASE("elbow over a single k yields no suggestion") {
  auto pts = four_blobs(2);
  auto result = elbow(pts, {1}, 3);
  CHECK(result.inertia.size() == 1);
  CHECK_FALSE(result.suggested_k.has_value());
}

TEST_CASE("elbow inertia is non-increasing in k up to seed noise") {
  auto pts = four_blobs(8, 1.0);
  std::vector<int> ks{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto result = elbow(pts, ks, 23);
  for (std::size_t i = 1; i < result.inertia.size(); ++i)
    CHECK(result.inertia[i] <= result.inertia[i - 1] * 1.01);
}

TEST_CASE("elbow rejects an empty range") {
  auto pts = four_blobs(1);
  CHECK_THROWS_AS(elbow(pts, {}, 1), error);
}
