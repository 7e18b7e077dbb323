#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "qdist/metrics.hpp"
#include "qdist/ot.hpp"

using namespace qdist;

namespace {

std::vector<double> iota_positions(std::size_t n) {
  std::vector<double> x(n);
  std::iota(x.begin(), x.end(), 0.0);
  return x;
}

Distribution p_a() {
  std::vector<double> w(10, 0.0);
  for (int i = 0; i < 5; ++i) w[i] = 0.2;
  return Distribution::from_weights(w);
}

Distribution p_b() {
  std::vector<double> w(10, 0.0);
  for (int i = 0; i < 10; i += 2) w[i] = 0.2;
  return Distribution::from_weights(w);
}

Distribution random_distribution(std::mt19937_64& rng, std::size_t n, double zero_fraction) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  for (auto& x : w) x = u(rng) < zero_fraction ? 0.0 : u(rng);
  w[rng() % n] += 0.1;
  return Distribution::normalized(w);
}

// W1 on a circle: min over the constant shift c of sum |F_p - F_q - c| dx,
// attained at a weighted median of the CDF gap.
double circle_w1_oracle(const Distribution& p, const Distribution& q, const std::vector<double>& x, double period) {
  const std::size_t n = x.size();
  std::vector<std::pair<double, double>> gaps;  // (gap value, arc length)
  double g = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g += p[i] - q[i];
    const double next = i + 1 < n ? x[i + 1] : x[0] + period;
    gaps.emplace_back(g, next - x[i]);
  }
  std::sort(gaps.begin(), gaps.end());
  const double half = period / 2.0;
  double acc = 0.0, c = gaps.back().first;
  for (const auto& [v, w] : gaps) {
    acc += w;
    if (acc >= half) {
      c = v;
      break;
    }
  }
  double total = 0.0;
  for (const auto& [v, w] : gaps) total += std::abs(v - c) * w;
  return total;
}

// O(n^3) Hungarian algorithm (potentials form) for a square cost matrix.
double assignment_oracle(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(p[j] - 1, j - 1);
  return total;
}

void check_feasible(const TransportPlan& plan, const Distribution& p, const Distribution& q) {
  const auto rows = plan.row_sums();
  const auto cols = plan.column_sums();
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(std::abs(rows[i] - p[i]) <= 1e-9);
    CHECK(std::abs(cols[i] - q[i]) <= 1e-9);
  }
  for (const auto& e : plan.entries) CHECK(e.mass >= 0.0);
}

}  // namespace

TEST_CASE("worked line examples against the uniform distribution") {
  const auto x = iota_positions(10);
  const MetricSpace line = line_metric(x);
  const Distribution uniform = Distribution::uniform(10);

  CHECK(std::abs(wasserstein(p_a(), uniform, line) - 2.5) <= 1e-9);
  CHECK(std::abs(wasserstein(p_b(), uniform, line) - 0.5) <= 1e-9);
  CHECK(std::abs(wasserstein_1d(p_a(), uniform, x) - 2.5) <= 1e-12);
  CHECK(std::abs(wasserstein_1d(p_b(), uniform, x) - 0.5) <= 1e-12);

  const TransportPlan plan = transport_plan(p_a(), uniform, line);
  CHECK(std::abs(plan.cost - 2.5) <= 1e-9);
  check_feasible(plan, p_a(), uniform);
}

TEST_CASE("identical distributions are at zero distance with a diagonal plan") {
  std::mt19937_64 rng(7);
  const auto x = iota_positions(12);
  const MetricSpace line = line_metric(x);
  const Distribution p = random_distribution(rng, 12, 0.3);
  CHECK(wasserstein(p, p, line) <= 1e-12);
  const TransportPlan plan = transport_plan(p, p, line);
  CHECK(std::abs(plan.cost) <= 1e-12);
  for (const auto& e : plan.entries) CHECK(e.source == e.target);
}

TEST_CASE("point masses couple through a single entry") {
  const auto x = iota_positions(6);
  const MetricSpace line = line_metric(x);
  for (int order : {1, 2, 3}) {
    const TransportPlan plan = transport_plan(Distribution::point_mass(6, 1), Distribution::point_mass(6, 4), line, {order});
    REQUIRE(plan.entries.size() == 1);
    CHECK(plan.entries[0].source == 1);
    CHECK(plan.entries[0].target == 4);
    CHECK(plan.entries[0].mass == doctest::Approx(1.0));
    CHECK(plan.cost == doctest::Approx(std::pow(3.0, order)));
  }
  CHECK(wasserstein_1d(Distribution::point_mass(6, 0), Distribution::point_mass(6, 5), x) == doctest::Approx(5.0));
}

TEST_CASE("network simplex agrees with the 1-D closed form on random inputs") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> step(0.05, 2.0);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    std::vector<double> x(n);
    x[0] = -3.0;
    for (std::size_t i = 1; i < n; ++i) x[i] = x[i - 1] + step(rng);
    const MetricSpace line = line_metric(x);
    const Distribution p = random_distribution(rng, n, 0.25);
    const Distribution q = random_distribution(rng, n, 0.25);
    for (int order : {1, 2}) {
      const double exact = wasserstein(p, q, line, {order});
      const double oracle = wasserstein_1d(p, q, x, {order});
      CHECK(std::abs(exact - oracle) <= 1e-9);
    }
    check_feasible(transport_plan(p, q, line), p, q);
  }
}

TEST_CASE("circle metric matches the median-shift closed form") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 3 + rng() % 30;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    const MetricSpace circle = torus_metric_1d(x, kTwoPi);
    const Distribution p = random_distribution(rng, n, 0.2);
    const Distribution q = random_distribution(rng, n, 0.2);
    CHECK(std::abs(wasserstein(p, q, circle) - circle_w1_oracle(p, q, x, kTwoPi)) <= 1e-9);
  }
}

TEST_CASE("uniform weights on a general metric reduce to optimal assignment") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng() % 25;
    // Source points are the first n, targets the last n, in one metric space.
    std::vector<std::vector<double>> pts(2 * n, std::vector<double>(2));
    for (auto& pt : pts) pt = {g(rng), g(rng)};
    const std::vector<std::optional<double>> periods(2);
    const MetricSpace space = torus_product_metric(pts, periods);
    std::vector<double> a(2 * n, 0.0), b(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = 1.0 / static_cast<double>(n);
      b[n + i] = 1.0 / static_cast<double>(n);
    }
    Matrix cost(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) cost(i, j) = space(i, n + j);
    const double expected = assignment_oracle(cost) / static_cast<double>(n);
    CHECK(std::abs(wasserstein(Distribution::from_weights(a), Distribution::from_weights(b), space) - expected) <= 1e-9);
  }
}

TEST_CASE("distance properties: symmetry, scale covariance, marginals") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 4 + rng() % 30;
    std::vector<std::vector<double>> pts(n, std::vector<double>(3));
    for (auto& pt : pts) pt = {g(rng), g(rng), g(rng)};
    const std::vector<std::optional<double>> periods{std::nullopt, 2.0, std::nullopt};
    const MetricSpace space = torus_product_metric(pts, periods);
    const Distribution p = random_distribution(rng, n, 0.3);
    const Distribution q = random_distribution(rng, n, 0.3);

    const double pq = wasserstein(p, q, space);
    CHECK(std::abs(pq - wasserstein(q, p, space)) <= 1e-9);
    CHECK(wasserstein(p, p, space) <= 1e-12);
    const double s = 0.1 + 3.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    CHECK(std::abs(wasserstein(p, q, space.scaled(s)) - s * pq) <= 1e-9 * std::max(1.0, s * pq));

    const TransportPlan plan = transport_plan(p, q, space, {2});
    check_feasible(plan, p, q);
    double direct = 0.0;
    for (const auto& e : plan.entries) direct += e.mass * space(e.source, e.target) * space(e.source, e.target);
    CHECK(std::abs(direct - plan.cost) <= 1e-12);
  }
}

TEST_CASE("weights below the prune threshold do not change the distance") {
  const auto x = iota_positions(5);
  const MetricSpace line = line_metric(x);
  const Distribution p = Distribution::from_weights({0.5, 0.5 - 1e-14, 1e-14, 0.0, 0.0});
  const Distribution q = Distribution::from_weights({0.0, 0.0, 0.0, 0.5, 0.5});
  CHECK(wasserstein(p, q, line) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("input validation") {
  const auto x = iota_positions(4);
  const MetricSpace line = line_metric(x);
  CHECK_THROWS_AS(Distribution::from_weights({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(Distribution::from_weights({1.5, -0.5}), std::invalid_argument);
  CHECK_THROWS_AS(wasserstein(Distribution::uniform(3), Distribution::uniform(4), line), std::invalid_argument);
  CHECK_THROWS_AS(wasserstein(Distribution::uniform(4), Distribution::uniform(4), line, {0}), std::invalid_argument);
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 1) = bad(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(MetricSpace::from_matrix(bad), std::invalid_argument);
  bad(0, 1) = 1.0;
  bad(1, 0) = 2.0;
  CHECK_THROWS_AS(MetricSpace::from_matrix(bad), std::invalid_argument);
  const std::vector<double> unsorted{0.0, 2.0, 1.0, 3.0};
  CHECK_THROWS_AS(wasserstein_1d(Distribution::uniform(4), Distribution::uniform(4), unsorted), std::invalid_argument);
}

TEST_CASE("shannon entropy ignores the metric") {
  CHECK(std::abs(shannon_entropy(p_a()) - std::log(5.0)) <= 1e-12);
  CHECK(std::abs(shannon_entropy(p_b()) - std::log(5.0)) <= 1e-12);
  CHECK(shannon_entropy(Distribution::point_mass(7, 3)) == 0.0);
  CHECK(std::abs(shannon_entropy(Distribution::uniform(13)) - std::log(13.0)) <= 1e-12);
}
