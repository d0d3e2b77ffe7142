#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "stremon/shift.hpp"
#include "testutil/gen.hpp"

using namespace stremon;
using Catch::Approx;

namespace {

// Deterministic near-Gaussian draws: Box-Muller on a low-discrepancy grid.
std::vector<double> quasi_normal(int m, double mean, double sd) {
  std::vector<double> out;
  out.reserve(m);
  const double golden = 0.6180339887498949;
  for (int i = 0; i < m; ++i) {
    double u1 = (i + 0.5) / m;
    double u2 = std::fmod(golden * (i + 1), 1.0);
    out.push_back(mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2));
  }
  return out;
}

double integrate(const KdeDensity& k, double lo, double hi, int n) {
  double step = (hi - lo) / (n - 1);
  double sum = 0, prev = k(lo);
  for (int i = 1; i < n; ++i) {
    double d = k(lo + i * step);
    sum += 0.5 * (prev + d) * step;
    prev = d;
  }
  return sum;
}

}  // namespace

TEST_CASE("kde density is a proper density") {
  std::vector<double> samples = {0.0, 1.0, 2.5, -0.7, 4.2};
  KdeDensity k = kde_pdf(samples);
  double lo = -0.7 - 8 * k.bandwidth, hi = 4.2 + 8 * k.bandwidth;
  CHECK(integrate(k, lo, hi, 20001) == Approx(1.0).margin(1e-6));
  CHECK(k(1.0) > 0.0);
}

TEST_CASE("bandwidth follows Silverman's rule with a floor") {
  SECTION("frozen value on 0..4") {
    KdeDensity k = kde_pdf({0, 1, 2, 3, 4});
    CHECK(k.bandwidth == Approx(1.214735905665934).margin(1e-12));
  }
  SECTION("degenerate samples floor at 1e-6") {
    CHECK(kde_pdf({3.0}).bandwidth == 1e-6);
    CHECK(kde_pdf({2.0, 2.0, 2.0}).bandwidth == 1e-6);
  }
  SECTION("explicit bandwidth wins but still floors") {
    CHECK(kde_pdf({0, 1, 2}, 0.4).bandwidth == 0.4);
    CHECK(kde_pdf({0, 1, 2}, 1e-9).bandwidth == 1e-6);
  }
  SECTION("bad samples are rejected") {
    CHECK_THROWS_AS(kde_pdf({}), std::invalid_argument);
    CHECK_THROWS_AS(kde_pdf({1.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(kde_pdf({1.0, kPlusInf}), std::invalid_argument);
  }
}

TEST_CASE("tv distance behaves like a metric estimate") {
  std::vector<double> a = quasi_normal(400, 0.0, 1.0);
  std::vector<double> b = quasi_normal(400, 1.5, 0.7);

  SECTION("identical sample sets have zero distance") {
    CHECK(tv_between(a, a) <= 1e-6);
  }
  SECTION("symmetry") {
    CHECK(std::abs(tv_between(a, b) - tv_between(b, a)) <= 1e-9);
  }
  SECTION("well separated samples saturate near one") {
    std::vector<double> far;
    for (double v : a) far.push_back(v + 100.0);
    CHECK(tv_between(a, far) == Approx(1.0).margin(1e-3));
  }
  SECTION("doubling the grid barely moves the estimate") {
    CHECK(std::abs(tv_between(a, b, 4096) - tv_between(a, b, 8192)) < 1e-3);
  }
  SECTION("bounds and validation") {
    double tv = tv_between(a, b);
    CHECK(tv >= 0.0);
    CHECK(tv <= 1.0);
    CHECK_THROWS_AS(tv_between({}, a), std::invalid_argument);
    CHECK_THROWS_AS(tv_between(a, {}), std::invalid_argument);
    CHECK_THROWS_AS(tv_between(a, b, 1), std::invalid_argument);
  }
}

TEST_CASE("unit-shifted gaussians land near the closed-form tv") {
  std::vector<double> a = quasi_normal(2000, 0.0, 1.0);
  std::vector<double> b = quasi_normal(2000, 1.0, 1.0);
  // analytic value erf(1 / (2 sqrt 2)) = 0.3829...; kde smoothing biases it down a little
  double tv = tv_between(a, b);
  CHECK(tv > 0.32);
  CHECK(tv < 0.44);
}

namespace {

// Score of (10, 10, z) under accurate-stl with G[0,2] (s[0] >= 0), t = 1 and a
// constant-velocity prediction is exactly 10 - z for z < 10, so shifting z
// shifts the score distribution one-to-one.
Trajectory line_then(double z, int trial) {
  Trajectory x = Trajectory::zeros(1, 1, 3);
  x.trial_id = trial;
  x.at(0, 0, 0) = 10;
  x.at(1, 0, 0) = 10;
  x.at(2, 0, 0) = z;
  return x;
}

std::vector<Trajectory> pool_of(const std::vector<double>& zs, int base_trial) {
  std::vector<Trajectory> out;
  for (size_t i = 0; i < zs.size(); ++i)
    out.push_back(line_then(zs[i], base_trial + static_cast<int>(i)));
  return out;
}

}  // namespace

TEST_CASE("epsilon estimate is the worst score-distribution shift") {
  PredictorModel cv = make_constant_velocity();
  CalibrationInputs in;
  in.formula_text = "G[0,2] (s[0] >= 0)";
  in.t = 1;

  std::vector<double> z_train = quasi_normal(300, 0.0, 1.0);
  std::vector<Trajectory> train = pool_of(z_train, 0);
  std::vector<Trajectory> aset = pool_of(quasi_normal(40, 0.0, 1.0), 5000);

  SECTION("matching pools estimate almost no shift") {
    ShiftEstimate est = estimate_epsilon(in, {Method::AccurateStl, Method::Interp1Stl,
                                              Method::Interp2Stl},
                                         train, train, aset, cv);
    REQUIRE(est.components.size() == 3);
    for (const auto& c : est.components) CHECK(c.tv <= 1e-6);
    CHECK(est.epsilon <= 1e-6);
    CHECK(est.components[0].score_type == "accurate-stl");
    CHECK(est.components[1].score_type == "interp1-stl");
    CHECK(est.components[0].train_count == 300);
    CHECK(est.components[0].test_count == 300);
  }

  SECTION("a genuine shift shows up and epsilon takes the max") {
    std::vector<Trajectory> test = pool_of(quasi_normal(300, 2.0, 1.0), 1000);
    ShiftEstimate est =
        estimate_epsilon(in, {Method::AccurateStl, Method::Interp2Stl}, train, test, aset, cv);
    REQUIRE(est.components.size() == 2);
    double worst = std::max(est.components[0].tv, est.components[1].tv);
    CHECK(est.epsilon == worst);
    CHECK(est.epsilon > 0.3);
    CHECK(est.epsilon <= 1.0);
  }

  SECTION("estimates are deterministic") {
    std::vector<Trajectory> test = pool_of(quasi_normal(200, 1.0, 1.2), 1000);
    ShiftEstimate a = estimate_epsilon(in, {Method::AccurateStl}, train, test, aset, cv);
    ShiftEstimate b = estimate_epsilon(in, {Method::AccurateStl}, train, test, aset, cv);
    CHECK(a.epsilon == b.epsilon);
    CHECK(a.components[0].tv == b.components[0].tv);
    CHECK(a.components[0].grid.lo == b.components[0].grid.lo);
    CHECK(a.components[0].grid.hi == b.components[0].grid.hi);
  }

  SECTION("validation") {
    CHECK_THROWS_AS(estimate_epsilon(in, {}, train, train, aset, cv), std::invalid_argument);
    CHECK_THROWS_AS(estimate_epsilon(in, {Method::AccurateStl}, {}, train, aset, cv),
                    std::invalid_argument);
    CHECK_THROWS_AS(estimate_epsilon(in, {Method::AccurateStl}, train, {}, aset, cv),
                    std::invalid_argument);
  }
}
