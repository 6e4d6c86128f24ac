#include <cmath>
#include <vector>

#include "doctest.h"
#include "hwsir/integrator.hpp"

using namespace hwsir;

namespace {
const VectorField decay = [](double, const std::vector<double>& y) {
  return std::vector<double>{-y[0]};
};
}

TEST_CASE("exponential decay hits e^-1") {
  auto sol = integrate(decay, {1.0}, 0.0, 1.0);
  CHECK(sol.eval_component(1.0, 0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
}

TEST_CASE("zero field keeps the solution constant") {
  VectorField zero = [](double, const std::vector<double>& y) {
    return std::vector<double>(y.size(), 0.0);
  };
  auto sol = integrate(zero, {0.25, -3.0}, 0.0, 10.0);
  for (double t : {0.0, 2.5, 7.0, 10.0}) {
    auto y = sol.eval(t);
    CHECK(y[0] == 0.25);
    CHECK(y[1] == -3.0);
  }
}

TEST_CASE("degenerate span returns the initial state") {
  auto sol = integrate(decay, {2.0}, 1.5, 1.5);
  CHECK(sol.eval_component(1.5, 0) == 2.0);
}

TEST_CASE("tolerance refinement tightens the answer") {
  IntegratorConfig loose{1e-4, 1e-6};
  IntegratorConfig tight{1e-8, 1e-10};
  // 2D oscillator with known solution (cos t, -sin t)
  VectorField osc = [](double, const std::vector<double>& y) {
    return std::vector<double>{y[1], -y[0]};
  };
  auto a = integrate(osc, {1.0, 0.0}, 0.0, 20.0, loose);
  auto b = integrate(osc, {1.0, 0.0}, 0.0, 20.0, tight);
  double err_a = std::abs(a.eval_component(20.0, 0) - std::cos(20.0));
  double err_b = std::abs(b.eval_component(20.0, 0) - std::cos(20.0));
  CHECK(err_b < err_a);
  CHECK(err_a < 10 * 1e-4);
}

TEST_CASE("fixed-step global error scales like h^5") {
  std::vector<double> hs, errs;
  for (double h : {0.1, 0.05, 0.025, 0.0125, 0.00625}) {
    IntegratorConfig cfg;
    cfg.fixed_step = h;
    auto sol = integrate(decay, {1.0}, 0.0, 1.0, cfg);
    double err = std::abs(sol.eval_component(1.0, 0) - std::exp(-1.0));
    hs.push_back(std::log(h));
    errs.push_back(std::log(err));
  }
  // least-squares slope of log err vs log h
  double n = static_cast<double>(hs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < hs.size(); ++j) {
    sx += hs[j];
    sy += errs[j];
    sxx += hs[j] * hs[j];
    sxy += hs[j] * errs[j];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  // The empirical slope over a finite step range scatters around the
  // classical order; the band rules out a fourth-order method.
  CHECK(slope == doctest::Approx(5.0).epsilon(0.2));  // 5 +/- 1
  CHECK(slope > 4.5);
}

TEST_CASE("dense output matches step endpoints") {
  auto sol = integrate(decay, {1.0}, 0.0, 3.0);
  for (const auto& st : sol.steps()) {
    auto at_start = st.eval(st.t0);
    CHECK(at_start[0] == doctest::Approx(st.c0[0]).epsilon(1e-14));
  }
  // continuity across step boundaries
  for (std::size_t j = 1; j < sol.steps().size(); ++j) {
    const auto& prev = sol.steps()[j - 1];
    const auto& cur = sol.steps()[j];
    double t_join = cur.t0;
    CHECK(prev.eval(t_join)[0] == doctest::Approx(cur.c0[0]).epsilon(1e-12));
  }
}

TEST_CASE("dense output is accurate between steps") {
  auto sol = integrate(decay, {1.0}, 0.0, 2.0);
  for (double t = 0.0; t <= 2.0; t += 0.01)
    CHECK(sol.eval_component(t, 0) ==
          doctest::Approx(std::exp(-t)).epsilon(1e-6));
}

TEST_CASE("threshold time: no crossing on a constant above the level") {
  VectorField zero = [](double, const std::vector<double>& y) {
    return std::vector<double>(y.size(), 0.0);
  };
  auto sol = integrate(zero, {0.02}, 0.0, 10.0);
  CHECK(!find_threshold_time(sol, 0, 0.01).has_value());
}

TEST_CASE("threshold time of a decaying exponential") {
  // i(t) = 0.05 e^{-t}; down-crossing of 0.01 at ln 5
  auto sol = integrate(decay, {0.05}, 0.0, 5.0);
  auto t = find_threshold_time(sol, 0, 0.01);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(std::log(5.0)).epsilon(1e-6));
  CHECK(sol.eval_component(*t, 0) == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("threshold time ignores pre-peak crossings") {
  // hump: y' = y (1 - t); rises then falls. Level below the start value is
  // only reported after the interior maximum at t = 1.
  VectorField hump = [](double t, const std::vector<double>& y) {
    return std::vector<double>{y[0] * (1.0 - t)};
  };
  auto sol = integrate(hump, {0.05}, 0.0, 4.0);
  auto t = find_threshold_time(sol, 0, 0.04);
  REQUIRE(t.has_value());
  CHECK(*t > 1.0);
  CHECK(sol.eval_component(*t, 0) == doctest::Approx(0.04).epsilon(1e-6));
}

TEST_CASE("argmax_time finds the interior peak") {
  VectorField hump = [](double t, const std::vector<double>& y) {
    return std::vector<double>{y[0] * (1.0 - t)};
  };
  auto sol = integrate(hump, {0.05}, 0.0, 4.0);
  CHECK(argmax_time(sol, 0) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("invalid configurations are rejected") {
  IntegratorConfig bad;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(integrate(decay, {1.0}, 0.0, 1.0, bad), std::invalid_argument);
  CHECK_THROWS_AS(integrate(decay, {1.0}, 1.0, 0.0), std::invalid_argument);
}
