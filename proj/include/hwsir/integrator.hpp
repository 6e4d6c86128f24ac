#ifndef HWSIR_INTEGRATOR_HPP
#define HWSIR_INTEGRATOR_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hwsir {

struct StepSizeUnderflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegratorConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  double max_step = 0.0;      // 0 = unlimited
  double initial_step = 0.0;  // 0 = automatic
  double fixed_step = 0.0;    // > 0 disables the controller (order tests)
};

using VectorField = std::function<std::vector<double>(double, const std::vector<double>&)>;

// One accepted Dormand-Prince step with its dense-output coefficients.
struct DenseStep {
  double t0, h;
  std::vector<double> c0, c1, c2, c3, c4;

  std::vector<double> eval(double t) const {
    double theta = (t - t0) / h;
    double omt = 1.0 - theta;
    std::vector<double> y(c0.size());
    for (std::size_t j = 0; j < y.size(); ++j)
      y[j] = c0[j] +
             theta * (c1[j] + omt * (c2[j] + theta * (c3[j] + omt * c4[j])));
    return y;
  }
};

class DenseSolution {
 public:
  double t_begin() const { return steps_.front().t0; }
  double t_end() const {
    const auto& last = steps_.back();
    return last.t0 + last.h;
  }

  std::vector<double> eval(double t) const {
    const DenseStep& st = locate(t);
    return st.eval(t);
  }

  double eval_component(double t, std::size_t comp) const { return eval(t)[comp]; }

  const std::vector<DenseStep>& steps() const { return steps_; }
  void add_step(DenseStep st) { steps_.push_back(std::move(st)); }

 private:
  const DenseStep& locate(double t) const {
    if (steps_.empty()) throw std::logic_error("DenseSolution: empty");
    auto it = std::upper_bound(
        steps_.begin(), steps_.end(), t,
        [](double tv, const DenseStep& s) { return tv < s.t0; });
    if (it != steps_.begin()) --it;
    return *it;
  }

  std::vector<DenseStep> steps_;
};

namespace dopri5 {
// Dormand-Prince 5(4) tableau and dense-output weights.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights (error estimator).
inline constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                        e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                        e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;
}  // namespace dopri5

// Adaptive embedded RK 5(4) with PI step-size control and dense output.
inline DenseSolution integrate(const VectorField& rhs, std::vector<double> y,
                               double t0, double t1,
                               const IntegratorConfig& cfg = {}) {
  using namespace dopri5;
  if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 must be >= t0");
  if (cfg.rel_tol <= 0.0 || cfg.abs_tol <= 0.0)
    throw std::invalid_argument("integrate: tolerances must be > 0");
  const std::size_t n = y.size();
  DenseSolution sol;
  if (t1 == t0) {
    DenseStep st{t0, 0.0, y, std::vector<double>(n, 0.0),
                 std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                 std::vector<double>(n, 0.0)};
    st.h = 1.0;  // degenerate interval; eval at t0 returns y
    sol.add_step(std::move(st));
    return sol;
  }

  double t = t0;
  std::vector<double> k1 = rhs(t, y);
  double h;
  if (cfg.fixed_step > 0.0) {
    h = cfg.fixed_step;
  } else if (cfg.initial_step > 0.0) {
    h = cfg.initial_step;
  } else {
    // Crude automatic initial step from the scaled norm of the derivative.
    double d0 = 0.0, d1n = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y[j]);
      d0 = std::max(d0, std::abs(y[j]) / sc);
      d1n = std::max(d1n, std::abs(k1[j]) / sc);
    }
    h = (d1n > 1e-12) ? 0.01 * d0 / d1n : 1e-3;
    h = std::clamp(h, 1e-8, t1 - t0);
  }
  if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);

  const double h_min = 1e-13 * std::max(1.0, std::abs(t1 - t0));
  double err_old = 1e-4;
  std::vector<double> k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

  while (t < t1) {
    bool last = false;
    if (t + h >= t1) {
      h = t1 - t;
      last = true;
    }
    for (std::size_t j = 0; j < n; ++j) ytmp[j] = y[j] + h * a21 * k1[j];
    k2 = rhs(t + c2 * h, ytmp);
    for (std::size_t j = 0; j < n; ++j)
      ytmp[j] = y[j] + h * (a31 * k1[j] + a32 * k2[j]);
    k3 = rhs(t + c3 * h, ytmp);
    for (std::size_t j = 0; j < n; ++j)
      ytmp[j] = y[j] + h * (a41 * k1[j] + a42 * k2[j] + a43 * k3[j]);
    k4 = rhs(t + c4 * h, ytmp);
    for (std::size_t j = 0; j < n; ++j)
      ytmp[j] = y[j] + h * (a51 * k1[j] + a52 * k2[j] + a53 * k3[j] + a54 * k4[j]);
    k5 = rhs(t + c5 * h, ytmp);
    for (std::size_t j = 0; j < n; ++j)
      ytmp[j] = y[j] + h * (a61 * k1[j] + a62 * k2[j] + a63 * k3[j] +
                            a64 * k4[j] + a65 * k5[j]);
    k6 = rhs(t + h, ytmp);
    for (std::size_t j = 0; j < n; ++j)
      ynew[j] = y[j] + h * (b1 * k1[j] + b3 * k3[j] + b4 * k4[j] + b5 * k5[j] +
                            b6 * k6[j]);
    k7 = rhs(t + h, ynew);

    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double e = h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] +
                      e6 * k6[j] + e7 * k7[j]);
      double sc = cfg.abs_tol +
                  cfg.rel_tol * std::max(std::abs(y[j]), std::abs(ynew[j]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(n));

    bool accept = cfg.fixed_step > 0.0 || err <= 1.0;
    if (accept) {
      DenseStep st;
      st.t0 = t;
      st.h = h;
      st.c0 = y;
      st.c1.resize(n);
      st.c2.resize(n);
      st.c3.resize(n);
      st.c4.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        double dy = ynew[j] - y[j];
        double bspl = h * k1[j] - dy;
        st.c1[j] = dy;
        st.c2[j] = bspl;
        st.c3[j] = dy - h * k7[j] - bspl;
        st.c4[j] = h * (d1 * k1[j] + d3 * k3[j] + d4 * k4[j] + d5 * k5[j] +
                        d6 * k6[j] + d7 * k7[j]);
      }
      sol.add_step(std::move(st));
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      if (last) break;
    }
    if (cfg.fixed_step > 0.0) continue;

    // PI controller (orders 5/4).
    double fac = std::pow(std::max(err, 1e-10), -0.7 / 5.0) *
                 std::pow(err_old, 0.4 / 5.0);
    fac = std::clamp(0.9 * fac, 0.2, accept ? 5.0 : 1.0);
    h *= fac;
    if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);
    if (accept) err_old = std::max(err, 1e-10);
    if (h < h_min)
      throw StepSizeUnderflow("integrate: step size underflow at t = " +
                              std::to_string(t));
  }
  return sol;
}

// First down-crossing of `level` by the given component after its global
// maximum, located by bisection on the dense output to 1e-9 time accuracy.
inline std::optional<double> find_threshold_time(const DenseSolution& sol,
                                                 std::size_t comp, double level) {
  double ta = sol.t_begin(), tb = sol.t_end();
  // Sample densely enough to bracket the maximum and the crossing.
  const int grid = 4096;
  double t_peak = ta;
  double v_peak = sol.eval_component(ta, comp);
  std::vector<double> ts(grid + 1), vs(grid + 1);
  for (int j = 0; j <= grid; ++j) {
    double t = ta + (tb - ta) * j / grid;
    ts[static_cast<std::size_t>(j)] = t;
    double v = sol.eval_component(t, comp);
    vs[static_cast<std::size_t>(j)] = v;
    if (v > v_peak) {
      v_peak = v;
      t_peak = t;
    }
  }
  if (v_peak < level) return std::nullopt;
  for (int j = 0; j < grid; ++j) {
    if (ts[static_cast<std::size_t>(j + 1)] <= t_peak) continue;
    double va = vs[static_cast<std::size_t>(j)];
    double vb = vs[static_cast<std::size_t>(j + 1)];
    if (va >= level && vb < level) {
      double lo = std::max(ts[static_cast<std::size_t>(j)], t_peak);
      double hi = ts[static_cast<std::size_t>(j + 1)];
      while (hi - lo > 1e-9) {
        double mid = 0.5 * (lo + hi);
        if (sol.eval_component(mid, comp) >= level)
          lo = mid;
        else
          hi = mid;
      }
      return 0.5 * (lo + hi);
    }
  }
  return std::nullopt;
}

// Global maximum time of a component, on the dense-output grid refined by
// golden-section around the best sample.
inline double argmax_time(const DenseSolution& sol, std::size_t comp) {
  double ta = sol.t_begin(), tb = sol.t_end();
  const int grid = 4096;
  double t_best = ta, v_best = sol.eval_component(ta, comp);
  for (int j = 0; j <= grid; ++j) {
    double t = ta + (tb - ta) * j / grid;
    double v = sol.eval_component(t, comp);
    if (v > v_best) {
      v_best = v;
      t_best = t;
    }
  }
  double lo = std::max(ta, t_best - (tb - ta) / grid);
  double hi = std::min(tb, t_best + (tb - ta) / grid);
  while (hi - lo > 1e-9) {
    double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (sol.eval_component(m1, comp) < sol.eval_component(m2, comp))
      lo = m1;
    else
      hi = m2;
  }
  return 0.5 * (lo + hi);
}

}  // namespace hwsir

#endif
