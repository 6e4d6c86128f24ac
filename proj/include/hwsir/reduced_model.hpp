#ifndef HWSIR_REDUCED_MODEL_HPP
#define HWSIR_REDUCED_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwsir/size_dist.hpp"
#include "hwsir/state_indexer.hpp"
#include "hwsir/stochastic_engine.hpp"

namespace hwsir {

struct DegenerateState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReducedParams {
  double beta_G = 0.0;
  double lambda_H = 0.0;
  double lambda_W = 0.0;
  double gamma = 1.0;  // exponential recovery rate
  SizeDistribution pi_h;
  SizeDistribution pi_w;
};

struct ConstraintCheck {
  std::string name;
  bool pass;
  double violation;  // max amount by which the constraint is exceeded
};

struct VReport {
  std::vector<ConstraintCheck> checks;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Closed household-workplace SIR dynamics in the large-population limit,
// generated programmatically from the two per-layer index maps.
//
// State vector layout: [s, i, H block, W block, r]. The trailing r coordinate
// integrates gamma*i alongside and is not part of the dynamics.
class ReducedModel {
 public:
  explicit ReducedModel(ReducedParams params)
      : params_(std::move(params)),
        idx_h_(params_.pi_h.n_max()),
        idx_w_(params_.pi_w.n_max()),
        m_h_(params_.pi_h.mean()),
        m_w_(params_.pi_w.mean()) {
    if (params_.gamma <= 0.0)
      throw std::invalid_argument("ReducedParams: gamma must be > 0");
    if (params_.beta_G < 0.0 || params_.lambda_H < 0.0 || params_.lambda_W < 0.0)
      throw std::invalid_argument("ReducedParams: rates must be >= 0");
    offset_h_ = 2;
    offset_w_ = offset_h_ + idx_h_.size();
    offset_r_ = offset_w_ + idx_w_.size();
    dim_ = offset_r_ + 1;
  }

  const ReducedParams& params() const { return params_; }
  const StateIndexer& indexer(Layer l) const {
    return l == Layer::Household ? idx_h_ : idx_w_;
  }
  std::size_t dim() const { return dim_; }
  double layer_mean(Layer l) const { return l == Layer::Household ? m_h_ : m_w_; }

  double s(const std::vector<double>& y) const { return y[0]; }
  double i(const std::vector<double>& y) const { return y[1]; }
  double r(const std::vector<double>& y) const { return y[offset_r_]; }
  double n(const std::vector<double>& y, Layer l, int S, int I) const {
    return y[block_offset(l) + indexer(l).index(S, I)];
  }

  // Eq.-(4)-style initial condition: uniformly seeded fraction eps.
  std::vector<double> initial_condition(double eps) const {
    if (eps < 0.0 || eps > 1.0)
      throw std::invalid_argument("initial_condition: eps must be in [0,1]");
    std::vector<double> y(dim_, 0.0);
    y[0] = 1.0 - eps;
    y[1] = eps;
    fill_binomial_block(y, Layer::Household, eps);
    fill_binomial_block(y, Layer::Workplace, eps);
    return y;
  }

  // Structure-type histogram (single snapshot or a replicate average)
  // normalized into a reduced state.
  std::vector<double> initial_condition_from_counts(const StructureTypeCounts& c) const {
    auto weighted = [](const std::map<std::pair<int, int>, double>& m, bool infected) {
      double acc = 0.0;
      for (const auto& [pair, count] : m)
        acc += (infected ? pair.second : pair.first) * count;
      return acc;
    };
    double tol = 1e-9 * std::max(1.0, c.K);
    if (std::abs(weighted(c.households, false) - c.S_total) > tol ||
        std::abs(weighted(c.workplaces, false) - c.S_total) > tol ||
        std::abs(weighted(c.households, true) - c.I_total) > tol ||
        std::abs(weighted(c.workplaces, true) - c.I_total) > tol)
      throw std::invalid_argument(
          "initial_condition_from_counts: layer sums inconsistent with totals");
    std::vector<double> y(dim_, 0.0);
    y[0] = c.S_total / c.K;
    y[1] = c.I_total / c.K;
    y[offset_r_] = (c.K - c.S_total - c.I_total) / c.K;
    for (const auto& [pair, count] : c.households)
      if (idx_h_.contains(pair.first, pair.second))
        y[offset_h_ + idx_h_.index(pair.first, pair.second)] = count / c.K_H;
    for (const auto& [pair, count] : c.workplaces)
      if (idx_w_.contains(pair.first, pair.second))
        y[offset_w_ + idx_w_.index(pair.first, pair.second)] = count / c.K_W;
    return y;
  }

  double tau_G(const std::vector<double>& y) const { return params_.beta_G * y[1]; }

  // Per-capita within-layer infection flux (lambda_X/m_X) sum SI n^X_{S,I}.
  double tau_layer(const std::vector<double>& y, Layer l) const {
    const StateIndexer& idx = indexer(l);
    std::size_t off = block_offset(l);
    double acc = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      auto [S, I] = idx.pair(j);
      acc += static_cast<double>(S) * I * y[off + j];
    }
    double lambda = l == Layer::Household ? params_.lambda_H : params_.lambda_W;
    return lambda / layer_mean(l) * acc;
  }

  std::vector<double> rhs(const std::vector<double>& y) const {
    double sv = y[0];
    double tg = tau_G(y);
    double th = tau_layer(y, Layer::Household);
    double tw = tau_layer(y, Layer::Workplace);
    if (sv <= 0.0) {
      double max_n = 0.0;
      for (std::size_t j = offset_h_; j < offset_r_; ++j)
        max_n = std::max(max_n, y[j]);
      if (max_n > 1e-9)
        throw DegenerateState("rhs: s <= 0 with positive structure mass");
    }
    std::vector<double> dy(dim_, 0.0);
    dy[0] = -(th + tw + tg * sv);
    dy[1] = -dy[0] - params_.gamma * y[1];
    dy[offset_r_] = params_.gamma * y[1];
    block_rhs(y, dy, Layer::Household, tw, tg);
    block_rhs(y, dy, Layer::Workplace, th, tg);
    return dy;
  }

  // Residual of d/dt(m_X s - sum S n^X) against its closed form
  // gamma n^X_{1,1} - (tau_G + tau_Xbar/s) (m_X s - sum S n^X).
  double delta_identity_residual(const std::vector<double>& y, Layer l) const {
    double sv = y[0];
    if (sv <= 0.0) throw DegenerateState("delta_identity_residual: s <= 0");
    std::vector<double> dy = rhs(y);
    const StateIndexer& idx = indexer(l);
    std::size_t off = block_offset(l);
    double m = layer_mean(l);
    double delta = m * sv;
    double d_delta = m * dy[0];
    for (std::size_t j = 0; j < idx.size(); ++j) {
      auto [S, I] = idx.pair(j);
      (void)I;
      delta -= S * y[off + j];
      d_delta -= S * dy[off + j];
    }
    double tau_bar =
        tau_layer(y, l == Layer::Household ? Layer::Workplace : Layer::Household);
    double closed =
        params_.gamma * n(y, l, 1, 1) - (tau_G(y) + tau_bar / sv) * delta;
    return d_delta - closed;
  }

  VReport check_V(const std::vector<double>& y, double tol) const {
    VReport rep;
    double lo = 0.0, hi = 0.0;
    for (std::size_t j = 0; j < offset_r_; ++j) {
      lo = std::max(lo, -y[j]);
      hi = std::max(hi, y[j] - 1.0);
    }
    rep.checks.push_back({"entries >= 0", lo <= tol, lo});
    rep.checks.push_back({"entries <= 1", hi <= tol, hi});
    double si = y[0] + y[1] - 1.0;
    rep.checks.push_back({"s + i <= 1", si <= tol, si});
    for (Layer l : {Layer::Household, Layer::Workplace}) {
      const StateIndexer& idx = indexer(l);
      std::size_t off = block_offset(l);
      double sum = 0.0, sum_s = 0.0;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        sum += y[off + j];
        sum_s += idx.pair(j).first * y[off + j];
      }
      std::string tag = l == Layer::Household ? "H" : "W";
      rep.checks.push_back({"sum n^" + tag + " <= 1", sum - 1.0 <= tol, sum - 1.0});
      double slack = sum_s - layer_mean(l) * y[0];
      rep.checks.push_back(
          {"sum S n^" + tag + " <= m s", slack <= tol, slack});
    }
    return rep;
  }

  double block_sum(const std::vector<double>& y, Layer l) const {
    const StateIndexer& idx = indexer(l);
    std::size_t off = block_offset(l);
    double acc = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j) acc += y[off + j];
    return acc;
  }

  std::size_t block_offset(Layer l) const {
    return l == Layer::Household ? offset_h_ : offset_w_;
  }

 private:
  void fill_binomial_block(std::vector<double>& y, Layer l, double eps) const {
    const SizeDistribution& pi = l == Layer::Household ? params_.pi_h : params_.pi_w;
    const StateIndexer& idx = indexer(l);
    std::size_t off = block_offset(l);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      auto [S, I] = idx.pair(j);
      int nn = S + I;
      y[off + j] = binom_(nn, I) * pi.prob(nn) * std::pow(1.0 - eps, S) *
                   std::pow(eps, I);
    }
  }

  void block_rhs(const std::vector<double>& y, std::vector<double>& dy, Layer l,
                 double tau_bar, double tg) const {
    const StateIndexer& idx = indexer(l);
    std::size_t off = block_offset(l);
    double lambda = l == Layer::Household ? params_.lambda_H : params_.lambda_W;
    double gamma = params_.gamma;
    double sv = y[0];
    double m = layer_mean(l);
    int n_max = idx.n_max();
    // Ratio-safe cross-layer flux: S n / s is bounded by m_X inside V; the
    // clamp only acts on states outside V and the flux vanishes as s -> 0.
    auto cross = [&](double S_count, double n_val) {
      if (sv <= 1e-12) return 0.0;
      return tau_bar * std::clamp(S_count * n_val / sv, 0.0, m);
    };
    for (std::size_t j = 0; j < idx.size(); ++j) {
      auto [S, I] = idx.pair(j);
      double n_val = y[off + j];
      double out = lambda * S * I * n_val + cross(S, n_val) + tg * S * n_val +
                   gamma * I * n_val;
      double in = 0.0;
      if (S + I < n_max) in += gamma * (I + 1) * y[off + idx.index(S, I + 1)];
      if (I >= 1) {
        double src = y[off + idx.index(S + 1, I - 1)];
        in += lambda * (S + 1) * (I - 1) * src + cross(S + 1, src) +
              tg * (S + 1) * src;
      }
      dy[off + j] = in - out;
    }
  }

  static double binom_(int n, int k) {
    double acc = 1.0;
    for (int j = 1; j <= k; ++j)
      acc = acc * static_cast<double>(n - k + j) / static_cast<double>(j);
    return acc;
  }

  ReducedParams params_;
  StateIndexer idx_h_, idx_w_;
  double m_h_, m_w_;
  std::size_t offset_h_ = 0, offset_w_ = 0, offset_r_ = 0, dim_ = 0;
};

}  // namespace hwsir

#endif
