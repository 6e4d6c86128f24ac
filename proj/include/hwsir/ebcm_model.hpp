#ifndef HWSIR_EBCM_MODEL_HPP
#define HWSIR_EBCM_MODEL_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwsir/reduced_model.hpp"
#include "hwsir/size_dist.hpp"

namespace hwsir {

// Enumeration of (S,I,R) triples with S+I+R = n for n in 1..n_max, size-major,
// then I, then R.
class TripleIndexer {
 public:
  explicit TripleIndexer(int n_max) : n_max_(n_max), offset_(n_max + 1, 0) {
    if (n_max < 1) throw std::invalid_argument("TripleIndexer: n_max must be >= 1");
    std::size_t pos = 0;
    for (int n = 1; n <= n_max; ++n) {
      offset_[static_cast<std::size_t>(n)] = pos;
      for (int I = 0; I <= n; ++I)
        for (int R = 0; R <= n - I; ++R) {
          triples_.push_back({n - I - R, I, R});
          ++pos;
        }
    }
  }

  int n_max() const { return n_max_; }
  std::size_t size() const { return triples_.size(); }  // sum_n (n+1)(n+2)/2

  std::size_t index(int S, int I, int R) const {
    int n = S + I + R;
    // Within size block n: I-major, then R.
    std::size_t local = 0;
    for (int j = 0; j < I; ++j) local += static_cast<std::size_t>(n - j + 1);
    local += static_cast<std::size_t>(R);
    return offset_[static_cast<std::size_t>(n)] + local;
  }

  std::array<int, 3> triple(std::size_t idx) const { return triples_[idx]; }

 private:
  int n_max_;
  std::vector<std::size_t> offset_;
  std::vector<std::array<int, 3>> triples_;  // {S, I, R}
};

// Edge-based compartmental model for the household-workplace graph seen as a
// two-layer clique configuration model.
//
// State layout: [i, theta_G, theta_H_1..theta_H_nmaxH, theta_W_1.., H triples,
// W triples].
class EbcmModel {
 public:
  explicit EbcmModel(ReducedParams params)
      : params_(std::move(params)),
        pi_hat_h_(params_.pi_h.size_biased()),
        pi_hat_w_(params_.pi_w.size_biased()),
        trip_h_(params_.pi_h.n_max()),
        trip_w_(params_.pi_w.n_max()) {
    off_theta_h_ = 2;
    off_theta_w_ = off_theta_h_ + static_cast<std::size_t>(trip_h_.n_max());
    off_trip_h_ = off_theta_w_ + static_cast<std::size_t>(trip_w_.n_max());
    off_trip_w_ = off_trip_h_ + trip_h_.size();
    dim_ = off_trip_w_ + trip_w_.size();
  }

  const ReducedParams& params() const { return params_; }
  std::size_t dim() const { return dim_; }
  const TripleIndexer& triples(Layer l) const {
    return l == Layer::Household ? trip_h_ : trip_w_;
  }
  const SizeDistribution& size_biased(Layer l) const {
    return l == Layer::Household ? pi_hat_h_ : pi_hat_w_;
  }

  double i(const std::vector<double>& y) const { return y[0]; }
  double theta_G(const std::vector<double>& y) const { return y[1]; }
  double theta(const std::vector<double>& y, Layer l, int n) const {
    return y[theta_offset(l) + static_cast<std::size_t>(n - 1)];
  }
  double n_triple(const std::vector<double>& y, Layer l, int S, int I, int R) const {
    return y[triple_offset(l) + triples(l).index(S, I, R)];
  }

  // Small-eps initial condition, implemented exactly as stated (including the
  // 1/n factor on the all-susceptible block and no binomial coefficient on
  // the seeded blocks).
  std::vector<double> initial_condition(double eps, bool* warned = nullptr) const {
    if (eps < 0.0 || eps > 1.0)
      throw std::invalid_argument("ebcm initial_condition: eps must be in [0,1]");
    if (warned) *warned = eps > 0.01;
    std::vector<double> y(dim_, 0.0);
    y[0] = eps;
    y[1] = 1.0 - eps;
    for (Layer l : {Layer::Household, Layer::Workplace}) {
      const TripleIndexer& trip = triples(l);
      const SizeDistribution& pi_hat = size_biased(l);
      for (int n = 1; n <= trip.n_max(); ++n) {
        y[theta_offset(l) + static_cast<std::size_t>(n - 1)] = 1.0 - eps;
        y[triple_offset(l) + trip.index(n, 0, 0)] =
            pi_hat.prob(n) / n * std::pow(1.0 - eps, n);
        for (int I = 1; I <= n - 1; ++I)
          y[triple_offset(l) + trip.index(n - I, I, 0)] =
              pi_hat.prob(n) * std::pow(1.0 - eps, n - I) * std::pow(eps, I);
      }
    }
    return y;
  }

  // s = theta_G * prod_X sum_n pihat_n theta^X_n.
  double recover_s(const std::vector<double>& y) const {
    return theta_G(y) * theta_sum(y, Layer::Household) *
           theta_sum(y, Layer::Workplace);
  }

  double theta_sum(const std::vector<double>& y, Layer l) const {
    const SizeDistribution& pi_hat = size_biased(l);
    double acc = 0.0;
    for (int n = 1; n <= triples(l).n_max(); ++n)
      acc += pi_hat.prob(n) * theta(y, l, n);
    return acc;
  }

  std::vector<double> rhs(const std::vector<double>& y) const {
    std::vector<double> dy(dim_, 0.0);
    double iv = y[0];
    double tg = y[1];
    double gamma = params_.gamma;

    // Per-size within-structure pair pressure T^X_n = lambda_X sum SI n_(S,I,R).
    std::array<std::vector<double>, 2> T;
    std::array<double, 2> T_sum{0.0, 0.0};
    std::array<double, 2> sums;
    for (Layer l : {Layer::Household, Layer::Workplace}) {
      std::size_t li = layer_idx(l);
      const TripleIndexer& trip = triples(l);
      double lambda = l == Layer::Household ? params_.lambda_H : params_.lambda_W;
      T[li].assign(static_cast<std::size_t>(trip.n_max()) + 1, 0.0);
      for (std::size_t j = 0; j < trip.size(); ++j) {
        auto [S, I, R] = trip.triple(j);
        if (S == 0 || I == 0) continue;
        T[li][static_cast<std::size_t>(S + I + R)] +=
            lambda * S * I * y[triple_offset(l) + j];
      }
      for (double v : T[li]) T_sum[li] += v;
      sums[li] = theta_sum(y, l);
    }

    dy[1] = -params_.beta_G * iv * tg;

    // Per-susceptible infection pressure from outside the structure: the
    // global one-to-all rate plus the average cross-layer rate. The total
    // cross-layer infection flux hits susceptibles only, hence the 1/s.
    double sv = recover_s(y);
    for (Layer l : {Layer::Household, Layer::Workplace}) {
      std::size_t li = layer_idx(l);
      std::size_t lo = 1 - li;
      const TripleIndexer& trip = triples(l);
      const SizeDistribution& pi_hat = size_biased(l);
      double lambda = l == Layer::Household ? params_.lambda_H : params_.lambda_W;
      double outside_pressure =
          params_.beta_G * iv + (sv > 1e-12 ? T_sum[lo] / sv : 0.0);
      for (int n = 2; n <= trip.n_max(); ++n) {
        double th_n = theta(y, l, n);
        double m_n = tg * pi_hat.prob(n) * th_n * sums[lo];
        bool degenerate = m_n < 1e-14;  // block carries no susceptibles
        double within_pressure =
            degenerate ? 0.0 : T[li][static_cast<std::size_t>(n)] / m_n;
        dy[theta_offset(l) + static_cast<std::size_t>(n - 1)] =
            -within_pressure * th_n;
        for (int I = 0; I <= n; ++I)
          for (int R = 0; R <= n - I; ++R) {
            int S = n - I - R;
            if (S < 1) continue;
            std::size_t j = triple_offset(l) + trip.index(S, I, R);
            double out = (lambda * S * I + outside_pressure * S + gamma * I) *
                         y[j];
            double in = 0.0;
            if (R >= 1)
              in += gamma * (I + 1) *
                    y[triple_offset(l) + trip.index(S, I + 1, R - 1)];
            if (I >= 1)
              in += (lambda * (S + 1) * (I - 1) + outside_pressure * (S + 1)) *
                    y[triple_offset(l) + trip.index(S + 1, I - 1, R)];
            dy[j] = in - out;
          }
      }
    }

    // i' = -s' - gamma i, with s' from the product rule on recover_s.
    double ds = dy[1] * sums[0] * sums[1];
    for (Layer l : {Layer::Household, Layer::Workplace}) {
      std::size_t li = layer_idx(l);
      std::size_t lo = 1 - li;
      const SizeDistribution& pi_hat = size_biased(l);
      double dsum = 0.0;
      for (int n = 1; n <= triples(l).n_max(); ++n)
        dsum += pi_hat.prob(n) * dy[theta_offset(l) + static_cast<std::size_t>(n - 1)];
      ds += tg * dsum * sums[lo];
    }
    dy[0] = -ds - gamma * iv;
    return dy;
  }

  std::size_t theta_offset(Layer l) const {
    return l == Layer::Household ? off_theta_h_ : off_theta_w_;
  }
  std::size_t triple_offset(Layer l) const {
    return l == Layer::Household ? off_trip_h_ : off_trip_w_;
  }

 private:
  static std::size_t layer_idx(Layer l) { return l == Layer::Household ? 0 : 1; }

  ReducedParams params_;
  SizeDistribution pi_hat_h_, pi_hat_w_;
  TripleIndexer trip_h_, trip_w_;
  std::size_t off_theta_h_ = 0, off_theta_w_ = 0, off_trip_h_ = 0, off_trip_w_ = 0;
  std::size_t dim_ = 0;
};

}  // namespace hwsir

#endif
