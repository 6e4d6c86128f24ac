#ifndef HWSIR_STATS_HPP
#define HWSIR_STATS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hwsir {

// Asymptotic Kolmogorov distribution tail: P(K > x) = 2 sum (-1)^{k-1} e^{-2k^2x^2}.
inline double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * x * x);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

struct KsResult {
  double statistic;  // sup |F_n - F|
  double p_value;
};

// One-sample KS test against the cdf values F(x_i); cdf_at must be monotone.
template <typename Cdf>
inline KsResult ks_test_one_sample(std::vector<double> samples, Cdf cdf_at) {
  if (samples.size() < 2) throw std::invalid_argument("ks test: need >= 2 samples");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf_at(samples[i]);
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(f - lo, hi - f));
  }
  double sn = std::sqrt(n);
  double lambda = (sn + 0.12 + 0.11 / sn) * d;
  return {d, kolmogorov_tail(lambda)};
}

inline KsResult ks_test_exponential(const std::vector<double>& samples, double rate) {
  return ks_test_one_sample(samples,
                            [rate](double x) { return 1.0 - std::exp(-rate * x); });
}

inline KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw std::invalid_argument("ks test: need >= 2 samples per side");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }
  double ne = na * nb / (na + nb);
  double sn = std::sqrt(ne);
  double lambda = (sn + 0.12 + 0.11 / sn) * d;
  return {d, kolmogorov_tail(lambda)};
}

// Chi-square upper quantile via the Wilson-Hilferty cube approximation.
inline double chi_square_quantile(double p_upper, double dof) {
  // z such that P(Z > z) = p_upper, standard normal, via Acklam-style inverse.
  auto inv_norm = [](double p) {
    // p is the lower-tail probability.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
      double q = std::sqrt(-2.0 * std::log(p));
      return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
      double q = std::sqrt(-2.0 * std::log(1.0 - p));
      return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
             ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5, r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  };
  double z = inv_norm(1.0 - p_upper);
  double k = dof;
  double term = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
  return k * term * term * term;
}

}  // namespace hwsir

#endif
