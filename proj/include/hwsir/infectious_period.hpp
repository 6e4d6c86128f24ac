#ifndef HWSIR_INFECTIOUS_PERIOD_HPP
#define HWSIR_INFECTIOUS_PERIOD_HPP

#include <stdexcept>
#include <vector>

#include "hwsir/rng.hpp"

namespace hwsir {

// Law of infectious-period durations. Exponential(gamma) is the Markovian
// case required by the reduced model; Fixed(c) is an engine-level extension
// used for exact-recovery audits.
class InfectiousPeriodLaw {
 public:
  enum class Kind { Exponential, Fixed, Gamma, Empirical };

  static InfectiousPeriodLaw exponential(double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("exponential law: gamma must be > 0");
    InfectiousPeriodLaw l;
    l.kind_ = Kind::Exponential;
    l.a_ = gamma;
    return l;
  }
  static InfectiousPeriodLaw fixed(double c) {
    if (c <= 0.0) throw std::invalid_argument("fixed law: duration must be > 0");
    InfectiousPeriodLaw l;
    l.kind_ = Kind::Fixed;
    l.a_ = c;
    return l;
  }
  static InfectiousPeriodLaw gamma(double shape, double scale) {
    if (shape <= 0.0 || scale <= 0.0)
      throw std::invalid_argument("gamma law: shape and scale must be > 0");
    InfectiousPeriodLaw l;
    l.kind_ = Kind::Gamma;
    l.a_ = shape;
    l.b_ = scale;
    return l;
  }
  static InfectiousPeriodLaw empirical(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("empirical law: no samples");
    for (double s : samples)
      if (s <= 0.0) throw std::invalid_argument("empirical law: durations must be > 0");
    InfectiousPeriodLaw l;
    l.kind_ = Kind::Empirical;
    l.samples_ = std::move(samples);
    return l;
  }

  Kind kind() const { return kind_; }
  bool is_exponential() const { return kind_ == Kind::Exponential; }

  // Recovery rate of the Markovian case; only meaningful for Exponential.
  double rate() const { return a_; }
  double fixed_duration() const { return a_; }

  double sample(RandomStream& rng) const {
    switch (kind_) {
      case Kind::Exponential:
        return std::exponential_distribution<double>(a_)(rng);
      case Kind::Fixed:
        return a_;
      case Kind::Gamma:
        return std::gamma_distribution<double>(a_, b_)(rng);
      case Kind::Empirical: {
        std::size_t i =
            std::uniform_int_distribution<std::size_t>(0, samples_.size() - 1)(rng);
        return samples_[i];
      }
    }
    return a_;
  }

  double mean() const {
    switch (kind_) {
      case Kind::Exponential:
        return 1.0 / a_;
      case Kind::Fixed:
        return a_;
      case Kind::Gamma:
        return a_ * b_;
      case Kind::Empirical: {
        double m = 0.0;
        for (double s : samples_) m += s;
        return m / static_cast<double>(samples_.size());
      }
    }
    return a_;
  }

 private:
  Kind kind_ = Kind::Exponential;
  double a_ = 1.0;
  double b_ = 1.0;
  std::vector<double> samples_;
};

}  // namespace hwsir

#endif
