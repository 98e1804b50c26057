#include "retnet/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace retnet {

double z_for_confidence(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must be in (0, 1)");
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 0.5 + confidence / 2.0);
}

OddsRatioResult log_odds_ratio(const ContingencyTable& t, double confidence) {
  if (t.n11 == 0 || t.n10 == 0 || t.n01 == 0 || t.n00 == 0) {
    throw std::domain_error("odds ratio undefined with a zero cell; apply continuity correction upstream or report undefined");
  }
  const auto n11 = static_cast<double>(t.n11);
  const auto n10 = static_cast<double>(t.n10);
  const auto n01 = static_cast<double>(t.n01);
  const auto n00 = static_cast<double>(t.n00);

  OddsRatioResult r;
  r.log_or = std::log(n11) + std::log(n00) - std::log(n10) - std::log(n01);
  r.se = std::sqrt(1.0 / n11 + 1.0 / n00 + 1.0 / n10 + 1.0 / n01);
  r.z = z_for_confidence(confidence);
  r.ci_halfwidth = r.z * r.se;
  r.odds_ratio = std::exp(r.log_or);
  r.or_lower = std::exp(r.log_or - r.ci_halfwidth);
  r.or_upper = std::exp(r.log_or + r.ci_halfwidth);
  return r;
}

std::string_view to_string(EffectMagnitude m) {
  switch (m) {
    case EffectMagnitude::Negligible: return "negligible";
    case EffectMagnitude::Small: return "small";
    case EffectMagnitude::Medium: return "medium";
    case EffectMagnitude::Large: return "large";
  }
  return "negligible";
}

EffectMagnitude classify_effect(double h) {
  const double a = std::abs(h);
  if (a >= 0.80) return EffectMagnitude::Large;
  if (a >= 0.50) return EffectMagnitude::Medium;
  if (a >= 0.20) return EffectMagnitude::Small;
  return EffectMagnitude::Negligible;
}

EffectSize cohens_h(double p1, double p2) {
  if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
    throw std::invalid_argument("proportions must lie in [0, 1]");
  }
  EffectSize e;
  e.h = 2.0 * std::asin(std::sqrt(p1)) - 2.0 * std::asin(std::sqrt(p2));
  e.magnitude = classify_effect(e.h);
  return e;
}

}  // namespace retnet
