#pragma once

#include <cstdint>
#include <string_view>

namespace retnet {

// 2x2 table: first index = row event (e.g. retweeted), second = column event
// (e.g. acceptable); 1 = present, 0 = absent.
struct ContingencyTable {
  std::uint64_t n11 = 0;
  std::uint64_t n10 = 0;
  std::uint64_t n01 = 0;
  std::uint64_t n00 = 0;
};

struct OddsRatioResult {
  double log_or = 0.0;  // L
  double se = 0.0;
  double z = 0.0;
  double ci_halfwidth = 0.0;  // z * SE, on the log scale
  double odds_ratio = 0.0;    // exp(L)
  double or_lower = 0.0;      // exp(L - z SE)
  double or_upper = 0.0;      // exp(L + z SE)
};

// Two-sided standard normal quantile for a confidence level in (0, 1).
double z_for_confidence(double confidence);

// Log odds ratio with its large-sample standard error. Throws std::domain_error
// on any zero cell; no continuity correction is applied.
OddsRatioResult log_odds_ratio(const ContingencyTable& t, double confidence = 0.99);

enum class EffectMagnitude { Negligible, Small, Medium, Large };

std::string_view to_string(EffectMagnitude m);

// Rule-of-thumb bands on |h|: 0.20 small, 0.50 medium, 0.80 large.
EffectMagnitude classify_effect(double h);

struct EffectSize {
  double h = 0.0;
  EffectMagnitude magnitude = EffectMagnitude::Negligible;
};

// h = 2 asin(sqrt(p1)) - 2 asin(sqrt(p2)); positive when p1 > p2.
EffectSize cohens_h(double p1, double p2);

}  // namespace retnet
