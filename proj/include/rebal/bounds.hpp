#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rebal {

// Target regret functions U(delta, S). Polylog factors are folded into `scale`.
enum class BoundForm {
  kSqrtHalfTLog,  // scale * sqrt((t/2) log(1/delta))
  kSqrtKT,        // scale * sqrt(K t log(1/delta))
  kPowerLaw,      // scale * t^exponent
  kOfulLogdet,    // scale * (logdet + log(1/delta)) * sqrt(t), logdet = log det V_t
  kConstantZero,
};

struct RegretBoundSpec {
  BoundForm form = BoundForm::kPowerLaw;
  double delta = 0.1;
  double scale = 1.0;
  double exponent = 0.5;
  int num_arms = 1;

  bool operator==(const RegretBoundSpec&) const = default;

  static RegretBoundSpec sqrt_half_t_log(double delta) {
    return {BoundForm::kSqrtHalfTLog, delta, 1.0, 0.5, 1};
  }
  static RegretBoundSpec power_law(double exponent, double scale) {
    return {BoundForm::kPowerLaw, 0.1, scale, exponent, 1};
  }
  static RegretBoundSpec zero() { return {BoundForm::kConstantZero, 0.1, 0.0, 0.0, 1}; }
};

// What a bound may look at from a base's history.
struct HistorySummary {
  long rounds = 0;
  std::optional<double> logdet;

  bool operator==(const HistorySummary&) const = default;
};

// Throws std::invalid_argument on out-of-range parameters.
void validate(const RegretBoundSpec& spec);

double eval_bound(const RegretBoundSpec& spec, const HistorySummary& history);

std::string_view to_string(BoundForm form);
BoundForm parse_bound_form(std::string_view name);

}  // namespace rebal
