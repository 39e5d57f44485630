#include "rebal/bounds.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace rebal {

namespace {

constexpr std::array<std::pair<BoundForm, std::string_view>, 5> kFormNames{{
    {BoundForm::kSqrtHalfTLog, "sqrt_half_t_log"},
    {BoundForm::kSqrtKT, "sqrt_kt"},
    {BoundForm::kPowerLaw, "power_law"},
    {BoundForm::kOfulLogdet, "oful_logdet"},
    {BoundForm::kConstantZero, "constant_zero"},
}};

}  // namespace

std::string_view to_string(BoundForm form) {
  for (const auto& [f, name] : kFormNames) {
    if (f == form) return name;
  }
  return "unknown";
}

BoundForm parse_bound_form(std::string_view name) {
  for (const auto& [f, n] : kFormNames) {
    if (n == name) return f;
  }
  throw std::invalid_argument("unknown bound form '" + std::string(name) + "'");
}

void validate(const RegretBoundSpec& spec) {
  if (spec.form == BoundForm::kConstantZero) return;
  if (!(spec.scale >= 0.0) || !std::isfinite(spec.scale)) {
    throw std::invalid_argument("bound: scale must be a finite value >= 0");
  }
  switch (spec.form) {
    case BoundForm::kSqrtHalfTLog:
    case BoundForm::kOfulLogdet:
      if (!(spec.delta > 0.0 && spec.delta < 1.0)) {
        throw std::invalid_argument("bound: delta must lie in (0, 1)");
      }
      break;
    case BoundForm::kSqrtKT:
      if (!(spec.delta > 0.0 && spec.delta < 1.0)) {
        throw std::invalid_argument("bound: delta must lie in (0, 1)");
      }
      if (spec.num_arms < 1) throw std::invalid_argument("bound: num_arms must be >= 1");
      break;
    case BoundForm::kPowerLaw:
      if (!(spec.exponent >= 0.0) || !std::isfinite(spec.exponent)) {
        throw std::invalid_argument("bound: exponent must be a finite value >= 0");
      }
      break;
    case BoundForm::kConstantZero:
      break;
  }
}

double eval_bound(const RegretBoundSpec& spec, const HistorySummary& history) {
  if (history.rounds < 0) throw std::invalid_argument("eval_bound: negative round count");
  if (spec.form == BoundForm::kOfulLogdet && !history.logdet) {
    throw std::invalid_argument("eval_bound: oful_logdet form needs a logdet");
  }
  if (history.rounds == 0) return 0.0;
  const double t = static_cast<double>(history.rounds);
  switch (spec.form) {
    case BoundForm::kSqrtHalfTLog:
      return spec.scale * std::sqrt(0.5 * t * std::log(1.0 / spec.delta));
    case BoundForm::kSqrtKT:
      return spec.scale * std::sqrt(spec.num_arms * t * std::log(1.0 / spec.delta));
    case BoundForm::kPowerLaw:
      return spec.scale * std::pow(t, spec.exponent);
    case BoundForm::kOfulLogdet:
      return spec.scale * std::max(0.0, *history.logdet + std::log(1.0 / spec.delta)) *
             std::sqrt(t);
    case BoundForm::kConstantZero:
      return 0.0;
  }
  return 0.0;
}

}  // namespace rebal
