#pragma once

#include "dropwarp/core_types.hpp"
#include "dropwarp/metric.hpp"

#include <cmath>

namespace dropwarp {

/// Metric settings derived from a single indifference delay `tau` (days) and
/// the largest time distance worth considering, `t_max`.
struct ParamSuggestion {
  double time_weight = 1.0;
  double event_weight = 1.0;
  double drop_cost = 1.0;
  double tau = 1.0;
  double t_max = 1.0;

  DropDtwParams metric() const {
    DropDtwParams p;
    p.weights = {event_weight, time_weight};
    p.drop_cost = drop_cost;
    p.max_gap = tau;
    return p;
  }
};

// Within [t - tau, t + tau] a type mismatch must outweigh the time gap, hence
// event_weight = tau^2 * time_weight; the drop cost is (tau + t_max) / tau^2 + 1.
inline ParamSuggestion suggest_parameters(double tau, double t_max) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau must be positive and finite");
  if (!(t_max >= tau) || !std::isfinite(t_max)) throw ValidationError("t_max must be finite and >= tau");
  ParamSuggestion s;
  s.time_weight = 1.0;
  s.event_weight = tau * tau;
  s.drop_cost = (tau + t_max) / (tau * tau) + 1.0;
  s.tau = tau;
  s.t_max = t_max;
  return s;
}

} // namespace dropwarp
