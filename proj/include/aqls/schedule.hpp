#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "aqls/errors.hpp"

namespace aqls {

enum class ScheduleVariant { kAlg1, kAlg2, kLinearBaseline };

std::string_view to_string(ScheduleVariant v);

struct ScheduleStep {
  double v = 0;          // annealing parameter
  double s = 0;          // interpolation, in [0, 1]
  double gap_bound = 0;  // Delta*(s) = (1-s)^2 + (s/kappa)^2
  double t_max = 0;      // random-time upper bound for this step
};

/// The kappa-dependent evolution grid. Steps use right endpoints of a
/// uniform v grid, so the last step sits exactly at s = 1.
struct Schedule {
  double kappa = 1;
  int steps = 0;
  ScheduleVariant variant = ScheduleVariant::kAlg1;
  double v_a = 0;
  double v_b = 0;
  std::vector<ScheduleStep> grid;
};

/// Domain [v_a, v_b] of the natural parametrization, with s(v_a) = 0 and
/// s(v_b) = 1. Valid for kappa >= 1 (kappa = 1 gives the antisymmetric
/// bounds +-log(sqrt(2)+1)); kappa < 1 is rejected.
std::pair<double, double> schedule_bounds(double kappa);

/// The natural parametrization s(v), monotone increasing on [v_a, v_b];
/// rejects v outside the domain, clamps <=1e-12 rounding at the ends.
double s_of_v(double v, double kappa);

/// Spectral gap lower bound Delta*(s) = (1-s)^2 + (s/kappa)^2.
double gap_bound(double s, double kappa);

/// Uniform-in-v grid of `steps` right endpoints. t_max is 2*pi/Delta* for
/// kAlg1 and kLinearBaseline, 2*pi/sqrt(Delta*) for kAlg2. The linear
/// baseline sets s_j = j/steps directly (and v_j = s_j).
Schedule build_grid(double kappa, int steps, ScheduleVariant variant);

}  // namespace aqls
