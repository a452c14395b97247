#include "aqls/schedule.hpp"

#include <cmath>
#include <string>
#include <tuple>

namespace aqls {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_kappa(double kappa) {
  if (!(kappa >= 1.0)) {
    throw Error("schedule requires kappa >= 1, got " + std::to_string(kappa));
  }
}

double c_of(double kappa) {
  return std::sqrt(1.0 + kappa * kappa) / (std::sqrt(2.0) * kappa);
}

}  // namespace

std::string_view to_string(ScheduleVariant v) {
  switch (v) {
    case ScheduleVariant::kAlg1:
      return "alg1";
    case ScheduleVariant::kAlg2:
      return "alg2";
    case ScheduleVariant::kLinearBaseline:
      return "linear";
  }
  throw Error("unknown schedule variant");
}

std::pair<double, double> schedule_bounds(double kappa) {
  require_kappa(kappa);
  const double c = c_of(kappa);
  const double root = std::sqrt(1.0 + kappa * kappa);
  // v_a in the text form log(kappa*sqrt(1+kappa^2) - kappa^2) cancels
  // catastrophically for large kappa; kappa/(sqrt(1+kappa^2)+kappa) is the
  // same value without the subtraction.
  const double v_a = std::log(kappa / (root + kappa)) / c;
  const double v_b = std::log(root + 1.0) / c;
  return {v_a, v_b};
}

double s_of_v(double v, double kappa) {
  require_kappa(kappa);
  const auto [v_a, v_b] = schedule_bounds(kappa);
  const double slack = 1e-12 * std::max({1.0, std::abs(v_a), std::abs(v_b)});
  if (v < v_a - slack || v > v_b + slack) {
    throw Error("v = " + std::to_string(v) + " outside schedule domain [" +
                std::to_string(v_a) + ", " + std::to_string(v_b) + "]");
  }
  const double c = c_of(kappa);
  const double k2 = kappa * kappa;
  const double s =
      (std::exp(v * c) + 2.0 * k2 - k2 * std::exp(-v * c)) / (2.0 * (1.0 + k2));
  return std::min(1.0, std::max(0.0, s));
}

double gap_bound(double s, double kappa) {
  return (1.0 - s) * (1.0 - s) + (s / kappa) * (s / kappa);
}

Schedule build_grid(double kappa, int steps, ScheduleVariant variant) {
  require_kappa(kappa);
  if (steps < 1) {
    throw Error("schedule needs at least one step, got " +
                std::to_string(steps));
  }
  Schedule sched;
  sched.kappa = kappa;
  sched.steps = steps;
  sched.variant = variant;
  if (variant == ScheduleVariant::kLinearBaseline) {
    sched.v_a = 0.0;
    sched.v_b = 1.0;
  } else {
    std::tie(sched.v_a, sched.v_b) = schedule_bounds(kappa);
  }
  sched.grid.reserve(static_cast<std::size_t>(steps));
  const double h = (sched.v_b - sched.v_a) / steps;
  for (int j = 1; j <= steps; ++j) {
    ScheduleStep step;
    if (variant == ScheduleVariant::kLinearBaseline) {
      step.s = static_cast<double>(j) / steps;
      step.v = step.s;
    } else if (j == steps) {
      // Pin the endpoint: s(v_b) = 1 exactly, free of rounding.
      step.v = sched.v_b;
      step.s = 1.0;
    } else {
      step.v = sched.v_a + j * h;
      step.s = s_of_v(step.v, kappa);
    }
    step.gap_bound = gap_bound(step.s, kappa);
    step.t_max = variant == ScheduleVariant::kAlg2
                     ? 2.0 * kPi / std::sqrt(step.gap_bound)
                     : 2.0 * kPi / step.gap_bound;
    sched.grid.push_back(step);
  }
  return sched;
}

}  // namespace aqls
