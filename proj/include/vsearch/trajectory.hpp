#pragma once

// Quintic point-to-point trajectories that stop at the goal, with a duration search that keeps
// speed and acceleration inside the vehicle limits.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <algorithm>

#include "vsearch/geometry.hpp"

namespace vsearch {

struct AgentState {
  Vec2 position{};
  Vec2 velocity{};
  Vec2 acceleration{};
};

struct KinoLimits {
  double v_max{2.0};
  double a_max{2.0};

  void validate() const {
    if (!(v_max > 0.0) || !(a_max > 0.0) || !std::isfinite(v_max) || !std::isfinite(a_max))
      throw std::invalid_argument("KinoLimits: v_max and a_max must be positive");
  }
};

/// Position, velocity and acceleration at one instant.
struct TrajectorySample {
  Vec2 position;
  Vec2 velocity;
  Vec2 acceleration;
};

/// J(t) = sum_k c_k t^k per axis on local time t in [0, duration].
struct QuinticTrajectory {
  std::array<double, 6> coeffs_x{};
  std::array<double, 6> coeffs_y{};
  double duration{1.0};

  Vec2 start() const { return Vec2{coeffs_x[0], coeffs_y[0]}; }
};

class InfeasibleTrajectory : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::array<double, 3> eval_axis(const std::array<double, 6>& c, double t) {
  const double p = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
  const double v = c[1] + t * (2 * c[2] + t * (3 * c[3] + t * (4 * c[4] + t * 5 * c[5])));
  const double a = 2 * c[2] + t * (6 * c[3] + t * (12 * c[4] + t * 20 * c[5]));
  return {p, v, a};
}

// Unique quintic with p(0)=p0, p'(0)=v0, p''(0)=a0, p(T)=p1, p'(T)=0, p''(T)=0.
inline std::array<double, 6> solve_axis(double p0, double v0, double a0, double p1, double T) {
  const double T2 = T * T;
  const double T3 = T2 * T;
  const double h = p1 - p0 - v0 * T - 0.5 * a0 * T2;  // position residual after the free part
  const double dv = -v0 - a0 * T;                      // velocity residual
  const double da = -a0;                               // acceleration residual
  return {p0,
          v0,
          0.5 * a0,
          (10.0 * h - 4.0 * dv * T + 0.5 * da * T2) / T3,
          (-15.0 * h + 7.0 * dv * T - da * T2) / (T3 * T),
          (6.0 * h - 3.0 * dv * T + 0.5 * da * T2) / (T3 * T2)};
}

}  // namespace detail

inline QuinticTrajectory solve_quintic(const AgentState& start, const Vec2& goal, double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw std::invalid_argument("solve_quintic: duration must be > 0");
  if (!is_finite(start.position) || !is_finite(start.velocity) || !is_finite(start.acceleration) || !is_finite(goal))
    throw std::invalid_argument("solve_quintic: non-finite boundary condition");
  QuinticTrajectory traj;
  traj.duration = duration;
  traj.coeffs_x = detail::solve_axis(start.position.x, start.velocity.x, start.acceleration.x, goal.x, duration);
  traj.coeffs_y = detail::solve_axis(start.position.y, start.velocity.y, start.acceleration.y, goal.y, duration);
  return traj;
}

inline TrajectorySample eval(const QuinticTrajectory& traj, double t) {
  if (!(t >= 0.0 && t <= traj.duration)) throw std::out_of_range("eval: t outside [0, duration]");
  const auto x = detail::eval_axis(traj.coeffs_x, t);
  const auto y = detail::eval_axis(traj.coeffs_y, t);
  return {Vec2{x[0], y[0]}, Vec2{x[1], y[1]}, Vec2{x[2], y[2]}};
}

inline AgentState end_state(const QuinticTrajectory& traj) {
  const auto s = eval(traj, traj.duration);
  return AgentState{s.position, s.velocity, s.acceleration};
}

/// Integral of |J''(t)|^2 over [0, duration], exact from the coefficients.
inline double trajectory_energy(const QuinticTrajectory& traj) {
  auto axis = [T = traj.duration](const std::array<double, 6>& c) {
    // J'' = sum_{i=0..3} b_i t^i
    const std::array<double, 4> b{2 * c[2], 6 * c[3], 12 * c[4], 20 * c[5]};
    double sum = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) sum += b[i] * b[j] * std::pow(T, i + j + 1) / (i + j + 1);
    return sum;
  };
  return axis(traj.coeffs_x) + axis(traj.coeffs_y);
}

/// Integral of speed by composite Simpson's rule over `intervals` (even) subintervals.
inline double arc_length(const QuinticTrajectory& traj, int intervals = 1000) {
  if (intervals < 2) intervals = 2;
  if (intervals % 2) ++intervals;
  const double h = traj.duration / intervals;
  double sum = 0.0;
  for (int k = 0; k <= intervals; ++k) {
    const double t = k == intervals ? traj.duration : k * h;
    const double speed = norm(eval(traj, t).velocity);
    const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    sum += w * speed;
  }
  return sum * h / 3.0;
}

inline constexpr int kFeasibilitySamples = 101;
inline constexpr int kMaxDurationSteps = 40;
inline constexpr double kDurationGrowth = 1.2;

/// Largest sampled speed and acceleration magnitude over `samples` uniform instants.
inline std::pair<double, double> sampled_peaks(const QuinticTrajectory& traj, int samples = kFeasibilitySamples) {
  double vmax = 0.0, amax = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = k == samples - 1 ? traj.duration : traj.duration * k / (samples - 1);
    const auto s = eval(traj, t);
    vmax = std::max(vmax, norm(s.velocity));
    amax = std::max(amax, norm(s.acceleration));
  }
  return {vmax, amax};
}

inline bool satisfies_limits(const QuinticTrajectory& traj, const KinoLimits& limits, int samples = kFeasibilitySamples) {
  const auto [v, a] = sampled_peaks(traj, samples);
  return v <= limits.v_max && a <= limits.a_max;
}

/// First duration on the ladder min_duration * 1.2^k (k <= 40) whose stopping quintic respects
/// the limits at 101 samples.
inline QuinticTrajectory generate_feasible(const AgentState& start, const Vec2& goal, double min_duration,
                                           const KinoLimits& limits) {
  if (!(min_duration > 0.0) || !std::isfinite(min_duration))
    throw std::invalid_argument("generate_feasible: min_duration must be > 0");
  limits.validate();
  for (int k = 0; k <= kMaxDurationSteps; ++k) {
    QuinticTrajectory traj = solve_quintic(start, goal, min_duration * std::pow(kDurationGrowth, k));
    if (satisfies_limits(traj, limits)) return traj;
  }
  throw InfeasibleTrajectory("generate_feasible: no feasible duration up to " +
                             std::to_string(min_duration * std::pow(kDurationGrowth, kMaxDurationSteps)) + " s");
}

}  // namespace vsearch
