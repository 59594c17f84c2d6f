#include "smve/envs/acrobot.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smve::envs {

namespace {

constexpr double kM1 = 1.0, kM2 = 1.0;
constexpr double kL1 = 1.0;
constexpr double kLc1 = 0.5, kLc2 = 0.5;
constexpr double kI1 = 1.0, kI2 = 1.0;
constexpr double kG = 9.8;
constexpr double kSubstep = 0.05;
constexpr int kSubsteps = 4;

struct Accel {
  double ddtheta1;
  double ddtheta2;
};

// Equations of motion of the cited swing-up formulation. The gravity terms use
// sin(x) in place of cos(x - pi/2) so the rest state is an exact fixed point.
Accel accelerations(const AcrobotState& s, double torque) {
  const double c2 = std::cos(s.theta2);
  const double s2 = std::sin(s.theta2);
  const double d1 = kM1 * kLc1 * kLc1 + kM2 * (kL1 * kL1 + kLc2 * kLc2 + 2.0 * kL1 * kLc2 * c2) + kI1 + kI2;
  const double d2 = kM2 * (kLc2 * kLc2 + kL1 * kLc2 * c2) + kI2;
  const double phi2 = kM2 * kLc2 * kG * std::sin(s.theta1 + s.theta2);
  const double phi1 = -kM2 * kL1 * kLc2 * s.dtheta2 * s.dtheta2 * s2 -
                      2.0 * kM2 * kL1 * kLc2 * s.dtheta2 * s.dtheta1 * s2 +
                      (kM1 * kLc1 + kM2 * kL1) * kG * std::sin(s.theta1) + phi2;
  const double dd2 = (torque + d2 / d1 * phi1 - kM2 * kL1 * kLc2 * s.dtheta1 * s.dtheta1 * s2 - phi2) /
                     (kM2 * kLc2 * kLc2 + kI2 - d2 * d2 / d1);
  const double dd1 = -(d2 * dd2 + phi1) / d1;
  return {dd1, dd2};
}

}  // namespace

double wrap_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(x + std::numbers::pi, two_pi);
  if (w < 0.0) w += two_pi;
  w -= std::numbers::pi;
  // fmod rounding can land exactly on +pi.
  if (w >= std::numbers::pi) w -= two_pi;
  return w;
}

double torque_for(Action a) {
  if (a < 0 || a >= kNumActions) throw std::invalid_argument("acrobot: action out of range");
  return static_cast<double>(a - 1);
}

AcrobotState acrobot_reset(Rng& rng) {
  AcrobotState s;
  s.theta1 = rng.uniform(-0.1, 0.1);
  s.theta2 = rng.uniform(-0.1, 0.1);
  s.dtheta1 = rng.uniform(-0.1, 0.1);
  s.dtheta2 = rng.uniform(-0.1, 0.1);
  return s;
}

bool acrobot_terminal(const AcrobotState& s) {
  return -std::cos(s.theta1) - std::cos(s.theta1 + s.theta2) > 1.0;
}

AcrobotStep acrobot_step(const AcrobotState& s, Action a) {
  const double torque = torque_for(a);
  AcrobotState next = s;
  for (int i = 0; i < kSubsteps; ++i) {
    const Accel acc = accelerations(next, torque);
    next.theta1 += kSubstep * next.dtheta1;
    next.theta2 += kSubstep * next.dtheta2;
    next.dtheta1 = std::clamp(next.dtheta1 + kSubstep * acc.ddtheta1, -kMaxVel1, kMaxVel1);
    next.dtheta2 = std::clamp(next.dtheta2 + kSubstep * acc.ddtheta2, -kMaxVel2, kMaxVel2);
  }
  next.theta1 = wrap_angle(next.theta1);
  next.theta2 = wrap_angle(next.theta2);
  return {next, -1.0, acrobot_terminal(next)};
}

Observation observe(const AcrobotState& s) {
  Observation o;
  o << std::cos(s.theta1), std::sin(s.theta1), std::cos(s.theta2), std::sin(s.theta2), s.dtheta1, s.dtheta2;
  return o;
}

AcrobotState state_from_observation(const Observation& obs) {
  AcrobotState s;
  s.theta1 = std::atan2(obs(1), obs(0));
  s.theta2 = std::atan2(obs(3), obs(2));
  s.dtheta1 = obs(4);
  s.dtheta2 = obs(5);
  return s;
}

bool observation_terminal(const Observation& obs) { return acrobot_terminal(state_from_observation(obs)); }

Observation true_next_observation(const Observation& obs, Action a) {
  return observe(acrobot_step(state_from_observation(obs), a).state);
}

double true_reward(const Observation&, Action, const Observation&) { return -1.0; }

AcrobotEnv::AcrobotEnv(int max_episode_steps) : max_episode_steps_(max_episode_steps) {
  if (max_episode_steps < 1) throw std::invalid_argument("episode cap must be positive");
}

Observation AcrobotEnv::reset(Rng& rng) {
  state_ = acrobot_reset(rng);
  steps_ = 0;
  return observe(state_);
}

AcrobotEnv::Step AcrobotEnv::step(Action a) {
  const AcrobotStep out = acrobot_step(state_, a);
  state_ = out.state;
  ++steps_;
  Step step;
  step.obs = observe(state_);
  step.reward = out.reward;
  step.terminal = out.terminal;
  step.truncated = !out.terminal && steps_ >= max_episode_steps_;
  return step;
}

}  // namespace smve::envs
