#pragma once

#include <numbers>

#include <Eigen/Dense>

#include "smve/rng.hpp"

namespace smve::envs {

/// Two-link underactuated pendulum. Angles are 0 when hanging straight down.
struct AcrobotState {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double dtheta1 = 0.0;
  double dtheta2 = 0.0;
};

/// (cos t1, sin t1, cos t2, sin t2, dt1, dt2)
using Observation = Eigen::Matrix<double, 1, 6>;
/// 0, 1, 2 apply torque -1, 0, +1 on the second joint.
using Action = int;

inline constexpr int kNumActions = 3;
inline constexpr int kObservationSize = 6;
inline constexpr double kMaxVel1 = 4.0 * std::numbers::pi;
inline constexpr double kMaxVel2 = 9.0 * std::numbers::pi;
inline constexpr int kDefaultEpisodeCap = 1000;

struct AcrobotStep {
  AcrobotState state;
  double reward = -1.0;
  bool terminal = false;
};

/// Each component uniform in [-0.1, 0.1].
AcrobotState acrobot_reset(Rng& rng);
/// One 0.2 s control interval: four explicit Euler substeps of 0.05 s.
AcrobotStep acrobot_step(const AcrobotState& s, Action a);
/// Tip above the bar: -cos(t1) - cos(t1 + t2) > 1.
bool acrobot_terminal(const AcrobotState& s);
double torque_for(Action a);
/// Wraps into [-pi, pi).
double wrap_angle(double x);

Observation observe(const AcrobotState& s);
/// Recovers angles with atan2; velocities are copied through unchanged.
AcrobotState state_from_observation(const Observation& obs);
/// Terminal predicate evaluated on a (possibly model-predicted) observation.
bool observation_terminal(const Observation& obs);
/// One real control step starting from an observation.
Observation true_next_observation(const Observation& obs, Action a);

/// The reward is known to the agent: -1 on every transition.
double true_reward(const Observation& s, Action a, const Observation& s_next);

/// Episodic wrapper adding the time limit.
class AcrobotEnv {
 public:
  struct Step {
    Observation obs;
    double reward = -1.0;
    bool terminal = false;
    bool truncated = false;
  };

  explicit AcrobotEnv(int max_episode_steps = kDefaultEpisodeCap);

  Observation reset(Rng& rng);
  Step step(Action a);

  const AcrobotState& state() const { return state_; }
  int episode_steps() const { return steps_; }

 private:
  int max_episode_steps_;
  AcrobotState state_;
  int steps_ = 0;
};

}  // namespace smve::envs
