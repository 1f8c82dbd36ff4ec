#pragma once

#include <cassert>

namespace reactsim {

// Component-level power draw. sensing_w bundles LiDAR, perception processor
// and communications, which switch together.
struct PowerProfile {
  double idle_w = 2.0;
  double locomotion_w_per_mps = 10.0;
  double sensing_w = 17.0;
};

struct Battery {
  double capacity_j = 8245.96;
  double charge_j = 8245.96;
};

enum class DrainResult { Ok, Depleted };

inline double step_energy(const PowerProfile& p, double speed_mps, bool sensing_on,
                          double dt_s) {
  assert(speed_mps >= 0.0 && dt_s > 0.0);
  return (p.idle_w + p.locomotion_w_per_mps * speed_mps +
          (sensing_on ? p.sensing_w : 0.0)) *
         dt_s;
}

// Depleted when the requested joules exceed the remaining charge; the charge
// is then pinned at zero and the robot is immobilized for the rest of the run.
inline DrainResult drain(Battery& b, double joules) {
  assert(joules >= 0.0);
  if (joules > b.charge_j) {
    b.charge_j = 0.0;
    return DrainResult::Depleted;
  }
  b.charge_j -= joules;
  return DrainResult::Ok;
}

}  // namespace reactsim
