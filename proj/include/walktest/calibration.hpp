#pragma once

#include "walktest/designs.hpp"

namespace walktest {

/// Constants frozen from a run of the `walktest_calibrate` tool. Re-running
/// the tool prints the values below.
struct Calibration {
  DesignConstants constants;
  double beta_visit = 0.0;       // pi_v >= beta t / (c n T)
  double beta_avoid = 0.0;       // pi_{v,A} >= beta / (c^4 d T^2)
  double beta_sink_avoid = 0.0;  // pi^(u)_{v,A} >= beta / (c^8 d^2 T^4)
};

inline Calibration frozen_calibration() {
  Calibration c;
  c.constants.kappa_t = 2.5;
  c.constants.kappa_m = 0.91;
  c.constants.kappa_e = 1.7;
  c.constants.kappa_d = 1.0;
  c.beta_visit = 1.0;
  c.beta_avoid = 1.0;
  c.beta_sink_avoid = 6.5;
  return c;
}

inline DesignConstants calibrated_constants() { return frozen_calibration().constants; }

}  // namespace walktest
