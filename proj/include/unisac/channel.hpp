#pragma once

#include <cmath>
#include <vector>

#include "unisac/rng.hpp"
#include "unisac/types.hpp"

namespace unisac {

struct UlaConfig {
  int m = 1;  // antenna count, half-wavelength spacing
};

/// Normalized angle of arrival (cosine of the physical angle). The steering
/// vector is periodic with period 2, so all values are reduced into [-1, 1).
struct Aoa {
  double theta = 0.0;

  static double wrap(double x) {
    double w = std::fmod(x + 1.0, 2.0);
    if (w < 0.0) w += 2.0;
    return w - 1.0;
  }
  static Aoa of(double x) { return Aoa{wrap(x)}; }

  /// Minimal wrapped difference, in [-1, 1).
  static double wrapped_diff(double a, double b) { return wrap(a - b); }
};

enum class UserRole { communication, sensing };

struct UserTransmission {
  Aoa aoa;
  ComplexVector signal;  // length n, zero outside the user's slot
  UserRole role = UserRole::communication;
  int identity = 0;  // trial-local label, scoring only
};

/// b_theta = [1, e^{-j pi theta}, ..., e^{-j pi (M-1) theta}]
ComplexVector steering_vector(double theta, int m);

/// Element-wise derivative of the steering vector: entry k is -j pi k e^{-j pi k theta}.
ComplexVector steering_derivative(double theta, int m);

/// f_e(x) = sum_{t=0}^{M-1} cos(t pi x) = Re(b_0^H b_x).
double f_e_kernel(double x, int m);

/// Y = sum_j b_{theta_j} a_j + Z, Z iid CN(0, noise_var) per entry.
ComplexMatrix simulate_uplink(const std::vector<UserTransmission>& users, const UlaConfig& ula,
                              double noise_var, RngStream& rng, Eigen::Index frame_length);

}  // namespace unisac
