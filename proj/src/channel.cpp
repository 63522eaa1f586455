#include "unisac/channel.hpp"

#include <cmath>

namespace unisac {

ComplexVector steering_vector(double theta, int m) {
  ComplexVector b(m);
  for (int k = 0; k < m; ++k) {
    const double phase = -M_PI * k * theta;
    b(k) = Complex(std::cos(phase), std::sin(phase));
  }
  return b;
}

ComplexVector steering_derivative(double theta, int m) {
  ComplexVector d(m);
  for (int k = 0; k < m; ++k) {
    const double phase = -M_PI * k * theta;
    d(k) = Complex(0.0, -M_PI * k) * Complex(std::cos(phase), std::sin(phase));
  }
  return d;
}

double f_e_kernel(double x, int m) {
  double s = 0.0;
  for (int t = 0; t < m; ++t) s += std::cos(t * M_PI * x);
  return s;
}

ComplexMatrix simulate_uplink(const std::vector<UserTransmission>& users, const UlaConfig& ula,
                              double noise_var, RngStream& rng, Eigen::Index frame_length) {
  if (noise_var < 0.0) throw ValidationError("simulate_uplink: negative noise_var");
  for (const auto& u : users) {
    if (u.signal.size() != frame_length) throw ShapeError("simulate_uplink: mismatched signal length");
  }
  ComplexMatrix y = ComplexMatrix::Zero(ula.m, frame_length);
  if (noise_var > 0.0)
    for (Eigen::Index c = 0; c < frame_length; ++c)
      for (int r = 0; r < ula.m; ++r) y(r, c) = rng.complex_gaussian(noise_var);
  for (const auto& u : users) {
    const ComplexVector b = steering_vector(u.aoa.theta, ula.m);
    y.noalias() += b * u.signal.transpose();
  }
  return y;
}

}  // namespace unisac
