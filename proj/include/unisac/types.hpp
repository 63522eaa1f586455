#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace unisac {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Probability value clamped to [0,1].
struct Probability {
  double value = 0.0;

  Probability() = default;
  explicit Probability(double v) : value(v) {
    if (v < 0.0 || v > 1.0) throw std::domain_error("Probability out of [0,1]: " + std::to_string(v));
  }
  static Probability clamped(double v) {
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return Probability(v);
  }
  operator double() const { return value; }
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when a Gram matrix is numerically rank deficient. Carries the rows
/// implicated in the near-null space so the caller can decide what to drop.
struct SingularGramError : std::runtime_error {
  std::vector<Eigen::Index> offending_rows;
  SingularGramError(const std::string& msg, std::vector<Eigen::Index> rows)
      : std::runtime_error(msg), offending_rows(std::move(rows)) {}
};

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace unisac
