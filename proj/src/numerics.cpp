#include "unisac/numerics.hpp"

#include <cmath>
#include <limits>

namespace unisac {

double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

namespace {

// Acklam's rational approximation to the standard normal quantile.
double norm_quantile_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// Regularized lower incomplete gamma P(s, x), series / continued fraction split.
double gammap(double s, double x) {
  if (x < 0.0) throw std::domain_error("gammap: negative x");
  if (x == 0.0) return 0.0;
  const double lg = std::lgamma(s);
  if (x < s + 1.0) {
    // series for P
    double term = 1.0 / s;
    double sum = term;
    double ap = s;
    for (int k = 0; k < 10000; ++k) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + s * std::log(x) - lg);
  }
  // Lentz continued fraction for Q
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + s * std::log(x) - lg) * h;
  return 1.0 - q;
}

}  // namespace

double gaussian_tail_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gaussian_tail_inverse: p must lie in (0,1)");
  double x = norm_quantile_approx(1.0 - p);  // Q(x) = 1 - Phi(x)
  // Halley refinement on f(x) = Q(x) - p.
  for (int it = 0; it < 3; ++it) {
    const double f = gaussian_tail(x) - p;
    const double df = -norm_pdf(x);
    if (df == 0.0) break;
    const double u = f / df;
    x -= u / (1.0 - 0.5 * u * x);
  }
  return x;
}

double chi_squared_cdf(int t, double x) {
  if (t < 1) throw std::domain_error("chi_squared_cdf: t must be >= 1");
  if (x < 0.0) throw std::domain_error("chi_squared_cdf: negative x");
  return gammap(0.5 * t, 0.5 * x);
}

double chi_squared_inverse(int t, double p) {
  if (t < 1) throw std::domain_error("chi_squared_inverse: t must be >= 1");
  if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("chi_squared_inverse: p must lie in [0,1)");
  if (p == 0.0) return 0.0;
  // Wilson-Hilferty starting point, then safeguarded Newton on the CDF.
  const double z = gaussian_tail_inverse(1.0 - p);
  const double df = static_cast<double>(t);
  double x = df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)), 3.0);
  if (!(x > 0.0)) x = 0.5 * df;
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double f = chi_squared_cdf(t, x) - p;
    if (f > 0.0) hi = x; else lo = x;
    const double pdf = std::exp((0.5 * df - 1.0) * std::log(x) - 0.5 * x -
                                std::lgamma(0.5 * df) - 0.5 * df * std::log(2.0));
    double next = (pdf > 0.0) ? x - f / pdf : x;
    if (!(next > lo && (next < hi))) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x;
    }
    if (std::fabs(next - x) < 1e-12 * (1.0 + std::fabs(x))) return next;
    x = next;
  }
  return x;
}

Probability poisson_pmf(std::uint64_t i, double a) {
  if (!(a > 0.0)) throw std::domain_error("poisson_pmf: a must be positive");
  const double di = static_cast<double>(i);
  return Probability::clamped(std::exp(di * std::log(a) - a - std::lgamma(di + 1.0)));
}

double log_binomial(double a1, std::uint64_t a2) {
  if (a2 > a1) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::uint64_t i = 0; i < a2; ++i) {
    const double di = static_cast<double>(i);
    s += std::log((a1 - di) / (static_cast<double>(a2) - di));
  }
  return s;
}

double log_binomial_log2pop(double log2_a1, std::uint64_t a2) {
  const double ln2 = std::log(2.0);
  if (log2_a1 < 64.0 && static_cast<double>(a2) > std::exp2(log2_a1)) {
    return -std::numeric_limits<double>::infinity();
  }
  double s = 0.0;
  for (std::uint64_t i = 0; i < a2; ++i) {
    const double di = static_cast<double>(i);
    // log(2^L - i) = L log2 + log1p(-i 2^-L)
    s += log2_a1 * ln2 + std::log1p(-di * std::exp2(-log2_a1));
    s -= std::log(static_cast<double>(a2) - di);
  }
  return s;
}

namespace {

// Shared factorization of the Gram matrix. A rank-revealing eigendecomposition
// of A A^H; condition number above 1e12 is treated as singular.
struct GramSolve {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig;
};

Eigen::SelfAdjointEigenSolver<ComplexMatrix> gram_factor(const ComplexMatrix& a) {
  const ComplexMatrix gram = a * a.adjoint();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram);
  const auto& ev = eig.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  const double lmin = ev(0);
  if (!(lmax > 0.0) || lmin <= 0.0 || lmax / lmin > 1e12) {
    // Rows with significant weight in the near-null eigenvector are implicated.
    std::vector<Eigen::Index> rows;
    const ComplexVector v = eig.eigenvectors().col(0);
    for (Eigen::Index r = 0; r < v.size(); ++r) {
      if (std::abs(v(r)) > 1.0 / std::sqrt(2.0 * static_cast<double>(v.size()))) rows.push_back(r);
    }
    throw SingularGramError("rank-deficient signal set in Gram matrix", rows);
  }
  return eig;
}

}  // namespace

ComplexMatrix ls_fit(const ComplexMatrix& y, const ComplexMatrix& a) {
  if (y.cols() != a.cols()) throw ShapeError("ls_fit: column counts differ");
  if (a.rows() == 0) return ComplexMatrix::Zero(y.rows(), 0);
  const auto eig = gram_factor(a);
  const ComplexMatrix yah = y * a.adjoint();
  // B = Y A^H V diag(1/lambda) V^H
  const ComplexMatrix v = eig.eigenvectors();
  const RealVector inv = eig.eigenvalues().cwiseInverse();
  return ((yah * v) * inv.asDiagonal()) * v.adjoint();
}

ComplexMatrix project_residual(const ComplexMatrix& y, const ComplexMatrix& a) {
  if (a.rows() == 0) return y;
  return y - ls_fit(y, a) * a;
}

}  // namespace unisac
