#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Malformed configuration text or an unknown key. Line and column are 1-based; 0 means "not tied to a position".
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& msg, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// A model assumption (A1)..(A7), (B1)..(B4) is not satisfied by the configured laws.
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string assumption, const std::string& msg);
  const std::string& assumption() const { return assumption_; }

private:
  std::string assumption_;
};

/// Linear solve failure, Newton divergence past the step floor, non-finite state.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Symmetric 2x2 tensor stored as (xx, yy, xy).
struct Sym2 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;

  static Sym2 identity() { return {1.0, 1.0, 0.0}; }
  double trace() const { return xx + yy; }
  /// Frobenius double contraction A:B.
  double dot(const Sym2& o) const { return xx * o.xx + yy * o.yy + 2.0 * xy * o.xy; }
  double norm2() const { return dot(*this); }

  Sym2 operator+(const Sym2& o) const { return {xx + o.xx, yy + o.yy, xy + o.xy}; }
  Sym2 operator-(const Sym2& o) const { return {xx - o.xx, yy - o.yy, xy - o.xy}; }
  Sym2 operator*(double s) const { return {xx * s, yy * s, xy * s}; }
  bool operator==(const Sym2&) const = default;
};

inline Sym2 operator*(double s, const Sym2& t) { return t * s; }

/// Pairwise (cascade) summation; fixed reduction order independent of thread count.
double pairwise_sum(const double* x, std::size_t n);

/// Quadrature integral sum_q w_q f_q with pairwise reduction.
double integrate(const Vec& w, const Vec& f);

}  // namespace chb
