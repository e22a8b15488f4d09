#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace berezin {

using cplx = std::complex<double>;

// Raised when a computation cannot produce a trustworthy number
// (singular denominators, failed factorizations, quadrature that does not settle).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised on malformed input (bad degrees, non-Hermitian data, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultFloor = 1e-300;

// sum_{j,k} c_{jk} z^j conj(z)^k
class BidegreePoly {
 public:
  BidegreePoly();
  explicit BidegreePoly(Eigen::MatrixXcd coeffs);

  static BidegreePoly constant(cplx c);
  static BidegreePoly monomial(int j, int k, cplx c = 1.0);
  // 1 + z zbar
  static BidegreePoly one_plus_zzbar();

  int deg_z() const { return static_cast<int>(c_.rows()) - 1; }
  int deg_zbar() const { return static_cast<int>(c_.cols()) - 1; }
  const Eigen::MatrixXcd& coeffs() const { return c_; }
  cplx coeff(int j, int k) const;

  cplx operator()(cplx z) const;

  // c_{jk} == conj(c_{kj}); tol is absolute on coefficient differences
  bool is_real_valued(double tol = 0.0) const;

  BidegreePoly d_z() const;
  BidegreePoly d_zbar() const;
  BidegreePoly conj() const;  // conj of the function: c'_{jk} = conj(c_{kj})
  BidegreePoly pow(int n) const;

  BidegreePoly& operator+=(const BidegreePoly& o);
  BidegreePoly& operator-=(const BidegreePoly& o);
  BidegreePoly& operator*=(cplx s);

 private:
  Eigen::MatrixXcd c_;
};

BidegreePoly operator+(BidegreePoly a, const BidegreePoly& b);
BidegreePoly operator-(BidegreePoly a, const BidegreePoly& b);
BidegreePoly operator*(const BidegreePoly& a, const BidegreePoly& b);
BidegreePoly operator*(cplx s, BidegreePoly a);
BidegreePoly operator*(BidegreePoly a, cplx s);

BidegreePoly add(const BidegreePoly& a, const BidegreePoly& b);
BidegreePoly mul(const BidegreePoly& a, const BidegreePoly& b);
BidegreePoly d_z(const BidegreePoly& p);
BidegreePoly d_zbar(const BidegreePoly& p);
cplx eval(const BidegreePoly& p, cplx z);

// numerator / (1+|z|^2)^m
class FrameFunction {
 public:
  FrameFunction() = default;
  FrameFunction(BidegreePoly numerator, int weight_power);

  static FrameFunction constant(cplx c) { return {BidegreePoly::constant(c), 0}; }
  // stereographic coordinates of the unit sphere, north pole at z = 0
  static FrameFunction x1();
  static FrameFunction x2();
  static FrameFunction x3();

  const BidegreePoly& numerator() const { return num_; }
  int weight_power() const { return m_; }

  cplx operator()(cplx z) const;
  bool is_bounded() const;
  bool is_real_valued(double tol = 0.0) const { return num_.is_real_valued(tol); }

  FrameFunction lifted(int m) const;  // same function, weight_power m >= current
  FrameFunction d_z() const;
  FrameFunction d_zbar() const;

  FrameFunction& operator+=(const FrameFunction& o);
  FrameFunction& operator-=(const FrameFunction& o);
  FrameFunction& operator*=(cplx s);

 private:
  BidegreePoly num_;
  int m_ = 0;
};

FrameFunction operator+(FrameFunction a, const FrameFunction& b);
FrameFunction operator-(FrameFunction a, const FrameFunction& b);
FrameFunction operator*(const FrameFunction& a, const FrameFunction& b);
FrameFunction operator*(cplx s, FrameFunction a);
FrameFunction operator*(FrameFunction a, cplx s);

FrameFunction add(const FrameFunction& a, const FrameFunction& b);
FrameFunction mul(const FrameFunction& a, const FrameFunction& b);
FrameFunction d_z(const FrameFunction& f);
FrameFunction d_zbar(const FrameFunction& f);
cplx eval(const FrameFunction& f, cplx z);

// d_z d_zbar (P/Q) at z by the quotient rule
cplx ratio_ddbar_at(const BidegreePoly& P, const BidegreePoly& Q, cplx z, double floor = kDefaultFloor);
// (Q ddbar Q - dQ dbarQ) / Q^2 at z
cplx ddbar_log_at(const BidegreePoly& Q, cplx z, double floor = kDefaultFloor);

}  // namespace berezin
