#include "berezin/hermpoly.hpp"

#include <algorithm>
#include <cmath>

namespace berezin {

BidegreePoly::BidegreePoly() : c_(Eigen::MatrixXcd::Zero(1, 1)) {}

BidegreePoly::BidegreePoly(Eigen::MatrixXcd coeffs) : c_(std::move(coeffs)) {
  if (c_.rows() == 0 || c_.cols() == 0) c_ = Eigen::MatrixXcd::Zero(1, 1);
}

BidegreePoly BidegreePoly::constant(cplx c) {
  Eigen::MatrixXcd m(1, 1);
  m(0, 0) = c;
  return BidegreePoly(m);
}

BidegreePoly BidegreePoly::monomial(int j, int k, cplx c) {
  if (j < 0 || k < 0) throw ValidationError("monomial degrees must be nonnegative");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(j + 1, k + 1);
  m(j, k) = c;
  return BidegreePoly(m);
}

BidegreePoly BidegreePoly::one_plus_zzbar() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  return BidegreePoly(m);
}

cplx BidegreePoly::coeff(int j, int k) const {
  if (j < 0 || k < 0 || j > deg_z() || k > deg_zbar()) return 0.0;
  return c_(j, k);
}

cplx BidegreePoly::operator()(cplx z) const {
  const cplx zb = std::conj(z);
  cplx acc = 0.0;
  for (int j = deg_z(); j >= 0; --j) {
    cplx row = 0.0;
    for (int k = deg_zbar(); k >= 0; --k) row = row * zb + c_(j, k);
    acc = acc * z + row;
  }
  return acc;
}

bool BidegreePoly::is_real_valued(double tol) const {
  const int d = std::max(deg_z(), deg_zbar());
  for (int j = 0; j <= d; ++j)
    for (int k = j; k <= d; ++k)
      if (std::abs(coeff(j, k) - std::conj(coeff(k, j))) > tol) return false;
  return true;
}

BidegreePoly BidegreePoly::d_z() const {
  if (deg_z() == 0) return BidegreePoly(Eigen::MatrixXcd::Zero(1, c_.cols()));
  Eigen::MatrixXcd m(deg_z(), c_.cols());
  for (int j = 1; j <= deg_z(); ++j) m.row(j - 1) = double(j) * c_.row(j);
  return BidegreePoly(m);
}

BidegreePoly BidegreePoly::d_zbar() const {
  if (deg_zbar() == 0) return BidegreePoly(Eigen::MatrixXcd::Zero(c_.rows(), 1));
  Eigen::MatrixXcd m(c_.rows(), deg_zbar());
  for (int k = 1; k <= deg_zbar(); ++k) m.col(k - 1) = double(k) * c_.col(k);
  return BidegreePoly(m);
}

BidegreePoly BidegreePoly::conj() const { return BidegreePoly(c_.adjoint()); }

BidegreePoly BidegreePoly::pow(int n) const {
  if (n < 0) throw ValidationError("negative power");
  BidegreePoly r = constant(1.0);
  for (int i = 0; i < n; ++i) r = r * (*this);
  return r;
}

BidegreePoly& BidegreePoly::operator+=(const BidegreePoly& o) {
  const Eigen::Index r = std::max(c_.rows(), o.c_.rows());
  const Eigen::Index c = std::max(c_.cols(), o.c_.cols());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(r, c);
  m.topLeftCorner(c_.rows(), c_.cols()) = c_;
  m.topLeftCorner(o.c_.rows(), o.c_.cols()) += o.c_;
  c_ = std::move(m);
  return *this;
}

BidegreePoly& BidegreePoly::operator-=(const BidegreePoly& o) {
  BidegreePoly neg = o;
  neg *= -1.0;
  return *this += neg;
}

BidegreePoly& BidegreePoly::operator*=(cplx s) {
  c_ *= s;
  return *this;
}

BidegreePoly operator+(BidegreePoly a, const BidegreePoly& b) { return a += b; }
BidegreePoly operator-(BidegreePoly a, const BidegreePoly& b) { return a -= b; }
BidegreePoly operator*(cplx s, BidegreePoly a) { return a *= s; }
BidegreePoly operator*(BidegreePoly a, cplx s) { return a *= s; }

BidegreePoly operator*(const BidegreePoly& a, const BidegreePoly& b) {
  const auto& A = a.coeffs();
  const auto& B = b.coeffs();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(A.rows() + B.rows() - 1, A.cols() + B.cols() - 1);
  for (Eigen::Index j = 0; j < A.rows(); ++j)
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
      if (A(j, k) == 0.0) continue;
      m.block(j, k, B.rows(), B.cols()) += A(j, k) * B;
    }
  return BidegreePoly(m);
}

BidegreePoly add(const BidegreePoly& a, const BidegreePoly& b) { return a + b; }
BidegreePoly mul(const BidegreePoly& a, const BidegreePoly& b) { return a * b; }
BidegreePoly d_z(const BidegreePoly& p) { return p.d_z(); }
BidegreePoly d_zbar(const BidegreePoly& p) { return p.d_zbar(); }
cplx eval(const BidegreePoly& p, cplx z) { return p(z); }

// FrameFunction

FrameFunction::FrameFunction(BidegreePoly numerator, int weight_power)
    : num_(std::move(numerator)), m_(weight_power) {
  if (m_ < 0) throw ValidationError("weight_power must be nonnegative");
}

FrameFunction FrameFunction::x1() {
  return {BidegreePoly::monomial(1, 0) + BidegreePoly::monomial(0, 1), 1};
}

FrameFunction FrameFunction::x2() {
  const cplx mi(0.0, -1.0);
  return {BidegreePoly::monomial(1, 0, mi) + BidegreePoly::monomial(0, 1, -mi), 1};
}

FrameFunction FrameFunction::x3() {
  return {BidegreePoly::constant(1.0) - BidegreePoly::monomial(1, 1), 1};
}

cplx FrameFunction::operator()(cplx z) const {
  const double w = 1.0 + std::norm(z);
  return num_(z) / std::pow(w, m_);
}

bool FrameFunction::is_bounded() const { return num_.deg_z() <= m_ && num_.deg_zbar() <= m_; }

FrameFunction FrameFunction::lifted(int m) const {
  if (m < m_) throw ValidationError("cannot lower weight_power");
  if (m == m_) return *this;
  return {num_ * BidegreePoly::one_plus_zzbar().pow(m - m_), m};
}

// d_z [P w^{-m}] = [(dP) w - m zbar P] w^{-(m+1)}, w = 1 + z zbar
FrameFunction FrameFunction::d_z() const {
  if (m_ == 0) return {num_.d_z(), 0};
  BidegreePoly n = num_.d_z() * BidegreePoly::one_plus_zzbar() -
                   BidegreePoly::monomial(0, 1, double(m_)) * num_;
  return {n, m_ + 1};
}

FrameFunction FrameFunction::d_zbar() const {
  if (m_ == 0) return {num_.d_zbar(), 0};
  BidegreePoly n = num_.d_zbar() * BidegreePoly::one_plus_zzbar() -
                   BidegreePoly::monomial(1, 0, double(m_)) * num_;
  return {n, m_ + 1};
}

FrameFunction& FrameFunction::operator+=(const FrameFunction& o) {
  const int m = std::max(m_, o.m_);
  FrameFunction a = lifted(m);
  FrameFunction b = o.lifted(m);
  num_ = a.num_ + b.num_;
  m_ = m;
  return *this;
}

FrameFunction& FrameFunction::operator-=(const FrameFunction& o) {
  FrameFunction neg = o;
  neg *= -1.0;
  return *this += neg;
}

FrameFunction& FrameFunction::operator*=(cplx s) {
  num_ *= s;
  return *this;
}

FrameFunction operator+(FrameFunction a, const FrameFunction& b) { return a += b; }
FrameFunction operator-(FrameFunction a, const FrameFunction& b) { return a -= b; }
FrameFunction operator*(const FrameFunction& a, const FrameFunction& b) {
  return {a.numerator() * b.numerator(), a.weight_power() + b.weight_power()};
}
FrameFunction operator*(cplx s, FrameFunction a) { return a *= s; }
FrameFunction operator*(FrameFunction a, cplx s) { return a *= s; }

FrameFunction add(const FrameFunction& a, const FrameFunction& b) { return a + b; }
FrameFunction mul(const FrameFunction& a, const FrameFunction& b) { return a * b; }
FrameFunction d_z(const FrameFunction& f) { return f.d_z(); }
FrameFunction d_zbar(const FrameFunction& f) { return f.d_zbar(); }
cplx eval(const FrameFunction& f, cplx z) { return f(z); }

// pointwise second derivatives

namespace {

void check_floor(cplx q, double floor) {
  if (!(std::abs(q) >= floor)) throw NumericalError("division by near-zero denominator");
}

}  // namespace

cplx ratio_ddbar_at(const BidegreePoly& P, const BidegreePoly& Q, cplx z, double floor) {
  const cplx q = Q(z);
  check_floor(q, floor);
  const cplx p = P(z);
  const BidegreePoly Pz = P.d_z(), Qz = Q.d_z();
  const cplx pz = Pz(z), pb = P.d_zbar()(z), pzb = Pz.d_zbar()(z);
  const cplx qz = Qz(z), qb = Q.d_zbar()(z), qzb = Qz.d_zbar()(z);
  return pzb / q - (pz * qb + pb * qz) / (q * q) - p * qzb / (q * q) +
         2.0 * p * qz * qb / (q * q * q);
}

cplx ddbar_log_at(const BidegreePoly& Q, cplx z, double floor) {
  const cplx q = Q(z);
  check_floor(q, floor);
  const BidegreePoly Qz = Q.d_z();
  const cplx qz = Qz(z), qb = Q.d_zbar()(z), qzb = Qz.d_zbar()(z);
  return (q * qzb - qz * qb) / (q * q);
}

}  // namespace berezin
