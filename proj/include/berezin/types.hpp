#pragma once

#include <Eigen/Dense>

#include "berezin/hermpoly.hpp"

namespace berezin {

// Positive-definite Hermitian matrix: an inner product on the section space,
// written in the monomial basis.
class ProdMatrix {
 public:
  ProdMatrix() = default;
  explicit ProdMatrix(Eigen::MatrixXcd q);

  const Eigen::MatrixXcd& matrix() const { return q_; }
  int dim() const { return static_cast<int>(q_.rows()); }
  Eigen::MatrixXcd inverse() const;
  double log_det() const;
  ProdMatrix scaled(double c) const;

 private:
  Eigen::MatrixXcd q_;
};

// Hermitian operator on the section space, expressed in an orthonormal basis.
class HermOp {
 public:
  HermOp() = default;
  explicit HermOp(Eigen::MatrixXcd a);

  const Eigen::MatrixXcd& matrix() const { return a_; }
  int dim() const { return static_cast<int>(a_.rows()); }

 private:
  Eigen::MatrixXcd a_;
};

// relative Frobenius size of the anti-Hermitian part
double hermitian_defect(const Eigen::MatrixXcd& a);

}  // namespace berezin
