#include "berezin/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "berezin/hermpoly.hpp"

namespace berezin {

double hermitian_defect(const Eigen::MatrixXcd& a) {
  const double n = a.norm();
  if (n == 0.0) return 0.0;
  return (a - a.adjoint()).norm() / (2.0 * n);
}

ProdMatrix::ProdMatrix(Eigen::MatrixXcd q) {
  if (q.rows() != q.cols() || q.rows() == 0) throw ValidationError("ProdMatrix must be square and nonempty");
  if (!q.allFinite()) throw NumericalError("ProdMatrix has non-finite entries");
  if (hermitian_defect(q) > 1e-8) throw ValidationError("ProdMatrix is not Hermitian");
  q_ = 0.5 * (q + q.adjoint());
  Eigen::LLT<Eigen::MatrixXcd> llt(q_);
  if (llt.info() != Eigen::Success) {
    const double lmin = hermitian_eigenvalues(q_)(0);
    std::ostringstream os;
    os << "inner product matrix is not positive definite (smallest eigenvalue " << lmin << ")";
    throw NumericalError(os.str());
  }
}

Eigen::MatrixXcd ProdMatrix::inverse() const {
  Eigen::LLT<Eigen::MatrixXcd> llt(q_);
  Eigen::MatrixXcd inv = llt.solve(Eigen::MatrixXcd::Identity(q_.rows(), q_.cols()));
  return 0.5 * (inv + inv.adjoint());
}

double ProdMatrix::log_det() const {
  Eigen::LLT<Eigen::MatrixXcd> llt(q_);
  double s = 0.0;
  for (Eigen::Index i = 0; i < q_.rows(); ++i) s += 2.0 * std::log(llt.matrixL()(i, i).real());
  return s;
}

ProdMatrix ProdMatrix::scaled(double c) const { return ProdMatrix(c * q_); }

HermOp::HermOp(Eigen::MatrixXcd a) {
  if (a.rows() != a.cols()) throw ValidationError("HermOp must be square");
  if (hermitian_defect(a) > 1e-8) throw ValidationError("HermOp is not Hermitian");
  a_ = 0.5 * (a + a.adjoint());
}

void hermitian_eigensystem(const Eigen::MatrixXcd& a, Eigen::VectorXd& evals, Eigen::MatrixXcd& evecs) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  evecs = a;
  evals.resize(n);
  if (n == 0) return;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                         reinterpret_cast<lapack_complex_double*>(evecs.data()), n,
                                         evals.data());
  if (info != 0) throw NumericalError("zheevd failed");
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::MatrixXcd work = a;
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n,
                                         reinterpret_cast<lapack_complex_double*>(work.data()), n,
                                         w.data());
  if (info != 0) throw NumericalError("zheevd failed");
  return w;
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::MatrixXd work = a;
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data());
  if (info != 0) throw NumericalError("dsyevd failed");
  return w;
}

namespace {

template <class F>
Eigen::MatrixXcd hermitian_function(const Eigen::MatrixXcd& a, F f) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a + a.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigen-decomposition failed");
  Eigen::VectorXd v = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& a) {
  return hermitian_function(a, [](double x) {
    if (x <= 0.0) throw NumericalError("square root of a non-positive matrix");
    return std::sqrt(x);
  });
}

Eigen::MatrixXcd hermitian_inv_sqrt(const Eigen::MatrixXcd& a) {
  return hermitian_function(a, [](double x) {
    if (x <= 0.0) throw NumericalError("inverse square root of a non-positive matrix");
    return 1.0 / std::sqrt(x);
  });
}

Eigen::MatrixXcd hermitian_exp(const Eigen::MatrixXcd& a) {
  return hermitian_function(a, [](double x) { return std::exp(x); });
}

Eigen::MatrixXcd orthonormal_basis(const Eigen::MatrixXcd& q) {
  Eigen::LLT<Eigen::MatrixXcd> llt(q);
  if (llt.info() != Eigen::Success) throw NumericalError("Gram matrix is not positive definite");
  const Eigen::Index n = q.rows();
  Eigen::MatrixXcd Linv = llt.matrixL().solve(Eigen::MatrixXcd::Identity(n, n));
  return Linv.adjoint();
}

double prod_distance(const ProdMatrix& q, const ProdMatrix& qp) {
  // Cholesky whitening keeps graded (badly scaled) diagonals accurate
  Eigen::LLT<Eigen::MatrixXcd> llt(q.matrix());
  if (llt.info() != Eigen::Success) throw NumericalError("prod_distance: q is not positive definite");
  const Eigen::MatrixXcd a = llt.matrixL().solve(qp.matrix());
  const Eigen::MatrixXcd m = llt.matrixL().solve(a.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double e = es.eigenvalues()(i);
    if (!(e > 0.0)) throw NumericalError("prod_distance: argument is not positive definite");
    const double l = std::log(e);
    acc += l * l;
  }
  return std::sqrt(acc);
}

double op_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  if (!a.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

Clustered cluster_descending(const std::vector<double>& desc, double rel_tol) {
  Clustered c;
  std::size_t i = 0;
  while (i < desc.size()) {
    std::size_t j = i + 1;
    double sum = desc[i];
    while (j < desc.size() && std::abs(desc[j - 1] - desc[j]) <= rel_tol * std::max(1.0, std::abs(desc[j]))) {
      sum += desc[j];
      ++j;
    }
    c.values.push_back(sum / double(j - i));
    c.multiplicities.push_back(static_cast<int>(j - i));
    i = j;
  }
  return c;
}

ProdMatrix random_prod(int n, std::uint64_t seed, double delta) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd L(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = g(gen);
      const double im = g(gen);
      L(i, j) = cplx(re, im);
    }
  Eigen::MatrixXcd q = L * L.adjoint() + delta * Eigen::MatrixXcd::Identity(n, n);
  return ProdMatrix(q);
}

Eigen::MatrixXcd random_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = g(gen);
      const double im = g(gen);
      a(i, j) = cplx(re, im);
    }
  return 0.5 * (a + a.adjoint());
}

std::vector<Eigen::MatrixXcd> hermitian_basis(int n) {
  std::vector<Eigen::MatrixXcd> b;
  b.reserve(std::size_t(n) * n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
    e(j, j) = 1.0;
    b.push_back(e);
  }
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(n, n);
      e(j, k) = s;
      e(k, j) = s;
      b.push_back(e);
      Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(n, n);
      f(j, k) = cplx(0.0, s);
      f(k, j) = cplx(0.0, -s);
      b.push_back(f);
    }
  return b;
}

}  // namespace berezin
