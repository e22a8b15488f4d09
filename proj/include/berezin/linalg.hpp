#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "berezin/types.hpp"

namespace berezin {

// LAPACK divide and conquer; eigenvalues ascending
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a);
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a);
void hermitian_eigensystem(const Eigen::MatrixXcd& a, Eigen::VectorXd& evals, Eigen::MatrixXcd& evecs);

// f(A) for Hermitian A via eigen-decomposition
Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& a);
Eigen::MatrixXcd hermitian_inv_sqrt(const Eigen::MatrixXcd& a);
Eigen::MatrixXcd hermitian_exp(const Eigen::MatrixXcd& a);

// q = L L^dagger; returns L^{-dagger}, columns orthonormal for q
Eigen::MatrixXcd orthonormal_basis(const Eigen::MatrixXcd& q);

// || log(q^{-1/2} q' q^{-1/2}) ||_F
double prod_distance(const ProdMatrix& q, const ProdMatrix& qp);

// largest singular value
double op_norm(const Eigen::MatrixXcd& a);

// eigenvalues descending, grouped where consecutive values differ by < rel_tol * max(1, |value|)
struct Clustered {
  std::vector<double> values;      // one representative (mean) per cluster
  std::vector<int> multiplicities;
};
Clustered cluster_descending(const std::vector<double>& desc, double rel_tol);

// q = L L^dagger + delta I, L with standard complex Gaussian entries
ProdMatrix random_prod(int n, std::uint64_t seed, double delta = 1e-3);
Eigen::MatrixXcd random_hermitian(int n, std::uint64_t seed);

// real orthonormal basis of Herm(n) for the trace pairing Tr[AB]
std::vector<Eigen::MatrixXcd> hermitian_basis(int n);

}  // namespace berezin
