#pragma once

#include <vector>

#include <Eigen/Dense>

namespace berezin {

// Data of one quadrature node for the Berezin super-operator
// C(A) = sum_n w_n P_n A Q_n, Q = X X^dagger, P = X rho^{-1} X^dagger,
// X = ev^dagger in orthonormal coordinates (N x r), rho = X^dagger X.
struct CoherentNode {
  double weight = 0.0;  // rule weight times measure density
  Eigen::MatrixXcd X;
  Eigen::MatrixXcd rho_inv_sqrt;
};

// N^2 x N^2 Hermitian matrix on vec(End), vec index a + N b for A(a, b)
Eigen::MatrixXcd assemble_berezin_dense(const std::vector<CoherentNode>& nodes, int N);

// U(1)-invariant case: nodes are the theta = 0 points of each ring with full ring
// weights, charges[a] the rotation charge of basis vector a. Returns all N^2
// eigenvalues (unsorted).
std::vector<double> berezin_sector_eigenvalues(const std::vector<CoherentNode>& ring_nodes,
                                               const std::vector<int>& charges, int N);

// M(a, b) = Tr[B_a C(B_b)] in the hermitian_basis ordering; real part only,
// valid when C maps Hermitian matrices to Hermitian matrices
Eigen::MatrixXd assemble_berezin_hermitian(const std::vector<CoherentNode>& nodes, int N);

// vec(B_a) as columns, hermitian_basis ordering
Eigen::MatrixXcd hermitian_basis_columns(int N);

}  // namespace berezin
