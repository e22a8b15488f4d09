#include "berezin/superop.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "berezin/linalg.hpp"
#include "berezin/parallel.hpp"

namespace berezin {

namespace {

constexpr int kChunk = 32;

// columns (beta, alpha) of sqrt(w) conj(X) (x) X rho^{-1/2} restricted to rows
void fill_factor(const CoherentNode& n, const std::vector<std::pair<int, int>>& rows,
                 Eigen::Ref<Eigen::MatrixXcd> out) {
  const Eigen::MatrixXcd Xs = n.X * n.rho_inv_sqrt;
  const Eigen::Index r = n.X.cols();
  const double sw = std::sqrt(n.weight);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int a = rows[i].first, b = rows[i].second;
    for (Eigen::Index be = 0; be < r; ++be) {
      const std::complex<double> xb = sw * std::conj(n.X(b, be));
      for (Eigen::Index al = 0; al < r; ++al) out(i, be * r + al) = xb * Xs(a, al);
    }
  }
}

Eigen::MatrixXcd gram_of_factors(const std::vector<CoherentNode>& nodes,
                                 const std::vector<std::pair<int, int>>& rows) {
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(m, m);
  if (nodes.empty()) return C;
  const Eigen::Index r = nodes.front().X.cols();
  const std::size_t nchunks = (nodes.size() + kChunk - 1) / kChunk;
  for (std::size_t c = 0; c < nchunks; ++c) {
    const std::size_t lo = c * kChunk, hi = std::min(nodes.size(), lo + kChunk);
    Eigen::MatrixXcd Y(m, (hi - lo) * r * r);
    parallel_for(hi - lo, [&](std::size_t i) {
      fill_factor(nodes[lo + i], rows, Y.middleCols(i * r * r, r * r));
    });
    C.selfadjointView<Eigen::Lower>().rankUpdate(Y);
  }
  C.triangularView<Eigen::StrictlyUpper>() = C.adjoint();
  return C;
}

}  // namespace

Eigen::MatrixXcd assemble_berezin_dense(const std::vector<CoherentNode>& nodes, int N) {
  std::vector<std::pair<int, int>> rows;
  rows.reserve(std::size_t(N) * N);
  for (int b = 0; b < N; ++b)
    for (int a = 0; a < N; ++a) rows.emplace_back(a, b);
  return gram_of_factors(nodes, rows);
}

std::vector<double> berezin_sector_eigenvalues(const std::vector<CoherentNode>& ring_nodes,
                                               const std::vector<int>& charges, int N) {
  std::map<int, std::vector<std::pair<int, int>>> sectors;
  for (int b = 0; b < N; ++b)
    for (int a = 0; a < N; ++a) sectors[charges[a] - charges[b]].emplace_back(a, b);
  std::vector<double> out;
  out.reserve(std::size_t(N) * N);
  for (const auto& [m, rows] : sectors) {
    const Eigen::MatrixXcd C = gram_of_factors(ring_nodes, rows);
    const Eigen::VectorXd ev = hermitian_eigenvalues(C);
    for (Eigen::Index i = 0; i < ev.size(); ++i) out.push_back(ev(i));
  }
  return out;
}

Eigen::MatrixXd assemble_berezin_hermitian(const std::vector<CoherentNode>& nodes, int N) {
  const Eigen::Index D = Eigen::Index(N) * N;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(D, D);
  if (nodes.empty()) return M;
  const Eigen::Index r = nodes.front().X.cols();
  const Eigen::Index per = 2 * r * r;
  const double s = 1.0 / std::sqrt(2.0);
  const std::size_t nchunks = (nodes.size() + kChunk - 1) / kChunk;
  for (std::size_t c = 0; c < nchunks; ++c) {
    const std::size_t lo = c * kChunk, hi = std::min(nodes.size(), lo + kChunk);
    Eigen::MatrixXd Y(D, (hi - lo) * per);
    parallel_for(hi - lo, [&](std::size_t i) {
      const CoherentNode& n = nodes[lo + i];
      const Eigen::MatrixXcd Xs = n.X * n.rho_inv_sqrt;
      const double sw = std::sqrt(n.weight);
      auto Yi = Y.middleCols(i * per, per);
      // u_B = X^dagger B Xs, Tr[B_a C(B_b)] = sum w Re Tr[u_a u_b^dagger]
      auto put = [&](Eigen::Index row, const Eigen::MatrixXcd& u) {
        for (Eigen::Index k = 0; k < r * r; ++k) {
          Yi(row, 2 * k) = sw * u(k).real();
          Yi(row, 2 * k + 1) = sw * u(k).imag();
        }
      };
      Eigen::Index row = 0;
      for (int j = 0; j < N; ++j) put(row++, n.X.row(j).adjoint() * Xs.row(j));
      for (int j = 0; j < N; ++j)
        for (int k = j + 1; k < N; ++k) {
          const Eigen::MatrixXcd jk = n.X.row(j).adjoint() * Xs.row(k);
          const Eigen::MatrixXcd kj = n.X.row(k).adjoint() * Xs.row(j);
          put(row++, s * (jk + kj));
          put(row++, std::complex<double>(0.0, s) * (jk - kj));
        }
    });
    M.selfadjointView<Eigen::Lower>().rankUpdate(Y);
  }
  M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
  return M;
}

Eigen::MatrixXcd hermitian_basis_columns(int N) {
  const auto basis = hermitian_basis(N);
  Eigen::MatrixXcd U(Eigen::Index(N) * N, Eigen::Index(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i)
    U.col(i) = Eigen::Map<const Eigen::VectorXcd>(basis[i].data(), basis[i].size());
  return U;
}

}  // namespace berezin
