#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "berezin/bundles.hpp"

namespace berezin {

// f(z, zeta) = sum_{j,k <= d} f_jk(z) zeta^j conj(zeta)^k / (1+|zeta|^2)^d, zeta = l2/l1 in the
// chart frame of E_z; real-valued iff f_jk = conj(f_kj)
class TotalSymbol {
 public:
  TotalSymbol(int fiber_degree, std::vector<FrameFunction> coeffs);  // row major (d+1)^2
  static TotalSymbol pullback(const FrameFunction& g);
  // fiber stereographic coordinates
  static TotalSymbol fiber_x1();
  static TotalSymbol fiber_x2();
  static TotalSymbol fiber_x3();
  // seeded real symbol, base coefficients of bidegree <= base_degree
  static TotalSymbol random(int fiber_degree, int base_degree, std::uint64_t seed);

  int fiber_degree() const { return d_; }
  const FrameFunction& coeff(int j, int k) const { return c_[std::size_t(j) * (d_ + 1) + k]; }
  int max_base_weight() const;
  int max_base_degree() const;
  // coefficient values at a base point, row major
  std::vector<cplx> coefficients_at(ChartPoint z) const;
  // homogeneous evaluation at the line through (l1, l2)
  double eval(const std::vector<cplx>& c, cplx l1, cplx l2) const;
  double operator()(ChartPoint z, cplx zeta) const;

 private:
  int d_;
  std::vector<FrameFunction> c_;
};

// P(E^*) -> CP^1 for a rank-2 bundle setup. Over z the fiber sections are E_z with
// |s(y)|^2 = r |l s|^2 / (l W^{-1} l^dagger), so the fiber L^2 product against the fiber
// FS probability measure is W(z) itself. Fiber nodes use adapted coordinates
// l = (1, zeta') L^{-1}, W^{-1} = L L^dagger, where that measure is round in zeta'.
// The bundle is rebuilt on a log-radial base rule: chart-frame fiber coordinates are
// singular over z = infinity, which costs Gauss-Legendre in u its fast convergence.
class FibrationSetup {
 public:
  explicit FibrationSetup(BundleSetup bundle);
  FibrationSetup(BundleSetup bundle, QuadratureRule fiber_rule);

  const BundleSetup& bundle() const { return bundle_; }
  const QuadratureRule& fiber_rule() const { return fiber_rule_; }
  int p() const { return bundle_.p(); }
  int dim() const { return bundle_.dim(); }
  // base and fiber node counts doubled
  FibrationSetup refined() const;

 private:
  BundleSetup bundle_;
  QuadratureRule fiber_rule_;
};

// T_pi(f)(z); the first form is Hermitian in the fiber-orthonormal frame, the second the same
// endomorphism in the chart frame. Fiber nodes are doubled until the result settles.
Eigen::MatrixXcd fiber_quantize(const FibrationSetup& setup, const TotalSymbol& f, ChartPoint z);
Eigen::MatrixXcd fiber_quantize_chart(const FibrationSetup& setup, const TotalSymbol& f, ChartPoint z);
// closed form T_pi(f) when W(z) is a scalar multiple of Id everywhere (chart frame)
EndoSymbol fiber_quantize_symbolic(const TotalSymbol& f);

// direct quadrature over the total space on its own product rule, refined until stable
HermOp total_quantize(const FibrationSetup& setup, const TotalSymbol& f);

// || T_p(f) - T_{E_p}(T_pi(f)) ||_op
double check_functoriality(const FibrationSetup& setup, const TotalSymbol& f);

// row evaluation of H_p at the total-space point (z, zeta) in the orthonormal basis
Eigen::RowVectorXcd total_evaluation(const FibrationSetup& setup, ChartPoint z, cplx zeta);
double total_berezin_symbol(const FibrationSetup& setup, const HermOp& A, ChartPoint z, cplx zeta);
// fiber coherent projector at (z, zeta), fiber-orthonormal frame
Eigen::MatrixXcd fiber_coherent_projector(const FibrationSetup& setup, ChartPoint z, cplx zeta);

struct SymbolFunctoriality {
  // | T*_p(A) - Tr[rho T*_E(A) Pi] / Tr[rho Pi] |, the form dual to T_p = T_E T_pi
  double dual = 0.0;
  // | T*_p(A) - Tr[T*_E(A) Pi] |, agrees with the above when rho is scalar
  double literal = 0.0;
  int samples = 0;
};
SymbolFunctoriality check_symbol_functoriality(const FibrationSetup& setup, const HermOp& A, int samples = 64,
                                               std::uint64_t seed = 1);

// numerical rank of the total-space Gram over monomial sections
int total_section_count(const FibrationSetup& setup);

}  // namespace berezin
