#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "berezin/geometry.hpp"
#include "berezin/linalg.hpp"
#include "berezin/section_space.hpp"
#include "berezin/types.hpp"
#include "json.hpp"

namespace berezin {

inline constexpr double kClusterTol = 1e-6;

// (L^p, h, nu) on CP^1 with its quadrature; sections z^0 ... z^p
class QuantumSetup {
 public:
  QuantumSetup(int p, MetricWeight metric, Measure measure);
  QuantumSetup(int p, MetricWeight metric, Measure measure, QuadratureRule rule);
  static QuantumSetup round(int p);

  int p() const { return p_; }
  int dim() const { return p_ + 1; }
  const MetricWeight& metric() const { return metric_; }
  const Measure& measure() const { return measure_; }
  const QuadratureRule& rule() const { return space_->rule(); }
  const SectionSpace& space() const { return *space_; }
  bool rotation_invariant() const { return space_->model().radial; }
  // phi_a = e_a(z) sqrt(w(z)) for the orthonormal basis e_a
  Eigen::VectorXcd coherent_vector(ChartPoint z) const;

 private:
  static SectionModel model(int p, const MetricWeight& metric, const Measure& measure);
  int p_;
  MetricWeight metric_;
  Measure measure_;
  std::shared_ptr<const SectionSpace> space_;
};

struct SpectrumReport {
  int p = 0;
  int dimension = 0;                 // size of the operator's domain
  std::vector<double> all_eigenvalues;  // decreasing, with repetition
  std::vector<double> eigenvalues;      // distinct levels, decreasing
  std::vector<int> multiplicities;
  double cluster_tol = kClusterTol;
  std::string method;  // "sector" or "dense"
  nlohmann::json setup;
};

SpectrumReport make_spectrum_report(int p, std::vector<double> evals, std::string method,
                                    nlohmann::json setup, double tol = kClusterTol);

ProdMatrix gram(const QuantumSetup& setup);
ProdMatrix hilb(const QuantumSetup& setup);
ProdMatrix hilb(const MetricWeight& metric, const Measure& measure, int p);
MetricWeight fs(const ProdMatrix& q, int p);

HermOp toeplitz(const QuantumSetup& setup, const FrameFunction& f);
HermOp toeplitz(const QuantumSetup& setup, const std::function<double(ChartPoint)>& f);
HermOp coherent_projector(const QuantumSetup& setup, ChartPoint z);
double rawnsley(const QuantumSetup& setup, ChartPoint z);
double berezin_symbol(const QuantumSetup& setup, const HermOp& A, ChartPoint z);

// C(A) = int tr(Pi A) Pi rho dnu on vec(End(H)), vec index a + N b
Eigen::MatrixXcd berezin_operator(const QuantumSetup& setup);
// the same operator on Herm(N) in the hermitian_basis ordering
Eigen::MatrixXd berezin_operator_hermitian(const QuantumSetup& setup);
SpectrumReport berezin_spectrum(const QuantumSetup& setup, bool force_dense = false);

// p!(p+1)! / ((p-k)!(p+k+1)!)
double gamma_closed_form(int k, int p);
// diag(1 / binom(p, j))
ProdMatrix round_balanced(int p);

// least-squares kappa in [T(x1),T(x2)] = (i/2 pi p) T({x1,x2}_kappa) on the round setup
double fit_poisson_constant(int p);
// p^2 || [T(x1),T(x2)] - (i/2 pi p) T({x1,x2}) ||_op on the round setup
double commutator_residual(int p, double kappa_P = constants::kPoissonConstant);

}  // namespace berezin
