#pragma once

#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "berezin/hermpoly.hpp"
#include "berezin/types.hpp"

namespace berezin {

// affine coordinate of the chart containing everything but the south pole (z = infinity)
using ChartPoint = cplx;

namespace constants {
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kVolRound = 1.0;
// Laplace eigenvalues of the area-one round sphere: 4 pi k (k+1)
inline constexpr double kLambda1 = 8.0 * kPi;
inline constexpr double kScalRound = 8.0 * kPi;
// Ric = c omega with omega of total area one
inline constexpr double kCKE = 4.0 * kPi;
// Casimir units of the Kodaira spectra -> area-one units
inline constexpr double kKappa = 2.0 * kPi;
// Poisson bracket constant, see poisson_bracket_at. Sign from the commutator
// fit at p = 12, magnitude from its p -> infinity limit.
inline constexpr double kPoissonConstant = 2.0 * kPi;
inline constexpr int kPoissonFitLevel = 12;
}  // namespace constants

inline double lambda_k(int k) { return 4.0 * constants::kPi * k * (k + 1); }

struct QuadratureRule {
  std::vector<ChartPoint> nodes;
  std::vector<double> weights;  // against Lebesgue / pi
  int exact_bidegree = 0;
  int exact_weight_power = 0;
  // tensor structure: node index = a * angular_count + l, theta_l = 2 pi l / angular_count
  int radial_count = 0;
  int angular_count = 0;
  double log_step = 0.0;  // > 0: trapezoid radial nodes in log t instead of Gauss-Legendre in u
  double log_range = 0.0;
  double log_shift = 0.0;
  std::vector<double> radial_t;        // |z|^2 of radial node a
  std::vector<double> radial_weights;  // angular sum of the weights of ring a

  std::size_t size() const { return nodes.size(); }
  QuadratureRule refined() const;  // both node counts doubled
};

// radial Gauss-Legendre in u = t/(1+t), ceil(m/2)+1 nodes, uniform 2d+1 angles
QuadratureRule make_quadrature(int m, int d);
QuadratureRule make_tensor_rule(int radial_count, int angular_count);
// radial trapezoid in x = log t on [-range, range]; exponentially accurate for integrands
// analytic in a strip around the real x axis, including chart-frame data with log
// singularities at the poles. No polynomial exactness claim.
// nodes at x = (i + shift) step
QuadratureRule make_log_rule(double step, double range, int angular_count, double shift = 0.0);

// Gauss-Legendre on [0,1]
void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w);

// rule-weighted sum, pairwise reduction; f must include the measure density
cplx integrate(const QuadratureRule& rule, const std::function<cplx(ChartPoint)>& f);
// pairwise sum of a value list (deterministic tree)
cplx pairwise_sum(const std::vector<cplx>& v);
double pairwise_sum(const std::vector<double>& v);

double round_density(ChartPoint z);  // (1+|z|^2)^{-2} per Lebesgue/pi, mass 1

// K_q(z) = sum (q^{-1})_{jk} z^j zbar^k
BidegreePoly kernel_poly(const ProdMatrix& q);

class Measure {
 public:
  enum class Kind { RoundLiouville, LiouvilleOfFS, FixedDensity };

  static Measure round_liouville();
  static Measure liouville_of_fs(const ProdMatrix& q, int p);
  static Measure fixed_density(FrameFunction density);

  Kind kind() const { return kind_; }
  // density per Lebesgue/pi
  double density(ChartPoint z) const;
  // exactness needs for polynomial densities: numerator degree and weight power
  bool polynomial() const { return kind_ != Kind::LiouvilleOfFS; }
  int numerator_degree() const;
  int weight_power() const;
  bool radial() const;
  std::string name() const;
  const BidegreePoly& kernel() const { return kernel_; }
  int level() const { return level_; }
  const FrameFunction& frame_density() const { return density_; }

 private:
  Kind kind_ = Kind::RoundLiouville;
  FrameFunction density_;
  BidegreePoly kernel_;
  int level_ = 0;
  bool radial_ = true;
};

// pointwise metric weight w on L^p: |s|^2 = |f_s|^2 w
class MetricWeight {
 public:
  static MetricWeight round(int p);
  static MetricWeight from_frame(FrameFunction w, int p);
  static MetricWeight fubini_study(const ProdMatrix& q, int p);

  double operator()(ChartPoint z) const;
  int level() const { return level_; }
  bool polynomial() const { return !kernel_.has_value(); }
  bool radial() const { return radial_; }
  const FrameFunction& frame() const { return frame_; }
  const std::optional<BidegreePoly>& kernel() const { return kernel_; }
  std::string name() const;

 private:
  FrameFunction frame_;
  std::optional<BidegreePoly> kernel_;
  int level_ = 0;
  bool radial_ = true;
};

// Liouville density of omega_FS(q) per Lebesgue/pi
double fs_kahler_density(const ProdMatrix& q, int p, ChartPoint z);

using PointDensity = std::function<double(ChartPoint)>;

// Delta f = -(4/a) d dbar f, a = Riemannian area density per Lebesgue (not /pi)
double laplace_beltrami_at(const PointDensity& area_density, const FrameFunction& f, ChartPoint z);
double laplace_beltrami_at(const PointDensity& area_density, const BidegreePoly& P,
                           const BidegreePoly& Q, ChartPoint z);
// area density of the round area-one sphere per Lebesgue
double round_area_density(ChartPoint z);

// {f,g} = kappa_P i (f_z g_zbar - f_zbar g_z) / sigma, sigma = omega density per Lebesgue/pi
double poisson_bracket_at(const PointDensity& omega_density, const FrameFunction& f,
                          const FrameFunction& g, ChartPoint z,
                          double kappa_P = constants::kPoissonConstant);
// same bracket from precomputed first derivatives
cplx poisson_from_derivatives(cplx fz, cplx fzb, cplx gz, cplx gzb, double sigma,
                              double kappa_P = constants::kPoissonConstant);

}  // namespace berezin
