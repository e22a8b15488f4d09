#include "berezin/geometry.hpp"

#include <cmath>
#include <sstream>

namespace berezin {

namespace {

// P_n(t) and P_n'(t)
void legendre(int n, double t, double& pn, double& dpn) {
  double p0 = 1.0, p1 = t;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  dpn = n * (t * p1 - p0) / (t * t - 1.0);
}

}  // namespace

void gauss_legendre_unit(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw ValidationError("Gauss-Legendre needs n >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(constants::kPi * (i + 0.75) / (n + 0.5));
    double pn = 0.0, dpn = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, t, pn, dpn);
      const double dt = pn / dpn;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    legendre(n, t, pn, dpn);
    const double wt = 2.0 / ((1.0 - t * t) * dpn * dpn);
    // [-1,1] -> [0,1], ascending
    x[i] = 0.5 * (1.0 - t);
    x[n - 1 - i] = 0.5 * (1.0 + t);
    w[i] = 0.5 * wt;
    w[n - 1 - i] = 0.5 * wt;
  }
  if (n % 2 == 1) x[n / 2] = 0.5;
}

namespace {

void push_rings(QuadratureRule& r, const std::vector<double>& t, const std::vector<double>& wt) {
  r.nodes.reserve(t.size() * r.angular_count);
  r.weights.reserve(r.nodes.capacity());
  for (std::size_t a = 0; a < t.size(); ++a) {
    r.radial_t.push_back(t[a]);
    r.radial_weights.push_back(wt[a]);
    const double rad = std::sqrt(t[a]);
    for (int l = 0; l < r.angular_count; ++l) {
      const double th = 2.0 * constants::kPi * l / r.angular_count;
      r.nodes.push_back(l == 0 ? cplx(rad, 0.0) : std::polar(rad, th));
      r.weights.push_back(wt[a] / r.angular_count);
    }
  }
}

}  // namespace

QuadratureRule make_log_rule(double step, double range, int angular_count, double shift) {
  if (!(step > 0.0) || !(range > 0.0) || angular_count < 1) throw ValidationError("bad log quadrature parameters");
  QuadratureRule r;
  r.angular_count = angular_count;
  r.log_step = step;
  r.log_range = range;
  r.log_shift = shift;
  const int half = static_cast<int>(std::ceil(range / step));
  std::vector<double> t, wt;
  for (int i = -half; i <= half; ++i) {
    const double x = (i + shift) * step;
    t.push_back(std::exp(x));
    // dLeb/pi = (1/2pi) dt dtheta, dt = t dx
    wt.push_back(step * std::exp(x));
  }
  r.radial_count = static_cast<int>(t.size());
  push_rings(r, t, wt);
  r.exact_bidegree = (angular_count - 1) / 2;
  return r;
}

QuadratureRule make_tensor_rule(int radial_count, int angular_count) {
  if (radial_count < 1 || angular_count < 1) throw ValidationError("empty quadrature rule");
  QuadratureRule r;
  r.radial_count = radial_count;
  r.angular_count = angular_count;
  std::vector<double> u, wu, t(radial_count), wt(radial_count);
  gauss_legendre_unit(radial_count, u, wu);
  for (int a = 0; a < radial_count; ++a) {
    // dLeb/pi = (1/2pi) dt dtheta, dt = du/(1-u)^2
    t[a] = u[a] / (1.0 - u[a]);
    wt[a] = wu[a] / ((1.0 - u[a]) * (1.0 - u[a]));
  }
  push_rings(r, t, wt);
  // exactness contract of the counts: radial degree 2n-1 in u, angular |j-k| < count
  r.exact_weight_power = 2 * radial_count - 1 + 2;
  r.exact_bidegree = (angular_count - 1) / 2;
  return r;
}

QuadratureRule make_quadrature(int m, int d) {
  if (d < 0) throw ValidationError("make_quadrature: d must be nonnegative");
  if (m < d + 2) throw ValidationError("make_quadrature: need m >= d + 2 (moments not integrable)");
  QuadratureRule r = make_tensor_rule((m + 1) / 2 + 1, 2 * d + 1);
  r.exact_bidegree = d;
  r.exact_weight_power = m;
  return r;
}

QuadratureRule QuadratureRule::refined() const {
  if (log_step > 0.0) return make_log_rule(0.5 * log_step, log_range, 2 * angular_count, 2.0 * log_shift);
  QuadratureRule r = make_tensor_rule(2 * radial_count, 2 * angular_count);
  r.exact_bidegree = std::max(exact_bidegree, r.exact_bidegree);
  r.exact_weight_power = std::max(exact_weight_power, r.exact_weight_power);
  return r;
}

namespace {

template <class T>
T pairwise_range(const T* v, std::size_t n) {
  if (n <= 8) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_range(v, h) + pairwise_range(v + h, n - h);
}

}  // namespace

cplx pairwise_sum(const std::vector<cplx>& v) { return pairwise_range(v.data(), v.size()); }
double pairwise_sum(const std::vector<double>& v) { return pairwise_range(v.data(), v.size()); }

cplx integrate(const QuadratureRule& rule, const std::function<cplx(ChartPoint)>& f) {
  std::vector<cplx> terms(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const cplx v = f(rule.nodes[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NumericalError("integrate: non-finite integrand at a quadrature node");
    terms[i] = rule.weights[i] * v;
  }
  return pairwise_sum(terms);
}

double round_density(ChartPoint z) {
  const double w = 1.0 + std::norm(z);
  return 1.0 / (w * w);
}

double round_area_density(ChartPoint z) { return round_density(z) / constants::kPi; }

BidegreePoly kernel_poly(const ProdMatrix& q) { return BidegreePoly(q.inverse()); }

namespace {

bool diagonal_coeffs(const BidegreePoly& P) {
  const auto& c = P.coeffs();
  for (Eigen::Index j = 0; j < c.rows(); ++j)
    for (Eigen::Index k = 0; k < c.cols(); ++k)
      if (j != k && c(j, k) != 0.0) return false;
  return true;
}

}  // namespace

Measure Measure::round_liouville() {
  Measure m;
  m.kind_ = Kind::RoundLiouville;
  m.density_ = FrameFunction(BidegreePoly::constant(1.0), 2);
  return m;
}

Measure Measure::liouville_of_fs(const ProdMatrix& q, int p) {
  Measure m;
  m.kind_ = Kind::LiouvilleOfFS;
  m.kernel_ = kernel_poly(q);
  m.level_ = p;
  m.radial_ = diagonal_coeffs(m.kernel_);
  return m;
}

Measure Measure::fixed_density(FrameFunction density) {
  if (!density.is_real_valued(1e-14 * (1.0 + density.numerator().coeffs().norm())))
    throw ValidationError("fixed measure density must be real-valued");
  Measure m;
  m.kind_ = Kind::FixedDensity;
  m.density_ = std::move(density);
  m.radial_ = diagonal_coeffs(m.density_.numerator());
  return m;
}

double Measure::density(ChartPoint z) const {
  double d = 0.0;
  switch (kind_) {
    case Kind::RoundLiouville:
      return round_density(z);
    case Kind::FixedDensity:
      d = density_(z).real();
      break;
    case Kind::LiouvilleOfFS:
      d = ddbar_log_at(kernel_, z).real();
      break;
  }
  if (!(d > 0.0)) throw NumericalError("measure density is not positive at a node");
  return d;
}

int Measure::numerator_degree() const {
  const auto& n = density_.numerator();
  return std::max(n.deg_z(), n.deg_zbar());
}

int Measure::weight_power() const { return density_.weight_power(); }

bool Measure::radial() const { return kind_ == Kind::RoundLiouville ? true : radial_; }

std::string Measure::name() const {
  switch (kind_) {
    case Kind::RoundLiouville:
      return "round_liouville";
    case Kind::LiouvilleOfFS:
      return "liouville_of_fs";
    case Kind::FixedDensity:
      return "fixed_density";
  }
  return "?";
}

MetricWeight MetricWeight::round(int p) {
  if (p < 0) throw ValidationError("level must be nonnegative");
  MetricWeight w;
  w.frame_ = FrameFunction(BidegreePoly::constant(1.0), p);
  w.level_ = p;
  return w;
}

MetricWeight MetricWeight::from_frame(FrameFunction f, int p) {
  MetricWeight w;
  w.frame_ = std::move(f);
  w.level_ = p;
  w.radial_ = diagonal_coeffs(w.frame_.numerator());
  return w;
}

MetricWeight MetricWeight::fubini_study(const ProdMatrix& q, int p) {
  if (q.dim() != p + 1) throw ValidationError("fs: q has the wrong dimension for level p");
  MetricWeight w;
  w.kernel_ = kernel_poly(q);
  w.level_ = p;
  w.radial_ = diagonal_coeffs(*w.kernel_);
  return w;
}

double MetricWeight::operator()(ChartPoint z) const {
  const double v = kernel_ ? 1.0 / (*kernel_)(z).real() : frame_(z).real();
  if (!(v > 0.0) || !std::isfinite(v)) throw NumericalError("metric weight not positive");
  return v;
}

std::string MetricWeight::name() const { return kernel_ ? "fubini_study" : "frame"; }

double fs_kahler_density(const ProdMatrix& q, int p, ChartPoint z) {
  if (q.dim() != p + 1) throw ValidationError("fs_kahler_density: dimension mismatch");
  if (p == 0) return 0.0;
  const double d = ddbar_log_at(kernel_poly(q), z).real();
  if (!(d > 0.0)) throw NumericalError("Fubini-Study density not positive");
  return d;
}

double laplace_beltrami_at(const PointDensity& area_density, const FrameFunction& f, ChartPoint z) {
  const double a = area_density(z);
  if (!(a > kDefaultFloor)) throw NumericalError("degenerate area density");
  return -4.0 / a * f.d_z().d_zbar()(z).real();
}

double laplace_beltrami_at(const PointDensity& area_density, const BidegreePoly& P,
                           const BidegreePoly& Q, ChartPoint z) {
  const double a = area_density(z);
  if (!(a > kDefaultFloor)) throw NumericalError("degenerate area density");
  return -4.0 / a * ratio_ddbar_at(P, Q, z).real();
}

cplx poisson_from_derivatives(cplx fz, cplx fzb, cplx gz, cplx gzb, double sigma, double kappa_P) {
  if (!(sigma > kDefaultFloor)) throw NumericalError("degenerate symplectic density");
  return kappa_P * cplx(0.0, 1.0) * (fz * gzb - fzb * gz) / sigma;
}

double poisson_bracket_at(const PointDensity& omega_density, const FrameFunction& f,
                          const FrameFunction& g, ChartPoint z, double kappa_P) {
  return poisson_from_derivatives(f.d_z()(z), f.d_zbar()(z), g.d_z()(z), g.d_zbar()(z),
                                  omega_density(z), kappa_P)
      .real();
}

}  // namespace berezin
