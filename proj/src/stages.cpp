#include "berezin/stages.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "berezin/linalg.hpp"
#include "berezin/parallel.hpp"

namespace berezin {

// TotalSymbol

TotalSymbol::TotalSymbol(int fiber_degree, std::vector<FrameFunction> coeffs) : d_(fiber_degree), c_(std::move(coeffs)) {
  if (d_ < 0 || d_ > 15) throw ValidationError("fiber degree must be in 0..15");
  if (c_.size() != std::size_t(d_ + 1) * (d_ + 1)) throw ValidationError("total symbol needs (d+1)^2 coefficients");
  for (const auto& c : c_)
    if (!c.is_bounded()) throw ValidationError("total symbol coefficients must be bounded on the base");
  // f_jk = conj(f_kj) as functions, checked on a few points
  const cplx probe[] = {{0.0, 0.0}, {0.3, -0.2}, {1.1, 0.7}, {-2.0, 0.4}, {0.05, 3.0}};
  for (int j = 0; j <= d_; ++j)
    for (int k = 0; k <= d_; ++k)
      for (cplx z : probe) {
        const cplx a = coeff(j, k)(z), b = std::conj(coeff(k, j)(z));
        if (std::abs(a - b) > 1e-12 * (1.0 + std::abs(a))) throw ValidationError("total symbol is not real-valued");
      }
}

TotalSymbol TotalSymbol::pullback(const FrameFunction& g) {
  if (!g.is_real_valued(1e-14)) throw ValidationError("pullback symbol must be real-valued");
  return TotalSymbol(0, {g});
}

namespace {

TotalSymbol from_fiber_frame(const FrameFunction& h) {
  std::vector<FrameFunction> c(4, FrameFunction::constant(0.0));
  const FrameFunction one = h.lifted(1);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) c[j * 2 + k] = FrameFunction::constant(one.numerator().coeff(j, k));
  return TotalSymbol(1, std::move(c));
}

}  // namespace

TotalSymbol TotalSymbol::fiber_x1() { return from_fiber_frame(FrameFunction::x1()); }
TotalSymbol TotalSymbol::fiber_x2() { return from_fiber_frame(FrameFunction::x2()); }
TotalSymbol TotalSymbol::fiber_x3() { return from_fiber_frame(FrameFunction::x3()); }

TotalSymbol TotalSymbol::random(int fiber_degree, int base_degree, std::uint64_t seed) {
  if (fiber_degree < 0 || base_degree < 0) throw ValidationError("degrees must be nonnegative");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = fiber_degree + 1;
  std::vector<FrameFunction> c(std::size_t(n) * n, FrameFunction::constant(0.0));
  auto draw = [&] {
    Eigen::MatrixXcd m(base_degree + 1, base_degree + 1);
    for (int a = 0; a <= base_degree; ++a)
      for (int b = 0; b <= base_degree; ++b) {
        const double re = g(gen);
        const double im = g(gen);
        m(a, b) = cplx(re, im) / double(1 + a + b);
      }
    return FrameFunction(BidegreePoly(m), base_degree);
  };
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      FrameFunction h = draw();
      if (j == k) {
        FrameFunction re(h.numerator() + h.numerator().conj(), base_degree);
        c[j * n + j] = 0.5 * re;
      } else {
        c[j * n + k] = h;
        c[k * n + j] = FrameFunction(h.numerator().conj(), base_degree);
      }
    }
  return TotalSymbol(fiber_degree, std::move(c));
}

int TotalSymbol::max_base_weight() const {
  int m = 0;
  for (const auto& c : c_) m = std::max(m, c.weight_power());
  return m;
}

int TotalSymbol::max_base_degree() const {
  int m = 0;
  for (const auto& c : c_) m = std::max({m, c.numerator().deg_z(), c.numerator().deg_zbar()});
  return m;
}

std::vector<cplx> TotalSymbol::coefficients_at(ChartPoint z) const {
  std::vector<cplx> v(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) v[i] = c_[i](z);
  return v;
}

double TotalSymbol::eval(const std::vector<cplx>& c, cplx l1, cplx l2) const {
  // zeta^j zetabar^k / (1+|zeta|^2)^d = l2^j l1^{d-j} conj(l2^k l1^{d-k}) / |l|^{2d}
  const double nrm = std::norm(l1) + std::norm(l2);
  const double s = 1.0 / std::sqrt(nrm);
  const cplx a = l1 * s, b = l2 * s;
  if (d_ == 0) return c[0].real();
  if (d_ == 1) {
    const cplx ab = a * std::conj(b);
    return (c[0] * std::norm(a) + c[3] * std::norm(b)).real() + 2.0 * (c[1] * ab).real();
  }
  cplx mono[16];
  cplx bj = 1.0;
  for (int j = 0; j <= d_; ++j, bj *= b) mono[j] = bj * std::pow(a, d_ - j);
  cplx acc = 0.0;
  for (int j = 0; j <= d_; ++j) {
    cplx row = 0.0;
    for (int k = 0; k <= d_; ++k) row += c[std::size_t(j) * (d_ + 1) + k] * std::conj(mono[k]);
    acc += mono[j] * row;
  }
  return acc.real();
}

double TotalSymbol::operator()(ChartPoint z, cplx zeta) const { return eval(coefficients_at(z), 1.0, zeta); }

// FibrationSetup

namespace {

constexpr double kLogRange = 38.0;

// the integrands carry poles of order ~ p at x = +-i pi
double log_step(const BundleSetup& b) { return std::min(0.25, 2.5 / (b.p() + b.spec().max_degree() + 2)); }

BundleSetup on_log_rule(const BundleSetup& b) {
  if (b.rank() != 2) throw ValidationError("fibration needs a rank-2 bundle");
  QuadratureRule rule = make_log_rule(log_step(b), kLogRange, b.space().operator_rule().angular_count);
  return BundleSetup(b.spec(), b.p(), b.metric(), b.measure(), std::move(rule));
}

}  // namespace

FibrationSetup::FibrationSetup(BundleSetup bundle)
    : FibrationSetup(bundle, make_log_rule(1.0 / 3.0, kLogRange, 5)) {}

FibrationSetup::FibrationSetup(BundleSetup bundle, QuadratureRule fiber_rule)
    : bundle_(on_log_rule(bundle)), fiber_rule_(std::move(fiber_rule)) {
  if (fiber_rule_.size() == 0) throw ValidationError("empty fiber rule");
}

FibrationSetup FibrationSetup::refined() const {
  FibrationSetup r = *this;
  r.bundle_ = BundleSetup(bundle_.spec(), bundle_.p(), bundle_.metric(), bundle_.measure(), bundle_.rule().refined());
  r.fiber_rule_ = fiber_rule_.refined();
  return r;
}

namespace {

// W normalized to unit trace (T_pi only sees W projectively); l = l'' P puts both the
// fiber metric and the standard form of E_z^* in diagonal form, |l''|^2 and l'' D l''^dagger
struct FiberFrame {
  Eigen::Matrix2cd W;
  double scale = 1.0;
  Eigen::Matrix2cd P;
};

FiberFrame fiber_frame_at(const BundleSetup& b, ChartPoint z) {
  FiberFrame F;
  const Eigen::Matrix2cd W = b.metric()(z);
  F.scale = W.trace().real();
  if (!(F.scale > 0.0) || !std::isfinite(F.scale)) throw NumericalError("fiber metric degenerate at a base node");
  F.W = 0.5 * (W + W.adjoint()) / F.scale;
  const Eigen::Matrix2cd Winv = F.W.inverse();
  Eigen::LLT<Eigen::Matrix2cd> llt(0.5 * (Winv + Winv.adjoint()));
  if (llt.info() != Eigen::Success) throw NumericalError("fiber metric not positive definite");
  const Eigen::Matrix2cd Linv = Eigen::Matrix2cd(llt.matrixL()).inverse();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(Linv * Linv.adjoint());
  F.P = es.eigenvectors().adjoint() * Linv;
  return F;
}

// r int f l^dagger l / (l W^{-1} l^dagger) dnu_fiber, chart frame, W normalized.
// In the diagonal coordinates every denominator is radial, so the angular trapezoid is
// exact from 2d + 3 points on; the radial rule is trapezoid in log t.
Eigen::Matrix2cd fiber_weighted(const FibrationSetup& setup, const TotalSymbol& f, const std::vector<cplx>& c,
                                const FiberFrame& F) {
  const QuadratureRule& rule = setup.fiber_rule();
  const int na = std::max(rule.angular_count, 2 * f.fiber_degree() + 3);
  Eigen::Matrix2cd M = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < rule.radial_count; ++a) {
    const double t = rule.radial_t[a];
    const double wr = rule.radial_weights[a] / ((1.0 + t) * (1.0 + t)) / na;
    const double g = 2.0 / (1.0 + t);
    const double rad = std::sqrt(t);
    Eigen::Matrix2cd ring = Eigen::Matrix2cd::Zero();
    for (int l = 0; l < na; ++l) {
      const cplx zp = l == 0 ? cplx(rad, 0.0) : std::polar(rad, 2.0 * constants::kPi * l / na);
      const Eigen::RowVector2cd ell = Eigen::RowVector2cd(1.0, zp) * F.P;
      const double fv = f.eval(c, ell(0), ell(1));
      ring.noalias() += fv * (ell.adjoint() * ell);
    }
    M += (wr * g) * ring;
  }
  return M;
}

}  // namespace

Eigen::MatrixXcd fiber_quantize_chart(const FibrationSetup& setup, const TotalSymbol& f, ChartPoint z) {
  const FiberFrame F = fiber_frame_at(setup.bundle(), z);
  return F.W.inverse() * fiber_weighted(setup, f, f.coefficients_at(z), F);
}

Eigen::MatrixXcd fiber_quantize(const FibrationSetup& setup, const TotalSymbol& f, ChartPoint z) {
  const FiberFrame F = fiber_frame_at(setup.bundle(), z);
  Eigen::LLT<Eigen::Matrix2cd> llt(F.W);
  if (llt.info() != Eigen::Success) throw NumericalError("fiber metric not positive definite");
  const Eigen::Matrix2cd Rinv = Eigen::Matrix2cd(llt.matrixU()).inverse();
  // R T R^{-1} = R^{-dagger} (W T) R^{-1}, invariant under scaling W
  Eigen::Matrix2cd T = Rinv.adjoint() * fiber_weighted(setup, f, f.coefficients_at(z), F) * Rinv;
  return 0.5 * (T + T.adjoint());
}

EndoSymbol fiber_quantize_symbolic(const TotalSymbol& f) {
  const int d = f.fiber_degree();
  // 2 int t^n (1+t)^{-(d+3)} dt = 2 n! (d+1-n)! / (d+2)!
  auto beta = [d](int n) {
    if (n < 0 || n > d + 1) return 0.0;
    return 2.0 * std::tgamma(n + 1.0) * std::tgamma(d + 2.0 - n) / std::tgamma(d + 3.0);
  };
  const int m = f.max_base_weight();
  EndoSymbol T(2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      FrameFunction acc(BidegreePoly::constant(0.0), m);
      for (int j = 0; j <= d; ++j) {
        const int k = j + b - a;
        if (k < 0 || k > d) continue;
        acc += beta(j + b) * f.coeff(j, k).lifted(m);
      }
      T(a, b) = acc;
    }
  return T;
}

namespace {

// unnormalized W T_pi(f) at z
Eigen::Matrix2cd weighted_at(const FibrationSetup& setup, const TotalSymbol& f, ChartPoint z) {
  const FiberFrame F = fiber_frame_at(setup.bundle(), z);
  return F.scale * fiber_weighted(setup, f, f.coefficients_at(z), F);
}

// sum over base nodes of w (V C)^dagger (W T_pi f) (V C), reduced in node order
Eigen::MatrixXcd total_on_rule(const FibrationSetup& setup, const TotalSymbol& f, const QuadratureRule& rule) {
  const BundleSetup& b = setup.bundle();
  const SectionModel& model = b.space().model();
  const Eigen::MatrixXcd& C = b.space().basis();
  const int N = b.dim();
  std::vector<Eigen::Matrix2cd> M(rule.size());
  parallel_for(rule.size(), [&](std::size_t n) {
    const ChartPoint z = rule.nodes[n];
    M[n] = (rule.weights[n] * model.density(z)) * weighted_at(setup, f, z);
  });
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(N, N);
  for (std::size_t n = 0; n < rule.size(); ++n) {
    const Eigen::MatrixXcd VC = model.evaluation(rule.nodes[n]) * C;
    T.noalias() += VC.adjoint() * M[n] * VC;
  }
  return 0.5 * (T + T.adjoint());
}

}  // namespace

HermOp total_quantize(const FibrationSetup& setup, const TotalSymbol& f) {
  // own base nodes, offset by half a step from the bundle rule, two more angles
  const QuadratureRule& b = setup.bundle().rule();
  const QuadratureRule rule = make_log_rule(b.log_step, b.log_range, b.angular_count + 2, b.log_shift + 0.5);
  return HermOp(total_on_rule(setup, f, rule));
}

double check_functoriality(const FibrationSetup& setup, const TotalSymbol& f) {
  const HermOp Tp = total_quantize(setup, f);
  const HermOp Tc = bundle_toeplitz(setup.bundle(), [&](ChartPoint z) { return fiber_quantize_chart(setup, f, z); });
  return op_norm(Tp.matrix() - Tc.matrix());
}

Eigen::RowVectorXcd total_evaluation(const FibrationSetup& setup, ChartPoint z, cplx zeta) {
  const BundleSetup& b = setup.bundle();
  const Eigen::Matrix2cd W = b.metric()(z);
  const Eigen::RowVector2cd ell(1.0, zeta);
  const double den = (ell * W.inverse() * ell.adjoint())(0, 0).real();
  const double g = b.rank() / den;
  return std::sqrt(g) * (ell * b.space().model().evaluation(z) * b.space().basis());
}

double total_berezin_symbol(const FibrationSetup& setup, const HermOp& A, ChartPoint z, cplx zeta) {
  const Eigen::RowVectorXcd e = total_evaluation(setup, z, zeta);
  return (e * A.matrix() * e.adjoint())(0, 0).real() / e.squaredNorm();
}

Eigen::MatrixXcd fiber_coherent_projector(const FibrationSetup& setup, ChartPoint z, cplx zeta) {
  const Eigen::MatrixXcd R = setup.bundle().space().fiber_frame(z);
  const Eigen::RowVector2cd ell(1.0, zeta);
  const Eigen::RowVectorXcd u = ell * R.inverse();
  return u.adjoint() * u / u.squaredNorm();
}

SymbolFunctoriality check_symbol_functoriality(const FibrationSetup& setup, const HermOp& A, int samples,
                                               std::uint64_t seed) {
  if (A.dim() != setup.dim()) throw ValidationError("operator dimension does not match the section space");
  if (samples < 1) throw ValidationError("need at least one sample");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> rad(0.0, 1.0), ang(0.0, 2.0 * constants::kPi);
  SymbolFunctoriality out;
  out.samples = samples;
  const BundleSetup& b = setup.bundle();
  for (int s = 0; s < samples; ++s) {
    // points spread over the sphere: |z| = tan(theta/2) for uniform cos theta
    const double c1 = 2.0 * rad(gen) - 1.0;
    const double a1 = ang(gen);
    const double c2 = 2.0 * rad(gen) - 1.0;
    const double a2 = ang(gen);
    const ChartPoint z = std::polar(std::sqrt((1.0 - c1) / (1.0 + c1 + 1e-300)), a1);
    const cplx zeta = std::polar(std::sqrt((1.0 - c2) / (1.0 + c2 + 1e-300)), a2);
    const double lhs = total_berezin_symbol(setup, A, z, zeta);
    const Eigen::MatrixXcd rho = bundle_rawnsley(b, z);
    const Eigen::MatrixXcd TE = bundle_berezin_symbol(b, A, z);
    const Eigen::MatrixXcd Pi = fiber_coherent_projector(setup, z, zeta);
    const double dual = (rho * TE * Pi).trace().real() / (rho * Pi).trace().real();
    const double literal = (TE * Pi).trace().real();
    out.dual = std::max(out.dual, std::abs(lhs - dual));
    out.literal = std::max(out.literal, std::abs(lhs - literal));
  }
  return out;
}

int total_section_count(const FibrationSetup& setup) {
  const BundleSetup& b = setup.bundle();
  const SectionModel& model = b.space().model();
  const QuadratureRule& rule = b.rule();
  const TotalSymbol one = TotalSymbol::pullback(FrameFunction::constant(1.0));
  std::vector<Eigen::Matrix2cd> M(rule.size());
  parallel_for(rule.size(), [&](std::size_t n) {
    const ChartPoint z = rule.nodes[n];
    M[n] = (rule.weights[n] * model.density(z)) * weighted_at(setup, one, z);
  });
  const int N = b.dim();
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(N, N);
  for (std::size_t n = 0; n < rule.size(); ++n) {
    const Eigen::MatrixXcd V = model.evaluation(rule.nodes[n]);
    G.noalias() += V.adjoint() * M[n] * V;
  }
  // monomials have wildly different norms; rank of the unit-diagonal rescaling
  Eigen::VectorXd s = G.diagonal().real().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXcd Gs = s.asDiagonal() * G * s.asDiagonal();
  const Eigen::VectorXd ev = hermitian_eigenvalues(0.5 * (Gs + Gs.adjoint()));
  const double top = ev.maxCoeff();
  int rank = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > 1e-12 * top) ++rank;
  return rank;
}

}  // namespace berezin
