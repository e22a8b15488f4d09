#include "berezin/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace berezin {

SectionModel QuantumSetup::model(int p, const MetricWeight& metric, const Measure& measure) {
  if (p < 0) throw ValidationError("level p must be nonnegative");
  if (metric.level() != p) throw ValidationError("metric level does not match p");
  SectionModel m;
  m.p = p;
  m.degrees = {0};
  m.fiber_metric = [metric](ChartPoint z) {
    Eigen::MatrixXcd W(1, 1);
    W(0, 0) = metric(z);
    return W;
  };
  m.density = [measure](ChartPoint z) { return measure.density(z); };
  m.radial = metric.radial() && measure.radial();
  m.polynomial = metric.polynomial() && measure.polynomial();
  if (m.polynomial) {
    const auto& num = metric.frame().numerator();
    m.exact_m = metric.frame().weight_power() + measure.weight_power();
    m.exact_d = p + std::max(num.deg_z(), num.deg_zbar()) + measure.numerator_degree();
  } else {
    m.exact_m = 2 * p + 4;
    m.exact_d = 2 * p;
  }
  return m;
}

QuantumSetup::QuantumSetup(int p, MetricWeight metric, Measure measure)
    : p_(p), metric_(std::move(metric)), measure_(std::move(measure)) {
  space_ = std::make_shared<const SectionSpace>(model(p_, metric_, measure_));
}

QuantumSetup::QuantumSetup(int p, MetricWeight metric, Measure measure, QuadratureRule rule)
    : p_(p), metric_(std::move(metric)), measure_(std::move(measure)) {
  space_ = std::make_shared<const SectionSpace>(model(p_, metric_, measure_), std::move(rule));
}

QuantumSetup QuantumSetup::round(int p) {
  return QuantumSetup(p, MetricWeight::round(p), Measure::round_liouville());
}

Eigen::VectorXcd QuantumSetup::coherent_vector(ChartPoint z) const {
  return space_->ev(z).row(0).transpose();
}

SpectrumReport make_spectrum_report(int p, std::vector<double> evals, std::string method,
                                    nlohmann::json setup, double tol) {
  std::sort(evals.begin(), evals.end(), std::greater<double>());
  SpectrumReport r;
  r.p = p;
  r.dimension = static_cast<int>(evals.size());
  r.cluster_tol = tol;
  const Clustered c = cluster_descending(evals, tol);
  r.eigenvalues = c.values;
  r.multiplicities = c.multiplicities;
  r.all_eigenvalues = std::move(evals);
  r.method = std::move(method);
  r.setup = std::move(setup);
  return r;
}

ProdMatrix gram(const QuantumSetup& setup) { return setup.space().gram(); }

ProdMatrix hilb(const QuantumSetup& setup) {
  const double vol = setup.space().mass();
  return ProdMatrix(double(setup.dim()) / vol * setup.space().gram().matrix());
}

ProdMatrix hilb(const MetricWeight& metric, const Measure& measure, int p) {
  return hilb(QuantumSetup(p, metric, measure));
}

MetricWeight fs(const ProdMatrix& q, int p) { return MetricWeight::fubini_study(q, p); }

HermOp toeplitz(const QuantumSetup& setup, const FrameFunction& f) {
  const double tol = 1e-12 * (1.0 + f.numerator().coeffs().norm());
  if (!f.is_real_valued(tol)) throw ValidationError("toeplitz: symbol is not real-valued");
  return toeplitz(setup, std::function<double(ChartPoint)>([&f](ChartPoint z) { return f(z).real(); }));
}

HermOp toeplitz(const QuantumSetup& setup, const std::function<double(ChartPoint)>& f) {
  return HermOp(setup.space().toeplitz_scalar(f));
}

HermOp coherent_projector(const QuantumSetup& setup, ChartPoint z) {
  const Eigen::VectorXcd phi = setup.coherent_vector(z);
  return HermOp(phi.conjugate() * phi.transpose() / phi.squaredNorm());
}

double rawnsley(const QuantumSetup& setup, ChartPoint z) { return setup.coherent_vector(z).squaredNorm(); }

double berezin_symbol(const QuantumSetup& setup, const HermOp& A, ChartPoint z) {
  const Eigen::VectorXcd phi = setup.coherent_vector(z);
  const cplx v = phi.transpose() * A.matrix() * phi.conjugate();
  return v.real() / phi.squaredNorm();
}

Eigen::MatrixXcd berezin_operator(const QuantumSetup& setup) {
  return assemble_berezin_dense(setup.space().coherent_nodes(false), setup.dim());
}

Eigen::MatrixXd berezin_operator_hermitian(const QuantumSetup& setup) {
  return assemble_berezin_hermitian(setup.space().coherent_nodes(false), setup.dim());
}

namespace {

nlohmann::json describe_setup(const QuantumSetup& s) {
  return {{"kind", "scalar"},
          {"p", s.p()},
          {"metric", s.metric().name()},
          {"measure", s.measure().name()},
          {"rule", {{"radial", s.rule().radial_count}, {"angular", s.rule().angular_count}}}};
}

}  // namespace

SpectrumReport berezin_spectrum(const QuantumSetup& setup, bool force_dense) {
  const int N = setup.dim();
  std::vector<double> ev;
  std::string method;
  if (setup.rotation_invariant() && !force_dense) {
    ev = berezin_sector_eigenvalues(setup.space().coherent_nodes(true), setup.space().model().charges(), N);
    method = "sector";
  } else {
    const Eigen::VectorXd e = hermitian_eigenvalues(berezin_operator(setup));
    ev.assign(e.data(), e.data() + e.size());
    method = "dense";
  }
  return make_spectrum_report(setup.p(), std::move(ev), method, describe_setup(setup));
}

double gamma_closed_form(int k, int p) {
  // exp of log-gamma keeps large p finite
  return std::exp(std::lgamma(p + 1.0) + std::lgamma(p + 2.0) - std::lgamma(p - k + 1.0) -
                  std::lgamma(p + k + 2.0));
}

ProdMatrix round_balanced(int p) {
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(p + 1, p + 1);
  for (int j = 0; j <= p; ++j)
    q(j, j) = std::exp(std::lgamma(j + 1.0) + std::lgamma(p - j + 1.0) - std::lgamma(p + 1.0));
  return ProdMatrix(q);
}

namespace {

struct CommutatorPieces {
  Eigen::MatrixXcd comm;  // [T(x1), T(x2)]
  Eigen::MatrixXcd tb;    // T of the bracket with kappa = 1
};

CommutatorPieces commutator_pieces(int p) {
  const QuantumSetup s = QuantumSetup::round(p);
  const FrameFunction f = FrameFunction::x1(), g = FrameFunction::x2();
  const Eigen::MatrixXcd T1 = toeplitz(s, f).matrix(), T2 = toeplitz(s, g).matrix();
  const FrameFunction fz = f.d_z(), fzb = f.d_zbar(), gz = g.d_z(), gzb = g.d_zbar();
  auto bracket = [&](ChartPoint z) {
    return poisson_from_derivatives(fz(z), fzb(z), gz(z), gzb(z), round_density(z), 1.0).real();
  };
  return {T1 * T2 - T2 * T1, toeplitz(s, std::function<double(ChartPoint)>(bracket)).matrix()};
}

}  // namespace

double fit_poisson_constant(int p) {
  const CommutatorPieces c = commutator_pieces(p);
  const Eigen::MatrixXcd E = cplx(0.0, 1.0 / (2.0 * constants::kPi * p)) * c.tb;
  const cplx num = (E.adjoint() * c.comm).trace();
  return num.real() / E.squaredNorm();
}

double commutator_residual(int p, double kappa_P) {
  const CommutatorPieces c = commutator_pieces(p);
  const Eigen::MatrixXcd E = cplx(0.0, kappa_P / (2.0 * constants::kPi * p)) * c.tb;
  return double(p) * p * op_norm(c.comm - E);
}

}  // namespace berezin
