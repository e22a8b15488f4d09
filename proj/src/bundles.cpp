#include "berezin/bundles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "berezin/linalg.hpp"

namespace berezin {

int BundleSpec::dim(int p) const {
  int n = 0;
  for (int a : degrees) n += p + a + 1;
  return n;
}

int BundleSpec::min_degree() const { return *std::min_element(degrees.begin(), degrees.end()); }
int BundleSpec::max_degree() const { return *std::max_element(degrees.begin(), degrees.end()); }

void BundleSpec::validate(int p) const {
  if (degrees.empty()) throw ValidationError("bundle needs at least one summand");
  if (p < 0) throw ValidationError("level p must be nonnegative");
  if (p + min_degree() < 0) throw ValidationError("level too small: p + a_i must be nonnegative");
}

// EndoSymbol

EndoSymbol::EndoSymbol(int r) : r_(r), e_(std::size_t(r) * r, FrameFunction::constant(0.0)) {
  if (r < 1) throw ValidationError("endomorphism rank must be positive");
}

EndoSymbol EndoSymbol::identity(int r) { return scalar(FrameFunction::constant(1.0), r); }

EndoSymbol EndoSymbol::scalar(const FrameFunction& f, int r) {
  EndoSymbol s(r);
  for (int i = 0; i < r; ++i) s(i, i) = f;
  return s;
}

EndoSymbol EndoSymbol::diagonal(const std::vector<FrameFunction>& d) {
  EndoSymbol s(static_cast<int>(d.size()));
  for (int i = 0; i < s.r_; ++i) s(i, i) = d[i];
  return s;
}

Eigen::MatrixXcd EndoSymbol::at(ChartPoint z) const {
  Eigen::MatrixXcd M(r_, r_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < r_; ++j) M(i, j) = (*this)(i, j)(z);
  return M;
}

EndoSymbol EndoSymbol::d_z() const {
  EndoSymbol s(r_);
  for (std::size_t i = 0; i < e_.size(); ++i) s.e_[i] = e_[i].d_z();
  return s;
}

EndoSymbol EndoSymbol::d_zbar() const {
  EndoSymbol s(r_);
  for (std::size_t i = 0; i < e_.size(); ++i) s.e_[i] = e_[i].d_zbar();
  return s;
}

int EndoSymbol::max_weight_power() const {
  int m = 0;
  for (const auto& f : e_) m = std::max(m, f.weight_power());
  return m;
}

int EndoSymbol::max_numerator_degree() const {
  int d = 0;
  for (const auto& f : e_) d = std::max({d, f.numerator().deg_z(), f.numerator().deg_zbar()});
  return d;
}

bool EndoSymbol::radial() const {
  for (const auto& f : e_) {
    const auto& c = f.numerator().coeffs();
    for (Eigen::Index j = 0; j < c.rows(); ++j)
      for (Eigen::Index k = 0; k < c.cols(); ++k)
        if (j != k && c(j, k) != cplx(0.0)) return false;
  }
  return true;
}

namespace {

void same_rank(const EndoSymbol& a, const EndoSymbol& b) {
  if (a.rank() != b.rank()) throw ValidationError("endomorphism ranks differ");
}

}  // namespace

EndoSymbol operator+(const EndoSymbol& a, const EndoSymbol& b) {
  same_rank(a, b);
  EndoSymbol s(a.rank());
  for (int i = 0; i < a.rank(); ++i)
    for (int j = 0; j < a.rank(); ++j) s(i, j) = a(i, j) + b(i, j);
  return s;
}

EndoSymbol operator-(const EndoSymbol& a, const EndoSymbol& b) { return a + cplx(-1.0) * b; }

EndoSymbol operator*(const EndoSymbol& a, const EndoSymbol& b) {
  same_rank(a, b);
  const int r = a.rank();
  EndoSymbol s(r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      FrameFunction acc = a(i, 0) * b(0, j);
      for (int k = 1; k < r; ++k) acc += a(i, k) * b(k, j);
      s(i, j) = acc;
    }
  return s;
}

EndoSymbol operator*(cplx c, const EndoSymbol& a) {
  EndoSymbol s = a;
  for (int i = 0; i < a.rank(); ++i)
    for (int j = 0; j < a.rank(); ++j) s(i, j) *= c;
  return s;
}

EndoSymbol commutator(const EndoSymbol& a, const EndoSymbol& b) { return a * b - b * a; }

// BundleMetric

BundleMetric BundleMetric::product_round(const BundleSpec& spec, int p) {
  spec.validate(p);
  std::vector<FrameFunction> d;
  for (int a : spec.degrees) d.emplace_back(BidegreePoly::constant(1.0), p + a);
  BundleMetric m;
  m.spec_ = spec;
  m.level_ = p;
  m.frames_ = EndoSymbol::diagonal(d);
  m.radial_ = true;
  m.name_ = "product_round";
  return m;
}

BundleMetric BundleMetric::from_frames(const EndoSymbol& hE, const BundleSpec& spec, int p) {
  spec.validate(p);
  if (hE.rank() != spec.rank()) throw ValidationError("fiber metric rank does not match the bundle");
  const int r = spec.rank();
  // Hermitian symmetry of the frame functions
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j) {
      const int w = std::max(hE(i, j).weight_power(), hE(j, i).weight_power());
      const BidegreePoly a = hE(i, j).lifted(w).numerator();
      const BidegreePoly b = hE(j, i).lifted(w).numerator().conj();
      const BidegreePoly d = a - b;
      if (d.coeffs().norm() > 1e-12 * (1.0 + a.coeffs().norm()))
        throw ValidationError("fiber metric is not Hermitian");
    }
  EndoSymbol W(r);
  const FrameFunction Lp(BidegreePoly::constant(1.0), p);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) W(i, j) = hE(i, j) * Lp;
  BundleMetric m;
  m.spec_ = spec;
  m.level_ = p;
  m.radial_ = hE.radial();
  m.frames_ = std::move(W);
  m.name_ = "frames";
  return m;
}

BundleMetric BundleMetric::fubini_study(const ProdMatrix& q, const BundleSpec& spec, int p) {
  spec.validate(p);
  if (q.dim() != spec.dim(p)) throw ValidationError("fs: q has the wrong dimension for this bundle");
  BundleMetric m;
  m.spec_ = spec;
  m.level_ = p;
  m.qinv_ = q.inverse();
  // rotation invariant iff q_ab = 0 across different monomial degrees
  std::vector<int> ch;
  for (int a : spec.degrees)
    for (int j = 0; j <= p + a; ++j) ch.push_back(j);
  const double scale = q.matrix().norm();
  m.radial_ = true;
  for (int a = 0; a < q.dim() && m.radial_; ++a)
    for (int b = 0; b < q.dim(); ++b)
      if (ch[a] != ch[b] && std::abs(q.matrix()(a, b)) > 1e-14 * scale) {
        m.radial_ = false;
        break;
      }
  m.name_ = "fubini_study";
  return m;
}

Eigen::MatrixXcd BundleMetric::operator()(ChartPoint z) const {
  if (frames_) {
    Eigen::MatrixXcd W = frames_->at(z);
    return 0.5 * (W + W.adjoint());
  }
  SectionModel tmp;
  tmp.p = level_;
  tmp.degrees = spec_.degrees;
  const Eigen::MatrixXcd V = tmp.evaluation(z);
  const Eigen::MatrixXcd K = V * qinv_ * V.adjoint();
  Eigen::LLT<Eigen::MatrixXcd> llt(0.5 * (K + K.adjoint()));
  if (llt.info() != Eigen::Success) throw NumericalError("fs: evaluation map not surjective at a node");
  Eigen::MatrixXcd W = llt.solve(Eigen::MatrixXcd::Identity(K.rows(), K.cols()));
  return 0.5 * (W + W.adjoint());
}

// BundleSetup

SectionModel BundleSetup::model(const BundleSpec& spec, int p, const BundleMetric& metric, const Measure& measure) {
  spec.validate(p);
  if (metric.level() != p) throw ValidationError("metric level does not match p");
  SectionModel m;
  m.p = p;
  m.degrees = spec.degrees;
  m.fiber_metric = [metric](ChartPoint z) { return metric(z); };
  m.density = [measure](ChartPoint z) { return measure.density(z); };
  m.radial = metric.radial() && measure.radial();
  m.polynomial = metric.polynomial() && measure.polynomial();
  if (m.polynomial) {
    m.exact_m = metric.frames()->max_weight_power() + measure.weight_power();
    m.exact_d = p + spec.max_degree() + metric.frames()->max_numerator_degree() + measure.numerator_degree();
  } else {
    const int top = p + spec.max_degree();
    m.exact_m = 2 * top + 4;
    m.exact_d = 2 * top;
  }
  return m;
}

BundleSetup::BundleSetup(BundleSpec spec, int p, BundleMetric metric, Measure measure)
    : spec_(std::move(spec)), p_(p), metric_(std::move(metric)), measure_(std::move(measure)) {
  space_ = std::make_shared<const SectionSpace>(model(spec_, p_, metric_, measure_));
}

BundleSetup::BundleSetup(BundleSpec spec, int p, BundleMetric metric, Measure measure, QuadratureRule rule)
    : spec_(std::move(spec)), p_(p), metric_(std::move(metric)), measure_(std::move(measure)) {
  space_ = std::make_shared<const SectionSpace>(model(spec_, p_, metric_, measure_), std::move(rule));
}

BundleSetup BundleSetup::product_round(const BundleSpec& spec, int p) {
  return BundleSetup(spec, p, BundleMetric::product_round(spec, p), Measure::round_liouville());
}

nlohmann::json BundleSetup::describe() const {
  return {{"kind", "bundle"},
          {"p", p_},
          {"bundle_degrees", spec_.degrees},
          {"metric", metric_.name()},
          {"measure", measure_.name()},
          {"rule", {{"radial", rule().radial_count}, {"angular", rule().angular_count}}}};
}

// operations

ProdMatrix bundle_gram(const BundleSetup& setup) { return setup.space().gram(); }

ProdMatrix bundle_hilb(const BundleSetup& setup) {
  const double vol = setup.space().mass();
  return ProdMatrix(double(setup.dim()) / (vol * setup.rank()) * setup.space().gram().matrix());
}

BundleMetric bundle_fs(const ProdMatrix& q, const BundleSetup& setup) {
  return BundleMetric::fubini_study(q, setup.spec(), setup.p());
}

BundleMetric bundle_fs(const ProdMatrix& q, const BundleSpec& spec, int p) {
  return BundleMetric::fubini_study(q, spec, p);
}

HermOp bundle_toeplitz(const BundleSetup& setup, const EndoSymbol& F) {
  if (F.rank() != setup.rank()) throw ValidationError("symbol rank does not match the bundle");
  const QuadratureRule& rule = setup.rule();
  // frame-Hermitian: W F self-adjoint
  const std::size_t stride = std::max<std::size_t>(1, rule.size() / 64);
  for (std::size_t n = 0; n < rule.size(); n += stride) {
    const ChartPoint z = rule.nodes[n];
    const Eigen::MatrixXcd WF = setup.metric()(z) * F.at(z);
    if (hermitian_defect(WF) > 1e-10) throw ValidationError("symbol is not Hermitian for the fiber metric");
  }
  return HermOp(setup.space().toeplitz([&F](ChartPoint z) { return F.at(z); }));
}

HermOp bundle_toeplitz(const BundleSetup& setup, const std::function<Eigen::MatrixXcd(ChartPoint)>& F) {
  return HermOp(setup.space().toeplitz(F));
}

Eigen::MatrixXcd bundle_rawnsley(const BundleSetup& setup, ChartPoint z) { return setup.space().rawnsley(z); }

Eigen::MatrixXcd bundle_berezin_symbol(const BundleSetup& setup, const HermOp& A, ChartPoint z) {
  return setup.space().berezin_symbol_on(A.matrix(), z);
}

Eigen::MatrixXcd bundle_berezin_symbol_chart(const BundleSetup& setup, const HermOp& A, ChartPoint z) {
  return setup.space().berezin_symbol_chart(A.matrix(), z);
}

Eigen::MatrixXcd bundle_berezin_operator(const BundleSetup& setup) {
  return assemble_berezin_dense(setup.space().coherent_nodes(false), setup.dim());
}

Eigen::MatrixXd bundle_berezin_operator_hermitian(const BundleSetup& setup) {
  return assemble_berezin_hermitian(setup.space().coherent_nodes(false), setup.dim());
}

SpectrumReport bundle_berezin_spectrum(const BundleSetup& setup, bool force_dense) {
  const int N = setup.dim();
  std::vector<double> ev;
  std::string method;
  if (setup.rotation_invariant() && !force_dense) {
    ev = berezin_sector_eigenvalues(setup.space().coherent_nodes(true), setup.space().model().charges(), N);
    method = "sector";
  } else {
    // complex vec(End) form: C maps Herm to Herm only when rho is scalar
    const Eigen::VectorXd e = hermitian_eigenvalues(bundle_berezin_operator(setup));
    ev.assign(e.data(), e.data() + e.size());
    method = "dense";
  }
  nlohmann::json d = setup.describe();
  d["kappa"] = constants::kKappa;
  return make_spectrum_report(setup.p(), std::move(ev), method, d);
}

std::vector<KodairaLevel> kodaira_spectrum_oracle(int k, int count) {
  if (count < 1) throw ValidationError("count must be at least 1");
  const int ak = std::abs(k);
  // integer Casimir values keyed exactly; enough n to cover `count` levels
  std::map<long, int> levels;
  for (int n = 0; n <= count + 2; ++n) {
    const long s0 = 2L * n * (n + 1);
    levels[s0] += 2 * (2 * n + 1);
    if (ak == 0) {
      levels[s0] += 2 * (2 * n + 1);
    } else {
      levels[s0 + 2L * n * ak] += ak + 2 * n + 1;
      levels[s0 + 2L * (n + 1) * ak] += ak + 2 * n + 1;
    }
  }
  std::vector<KodairaLevel> out;
  for (const auto& [c, mult] : levels) {
    if (static_cast<int>(out.size()) == count) break;
    out.push_back({double(c), constants::kKappa * double(c), mult});
  }
  return out;
}

Eigen::MatrixXcd structure_coefficient(const BundleSetup& setup, const EndoSymbol& F, const EndoSymbol& G,
                                       ChartPoint z) {
  const auto& frames = setup.metric().frames();
  if (!frames) throw ValidationError("structure_coefficient needs a metric given by frame functions");
  if (F.rank() != setup.rank() || G.rank() != setup.rank()) throw ValidationError("symbol rank mismatch");
  const Eigen::MatrixXcd W = frames->at(z);
  // Chern connection form in the holomorphic frame; scale-free, and W can be ~1e-160 far out
  const double s = W.cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd theta = (W / s).partialPivLu().solve(frames->d_z().at(z) / s);
  const Eigen::MatrixXcd Fz0 = F.d_z().at(z), Gz0 = G.d_z().at(z);
  const Eigen::MatrixXcd Fv = F.at(z), Gv = G.at(z);
  const Eigen::MatrixXcd Fz = Fz0 + theta * Fv - Fv * theta;
  const Eigen::MatrixXcd Gz = Gz0 + theta * Gv - Gv * theta;
  const Eigen::MatrixXcd Fzb = F.d_zbar().at(z), Gzb = G.d_zbar().at(z);
  const double sigma = round_density(z);
  return cplx(0.0, constants::kPoissonConstant / sigma) * (Fz * Gzb - Gz * Fzb);
}

double cocycle_residual(const BundleSetup& setup, const EndoSymbol& F, const EndoSymbol& G, const EndoSymbol& H,
                        ChartPoint z) {
  auto C = [&](const EndoSymbol& a, const EndoSymbol& b) { return structure_coefficient(setup, a, b, z); };
  auto br = [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) -> Eigen::MatrixXcd { return a * b - b * a; };
  const Eigen::MatrixXcd Fv = F.at(z), Gv = G.at(z), Hv = H.at(z);
  const Eigen::MatrixXcd s = br(C(F, G), Hv) + br(C(H, F), Gv) + br(C(G, H), Fv) + C(commutator(F, G), H) +
                             C(commutator(H, F), G) + C(commutator(G, H), F);
  return s.norm();
}

}  // namespace berezin
