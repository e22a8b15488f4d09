#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "berezin/geometry.hpp"
#include "berezin/quantization.hpp"
#include "berezin/section_space.hpp"
#include "berezin/types.hpp"
#include "json.hpp"

namespace berezin {

// E = O(a_1) + ... + O(a_r)
struct BundleSpec {
  std::vector<int> degrees;

  int rank() const { return static_cast<int>(degrees.size()); }
  int dim(int p) const;  // sum (p + a_i + 1)
  int min_degree() const;
  int max_degree() const;
  void validate(int p) const;
};

// r x r matrix of frame functions, row major; an endomorphism field in chart frames
class EndoSymbol {
 public:
  EndoSymbol() = default;
  explicit EndoSymbol(int r);
  static EndoSymbol identity(int r);
  static EndoSymbol scalar(const FrameFunction& f, int r);
  static EndoSymbol diagonal(const std::vector<FrameFunction>& d);

  int rank() const { return r_; }
  FrameFunction& operator()(int i, int j) { return e_[std::size_t(i) * r_ + j]; }
  const FrameFunction& operator()(int i, int j) const { return e_[std::size_t(i) * r_ + j]; }
  Eigen::MatrixXcd at(ChartPoint z) const;
  EndoSymbol d_z() const;
  EndoSymbol d_zbar() const;
  int max_weight_power() const;
  int max_numerator_degree() const;
  // every numerator depends on |z| only
  bool radial() const;

 private:
  int r_ = 0;
  std::vector<FrameFunction> e_;
};

EndoSymbol operator+(const EndoSymbol& a, const EndoSymbol& b);
EndoSymbol operator-(const EndoSymbol& a, const EndoSymbol& b);
EndoSymbol operator*(const EndoSymbol& a, const EndoSymbol& b);
EndoSymbol operator*(cplx s, const EndoSymbol& a);
EndoSymbol commutator(const EndoSymbol& a, const EndoSymbol& b);

// Hermitian metric on E (x) L^p in chart frames, |s|^2 = f^dagger W f
class BundleMetric {
 public:
  // diag (1+|z|^2)^{-(p+a_i)}
  static BundleMetric product_round(const BundleSpec& spec, int p);
  // h^E given by frame functions, times the round weight of L^p
  static BundleMetric from_frames(const EndoSymbol& hE, const BundleSpec& spec, int p);
  // W_q = (V q^{-1} V^dagger)^{-1}
  static BundleMetric fubini_study(const ProdMatrix& q, const BundleSpec& spec, int p);

  Eigen::MatrixXcd operator()(ChartPoint z) const;
  int level() const { return level_; }
  bool polynomial() const { return frames_.has_value(); }
  bool radial() const { return radial_; }
  // full metric (with the L^p factor) as frame functions, when polynomial
  const std::optional<EndoSymbol>& frames() const { return frames_; }
  std::string name() const { return name_; }

 private:
  BundleSpec spec_;
  int level_ = 0;
  std::optional<EndoSymbol> frames_;
  Eigen::MatrixXcd qinv_;
  bool radial_ = true;
  std::string name_;
};

class BundleSetup {
 public:
  BundleSetup(BundleSpec spec, int p, BundleMetric metric, Measure measure);
  BundleSetup(BundleSpec spec, int p, BundleMetric metric, Measure measure, QuadratureRule rule);
  static BundleSetup product_round(const BundleSpec& spec, int p);

  const BundleSpec& spec() const { return spec_; }
  int p() const { return p_; }
  int rank() const { return spec_.rank(); }
  int dim() const { return space_->dim(); }
  const BundleMetric& metric() const { return metric_; }
  const Measure& measure() const { return measure_; }
  const SectionSpace& space() const { return *space_; }
  const QuadratureRule& rule() const { return space_->rule(); }
  bool rotation_invariant() const { return space_->model().radial; }
  nlohmann::json describe() const;

 private:
  static SectionModel model(const BundleSpec& spec, int p, const BundleMetric& metric, const Measure& measure);
  BundleSpec spec_;
  int p_;
  BundleMetric metric_;
  Measure measure_;
  std::shared_ptr<const SectionSpace> space_;
};

ProdMatrix bundle_gram(const BundleSetup& setup);
// (dim / (Vol r)) gram
ProdMatrix bundle_hilb(const BundleSetup& setup);
BundleMetric bundle_fs(const ProdMatrix& q, const BundleSetup& setup);
BundleMetric bundle_fs(const ProdMatrix& q, const BundleSpec& spec, int p);

// rejects F with W F not Hermitian at some node
HermOp bundle_toeplitz(const BundleSetup& setup, const EndoSymbol& F);
HermOp bundle_toeplitz(const BundleSetup& setup, const std::function<Eigen::MatrixXcd(ChartPoint)>& F);
// ev ev^dagger in the fiber-orthonormal frame
Eigen::MatrixXcd bundle_rawnsley(const BundleSetup& setup, ChartPoint z);
// rho^{-1} ev A ev^dagger, fiber-orthonormal frame; the _chart variant is the same endomorphism in chart frames
Eigen::MatrixXcd bundle_berezin_symbol(const BundleSetup& setup, const HermOp& A, ChartPoint z);
Eigen::MatrixXcd bundle_berezin_symbol_chart(const BundleSetup& setup, const HermOp& A, ChartPoint z);

Eigen::MatrixXcd bundle_berezin_operator(const BundleSetup& setup);
// restriction to Herm(N); valid only where rho is scalar (balanced points)
Eigen::MatrixXd bundle_berezin_operator_hermitian(const BundleSetup& setup);
SpectrumReport bundle_berezin_spectrum(const BundleSetup& setup, bool force_dense = false);

struct KodairaLevel {
  double casimir;  // units of the Casimir normalization
  double main;     // kappa * casimir, area-one normalization
  int multiplicity;
};
// spectrum of Box on End(C + O(k)), lowest `count` distinct levels
std::vector<KodairaLevel> kodaira_spectrum_oracle(int k, int count);

// kappa_P i (d^nabla F dbar G - d^nabla G dbar F) / sigma in chart frames, sigma the round
// area-one density; needs a polynomial metric for the Chern connection
Eigen::MatrixXcd structure_coefficient(const BundleSetup& setup, const EndoSymbol& F, const EndoSymbol& G,
                                       ChartPoint z);
// Frobenius norm of the cyclic cocycle sum at z
double cocycle_residual(const BundleSetup& setup, const EndoSymbol& F, const EndoSymbol& G, const EndoSymbol& H,
                        ChartPoint z);

}  // namespace berezin
