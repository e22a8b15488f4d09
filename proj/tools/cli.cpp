#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "berezin/bundles.hpp"
#include "berezin/iterations.hpp"
#include "berezin/linalg.hpp"
#include "berezin/parallel.hpp"
#include "berezin/quantization.hpp"
#include "berezin/report.hpp"
#include "berezin/stages.hpp"

namespace berezin_lab {

using namespace berezin;
using nlohmann::json;

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

struct Output {
  std::string task;
  json config;
  json result;
  CsvTable table;
  int code = 0;
};

struct Common {
  std::string out;
  std::string format;
};

void add_common(CLI::App* s, Common& c, const std::string& default_format) {
  c.format = default_format;
  s->add_option("--out", c.out, "write the artifact to this file instead of stdout");
  s->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

Variant parse_variant(const std::string& v) { return v == "canonical" ? Variant::Canonical : Variant::NuBalanced; }
Gauge parse_gauge(const std::string& g) { return g == "det" ? Gauge::Det : Gauge::Trace; }

// ---- berezin-spectrum
struct SpectrumOpts {
  Common c;
  int p = -1;
  bool dense = false;
};

Output run_berezin_spectrum(const SpectrumOpts& o) {
  Output out;
  out.task = "berezin-spectrum";
  out.config = {{"p", o.p}, {"dense", o.dense}, {"metric", "round"}, {"measure", "round_liouville"}};
  if (o.p < 0) throw ValidationError("--p must be nonnegative");
  const SpectrumReport r = berezin_spectrum(QuantumSetup::round(o.p), o.dense);
  json levels = json::array();
  double dev = 0.0;
  out.table.header = {"k", "eigenvalue", "multiplicity", "closed_form"};
  for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
    const double cf = k <= std::size_t(o.p) ? gamma_closed_form(int(k), o.p) : kNaN;
    dev = std::max(dev, std::abs(r.eigenvalues[k] - cf));
    levels.push_back({{"k", k}, {"eigenvalue", r.eigenvalues[k]}, {"multiplicity", r.multiplicities[k]},
                      {"closed_form", num(cf)}});
    out.table.add_row({double(k), r.eigenvalues[k], double(r.multiplicities[k]), cf});
  }
  out.result = {{"p", o.p},
                {"dimension", r.dimension},
                {"method", r.method},
                {"eigenvalues", r.eigenvalues},
                {"multiplicities", r.multiplicities},
                {"levels", levels},
                {"max_deviation_vs_closed_form", dev}};
  return out;
}

// ---- bundle-spectrum
struct BundleOpts {
  Common c;
  int p = -1;
  std::vector<int> degrees;
  int levels = 4;
  bool dense = false;
};

Output run_bundle_spectrum(const BundleOpts& o) {
  Output out;
  out.task = "bundle-spectrum";
  out.config = {{"p", o.p}, {"degrees", o.degrees}, {"levels", o.levels}, {"dense", o.dense}, {"metric", "product_round"}};
  if (o.levels < 1) throw ValidationError("--levels must be >= 1");
  const BundleSpec spec{o.degrees};
  spec.validate(o.p);
  const SpectrumReport r = bundle_berezin_spectrum(BundleSetup::product_round(spec, o.p), o.dense);
  const double four_pi_p = 4.0 * constants::kPi * o.p;
  out.table.header = {"level", "eigenvalue", "multiplicity", "scaled_gap"};
  json lv = json::array();
  for (std::size_t j = 0; j < r.eigenvalues.size(); ++j) {
    const double s = four_pi_p * (1.0 - r.eigenvalues[j]);
    lv.push_back({{"eigenvalue", r.eigenvalues[j]}, {"multiplicity", r.multiplicities[j]}, {"scaled_gap", s}});
    out.table.add_row({double(j), r.eigenvalues[j], double(r.multiplicities[j]), s});
  }
  out.result = {{"p", o.p}, {"dimension", r.dimension}, {"method", r.method}, {"levels", lv}};
  if (spec.rank() == 2) {
    const int k = spec.degrees[1] - spec.degrees[0];
    json orc = json::array();
    for (const KodairaLevel& l : kodaira_spectrum_oracle(k, o.levels))
      orc.push_back({{"casimir", l.casimir}, {"lambda", l.main}, {"multiplicity", l.multiplicity}});
    out.result["kodaira_oracle"] = {{"k", k}, {"levels", orc}};
  }
  return out;
}

// ---- iterate / rates-sweep
struct IterOpts {
  Common c;
  std::string variant = "nu";
  int p = -1;
  std::vector<int> degrees{0};
  double tol = 1e-11;
  int max_iters = 10000;
  std::string gauge = "trace";
  std::uint64_t seed = 1;
  std::string start = "random";
};

IterationConfig make_cfg(const IterOpts& o, int p) {
  IterationConfig cfg;
  cfg.variant = parse_variant(o.variant);
  cfg.p = p;
  cfg.bundle = BundleSpec{o.degrees};
  cfg.tol_fixed = o.tol;
  cfg.max_iters = o.max_iters;
  cfg.gauge = parse_gauge(o.gauge);
  cfg.validate();
  return cfg;
}

json iter_config(const IterOpts& o) {
  return {{"variant", o.variant}, {"degrees", o.degrees}, {"tol", o.tol},     {"max_iters", o.max_iters},
          {"gauge", o.gauge},     {"seed", o.seed},       {"start", o.start}, {"measure", o.variant == "canonical" ? "liouville_of_fs" : "round_liouville"}};
}

struct IterRun {
  IterationTrace trace;
  RateReport rate;
  FixedPointCertificate cert;
};

IterRun iterate_once(const IterationConfig& cfg, const IterOpts& o) {
  const ProdMatrix q0 = o.start == "round" ? reference_product(cfg) : random_prod(cfg.dim(), o.seed, 1e-3);
  auto [q, tr] = iterate_to_fixed_point(q0, cfg);
  IterRun run{tr, {}, {}};
  if (tr.converged) {
    run.cert = certify_fixed_point(q, cfg);
    run.rate = contraction_rate(q, cfg);
  }
  return run;
}

Output run_iterate(const IterOpts& o) {
  Output out;
  out.task = "iterate";
  out.config = iter_config(o);
  out.config["p"] = o.p;
  const IterationConfig cfg = make_cfg(o, o.p);
  const IterRun r = iterate_once(cfg, o);
  out.result["trace"] = r.trace.to_json();
  out.result["converged"] = r.trace.converged;
  out.table.header = {"step", "distance", "gauge_factor"};
  for (std::size_t i = 0; i < r.trace.distances.size(); ++i)
    out.table.add_row({double(i), r.trace.distances[i], r.trace.gauge_factors[i]});
  if (r.trace.converged) {
    out.result["beta"] = num(r.rate.beta);
    out.result["neutral_dim"] = r.rate.neutral_dim;
    out.result["jacobian_eigs"] = r.rate.eigenvalues;
    out.result["rate_method"] = r.rate.method;
    out.result["certificate"] = {
        {"rho_flatness", r.cert.rho_flatness}, {"step_distance", r.cert.step_distance}, {"ok", r.cert.ok}};
  } else {
    out.result["error"] = {{"kind", "numerical"}, {"message", "iteration did not converge: " + r.trace.stop_reason}};
    out.code = 2;
  }
  return out;
}

struct SweepOpts {
  IterOpts it;
  int p_min = 8, p_max = 24, step = 1;
};

Output run_rates_sweep(const SweepOpts& o) {
  Output out;
  out.task = "rates-sweep";
  out.config = iter_config(o.it);
  out.config["p_min"] = o.p_min;
  out.config["p_max"] = o.p_max;
  out.config["step"] = o.step;
  if (o.step < 1 || o.p_min > o.p_max) throw ValidationError("need step >= 1 and p_min <= p_max");
  out.table.header = {"p",         "converged",        "iterations",        "tail_rate",   "beta",
                      "neutral_dim", "p_one_minus_beta", "p2_one_minus_beta", "rho_flatness"};
  json rows = json::array();
  for (int p = o.p_min; p <= o.p_max; p += o.step) {
    const IterationConfig cfg = make_cfg(o.it, p);
    const IterRun r = iterate_once(cfg, o.it);
    const double b = r.rate.beta;
    out.table.add_row({double(p), r.trace.converged ? 1.0 : 0.0, double(r.trace.iterations), r.trace.rate, b,
                       double(r.rate.neutral_dim), p * (1.0 - b), double(p) * p * (1.0 - b), r.cert.rho_flatness});
    rows.push_back({{"p", p},
                    {"converged", r.trace.converged},
                    {"iterations", r.trace.iterations},
                    {"tail_rate", num(r.trace.rate)},
                    {"beta", num(b)},
                    {"neutral_dim", r.rate.neutral_dim},
                    {"rho_flatness", num(r.cert.rho_flatness)},
                    {"stop_reason", r.trace.stop_reason}});
    if (!r.trace.converged) out.code = 2;
  }
  out.result["rows"] = rows;
  return out;
}

// ---- functoriality-check
struct FunctOpts {
  Common c;
  int p = -1;
  std::vector<int> degrees;
  int symbols = 3;
  int fiber_degree = 1;
  int base_degree = 1;
  int samples = 32;
  std::uint64_t seed = 1;
};

Output run_functoriality(const FunctOpts& o) {
  Output out;
  out.task = "functoriality-check";
  out.config = {{"p", o.p},
                {"degrees", o.degrees},
                {"symbols", o.symbols},
                {"fiber_degree", o.fiber_degree},
                {"base_degree", o.base_degree},
                {"samples", o.samples},
                {"seed", o.seed}};
  if (o.symbols < 1) throw ValidationError("--symbols must be >= 1");
  const BundleSpec spec{o.degrees};
  spec.validate(o.p);
  const FibrationSetup s(BundleSetup::product_round(spec, o.p));
  std::vector<double> res;
  out.table.header = {"symbol", "residual"};
  for (int i = 0; i < o.symbols; ++i) {
    res.push_back(check_functoriality(s, TotalSymbol::random(o.fiber_degree, o.base_degree, o.seed + i)));
    out.table.add_row({double(i), res.back()});
  }
  const SymbolFunctoriality sf =
      check_symbol_functoriality(s, HermOp(random_hermitian(s.dim(), o.seed + 1000)), o.samples, o.seed);
  out.result = {{"residuals", res},
                {"max_residual", *std::max_element(res.begin(), res.end())},
                {"symbol_dual", sf.dual},
                {"symbol_literal", sf.literal},
                {"samples", sf.samples}};
  return out;
}

// ---- moment-check
struct MomentOpts {
  Common c;
  std::string variant = "nu";
  int p = -1;
  std::vector<int> degrees{0};
  int tests = 8;
  std::uint64_t seed = 1;
};

Output run_moment(const MomentOpts& o) {
  Output out;
  out.task = "moment-check";
  out.config = {{"variant", o.variant}, {"p", o.p}, {"degrees", o.degrees}, {"tests", o.tests}, {"seed", o.seed}};
  IterationConfig cfg;
  cfg.variant = parse_variant(o.variant);
  cfg.p = o.p;
  cfg.bundle = BundleSpec{o.degrees};
  cfg.validate();
  const ProdMatrix q = reference_product(cfg);
  const FixedPointCertificate cert = certify_fixed_point(q, cfg);
  if (!(cert.step_distance <= 1e-9))
    throw ValidationError("moment-check needs a balanced point; the round product is not fixed for these degrees");
  const MomentCheck m = check_moment_identity(q, cfg, o.tests, o.seed);
  out.result = {{"identity_residual", m.identity_residual}, {"mu_identity", m.mu_identity}, {"tests", m.tests}};
  out.table.header = {"identity_residual", "mu_identity"};
  out.table.add_row({m.identity_residual, m.mu_identity});
  return out;
}

// ---- gap-table
struct GapOpts {
  Common c;
  int p_min = 8, p_max = 32, step = 4;
};

Output run_gap_table(const GapOpts& o) {
  Output out;
  out.task = "gap-table";
  out.config = {{"p_min", o.p_min}, {"p_max", o.p_max}, {"step", o.step}};
  if (o.step < 1 || o.p_min < 1 || o.p_min > o.p_max) throw ValidationError("need 1 <= p_min <= p_max and step >= 1");
  out.table.header = {"p", "gamma1", "1-gamma1", "residual_vs_2/p-4/p^2"};
  json rows = json::array();
  for (int p = o.p_min; p <= o.p_max; p += o.step) {
    const double g1 = berezin_spectrum(QuantumSetup::round(p)).eigenvalues.at(1);
    const double res = (1.0 - g1) - (2.0 / p - 4.0 / (double(p) * p));
    out.table.add_row({double(p), g1, 1.0 - g1, res});
    rows.push_back({{"p", p}, {"gamma1", g1}, {"one_minus_gamma1", 1.0 - g1}, {"residual", res}});
  }
  out.result["rows"] = rows;
  return out;
}

int write_output(const Output& o, const Common& c, std::ostream& out, std::ostream& err) {
  const json doc = make_envelope(o.task, o.config, o.result);
  std::string text;
  if (c.format == "csv") {
    json meta = doc;
    meta.erase("result");
    text = o.table.render(meta);
  } else {
    text = dump_json(doc);
  }
  if (c.out.empty()) {
    out << text;
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      err << "error: cannot open " << c.out << " for writing\n";
      return 1;
    }
    f << text;
  }
  return o.code;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Berezin-Toeplitz quantization experiments on the Riemann sphere", "berezin_lab"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "worker cap (default: BEREZIN_LAB_THREADS or 1)")->check(CLI::NonNegativeNumber);
  app.set_version_flag("--version", kLibraryVersion);

  SpectrumOpts so;
  auto* s1 = app.add_subcommand("berezin-spectrum", "round scalar Berezin spectrum at level p");
  s1->add_option("--p", so.p, "level")->required();
  s1->add_flag("--dense", so.dense, "skip the rotation sectors");
  add_common(s1, so.c, "json");

  BundleOpts bo;
  auto* s2 = app.add_subcommand("bundle-spectrum", "Berezin spectrum of O(a_1)+...+O(a_r), product round metric");
  s2->add_option("--p", bo.p, "level")->required();
  s2->add_option("--degrees", bo.degrees, "a_1,...,a_r")->delimiter(',')->required();
  s2->add_option("--levels", bo.levels, "oracle levels to list")->capture_default_str();
  s2->add_flag("--dense", bo.dense, "skip the rotation sectors");
  add_common(s2, bo.c, "json");

  IterOpts io;
  auto add_iter = [](CLI::App* s, IterOpts& o, bool with_p) {
    s->add_option("--variant", o.variant, "nu or canonical")->check(CLI::IsMember({"nu", "canonical"}))->capture_default_str();
    if (with_p) s->add_option("--p", o.p, "level")->required();
    s->add_option("--degrees", o.degrees, "a_1,...,a_r")->delimiter(',')->capture_default_str();
    s->add_option("--tol", o.tol, "fixed-point tolerance in the product distance")->capture_default_str();
    s->add_option("--max-iters", o.max_iters, "iteration cap")->capture_default_str();
    s->add_option("--gauge", o.gauge, "trace or det")->check(CLI::IsMember({"trace", "det"}))->capture_default_str();
    s->add_option("--seed", o.seed, "seed of the random initial product")->capture_default_str();
    s->add_option("--start", o.start, "random or round")->check(CLI::IsMember({"random", "round"}))->capture_default_str();
  };
  auto* s3 = app.add_subcommand("iterate", "run the Donaldson iteration to its fixed point");
  add_iter(s3, io, true);
  add_common(s3, io.c, "json");

  SweepOpts sw;
  auto* s4 = app.add_subcommand("rates-sweep", "contraction rates over a range of levels");
  add_iter(s4, sw.it, false);
  s4->add_option("--p-min", sw.p_min)->capture_default_str();
  s4->add_option("--p-max", sw.p_max)->capture_default_str();
  s4->add_option("--step", sw.step)->capture_default_str();
  add_common(s4, sw.it.c, "csv");

  FunctOpts fo;
  auto* s5 = app.add_subcommand("functoriality-check", "quantization in stages against direct quantization");
  s5->add_option("--p", fo.p, "level")->required();
  s5->add_option("--degrees", fo.degrees, "a_1,a_2")->delimiter(',')->required();
  s5->add_option("--symbols", fo.symbols, "number of random total symbols")->capture_default_str();
  s5->add_option("--fiber-degree", fo.fiber_degree)->capture_default_str();
  s5->add_option("--base-degree", fo.base_degree)->capture_default_str();
  s5->add_option("--samples", fo.samples, "sample points for the symbol check")->capture_default_str();
  s5->add_option("--seed", fo.seed)->capture_default_str();
  add_common(s5, fo.c, "json");

  MomentOpts mo;
  auto* s6 = app.add_subcommand("moment-check", "moment-map identity at the round balanced point");
  s6->add_option("--variant", mo.variant)->check(CLI::IsMember({"nu", "canonical"}))->capture_default_str();
  s6->add_option("--p", mo.p, "level")->required();
  s6->add_option("--degrees", mo.degrees)->delimiter(',')->capture_default_str();
  s6->add_option("--tests", mo.tests, "random Hermitian directions")->capture_default_str();
  s6->add_option("--seed", mo.seed)->capture_default_str();
  add_common(s6, mo.c, "json");

  GapOpts go;
  auto* s7 = app.add_subcommand("gap-table", "first Berezin gap against 2/p - 4/p^2");
  s7->add_option("--p-min", go.p_min)->capture_default_str();
  s7->add_option("--p-max", go.p_max)->capture_default_str();
  s7->add_option("--step", go.step)->capture_default_str();
  add_common(s7, go.c, "csv");

  std::vector<const char*> cargv;
  for (const auto& a : argv) cargv.push_back(a.c_str());
  try {
    app.parse(int(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  set_thread_count(threads);  // 0 falls back to BEREZIN_LAB_THREADS

  const Common* common = nullptr;
  std::function<Output()> job;
  if (s1->parsed()) common = &so.c, job = [&] { return run_berezin_spectrum(so); };
  if (s2->parsed()) common = &bo.c, job = [&] { return run_bundle_spectrum(bo); };
  if (s3->parsed()) common = &io.c, job = [&] { return run_iterate(io); };
  if (s4->parsed()) common = &sw.it.c, job = [&] { return run_rates_sweep(sw); };
  if (s5->parsed()) common = &fo.c, job = [&] { return run_functoriality(fo); };
  if (s6->parsed()) common = &mo.c, job = [&] { return run_moment(mo); };
  if (s7->parsed()) common = &go.c, job = [&] { return run_gap_table(go); };
  std::string task;
  for (auto* s : app.get_subcommands()) task = s->get_name();

  try {
    return write_output(job(), *common, out, err);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    Output o;
    o.task = task;
    o.result = {{"error", {{"kind", "numerical"}, {"message", e.what()}}}};
    o.code = 2;
    Common c = *common;
    if (c.format == "csv") c.format = "json";
    write_output(o, c, out, err);
    return 2;
  }
}

}  // namespace berezin_lab
