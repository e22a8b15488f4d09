#include "berezin/report.hpp"

#include <Eigen/Core>
#include <cmath>
#include <sstream>

#include "berezin/geometry.hpp"
#include "berezin/quantization.hpp"

extern "C" char* openblas_get_config(void);

namespace berezin {

nlohmann::json constants_block() {
  // the fit is cheap and deterministic; recomputed so the output shows where the sign came from
  static const double fit = fit_poisson_constant(constants::kPoissonFitLevel);
  return {{"lambda1", constants::kLambda1},
          {"c_KE", constants::kCKE},
          {"kappa", constants::kKappa},
          {"kappa_P", constants::kPoissonConstant},
          {"kappa_P_fit", fit},
          {"kappa_P_fit_level", constants::kPoissonFitLevel}};
}

nlohmann::json versions_block() {
  std::string blas = "unknown";
  if (const char* c = openblas_get_config()) {
    std::istringstream is(c);
    std::string name, ver;
    is >> name >> ver;
    blas = name + " " + ver;
  }
  std::ostringstream eig;
  eig << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  std::ostringstream js;
  js << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.' << NLOHMANN_JSON_VERSION_PATCH;
  return {{"berezin", kLibraryVersion},
          {"schema", kSchemaVersion},
          {"eigen", eig.str()},
          {"nlohmann_json", js.str()},
          {"blas", blas}};
}

nlohmann::json make_envelope(const std::string& task, const nlohmann::json& config, const nlohmann::json& result) {
  nlohmann::json j;
  j["task"] = task;
  j["config"] = config;
  j["constants"] = constants_block();
  j["versions"] = versions_block();
  j["result"] = result;
  return j;
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (x == std::floor(x) && std::abs(x) < 1e15) return std::to_string(static_cast<long long>(x));
  return nlohmann::json(x).dump();
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> r;
  for (double v : values) r.push_back(format_number(v));
  rows.push_back(std::move(r));
}

std::string CsvTable::render(const nlohmann::json& meta) const {
  std::ostringstream os;
  os << "# " << meta.dump() << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace berezin
