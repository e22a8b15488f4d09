#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace berezin {

inline constexpr const char* kLibraryVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// normalization constants used throughout, plus the p = 12 commutator fit of kappa_P
nlohmann::json constants_block();
nlohmann::json versions_block();

// {"task", "config", "constants", "versions", "result"}
nlohmann::json make_envelope(const std::string& task, const nlohmann::json& config, const nlohmann::json& result);

std::string dump_json(const nlohmann::json& j);

// shortest round-trip decimal form, as in the JSON output
std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add_row(const std::vector<double>& values);
  // first line: "# " + compact JSON metadata
  std::string render(const nlohmann::json& meta) const;
};

}  // namespace berezin
