#pragma once

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "cpsys/fixtures.hpp"
#include "cpsys/poly_form.hpp"

namespace cpsys {

using nlohmann::json;

// Canonical JSON of an exact form: components in key order, terms as
// [[alpha],[beta],"re","im"] with exact rational strings.
json form_to_json(const QForm& f);
QForm form_from_json(const json& j);

json fixture_to_json(const MetricFixture& fx);
HermitianMetric metric_from_json(const json& j);

// Deterministic double formatting (17 significant digits round-trip).
std::string format_double(double v);

// Minimal CSV writer: header row, deterministic float formatting, and a
// leading comment block carrying the config hash.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header,
            const std::vector<std::string>& comments = {});
  void row(const std::vector<std::string>& cells);
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(const mpq_class& v) { return v.get_str(); }
  static std::string cell(const std::string& s) { return s; }

 private:
  std::ofstream out_;
  size_t width_;
};

uint64_t fnv1a(const std::string& data);
std::string hash_hex(const std::string& data);

}  // namespace cpsys
