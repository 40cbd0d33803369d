#include "cpsys/serialization.hpp"

#include <cinttypes>
#include <cstdio>

namespace cpsys {

namespace {

json rat_str(const mpq_class& q) { return q.get_str(); }
mpq_class rat_parse(const json& j) {
  mpq_class q(j.get<std::string>());
  q.canonicalize();
  return q;
}

json idx_to_json(const MultiIndex& m) {
  json a = json::array();
  for (int j = 0; j < m.nv; ++j) a.push_back(int(m[j]));
  return a;
}

MultiIndex idx_from_json(const json& a) {
  MultiIndex m(int(a.size()));
  for (size_t j = 0; j < a.size(); ++j) m[int(j)] = uint8_t(a[j].get<int>());
  return m;
}

}  // namespace

json form_to_json(const QForm& f) {
  json comps = json::array();
  for (const auto& [k, comp] : f.components()) {
    json terms = json::array();
    for (const auto& [tk, c] : comp.num.terms())
      terms.push_back(json::array(
          {idx_to_json(tk.alpha), idx_to_json(tk.beta), rat_str(c.re), rat_str(c.im)}));
    json I = json::array(), J = json::array();
    for (int j = 0; j < f.nvars(); ++j) {
      if (set_has(k.I, j)) I.push_back(j);
      if (set_has(k.J, j)) J.push_back(j);
    }
    comps.push_back(json{{"I", I},
                         {"J", J},
                         {"den_pow", comp.den_pow},
                         {"adeg", comp.num.adeg()},
                         {"bdeg", comp.num.bdeg()},
                         {"terms", terms}});
  }
  return json{{"nvars", f.nvars()}, {"degree", f.degree()}, {"components", comps}};
}

QForm form_from_json(const json& j) {
  QForm f(j.at("nvars").get<int>(), j.at("degree").get<int>());
  for (const auto& c : j.at("components")) {
    IdxSet I = 0, J = 0;
    for (const auto& v : c.at("I")) I |= IdxSet(1u << v.get<int>());
    for (const auto& v : c.at("J")) J |= IdxSet(1u << v.get<int>());
    QPoly num(f.nvars(), c.at("adeg").get<int>(), c.at("bdeg").get<int>());
    for (const auto& t : c.at("terms"))
      num.add_term(TermKey{idx_from_json(t[0]), idx_from_json(t[1])},
                   GaussRat(rat_parse(t[2]), rat_parse(t[3])));
    f.add_component(FormKey{I, J}, std::move(num), c.at("den_pow").get<int>());
  }
  return f;
}

json fixture_to_json(const MetricFixture& fx) {
  return json{{"name", fx.name},
              {"provenance", fx.provenance},
              {"n", fx.metric.n()},
              {"mode", "exact"},
              {"omega", form_to_json(fx.metric.omega())}};
}

HermitianMetric metric_from_json(const json& j) {
  return HermitianMetric::from_form(form_from_json(j.at("omega")));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::string>& comments)
    : out_(path), width_(header.size()) {
  require(out_.good(), Errc::ConfigInvalid, "cannot open output file " + path);
  for (const auto& c : comments) out_ << "# " << c << "\n";
  for (size_t i = 0; i < header.size(); ++i) out_ << header[i] << (i + 1 < header.size() ? "," : "");
  out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  require(cells.size() == width_, Errc::Internal, "csv row width mismatch");
  for (size_t i = 0; i < cells.size(); ++i) out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
  out_ << "\n";
}

uint64_t fnv1a(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(const std::string& data) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(data));
  return buf;
}

}  // namespace cpsys
