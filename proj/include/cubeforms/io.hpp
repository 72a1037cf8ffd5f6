#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cubeforms/constructions.hpp"
#include "cubeforms/error.hpp"
#include "cubeforms/forms.hpp"
#include "cubeforms/numeric.hpp"
#include "cubeforms/structure.hpp"

namespace cubeforms {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// Documents are canonical by construction: object keys sort alphabetically,
// residue lists are sorted and reduced, forms list [coordinate, coefficient]
// pairs in increasing coordinate order, and rationals serialize as "num/den"
// strings so no precision is lost.

namespace detail {

inline void require(bool ok, const std::string& why) {
  if (!ok) fail(ErrorKind::InvalidInput, why);
}

inline std::vector<int> int_list(const Json& j, const std::string& what) {
  require(j.is_array(), what + " must be an array");
  std::vector<int> out;
  for (const auto& e : j) {
    require(e.is_number_integer(), what + " entries must be integers");
    out.push_back(e.get<int>());
  }
  return out;
}

}  // namespace detail

inline Json form_to_json(const LinearForm& form) {
  Json pairs = Json::array();
  for (const auto& [z, c] : form.coeffs()) pairs.push_back({z, c});
  return pairs;
}

inline LinearForm form_from_json(const Json& j, const Modulus& p) {
  detail::require(j.is_array(), "form must be an array of [coordinate, coefficient]");
  LinearForm out(p);
  for (const auto& entry : j) {
    detail::require(entry.is_array() && entry.size() == 2,
                    "form entries must be [coordinate, coefficient]");
    const auto z = entry[0].get<std::int64_t>();
    const auto c = entry[1].get<std::int64_t>();
    detail::require(z >= 0, "coordinates must be nonnegative");
    detail::require(p.reduce(c) != 0, "form coefficients must be nonzero mod p");
    detail::require(out.coeff(static_cast<Coord>(z)) == 0,
                    "duplicate coordinate in form");
    out.set(static_cast<Coord>(z), c);
  }
  return out;
}

inline Json system_to_json(const ConditionSystem& system) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["p"] = system.modulus().value();
  doc["S"] = system.alphabet().elements();
  Json conditions = Json::array();
  for (const auto& cond : system.conditions()) {
    Json c;
    c["form"] = form_to_json(cond.form);
    c["E"] = cond.target.elements();
    conditions.push_back(c);
  }
  doc["conditions"] = conditions;
  return doc;
}

inline ConditionSystem system_from_json(const Json& doc) {
  detail::require(doc.is_object(), "system document must be an object");
  detail::require(doc.contains("format_version") &&
                      doc["format_version"].get<int>() == kFormatVersion,
                  "unsupported format_version");
  detail::require(doc.contains("p") && doc["p"].is_number_integer(), "missing p");
  const Modulus p(doc["p"].get<int>());
  const Alphabet S(p, detail::int_list(doc.at("S"), "S"));
  std::vector<Condition> conditions;
  detail::require(doc.contains("conditions") && doc["conditions"].is_array(),
                  "missing conditions");
  for (const auto& c : doc["conditions"]) {
    detail::require(c.is_object() && c.contains("form") && c.contains("E"),
                    "condition must carry form and E");
    conditions.emplace_back(form_from_json(c["form"], p),
                            TargetSet(p, detail::int_list(c["E"], "E")));
  }
  return ConditionSystem(p, S, std::move(conditions));
}

struct CertificateDocument {
  int p = 3;
  CertificatePayload payload;
  int u = 0;
  double bound_decimal = 1.0;
  bool trivial = false;
  bool best_effort = false;
  std::vector<std::size_t> dropped;
};

inline CertificateDocument to_document(const DensityBoundReport& report, int p_value) {
  CertificateDocument doc;
  doc.p = p_value;
  doc.payload = to_payload(report);
  doc.u = report.u;
  doc.bound_decimal = report.bound;
  doc.trivial = report.trivial;
  doc.best_effort = report.best_effort;
  doc.dropped = report.dropped;
  return doc;
}

inline Json certificate_to_json(const CertificateDocument& cert) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["p"] = cert.p;
  doc["kind"] = to_string(cert.payload.kind);
  doc["u"] = cert.u;
  doc["r"] = cert.payload.r;
  doc["bound"] = {{"decimal", decimal_string(cert.bound_decimal)},
                  {"rational", to_fraction_string(cert.payload.bound)}};
  doc["trivial"] = cert.trivial;
  doc["best_effort"] = cert.best_effort;
  doc["dropped"] = cert.dropped;
  doc["members"] = cert.payload.members;
  if (cert.payload.kind == CertificateKind::Sunflower) {
    doc["center"] = form_to_json(cert.payload.center.has_value()
                                     ? *cert.payload.center
                                     : LinearForm(Modulus(cert.p)));
    Json petals = Json::array();
    for (const auto& petal : cert.payload.petals) petals.push_back(form_to_json(petal));
    doc["petals"] = petals;
    doc["min_petal_support"] = cert.payload.min_petal_support;
  }
  return doc;
}

inline CertificateDocument certificate_from_json(const Json& doc) {
  detail::require(doc.is_object(), "certificate document must be an object");
  detail::require(doc.contains("format_version") &&
                      doc["format_version"].get<int>() == kFormatVersion,
                  "unsupported format_version");
  CertificateDocument cert;
  cert.p = doc.at("p").get<int>();
  const Modulus p(cert.p);
  const std::string kind = doc.at("kind").get<std::string>();
  detail::require(kind == "equidistribution" || kind == "sunflower",
                  "unknown certificate kind");
  cert.payload.kind = kind == "equidistribution" ? CertificateKind::Equidistribution
                                                 : CertificateKind::Sunflower;
  cert.u = doc.at("u").get<int>();
  cert.payload.r = doc.at("r").get<int>();
  cert.bound_decimal = std::stod(doc.at("bound").at("decimal").get<std::string>());
  cert.payload.bound = parse_fraction(doc.at("bound").at("rational").get<std::string>());
  cert.trivial = doc.value("trivial", false);
  cert.best_effort = doc.value("best_effort", false);
  for (const auto& d : doc.value("dropped", Json::array()))
    cert.dropped.push_back(d.get<std::size_t>());
  for (const auto& m : doc.at("members")) cert.payload.members.push_back(m.get<std::size_t>());
  if (cert.payload.kind == CertificateKind::Sunflower) {
    cert.payload.center = form_from_json(doc.at("center"), p);
    for (const auto& petal : doc.at("petals"))
      cert.payload.petals.push_back(form_from_json(petal, p));
    cert.payload.min_petal_support = doc.at("min_petal_support").get<int>();
  }
  return cert;
}

// Full re-validation of a parsed certificate against a parsed system,
// including the document-level consistency of the decimal/rational bound.
inline VerifyResult verify_certificate_document(const CertificateDocument& cert,
                                                const ConditionSystem& system) {
  VerifyResult result;
  if (cert.p != system.modulus().value()) {
    result.ok = false;
    result.reasons.push_back("certificate/system modulus mismatch");
    return result;
  }
  if (std::abs(cert.bound_decimal - to_double(cert.payload.bound)) > 1e-9) {
    result.ok = false;
    result.reasons.push_back("decimal bound does not match exact rational");
  }
  if (cert.trivial) {
    if (!(cert.payload.bound == 1)) {
      result.ok = false;
      result.reasons.push_back("trivial certificate must carry bound 1");
    }
    return result;
  }
  const VerifyResult inner = verify_certificate(cert.payload, system);
  result.ok = result.ok && inner.ok;
  result.reasons.insert(result.reasons.end(), inner.reasons.begin(), inner.reasons.end());
  return result;
}

inline Json construction_report_to_json(const ConstructionReport& report) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["name"] = report.name;
  doc["system"] = system_to_json(report.system);
  if (report.extra.has_value()) {
    doc["extra"] = {{"form", form_to_json(report.extra->form)},
                    {"E", report.extra->target.elements()}};
  }
  Json claims = Json::array();
  for (const auto& claim : report.claims)
    claims.push_back(
        {{"name", claim.name}, {"checked", claim.checked}, {"detail", claim.detail}});
  doc["claims"] = claims;
  doc["parameters"] = report.parameters;
  return doc;
}

inline std::string dump_canonical(const Json& doc) { return doc.dump(); }
inline std::string dump_pretty(const Json& doc) { return doc.dump(2) + "\n"; }

inline Json parse_json_text(const std::string& text) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail(ErrorKind::InvalidInput, "malformed JSON document");
  return doc;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path);
  out << content;
}

// CLI exit-code policy: 0 success, 1 verification failure, 2 invalid input,
// 3 resource limits.
inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EnumerationTooLarge:
    case ErrorKind::ExactEngineTooLarge:
      return 3;
    default:
      return 2;
  }
}

}  // namespace cubeforms
