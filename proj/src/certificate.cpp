#include "dyndim/certificate.hpp"

#include "dyndim/error.hpp"

namespace dyndim {

std::string cert_kind_name(CertKind k) {
  switch (k) {
    case CertKind::UpperBound: return "upper_bound";
    case CertKind::LowerBound: return "lower_bound";
    case CertKind::Equality: return "equality";
    case CertKind::PassFail: return "pass_fail";
  }
  throw InternalError("bad certificate kind");
}

CertKind cert_kind_from_name(const std::string& s) {
  if (s == "upper_bound") return CertKind::UpperBound;
  if (s == "lower_bound") return CertKind::LowerBound;
  if (s == "equality") return CertKind::Equality;
  if (s == "pass_fail") return CertKind::PassFail;
  throw ValidationError("unknown certificate kind: " + s);
}

Json Certificate::to_json() const {
  Json j;
  j["kind"] = cert_kind_name(kind);
  j["quantity"] = quantity;
  j["value"] = rat_str(value);
  j["pass"] = pass;
  j["verified"] = verified;
  j["witness"] = witness;
  return j;
}

Certificate Certificate::from_json(const Json& j) {
  Certificate c;
  c.kind = cert_kind_from_name(j.at("kind").get<std::string>());
  c.quantity = j.at("quantity").get<std::string>();
  c.value = rat_from_json(j.at("value"));
  c.pass = j.at("pass").get<bool>();
  c.verified = j.at("verified").get<bool>();
  c.witness = j.at("witness");
  return c;
}

}  // namespace dyndim
