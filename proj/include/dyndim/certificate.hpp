#pragma once

#include <string>

#include "dyndim/jsonio.hpp"
#include "dyndim/rational.hpp"

namespace dyndim {

// Machine-checkable record of a bound (or pass/fail check) on a named
// quantity. The witness carries enough data to replay the verification.
enum class CertKind { UpperBound, LowerBound, Equality, PassFail };

std::string cert_kind_name(CertKind k);
CertKind cert_kind_from_name(const std::string& s);

struct Certificate {
  CertKind kind = CertKind::PassFail;
  std::string quantity;
  Rat value = 0;
  bool pass = true;
  bool verified = false;
  Json witness = Json::object();

  Json to_json() const;
  static Certificate from_json(const Json& j);
};

}  // namespace dyndim
