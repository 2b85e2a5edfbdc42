#include "dyndim/rational.hpp"

#include <sstream>

#include "dyndim/error.hpp"
#include "dyndim/jsonio.hpp"

namespace dyndim {

std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << rat_num(r);
  if (rat_den(r) != 1) os << "/" << rat_den(r);
  return os.str();
}

Rat parse_rat(const std::string& s) {
  if (s.empty()) throw ValidationError("empty rational literal");
  auto slash = s.find('/');
  auto parse_int = [&](const std::string& part) -> Int {
    if (part.empty()) throw ValidationError("malformed rational '" + s + "'");
    std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
    if (i == part.size()) throw ValidationError("malformed rational '" + s + "'");
    for (; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') throw ValidationError("malformed rational '" + s + "'");
    return Int(part);
  };
  Int num = parse_int(slash == std::string::npos ? s : s.substr(0, slash));
  Int den = 1;
  if (slash != std::string::npos) {
    den = parse_int(s.substr(slash + 1));
    if (den == 0) throw ValidationError("zero denominator in rational '" + s + "'");
  }
  return Rat(num, den);
}

Int rat_floor(const Rat& r) {
  Int q = rat_num(r) / rat_den(r);
  if (rat_num(r) < 0 && q * rat_den(r) != rat_num(r)) q -= 1;
  return q;
}

bool rat_is_integer(const Rat& r) { return rat_den(r) == 1; }

Int int_gcd(Int a, Int b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Int int_lcm(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  Int g = int_gcd(a, b);
  Int l = (a / g) * b;
  return l < 0 ? Int(-l) : l;
}

std::string format_rat_vec(const std::vector<Rat>& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += rat_str(v[i]);
  }
  out += ")";
  return out;
}

Json rat_vec_json(const std::vector<Rat>& v) {
  Json j = Json::array();
  for (const auto& r : v) j.push_back(rat_str(r));
  return j;
}

std::vector<Rat> rat_vec_from_json(const Json& j) {
  std::vector<Rat> out;
  for (const auto& e : j) out.push_back(rat_from_json(e));
  return out;
}

Rat rat_from_json(const Json& j) {
  if (j.is_string()) return parse_rat(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long long>());
  throw ValidationError("expected rational as \"p/q\" string");
}

}  // namespace dyndim
