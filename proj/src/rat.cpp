#include "egt/rat.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

namespace egt {

Rat::Rat(long long num, long long den) : Rat(BigInt(num), BigInt(den)) {}

Rat::Rat(BigInt num, BigInt den) {
  if (den == 0) throw std::domain_error("Rat: zero denominator");
  if (den < 0) { num = -num; den = -den; }
  v_.assign(boost::multiprecision::cpp_rational(num, den));
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.is_zero()) throw std::domain_error("Rat: division by zero");
  v_ /= o.v_;
  return *this;
}

std::optional<Rat> Rat::parse(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto is_int = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      if (!is_int(text)) return std::nullopt;
      return Rat(BigInt(text), BigInt(1));
    }
    std::string num = text.substr(0, slash);
    std::string den = text.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) return std::nullopt;
    BigInt d(den);
    if (d == 0) return std::nullopt;
    return Rat(BigInt(num), d);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string Rat::str() const {
  std::ostringstream os;
  os << v_;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.v_; }

Rat min(const Rat& a, const Rat& b) { return a <= b ? a : b; }
Rat max(const Rat& a, const Rat& b) { return a >= b ? a : b; }
Rat abs(const Rat& r) { return r.is_negative() ? -r : r; }

}  // namespace egt
