#ifndef EGT_RAT_HPP
#define EGT_RAT_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace egt {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational number, always in lowest terms with positive denominator.
class Rat {
 public:
  Rat() : v_(0) {}
  Rat(long long n) : v_(n) {}  // NOLINT: implicit from integers is intended
  Rat(long long num, long long den);
  Rat(BigInt num, BigInt den);

  static Rat zero() { return Rat(0); }
  static Rat one() { return Rat(1); }

  // Parses "p/q", "p", or "-p/q". Whitespace is not accepted.
  static std::optional<Rat> parse(const std::string& text);

  BigInt num() const { return numerator(v_); }
  BigInt den() const { return denominator(v_); }

  bool is_zero() const { return v_.is_zero(); }
  bool is_negative() const { return v_ < 0; }
  bool is_positive() const { return v_ > 0; }
  bool is_integer() const { return denominator(v_) == 1; }

  Rat operator-() const { return Rat(-v_); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

  // Renders "p/q" in lowest terms, or "p" when the denominator is 1.
  std::string str() const;

  friend std::ostream& operator<<(std::ostream& os, const Rat& r);

 private:
  explicit Rat(boost::multiprecision::cpp_rational v) : v_(std::move(v)) {}
  boost::multiprecision::cpp_rational v_;
};

Rat min(const Rat& a, const Rat& b);
Rat max(const Rat& a, const Rat& b);
Rat abs(const Rat& r);

}  // namespace egt

#endif  // EGT_RAT_HPP
