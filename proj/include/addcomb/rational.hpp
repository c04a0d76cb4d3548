#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "addcomb/error.hpp"

namespace addcomb {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer floorDiv(const Integer& a, const Integer& b) {
  Integer q = a / b;
  Integer r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

inline Integer floorOf(const Rational& r) {
  return floorDiv(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r));
}

inline bool isIntegral(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

/// Fractional part in [0, 1).
inline Rational fracOf(const Rational& r) { return r - Rational(floorOf(r)); }

/// Least non-negative residue of an integral rational modulo m.
inline std::int64_t residueOf(const Rational& r, std::int64_t m) {
  detail::ensure(isIntegral(r), "residueOf: non-integral value");
  Integer v = boost::multiprecision::numerator(r) % m;
  if (v < 0) v += m;
  return v.convert_to<std::int64_t>();
}

/// Formats as "p/q", or "p" when integral.
inline std::string toString(const Rational& r) {
  if (isIntegral(r)) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

/// Parses "p", "-p", "p/q". Whitespace around the tokens is ignored.
inline Rational parseRational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  auto parseInt = [&](std::string_view s) {
    s = trim(s);
    std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    detail::require(s.size() > start, "empty integer in rational '" + std::string(text) + "'");
    for (std::size_t i = start; i < s.size(); ++i)
      detail::require(s[i] >= '0' && s[i] <= '9', "bad rational '" + std::string(text) + "'");
    std::string digits(s[0] == '+' ? s.substr(1) : s);
    return Integer(digits);
  };
  auto slash = text.find('/');
  auto dot = text.find('.');
  if (slash == std::string_view::npos && dot != std::string_view::npos) {
    // exact decimal: "0.4" -> 2/5
    std::string_view t = trim(text);
    dot = t.find('.');
    std::string_view frac = t.substr(dot + 1);
    std::string whole(t.substr(0, dot));
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Integer intPart = parseInt(whole);
    Integer fracPart = frac.empty() ? Integer(0) : parseInt(frac);
    detail::require(frac.empty() || (frac[0] != '-' && frac[0] != '+'), "bad rational '" + std::string(text) + "'");
    Rational r = Rational(intPart) + Rational(fracPart, scale) * (t[0] == '-' ? -1 : 1);
    return r;
  }
  if (slash == std::string_view::npos) return Rational(parseInt(text));
  Integer num = parseInt(text.substr(0, slash));
  Integer den = parseInt(text.substr(slash + 1));
  detail::require(den != 0, "zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

inline double toDouble(const Rational& r) { return r.convert_to<double>(); }

inline Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rational dot(const std::vector<std::int64_t>& k, const std::vector<Rational>& v) {
  Rational s = 0;
  for (std::size_t i = 0; i < k.size(); ++i) s += Rational(k[i]) * v[i];
  return s;
}

}  // namespace addcomb
