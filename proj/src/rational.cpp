#include "rlp/rational.hpp"

#include <charconv>
#include <cctype>
#include <cstdlib>

namespace rlp {

std::optional<Rational> parse_rational(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::string s(text);
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i >= s.size()) return std::nullopt;

  auto all_digits = [](std::string_view v) {
    if (v.empty()) return false;
    for (char c : v)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };

  std::string_view body(s.data() + i, s.size() - i);
  auto slash = body.find('/');
  auto dot = body.find('.');
  Rational r;
  if (slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    mpz_class d(std::string(den), 10);
    if (d == 0) return std::nullopt;
    r = Rational(mpz_class(std::string(num), 10), d);
  } else if (dot != std::string_view::npos) {
    auto ip = body.substr(0, dot);
    auto fp = body.substr(dot + 1);
    if (fp.empty() || !all_digits(fp)) return std::nullopt;
    if (!ip.empty() && !all_digits(ip)) return std::nullopt;
    mpz_class scale = 1;
    for (std::size_t k = 0; k < fp.size(); ++k) scale *= 10;
    mpz_class whole = ip.empty() ? mpz_class(0) : mpz_class(std::string(ip), 10);
    mpz_class frac(std::string(fp), 10);
    r = Rational(whole * scale + frac, scale);
  } else {
    if (!all_digits(body)) return std::nullopt;
    r = Rational(mpz_class(std::string(body), 10));
  }
  r.canonicalize();
  if (neg) r = -r;
  return r;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double to_double(const Rational& q) { return q.get_d(); }

}  // namespace rlp
