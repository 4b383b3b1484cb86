#include "beamsym/rational.hpp"

#include <functional>
#include <stdexcept>

namespace beamsym {

Rational::Rational(long num, long den) : q_(num, den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  q_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) : q_(num, den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  q_.canonicalize();
}

std::optional<Rational> Rational::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') i = 1;
  auto digits = [&](std::size_t from, std::size_t to) {
    if (from >= to) return false;
    for (std::size_t k = from; k < to; ++k)
      if (text[k] < '0' || text[k] > '9') return false;
    return true;
  };
  const auto slash = text.find('/');
  const std::size_t num_end = slash == std::string_view::npos ? text.size() : slash;
  if (!digits(i, num_end)) return std::nullopt;
  mpz_class num(std::string(text.substr(0, num_end)));
  mpz_class den(1);
  if (slash != std::string_view::npos) {
    if (!digits(slash + 1, text.size())) return std::nullopt;
    den = mpz_class(std::string(text.substr(slash + 1)));
    if (den == 0) return std::nullopt;
  }
  return Rational(num, den);
}

std::size_t Rational::hash() const {
  // Hash over the low limbs of numerator and denominator.
  const auto limb = [](const mpz_class& z) -> std::size_t {
    if (z == 0) return 0;
    const std::size_t v = mpz_getlimbn(z.get_mpz_t(), 0);
    return sgn(z) < 0 ? ~v : v;
  };
  const std::size_t h1 = limb(q_.get_num());
  const std::size_t h2 = limb(q_.get_den());
  return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

Rational Rational::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero");
  return Rational(mpq_class(1 / q_));
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  q_ /= o.q_;
  return *this;
}

Rational Rational::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), q_.get_num_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(d.get_mpz_t(), q_.get_den_mpz_t(), static_cast<unsigned long>(e));
  return Rational(n, d);
}

std::optional<Rational> Rational::exact_pow(const Rational& e) const {
  if (e.is_integer()) {
    if (!e.fits_long()) return std::nullopt;
    if (is_zero() && e.is_negative()) return std::nullopt;
    return pow(e.to_long());
  }
  if (is_zero()) return e.is_negative() ? std::nullopt : std::optional<Rational>(Rational(0));
  if (is_negative()) return std::nullopt;
  if (!e.den().fits_ulong_p() || !e.num().fits_slong_p()) return std::nullopt;
  const unsigned long root = e.den().get_ui();
  mpz_class rn, rd;
  const bool exact_n = mpz_root(rn.get_mpz_t(), q_.get_num_mpz_t(), root) != 0;
  const bool exact_d = mpz_root(rd.get_mpz_t(), q_.get_den_mpz_t(), root) != 0;
  if (!exact_n || !exact_d) return std::nullopt;
  return Rational(rn, rd).pow(e.num().get_si());
}

}  // namespace beamsym
