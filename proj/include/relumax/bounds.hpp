#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <optional>
#include <string>

#include "relumax/rational.hpp"

namespace relumax::bounds {

/// A lower bound reported both exactly (when rational) and as a decimal
/// rounded down to `precision` fractional digits.
struct BoundResult {
  std::optional<Rational> value_exact;
  std::string value_decimal;
  int precision = 0;
  bool valid = true;
  std::string validity_note;
};

inline constexpr int kDefaultDigits = 20;

namespace detail {

inline mpz_class pow_z(const mpz_class& base, unsigned long e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

inline mpz_class pow10(unsigned long e) { return pow_z(10, e); }

/// floor(a^(1/n)) for a >= 0, n >= 1.
inline mpz_class iroot(const mpz_class& a, unsigned long n) {
  mpz_class out;
  mpz_root(out.get_mpz_t(), a.get_mpz_t(), n);
  return out;
}

/// "<int>.<digits>" from floor(x * 10^digits), x >= 0.
inline std::string fixed_point(const mpz_class& scaled, int digits) {
  std::string s = scaled.get_str();
  if (digits <= 0) return s;
  const auto n = static_cast<std::size_t>(digits);
  if (s.size() <= n) s.insert(0, n + 1 - s.size(), '0');
  s.insert(s.size() - n, ".");
  return s;
}

inline std::string decimal_floor(const Rational& x, int digits) {
  return fixed_point(floor(x * Rational(pow10(static_cast<unsigned long>(digits)))), digits);
}

/// Owning mpfr_t.
class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v_, prec); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

 private:
  mpfr_t v_;
};

inline unsigned bit_length(std::uint64_t d) {
  unsigned n = 0;
  while (d) {
    ++n;
    d >>= 1;
  }
  return n;
}

/// floor((num/den) * d^(p/q) + add), evaluated with MPFR intervals whose
/// width is shrunk until no integer lies inside; nullopt when the
/// precision cap is reached without separating (value at or near an integer).
inline std::optional<mpz_class> interval_floor(std::uint64_t d, unsigned long p, unsigned long q,
                                               unsigned long num, unsigned long den,
                                               unsigned long add) {
  for (mpfr_prec_t prec = 128; prec <= 8192; prec *= 2) {
    mpz_class floors[2];
    const mpfr_rnd_t modes[2] = {MPFR_RNDD, MPFR_RNDU};
    for (int side = 0; side < 2; ++side) {
      const mpfr_rnd_t rnd = modes[side];
      Mpfr base(prec), expo(prec), y(prec);
      mpfr_set_z(base.get(), mpz_class(std::to_string(d)).get_mpz_t(), MPFR_RNDN);  // exact
      mpfr_set_ui(expo.get(), p, rnd);
      mpfr_div_ui(expo.get(), expo.get(), q, rnd);  // d >= 1: pow is monotone in the exponent
      mpfr_pow(y.get(), base.get(), expo.get(), rnd);
      mpfr_mul_ui(y.get(), y.get(), num, rnd);
      mpfr_div_ui(y.get(), y.get(), den, rnd);
      mpfr_add_ui(y.get(), y.get(), add, rnd);
      mpfr_get_z(floors[side].get_mpz_t(), y.get(), MPFR_RNDD);
    }
    if (floors[0] == floors[1]) return floors[0];
  }
  return std::nullopt;
}

}  // namespace detail

/// 1 / (2^(k-2) - 1).
inline Rational alpha(unsigned long k) {
  if (k < 3) throw InvalidInput("alpha: k must be at least 3");
  mpz_class m;
  mpz_ui_pow_ui(m.get_mpz_t(), 2, k - 2);
  return Rational(mpz_class(1), mpz_class(m - 1));
}

/// (1 - alpha_k)(1 + alpha_{k-1}) == 1 + alpha_k, exactly.
inline bool alpha_identity_check(unsigned long k) {
  if (k < 4) throw InvalidInput("alpha_identity_check: k must be at least 4");
  return (Rational(1) - alpha(k)) * (Rational(1) + alpha(k - 1)) == Rational(1) + alpha(k);
}

/// 3 <= k <= log2(log2(d)), decided as 2^(2^k) <= d with integer arithmetic.
inline bool thm1_hypothesis(std::uint64_t d, unsigned long k) {
  if (k < 3 || d < 2) return false;
  const unsigned floor_log2 = detail::bit_length(d) - 1;
  if (k >= 32) return false;
  return (1ull << k) <= floor_log2;
}

/// Width lower bound (1/10) d^(1 + alpha_k) for depth-k networks computing
/// Max_d on the unit cube. Always computed; `valid` records the hypothesis.
inline BoundResult thm1_width_bound(std::uint64_t d, unsigned long k, int digits = kDefaultDigits) {
  if (d < 2) throw InvalidInput("thm1_width_bound: d must be at least 2");
  if (k < 3) throw InvalidInput("thm1_width_bound: k must be at least 3");
  if (digits < 1) throw InvalidInput("thm1_width_bound: need at least one digit");
  BoundResult res;
  res.precision = digits;
  res.valid = thm1_hypothesis(d, k);
  res.validity_note = res.valid ? "3 <= k <= log2(log2(d))" : "k > log2(log2(d))";

  const mpz_class dz(std::to_string(d));
  // exponent 1 + alpha_k = m/q with m = 2^(k-2), q = m - 1
  if (k - 2 < 12) {
    const unsigned long m = 1ul << (k - 2);
    const unsigned long q = m - 1;
    const mpz_class t = detail::iroot(dz, q);
    if (detail::pow_z(t, q) == dz) {
      res.value_exact = Rational(detail::pow_z(t, m), mpz_class(10));
      res.value_decimal = detail::decimal_floor(*res.value_exact, digits);
      return res;
    }
    // floor(10^digits * d^(m/q) / 10) = floor((10^((digits-1) q) d^m)^(1/q))
    const mpz_class radicand =
        detail::pow10(static_cast<unsigned long>(digits - 1) * q) * detail::pow_z(dz, m);
    res.value_decimal = detail::fixed_point(detail::iroot(radicand, q), digits);
    return res;
  }

  // Root degree too large for exact integer roots; a d of this size cannot be a
  // perfect q-th power (q > 2^11 > log2 d), so the value is irrational.
  const mpfr_prec_t prec = 4 * 64 + 4 * static_cast<mpfr_prec_t>(digits) + static_cast<mpfr_prec_t>(k);
  detail::Mpfr t(prec), expo(prec), base(prec), y(prec), scale(prec);
  mpfr_set_ui_2exp(t.get(), 1, static_cast<mpfr_exp_t>(k - 2), MPFR_RNDN);  // exact
  mpfr_sub_ui(t.get(), t.get(), 1, MPFR_RNDU);
  mpfr_ui_div(expo.get(), 1, t.get(), MPFR_RNDD);
  mpfr_add_ui(expo.get(), expo.get(), 1, MPFR_RNDD);
  mpfr_set_z(base.get(), dz.get_mpz_t(), MPFR_RNDN);
  mpfr_pow(y.get(), base.get(), expo.get(), MPFR_RNDD);
  mpfr_set_z(scale.get(), detail::pow10(static_cast<unsigned long>(digits - 1)).get_mpz_t(), MPFR_RNDD);
  mpfr_mul(y.get(), y.get(), scale.get(), MPFR_RNDD);
  mpz_class scaled;
  mpfr_get_z(scaled.get_mpz_t(), y.get(), MPFR_RNDD);
  res.value_decimal = detail::fixed_point(scaled, digits);
  return res;
}

/// floor((1/8 - 1/(4d) - 1/(2d^2)) d^2) = floor((d^2 - 2d - 4)/8), clamped at 0.
inline mpz_class thm3_width_bound(std::uint64_t d) {
  if (d < 1) throw InvalidInput("thm3_width_bound: d must be positive");
  const mpz_class dz(std::to_string(d));
  const mpz_class numer = dz * dz - 2 * dz - 4;
  if (numer < 0) return 0;
  mpz_class out;
  mpz_fdiv_q_ui(out.get_mpz_t(), numer.get_mpz_t(), 8);
  return out;
}

/// (1 - 1/(r-1)) d^2 / 2: a graph with more edges contains K_r.
inline Rational turan_max_edges(std::uint64_t d, unsigned long r) {
  if (d < 1) throw InvalidInput("turan_max_edges: d must be positive");
  if (r < 3) throw InvalidInput("turan_max_edges: r must be at least 3");
  const Rational dd(mpz_class(std::to_string(d)));
  return (Rational(1) - Rational(1, static_cast<long>(r - 1))) * dd * dd / Rational(2);
}

/// (1 - (1-delta)/(r-1)) d^2 / 2, for d >= sqrt(2/delta): a graph with at
/// least this many edges contains K_r.
inline BoundResult corollary_edge_threshold(std::uint64_t d, unsigned long r, const Rational& delta,
                                            int digits = kDefaultDigits) {
  if (r < 3) throw InvalidInput("corollary_edge_threshold: r must be at least 3");
  if (delta.sign() <= 0) throw InvalidInput("corollary_edge_threshold: delta must be positive");
  const Rational dd(mpz_class(std::to_string(d)));
  if (dd * dd < Rational(2) / delta)
    throw InvalidInput("corollary_edge_threshold: d = " + std::to_string(d) +
                       " is below sqrt(2/delta) for delta = " + delta.str());
  BoundResult res;
  res.precision = digits;
  res.value_exact =
      (Rational(1) - (Rational(1) - delta) / Rational(static_cast<long>(r - 1))) * dd * dd / Rational(2);
  res.value_decimal = detail::decimal_floor(*res.value_exact, digits);
  res.validity_note = "d >= sqrt(2/delta)";
  return res;
}

/// floor(2.1 d^(1 - alpha_k) + 1): the clique size forced in the weight
/// graph of a too-narrow depth-k network. Requires 3 <= k <= log2(log2(d)).
inline mpz_class guaranteed_clique_size(std::uint64_t d, unsigned long k) {
  if (!thm1_hypothesis(d, k))
    throw InvalidInput("guaranteed_clique_size: requires 3 <= k <= log2(log2(d))");
  // 1 - alpha_k = (m-2)/(m-1), m = 2^(k-2); the hypothesis keeps k <= 5.
  const unsigned long m = 1ul << (k - 2);
  const unsigned long p = m - 2;
  const unsigned long q = m - 1;
  if (auto r = detail::interval_floor(d, p, q, 21, 10, 1)) return *r;
  // Value sits on (or within 2^-8192 of) an integer: settle it exactly.
  // floor(21 d^(p/q) / 10) = floor(floor((21^q d^p)^(1/q)) / 10).
  const mpz_class radicand = detail::pow_z(21, q) * detail::pow_z(mpz_class(std::to_string(d)), p);
  mpz_class out;
  const mpz_class root = detail::iroot(radicand, q);
  mpz_fdiv_q_ui(out.get_mpz_t(), root.get_mpz_t(), 10);
  return out + 1;
}

}  // namespace relumax::bounds
