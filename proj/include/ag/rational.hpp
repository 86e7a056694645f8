#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace ag {

/// Exact rational scalar. Everything in the engine is linear algebra over
/// this type; there is no floating-point mode.
using Rational = mpq_class;

inline Rational rational(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Parses "p", "-p" or "p/q" (base 10).
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("parse_rational: empty string");
  Rational r;
  if (r.set_str(text, 10) != 0)
    throw std::invalid_argument("parse_rational: bad rational '" + text + "'");
  if (r.get_den() == 0)
    throw std::invalid_argument("parse_rational: zero denominator in '" + text + "'");
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

/// SplitMix64: tiny deterministic generator. Used for all seeded randomness
/// so that reports are reproducible across platforms and standard-library
/// versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [lo, hi].
  long range(long lo, long hi) {
    if (hi < lo) throw std::invalid_argument("Rng::range: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long>(next() % span);
  }

  /// Random rational with numerator in [-max_num, max_num] and denominator
  /// in [1, max_den]. Bounded on purpose: keeps coefficient growth in the
  /// seeded suites under control.
  Rational rational(long max_num = 9, long max_den = 9) {
    return ag::rational(range(-max_num, max_num), range(1, max_den));
  }

  /// Nonzero variant of rational().
  Rational nonzero_rational(long max_num = 9, long max_den = 9) {
    while (true) {
      Rational r = rational(max_num, max_den);
      if (r != 0) return r;
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace ag
