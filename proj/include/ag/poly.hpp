#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ag/rational.hpp"

namespace ag {

/// Exponent vector of a monomial; length = number of chart variables.
using Monomial = std::vector<int>;

inline int total_degree(const Monomial& m) {
  return std::accumulate(m.begin(), m.end(), 0);
}

/// Degree-lexicographic order (total degree first, then lex). This is the
/// canonical term order everywhere: serialized forms and kernel bases are
/// deterministic because of it.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

/// Raised when a product would exceed the configured total-degree cap.
/// Carries the chain of operations that led to the overflow.
class degree_cap_error : public std::runtime_error {
 public:
  degree_cap_error(std::string op, int degree, int cap)
      : std::runtime_error("degree cap exceeded in " + op + ": degree " +
                           std::to_string(degree) + " > cap " + std::to_string(cap)),
        chain_{std::move(op)} {}

  void push_context(const std::string& op) {
    chain_.push_back(op);
    message_.clear();
  }

  const std::vector<std::string>& chain() const { return chain_; }

  const char* what() const noexcept override {
    if (message_.empty()) {
      message_ = std::runtime_error::what();
      if (chain_.size() > 1) {
        message_ += " [via";
        for (std::size_t i = 1; i < chain_.size(); ++i) message_ += " " + chain_[i];
        message_ += "]";
      }
    }
    return message_.c_str();
  }

 private:
  std::vector<std::string> chain_;
  mutable std::string message_;
};

/// Global total-degree cap for polynomial products (default 12).
inline std::atomic<int>& degree_cap() {
  static std::atomic<int> cap{12};
  return cap;
}

/// RAII override of the degree cap.
class DegreeCapGuard {
 public:
  explicit DegreeCapGuard(int cap) : saved_(degree_cap().exchange(cap)) {}
  ~DegreeCapGuard() { degree_cap().store(saved_); }
  DegreeCapGuard(const DegreeCapGuard&) = delete;
  DegreeCapGuard& operator=(const DegreeCapGuard&) = delete;

 private:
  int saved_;
};

/// Runs fn, annotating any degree_cap_error with the calling operation name.
template <class F>
auto with_cap_context(const char* op, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (degree_cap_error& e) {
    e.push_context(op);
    throw;
  }
}

/// Exact multivariate polynomial over the rationals.
///
/// Invariants: no zero coefficients are stored and terms are kept in
/// degree-lexicographic order (the std::map comparator).
class Poly {
 public:
  Poly() : nvars_(0) {}
  explicit Poly(int nvars) : nvars_(nvars) {}

  static Poly constant(int nvars, const Rational& c) {
    Poly p(nvars);
    if (c != 0) p.terms_.emplace(Monomial(nvars, 0), c);
    return p;
  }

  static Poly variable(int nvars, int var, const Rational& coeff = 1) {
    if (var < 0 || var >= nvars) throw std::invalid_argument("Poly::variable: index out of range");
    Poly p(nvars);
    if (coeff != 0) {
      Monomial m(nvars, 0);
      m[var] = 1;
      p.terms_.emplace(std::move(m), coeff);
    }
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
  }

  Rational constant_term() const {
    auto it = terms_.find(Monomial(nvars_, 0));
    return it == terms_.end() ? Rational(0) : it->second;
  }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, total_degree(m));
    return d;
  }

  const std::map<Monomial, Rational, GrlexLess>& terms() const { return terms_; }

  void add_term(const Monomial& m, const Rational& c) {
    if (static_cast<int>(m.size()) != nvars_)
      throw std::invalid_argument("Poly::add_term: wrong exponent length");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    check_compatible(a, b, "operator+");
    Poly r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, c);
    return r;
  }

  friend Poly operator-(const Poly& a, const Poly& b) {
    check_compatible(a, b, "operator-");
    Poly r = a;
    for (const auto& [m, c] : b.terms_) r.add_term(m, -c);
    return r;
  }

  Poly operator-() const {
    Poly r(nvars_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
  }

  friend Poly operator*(const Poly& a, const Poly& b) {
    check_compatible(a, b, "operator*");
    Poly r(a.nvars_);
    if (a.terms_.empty() || b.terms_.empty()) return r;
    const int cap = degree_cap().load();
    Monomial m(a.nvars_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        for (int i = 0; i < a.nvars_; ++i) m[i] = ma[i] + mb[i];
        const int d = total_degree(m);
        if (d > cap) throw degree_cap_error("Poly::operator*", d, cap);
        r.add_term(m, ca * cb);
      }
    }
    return r;
  }

  friend Poly operator*(const Rational& c, const Poly& p) {
    Poly r(p.nvars_);
    if (c == 0) return r;
    for (const auto& [m, pc] : p.terms_) r.terms_.emplace(m, c * pc);
    return r;
  }
  friend Poly operator*(const Poly& p, const Rational& c) { return c * p; }

  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  bool operator==(const Poly& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  /// Exact partial derivative with respect to variable `var`.
  Poly derivative(int var) const {
    if (var < 0 || var >= nvars_) throw std::invalid_argument("Poly::derivative: index out of range");
    Poly r(nvars_);
    for (const auto& [m, c] : terms_) {
      if (m[var] == 0) continue;
      Monomial dm = m;
      dm[var] -= 1;
      r.terms_.emplace(std::move(dm), c * m[var]);
    }
    return r;
  }

  /// Exact evaluation at a rational point.
  Rational eval(std::span<const Rational> point) const {
    if (static_cast<int>(point.size()) != nvars_)
      throw std::invalid_argument("Poly::eval: wrong point dimension");
    Rational total = 0;
    for (const auto& [m, c] : terms_) {
      Rational term = c;
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < m[i]; ++k) term *= point[i];
      total += term;
    }
    return total;
  }

  std::string str(const std::vector<std::string>& var_names = {}) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) out << " + ";
      first = false;
      out << to_string(c);
      for (int i = 0; i < nvars_; ++i) {
        if (m[i] == 0) continue;
        out << "*";
        if (static_cast<int>(var_names.size()) == nvars_) out << var_names[i];
        else out << "x" << i;
        if (m[i] > 1) out << "^" << m[i];
      }
    }
    return out.str();
  }

 private:
  static void check_compatible(const Poly& a, const Poly& b, const char* op) {
    if (a.nvars_ != b.nvars_)
      throw std::invalid_argument(std::string("Poly::") + op + ": mismatched variable counts");
  }

  int nvars_;
  std::map<Monomial, Rational, GrlexLess> terms_;
};

inline Poly random_poly(Rng& rng, int nvars, int max_degree, int nterms) {
  Poly p(nvars);
  for (int t = 0; t < nterms; ++t) {
    Monomial m(nvars, 0);
    int budget = static_cast<int>(rng.range(0, max_degree));
    for (int i = 0; i < budget; ++i) m[rng.range(0, nvars - 1)] += 1;
    p.add_term(m, rng.rational());
  }
  return p;
}

}  // namespace ag
