#pragma once

#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ag/poly.hpp"

namespace ag {

/// Typed tensor slots. E has rank 2, F has rank n; contractions are legal
/// only between a slot and its dual kind.
enum class Slot : std::uint8_t { EUp, EDown, FUp, FDown };

inline bool is_e_slot(Slot s) { return s == Slot::EUp || s == Slot::EDown; }
inline bool is_up(Slot s) { return s == Slot::EUp || s == Slot::FUp; }
inline Slot dual_slot(Slot s) {
  switch (s) {
    case Slot::EUp: return Slot::EDown;
    case Slot::EDown: return Slot::EUp;
    case Slot::FUp: return Slot::FDown;
    case Slot::FDown: return Slot::FUp;
  }
  throw std::logic_error("dual_slot: bad slot");
}

inline const char* slot_name(Slot s) {
  switch (s) {
    case Slot::EUp: return "Eup";
    case Slot::EDown: return "Edown";
    case Slot::FUp: return "Fup";
    case Slot::FDown: return "Fdown";
  }
  return "?";
}

/// Dense abstract-index tensor with Poly components, slot-major layout.
class IndexedTensor {
 public:
  IndexedTensor() : n_(0), nvars_(0) {}

  IndexedTensor(int n, int nvars, std::vector<Slot> slots)
      : n_(n), nvars_(nvars), slots_(std::move(slots)) {
    comp_.assign(component_count(), Poly(nvars_));
  }

  static IndexedTensor scalar(int n, int nvars, const Poly& value) {
    IndexedTensor t(n, nvars, {});
    t.comp_[0] = value;
    return t;
  }

  /// Kronecker delta on the E factor, slots (EUp, EDown).
  static IndexedTensor delta_e(int n, int nvars) {
    IndexedTensor t(n, nvars, {Slot::EUp, Slot::EDown});
    for (int i = 0; i < 2; ++i) t.at({i, i}) = Poly::constant(nvars, 1);
    return t;
  }

  /// Kronecker delta on the F factor, slots (FUp, FDown).
  static IndexedTensor delta_f(int n, int nvars) {
    IndexedTensor t(n, nvars, {Slot::FUp, Slot::FDown});
    for (int i = 0; i < n; ++i) t.at({i, i}) = Poly::constant(nvars, 1);
    return t;
  }

  int n() const { return n_; }
  int nvars() const { return nvars_; }
  int rank() const { return static_cast<int>(slots_.size()); }
  const std::vector<Slot>& slots() const { return slots_; }
  Slot slot(int i) const { return slots_.at(i); }
  int dim(int i) const { return is_e_slot(slots_[i]) ? 2 : n_; }

  std::size_t component_count() const {
    std::size_t c = 1;
    for (int i = 0; i < rank(); ++i) c *= static_cast<std::size_t>(dim(i));
    return c;
  }

  const std::vector<Poly>& components() const { return comp_; }
  std::vector<Poly>& components() { return comp_; }

  std::size_t flat_index(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank())
      throw std::invalid_argument("IndexedTensor: wrong index rank");
    std::size_t f = 0;
    for (int i = 0; i < rank(); ++i) {
      const int d = dim(i);
      if (idx[i] < 0 || idx[i] >= d) throw std::out_of_range("IndexedTensor: index out of range");
      f = f * d + idx[i];
    }
    return f;
  }

  Poly& at(std::initializer_list<int> idx) { return comp_[flat_index(std::span(idx.begin(), idx.size()))]; }
  const Poly& at(std::initializer_list<int> idx) const {
    return comp_[flat_index(std::span(idx.begin(), idx.size()))];
  }
  Poly& at(std::span<const int> idx) { return comp_[flat_index(idx)]; }
  const Poly& at(std::span<const int> idx) const { return comp_[flat_index(idx)]; }

  bool is_zero() const {
    for (const auto& p : comp_)
      if (!p.is_zero()) return false;
    return true;
  }

  int max_degree() const {
    int d = 0;
    for (const auto& p : comp_) d = std::max(d, p.degree());
    return d;
  }

  friend IndexedTensor operator+(const IndexedTensor& a, const IndexedTensor& b) {
    check_same_shape(a, b, "operator+");
    IndexedTensor r = a;
    for (std::size_t i = 0; i < r.comp_.size(); ++i) r.comp_[i] += b.comp_[i];
    return r;
  }
  friend IndexedTensor operator-(const IndexedTensor& a, const IndexedTensor& b) {
    check_same_shape(a, b, "operator-");
    IndexedTensor r = a;
    for (std::size_t i = 0; i < r.comp_.size(); ++i) r.comp_[i] -= b.comp_[i];
    return r;
  }
  IndexedTensor operator-() const {
    IndexedTensor r = *this;
    for (auto& p : r.comp_) p = -p;
    return r;
  }
  friend IndexedTensor operator*(const Rational& c, const IndexedTensor& t) {
    IndexedTensor r = t;
    for (auto& p : r.comp_) p = c * p;
    return r;
  }
  friend IndexedTensor operator*(const Poly& c, const IndexedTensor& t) {
    IndexedTensor r = t;
    for (auto& p : r.comp_) p = c * p;
    return r;
  }

  bool operator==(const IndexedTensor& o) const {
    return n_ == o.n_ && nvars_ == o.nvars_ && slots_ == o.slots_ && comp_ == o.comp_;
  }
  bool operator!=(const IndexedTensor& o) const { return !(*this == o); }

  /// Evaluates every component at a rational point; result components are
  /// constant polynomials of the same shape.
  IndexedTensor eval(std::span<const Rational> point) const {
    IndexedTensor r(n_, nvars_, slots_);
    for (std::size_t i = 0; i < comp_.size(); ++i)
      r.comp_[i] = Poly::constant(nvars_, comp_[i].eval(point));
    return r;
  }

  static void check_same_shape(const IndexedTensor& a, const IndexedTensor& b, const char* op) {
    if (a.n_ != b.n_ || a.nvars_ != b.nvars_ || a.slots_ != b.slots_)
      throw std::invalid_argument(std::string("IndexedTensor::") + op + ": shape mismatch");
  }

 private:
  int n_;
  int nvars_;
  std::vector<Slot> slots_;
  std::vector<Poly> comp_;
};

/// Odometer over a multi-index with the given dimensions.
template <class F>
void for_each_index(std::span<const int> dims, F&& fn) {
  std::vector<int> idx(dims.size(), 0);
  while (true) {
    fn(std::span<const int>(idx));
    int pos = static_cast<int>(dims.size()) - 1;
    while (pos >= 0) {
      if (++idx[pos] < dims[pos]) break;
      idx[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
}

inline std::vector<int> tensor_dims(const IndexedTensor& t) {
  std::vector<int> dims(t.rank());
  for (int i = 0; i < t.rank(); ++i) dims[i] = t.dim(i);
  return dims;
}

inline IndexedTensor tensor_product(const IndexedTensor& a, const IndexedTensor& b) {
  if (a.n() != b.n() || a.nvars() != b.nvars())
    throw std::invalid_argument("tensor_product: incompatible tensors");
  std::vector<Slot> slots = a.slots();
  slots.insert(slots.end(), b.slots().begin(), b.slots().end());
  IndexedTensor r(a.n(), a.nvars(), std::move(slots));
  const auto da = tensor_dims(a), db = tensor_dims(b);
  for_each_index(da, [&](std::span<const int> ia) {
    const Poly& pa = a.at(ia);
    if (pa.is_zero()) return;
    for_each_index(db, [&](std::span<const int> ib) {
      const Poly& pb = b.at(ib);
      if (pb.is_zero()) return;
      std::vector<int> idx(ia.begin(), ia.end());
      idx.insert(idx.end(), ib.begin(), ib.end());
      r.at(idx) += pa * pb;
    });
  });
  return r;
}

/// Contracts slots i and j (which must be dual kinds); remaining slots keep
/// their order.
inline IndexedTensor contract(const IndexedTensor& t, int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= t.rank() || j >= t.rank())
    throw std::invalid_argument("contract: bad slot positions");
  if (t.slot(i) != dual_slot(t.slot(j)))
    throw std::invalid_argument("contract: slots are not dual kinds");
  if (i > j) std::swap(i, j);
  std::vector<Slot> slots;
  for (int k = 0; k < t.rank(); ++k)
    if (k != i && k != j) slots.push_back(t.slot(k));
  IndexedTensor r(t.n(), t.nvars(), std::move(slots));
  const int d = t.dim(i);
  const auto rdims = tensor_dims(r);
  for_each_index(rdims, [&](std::span<const int> ridx) {
    std::vector<int> idx(t.rank());
    int pos = 0;
    for (int k = 0; k < t.rank(); ++k) {
      if (k == i || k == j) continue;
      idx[k] = ridx[pos++];
    }
    Poly sum(t.nvars());
    for (int v = 0; v < d; ++v) {
      idx[i] = v;
      idx[j] = v;
      sum += t.at(idx);
    }
    r.at(ridx) = sum;
  });
  return r;
}

/// Reorders slots: result slot k is source slot perm[k].
inline IndexedTensor transpose(const IndexedTensor& t, const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != t.rank())
    throw std::invalid_argument("transpose: bad permutation size");
  std::vector<Slot> slots(t.rank());
  for (int k = 0; k < t.rank(); ++k) slots[k] = t.slot(perm[k]);
  IndexedTensor r(t.n(), t.nvars(), std::move(slots));
  const auto rdims = tensor_dims(r);
  for_each_index(rdims, [&](std::span<const int> ridx) {
    std::vector<int> sidx(t.rank());
    for (int k = 0; k < t.rank(); ++k) sidx[perm[k]] = ridx[k];
    r.at(ridx) = t.at(sidx);
  });
  return r;
}

enum class SymMode { symmetrize, alternate };

namespace detail {
template <class F>
void for_each_permutation(int k, F&& fn) {
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  int sign = 1;
  // Iterates in lexicographic order, tracking the parity change per step.
  do {
    fn(perm, sign);
  } while ([&] {
    // std::next_permutation with parity bookkeeping: recompute sign from
    // inversion count (k is tiny here).
    if (!std::next_permutation(perm.begin(), perm.end())) return false;
    int inv = 0;
    for (std::size_t a = 0; a < perm.size(); ++a)
      for (std::size_t b = a + 1; b < perm.size(); ++b)
        if (perm[a] > perm[b]) ++inv;
    sign = (inv % 2 == 0) ? 1 : -1;
    return true;
  }());
}
}  // namespace detail

/// Averages over permutations of the chosen slot positions (with sign when
/// alternating). The chosen slots must all be of one kind.
inline IndexedTensor sym_ops(const IndexedTensor& t, const std::vector<int>& positions,
                             SymMode mode) {
  if (positions.size() < 2) throw std::invalid_argument("sym_ops: need at least two slots");
  const Slot kind = t.slot(positions[0]);
  for (int p : positions)
    if (t.slot(p) != kind) throw std::invalid_argument("sym_ops: mixed slot kinds in group");
  IndexedTensor r(t.n(), t.nvars(), t.slots());
  const auto dims = tensor_dims(t);
  long count = 0;
  detail::for_each_permutation(static_cast<int>(positions.size()), [&](const std::vector<int>& perm, int sign) {
    ++count;
    for_each_index(dims, [&](std::span<const int> idx) {
      std::vector<int> src(idx.begin(), idx.end());
      for (std::size_t k = 0; k < positions.size(); ++k)
        src[positions[k]] = idx[positions[perm[k]]];
      const Poly& v = t.at(src);
      if (v.is_zero()) return;
      if (mode == SymMode::alternate && sign < 0) r.at(idx) -= v;
      else r.at(idx) += v;
    });
  });
  const Rational inv_count = Rational(1) / Rational(count);
  for (auto& p : r.components()) p = inv_count * p;
  return r;
}

inline IndexedTensor symmetrize(const IndexedTensor& t, const std::vector<int>& positions) {
  return sym_ops(t, positions, SymMode::symmetrize);
}
inline IndexedTensor alternate(const IndexedTensor& t, const std::vector<int>& positions) {
  return sym_ops(t, positions, SymMode::alternate);
}

/// Projections of a symmetric (0,2)-tensor with slots (EUp,FDown,EUp,FDown)
/// onto its E,F-symmetric and E,F-alternating parts.
struct Sym2Parts {
  IndexedTensor sym_sym;  // symmetrized in both the E and the F slot pairs
  IndexedTensor alt_alt;  // alternated in both
};

inline bool is_pair_symmetric(const IndexedTensor& s) {
  return transpose(s, {2, 3, 0, 1}) == s;
}

inline void require_cotangent_square(const IndexedTensor& s, const char* op) {
  const std::vector<Slot> want{Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown};
  if (s.slots() != want) throw std::invalid_argument(std::string(op) + ": wrong slot signature");
}

inline Sym2Parts sym2_decompose(const IndexedTensor& s) {
  require_cotangent_square(s, "sym2_decompose");
  if (!is_pair_symmetric(s))
    throw std::invalid_argument("sym2_decompose: input not symmetric under pair swap");
  Sym2Parts parts{symmetrize(symmetrize(s, {0, 2}), {1, 3}),
                  alternate(alternate(s, {0, 2}), {1, 3})};
  return parts;
}

/// Mixed projections (E-symmetric/F-alternating and vice versa); both vanish
/// identically on symmetric input.
inline IndexedTensor sym2_mixed_sa(const IndexedTensor& s) {
  return alternate(symmetrize(s, {0, 2}), {1, 3});
}
inline IndexedTensor sym2_mixed_as(const IndexedTensor& s) {
  return symmetrize(alternate(s, {0, 2}), {1, 3});
}

/// Decomposition of a two-form (antisymmetric under pair swap) into its two
/// canonical components: E-symmetric (which is then F-alternating) and
/// E-alternating (F-symmetric).
inline IndexedTensor two_form_sym_e_part(const IndexedTensor& s) {
  require_cotangent_square(s, "two_form_sym_e_part");
  return symmetrize(s, {0, 2});
}
inline IndexedTensor two_form_alt_e_part(const IndexedTensor& s) {
  require_cotangent_square(s, "two_form_alt_e_part");
  return alternate(s, {0, 2});
}

enum class TraceShape {
  CotangentTensorF,      // slots (EUp, FDown, FUp)
  CotangentTensorEStar,  // slots (EUp, FDown, EDown)
};

struct TraceFreeParts {
  IndexedTensor trace_free;
  IndexedTensor trace;
};

/// Trace decomposition of a one-form with values in F or in E*.
/// F-shape:  T_o = T - (1/n) delta^{F} tr,   tr^A = T^A_{I'}{}^{I'}
/// E*-shape: T_o = T - (1/2) delta^{E} tr,   tr_{A'} = T^I_{A'}{}_I
inline TraceFreeParts trace_free_decompose(const IndexedTensor& t, TraceShape shape) {
  const int n = t.n();
  const int nvars = t.nvars();
  if (shape == TraceShape::CotangentTensorF) {
    const std::vector<Slot> want{Slot::EUp, Slot::FDown, Slot::FUp};
    if (t.slots() != want)
      throw std::invalid_argument("trace_free_decompose: wrong slot signature for F shape");
    IndexedTensor tr = contract(t, 1, 2);  // slots (EUp)
    IndexedTensor tf = t;
    const Rational inv_n = Rational(1) / Rational(n);
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < n; ++ap)
        tf.at({a, ap, ap}) -= inv_n * tr.at({a});
    return {tf, tr};
  }
  const std::vector<Slot> want{Slot::EUp, Slot::FDown, Slot::EDown};
  if (t.slots() != want)
    throw std::invalid_argument("trace_free_decompose: wrong slot signature for E* shape");
  IndexedTensor tr = contract(t, 0, 2);  // slots (FDown)
  IndexedTensor tf = t;
  const Rational half(1, 2);
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap)
      tf.at({a, ap, a}) -= half * tr.at({ap});
  return {tf, tr};
}

inline IndexedTensor random_tensor(Rng& rng, int n, int nvars, std::vector<Slot> slots,
                                   int max_degree = 0, int nterms = 1) {
  IndexedTensor t(n, nvars, std::move(slots));
  for (auto& p : t.components())
    p = max_degree == 0 ? Poly::constant(nvars, rng.rational())
                        : random_poly(rng, nvars, max_degree, nterms);
  return t;
}

}  // namespace ag
