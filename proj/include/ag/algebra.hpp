#pragma once

#include <string>
#include <vector>

#include "ag/blocks.hpp"
#include "ag/matrix.hpp"
#include "ag/tensor.hpp"

namespace ag {

// ---------------------------------------------------------------------------
// The graded Lie algebra sl(n+2) over the rationals, in the block shape with
// E-rank 2 and F-rank n: grade -1 is the lower-left n x 2 block, grade 0 the
// traceless block diagonal, grade +1 the upper-right 2 x n block.
// ---------------------------------------------------------------------------

struct GradedAlgebra {
  int n = 0;
  std::vector<QMatrix> basis;
  std::vector<int> grade;  // -1, 0, +1 per basis element
  // bracket(i, j) expanded in the basis: structure[i][j][k]
  std::vector<std::vector<std::vector<Rational>>> structure;

  int dim() const { return static_cast<int>(basis.size()); }

  QMatrix bracket(const QMatrix& a, const QMatrix& b) const { return commutator(a, b); }
};

/// Index of the grade +1 basis element with E-row a and F-column ap
/// (E-index-major ordering). The grade -1 basis mirrors it.
inline int pair_rank(int n, int a, int ap) { return a * n + ap; }

inline QMatrix matrix_unit(int size, int row, int col) {
  QMatrix m(size, size);
  m(row, col) = 1;
  return m;
}

/// Coordinates of a traceless matrix in the build_graded_algebra basis.
inline std::vector<Rational> expand_in_basis(const GradedAlgebra& alg, const QMatrix& m);

/// The grade-0 basis in its canonical order: E off-diagonal units, F
/// off-diagonal units (row-major), then the diagonal elements
/// H_k = unit(k,k) - unit(n+1,n+1).
inline std::vector<QMatrix> g0_basis(int n) {
  const int size = n + 2;
  std::vector<QMatrix> basis;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      if (a != b) basis.push_back(matrix_unit(size, a, b));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) basis.push_back(matrix_unit(size, 2 + i, 2 + j));
  for (int k = 0; k < size - 1; ++k) {
    QMatrix h(size, size);
    h(k, k) = 1;
    h(size - 1, size - 1) = -1;
    basis.push_back(h);
  }
  return basis;
}

inline GradedAlgebra build_graded_algebra(int n) {
  if (n < 3) throw std::invalid_argument("build_graded_algebra: requires n >= 3");
  const int size = n + 2;
  GradedAlgebra alg;
  alg.n = n;
  // grade -1: E-index-major over the lower-left block
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap) {
      alg.basis.push_back(matrix_unit(size, 2 + ap, a));
      alg.grade.push_back(-1);
    }
  // grade 0: E off-diagonal, F off-diagonal (row-major), then diagonal
  for (QMatrix& m : g0_basis(n)) {
    alg.basis.push_back(std::move(m));
    alg.grade.push_back(0);
  }
  // grade +1: E-index-major over the upper-right block
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap) {
      alg.basis.push_back(matrix_unit(size, a, 2 + ap));
      alg.grade.push_back(1);
    }

  const int dim = alg.dim();
  alg.structure.assign(dim, std::vector<std::vector<Rational>>(dim));
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      alg.structure[i][j] = expand_in_basis(alg, commutator(alg.basis[i], alg.basis[j]));
  return alg;
}

inline std::vector<Rational> expand_in_basis(const GradedAlgebra& alg, const QMatrix& m) {
  const int n = alg.n;
  const int size = n + 2;
  if (m.rows() != size || m.cols() != size)
    throw std::invalid_argument("expand_in_basis: wrong matrix size");
  if (m.trace() != 0) throw std::invalid_argument("expand_in_basis: matrix has nonzero trace");
  std::vector<Rational> c(alg.dim(), Rational(0));
  int pos = 0;
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap) c[pos++] = m(2 + ap, a);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      if (a != b) c[pos++] = m(a, b);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) c[pos++] = m(2 + i, 2 + j);
  for (int k = 0; k < size - 1; ++k) c[pos++] = m(k, k);
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap) c[pos++] = m(a, 2 + ap);
  return c;
}

inline QMatrix from_coordinates(const GradedAlgebra& alg, const std::vector<Rational>& c) {
  QMatrix m(alg.n + 2, alg.n + 2);
  for (int i = 0; i < alg.dim(); ++i)
    if (c[i] != 0) m += c[i] * alg.basis[i];
  return m;
}

// ---------------------------------------------------------------------------
// Representations and actions
// ---------------------------------------------------------------------------

enum class RepTag { standard, dual, adjoint };

/// A vector in the standard representation (column of length n+2), its dual
/// (components of a covector, same length) or the adjoint representation
/// (stored as a traceless matrix).
template <class T>
struct RepVector {
  RepTag tag;
  Mat<T> value;  // (n+2) x 1 for standard/dual, (n+2) x (n+2) for adjoint
};

using QRepVector = RepVector<Rational>;
using PolyRepVector = RepVector<Poly>;

/// The action of an algebra element: matrix-vector product on the standard
/// representation, negative transpose on the dual, commutator on the adjoint.
template <class T>
RepVector<T> act(const Mat<T>& element, const RepVector<T>& v) {
  const int size = element.rows();
  if (element.cols() != size) throw std::invalid_argument("act: element not square");
  switch (v.tag) {
    case RepTag::standard:
      if (v.value.rows() != size || v.value.cols() != 1)
        throw std::invalid_argument("act: dimension mismatch (standard)");
      return {v.tag, element * v.value};
    case RepTag::dual:
      if (v.value.rows() != size || v.value.cols() != 1)
        throw std::invalid_argument("act: dimension mismatch (dual)");
      return {v.tag, -(element.transpose() * v.value)};
    case RepTag::adjoint:
      if (v.value.rows() != size || v.value.cols() != size)
        throw std::invalid_argument("act: dimension mismatch (adjoint)");
      return {v.tag, commutator(element, v.value)};
  }
  throw std::logic_error("act: bad representation tag");
}

namespace detail {
template <class T>
T ring_constant(const Rational& r, int nvars);
template <>
inline Rational ring_constant<Rational>(const Rational& r, int) { return r; }
template <>
inline Poly ring_constant<Poly>(const Rational& r, int nvars) { return Poly::constant(nvars, r); }
}  // namespace detail

/// Basis element of grade +1 with E-row a, F-column ap, over the ring T.
template <class T>
Mat<T> grade1_basis_matrix(int n, int u, int nvars = 0) {
  const int a = u / n, ap = u % n;
  Mat<T> m(n + 2, n + 2, detail::ring_constant<T>(0, nvars));
  m(a, 2 + ap) = detail::ring_constant<T>(1, nvars);
  return m;
}

// ---------------------------------------------------------------------------
// The codifferential on Lambda^k p+ (x) V
// ---------------------------------------------------------------------------

/// Element of Lambda^k p+ (x) V for k in {0, 1, 2}, expanded in the grade +1
/// basis. k = 2 components are kept on lexicographic pairs u < v.
template <class T>
struct LambdaElement {
  int k = 1;
  int m = 0;  // dim p+ = 2n
  RepTag tag = RepTag::standard;
  std::vector<Mat<T>> comps;
};

inline int lex_pair_index(int m, int u, int v) {
  if (u > v) std::swap(u, v);
  // pairs (0,1),(0,2),...,(0,m-1),(1,2),...
  return u * m - u * (u + 1) / 2 + (v - u - 1);
}

inline int lex_pair_count(int m) { return m * (m - 1) / 2; }

template <class T>
LambdaElement<T> zero_lambda(int k, int n, RepTag tag, int value_rows, int value_cols, int nvars) {
  LambdaElement<T> e;
  e.k = k;
  e.m = 2 * n;
  e.tag = tag;
  const int count = k == 0 ? 1 : (k == 1 ? e.m : lex_pair_count(e.m));
  e.comps.assign(count, Mat<T>(value_rows, value_cols, detail::ring_constant<T>(0, nvars)));
  return e;
}

/// The algebraic boundary map
///   codiff(Z_0 ^ ... ^ Z_k (x) v) = sum_i (-1)^{i+1} Z_0 ^...^ omit(Z_i) ^...^ Z_k (x) (Z_i v)
/// linear over the scalars; defined here for k = 1 and k = 2.
template <class T>
LambdaElement<T> codifferential(int n, const LambdaElement<T>& e, int nvars = 0) {
  if (e.k != 1 && e.k != 2) throw std::invalid_argument("codifferential: k must be 1 or 2");
  const int m = 2 * n;
  if (e.m != m) throw std::invalid_argument("codifferential: wrong p+ dimension");
  const int vr = e.comps.at(0).rows(), vc = e.comps.at(0).cols();
  LambdaElement<T> out = zero_lambda<T>(e.k - 1, n, e.tag, vr, vc, nvars);
  std::vector<Mat<T>> z(m);
  for (int u = 0; u < m; ++u) z[u] = grade1_basis_matrix<T>(n, u, nvars);
  if (e.k == 1) {
    for (int u = 0; u < m; ++u)
      out.comps[0] -= act(z[u], RepVector<T>{e.tag, e.comps[u]}).value;
    return out;
  }
  for (int u = 0; u < m; ++u)
    for (int v = u + 1; v < m; ++v) {
      const Mat<T>& val = e.comps[lex_pair_index(m, u, v)];
      out.comps[v] -= act(z[u], RepVector<T>{e.tag, val}).value;  // i = 0 term, sign -1
      out.comps[u] += act(z[v], RepVector<T>{e.tag, val}).value;  // i = 1 term, sign +1
    }
  return out;
}

// ---------------------------------------------------------------------------
// Block form of the codifferential of an adjoint-valued two-form
// ---------------------------------------------------------------------------

struct BlockCodifferentialReport {
  // One-form slots (EUp, FDown) followed by the value slots of each block.
  IndexedTensor g0_e;      // value (EUp, EDown)
  IndexedTensor g1;        // value (EUp, FDown)
  IndexedTensor g_minus1;  // value (FUp, EDown)
  IndexedTensor g0_f;      // value (FUp, FDown)
  // Exact difference path (a) - path (b), per block.
  IndexedTensor diff_g0_e, diff_g1, diff_g_minus1, diff_g0_f;
  bool paths_agree = false;
  bool normal = false;
  std::string offending_block;  // first nonzero block when not normal
};

/// Adjoint-valued matrix of the curvature blocks at the form pair (u, v).
inline PolyMatrix assemble_adjoint_value(const CurvatureBlocks& k, int n, int nvars, int u, int v) {
  const int a = u / n, ap = u % n, b = v / n, bp = v % n;
  PolyMatrix m = poly_matrix(n + 2, n + 2, nvars);
  for (int c = 0; c < 2; ++c)
    for (int d = 0; d < 2; ++d) m(c, d) = k.weyl_e.at({a, ap, b, bp, c, d});
  for (int c = 0; c < 2; ++c)
    for (int dp = 0; dp < n; ++dp) m(c, 2 + dp) = k.cotton_york.at({a, ap, b, bp, c, dp});
  for (int cp = 0; cp < n; ++cp)
    for (int d = 0; d < 2; ++d) m(2 + cp, d) = k.torsion.at({a, ap, b, bp, cp, d});
  for (int cp = 0; cp < n; ++cp)
    for (int dp = 0; dp < n; ++dp) m(2 + cp, 2 + dp) = k.weyl_f.at({a, ap, b, bp, cp, dp});
  return m;
}

/// Evaluates (1/2) codiff of the curvature two-form along two routes and
/// compares them exactly:
///  (a) through the generic codifferential on the assembled adjoint-valued
///      element of Lambda^2 p+ (x) g (full-sum normalization, then halved);
///  (b) through the closed block formulas
///        g0_e:  tau-trace over (second F form slot, F value slot)
///        g1:    weyl_f-trace - weyl_e-trace
///        g-1:   0
///        g0_f:  -tau-trace over (second E form slot, E value slot).
/// The normality predicate is that all four blocks vanish.
inline BlockCodifferentialReport check_block_codifferential(const CurvatureBlocks& kappa, int n) {
  require_block_slots(kappa, "check_block_codifferential");
  const int nvars = kappa.torsion.nvars();
  const int m = 2 * n;

  // Path (a).
  LambdaElement<Poly> elem = zero_lambda<Poly>(2, n, RepTag::adjoint, n + 2, n + 2, nvars);
  const Rational two(2);
  for (int u = 0; u < m; ++u)
    for (int v = u + 1; v < m; ++v) {
      PolyMatrix val = assemble_adjoint_value(kappa, n, nvars, u, v);
      for (int r = 0; r < n + 2; ++r)
        for (int c = 0; c < n + 2; ++c) val(r, c) = two * val(r, c);
      elem.comps[lex_pair_index(m, u, v)] = val;
    }
  const LambdaElement<Poly> half_d = codifferential(n, elem, nvars);

  BlockCodifferentialReport rep;
  const Rational half(1, 2);
  IndexedTensor a_g0e(n, nvars, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::EDown});
  IndexedTensor a_g1(n, nvars, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
  IndexedTensor a_gm1(n, nvars, {Slot::EUp, Slot::FDown, Slot::FUp, Slot::EDown});
  IndexedTensor a_g0f(n, nvars, {Slot::EUp, Slot::FDown, Slot::FUp, Slot::FDown});
  for (int w = 0; w < m; ++w) {
    const int a = w / n, ap = w % n;
    const PolyMatrix& val = half_d.comps[w];
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 2; ++d) a_g0e.at({a, ap, c, d}) = half * val(c, d);
    for (int c = 0; c < 2; ++c)
      for (int dp = 0; dp < n; ++dp) a_g1.at({a, ap, c, dp}) = half * val(c, 2 + dp);
    for (int cp = 0; cp < n; ++cp)
      for (int d = 0; d < 2; ++d) a_gm1.at({a, ap, cp, d}) = half * val(2 + cp, d);
    for (int cp = 0; cp < n; ++cp)
      for (int dp = 0; dp < n; ++dp) a_g0f.at({a, ap, cp, dp}) = half * val(2 + cp, 2 + dp);
  }

  // Path (b).
  const IndexedTensor b_g0e = contract(kappa.torsion, 3, 4);
  const IndexedTensor b_g1 =
      contract(kappa.weyl_f, 3, 4) - transpose(contract(kappa.weyl_e, 2, 5), {0, 1, 3, 2});
  const IndexedTensor b_gm1(n, nvars, {Slot::EUp, Slot::FDown, Slot::FUp, Slot::EDown});
  const IndexedTensor b_g0f = -transpose(contract(kappa.torsion, 2, 5), {0, 1, 3, 2});

  rep.g0_e = b_g0e;
  rep.g1 = b_g1;
  rep.g_minus1 = b_gm1;
  rep.g0_f = b_g0f;
  rep.diff_g0_e = a_g0e - b_g0e;
  rep.diff_g1 = a_g1 - b_g1;
  rep.diff_g_minus1 = a_gm1 - b_gm1;
  rep.diff_g0_f = a_g0f - b_g0f;
  rep.paths_agree = rep.diff_g0_e.is_zero() && rep.diff_g1.is_zero() &&
                    rep.diff_g_minus1.is_zero() && rep.diff_g0_f.is_zero();
  rep.normal = b_g0e.is_zero() && b_g1.is_zero() && b_gm1.is_zero() && b_g0f.is_zero();
  if (!rep.normal) {
    if (!b_g0e.is_zero()) rep.offending_block = "g0_e";
    else if (!b_g1.is_zero()) rep.offending_block = "g1";
    else if (!b_gm1.is_zero()) rep.offending_block = "g_minus1";
    else rep.offending_block = "g0_f";
  }
  return rep;
}

}  // namespace ag
