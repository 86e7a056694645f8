#pragma once

#include <string>
#include <vector>

#include "ag/chart.hpp"
#include "ag/matrix.hpp"
#include "ag/tensor.hpp"
#include "ag/weyl.hpp"

namespace ag {

enum class Bundle { tractor, cotractor };

inline const char* bundle_name(Bundle b) { return b == Bundle::tractor ? "tractor" : "cotractor"; }

// ---------------------------------------------------------------------------
// Splitting operator and first BGG operator
// ---------------------------------------------------------------------------

/// Lift of an F-section into the tractor bundle: the E-part is fixed by
/// requiring the trace part of the tractor derivative to vanish,
/// xi^A = -(1/n) (grad eta)^A_{I'}{}^{I'}.
inline SplitTractor split(const ChartWeylData& data, const IndexedTensor& eta) {
  if (eta.slots() != std::vector<Slot>{Slot::FUp})
    throw std::invalid_argument("split: expected an F-section");
  const IndexedTensor grad = covariant_derivative(data, eta);
  const IndexedTensor tr = contract(grad, 1, 2);  // (EUp)
  return {eta, Rational(-1, data.n) * tr};
}

/// Cotractor lift: the F*-part is +(1/2) of the trace of the derivative.
inline SplitCotractor split_costar(const ChartWeylData& data, const IndexedTensor& phi) {
  if (phi.slots() != std::vector<Slot>{Slot::EDown})
    throw std::invalid_argument("split_costar: expected an E*-section");
  const IndexedTensor grad = covariant_derivative(data, phi);
  const IndexedTensor tr = contract(grad, 0, 2);  // (FDown)
  return {phi, Rational(1, 2) * tr};
}

/// First BGG operator: the trace-free part of the covariant derivative.
inline IndexedTensor bgg_operator(const ChartWeylData& data, const IndexedTensor& section) {
  if (section.slots() == std::vector<Slot>{Slot::FUp})
    return trace_free_decompose(covariant_derivative(data, section), TraceShape::CotangentTensorF)
        .trace_free;
  if (section.slots() == std::vector<Slot>{Slot::EDown})
    return trace_free_decompose(covariant_derivative(data, section),
                                TraceShape::CotangentTensorEStar)
        .trace_free;
  throw std::invalid_argument("bgg_operator: expected an F- or E*-section");
}

// ---------------------------------------------------------------------------
// Prolongation corrections
// ---------------------------------------------------------------------------

struct ProlongationCorrection {
  IndexedTensor tractor;    // (EUp,FDown,EUp,FDown)
  IndexedTensor cotractor;  // (EUp,FDown,EUp,FDown)
};

/// The two correction one-forms built from the symmetric/alternating parts
/// of the torsion contraction:
///   tractor:  -1/((n-1)n) sym - 1/((n+1)(n+4)) alt
///   cotractor: -1/n sym - 1/(3(n+4)) alt
inline ProlongationCorrection prolongation_correction_from(const CurvatureBlocks& blocks, int n) {
  const WeylContractions c = contractions(blocks);
  const Sym2Parts parts = sym2_decompose(c.torsion_square);
  ProlongationCorrection out;
  out.tractor = Rational(-1, (n - 1) * n) * parts.sym_sym +
                Rational(-1, (n + 1) * (n + 4)) * parts.alt_alt;
  out.cotractor = Rational(-1, n) * parts.sym_sym + Rational(-1, 3 * (n + 4)) * parts.alt_alt;
  return out;
}

inline ProlongationCorrection prolongation_correction(const ChartWeylData& data) {
  const NormalityResult norm = check_normality(data);
  if (!norm.normal)
    throw std::invalid_argument("prolongation_correction: data is not normal");
  return prolongation_correction_from(norm.blocks, data.n);
}

// ---------------------------------------------------------------------------
// Prolongation connections
// ---------------------------------------------------------------------------

/// Tractor prolongation derivative: the tractor derivative minus the
/// correction contracted with the F-part, subtracted from the E-part.
inline SplitTractor prolongation_derivative(const ChartWeylData& data,
                                            const ProlongationCorrection& corr,
                                            const SplitTractor& s) {
  SplitTractor grad = tractor_derivative(data, s);
  const int n = data.n;
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap)
      for (int b = 0; b < 2; ++b) {
        Poly acc = grad.e_part.at({a, ap, b});
        for (int ip = 0; ip < n; ++ip) {
          const Poly& phi = corr.tractor.at({a, ap, b, ip});
          if (!phi.is_zero() && !s.f_part.at({ip}).is_zero()) acc -= phi * s.f_part.at({ip});
        }
        grad.e_part.at({a, ap, b}) = acc;
      }
  return grad;
}

/// Cotractor prolongation derivative: subtracts the cotractor correction
/// contracted with the E*-part from the F*-part.
inline SplitCotractor prolongation_derivative_costar(const ChartWeylData& data,
                                                     const ProlongationCorrection& corr,
                                                     const SplitCotractor& s) {
  SplitCotractor grad = cotractor_derivative(data, s);
  const int n = data.n;
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap)
      for (int bp = 0; bp < n; ++bp) {
        Poly acc = grad.fstar_part.at({a, ap, bp});
        for (int i = 0; i < 2; ++i) {
          const Poly& psi = corr.cotractor.at({a, ap, i, bp});
          if (!psi.is_zero() && !s.estar_part.at({i}).is_zero())
            acc -= psi * s.estar_part.at({i});
        }
        grad.fstar_part.at({a, ap, bp}) = acc;
      }
  return grad;
}

/// Whether the prolongation connection is flat: curvature of the tractor
/// connection with the one-form correction folded into the grade +1 block.
inline bool prolongation_connection_flat(const ChartWeylData& data,
                                         const ProlongationCorrection& corr) {
  return with_cap_context("prolongation_connection_flat", [&] {
    const int n = data.n, nv = data.nvars();
    std::vector<PolyMatrix> a;
    a.reserve(nv);
    for (int mu = 0; mu < nv; ++mu) {
      PolyMatrix m = tractor_connection_matrix(data, mu);
      // Add the grade +1 valued one-form (-corr.tractor) in direction mu.
      for (int b = 0; b < 2; ++b)
        for (int bp = 0; bp < n; ++bp) {
          Poly shift(nv);
          for (int c = 0; c < 2; ++c)
            for (int cp = 0; cp < n; ++cp) {
              const Poly& conv = data.soldering_inv(pair_index(n, c, cp), mu);
              if (!conv.is_zero() && !corr.tractor.at({c, cp, b, bp}).is_zero())
                shift += conv * corr.tractor.at({c, cp, b, bp});
            }
          m(b, 2 + bp) -= shift;
        }
      a.push_back(std::move(m));
    }
    for (int mu = 0; mu < nv; ++mu)
      for (int nu = mu + 1; nu < nv; ++nu) {
        const PolyMatrix r = matrix_derivative(a[nu], mu) - matrix_derivative(a[mu], nu) +
                             commutator(a[mu], a[nu]);
        if (!r.is_zero()) return false;
      }
    return true;
  });
}

// ---------------------------------------------------------------------------
// Normal solutions
// ---------------------------------------------------------------------------

struct NormalSolutionResult {
  bool solution = false;
  bool normal = false;
  // Cross-check data: the full tractor derivative of the lift.
  bool lift_parallel = false;
};

/// Contraction of the torsion-square tensor with an F-section (tractor side)
/// or an E*-section: the obstruction to a solution being normal.
inline IndexedTensor torsion_square_obstruction(const IndexedTensor& torsion_square,
                                                const IndexedTensor& section) {
  if (section.slots() == std::vector<Slot>{Slot::FUp})
    return contract(tensor_product(torsion_square, section), 3, 4);  // (EUp,FDown,EUp)
  if (section.slots() == std::vector<Slot>{Slot::EDown})
    return contract(tensor_product(torsion_square, section), 2, 4);  // (EUp,FDown,FDown)
  throw std::invalid_argument("torsion_square_obstruction: expected an F- or E*-section");
}

/// Classification of a section: solution of the first BGG operator, and
/// normal solution (lift parallel for the tractor connection). The
/// biconditional solution && obstruction == 0 <=> parallel lift is computed
/// from both sides; a mismatch is an internal error.
inline NormalSolutionResult is_normal_solution(const ChartWeylData& data,
                                               const IndexedTensor& section) {
  const NormalityResult norm = check_normality(data);
  if (!norm.normal) throw std::invalid_argument("is_normal_solution: data is not normal");
  const WeylContractions c = contractions(norm.blocks);
  NormalSolutionResult res;
  res.solution = bgg_operator(data, section).is_zero();
  const bool obstruction_zero = torsion_square_obstruction(c.torsion_square, section).is_zero();
  if (section.slots() == std::vector<Slot>{Slot::FUp}) {
    const SplitTractor grad = tractor_derivative(data, split(data, section));
    res.lift_parallel = grad.f_part.is_zero() && grad.e_part.is_zero();
  } else {
    const SplitCotractor grad = cotractor_derivative(data, split_costar(data, section));
    res.lift_parallel = grad.estar_part.is_zero() && grad.fstar_part.is_zero();
  }
  res.normal = res.solution && obstruction_zero;
  if (res.normal != res.lift_parallel)
    throw internal_consistency_error(
        "is_normal_solution: algebraic characterization disagrees with the parallel lift");
  return res;
}

// ---------------------------------------------------------------------------
// Polynomial solver
// ---------------------------------------------------------------------------

struct BggSolutionBasis {
  Bundle bundle = Bundle::tractor;
  int degree_bound = 0;
  std::vector<IndexedTensor> basis;
  int dimension = 0;
};

namespace detail {

inline std::vector<Monomial> monomials_up_to(int nvars, int degree) {
  std::vector<Monomial> out;
  Monomial m(nvars, 0);
  // Enumerate all exponent vectors of total degree <= degree, then sort.
  std::function<void(int, int)> rec = [&](int var, int left) {
    if (var == nvars) {
      out.push_back(m);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      m[var] = e;
      rec(var + 1, left - e);
    }
    m[var] = 0;
  };
  rec(0, degree);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

}  // namespace detail

/// Exact kernel of the first BGG operator on polynomial sections of total
/// degree <= degree_bound. Unknowns are ordered component-major with
/// degree-lexicographic monomials inside each component; the returned basis
/// is the canonical reduced-echelon kernel basis of that system.
inline BggSolutionBasis solve_bgg_polynomial(const ChartWeylData& data, Bundle bundle,
                                             int degree_bound) {
  return with_cap_context("solve_bgg_polynomial", [&] {
    require_valid(data, "solve_bgg_polynomial");
    const int n = data.n, nv = data.nvars();
    const int ncomp = bundle == Bundle::tractor ? n : 2;
    const Slot slot = bundle == Bundle::tractor ? Slot::FUp : Slot::EDown;
    const std::vector<Monomial> monos = detail::monomials_up_to(nv, degree_bound);
    const int m_count = static_cast<int>(monos.size());
    const int unknowns = ncomp * m_count;

    // Image of each unit section under D, flattened over (component, monomial).
    std::vector<std::vector<Poly>> images(unknowns);
    std::map<Monomial, int, GrlexLess> row_monomials;
    int out_comps = -1;
    for (int comp = 0; comp < ncomp; ++comp)
      for (int mi = 0; mi < m_count; ++mi) {
        IndexedTensor unit(n, nv, {slot});
        unit.at({comp}).add_term(monos[mi], 1);
        const IndexedTensor image = bgg_operator(data, unit);
        if (out_comps < 0) out_comps = static_cast<int>(image.components().size());
        auto& flat = images[comp * m_count + mi];
        flat = image.components();
        for (const Poly& p : flat)
          for (const auto& [mono, coef] : p.terms()) row_monomials.try_emplace(mono, 0);
      }
    int next_row = 0;
    for (auto& [mono, row] : row_monomials) row = next_row++;
    const int rows = out_comps * next_row;

    QMatrix system(std::max(rows, 1), unknowns);
    for (int u = 0; u < unknowns; ++u)
      for (int oc = 0; oc < out_comps; ++oc)
        for (const auto& [mono, coef] : images[u][oc].terms())
          system(oc * next_row + row_monomials[mono], u) = coef;

    const auto kernel = kernel_basis(system);
    BggSolutionBasis out;
    out.bundle = bundle;
    out.degree_bound = degree_bound;
    for (const auto& vec : kernel) {
      IndexedTensor section(n, nv, {slot});
      for (int comp = 0; comp < ncomp; ++comp)
        for (int mi = 0; mi < m_count; ++mi) {
          const Rational& c = vec[comp * m_count + mi];
          if (c != 0) section.at({comp}).add_term(monos[mi], c);
        }
      // Invariant: every returned basis element solves D exactly.
      if (!bgg_operator(data, section).is_zero())
        throw internal_consistency_error("solve_bgg_polynomial: kernel replay failed");
      out.basis.push_back(std::move(section));
    }
    out.dimension = static_cast<int>(out.basis.size());
    return out;
  });
}

}  // namespace ag
