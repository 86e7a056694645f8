#pragma once

#include <string>
#include <vector>

#include "ag/algebra.hpp"
#include "ag/blocks.hpp"
#include "ag/chart.hpp"
#include "ag/matrix.hpp"
#include "ag/report.hpp"
#include "ag/tensor.hpp"

namespace ag {

class internal_consistency_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Torsion
// ---------------------------------------------------------------------------

struct TorsionResult {
  IndexedTensor tau;  // slots (EUp,FDown, EUp,FDown, FUp,EDown)
  bool form_type_ok = false;  // no E-alternating component
  bool e_trace_ok = false;    // trace of (second E form slot, E value slot)
  bool f_trace_ok = false;    // trace of (second F form slot, F value slot)
  bool harmonic = false;
};

inline TorsionResult classify_torsion(const IndexedTensor& tau) {
  TorsionResult r;
  r.tau = tau;
  r.form_type_ok = alternate(tau, {0, 2}).is_zero();
  r.e_trace_ok = contract(tau, 2, 5).is_zero();
  r.f_trace_ok = contract(tau, 3, 4).is_zero();
  r.harmonic = r.form_type_ok && r.e_trace_ok && r.f_trace_ok;
  return r;
}

/// Torsion of the connection pair on the frame fields:
/// T(e_p, e_q) = grad_{e_p} e_q - grad_{e_q} e_p - [e_p, e_q], in pair
/// components. Harmonicity = the three conditions carving out the
/// trace-free E-symmetric / F-alternating type.
inline TorsionResult torsion(const ChartWeylData& data) {
  return with_cap_context("torsion", [&] {
    const int n = data.n, nv = data.nvars(), m = 2 * n;
    std::vector<IndexedTensor> grads;
    grads.reserve(m);
    for (int q = 0; q < m; ++q) grads.push_back(covariant_derivative(data, frame_field(data, q)));
    IndexedTensor tau(n, nv, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown, Slot::FUp, Slot::EDown});
    for (int p = 0; p < m; ++p)
      for (int q = p + 1; q < m; ++q) {
        const int a = p / n, ap = p % n, b = q / n, bp = q % n;
        const IndexedTensor br = vector_field_bracket(data, frame_field(data, p), frame_field(data, q));
        for (int cp = 0; cp < n; ++cp)
          for (int d = 0; d < 2; ++d) {
            const Poly v =
                grads[q].at({a, ap, cp, d}) - grads[p].at({b, bp, cp, d}) - br.at({cp, d});
            tau.at({a, ap, b, bp, cp, d}) = v;
            tau.at({b, bp, a, ap, cp, d}) = -v;
          }
      }
    return classify_torsion(tau);
  });
}

// ---------------------------------------------------------------------------
// weylize: absorb the non-harmonic torsion into a connection change
// ---------------------------------------------------------------------------

namespace detail {

/// Change of the torsion tensor produced by a constant connection change
/// given in pair components: delta A (e_p, e_q) = A_p . e_q - A_q . e_p,
/// where the grade-0 action on a tangent vector v is Q v - v P.
inline IndexedTensor spencer_image(int n, int nvars, int p, const QMatrix& g0_elem) {
  IndexedTensor out(n, nvars,
                    {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown, Slot::FUp, Slot::EDown});
  const int a = p / n, ap = p % n;
  for (int q = 0; q < 2 * n; ++q) {
    if (q == p) continue;
    const int b = q / n, bp = q % n;
    // (A_p . e_q)^{cp}_d = Q(cp, bp) delta(d, b) - delta(cp, bp) P(b, d)
    for (int cp = 0; cp < n; ++cp)
      for (int d = 0; d < 2; ++d) {
        Rational v = g0_elem(2 + cp, 2 + bp) * Rational(d == b ? 1 : 0) -
                     Rational(cp == bp ? 1 : 0) * g0_elem(b, d);
        if (v == 0) continue;
        const Poly pv = Poly::constant(nvars, v);
        out.at({a, ap, b, bp, cp, d}) += pv;
        out.at({b, bp, a, ap, cp, d}) -= pv;
      }
  }
  // The q == p diagonal contributes nothing to an antisymmetric two-form.
  return out;
}

/// Flattened non-harmonicity conditions of a torsion-shaped tensor: the
/// E-alternating component and the two traces, stacked.
inline std::vector<Poly> torsion_conditions(const IndexedTensor& tau) {
  std::vector<Poly> rows;
  for (const IndexedTensor& t :
       {alternate(tau, {0, 2}), contract(tau, 2, 5), contract(tau, 3, 4)})
    rows.insert(rows.end(), t.components().begin(), t.components().end());
  return rows;
}

}  // namespace detail

/// Dimensions and exact ranks of the constant-coefficient solve behind
/// weylize, for a given n. The correction solve is feasible for every
/// torsion iff rank(conditions o spencer) == rank(conditions).
struct SpencerRankReport {
  int torsion_space_dim = 0;    // dim Lambda^2 T*M (x) TM fiber
  int harmonic_dim = 0;         // nullity of the condition map
  int nonharmonic_dim = 0;      // rank of the condition map
  int spencer_domain_dim = 0;   // dim T*M (x) g0
  int composed_rank = 0;        // rank of conditions o spencer
  bool solvable_for_all = false;
};

namespace detail {

/// Condition matrix columns for every unit connection change; shared by
/// weylize and the rank oracle.
inline QMatrix spencer_condition_matrix(int n) {
  const int nvars = 2 * n;
  const std::vector<QMatrix> g0 = g0_basis(n);
  const int dim0 = static_cast<int>(g0.size());
  const int cols = 2 * n * dim0;
  // Row count probed on the first column.
  QMatrix m;
  int rows = -1;
  for (int p = 0; p < 2 * n; ++p)
    for (int k = 0; k < dim0; ++k) {
      const IndexedTensor delta = spencer_image(n, nvars, p, g0[k]);
      const std::vector<Poly> cond = torsion_conditions(delta);
      if (rows < 0) {
        rows = static_cast<int>(cond.size());
        m = QMatrix(rows, cols);
      }
      const int col = p * dim0 + k;
      for (int r = 0; r < rows; ++r) m(r, col) = cond[r].constant_term();
    }
  return m;
}

}  // namespace detail

inline SpencerRankReport spencer_rank_report(int n) {
  SpencerRankReport rep;
  rep.torsion_space_dim = 2 * n * (2 * n - 1) / 2 * 2 * n;
  rep.spencer_domain_dim = 2 * n * (n * n + 3);
  const QMatrix composed = detail::spencer_condition_matrix(n);
  rep.composed_rank = rank(composed);

  // Rank of the bare condition map on antisymmetric torsion-shaped tensors:
  // columns indexed by a basis of two-forms with values in TM.
  const int nvars = 2 * n;
  std::vector<std::vector<Poly>> cols;
  for (int p = 0; p < 2 * n; ++p)
    for (int q = p + 1; q < 2 * n; ++q)
      for (int cp = 0; cp < n; ++cp)
        for (int d = 0; d < 2; ++d) {
          IndexedTensor unit(n, nvars, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown,
                                        Slot::FUp, Slot::EDown});
          unit.at({p / n, p % n, q / n, q % n, cp, d}) = Poly::constant(nvars, 1);
          unit.at({q / n, q % n, p / n, p % n, cp, d}) = Poly::constant(nvars, -1);
          cols.push_back(detail::torsion_conditions(unit));
        }
  QMatrix cond(static_cast<int>(cols.front().size()), static_cast<int>(cols.size()));
  for (int j = 0; j < cond.cols(); ++j)
    for (int i = 0; i < cond.rows(); ++i) cond(i, j) = cols[j][i].constant_term();
  const int cond_rank = rank(cond);
  rep.nonharmonic_dim = cond_rank;
  rep.harmonic_dim = rep.torsion_space_dim - cond_rank;
  rep.solvable_for_all = rep.composed_rank == cond_rank;
  return rep;
}

/// Returns data with the connection pair corrected so that the torsion has
/// exactly the harmonic type; soldering and Rho unchanged. The correction is
/// solved coefficient-wise per monomial (the condition and change maps have
/// constant coefficients in pair components) with the minimum-norm gauge.
inline ChartWeylData weylize(const ChartWeylData& data) {
  return with_cap_context("weylize", [&] {
    require_valid(data, "weylize");
    const TorsionResult tor = torsion(data);
    if (tor.harmonic) return data;
    const int n = data.n, nv = data.nvars();
    const std::vector<QMatrix> g0 = g0_basis(n);
    const int dim0 = static_cast<int>(g0.size());

    const QMatrix m = detail::spencer_condition_matrix(n);
    const std::vector<Poly> rhs_polys = detail::torsion_conditions(tor.tau);

    // Collect the monomial support of the right-hand side.
    std::map<Monomial, std::vector<Rational>, GrlexLess> rhs_by_monomial;
    for (std::size_t r = 0; r < rhs_polys.size(); ++r)
      for (const auto& [mono, coef] : rhs_polys[r].terms()) {
        auto [it, fresh] = rhs_by_monomial.try_emplace(mono);
        if (fresh) it->second.assign(rhs_polys.size(), Rational(0));
        it->second[r] = -coef;
      }
    std::vector<std::vector<Rational>> rhs_list;
    std::vector<Monomial> monomials;
    for (auto& [mono, vec] : rhs_by_monomial) {
      monomials.push_back(mono);
      rhs_list.push_back(std::move(vec));
    }

    const auto solutions = min_norm_solve_multi(m, rhs_list);
    if (!solutions)
      throw internal_consistency_error(
          "weylize: non-harmonic torsion component is not in the image of the connection change");

    // Assemble the pair-component correction and push it to coordinate form.
    std::vector<PolyMatrix> corr_pair;  // per pair index, (n+2)-square block form
    corr_pair.assign(2 * n, poly_matrix(n + 2, n + 2, nv));
    for (std::size_t t = 0; t < monomials.size(); ++t)
      for (int p = 0; p < 2 * n; ++p)
        for (int k = 0; k < dim0; ++k) {
          const Rational& c = (*solutions)[t][p * dim0 + k];
          if (c == 0) continue;
          for (int i = 0; i < n + 2; ++i)
            for (int j = 0; j < n + 2; ++j)
              if (g0[k](i, j) != 0) corr_pair[p](i, j).add_term(monomials[t], c * g0[k](i, j));
        }

    ChartWeylData out = data;
    for (int mu = 0; mu < nv; ++mu)
      for (int p = 0; p < 2 * n; ++p) {
        const Poly& conv = data.soldering_inv(p, mu);
        if (conv.is_zero()) continue;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            if (!corr_pair[p](i, j).is_zero()) out.gamma_e[mu](i, j) += conv * corr_pair[p](i, j);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            if (!corr_pair[p](2 + i, 2 + j).is_zero())
              out.gamma_f[mu](i, j) += conv * corr_pair[p](2 + i, 2 + j);
      }

    const TorsionResult check = torsion(out);
    if (!check.harmonic)
      throw internal_consistency_error("weylize: corrected torsion failed the harmonic test");
    return out;
  });
}

// ---------------------------------------------------------------------------
// Tractor connection
// ---------------------------------------------------------------------------

/// Full tractor connection matrix in coordinate direction mu, acting on model
/// columns (E-part; F-part): block diagonal Weyl pair, Rho in the upper
/// right, soldering form in the lower left.
inline PolyMatrix tractor_connection_matrix(const ChartWeylData& data, int mu) {
  const int n = data.n, nv = data.nvars();
  PolyMatrix a = poly_matrix(n + 2, n + 2, nv);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = data.gamma_e[mu](i, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(2 + i, 2 + j) = data.gamma_f[mu](i, j);
  for (int b = 0; b < 2; ++b)
    for (int bp = 0; bp < n; ++bp) {
      a(2 + bp, b) = data.soldering_inv(pair_index(n, b, bp), mu);
      Poly rho_mu(nv);
      for (int c = 0; c < 2; ++c)
        for (int cp = 0; cp < n; ++cp) {
          const Poly& conv = data.soldering_inv(pair_index(n, c, cp), mu);
          if (!conv.is_zero() && !data.rho.at({c, cp, b, bp}).is_zero())
            rho_mu += conv * data.rho.at({c, cp, b, bp});
        }
      a(b, 2 + bp) = rho_mu;
    }
  return a;
}

/// grad^T of a split tractor: the F-part picks up the E-part through the
/// tautological form, the E-part picks up the Rho-contracted F-part.
/// Result parts carry a prepended (EUp, FDown) one-form pair.
inline SplitTractor tractor_derivative(const ChartWeylData& data, const SplitTractor& s) {
  return with_cap_context("tractor_derivative", [&] {
    if (s.f_part.slots() != std::vector<Slot>{Slot::FUp} ||
        s.e_part.slots() != std::vector<Slot>{Slot::EUp})
      throw std::invalid_argument("tractor_derivative: slot mismatch");
    const int n = data.n;
    IndexedTensor out_f = covariant_derivative(data, s.f_part);
    IndexedTensor out_e = covariant_derivative(data, s.e_part);
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < n; ++ap) {
        out_f.at({a, ap, ap}) += s.e_part.at({a});
        for (int b = 0; b < 2; ++b) {
          Poly acc = out_e.at({a, ap, b});
          for (int ip = 0; ip < n; ++ip) {
            const Poly& rho = data.rho.at({a, ap, b, ip});
            if (!rho.is_zero() && !s.f_part.at({ip}).is_zero()) acc += rho * s.f_part.at({ip});
          }
          out_e.at({a, ap, b}) = acc;
        }
      }
    return SplitTractor{out_f, out_e};
  });
}

inline SplitCotractor cotractor_derivative(const ChartWeylData& data, const SplitCotractor& s) {
  return with_cap_context("cotractor_derivative", [&] {
    if (s.estar_part.slots() != std::vector<Slot>{Slot::EDown} ||
        s.fstar_part.slots() != std::vector<Slot>{Slot::FDown})
      throw std::invalid_argument("cotractor_derivative: slot mismatch");
    const int n = data.n;
    IndexedTensor out_estar = covariant_derivative(data, s.estar_part);
    IndexedTensor out_fstar = covariant_derivative(data, s.fstar_part);
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < n; ++ap) {
        out_estar.at({a, ap, a}) -= s.fstar_part.at({ap});
        for (int bp = 0; bp < n; ++bp) {
          Poly acc = out_fstar.at({a, ap, bp});
          for (int i = 0; i < 2; ++i) {
            const Poly& rho = data.rho.at({a, ap, i, bp});
            if (!rho.is_zero() && !s.estar_part.at({i}).is_zero())
              acc -= s.estar_part.at({i}) * rho;
          }
          out_fstar.at({a, ap, bp}) = acc;
        }
      }
    return SplitCotractor{out_estar, out_fstar};
  });
}

inline PolyMatrix assemble_adjoint_matrix(const AdjointSection& s) {
  const int n = s.vector_part.n(), nv = s.vector_part.nvars();
  PolyMatrix m = poly_matrix(n + 2, n + 2, nv);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = s.endo_e.at({i, j});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(2 + i, 2 + j) = s.endo_f.at({i, j});
  for (int ip = 0; ip < n; ++ip)
    for (int j = 0; j < 2; ++j) m(2 + ip, j) = s.vector_part.at({ip, j});
  for (int i = 0; i < 2; ++i)
    for (int jp = 0; jp < n; ++jp) m(i, 2 + jp) = s.covector_part.at({i, jp});
  return m;
}

inline AdjointSection split_adjoint_matrix(int n, int nv, const PolyMatrix& m) {
  AdjointSection s{IndexedTensor(n, nv, {Slot::FUp, Slot::EDown}),
                   IndexedTensor(n, nv, {Slot::EUp, Slot::EDown}),
                   IndexedTensor(n, nv, {Slot::FUp, Slot::FDown}),
                   IndexedTensor(n, nv, {Slot::EUp, Slot::FDown})};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s.endo_e.at({i, j}) = m(i, j);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.endo_f.at({i, j}) = m(2 + i, 2 + j);
  for (int ip = 0; ip < n; ++ip)
    for (int j = 0; j < 2; ++j) s.vector_part.at({ip, j}) = m(2 + ip, j);
  for (int i = 0; i < 2; ++i)
    for (int jp = 0; jp < n; ++jp) s.covector_part.at({i, jp}) = m(i, 2 + jp);
  return s;
}

/// Adjoint tractor derivative: Weyl derivative plus the bullet actions of
/// the tautological form and of Rho (adjoint action = commutator). Returns
/// one AdjointSection per coordinate direction.
inline std::vector<AdjointSection> adjoint_derivative_coordinates(const ChartWeylData& data,
                                                                  const AdjointSection& s) {
  return with_cap_context("adjoint_derivative", [&] {
    const int n = data.n, nv = data.nvars();
    const PolyMatrix m = assemble_adjoint_matrix(s);
    std::vector<AdjointSection> out;
    out.reserve(nv);
    for (int mu = 0; mu < nv; ++mu) {
      PolyMatrix bullet = tractor_connection_matrix(data, mu);
      const PolyMatrix d = matrix_derivative(m, mu) +
                           act(bullet, PolyRepVector{RepTag::adjoint, m}).value;
      out.push_back(split_adjoint_matrix(n, nv, d));
    }
    return out;
  });
}

/// Same derivative with the direction converted to frame pairs, indexed by
/// the pair index p = a*n + ap.
inline std::vector<AdjointSection> adjoint_derivative(const ChartWeylData& data,
                                                      const AdjointSection& s) {
  const int n = data.n, nv = data.nvars();
  const std::vector<AdjointSection> coord = adjoint_derivative_coordinates(data, s);
  std::vector<AdjointSection> out;
  out.reserve(2 * n);
  for (int p = 0; p < 2 * n; ++p) {
    PolyMatrix acc = poly_matrix(n + 2, n + 2, nv);
    for (int mu = 0; mu < nv; ++mu) {
      const Poly& w = data.soldering(mu, p);
      if (w.is_zero()) continue;
      const PolyMatrix m = assemble_adjoint_matrix(coord[mu]);
      for (int i = 0; i < n + 2; ++i)
        for (int j = 0; j < n + 2; ++j)
          if (!m(i, j).is_zero()) acc(i, j) += w * m(i, j);
    }
    out.push_back(split_adjoint_matrix(n, nv, acc));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Curvature
// ---------------------------------------------------------------------------

/// Curvature matrices R_{mu nu} = d_mu A_nu - d_nu A_mu + [A_mu, A_nu] for
/// mu < nu, packed lexicographically.
inline std::vector<PolyMatrix> curvature_coordinate_matrices(const ChartWeylData& data) {
  const int nv = data.nvars();
  std::vector<PolyMatrix> a;
  a.reserve(nv);
  for (int mu = 0; mu < nv; ++mu) a.push_back(tractor_connection_matrix(data, mu));
  std::vector<PolyMatrix> r;
  r.reserve(lex_pair_count(nv));
  for (int mu = 0; mu < nv; ++mu)
    for (int nu = mu + 1; nu < nv; ++nu)
      r.push_back(matrix_derivative(a[nu], mu) - matrix_derivative(a[mu], nu) +
                  commutator(a[mu], a[nu]));
  return r;
}

/// Curvature of the tractor connection, split into blocks on frame pairs.
/// The TM block must reproduce the directly computed torsion; a mismatch is
/// an internal consistency error.
inline CurvatureBlocks curvature_blocks(const ChartWeylData& data, bool check_torsion = true) {
  return with_cap_context("curvature_blocks", [&] {
    const int n = data.n, nv = data.nvars();
    const std::vector<PolyMatrix> r_coord = curvature_coordinate_matrices(data);
    CurvatureBlocks blocks = zero_blocks(n, nv);
    for (int p = 0; p < 2 * n; ++p)
      for (int q = p + 1; q < 2 * n; ++q) {
        PolyMatrix r_pq = poly_matrix(n + 2, n + 2, nv);
        int idx = 0;
        for (int mu = 0; mu < nv; ++mu)
          for (int nu = mu + 1; nu < nv; ++nu, ++idx) {
            const Poly w =
                data.soldering(mu, p) * data.soldering(nu, q) -
                data.soldering(nu, p) * data.soldering(mu, q);
            if (w.is_zero()) continue;
            for (int i = 0; i < n + 2; ++i)
              for (int j = 0; j < n + 2; ++j)
                if (!r_coord[idx](i, j).is_zero()) r_pq(i, j) += w * r_coord[idx](i, j);
          }
        const int a = p / n, ap = p % n, b = q / n, bp = q % n;
        auto put = [&](IndexedTensor& t, int i, int j, const Poly& v) {
          t.at({a, ap, b, bp, i, j}) = v;
          t.at({b, bp, a, ap, i, j}) = -v;
        };
        for (int c = 0; c < 2; ++c)
          for (int d = 0; d < 2; ++d) put(blocks.weyl_e, c, d, r_pq(c, d));
        for (int c = 0; c < 2; ++c)
          for (int dp = 0; dp < n; ++dp) put(blocks.cotton_york, c, dp, r_pq(c, 2 + dp));
        for (int cp = 0; cp < n; ++cp)
          for (int d = 0; d < 2; ++d) put(blocks.torsion, cp, d, r_pq(2 + cp, d));
        for (int cp = 0; cp < n; ++cp)
          for (int dp = 0; dp < n; ++dp) put(blocks.weyl_f, cp, dp, r_pq(2 + cp, 2 + dp));
      }
    if (check_torsion && blocks.torsion != torsion(data).tau)
      throw internal_consistency_error(
          "curvature_blocks: TM block disagrees with the direct torsion");
    return blocks;
  });
}

// ---------------------------------------------------------------------------
// Contractions and normalization
// ---------------------------------------------------------------------------

struct WeylContractions {
  IndexedTensor weyl_e_trace;   // (EUp,FDown,EUp,FDown)
  IndexedTensor weyl_f_trace;   // (EUp,FDown,EUp,FDown)
  IndexedTensor torsion_square; // (EUp,FDown,EUp,FDown)
};

inline WeylContractions contractions(const CurvatureBlocks& blocks) {
  require_block_slots(blocks, "contractions");
  WeylContractions c{transpose(contract(blocks.weyl_e, 2, 5), {0, 1, 3, 2}),
                     contract(blocks.weyl_f, 3, 4), IndexedTensor{}};
  // Double contraction of torsion with itself; direct loops rather than a
  // full tensor product, which would square the component count.
  const IndexedTensor& tau = blocks.torsion;
  const int n = tau.n(), nv = tau.nvars();
  IndexedTensor ts(n, nv, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap)
      for (int b = 0; b < 2; ++b)
        for (int bp = 0; bp < n; ++bp) {
          Poly sum(nv);
          for (int i = 0; i < 2; ++i)
            for (int ip = 0; ip < n; ++ip)
              for (int j = 0; j < 2; ++j)
                for (int jp = 0; jp < n; ++jp) {
                  const Poly& t1 = tau.at({i, ip, a, ap, jp, j});
                  if (t1.is_zero()) continue;
                  const Poly& t2 = tau.at({j, jp, b, bp, ip, i});
                  if (!t2.is_zero()) sum += t1 * t2;
                }
          ts.at({a, ap, b, bp}) = sum;
        }
  c.torsion_square = ts;
  return c;
}

/// The grade +1 normality block: weyl_f trace minus weyl_e trace.
inline IndexedTensor normality_tensor(const CurvatureBlocks& blocks) {
  const WeylContractions c = contractions(blocks);
  return c.weyl_f_trace - c.weyl_e_trace;
}

struct NormalityResult {
  VerificationReport report;
  bool normal = false;
  CurvatureBlocks blocks;
};

/// Evaluates the three normality conditions (two torsion traces and the
/// endomorphism-trace block) from the curvature blocks.
inline NormalityResult check_normality(const ChartWeylData& data) {
  NormalityResult res;
  res.blocks = curvature_blocks(data);
  const bool tau_e = contract(res.blocks.torsion, 2, 5).is_zero();
  const bool tau_f = contract(res.blocks.torsion, 3, 4).is_zero();
  const WeylContractions c = contractions(res.blocks);
  const bool g1 = (c.weyl_f_trace - c.weyl_e_trace).is_zero();
  res.report.add("torsion_e_trace", tau_e);
  res.report.add("torsion_f_trace", tau_f);
  res.report.add("endomorphism_trace_block", g1);
  res.normal = tau_e && tau_f && g1;
  if (res.normal)
    res.report.add("weyl_traces_equal", c.weyl_e_trace == c.weyl_f_trace);
  res.report.sort();
  return res;
}

/// Solves for the Rho tensor making the chart normal. The endomorphism-trace
/// block depends on Rho affinely with constant coefficients in pair
/// components; the linear part is extracted empirically by evaluating the
/// curvature at unit Rho values on the flat chart, then the system is solved
/// per monomial. The result is verified with check_normality.
inline ChartWeylData normalize_rho(const ChartWeylData& data) {
  return with_cap_context("normalize_rho", [&] {
    require_valid(data, "normalize_rho");
    const int n = data.n, nv = data.nvars();
    if (!torsion(data).harmonic)
      throw std::invalid_argument("normalize_rho: torsion is not harmonic (run weylize first)");

    ChartWeylData base = data;
    base.rho = IndexedTensor(n, nv, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
    const IndexedTensor g0_eq = normality_tensor(curvature_blocks(base, false));

    // Linear part on the flat chart: constant coefficients, one column per
    // unit Rho component.
    const int dim = (2 * n) * (2 * n);
    QMatrix lin(dim, dim);
    const ChartWeylData flat = flat_chart(n);
    {
      int col = 0;
      std::vector<int> idx(4);
      for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < n; ++ap)
          for (int b = 0; b < 2; ++b)
            for (int bp = 0; bp < n; ++bp, ++col) {
              ChartWeylData probe = flat;
              probe.rho.at({a, ap, b, bp}) = Poly::constant(nv, 1);
              const IndexedTensor g = normality_tensor(curvature_blocks(probe, false));
              int row = 0;
              for (const Poly& comp : g.components()) {
                if (!comp.is_constant())
                  throw internal_consistency_error(
                      "normalize_rho: probed dependence on Rho is not pointwise");
                lin(row++, col) = comp.constant_term();
              }
            }
    }
    const auto lin_inv = inverse(lin);
    if (!lin_inv)
      throw internal_consistency_error("normalize_rho: singular pointwise system");

    IndexedTensor rho(n, nv, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
    // Solve column-by-column over the monomial support of the affine part.
    std::map<Monomial, std::vector<Rational>, GrlexLess> rhs;
    {
      int row = 0;
      for (const Poly& comp : g0_eq.components()) {
        for (const auto& [mono, coef] : comp.terms()) {
          auto [it, fresh] = rhs.try_emplace(mono);
          if (fresh) it->second.assign(dim, Rational(0));
          it->second[row] = -coef;
        }
        ++row;
      }
    }
    for (const auto& [mono, vec] : rhs) {
      int out = 0;
      for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < n; ++ap)
          for (int b = 0; b < 2; ++b)
            for (int bp = 0; bp < n; ++bp, ++out) {
              Rational v = 0;
              for (int j = 0; j < dim; ++j) v += (*lin_inv)(out, j) * vec[j];
              if (v != 0) rho.at({a, ap, b, bp}).add_term(mono, v);
            }
    }

    ChartWeylData result = data;
    result.rho = rho;
    if (!check_normality(result).normal)
      throw internal_consistency_error("normalize_rho: result failed the normality check");
    return result;
  });
}

// ---------------------------------------------------------------------------
// Change of Weyl structure
// ---------------------------------------------------------------------------

inline void require_one_form(const IndexedTensor& u, const char* op) {
  if (u.slots() != std::vector<Slot>{Slot::EUp, Slot::FDown})
    throw std::invalid_argument(std::string(op) + ": expected a one-form (EUp, FDown)");
}

/// Contraction of a one-form with an F-section: (u . eta)^A = u^A_{I'} eta^{I'}.
inline IndexedTensor one_form_on_f(const IndexedTensor& u, const IndexedTensor& eta) {
  return contract(tensor_product(u, eta), 1, 2);
}

/// Contraction of a one-form with an E*-section: (u . phi)_{A'} = u^I_{A'} phi_I.
inline IndexedTensor one_form_on_estar(const IndexedTensor& u, const IndexedTensor& phi) {
  return contract(tensor_product(u, phi), 0, 2);
}

/// New Weyl structure determined by a one-form: shifts the connection pair,
/// transforms Rho by P + grad(u) - u-square.
inline ChartWeylData apply_upsilon(const ChartWeylData& data, const IndexedTensor& upsilon) {
  return with_cap_context("apply_upsilon", [&] {
    require_one_form(upsilon, "apply_upsilon");
    const int n = data.n, nv = data.nvars();
    ChartWeylData out = data;
    for (int mu = 0; mu < nv; ++mu) {
      for (int bp = 0; bp < n; ++bp)
        for (int ip = 0; ip < n; ++ip) {
          Poly acc(nv);
          for (int a = 0; a < 2; ++a) {
            const Poly& conv = data.soldering_inv(pair_index(n, a, bp), mu);
            if (!conv.is_zero() && !upsilon.at({a, ip}).is_zero())
              acc += conv * upsilon.at({a, ip});
          }
          out.gamma_f[mu](bp, ip) += acc;
        }
      for (int i = 0; i < 2; ++i)
        for (int b = 0; b < 2; ++b) {
          Poly acc(nv);
          for (int ap = 0; ap < n; ++ap) {
            const Poly& conv = data.soldering_inv(pair_index(n, b, ap), mu);
            if (!conv.is_zero() && !upsilon.at({i, ap}).is_zero())
              acc += conv * upsilon.at({i, ap});
          }
          out.gamma_e[mu](i, b) -= acc;
        }
    }
    const IndexedTensor grad_u = covariant_derivative(data, upsilon);
    IndexedTensor usq(n, nv, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < n; ++ap)
        for (int b = 0; b < 2; ++b)
          for (int bp = 0; bp < n; ++bp) {
            if (!upsilon.at({b, ap}).is_zero() && !upsilon.at({a, bp}).is_zero())
              usq.at({a, ap, b, bp}) = upsilon.at({b, ap}) * upsilon.at({a, bp});
          }
    out.rho = data.rho + grad_u - usq;
    return out;
  });
}

/// Re-splitting of a tractor section under the Weyl change by upsilon:
/// (eta, xi) in the old splitting reads (eta, xi - u(eta)) in the new one.
inline SplitTractor transform_tractor(const SplitTractor& s, const IndexedTensor& upsilon) {
  require_one_form(upsilon, "transform_tractor");
  return {s.f_part, s.e_part - one_form_on_f(upsilon, s.f_part)};
}

/// Cotractor re-splitting: (phi, mu) becomes (phi, mu + u(phi)).
inline SplitCotractor transform_cotractor(const SplitCotractor& s, const IndexedTensor& upsilon) {
  require_one_form(upsilon, "transform_cotractor");
  return {s.estar_part, s.fstar_part + one_form_on_estar(upsilon, s.estar_part)};
}

/// Re-splitting of a one-form-valued tractor (the shape returned by
/// tractor_derivative): same rule applied beneath the form slots.
inline SplitTractor transform_tractor_form(const SplitTractor& s, const IndexedTensor& upsilon) {
  require_one_form(upsilon, "transform_tractor_form");
  // f_part slots (EUp,FDown,FUp), e_part slots (EUp,FDown,EUp).
  IndexedTensor shifted = s.e_part;
  const int n = s.f_part.n();
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap)
      for (int b = 0; b < 2; ++b) {
        Poly acc = shifted.at({a, ap, b});
        for (int ip = 0; ip < n; ++ip) {
          if (!upsilon.at({b, ip}).is_zero() && !s.f_part.at({a, ap, ip}).is_zero())
            acc -= upsilon.at({b, ip}) * s.f_part.at({a, ap, ip});
        }
        shifted.at({a, ap, b}) = acc;
      }
  return {s.f_part, shifted};
}

inline SplitCotractor transform_cotractor_form(const SplitCotractor& s,
                                               const IndexedTensor& upsilon) {
  require_one_form(upsilon, "transform_cotractor_form");
  IndexedTensor shifted = s.fstar_part;
  const int n = s.fstar_part.n();
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap)
      for (int bp = 0; bp < n; ++bp) {
        Poly acc = shifted.at({a, ap, bp});
        for (int i = 0; i < 2; ++i) {
          if (!upsilon.at({i, bp}).is_zero() && !s.estar_part.at({a, ap, i}).is_zero())
            acc += upsilon.at({i, bp}) * s.estar_part.at({a, ap, i});
        }
        shifted.at({a, ap, bp}) = acc;
      }
  return {s.estar_part, shifted};
}

// ---------------------------------------------------------------------------
// Identity checks
// ---------------------------------------------------------------------------

/// Differential identity of the curvature as an adjoint-valued two-form,
/// evaluated on coordinate frame triples: the cyclic sum of the adjoint
/// derivatives of kappa (frame brackets of coordinate fields vanish, so the
/// bracket term of the cyclic sum contributes nothing). The connection and
/// the curvature may come from different data; mismatched inputs (e.g. a
/// corrupted Rho on one side) make the residual visible.
inline VerificationReport verify_bianchi_pair(const ChartWeylData& connection_data,
                                              const ChartWeylData& curvature_data) {
  return with_cap_context("verify_bianchi", [&] {
    const int nv = connection_data.nvars();
    std::vector<PolyMatrix> a;
    for (int mu = 0; mu < nv; ++mu)
      a.push_back(tractor_connection_matrix(connection_data, mu));
    std::vector<PolyMatrix> r = curvature_coordinate_matrices(curvature_data);
    VerificationReport rep;
    bool all_zero = true;
    std::string first_bad;
    for (int mu = 0; mu < nv && all_zero; ++mu)
      for (int nu = mu + 1; nu < nv && all_zero; ++nu)
        for (int la = nu + 1; la < nv && all_zero; ++la) {
          PolyMatrix sum = poly_matrix(connection_data.n + 2, connection_data.n + 2, nv);
          const int trip[3][3] = {{mu, nu, la}, {nu, la, mu}, {la, mu, nu}};
          for (const auto& t : trip) {
            // r is stored for ordered pairs only: kappa(x_u, x_v) = -kappa(x_v, x_u).
            PolyMatrix k = r[lex_pair_index(nv, t[1], t[2])];
            if (t[1] > t[2]) k = -k;
            sum += matrix_derivative(k, t[0]) +
                   act(a[t[0]], PolyRepVector{RepTag::adjoint, k}).value;
          }
          if (!sum.is_zero()) {
            all_zero = false;
            first_bad = "triple (" + std::to_string(mu) + "," + std::to_string(nu) + "," +
                        std::to_string(la) + ")";
          }
        }
    rep.add("bianchi_cyclic_sum", all_zero, first_bad);
    rep.sort();
    return rep;
  });
}

inline VerificationReport verify_bianchi(const ChartWeylData& data) {
  return verify_bianchi_pair(data, data);
}

/// The trace relations tying the torsion contraction to the endomorphism
/// traces on normal data: equal traces, the n and n+4 proportionalities, and
/// vanishing mixed projections.
inline VerificationReport verify_weyl_tensor_relations(const ChartWeylData& data) {
  return with_cap_context("verify_weyl_tensor_relations", [&] {
    VerificationReport rep;
    const NormalityResult norm = check_normality(data);
    if (!norm.normal) {
      rep.add_status("precondition_normal", CheckStatus::skipped,
                     "data is not normal; relations not asserted");
      rep.sort();
      return rep;
    }
    const int n = data.n;
    const WeylContractions c = contractions(norm.blocks);
    rep.add("trace_equality", c.weyl_e_trace == c.weyl_f_trace);
    if (!is_pair_symmetric(c.torsion_square) || !is_pair_symmetric(c.weyl_e_trace)) {
      rep.add("contractions_symmetric", false);
      rep.sort();
      return rep;
    }
    rep.add("contractions_symmetric", true);
    const Sym2Parts ts = sym2_decompose(c.torsion_square);
    const Sym2Parts tw = sym2_decompose(c.weyl_e_trace);
    rep.add("symmetric_ratio_n", ts.sym_sym == Rational(n) * tw.sym_sym);
    rep.add("alternating_ratio_n_plus_4", ts.alt_alt == Rational(n + 4) * tw.alt_alt);
    rep.add("mixed_projections_vanish",
            sym2_mixed_sa(c.torsion_square).is_zero() && sym2_mixed_as(c.torsion_square).is_zero() &&
                sym2_mixed_sa(c.weyl_e_trace).is_zero() && sym2_mixed_as(c.weyl_e_trace).is_zero());
    rep.sort();
    return rep;
  });
}

}  // namespace ag
