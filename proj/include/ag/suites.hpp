#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ag/algebra.hpp"
#include "ag/bgg.hpp"
#include "ag/charts.hpp"
#include "ag/loci.hpp"
#include "ag/report.hpp"
#include "ag/weyl.hpp"

namespace ag {

// Seeded verification suites behind the `verify` command: built-in examples
// plus seeded random instances, one VerificationReport per module.

namespace suite_detail {

inline IndexedTensor random_one_form(Rng& rng, int n, int degree) {
  IndexedTensor u(n, 2 * n, {Slot::EUp, Slot::FDown});
  for (auto& p : u.components())
    p = degree == 0 ? Poly::constant(2 * n, rng.rational(3, 2)) : random_poly(rng, 2 * n, degree, 2);
  return u;
}

inline ChartWeylData random_gamma_data(Rng& rng, int n, int degree) {
  ChartWeylData d = flat_chart(n);
  const int nv = 2 * n;
  for (int mu = 0; mu < nv; ++mu) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) d.gamma_e[mu](i, j) = random_poly(rng, nv, degree, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d.gamma_f[mu](i, j) = random_poly(rng, nv, degree, 2);
    const Poly excess = d.gamma_e[mu].trace() + d.gamma_f[mu].trace();
    d.gamma_f[mu](n - 1, n - 1) -= excess;
  }
  return d;
}

inline CurvatureBlocks random_blocks(Rng& rng, int n) {
  const int nv = 2 * n;
  CurvatureBlocks k = zero_blocks(n, nv);
  auto fill = [&](IndexedTensor& t) {
    for (auto& p : t.components()) p = Poly::constant(nv, rng.rational(4, 2));
    std::vector<int> perm{2, 3, 0, 1};
    for (int s = 4; s < t.rank(); ++s) perm.push_back(s);
    t = Rational(1, 2) * (t - transpose(t, perm));
  };
  fill(k.torsion);
  fill(k.weyl_e);
  fill(k.weyl_f);
  fill(k.cotton_york);
  const IndexedTensor tr = contract(k.weyl_e, 4, 5) + contract(k.weyl_f, 4, 5);
  const Rational inv_n(1, n);
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap)
      for (int b = 0; b < 2; ++b)
        for (int bp = 0; bp < n; ++bp)
          for (int cp = 0; cp < n; ++cp)
            k.weyl_f.at({a, ap, b, bp, cp, cp}) -= inv_n * tr.at({a, ap, b, bp});
  return k;
}

/// eta^{bp} = x^{bp}_1 and phi_B = x^{1'}_B, the canonical vanishing
/// solutions of the flat model.
inline IndexedTensor coordinate_f_section(int n) {
  IndexedTensor eta(n, 2 * n, {Slot::FUp});
  for (int bp = 0; bp < n; ++bp) eta.at({bp}) = Poly::variable(2 * n, pair_index(n, 0, bp));
  return eta;
}

inline IndexedTensor coordinate_estar_section(int n) {
  IndexedTensor phi(n, 2 * n, {Slot::EDown});
  for (int b = 0; b < 2; ++b) phi.at({b}) = Poly::variable(2 * n, pair_index(n, b, 0));
  return phi;
}

inline IndexedTensor flat_family(int n, Rng& rng) {
  const int nv = 2 * n;
  IndexedTensor eta(n, nv, {Slot::FUp});
  for (int bp = 0; bp < n; ++bp) {
    Poly p = Poly::constant(nv, rng.rational());
    for (int c = 0; c < 2; ++c)
      p += Poly::variable(nv, pair_index(n, c, bp)) * Poly::constant(nv, rng.rational());
    eta.at({bp}) = p;
  }
  // Adjust to an exact solution: a + x.b has the coefficient of x^{bp}_c
  // independent of bp; rebuild accordingly.
  IndexedTensor out(n, nv, {Slot::FUp});
  std::vector<Rational> b(2);
  for (int c = 0; c < 2; ++c) b[c] = rng.rational();
  for (int bp = 0; bp < n; ++bp) {
    Poly p = Poly::constant(nv, rng.rational());
    for (int c = 0; c < 2; ++c)
      p += Poly::variable(nv, pair_index(n, c, bp)) * Poly::constant(nv, b[c]);
    out.at({bp}) = p;
  }
  return out;
}

/// Shared curved example, built lazily once per suite run.
struct SuiteContext {
  int n;
  std::uint64_t seed;
  std::optional<ChartWeylData> flagship;
  std::optional<CurvatureBlocks> flagship_blocks;

  const ChartWeylData& curved() {
    if (!flagship) flagship = flagship_chart(n);
    return *flagship;
  }
  const CurvatureBlocks& curved_blocks() {
    if (!flagship_blocks) flagship_blocks = curvature_blocks(curved());
    return *flagship_blocks;
  }
};

}  // namespace suite_detail

// ---------------------------------------------------------------------------
// algebra
// ---------------------------------------------------------------------------

inline VerificationReport algebra_suite(suite_detail::SuiteContext& ctx) {
  using namespace suite_detail;
  const int n = ctx.n;
  Rng rng(ctx.seed ^ 0xa19eb7a00ULL);
  VerificationReport rep;
  const GradedAlgebra alg = build_graded_algebra(n);

  int dims[3] = {0, 0, 0};
  for (int g : alg.grade) ++dims[g + 1];
  rep.add("algebra/dimensions", alg.dim() == (n + 2) * (n + 2) - 1 && dims[0] == 2 * n &&
                                    dims[2] == 2 * n && dims[1] == n * n + 3);
  bool traceless = true;
  for (const auto& b : alg.basis)
    if (b.trace() != 0) traceless = false;
  rep.add("algebra/traceless_basis", traceless);

  bool closure = true;
  for (int i = 0; i < alg.dim() && closure; ++i)
    for (int j = 0; j < alg.dim() && closure; ++j) {
      const int want = alg.grade[i] + alg.grade[j];
      const auto& coords = alg.structure[i][j];
      for (int k = 0; k < alg.dim(); ++k)
        if (coords[k] != 0 && alg.grade[k] != want) closure = false;
    }
  rep.add("algebra/grading_closure", closure);

  bool jacobi = true;
  if (n <= 4) {
    for (int i = 0; i < alg.dim() && jacobi; ++i)
      for (int j = i + 1; j < alg.dim() && jacobi; ++j)
        for (int k = j + 1; k < alg.dim() && jacobi; ++k) {
          const QMatrix jac =
              commutator(alg.basis[i], commutator(alg.basis[j], alg.basis[k])) +
              commutator(alg.basis[j], commutator(alg.basis[k], alg.basis[i])) +
              commutator(alg.basis[k], commutator(alg.basis[i], alg.basis[j]));
          if (!jac.is_zero()) jacobi = false;
        }
  } else {
    for (int t = 0; t < 300 && jacobi; ++t) {
      const int i = static_cast<int>(rng.range(0, alg.dim() - 1));
      const int j = static_cast<int>(rng.range(0, alg.dim() - 1));
      const int k = static_cast<int>(rng.range(0, alg.dim() - 1));
      const QMatrix jac = commutator(alg.basis[i], commutator(alg.basis[j], alg.basis[k])) +
                          commutator(alg.basis[j], commutator(alg.basis[k], alg.basis[i])) +
                          commutator(alg.basis[k], commutator(alg.basis[i], alg.basis[j]));
      if (!jac.is_zero()) jacobi = false;
    }
  }
  rep.add("algebra/jacobi", jacobi);

  bool bracket_compat = true;
  for (RepTag tag : {RepTag::standard, RepTag::dual, RepTag::adjoint}) {
    for (int t = 0; t < 5; ++t) {
      QMatrix x(n + 2, n + 2), y(n + 2, n + 2);
      for (int i = 0; i < alg.dim(); ++i) {
        x += rng.rational(3, 2) * alg.basis[i];
        y += rng.rational(3, 2) * alg.basis[i];
      }
      QRepVector v{tag, QMatrix(n + 2, tag == RepTag::adjoint ? n + 2 : 1)};
      for (int i = 0; i < v.value.rows(); ++i)
        for (int j = 0; j < v.value.cols(); ++j) v.value(i, j) = rng.rational(3, 2);
      if (tag == RepTag::adjoint) {
        const Rational tr = v.value.trace();
        v.value(n + 1, n + 1) -= tr;
      }
      const QRepVector lhs = act(commutator(x, y), v);
      if (!(lhs.value == act(x, act(y, v)).value - act(y, act(x, v)).value))
        bracket_compat = false;
    }
  }
  rep.add("algebra/act_bracket_compatibility", bracket_compat);

  bool codiff_squares = true;
  int count = 0;
  while (count < 100) {
    for (RepTag tag : {RepTag::standard, RepTag::dual, RepTag::adjoint}) {
      const int rows = n + 2, cols = tag == RepTag::adjoint ? n + 2 : 1;
      LambdaElement<Rational> e = zero_lambda<Rational>(2, n, tag, rows, cols, 0);
      for (auto& comp : e.comps) {
        for (int i = 0; i < rows; ++i)
          for (int j = 0; j < cols; ++j) comp(i, j) = rng.rational(4, 2);
        if (tag == RepTag::adjoint) {
          const Rational tr = comp.trace();
          comp(rows - 1, cols - 1) -= tr;
        }
      }
      if (!codifferential(n, codifferential(n, e)).comps[0].is_zero()) codiff_squares = false;
      ++count;
    }
  }
  rep.add("algebra/codifferential_squares_to_zero", codiff_squares);

  bool identity_ok = true, all_paths = true;
  for (int t = 0; t < 50; ++t) {
    const CurvatureBlocks k = random_blocks(rng, n);
    const auto bc = check_block_codifferential(k, n);
    if (!bc.paths_agree) all_paths = false;
    (void)identity_ok;
  }
  rep.add("algebra/block_codifferential_identity", all_paths);

  {
    // Pure-trace torsion in the (F form, F value) pairing: never normal.
    const int nv = 2 * n;
    CurvatureBlocks k = zero_blocks(n, nv);
    IndexedTensor seed_t(n, nv, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::EDown});
    for (auto& p : seed_t.components()) p = Poly::constant(nv, rng.nonzero_rational(4, 2));
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < n; ++ap)
        for (int b = 0; b < 2; ++b)
          for (int bp = 0; bp < n; ++bp)
            for (int d = 0; d < 2; ++d)
              k.torsion.at({a, ap, b, bp, bp, d}) += seed_t.at({a, ap, b, d});
    std::vector<int> perm{2, 3, 0, 1, 4, 5};
    k.torsion = Rational(1, 2) * (k.torsion - transpose(k.torsion, perm));
    const auto bc = check_block_codifferential(k, n);
    rep.add("algebra/block_codifferential_detects_trace",
            bc.paths_agree && !bc.normal && bc.offending_block == "g0_e");
  }

  rep.sort();
  return rep;
}

// ---------------------------------------------------------------------------
// weyl
// ---------------------------------------------------------------------------

inline VerificationReport weyl_suite(suite_detail::SuiteContext& ctx) {
  using namespace suite_detail;
  const int n = ctx.n, nv = 2 * n;
  Rng rng(ctx.seed ^ 0x3e71a11ULL);
  VerificationReport rep;

  rep.add("weyl/validate_flat", validate(flat_chart(n)).passed());
  rep.add("weyl/validate_sheared", validate(flagship_shears(n)).passed());
  {
    ChartWeylData bad = flat_chart(n);
    bad.gamma_e[0] = poly_identity(2, nv);
    rep.add("weyl/validate_detects_trace_violation", !validate(bad).passed());
  }

  const CurvatureBlocks flat_blocks = curvature_blocks(flat_chart(n));
  rep.add("weyl/flat_curvature_zero",
          flat_blocks.torsion.is_zero() && flat_blocks.weyl_e.is_zero() &&
              flat_blocks.weyl_f.is_zero() && flat_blocks.cotton_york.is_zero());

  {
    ChartWeylData d = random_gamma_data(rng, n, 1);
    for (auto& p : d.rho.components()) p = random_poly(rng, nv, 1, 2);
    const CurvatureBlocks blocks = curvature_blocks(d);  // includes the TM-block check
    rep.add("weyl/torsion_block_consistency", blocks.torsion == torsion(d).tau);
    rep.add("weyl/curvature_antisymmetry",
            blocks_form_antisymmetric(blocks) && blocks_trace_compatible(blocks));
    rep.add("weyl/bianchi_random", verify_bianchi(d).passed());
  }

  {
    const ChartWeylData w = weylize(random_gamma_data(rng, n, 1));
    const TorsionResult t = torsion(w);
    rep.add("weyl/weylize_postcondition", t.harmonic);
    const ChartWeylData w2 = weylize(w);
    rep.add("weyl/weylize_idempotent", torsion(w2).tau == t.tau);
  }

  {
    const SpencerRankReport sr = spencer_rank_report(n);
    rep.add("weyl/spencer_solvability",
            sr.solvable_for_all &&
                sr.harmonic_dim == 4 * (n * n * (n - 1) / 2 - n));
  }

  rep.add("weyl/bianchi_flat", verify_bianchi(flat_chart(n)).passed());

  {
    const ChartWeylData& curved = ctx.curved();
    const NormalityResult norm = check_normality(curved);
    rep.add("weyl/flagship_normal", norm.normal);
    rep.add("weyl/flagship_torsion_nonzero", !norm.blocks.torsion.is_zero());
    rep.add("weyl/trace_relations", verify_weyl_tensor_relations(curved).passed());
    rep.add("weyl/bianchi_flagship", verify_bianchi(curved).passed());
  }

  {
    const ChartWeylData d = random_gamma_data(rng, n, 1);
    const IndexedTensor zero_form(n, nv, {Slot::EUp, Slot::FDown});
    const ChartWeylData same = apply_upsilon(d, zero_form);
    bool identity = same.rho == d.rho;
    for (int mu = 0; mu < nv; ++mu)
      if (!(same.gamma_e[mu] == d.gamma_e[mu]) || !(same.gamma_f[mu] == d.gamma_f[mu]))
        identity = false;
    rep.add("weyl/upsilon_identity", identity);

    const IndexedTensor u = random_one_form(rng, n, 0);
    const ChartWeylData shifted = apply_upsilon(flat_chart(n), u);
    IndexedTensor expect(n, nv, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < n; ++ap)
        for (int b = 0; b < 2; ++b)
          for (int bp = 0; bp < n; ++bp)
            expect.at({a, ap, b, bp}) = -(u.at({b, ap}) * u.at({a, bp}));
    rep.add("weyl/upsilon_constant_rho_square", shifted.rho == expect);

    const IndexedTensor u1 = random_one_form(rng, n, 1);
    const ChartWeylData changed = apply_upsilon(d, u1);
    SplitTractor s{IndexedTensor(n, nv, {Slot::FUp}), IndexedTensor(n, nv, {Slot::EUp})};
    for (auto& p : s.f_part.components()) p = random_poly(rng, nv, 1, 2);
    for (auto& p : s.e_part.components()) p = random_poly(rng, nv, 1, 2);
    const SplitTractor grad_old = tractor_derivative(d, s);
    const SplitTractor grad_new = tractor_derivative(changed, transform_tractor(s, u1));
    const SplitTractor moved = transform_tractor_form(grad_old, u1);
    rep.add("weyl/upsilon_connection_invariance",
            moved.f_part == grad_new.f_part && moved.e_part == grad_new.e_part);
  }

  rep.sort();
  return rep;
}

// ---------------------------------------------------------------------------
// bgg
// ---------------------------------------------------------------------------

inline VerificationReport bgg_suite(suite_detail::SuiteContext& ctx) {
  using namespace suite_detail;
  const int n = ctx.n, nv = 2 * n;
  Rng rng(ctx.seed ^ 0xb99ULL);
  VerificationReport rep;
  const ChartWeylData flat = flat_chart(n);

  rep.add("bgg/flat_dimension_tractor_d2",
          solve_bgg_polynomial(flat, Bundle::tractor, 2).dimension == n + 2);
  rep.add("bgg/flat_dimension_cotractor_d2",
          solve_bgg_polynomial(flat, Bundle::cotractor, 2).dimension == n + 2);
  rep.add("bgg/flat_dimension_tractor_d0",
          solve_bgg_polynomial(flat, Bundle::tractor, 0).dimension == n);

  {
    bool defining = true;
    for (int t = 0; t < 2; ++t) {
      ChartWeylData d = random_gamma_data(rng, n, 1);
      for (auto& p : d.rho.components()) p = random_poly(rng, nv, 1, 2);
      IndexedTensor eta(n, nv, {Slot::FUp});
      for (auto& p : eta.components()) p = random_poly(rng, nv, 1, 2);
      const SplitTractor lift = split(d, eta);
      if (!(lift.f_part == eta)) defining = false;
      if (!contract(tractor_derivative(d, lift).f_part, 1, 2).is_zero()) defining = false;
      IndexedTensor phi(n, nv, {Slot::EDown});
      for (auto& p : phi.components()) p = random_poly(rng, nv, 1, 2);
      const SplitCotractor clift = split_costar(d, phi);
      if (!contract(cotractor_derivative(d, clift).estar_part, 0, 2).is_zero()) defining = false;
    }
    rep.add("bgg/split_defining_properties", defining);
  }

  {
    bool invariant = true;
    for (int t = 0; t < 6 && invariant; ++t) {
      const ChartWeylData& base = (t % 2 == 0) ? flat : ctx.curved();
      const IndexedTensor u = random_one_form(rng, n, 2);
      const ChartWeylData changed = apply_upsilon(base, u);
      IndexedTensor eta(n, nv, {Slot::FUp});
      for (auto& p : eta.components()) p = random_poly(rng, nv, 1, 2);
      const SplitTractor expected = transform_tractor(split(base, eta), u);
      const SplitTractor got = split(changed, eta);
      if (!(got.f_part == expected.f_part && got.e_part == expected.e_part)) invariant = false;
      if (!(bgg_operator(changed, eta) == bgg_operator(base, eta))) invariant = false;
      IndexedTensor phi(n, nv, {Slot::EDown});
      for (auto& p : phi.components()) p = random_poly(rng, nv, 1, 2);
      const SplitCotractor cexpected = transform_cotractor(split_costar(base, phi), u);
      const SplitCotractor cgot = split_costar(changed, phi);
      if (!(cgot.estar_part == cexpected.estar_part && cgot.fstar_part == cexpected.fstar_part))
        invariant = false;
      if (!(bgg_operator(changed, phi) == bgg_operator(base, phi))) invariant = false;
    }
    rep.add("bgg/upsilon_invariance", invariant);
  }

  {
    const ProlongationCorrection corr = prolongation_correction(flat);
    bool parallel = corr.tractor.is_zero() && corr.cotractor.is_zero();
    const BggSolutionBasis basis = solve_bgg_polynomial(flat, Bundle::tractor, 2);
    for (const IndexedTensor& eta : basis.basis) {
      const SplitTractor hat = prolongation_derivative(flat, corr, split(flat, eta));
      if (!hat.f_part.is_zero() || !hat.e_part.is_zero()) parallel = false;
    }
    rep.add("bgg/prolongation_flat_parallel", parallel);
    rep.add("bgg/prolongation_flat_connection_flat", prolongation_connection_flat(flat, corr));
  }

  {
    const ChartWeylData& curved = ctx.curved();
    const ProlongationCorrection corr =
        prolongation_correction_from(ctx.curved_blocks(), n);
    bool bullet_ok = true;
    SplitTractor s{IndexedTensor(n, nv, {Slot::FUp}), IndexedTensor(n, nv, {Slot::EUp})};
    for (auto& p : s.f_part.components()) p = random_poly(rng, nv, 1, 2);
    for (auto& p : s.e_part.components()) p = random_poly(rng, nv, 1, 2);
    const SplitTractor hat = prolongation_derivative(curved, corr, s);
    const SplitTractor plain = tractor_derivative(curved, s);
    if (!(hat.f_part == plain.f_part)) bullet_ok = false;
    for (int a = 0; a < 2 && bullet_ok; ++a)
      for (int ap = 0; ap < n && bullet_ok; ++ap) {
        PolyMatrix z = poly_matrix(n + 2, n + 2, nv);
        for (int b = 0; b < 2; ++b)
          for (int bp = 0; bp < n; ++bp) z(b, 2 + bp) = -corr.tractor.at({a, ap, b, bp});
        PolyMatrix col(n + 2, 1, Poly(nv));
        for (int i = 0; i < 2; ++i) col(i, 0) = s.e_part.at({i});
        for (int ip = 0; ip < n; ++ip) col(2 + ip, 0) = s.f_part.at({ip});
        const PolyMatrix bullet = act(z, PolyRepVector{RepTag::standard, col}).value;
        for (int b = 0; b < 2; ++b)
          if (!(hat.e_part.at({a, ap, b}) - plain.e_part.at({a, ap, b}) == bullet(b, 0)))
            bullet_ok = false;
      }
    rep.add("bgg/prolongation_bullet_identity", bullet_ok);
  }

  {
    bool bicond = true;
    // Flat family members are normal solutions.
    for (int t = 0; t < 3; ++t) {
      const IndexedTensor eta = flat_family(n, rng);
      const NormalSolutionResult res = is_normal_solution(flat, eta);
      if (!res.solution || !res.normal || !res.lift_parallel) bicond = false;
    }
    // Curved: every polynomial solution found, both bundles. The
    // algebraic-versus-parallel biconditional is enforced inside
    // is_normal_solution (it throws on mismatch).
    for (Bundle b : {Bundle::tractor, Bundle::cotractor}) {
      const BggSolutionBasis basis = solve_bgg_polynomial(ctx.curved(), b, 2);
      for (const IndexedTensor& s : basis.basis) {
        const NormalSolutionResult res = is_normal_solution(ctx.curved(), s);
        if (!res.solution) bicond = false;
      }
    }
    rep.add("bgg/normal_solution_biconditional", bicond);
  }

  {
    const BggSolutionBasis basis = solve_bgg_polynomial(flat, Bundle::tractor, 2);
    const Point x(nv, Rational(1, 2));
    QMatrix jet(n + 2 * n * n, basis.dimension);
    for (int col = 0; col < basis.dimension; ++col) {
      const IndexedTensor& eta = basis.basis[col];
      const std::vector<Rational> val = eval_components(eta, x);
      for (int k = 0; k < n; ++k) jet(k, col) = val[k];
      const IndexedTensor grad = covariant_derivative(flat, eta);
      int row = n;
      for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < n; ++ap)
          for (int bp = 0; bp < n; ++bp) jet(row++, col) = grad.at({a, ap, bp}).eval(x);
    }
    rep.add("bgg/one_jet_determinacy", rank(jet) == basis.dimension);
  }

  rep.sort();
  return rep;
}

// ---------------------------------------------------------------------------
// loci
// ---------------------------------------------------------------------------

inline VerificationReport loci_suite(suite_detail::SuiteContext& ctx) {
  using namespace suite_detail;
  const int n = ctx.n, nv = 2 * n;
  Rng rng(ctx.seed ^ 0x10c1ULL);
  VerificationReport rep;
  const ChartWeylData flat = flat_chart(n);
  const IndexedTensor eta = coordinate_f_section(n);
  const IndexedTensor phi = coordinate_estar_section(n);

  const auto eta_set = affine_zero_set(eta);
  const auto phi_set = affine_zero_set(phi);
  rep.add("loci/affine_zero_sets",
          eta_set.has_value() && phi_set.has_value() &&
              static_cast<int>(eta_set->directions.size()) == n &&
              static_cast<int>(phi_set->directions.size()) == 2 * (n - 1));

  const auto eta_pts = sample_points(*eta_set, 20);
  const auto phi_pts = sample_points(*phi_set, 20);

  rep.add("loci/jet_check_tractor", jet_check(flat, eta, eta_pts).passed());
  rep.add("loci/jet_check_cotractor", jet_check(flat, phi, phi_pts).passed());

  {
    const ZeroLocusReport zl = zero_locus_analysis(flat, eta, eta_pts);
    bool ok = zl.summary.passed();
    for (const auto& zp : zl.points)
      if (zp.codimension != n || !zp.match) ok = false;
    rep.add("loci/zero_locus_tractor", ok);
  }
  {
    const ZeroLocusReport zl = zero_locus_analysis(flat, phi, phi_pts);
    bool ok = zl.summary.passed();
    for (const auto& zp : zl.points)
      if (zp.codimension != 2 || !zp.match) ok = false;
    rep.add("loci/zero_locus_cotractor", ok);
  }

  {
    IndexedTensor const_eta(n, nv, {Slot::FUp});
    const_eta.at({n - 1}) = Poly::constant(nv, 2);
    const VerificationReport nw =
        nowhere_vanishing_weyl_check(flat, const_eta, {Point(nv, Rational(0))});
    bool ok = nw.passed();
    // Affine family, pointwise on samples off the zero set.
    IndexedTensor family = flat_family(n, rng);
    std::vector<Point> samples;
    for (int k = 1; static_cast<int>(samples.size()) < 8 && k < 200; ++k) {
      Point x(nv, Rational(0));
      for (int v = 0; v < nv; ++v) x[v] = sample_parameter((k * (v + 3)) % 17);
      if (!all_zero(eval_components(family, x))) samples.push_back(std::move(x));
    }
    const VerificationReport nw2 = nowhere_vanishing_weyl_check(flat, family, samples);
    for (const auto& item : nw2.items)
      if (item.id.rfind("pointwise/", 0) == 0 && item.status != CheckStatus::pass) ok = false;
    rep.add("loci/nowhere_vanishing", ok);
  }

  {
    const IndexedTensor u = random_one_form(rng, n, 0);
    const ChartWeylData changed = apply_upsilon(flat, u);
    bool ok = true;
    const auto pts = sample_points(*eta_set, 10);
    for (const Point& x : pts) {
      const QMatrix grad = gradient_matrix(flat, eta, x);
      const auto kern = kernel_basis(grad);
      std::vector<std::pair<Point, Point>> pairs;
      for (std::size_t i = 0; i < kern.size() && pairs.size() < 5; ++i)
        for (std::size_t j = i; j < kern.size() && pairs.size() < 5; ++j) {
          Point v2 = kern[j];
          if (i == j)
            for (auto& c : v2) c *= 2;
          pairs.emplace_back(kern[i], v2);
        }
      if (!induced_projective_structure(flat, changed, u, eta, x, pairs).passed()) ok = false;
    }
    rep.add("loci/projective_difference", ok);
  }

  {
    bool ok = true;
    const auto pts = sample_points(*phi_set, 10);
    for (const Point& x : pts)
      if (!induced_ag_structure(flat, phi, x).passed()) ok = false;
    rep.add("loci/induced_volume", ok);
  }

  {
    // Curved bonus: zero loci of curved solutions, when the solver finds
    // sections with full-dimensional affine zero sets.
    const BggSolutionBasis basis = solve_bgg_polynomial(ctx.curved(), Bundle::cotractor, 2);
    int analyzed = 0;
    bool ok = true;
    for (const IndexedTensor& s : basis.basis) {
      const auto set = affine_zero_set(s);
      if (!set || static_cast<int>(set->directions.size()) != 2 * (n - 1)) continue;
      const auto pts = sample_points(*set, 5);
      if (!zero_locus_analysis(ctx.curved(), s, pts).summary.passed()) ok = false;
      for (const Point& x : pts)
        if (!induced_ag_structure(ctx.curved(), s, x).passed()) ok = false;
      ++analyzed;
    }
    if (analyzed > 0) rep.add("loci/curved_cotractor_locus", ok);
    else rep.add_status("loci/curved_cotractor_locus", CheckStatus::skipped,
                        "no curved solutions with full-dimensional affine zero sets");
  }

  rep.sort();
  return rep;
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

enum class Suite { all, algebra, weyl, bgg, loci };

inline const char* suite_name(Suite s) {
  switch (s) {
    case Suite::all: return "all";
    case Suite::algebra: return "algebra";
    case Suite::weyl: return "weyl";
    case Suite::bgg: return "bgg";
    case Suite::loci: return "loci";
  }
  return "?";
}

inline std::optional<Suite> suite_from_name(const std::string& name) {
  for (Suite s : {Suite::all, Suite::algebra, Suite::weyl, Suite::bgg, Suite::loci})
    if (name == suite_name(s)) return s;
  return std::nullopt;
}

inline VerificationReport run_suite(Suite suite, int n, std::uint64_t seed) {
  if (n < 3 || n > 6) throw std::invalid_argument("run_suite: n must be in [3, 6]");
  suite_detail::SuiteContext ctx{n, seed, std::nullopt, std::nullopt};
  VerificationReport rep;
  if (suite == Suite::all || suite == Suite::algebra) rep.merge(algebra_suite(ctx));
  if (suite == Suite::all || suite == Suite::weyl) rep.merge(weyl_suite(ctx));
  if (suite == Suite::all || suite == Suite::bgg) rep.merge(bgg_suite(ctx));
  if (suite == Suite::all || suite == Suite::loci) rep.merge(loci_suite(ctx));
  rep.sort();
  return rep;
}

}  // namespace ag
