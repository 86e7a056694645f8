#include <catch2/catch_amalgamated.hpp>

#include "ag/algebra.hpp"

using namespace ag;

namespace {
QRepVector random_rep(Rng& rng, RepTag tag, int n) {
  const int size = n + 2;
  if (tag == RepTag::adjoint) {
    QMatrix m(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) m(i, j) = rng.rational(4, 2);
    Rational t = m.trace();
    m(size - 1, size - 1) -= t;  // keep it traceless
    return {tag, m};
  }
  QMatrix v(size, 1);
  for (int i = 0; i < size; ++i) v(i, 0) = rng.rational(4, 2);
  return {tag, v};
}

QMatrix random_grade_element(Rng& rng, const GradedAlgebra& alg, int grade) {
  QMatrix m(alg.n + 2, alg.n + 2);
  for (int i = 0; i < alg.dim(); ++i)
    if (alg.grade[i] == grade) m += rng.rational(4, 2) * alg.basis[i];
  return m;
}

int grade_of_sum(const GradedAlgebra& alg, const QMatrix& m, bool& pure) {
  // Determines which grades carry nonzero coordinates.
  const auto c = expand_in_basis(alg, m);
  bool seen[3] = {false, false, false};
  for (int i = 0; i < alg.dim(); ++i)
    if (c[i] != 0) seen[alg.grade[i] + 1] = true;
  int count = seen[0] + seen[1] + seen[2];
  pure = count <= 1;
  if (seen[0]) return -1;
  if (seen[1]) return 0;
  if (seen[2]) return 1;
  return 0;
}
}  // namespace

TEST_CASE("graded algebra dimensions and invariants") {
  REQUIRE_THROWS_AS(build_graded_algebra(2), std::invalid_argument);
  const GradedAlgebra alg = build_graded_algebra(3);
  REQUIRE(alg.dim() == 24);
  int d[3] = {0, 0, 0};
  for (int g : alg.grade) ++d[g + 1];
  REQUIRE(d[0] == 6);
  REQUIRE(d[1] == 12);
  REQUIRE(d[2] == 6);
  for (const auto& b : alg.basis) REQUIRE(b.trace() == 0);
}

TEST_CASE("bracket respects the grading") {
  const GradedAlgebra alg = build_graded_algebra(3);
  for (int i = 0; i < alg.dim(); ++i)
    for (int j = 0; j < alg.dim(); ++j) {
      const QMatrix br = commutator(alg.basis[i], alg.basis[j]);
      const int want = alg.grade[i] + alg.grade[j];
      if (want < -1 || want > 1) {
        REQUIRE(br.is_zero());
        continue;
      }
      if (br.is_zero()) continue;
      bool pure = false;
      const int got = grade_of_sum(alg, br, pure);
      REQUIRE(pure);
      REQUIRE(got == want);
    }
}

TEST_CASE("grade +1 elements commute") {
  Rng rng(61);
  const GradedAlgebra alg = build_graded_algebra(3);
  const QMatrix x = random_grade_element(rng, alg, 1);
  const QMatrix y = random_grade_element(rng, alg, 1);
  REQUIRE(commutator(x, y).is_zero());
}

TEST_CASE("bracket of opposite grades lands in grade 0 with zero trace") {
  Rng rng(67);
  const GradedAlgebra alg = build_graded_algebra(3);
  const QMatrix x = random_grade_element(rng, alg, -1);
  const QMatrix z = random_grade_element(rng, alg, 1);
  const QMatrix br = commutator(z, x);
  REQUIRE(br.trace() == 0);
  bool pure = false;
  REQUIRE(grade_of_sum(alg, br, pure) == 0);
  REQUIRE(pure);
}

TEST_CASE("structure constants reproduce the matrix bracket") {
  const GradedAlgebra alg = build_graded_algebra(3);
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const int i = static_cast<int>(rng.range(0, alg.dim() - 1));
    const int j = static_cast<int>(rng.range(0, alg.dim() - 1));
    REQUIRE(from_coordinates(alg, alg.structure[i][j]) ==
            commutator(alg.basis[i], alg.basis[j]));
  }
}

TEST_CASE("Jacobi identity holds exactly on all basis triples") {
  const GradedAlgebra alg = build_graded_algebra(3);
  const int dim = alg.dim();
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      for (int k = j + 1; k < dim; ++k) {
        const QMatrix& a = alg.basis[i];
        const QMatrix& b = alg.basis[j];
        const QMatrix& c = alg.basis[k];
        const QMatrix jac = commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) +
                            commutator(c, commutator(a, b));
        REQUIRE(jac.is_zero());
      }
}

TEST_CASE("action on the standard representation follows the block pattern") {
  const int n = 3;
  // Z in grade +1, v = (a, 0): the F block is zero, so Z v = 0.
  const QMatrix z = grade1_basis_matrix<Rational>(n, 2);  // a=0, ap=2
  QRepVector v{RepTag::standard, QMatrix(n + 2, 1)};
  v.value(0, 0) = 5;
  v.value(1, 0) = -2;
  REQUIRE(act(z, v).value.is_zero());
  // v = (0, w): Z v = (Z_{2xn} w, 0).
  QRepVector w{RepTag::standard, QMatrix(n + 2, 1)};
  w.value(2 + 2, 0) = 7;
  const QRepVector zw = act(z, w);
  REQUIRE(zw.value(0, 0) == 7);
  for (int i = 1; i < n + 2; ++i) REQUIRE(zw.value(i, 0) == 0);
}

TEST_CASE("dual action is the negative transpose") {
  const int n = 3;
  Rng rng(73);
  const GradedAlgebra alg = build_graded_algebra(n);
  const QMatrix x = random_grade_element(rng, alg, -1);
  QRepVector mu{RepTag::dual, QMatrix(n + 2, 1)};
  for (int i = 0; i < n; ++i) mu.value(2 + i, 0) = rng.rational();
  const QRepVector xmu = act(x, mu);
  // X in grade -1 maps E to F, so the dual action of X sends the F*-part
  // into the E*-part: the F*-components of the image vanish.
  for (int i = 0; i < n; ++i) REQUIRE(xmu.value(2 + i, 0) == 0);
  // Pairing check: (X mu)(v) = -mu(X v) on random vectors.
  QRepVector v = random_rep(rng, RepTag::standard, n);
  Rational lhs = 0, rhs = 0;
  const QMatrix xv = (x * v.value);
  for (int i = 0; i < n + 2; ++i) {
    lhs += xmu.value(i, 0) * v.value(i, 0);
    rhs -= mu.value(i, 0) * xv(i, 0);
  }
  REQUIRE(lhs == rhs);
}

TEST_CASE("act represents the bracket") {
  Rng rng(79);
  const GradedAlgebra alg = build_graded_algebra(3);
  for (RepTag tag : {RepTag::standard, RepTag::dual, RepTag::adjoint}) {
    for (int trial = 0; trial < 10; ++trial) {
      QMatrix x(alg.n + 2, alg.n + 2), y(alg.n + 2, alg.n + 2);
      for (int i = 0; i < alg.dim(); ++i) {
        x += rng.rational(3, 2) * alg.basis[i];
        y += rng.rational(3, 2) * alg.basis[i];
      }
      const QRepVector v = random_rep(rng, tag, alg.n);
      const QRepVector lhs = act(commutator(x, y), v);
      const QRepVector rhs1 = act(x, act(y, v));
      const QRepVector rhs2 = act(y, act(x, v));
      REQUIRE(lhs.value == rhs1.value - rhs2.value);
    }
  }
}

TEST_CASE("codifferential on simple elements") {
  const int n = 3, m = 2 * n;
  SECTION("k=1, standard rep, Z (x) (a, 0) maps to 0") {
    LambdaElement<Rational> e = zero_lambda<Rational>(1, n, RepTag::standard, n + 2, 1, 0);
    e.comps[1](0, 0) = 3;  // (a, 0) pattern attached to Z_1
    e.comps[1](1, 0) = -4;
    const auto out = codifferential(n, e);
    REQUIRE(out.comps[0].is_zero());
  }
  SECTION("k=1, standard rep, Z (x) (0, w) maps to -(Z w, 0)") {
    LambdaElement<Rational> e = zero_lambda<Rational>(1, n, RepTag::standard, n + 2, 1, 0);
    const int u = 1 * n + 2;  // Z with E-row 1, F-column 2
    e.comps[u](2 + 2, 0) = 5;
    const auto out = codifferential(n, e);
    QMatrix expect(n + 2, 1);
    expect(1, 0) = -5;
    REQUIRE(out.comps[0] == expect);
  }
  SECTION("k outside {1,2} is rejected") {
    LambdaElement<Rational> e = zero_lambda<Rational>(0, n, RepTag::standard, n + 2, 1, 0);
    REQUIRE_THROWS_AS(codifferential(n, e), std::invalid_argument);
  }
  (void)m;
}

TEST_CASE("codifferential squares to zero") {
  const int n = 3, m = 2 * n;
  Rng rng(83);
  for (RepTag tag : {RepTag::standard, RepTag::dual, RepTag::adjoint}) {
    const int rows = n + 2, cols = tag == RepTag::adjoint ? n + 2 : 1;
    for (int trial = 0; trial < 34; ++trial) {
      LambdaElement<Rational> e = zero_lambda<Rational>(2, n, tag, rows, cols, 0);
      for (auto& comp : e.comps)
        for (int i = 0; i < rows; ++i)
          for (int j = 0; j < cols; ++j) comp(i, j) = rng.rational(4, 2);
      if (tag == RepTag::adjoint)
        for (auto& comp : e.comps) {
          const Rational t = comp.trace();
          comp(rows - 1, cols - 1) -= t;
        }
      const auto once = codifferential(n, e);
      const auto twice = codifferential(n, once);
      REQUIRE(twice.comps[0].is_zero());
    }
  }
  (void)m;
}

namespace {
CurvatureBlocks random_blocks(Rng& rng, int n, bool trace_compatible = true) {
  const int nv = 2 * n;
  CurvatureBlocks k = zero_blocks(n, nv);
  auto fill = [&](IndexedTensor& t) {
    for (auto& p : t.components()) p = Poly::constant(nv, rng.rational(4, 2));
    // Antisymmetrize in the two form pairs.
    std::vector<int> perm{2, 3, 0, 1};
    for (int s = 4; s < t.rank(); ++s) perm.push_back(s);
    t = Rational(1, 2) * (t - transpose(t, perm));
  };
  fill(k.torsion);
  fill(k.weyl_e);
  fill(k.weyl_f);
  fill(k.cotton_york);
  if (trace_compatible) {
    // Push the endomorphism trace sum into weyl_f so the pair lands in
    // s(L(E,E) + L(F,F)).
    const IndexedTensor tr = contract(k.weyl_e, 4, 5) + contract(k.weyl_f, 4, 5);
    const Rational inv_n(1, n);
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < n; ++ap)
        for (int b = 0; b < 2; ++b)
          for (int bp = 0; bp < n; ++bp)
            for (int cp = 0; cp < n; ++cp)
              k.weyl_f.at({a, ap, b, bp, cp, cp}) -= inv_n * tr.at({a, ap, b, bp});
  }
  return k;
}
}  // namespace

TEST_CASE("block codifferential: zero curvature is normal") {
  const auto rep = check_block_codifferential(zero_blocks(3, 6), 3);
  REQUIRE(rep.paths_agree);
  REQUIRE(rep.normal);
}

TEST_CASE("block codifferential: both evaluation routes agree on random blocks") {
  Rng rng(89);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 2;
    const CurvatureBlocks k = random_blocks(rng, n);
    REQUIRE(blocks_form_antisymmetric(k));
    REQUIRE(blocks_trace_compatible(k));
    const auto rep = check_block_codifferential(k, n);
    REQUIRE(rep.paths_agree);
  }
}

TEST_CASE("pure-trace torsion in the F pairing is flagged as non-normal") {
  const int n = 3, nv = 6;
  CurvatureBlocks k = zero_blocks(n, nv);
  // torsion = delta-trace pattern in the (FDown form, FUp value) pairing,
  // antisymmetrized over the form pairs: its (3,4)-trace cannot vanish.
  Rng rng(97);
  IndexedTensor seed(n, nv, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::EDown});
  for (auto& p : seed.components()) p = Poly::constant(nv, rng.rational(4, 2));
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap)
      for (int b = 0; b < 2; ++b)
        for (int bp = 0; bp < n; ++bp)
          for (int d = 0; d < 2; ++d)
            k.torsion.at({a, ap, b, bp, bp, d}) += seed.at({a, ap, b, d});
  std::vector<int> perm{2, 3, 0, 1, 4, 5};
  k.torsion = Rational(1, 2) * (k.torsion - transpose(k.torsion, perm));
  REQUIRE_FALSE(k.torsion.is_zero());
  const auto rep = check_block_codifferential(k, n);
  REQUIRE(rep.paths_agree);
  REQUIRE_FALSE(rep.normal);
  REQUIRE(rep.offending_block == "g0_e");
}
