#include <catch2/catch_amalgamated.hpp>

#include "ag/chart.hpp"
#include "ag/weyl.hpp"
#include "test_util.hpp"

using namespace ag;
using agtest::random_gamma_data;

namespace {
constexpr int N = 3;
constexpr int NV = 6;

IndexedTensor linear_f_section(int b_index) {
  // eta^{bp} = x^{bp}_{b_index}
  IndexedTensor eta(N, NV, {Slot::FUp});
  for (int bp = 0; bp < N; ++bp)
    eta.at({bp}) = Poly::variable(NV, pair_index(N, b_index, bp));
  return eta;
}
}  // namespace

TEST_CASE("validate: flat data passes") {
  REQUIRE(validate(flat_chart(N)).passed());
}

TEST_CASE("validate: trace-incompatible connection pair fails") {
  ChartWeylData d = flat_chart(N);
  for (int mu = 0; mu < NV; ++mu) d.gamma_e[mu] = poly_identity(2, NV);
  const VerificationReport rep = validate(d);
  REQUIRE_FALSE(rep.passed());
  bool found = false;
  for (const auto& item : rep.items)
    if (item.id == "connection_trace_compatibility") {
      REQUIRE(item.status == CheckStatus::fail);
      found = true;
    }
  REQUIRE(found);
}

TEST_CASE("validate: unipotent sheared soldering with exact inverse passes") {
  const ChartWeylData d = sheared_chart(
      N, {{3, 0, Poly::variable(NV, 1)}, {5, 2, Poly::variable(NV, 0) * Poly::variable(NV, 4)}});
  REQUIRE(validate(d).passed());
  REQUIRE_FALSE((d.soldering - poly_identity(NV, NV)).is_zero());
}

TEST_CASE("covariant derivative on the flat chart") {
  const ChartWeylData flat = flat_chart(N);
  SECTION("coordinate section: grad of x^{B'}_1 is the double delta") {
    const IndexedTensor eta = linear_f_section(0);
    const IndexedTensor grad = covariant_derivative(flat, eta);
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < N; ++ap)
        for (int bp = 0; bp < N; ++bp) {
          const Rational expect = (a == 0 && bp == ap) ? 1 : 0;
          REQUIRE(grad.at({a, ap, bp}) == Poly::constant(NV, expect));
        }
  }
  SECTION("constant tensor: derivative vanishes") {
    IndexedTensor t(N, NV, {Slot::EUp, Slot::FDown});
    t.at({0, 1}) = Poly::constant(NV, rational(7, 3));
    t.at({1, 2}) = Poly::constant(NV, rational(-2));
    REQUIRE(covariant_derivative(flat, t).is_zero());
  }
}

TEST_CASE("covariant derivative satisfies the Leibniz rule on random data") {
  Rng rng(301);
  for (int trial = 0; trial < 3; ++trial) {
    ChartWeylData d = random_gamma_data(rng, N);
    if (trial == 2)
      d.soldering = sheared_chart(N, {{4, 1, Poly::variable(NV, 2)}}).soldering,
      d.soldering_inv = sheared_chart(N, {{4, 1, Poly::variable(NV, 2)}}).soldering_inv;
    const IndexedTensor t = random_tensor(rng, N, NV, {Slot::FUp, Slot::EDown}, 1, 2);
    const IndexedTensor u = random_tensor(rng, N, NV, {Slot::EUp, Slot::FDown}, 1, 2);
    const IndexedTensor lhs = covariant_derivative(d, tensor_product(t, u));
    const IndexedTensor rhs1 = tensor_product(covariant_derivative(d, t), u);
    // Move the derivative pair of the second term to the front.
    const IndexedTensor tu = tensor_product(t, covariant_derivative(d, u));
    const IndexedTensor rhs2 = transpose(tu, {2, 3, 0, 1, 4, 5});
    REQUIRE(lhs == rhs1 + rhs2);
  }
}

TEST_CASE("torsion of the flat chart vanishes and is harmonic") {
  const TorsionResult t = torsion(flat_chart(N));
  REQUIRE(t.tau.is_zero());
  REQUIRE(t.harmonic);
}

TEST_CASE("random connection pair generally fails harmonicity") {
  Rng rng(311);
  int non_harmonic = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const ChartWeylData d = random_gamma_data(rng, N);
    REQUIRE(validate(d).passed());
    if (!torsion(d).harmonic) ++non_harmonic;
  }
  REQUIRE(non_harmonic >= 4);  // zero-measure event; allow one fluke
}

TEST_CASE("weylize leaves flat data unchanged") {
  const ChartWeylData flat = flat_chart(N);
  const ChartWeylData w = weylize(flat);
  REQUIRE(w.soldering == flat.soldering);
  for (int mu = 0; mu < NV; ++mu) {
    REQUIRE(w.gamma_e[mu] == flat.gamma_e[mu]);
    REQUIRE(w.gamma_f[mu] == flat.gamma_f[mu]);
  }
}

TEST_CASE("weylize absorbs shear torsion into the connection") {
  const ChartWeylData d = sheared_chart(N, {{1, 3, Poly::variable(NV, 0)}});
  const TorsionResult before = torsion(d);
  const ChartWeylData w = weylize(d);
  const TorsionResult after = torsion(w);
  REQUIRE(after.harmonic);
  REQUIRE(w.soldering == d.soldering);
  REQUIRE(w.rho == d.rho);
  if (before.harmonic) {
    REQUIRE(after.tau == before.tau);
  }
}

TEST_CASE("weylize is idempotent on the torsion") {
  Rng rng(313);
  const ChartWeylData d = random_gamma_data(rng, N, 1);
  const ChartWeylData w1 = weylize(d);
  const ChartWeylData w2 = weylize(w1);
  REQUIRE(torsion(w1).tau == torsion(w2).tau);
  // Once harmonic, weylize changes nothing at all.
  for (int mu = 0; mu < NV; ++mu) {
    REQUIRE(w1.gamma_e[mu] == w2.gamma_e[mu]);
    REQUIRE(w1.gamma_f[mu] == w2.gamma_f[mu]);
  }
}

TEST_CASE("connection-change solvability: exact ranks over the rationals") {
  for (int n : {3, 4}) {
    const SpencerRankReport rep = spencer_rank_report(n);
    // Closed-form dimension of the harmonic torsion type:
    // 4 * (n * n(n-1)/2 - n).
    const int harmonic = 4 * (n * n * (n - 1) / 2 - n);
    REQUIRE(rep.harmonic_dim == harmonic);
    REQUIRE(rep.nonharmonic_dim == rep.torsion_space_dim - harmonic);
    REQUIRE(rep.solvable_for_all);
    REQUIRE(rep.composed_rank <= rep.spencer_domain_dim);
  }
}

TEST_CASE("adjoint sections: trace constraint and matrix round-trip") {
  Rng rng(317);
  AdjointSection s{random_tensor(rng, N, NV, {Slot::FUp, Slot::EDown}, 1, 2),
                   random_tensor(rng, N, NV, {Slot::EUp, Slot::EDown}, 1, 2),
                   random_tensor(rng, N, NV, {Slot::FUp, Slot::FDown}, 1, 2),
                   random_tensor(rng, N, NV, {Slot::EUp, Slot::FDown}, 1, 2)};
  // Fix the trace-sum.
  Poly excess = contract(s.endo_e, 0, 1).at({}) + contract(s.endo_f, 0, 1).at({});
  s.endo_f.at({N - 1, N - 1}) -= excess;
  REQUIRE(adjoint_trace_free(s));
  const PolyMatrix m = assemble_adjoint_matrix(s);
  const AdjointSection back = split_adjoint_matrix(N, NV, m);
  REQUIRE(back.vector_part == s.vector_part);
  REQUIRE(back.endo_e == s.endo_e);
  REQUIRE(back.endo_f == s.endo_f);
  REQUIRE(back.covector_part == s.covector_part);
}
