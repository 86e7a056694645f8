#include <catch2/catch_amalgamated.hpp>

#include "ag/tensor.hpp"

using namespace ag;

namespace {
constexpr int N = 3;
constexpr int NV = 6;

IndexedTensor random_t(Rng& rng, std::vector<Slot> slots) {
  return random_tensor(rng, N, NV, std::move(slots));
}

/// Harmonic-symmetry-type torsion tensor: E-part symmetric in the two up
/// slots, F-part alternating in the two down slots (trace parts not removed;
/// symmetry is all the contraction-symmetry test needs).
IndexedTensor random_harmonic_symmetry_tau(Rng& rng) {
  IndexedTensor t = random_t(rng, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown, Slot::FUp, Slot::EDown});
  t = symmetrize(t, {0, 2});
  t = alternate(t, {1, 3});
  return t;
}

/// Independent oracle for the torsion contraction: explicit loops, no reuse
/// of the contraction engine.
IndexedTensor torsion_square_oracle(const IndexedTensor& tau) {
  IndexedTensor out(N, NV, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < N; ++ap)
      for (int b = 0; b < 2; ++b)
        for (int bp = 0; bp < N; ++bp) {
          Poly sum(NV);
          for (int i = 0; i < 2; ++i)
            for (int ip = 0; ip < N; ++ip)
              for (int j = 0; j < 2; ++j)
                for (int jp = 0; jp < N; ++jp)
                  sum += tau.at({i, ip, a, ap, jp, j}) * tau.at({j, jp, b, bp, ip, i});
          out.at({a, ap, b, bp}) = sum;
        }
  return out;
}

IndexedTensor torsion_square_engine(const IndexedTensor& tau) {
  // tau (x) tau, contract I:(0,11), I':(1,10), J':(4,7), J:(5,6).
  IndexedTensor prod = tensor_product(tau, tau);
  prod = contract(prod, 0, 11);
  prod = contract(prod, 0, 9);  // was (1,10)
  prod = contract(prod, 2, 5);  // was (4,7)
  prod = contract(prod, 2, 3);  // was (5,6)
  return prod;
}
}  // namespace

TEST_CASE("Kronecker traces") {
  REQUIRE(contract(IndexedTensor::delta_e(N, NV), 0, 1).at({}) == Poly::constant(NV, 2));
  REQUIRE(contract(IndexedTensor::delta_f(N, NV), 0, 1).at({}) == Poly::constant(NV, N));
}

TEST_CASE("contraction rejects non-dual slots") {
  const IndexedTensor t(N, NV, {Slot::EUp, Slot::FUp});
  REQUIRE_THROWS_AS(contract(t, 0, 1), std::invalid_argument);
}

TEST_CASE("torsion contraction of a rank-one harmonic-type element vanishes") {
  // tau = (e1 e1 (x) e^2) (x) (f^1 ^ f^2 (x) f_3): the E-index pattern forces
  // a delta^I_1 delta_I^2 factor in the double contraction.
  IndexedTensor tau(N, NV,
                    {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown, Slot::FUp, Slot::EDown});
  for (int ap = 0; ap < N; ++ap)
    for (int bp = 0; bp < N; ++bp) {
      const int sign = (ap == 0 && bp == 1) ? 1 : (ap == 1 && bp == 0) ? -1 : 0;
      if (sign != 0) tau.at({0, ap, 0, bp, 2, 1}) = Poly::constant(NV, sign);
    }
  REQUIRE(torsion_square_oracle(tau).is_zero());
  REQUIRE(torsion_square_engine(tau).is_zero());
}

TEST_CASE("torsion contraction is symmetric for harmonic-symmetry torsion") {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const IndexedTensor tau = random_harmonic_symmetry_tau(rng);
    const IndexedTensor ts = torsion_square_engine(tau);
    REQUIRE(ts == torsion_square_oracle(tau));
    REQUIRE(transpose(ts, {2, 3, 0, 1}) == ts);
  }
}

TEST_CASE("symmetrize and alternate") {
  Rng rng(23);
  SECTION("symmetrize after alternate over the same slots is zero") {
    const IndexedTensor t = random_t(rng, {Slot::FUp, Slot::FUp, Slot::EDown});
    REQUIRE(symmetrize(alternate(t, {0, 1}), {0, 1}).is_zero());
  }
  SECTION("alternating three E slots of a 2-dimensional space gives zero") {
    const IndexedTensor t = random_t(rng, {Slot::EUp, Slot::EUp, Slot::EUp});
    REQUIRE(alternate(t, {0, 1, 2}).is_zero());
  }
  SECTION("symmetrize(u (x) v - v (x) u) = 0") {
    const IndexedTensor u = random_t(rng, {Slot::FUp});
    const IndexedTensor v = random_t(rng, {Slot::FUp});
    const IndexedTensor d = tensor_product(u, v) - tensor_product(v, u);
    REQUIRE(symmetrize(d, {0, 1}).is_zero());
  }
  SECTION("idempotence") {
    const IndexedTensor t = random_t(rng, {Slot::FDown, Slot::FDown, Slot::FDown});
    const IndexedTensor s = symmetrize(t, {0, 1, 2});
    REQUIRE(symmetrize(s, {0, 1, 2}) == s);
    const IndexedTensor a = alternate(t, {0, 1, 2});
    REQUIRE(alternate(a, {0, 1, 2}) == a);
  }
  SECTION("mixed slot kinds are rejected") {
    const IndexedTensor t = random_t(rng, {Slot::EUp, Slot::FUp});
    REQUIRE_THROWS_AS(symmetrize(t, {0, 1}), std::invalid_argument);
  }
}

TEST_CASE("sym2 decomposition of a symmetric (0,2)-tensor") {
  Rng rng(31);
  SECTION("product of symmetric factors has no alternating part") {
    IndexedTensor g = symmetrize(random_t(rng, {Slot::EUp, Slot::EUp}), {0, 1});
    IndexedTensor h = symmetrize(random_t(rng, {Slot::FDown, Slot::FDown}), {0, 1});
    const IndexedTensor s = transpose(tensor_product(g, h), {0, 2, 1, 3});
    const Sym2Parts parts = sym2_decompose(s);
    REQUIRE(parts.alt_alt.is_zero());
    REQUIRE(parts.sym_sym == s);
  }
  for (int trial = 0; trial < 10; ++trial) {
    IndexedTensor s = random_t(rng, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
    s = Rational(1, 2) * (s + transpose(s, {2, 3, 0, 1}));
    const Sym2Parts parts = sym2_decompose(s);
    SECTION("parts sum to the input") { REQUIRE(parts.sym_sym + parts.alt_alt == s); }
    REQUIRE(sym2_mixed_sa(s).is_zero());
    REQUIRE(sym2_mixed_as(s).is_zero());
  }
  SECTION("non-symmetric input is rejected") {
    const IndexedTensor bad = random_t(rng, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
    REQUIRE_THROWS_AS(sym2_decompose(bad), std::invalid_argument);
  }
}

TEST_CASE("two-form decomposition projectors are complementary") {
  Rng rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    IndexedTensor s = random_t(rng, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
    s = Rational(1, 2) * (s - transpose(s, {2, 3, 0, 1}));  // two-form
    const IndexedTensor sym_part = two_form_sym_e_part(s);
    const IndexedTensor alt_part = two_form_alt_e_part(s);
    REQUIRE(sym_part + alt_part == s);
    // The E-symmetric part of a two-form is F-alternating and vice versa.
    REQUIRE(symmetrize(sym_part, {1, 3}).is_zero());
    REQUIRE(alternate(alt_part, {1, 3}).is_zero());
    REQUIRE(two_form_sym_e_part(sym_part) == sym_part);
    REQUIRE(two_form_sym_e_part(alt_part).is_zero());
  }
}

TEST_CASE("trace decomposition, F shape") {
  Rng rng(41);
  SECTION("pure trace input") {
    const IndexedTensor c = random_t(rng, {Slot::EUp});
    IndexedTensor phi(N, NV, {Slot::EUp, Slot::FDown, Slot::FUp});
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < N; ++ap) phi.at({a, ap, ap}) = c.at({a});
    const TraceFreeParts parts = trace_free_decompose(phi, TraceShape::CotangentTensorF);
    REQUIRE(parts.trace_free.is_zero());
    REQUIRE(parts.trace == Rational(N) * c);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const IndexedTensor phi = random_t(rng, {Slot::EUp, Slot::FDown, Slot::FUp});
    const TraceFreeParts parts = trace_free_decompose(phi, TraceShape::CotangentTensorF);
    REQUIRE(contract(parts.trace_free, 1, 2).is_zero());
    // Reconstruction: trace_free + (1/n) delta (x) trace == phi.
    IndexedTensor rebuilt = parts.trace_free;
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < N; ++ap)
        rebuilt.at({a, ap, ap}) += Rational(1, N) * parts.trace.at({a});
    REQUIRE(rebuilt == phi);
    // Projection property.
    REQUIRE(trace_free_decompose(parts.trace_free, TraceShape::CotangentTensorF).trace_free ==
            parts.trace_free);
  }
}

TEST_CASE("trace decomposition, E* shape") {
  Rng rng(43);
  SECTION("pure trace input") {
    const IndexedTensor mvec = random_t(rng, {Slot::FDown});
    IndexedTensor psi(N, NV, {Slot::EUp, Slot::FDown, Slot::EDown});
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < N; ++ap) psi.at({a, ap, a}) = mvec.at({ap});
    const TraceFreeParts parts = trace_free_decompose(psi, TraceShape::CotangentTensorEStar);
    REQUIRE(parts.trace_free.is_zero());
    REQUIRE(parts.trace == Rational(2) * mvec);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const IndexedTensor psi = random_t(rng, {Slot::EUp, Slot::FDown, Slot::EDown});
    const TraceFreeParts parts = trace_free_decompose(psi, TraceShape::CotangentTensorEStar);
    REQUIRE(contract(parts.trace_free, 0, 2).is_zero());
    IndexedTensor rebuilt = parts.trace_free;
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < N; ++ap)
        rebuilt.at({a, ap, a}) += Rational(1, 2) * parts.trace.at({ap});
    REQUIRE(rebuilt == psi);
  }
  SECTION("wrong slot signature is rejected") {
    const IndexedTensor bad = random_t(rng, {Slot::EUp, Slot::FDown, Slot::FUp});
    REQUIRE_THROWS_AS(trace_free_decompose(bad, TraceShape::CotangentTensorEStar),
                      std::invalid_argument);
  }
}

TEST_CASE("contraction commutes with symmetrization over disjoint slots") {
  Rng rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const IndexedTensor t = random_t(rng, {Slot::FUp, Slot::FUp, Slot::EUp, Slot::EDown});
    REQUIRE(contract(symmetrize(t, {0, 1}), 2, 3) == symmetrize(contract(t, 2, 3), {0, 1}));
  }
}

TEST_CASE("operations are linear over the rationals") {
  Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const IndexedTensor s = random_t(rng, {Slot::FUp, Slot::FUp, Slot::EUp, Slot::EDown});
    const IndexedTensor t = random_t(rng, {Slot::FUp, Slot::FUp, Slot::EUp, Slot::EDown});
    const Rational a = rng.rational(), b = rng.rational();
    const IndexedTensor combo = a * s + b * t;
    REQUIRE(contract(combo, 2, 3) == a * contract(s, 2, 3) + b * contract(t, 2, 3));
    REQUIRE(symmetrize(combo, {0, 1}) == a * symmetrize(s, {0, 1}) + b * symmetrize(t, {0, 1}));
  }
}
