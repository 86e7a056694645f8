#include <catch2/catch_amalgamated.hpp>

#include "ag/loci.hpp"
#include "test_util.hpp"

using namespace ag;
using agtest::random_one_form;

namespace {
constexpr int N = 3;
constexpr int NV = 6;

/// eta^{bp} = x^{bp}_1 (first E-column of coordinates).
IndexedTensor coordinate_f_section() {
  IndexedTensor eta(N, NV, {Slot::FUp});
  for (int bp = 0; bp < N; ++bp) eta.at({bp}) = Poly::variable(NV, pair_index(N, 0, bp));
  return eta;
}

/// phi_B = x^{1'}_B (first F-row of coordinates).
IndexedTensor coordinate_estar_section() {
  IndexedTensor phi(N, NV, {Slot::EDown});
  for (int b = 0; b < 2; ++b) phi.at({b}) = Poly::variable(NV, pair_index(N, b, 0));
  return phi;
}
}  // namespace

TEST_CASE("affine zero sets and deterministic sampling") {
  const auto set = affine_zero_set(coordinate_f_section());
  REQUIRE(set.has_value());
  REQUIRE(set->directions.size() == 3);  // codimension n = 3 in 6 variables
  const auto pts = sample_points(*set, 25);
  REQUIRE(pts.size() == 25);
  for (const auto& x : pts) REQUIRE(all_zero(eval_components(coordinate_f_section(), x)));
  // Distinctness.
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) REQUIRE(pts[i] != pts[j]);
  // Degree > 1 sections are out of closed-form scope.
  IndexedTensor quad(N, NV, {Slot::FUp});
  quad.at({0}) = Poly::variable(NV, 0) * Poly::variable(NV, 0);
  REQUIRE_FALSE(affine_zero_set(quad).has_value());
}

TEST_CASE("jet check on flat solutions") {
  const ChartWeylData flat = flat_chart(N);
  SECTION("vanishing point of a coordinate solution still has nonzero derivative") {
    const Point origin(NV, Rational(0));
    const VerificationReport rep = jet_check(flat, coordinate_f_section(), {origin});
    REQUIRE(rep.passed());
  }
  SECTION("constant solutions pass trivially") {
    IndexedTensor eta(N, NV, {Slot::FUp});
    eta.at({1}) = Poly::constant(NV, 4);
    REQUIRE(jet_check(flat, eta, {Point(NV, Rational(1))}).passed());
  }
  SECTION("the zero section is rejected") {
    REQUIRE_THROWS_AS(jet_check(flat, IndexedTensor(N, NV, {Slot::FUp}), {}),
                      std::invalid_argument);
  }
}

TEST_CASE("zero locus of the flat tractor-side solution") {
  const ChartWeylData flat = flat_chart(N);
  const IndexedTensor eta = coordinate_f_section();
  const auto set = affine_zero_set(eta);
  REQUIRE(set.has_value());
  const auto pts = sample_points(*set, 20);
  const ZeroLocusReport rep = zero_locus_analysis(flat, eta, pts);
  REQUIRE(rep.summary.passed());
  for (const auto& zp : rep.points) {
    REQUIRE(zp.rank == N);
    REQUIRE(zp.codimension == N);
    REQUIRE(zp.match);
    // Kernel is exactly the vectors with vanishing first-E-column entries.
    for (const auto& v : zp.kernel)
      for (int ap = 0; ap < N; ++ap) REQUIRE(v[pair_index(N, 0, ap)] == 0);
  }
  SECTION("points off the zero set are rejected") {
    Point off(NV, Rational(0));
    off[0] = 1;
    REQUIRE_THROWS_AS(zero_locus_analysis(flat, eta, {off}), std::invalid_argument);
  }
}

TEST_CASE("zero locus of the flat cotractor-side solution") {
  const ChartWeylData flat = flat_chart(N);
  const IndexedTensor phi = coordinate_estar_section();
  const auto set = affine_zero_set(phi);
  REQUIRE(set.has_value());
  REQUIRE(set->directions.size() == 4);  // dimension 2(n-1)
  const auto pts = sample_points(*set, 20);
  const ZeroLocusReport rep = zero_locus_analysis(flat, phi, pts);
  REQUIRE(rep.summary.passed());
  for (const auto& zp : rep.points) {
    REQUIRE(zp.rank == 2);
    REQUIRE(zp.codimension == 2);
    REQUIRE(zp.match);
    for (const auto& v : zp.kernel)
      for (int a = 0; a < 2; ++a) REQUIRE(v[pair_index(N, a, 0)] == 0);
  }
}

TEST_CASE("nowhere-vanishing solutions are parallel for a shifted Weyl connection") {
  const ChartWeylData flat = flat_chart(N);
  SECTION("constant F-section: the zero shift works globally") {
    IndexedTensor eta(N, NV, {Slot::FUp});
    eta.at({2}) = Poly::constant(NV, 3);
    const VerificationReport rep = nowhere_vanishing_weyl_check(flat, eta, {Point(NV, Rational(0))});
    REQUIRE(rep.passed());
    bool global_pass = false;
    for (const auto& item : rep.items)
      if (item.id == "global_polynomial_upsilon" && item.status == CheckStatus::pass)
        global_pass = true;
    REQUIRE(global_pass);
  }
  SECTION("affine family: pointwise verification on a box avoiding the zero set") {
    IndexedTensor a(N, NV, {Slot::FUp});
    a.at({0}) = Poly::constant(NV, 7);
    a.at({1}) = Poly::constant(NV, 1);
    a.at({2}) = Poly::constant(NV, -2);
    IndexedTensor b(N, NV, {Slot::EUp});
    b.at({0}) = Poly::constant(NV, 1);
    b.at({1}) = Poly::constant(NV, 2);
    IndexedTensor eta = a;
    for (int bp = 0; bp < N; ++bp)
      for (int c = 0; c < 2; ++c)
        eta.at({bp}) += Poly::variable(NV, pair_index(N, c, bp)) * b.at({c});
    std::vector<Point> samples;
    for (int k = 0; k < 12; ++k) {
      Point x(NV, Rational(0));
      for (int v = 0; v < NV; ++v) x[v] = rational((k * (v + 2)) % 5, (v % 3) + 1) * rational(1, 4);
      if (!all_zero(eval_components(eta, x))) samples.push_back(std::move(x));
    }
    REQUIRE(samples.size() >= 10);
    const VerificationReport rep = nowhere_vanishing_weyl_check(flat, eta, samples);
    int pointwise = 0;
    for (const auto& item : rep.items) {
      if (item.id.starts_with("pointwise/")) {
        REQUIRE(item.status == CheckStatus::pass);
        ++pointwise;
      }
    }
    REQUIRE(pointwise == static_cast<int>(samples.size()));
  }
  SECTION("constant E*-section") {
    IndexedTensor phi(N, NV, {Slot::EDown});
    phi.at({0}) = Poly::constant(NV, 2);
    const VerificationReport rep =
        nowhere_vanishing_weyl_check(flat, phi, {Point(NV, Rational(1))});
    REQUIRE(rep.passed());
  }
  SECTION("samples on the zero set are rejected") {
    const IndexedTensor eta = coordinate_f_section();
    REQUIRE_THROWS_AS(nowhere_vanishing_weyl_check(flat, eta, {Point(NV, Rational(0))}),
                      std::invalid_argument);
  }
}

TEST_CASE("induced projective structure on the tractor zero locus") {
  const ChartWeylData flat = flat_chart(N);
  const IndexedTensor eta = coordinate_f_section();
  const auto set = affine_zero_set(eta);
  const auto pts = sample_points(*set, 10);

  // Tangent pairs: combinations of the annihilator-line tangents.
  auto tangent_pairs_at = [&](const Point& x) {
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
    return pairs;
  };

  SECTION("zero shift: differences vanish, torsion vanishes") {
    for (const Point& x : pts) {
      const VerificationReport rep = induced_projective_structure(
          flat, flat, IndexedTensor(N, NV, {Slot::EUp, Slot::FDown}), eta, x, tangent_pairs_at(x));
      REQUIRE(rep.passed());
    }
  }
  SECTION("constant shift: the projective difference formula holds exactly") {
    Rng rng(701);
    const IndexedTensor u = random_one_form(rng, N, 0);
    const ChartWeylData changed = apply_upsilon(flat, u);
    REQUIRE(check_normality(changed).normal);
    int checked = 0;
    for (const Point& x : pts) {
      const VerificationReport rep =
          induced_projective_structure(flat, changed, u, eta, x, tangent_pairs_at(x));
      for (const auto& item : rep.items) {
        CAPTURE(item.id);
        REQUIRE(item.status == CheckStatus::pass);
      }
      ++checked;
    }
    REQUIRE(checked == 10);
  }
  SECTION("points off the locus and bad tangents are rejected") {
    Point off(NV, Rational(0));
    off[0] = 1;
    REQUIRE_THROWS_AS(induced_projective_structure(flat, flat,
                                                   IndexedTensor(N, NV, {Slot::EUp, Slot::FDown}),
                                                   eta, off, {}),
                      std::invalid_argument);
    Point bad(NV, Rational(0));
    bad[pair_index(N, 0, 1)] = 1;  // not in the kernel at the origin
    REQUIRE_THROWS_AS(induced_projective_structure(flat, flat,
                                                   IndexedTensor(N, NV, {Slot::EUp, Slot::FDown}),
                                                   eta, Point(NV, Rational(0)), {{bad, bad}}),
                      std::invalid_argument);
  }
}

TEST_CASE("induced volume identification on the cotractor zero locus") {
  const ChartWeylData flat = flat_chart(N);
  const IndexedTensor phi = coordinate_estar_section();
  const auto set = affine_zero_set(phi);
  const auto pts = sample_points(*set, 10);
  for (const Point& x : pts) {
    const VerificationReport rep = induced_ag_structure(flat, phi, x);
    REQUIRE(rep.passed());
  }
  SECTION("degenerate normalization vectors are rejected") {
    const Point x = pts.front();
    // mu = first dual basis vector here, so any vector with zero first
    // component pairs to zero.
    std::vector<Rational> bad(N, Rational(0));
    bad[1] = 1;
    REQUIRE_THROWS_AS(require_admissible_volume_vector(flat, phi, x, bad),
                      std::invalid_argument);
  }
  SECTION("points off the locus are rejected") {
    Point off(NV, Rational(0));
    off[0] = 1;
    REQUIRE_THROWS_AS(induced_ag_structure(flat, phi, off), std::invalid_argument);
  }
}

TEST_CASE("induced structures on the curved example, when solutions vanish somewhere") {
  const auto& fix = agtest::curved_fixture();
  const BggSolutionBasis basis = solve_bgg_polynomial(fix.data, Bundle::tractor, 2);
  int analyzed = 0;
  for (const IndexedTensor& eta : basis.basis) {
    const auto set = affine_zero_set(eta);
    if (!set || set->directions.size() != static_cast<std::size_t>(N)) continue;
    const auto pts = sample_points(*set, 3);
    const ZeroLocusReport rep = zero_locus_analysis(fix.data, eta, pts);
    REQUIRE(rep.summary.passed());
    ++analyzed;
  }
  INFO("curved sections with analyzable zero loci: " << analyzed);

  // The cotractor side of this example admits a solution with an affine zero
  // set of the full expected dimension 2(n-1); run the locus analysis and
  // the induced volume identification there.
  const BggSolutionBasis cbasis = solve_bgg_polynomial(fix.data, Bundle::cotractor, 2);
  int curved_cotractor_loci = 0;
  for (const IndexedTensor& phi : cbasis.basis) {
    const auto set = affine_zero_set(phi);
    if (!set || set->directions.size() != static_cast<std::size_t>(2 * (N - 1))) continue;
    const auto pts = sample_points(*set, 8);
    const ZeroLocusReport rep = zero_locus_analysis(fix.data, phi, pts);
    REQUIRE(rep.summary.passed());
    for (const auto& zp : rep.points) REQUIRE(zp.codimension == 2);
    for (const Point& x : pts) REQUIRE(induced_ag_structure(fix.data, phi, x).passed());
    ++curved_cotractor_loci;
  }
  REQUIRE(curved_cotractor_loci >= 1);
}
