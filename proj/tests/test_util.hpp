#pragma once

#include "ag/chart.hpp"
#include "ag/charts.hpp"
#include "ag/weyl.hpp"

namespace agtest {

using namespace ag;

/// Random connection pair with the trace-compatibility constraint, zero Rho,
/// identity soldering.
inline ChartWeylData random_gamma_data(Rng& rng, int n, int degree = 1) {
  ChartWeylData d = flat_chart(n);
  const int nv = 2 * n;
  for (int mu = 0; mu < nv; ++mu) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        d.gamma_e[mu](i, j) = degree == 0 ? Poly::constant(nv, rng.rational(3, 2))
                                          : random_poly(rng, nv, degree, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d.gamma_f[mu](i, j) = degree == 0 ? Poly::constant(nv, rng.rational(3, 2))
                                          : random_poly(rng, nv, degree, 2);
    // Push the trace sum into the last F diagonal entry.
    const Poly excess = d.gamma_e[mu].trace() + d.gamma_f[mu].trace();
    d.gamma_f[mu](n - 1, n - 1) -= excess;
  }
  return d;
}

inline IndexedTensor random_one_form(Rng& rng, int n, int degree = 1) {
  IndexedTensor u(n, 2 * n, {Slot::EUp, Slot::FDown});
  for (auto& p : u.components())
    p = degree == 0 ? Poly::constant(2 * n, rng.rational(3, 2))
                    : random_poly(rng, 2 * n, degree, 2);
  return u;
}

/// The standing curved example: sheared soldering, weylized, normalized.
/// Built once per process (the pipeline is exact but not free).
struct CurvedFixture {
  ChartWeylData data;
  CurvatureBlocks blocks;
  TorsionResult tor;
};

inline const CurvedFixture& curved_fixture() {
  static const CurvedFixture fix = [] {
    const int n = 3;
    const std::vector<Shear> shears{
        {5, 1, Poly::variable(6, 0)},
        {0, 1, Poly::variable(6, 5)},
    };
    ChartWeylData data = sheared_chart(n, shears);
    data = weylize(data);
    data = normalize_rho(data);
    CurvedFixture f{data, curvature_blocks(data), torsion(data)};
    return f;
  }();
  return fix;
}

}  // namespace agtest
