#pragma once

#include "ag/chart.hpp"
#include "ag/weyl.hpp"

namespace ag {

/// The standing curved example for rank n: soldering sheared in two places
/// chosen so that, after absorbing the non-harmonic torsion and normalizing
/// Rho, both the torsion and its double contraction are nonzero.
inline ChartWeylData flagship_shears(int n) {
  const int nv = 2 * n;
  return sheared_chart(n, {{nv - 1, 1, Poly::variable(nv, 0)}, {0, 1, Poly::variable(nv, nv - 1)}});
}

/// Full pipeline on the flagship shears: weylize, then normalize.
inline ChartWeylData flagship_chart(int n) {
  return normalize_rho(weylize(flagship_shears(n)));
}

/// A single shear whose raw torsion already has the harmonic type: the
/// connection pair stays zero, so all constant F-sections solve the first
/// BGG operator on the normalized chart.
inline ChartWeylData harmonic_shear_chart(int n) {
  const int nv = 2 * n;
  return sheared_chart(n, {{nv - 1, 1, Poly::variable(nv, 0)}});
}

}  // namespace ag
