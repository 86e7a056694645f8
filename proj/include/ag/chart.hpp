#pragma once

#include <string>
#include <vector>

#include "ag/matrix.hpp"
#include "ag/report.hpp"
#include "ag/tensor.hpp"

namespace ag {

/// Chart coordinates are labeled by pairs: coordinate index mu = a*n + ap
/// corresponds to the frame pair (E-index a, F-index ap). Vector fields are
/// stored in pair components with slots (FUp, EDown); one-forms with slots
/// (EUp, FDown).
inline int pair_index(int n, int a, int ap) { return a * n + ap; }

/// A chart-level structure: soldering frame, connection pair and Rho tensor.
///
/// The soldering matrix maps pair-frame vector components to coordinate
/// components: xi^mu = sum_p S(mu, p) xi^p. Its exact polynomial inverse is
/// stored alongside (used to convert coordinate vectors back to pair form).
struct ChartWeylData {
  int n = 0;
  PolyMatrix soldering;      // 2n x 2n
  PolyMatrix soldering_inv;  // exact inverse
  std::vector<PolyMatrix> gamma_e;  // per coordinate direction, 2 x 2
  std::vector<PolyMatrix> gamma_f;  // per coordinate direction, n x n
  IndexedTensor rho;                // slots (EUp, FDown, EUp, FDown)

  int nvars() const { return 2 * n; }
};

inline ChartWeylData flat_chart(int n) {
  ChartWeylData d;
  d.n = n;
  const int nv = 2 * n;
  d.soldering = poly_identity(nv, nv);
  d.soldering_inv = poly_identity(nv, nv);
  d.gamma_e.assign(nv, poly_matrix(2, 2, nv));
  d.gamma_f.assign(nv, poly_matrix(n, n, nv));
  d.rho = IndexedTensor(n, nv, {Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
  return d;
}

/// Soldering built as a product of elementary unipotent shears
/// I + p(x) * unit(row, col); determinant one, polynomial inverse.
struct Shear {
  int row = 0;
  int col = 0;
  Poly entry;
};

inline ChartWeylData sheared_chart(int n, const std::vector<Shear>& shears) {
  ChartWeylData d = flat_chart(n);
  const int nv = 2 * n;
  for (const Shear& s : shears) {
    if (s.row == s.col) throw std::invalid_argument("sheared_chart: shear must be off-diagonal");
    PolyMatrix m = poly_identity(nv, nv);
    PolyMatrix minv = poly_identity(nv, nv);
    m(s.row, s.col) = s.entry;
    minv(s.row, s.col) = -s.entry;
    d.soldering = d.soldering * m;
    d.soldering_inv = minv * d.soldering_inv;
  }
  return d;
}

inline VerificationReport validate(const ChartWeylData& data) {
  VerificationReport rep;
  const int nv = data.nvars();
  bool shape_ok = data.soldering.rows() == nv && data.soldering.cols() == nv &&
                  data.soldering_inv.rows() == nv && data.soldering_inv.cols() == nv &&
                  static_cast<int>(data.gamma_e.size()) == nv &&
                  static_cast<int>(data.gamma_f.size()) == nv;
  rep.add("shape", shape_ok);
  if (!shape_ok) {
    rep.sort();
    return rep;
  }
  const PolyMatrix prod = data.soldering * data.soldering_inv;
  rep.add("soldering_inverse", (prod - poly_identity(nv, nv)).is_zero());
  bool trace_ok = true;
  for (int mu = 0; mu < nv; ++mu)
    if (!(data.gamma_e[mu].trace() + data.gamma_f[mu].trace()).is_zero()) trace_ok = false;
  rep.add("connection_trace_compatibility", trace_ok);
  rep.add("rho_slots", data.rho.slots() ==
                           std::vector<Slot>{Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown});
  rep.sort();
  return rep;
}

inline void require_valid(const ChartWeylData& data, const char* op) {
  if (!validate(data).passed())
    throw std::invalid_argument(std::string(op) + ": chart data fails validation");
}

/// Connection action of the pair (gamma_e[mu], gamma_f[mu]) on one tensor
/// slot; duals pick up the negative transpose.
inline Poly connection_term(const ChartWeylData& data, int mu, Slot kind, int out_idx, int in_idx) {
  switch (kind) {
    case Slot::EUp: return data.gamma_e[mu](out_idx, in_idx);
    case Slot::EDown: return -data.gamma_e[mu](in_idx, out_idx);
    case Slot::FUp: return data.gamma_f[mu](out_idx, in_idx);
    case Slot::FDown: return -data.gamma_f[mu](in_idx, out_idx);
  }
  throw std::logic_error("connection_term: bad slot");
}

/// Coordinate-direction covariant derivative: partial derivative plus the
/// connection action on every slot. The result keeps the slots of T; the
/// direction mu stays a coordinate label.
inline IndexedTensor coordinate_covariant_derivative(const ChartWeylData& data,
                                                     const IndexedTensor& t, int mu) {
  IndexedTensor r(t.n(), t.nvars(), t.slots());
  const auto dims = tensor_dims(t);
  for_each_index(dims, [&](std::span<const int> idx) {
    Poly v = t.at(idx).derivative(mu);
    std::vector<int> src(idx.begin(), idx.end());
    for (int s = 0; s < t.rank(); ++s) {
      const int d = t.dim(s);
      const int saved = src[s];
      for (int j = 0; j < d; ++j) {
        src[s] = j;
        const Poly& comp = t.at(src);
        if (!comp.is_zero()) {
          const Poly g = connection_term(data, mu, t.slot(s), saved, j);
          if (!g.is_zero()) v += g * comp;
        }
      }
      src[s] = saved;
    }
    r.at(idx) = v;
  });
  return r;
}

/// Covariant derivative with the new slot converted to the frame pair:
/// result slots are (EUp, FDown) prepended to the slots of T, and
/// (grad T)^a_{ap} = sum_mu S(mu, a*n + ap) (coordinate derivative)_mu.
inline IndexedTensor covariant_derivative(const ChartWeylData& data, const IndexedTensor& t) {
  return with_cap_context("covariant_derivative", [&] {
    const int n = data.n;
    const int nv = data.nvars();
    std::vector<Slot> slots{Slot::EUp, Slot::FDown};
    slots.insert(slots.end(), t.slots().begin(), t.slots().end());
    IndexedTensor r(n, t.nvars(), std::move(slots));
    const auto tdims = tensor_dims(t);
    for (int mu = 0; mu < nv; ++mu) {
      const IndexedTensor dmu = coordinate_covariant_derivative(data, t, mu);
      for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < n; ++ap) {
          const Poly& s = data.soldering(mu, pair_index(n, a, ap));
          if (s.is_zero()) continue;
          for_each_index(tdims, [&](std::span<const int> idx) {
            const Poly& v = dmu.at(idx);
            if (v.is_zero()) return;
            std::vector<int> ridx{a, ap};
            ridx.insert(ridx.end(), idx.begin(), idx.end());
            r.at(ridx) += s * v;
          });
        }
    }
    return r;
  });
}

/// Contracts the leading (EUp, FDown) derivative pair of a derivative tensor
/// with a tangent vector in pair components (slots (FUp, EDown striped)).
inline IndexedTensor directional_from_pair_derivative(const IndexedTensor& grad,
                                                      const IndexedTensor& v) {
  if (v.slots() != std::vector<Slot>{Slot::FUp, Slot::EDown})
    throw std::invalid_argument("directional_from_pair_derivative: direction must be a vector");
  // grad slots: (EUp, FDown, rest...), direction: v^{ap}_a.
  std::vector<Slot> slots(grad.slots().begin() + 2, grad.slots().end());
  IndexedTensor r(grad.n(), grad.nvars(), std::move(slots));
  const auto rdims = tensor_dims(r);
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < grad.n(); ++ap) {
      const Poly& c = v.at({ap, a});
      if (c.is_zero()) continue;
      for_each_index(rdims, [&](std::span<const int> idx) {
        std::vector<int> gidx{a, ap};
        gidx.insert(gidx.end(), idx.begin(), idx.end());
        const Poly& g = grad.at(gidx);
        if (!g.is_zero()) r.at(idx) += c * g;
      });
    }
  return r;
}

// --- Vector field plumbing -------------------------------------------------

/// Pair components -> coordinate components.
inline std::vector<Poly> pair_to_coordinates(const ChartWeylData& data, const IndexedTensor& v) {
  const int n = data.n, nv = data.nvars();
  std::vector<Poly> out(nv, Poly(nv));
  for (int mu = 0; mu < nv; ++mu)
    for (int a = 0; a < 2; ++a)
      for (int ap = 0; ap < n; ++ap) {
        const Poly& s = data.soldering(mu, pair_index(n, a, ap));
        if (!s.is_zero() && !v.at({ap, a}).is_zero()) out[mu] += s * v.at({ap, a});
      }
  return out;
}

/// Coordinate components -> pair components.
inline IndexedTensor coordinates_to_pair(const ChartWeylData& data, const std::vector<Poly>& v) {
  const int n = data.n, nv = data.nvars();
  IndexedTensor out(n, nv, {Slot::FUp, Slot::EDown});
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < n; ++ap) {
      Poly sum(nv);
      for (int mu = 0; mu < nv; ++mu) {
        const Poly& s = data.soldering_inv(pair_index(n, a, ap), mu);
        if (!s.is_zero() && !v[mu].is_zero()) sum += s * v[mu];
      }
      out.at({ap, a}) = sum;
    }
  return out;
}

/// Lie bracket of two vector fields given in pair components.
inline IndexedTensor vector_field_bracket(const ChartWeylData& data, const IndexedTensor& x,
                                          const IndexedTensor& y) {
  const int nv = data.nvars();
  const std::vector<Poly> xc = pair_to_coordinates(data, x);
  const std::vector<Poly> yc = pair_to_coordinates(data, y);
  std::vector<Poly> out(nv, Poly(nv));
  for (int mu = 0; mu < nv; ++mu)
    for (int nu = 0; nu < nv; ++nu) {
      if (!xc[nu].is_zero()) out[mu] += xc[nu] * yc[mu].derivative(nu);
      if (!yc[nu].is_zero()) out[mu] -= yc[nu] * xc[mu].derivative(nu);
    }
  return coordinates_to_pair(data, out);
}

/// The frame field with pair index p, as constant pair components.
inline IndexedTensor frame_field(const ChartWeylData& data, int p) {
  IndexedTensor v(data.n, data.nvars(), {Slot::FUp, Slot::EDown});
  v.at({p % data.n, p / data.n}) = Poly::constant(data.nvars(), 1);
  return v;
}

// --- Split sections --------------------------------------------------------

/// Section of the standard tractor bundle in a Weyl splitting: the quotient
/// part lives in F, the subbundle part in E. Higher-rank slot shapes appear
/// when a one-form slot pair has been prepended by differentiation.
struct SplitTractor {
  IndexedTensor f_part;  // slots (..., FUp)
  IndexedTensor e_part;  // slots (..., EUp)
};

struct SplitCotractor {
  IndexedTensor estar_part;  // slots (..., EDown)
  IndexedTensor fstar_part;  // slots (..., FDown)
};

/// Adjoint-bundle section in a Weyl splitting: TM part, block-diagonal
/// endomorphism pair with pointwise trace-sum zero, and T*M part.
struct AdjointSection {
  IndexedTensor vector_part;  // slots (FUp, EDown)
  IndexedTensor endo_e;       // slots (EUp, EDown)
  IndexedTensor endo_f;       // slots (FUp, FDown)
  IndexedTensor covector_part;  // slots (EUp, FDown)
};

inline bool adjoint_trace_free(const AdjointSection& s) {
  return (contract(s.endo_e, 0, 1) + contract(s.endo_f, 0, 1)).is_zero();
}

inline IndexedTensor e_section(int n, int nvars) { return IndexedTensor(n, nvars, {Slot::EUp}); }
inline IndexedTensor f_section(int n, int nvars) { return IndexedTensor(n, nvars, {Slot::FUp}); }

}  // namespace ag
