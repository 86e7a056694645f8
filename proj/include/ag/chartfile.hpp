#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ag/bgg.hpp"
#include "ag/chart.hpp"
#include "ag/loci.hpp"
#include "ag/report.hpp"

namespace ag {

using Json = nlohmann::json;

class chart_parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Canonical serialization: rationals as "p/q" strings, exponent vectors as
// integer arrays, terms in degree-lexicographic order. nlohmann::json keeps
// object keys sorted, so emitted reports are byte-stable.
// ---------------------------------------------------------------------------

inline Json poly_to_json(const Poly& p) {
  Json terms = Json::array();
  for (const auto& [mono, coef] : p.terms())
    terms.push_back(Json{{"c", to_string(coef)}, {"e", mono}});
  return Json{{"terms", std::move(terms)}};
}

inline Poly poly_from_json(const Json& j, int nvars, const std::string& where) {
  if (j.is_string()) {
    // Shorthand: a bare rational string is a constant polynomial.
    return Poly::constant(nvars, parse_rational(j.get<std::string>()));
  }
  if (!j.is_object() || !j.contains("terms"))
    throw chart_parse_error(where + ": polynomial must be {\"terms\": [...]} or a rational string");
  Poly p(nvars);
  for (const auto& term : j.at("terms")) {
    const auto& exps = term.at("e");
    if (static_cast<int>(exps.size()) != nvars)
      throw chart_parse_error(where + ": exponent vector length != 2n");
    Monomial m(nvars, 0);
    for (int i = 0; i < nvars; ++i) {
      m[i] = exps.at(i).get<int>();
      if (m[i] < 0) throw chart_parse_error(where + ": negative exponent");
    }
    p.add_term(m, parse_rational(term.at("c").get<std::string>()));
  }
  if (p.degree() > degree_cap().load())
    throw chart_parse_error(where + ": polynomial exceeds the degree cap");
  return p;
}

inline Slot slot_from_name(const std::string& name, const std::string& where) {
  if (name == "Eup") return Slot::EUp;
  if (name == "Edown") return Slot::EDown;
  if (name == "Fup") return Slot::FUp;
  if (name == "Fdown") return Slot::FDown;
  throw chart_parse_error(where + ": unknown slot kind '" + name + "'");
}

inline Json tensor_to_json(const IndexedTensor& t) {
  Json slots = Json::array();
  for (int i = 0; i < t.rank(); ++i) slots.push_back(slot_name(t.slot(i)));
  Json comps = Json::array();
  for (const Poly& p : t.components()) comps.push_back(poly_to_json(p));
  return Json{{"components", std::move(comps)}, {"slots", std::move(slots)}};
}

inline IndexedTensor tensor_from_json(const Json& j, int n, int nvars, const std::string& where) {
  std::vector<Slot> slots;
  for (const auto& s : j.at("slots")) slots.push_back(slot_from_name(s.get<std::string>(), where));
  IndexedTensor t(n, nvars, std::move(slots));
  const auto& comps = j.at("components");
  if (comps.size() != t.component_count())
    throw chart_parse_error(where + ": component count does not match the slot dimensions");
  for (std::size_t i = 0; i < t.component_count(); ++i)
    t.components()[i] = poly_from_json(comps.at(i), nvars, where);
  return t;
}

inline Json matrix_to_json(const PolyMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(poly_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline PolyMatrix matrix_from_json(const Json& j, int rows, int cols, int nvars,
                                   const std::string& where) {
  if (static_cast<int>(j.size()) != rows)
    throw chart_parse_error(where + ": expected " + std::to_string(rows) + " rows");
  PolyMatrix m = poly_matrix(rows, cols, nvars);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j.at(r).size()) != cols)
      throw chart_parse_error(where + ": expected " + std::to_string(cols) + " columns");
    for (int c = 0; c < cols; ++c) m(r, c) = poly_from_json(j.at(r).at(c), nvars, where);
  }
  return m;
}

inline Json point_to_json(const Point& x) {
  Json out = Json::array();
  for (const auto& c : x) out.push_back(to_string(c));
  return out;
}

inline Point point_from_json(const Json& j, int nvars, const std::string& where) {
  if (static_cast<int>(j.size()) != nvars)
    throw chart_parse_error(where + ": point length != 2n");
  Point x;
  for (const auto& c : j) x.push_back(parse_rational(c.get<std::string>()));
  return x;
}

// ---------------------------------------------------------------------------
// Chart files
// ---------------------------------------------------------------------------

struct NamedSection {
  Bundle bundle = Bundle::tractor;
  IndexedTensor section;
};

struct ChartFile {
  ChartWeylData data;
  std::map<std::string, NamedSection> sections;
  std::map<std::string, std::vector<Point>> points;
};

/// Parses a chart file. Optional fields default to the flat structure:
/// identity soldering, zero connection pair, zero Rho. The parsed data must
/// pass validate().
inline ChartFile chart_file_from_json(const Json& j) {
  if (!j.contains("n")) throw chart_parse_error("chart: missing field 'n'");
  const int n = j.at("n").get<int>();
  if (n < 3) throw chart_parse_error("chart: n must be at least 3");
  const int nv = 2 * n;
  ChartFile file;
  file.data = flat_chart(n);

  if (j.contains("soldering")) {
    const Json& s = j.at("soldering");
    if (s.contains("shears")) {
      std::vector<Shear> shears;
      for (const auto& sh : s.at("shears"))
        shears.push_back(Shear{sh.at("row").get<int>(), sh.at("col").get<int>(),
                               poly_from_json(sh.at("entry"), nv, "soldering shear")});
      for (const Shear& sh : shears)
        if (sh.row < 0 || sh.row >= nv || sh.col < 0 || sh.col >= nv || sh.row == sh.col)
          throw chart_parse_error("soldering shear: bad row/col");
      file.data = sheared_chart(n, shears);
    } else if (s.contains("matrix")) {
      file.data.soldering = matrix_from_json(s.at("matrix"), nv, nv, nv, "soldering matrix");
      if (!s.contains("inverse"))
        throw chart_parse_error("soldering: explicit matrix requires its exact inverse");
      file.data.soldering_inv = matrix_from_json(s.at("inverse"), nv, nv, nv, "soldering inverse");
    } else {
      throw chart_parse_error("soldering: expected 'shears' or 'matrix'+'inverse'");
    }
  }
  if (j.contains("gamma_e")) {
    const Json& g = j.at("gamma_e");
    if (static_cast<int>(g.size()) != nv)
      throw chart_parse_error("gamma_e: expected one matrix per coordinate direction");
    for (int mu = 0; mu < nv; ++mu)
      file.data.gamma_e[mu] = matrix_from_json(g.at(mu), 2, 2, nv, "gamma_e");
  }
  if (j.contains("gamma_f")) {
    const Json& g = j.at("gamma_f");
    if (static_cast<int>(g.size()) != nv)
      throw chart_parse_error("gamma_f: expected one matrix per coordinate direction");
    for (int mu = 0; mu < nv; ++mu)
      file.data.gamma_f[mu] = matrix_from_json(g.at(mu), n, n, nv, "gamma_f");
  }
  if (j.contains("rho")) {
    file.data.rho = tensor_from_json(j.at("rho"), n, nv, "rho");
    if (file.data.rho.slots() !=
        std::vector<Slot>{Slot::EUp, Slot::FDown, Slot::EUp, Slot::FDown})
      throw chart_parse_error("rho: wrong slot signature");
  }
  if (j.contains("sections"))
    for (const auto& [name, sec] : j.at("sections").items()) {
      const std::string bundle = sec.at("bundle").get<std::string>();
      NamedSection named;
      if (bundle == "tractor") named.bundle = Bundle::tractor;
      else if (bundle == "cotractor") named.bundle = Bundle::cotractor;
      else throw chart_parse_error("section '" + name + "': unknown bundle tag");
      named.section = tensor_from_json(sec.at("section"), n, nv, "section '" + name + "'");
      const std::vector<Slot> want =
          named.bundle == Bundle::tractor ? std::vector<Slot>{Slot::FUp}
                                          : std::vector<Slot>{Slot::EDown};
      if (named.section.slots() != want)
        throw chart_parse_error("section '" + name + "': slot signature does not match bundle");
      file.sections.emplace(name, std::move(named));
    }
  if (j.contains("points"))
    for (const auto& [name, pts] : j.at("points").items()) {
      std::vector<Point> list;
      for (const auto& p : pts) list.push_back(point_from_json(p, nv, "points '" + name + "'"));
      file.points.emplace(name, std::move(list));
    }

  const VerificationReport rep = validate(file.data);
  if (!rep.passed()) {
    std::string bad;
    for (const auto& item : rep.items)
      if (item.status == CheckStatus::fail) bad += (bad.empty() ? "" : ", ") + item.id;
    throw chart_parse_error("chart: data fails validation (" + bad + ")");
  }
  return file;
}

inline Json chart_file_to_json(const ChartFile& file) {
  const ChartWeylData& d = file.data;
  Json j;
  j["n"] = d.n;
  j["soldering"] = Json{{"matrix", matrix_to_json(d.soldering)},
                        {"inverse", matrix_to_json(d.soldering_inv)}};
  Json ge = Json::array(), gf = Json::array();
  for (int mu = 0; mu < d.nvars(); ++mu) {
    ge.push_back(matrix_to_json(d.gamma_e[mu]));
    gf.push_back(matrix_to_json(d.gamma_f[mu]));
  }
  j["gamma_e"] = std::move(ge);
  j["gamma_f"] = std::move(gf);
  j["rho"] = tensor_to_json(d.rho);
  Json sections = Json::object();
  for (const auto& [name, sec] : file.sections)
    sections[name] = Json{{"bundle", bundle_name(sec.bundle)},
                          {"section", tensor_to_json(sec.section)}};
  j["sections"] = std::move(sections);
  Json points = Json::object();
  for (const auto& [name, pts] : file.points) {
    Json list = Json::array();
    for (const Point& x : pts) list.push_back(point_to_json(x));
    points[name] = std::move(list);
  }
  j["points"] = std::move(points);
  return j;
}

// ---------------------------------------------------------------------------
// Reports and solution bases
// ---------------------------------------------------------------------------

/// Serialized form of a verification report. Timing is deliberately not
/// emitted: reports must be byte-identical across runs for the same inputs.
inline Json report_to_json(const VerificationReport& rep) {
  Json results = Json::array();
  for (const auto& item : rep.items) {
    Json r{{"id", item.id}, {"status", status_name(item.status)}};
    if (!item.residual.empty()) r["residual"] = item.residual;
    results.push_back(std::move(r));
  }
  return results;
}

inline Json basis_to_json(const BggSolutionBasis& basis) {
  Json sections = Json::array();
  int idx = 0;
  for (const IndexedTensor& s : basis.basis) {
    sections.push_back(Json{{"bundle", bundle_name(basis.bundle)},
                            {"name", "solution_" + std::to_string(idx++)},
                            {"section", tensor_to_json(s)}});
  }
  return Json{{"basis", std::move(sections)},
              {"bundle", bundle_name(basis.bundle)},
              {"degree_bound", basis.degree_bound},
              {"dimension", basis.dimension}};
}

inline Json zero_locus_report_to_json(const ZeroLocusReport& rep) {
  Json points = Json::array();
  for (const auto& zp : rep.points) {
    Json kernel = Json::array();
    for (const auto& v : zp.kernel) kernel.push_back(point_to_json(v));
    Json predicted = Json::array();
    for (const auto& v : zp.predicted) predicted.push_back(point_to_json(v));
    points.push_back(Json{{"codimension", zp.codimension},
                          {"kernel", std::move(kernel)},
                          {"point", point_to_json(zp.x)},
                          {"predicted_tangent", std::move(predicted)},
                          {"rank", zp.rank},
                          {"tangent_model_match", zp.match}});
  }
  return Json{{"bundle", bundle_name(rep.bundle)},
              {"points", std::move(points)},
              {"summary", report_to_json(rep.summary)}};
}

}  // namespace ag
