#include <catch2/catch_amalgamated.hpp>

#include "ag/chartfile.hpp"
#include "ag/suites.hpp"
#include "test_util.hpp"

using namespace ag;

namespace {
constexpr int N = 3;
constexpr int NV = 6;
}  // namespace

TEST_CASE("minimal chart file defaults to the flat structure") {
  const ChartFile file = chart_file_from_json(Json::parse(R"({"n": 3})"));
  REQUIRE(file.data.n == 3);
  REQUIRE(file.data.soldering == poly_identity(NV, NV));
  REQUIRE(file.data.rho.is_zero());
  REQUIRE(validate(file.data).passed());
}

TEST_CASE("chart files round-trip through JSON") {
  Rng rng(801);
  ChartFile file;
  file.data = agtest::random_gamma_data(rng, N, 1);
  for (auto& p : file.data.rho.components()) p = random_poly(rng, NV, 1, 2);
  IndexedTensor eta(N, NV, {Slot::FUp});
  for (auto& p : eta.components()) p = random_poly(rng, NV, 1, 2);
  file.sections.emplace("eta", NamedSection{Bundle::tractor, eta});
  file.points.emplace("samples",
                      std::vector<Point>{Point(NV, rational(1, 2)), Point(NV, rational(-3))});
  const Json j = chart_file_to_json(file);
  const ChartFile back = chart_file_from_json(j);
  REQUIRE(back.data.soldering == file.data.soldering);
  REQUIRE(back.data.soldering_inv == file.data.soldering_inv);
  for (int mu = 0; mu < NV; ++mu) {
    REQUIRE(back.data.gamma_e[mu] == file.data.gamma_e[mu]);
    REQUIRE(back.data.gamma_f[mu] == file.data.gamma_f[mu]);
  }
  REQUIRE(back.data.rho == file.data.rho);
  REQUIRE(back.sections.at("eta").section == eta);
  REQUIRE(back.points.at("samples") == file.points.at("samples"));
  // Serialization is canonical: a second pass is byte-identical.
  REQUIRE(chart_file_to_json(back).dump() == j.dump());
}

TEST_CASE("shear descriptions build unipotent solderings") {
  const Json j = Json::parse(R"({
    "n": 3,
    "soldering": {"shears": [
      {"row": 5, "col": 1, "entry": {"terms": [{"c": "1", "e": [1,0,0,0,0,0]}]}}
    ]}
  })");
  const ChartFile file = chart_file_from_json(j);
  REQUIRE(validate(file.data).passed());
  REQUIRE_FALSE((file.data.soldering - poly_identity(NV, NV)).is_zero());
}

TEST_CASE("malformed chart files are rejected with context") {
  SECTION("missing n") {
    REQUIRE_THROWS_AS(chart_file_from_json(Json::parse(R"({"gamma_e": []})")), chart_parse_error);
  }
  SECTION("bad slot name") {
    const Json j = Json::parse(R"({"n": 3, "rho": {"slots": ["Eup","Fdown","Eup","Qdown"],
      "components": []}})");
    REQUIRE_THROWS_AS(chart_file_from_json(j), chart_parse_error);
  }
  SECTION("wrong exponent length") {
    const Json j = Json::parse(R"({"n": 3, "sections": {"s": {"bundle": "tractor",
      "section": {"slots": ["Fup"], "components": [
        {"terms": [{"c": "1", "e": [1,0]}]},
        {"terms": []}, {"terms": []}]}}}})");
    REQUIRE_THROWS_AS(chart_file_from_json(j), chart_parse_error);
  }
  SECTION("bad rational") {
    const Json j = Json::parse(R"({"n": 3, "points": {"p": [["1/0","0","0","0","0","0"]]}})");
    REQUIRE_THROWS_AS(chart_file_from_json(j), std::invalid_argument);
  }
  SECTION("explicit soldering without inverse") {
    Json j;
    j["n"] = 3;
    j["soldering"]["matrix"] = matrix_to_json(poly_identity(NV, NV));
    REQUIRE_THROWS_AS(chart_file_from_json(j), chart_parse_error);
  }
  SECTION("soldering failing the inverse identity") {
    Json j;
    j["n"] = 3;
    PolyMatrix bad = poly_identity(NV, NV);
    bad(0, 0) = Poly::constant(NV, 2);
    j["soldering"]["matrix"] = matrix_to_json(bad);
    j["soldering"]["inverse"] = matrix_to_json(poly_identity(NV, NV));
    REQUIRE_THROWS_AS(chart_file_from_json(j), chart_parse_error);
  }
  SECTION("degree cap enforced on load") {
    DegreeCapGuard guard(2);
    const Json j = Json::parse(R"({"n": 3, "sections": {"s": {"bundle": "tractor",
      "section": {"slots": ["Fup"], "components": [
        {"terms": [{"c": "1", "e": [3,0,0,0,0,0]}]},
        {"terms": []}, {"terms": []}]}}}})");
    REQUIRE_THROWS_AS(chart_file_from_json(j), chart_parse_error);
  }
}

TEST_CASE("polynomial serialization is canonical and exact") {
  Rng rng(809);
  for (int t = 0; t < 10; ++t) {
    const Poly p = random_poly(rng, NV, 3, 5);
    const Poly back = poly_from_json(poly_to_json(p), NV, "test");
    REQUIRE(back == p);
  }
  // Constant shorthand.
  REQUIRE(poly_from_json(Json("3/4"), NV, "test") == Poly::constant(NV, rational(3, 4)));
}

TEST_CASE("suite reports are deterministic for fixed inputs") {
  suite_detail::SuiteContext ctx1{3, 42, std::nullopt, std::nullopt};
  suite_detail::SuiteContext ctx2{3, 42, std::nullopt, std::nullopt};
  const std::string a = report_to_json(algebra_suite(ctx1)).dump();
  const std::string b = report_to_json(algebra_suite(ctx2)).dump();
  REQUIRE(a == b);
}

TEST_CASE("run_suite validates the range of n") {
  REQUIRE_THROWS_AS(run_suite(Suite::algebra, 2, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(run_suite(Suite::algebra, 7, 1), std::invalid_argument);
}
