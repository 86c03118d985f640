#include <doctest.h>

#include <cmath>

#include "kn/error.hpp"
#include "kn/report/report.hpp"

using namespace kn;
using kn::report::json;

TEST_SUITE("report") {

TEST_CASE("csv quoting") {
  report::Table t;
  t.header = {"alpha", "coefficient"};
  t.rows.push_back({"2,0", "say \"hi\""});
  t.rows.push_back({"1", "x1"});
  CHECK(t.to_csv() == "alpha,coefficient\n\"2,0\",\"say \"\"hi\"\"\"\n1,x1\n");
}

TEST_CASE("numbers") {
  CHECK(report::number(0.5) == "0.5");
  CHECK(report::number(std::nan("")) == "nan");
  CHECK(report::number(-INFINITY) == "-inf");
}

TEST_CASE("envelope fields") {
  auto j = report::envelope("op parse", {{"op", "1*D[1]"}}, {{"order", 1}}, "2026-01-01T00:00:00Z");
  CHECK(j["schema_version"] == report::kSchemaVersion);
  CHECK(j["command"] == "op parse");
  CHECK(j["generated_at"] == "2026-01-01T00:00:00Z");
  CHECK_FALSE(report::without_timestamp(j).contains("generated_at"));
  CHECK(report::utc_timestamp().size() == 20);
}

TEST_CASE("non-finite values become null") {
  analysis::NormTable t;
  t.norms = {1.0, std::nan(""), INFINITY};
  auto j = report::to_json(t);
  CHECK(j["norms"][0] == 1.0);
  CHECK(j["norms"][1].is_null());
  CHECK(j["norms"][2].is_null());
}

TEST_CASE("merge keeps every report and checks the schema") {
  auto a = report::envelope("a", json::object(), json::object());
  auto b = report::envelope("b", json::object(), json::object());
  auto m = report::merge({a, b});
  CHECK(m["result"]["reports"].size() == 2);
  CHECK(m["result"]["reports"][1]["command"] == "b");
  auto bad = a;
  bad["schema_version"] = 99;
  CHECK_THROWS_AS(report::merge({a, bad}), ParameterError);
  CHECK_THROWS_AS(report::merge({json::array()}), ParameterError);
}

TEST_CASE("operator serialization round-trips") {
  auto p = pdo::LinearPDO::parse("x1*D[2,0] - 3*D[0,1]", 2);
  auto j = report::to_json(p);
  CHECK(j["order"] == 2);
  CHECK(pdo::same(pdo::LinearPDO::parse(j["d_form"].get<std::string>(), 2), p));
  CHECK(pdo::same(pdo::LinearPDO::parse(j["partial_form"].get<std::string>(), 2), p));
}

}
