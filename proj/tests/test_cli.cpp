#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "twobinom/cli.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <sstream>

using namespace twobinom;
using Json = nlohmann::ordered_json;

namespace {

RequestSpec table(Command c, int x1, int n1, int x2, int n2) {
  RequestSpec r;
  r.command = c;
  r.x1 = x1;
  r.n1 = n1;
  r.x2 = x2;
  r.n2 = n2;
  return r;
}

Json run_json(RequestSpec r) {
  r.format = OutputFormat::json;
  const auto res = run(r);
  REQUIRE_MESSAGE(res.status == 0, res.error);
  return Json::parse(res.output);
}

std::map<std::string, std::string> parse_text(const std::string& s) {
  std::map<std::string, std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    const auto k = line.find(": ");
    out[line.substr(0, k)] = line.substr(k + 2);
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("Fisher-Irwin test") {
  auto r = table(Command::test, 7, 262, 30, 494);
  r.measure = "oddsratio";
  r.method = "fisher-irwin";
  r.beta0 = 1.0;
  const auto j = run_json(r);
  CHECK(j["p_value"].get<double>() == doctest::Approx(0.04996).epsilon(1e-4));
  CHECK(j["method"] == "fisher-irwin");
  CHECK(j["data"]["x1"] == 7);
}

TEST_CASE("Blaker interval") {
  auto r = table(Command::ci, 8, 14, 1, 7);
  r.measure = "oddsratio";
  r.method = "blaker";
  const auto j = run_json(r);
  CHECK(std::fabs(j["ci"]["lower"].get<double>() - 0.005) <= 5e-3);
  CHECK(std::fabs(j["ci"]["upper"].get<double>() - 1.53) <= 5e-3);
}

TEST_CASE("validation errors exit with status 2") {
  auto r = table(Command::test, 9, 8, 1, 7);
  auto res = run(r);
  CHECK(res.status == 2);
  CHECK(res.error.find("x1") != std::string::npos);
  CHECK(res.error.find("n1") != std::string::npos);

  r = table(Command::test, 3, 8, 1, 7);
  r.method = "nope";
  res = run(r);
  CHECK(res.status == 2);
  CHECK(res.error.find("uncond-score") != std::string::npos);

  r = table(Command::ci, 3, 8, 1, 7);
  r.level = 1.5;
  CHECK(run(r).status == 2);

  r = table(Command::test, 3, 8, 1, 7);
  r.measure = "ratio";
  r.beta0 = -1.0;
  CHECK(run(r).status == 2);

  r = RequestSpec{};
  r.command = Command::ci;
  r.n1 = 5;
  r.n2 = 5;
  CHECK(run(r).status == 2);

  r = table(Command::test, 3, 8, 1, 7);
  r.method = "fisher-irwin";
  r.measure = "difference";
  r.beta0 = 0.2;
  CHECK(run(r).status == 2);
}

TEST_CASE("budget errors exit with status 3") {
  auto r = table(Command::test, 10, 40, 20, 40);
  r.method = "csm";
  const auto res = run(r);
  CHECK(res.status == 3);
  CHECK(res.error.find("budget") != std::string::npos);
}

TEST_CASE("output is byte-identical across runs") {
  auto r = table(Command::diagnose, 3, 9, 6, 8);
  r.method = "melded";
  r.diagnose_grid_points = 41;
  for (auto f : {OutputFormat::json, OutputFormat::text, OutputFormat::csv}) {
    r.format = f;
    const auto a = run(r);
    const auto b = run(r);
    REQUIRE(a.status == 0);
    CHECK(a.output == b.output);
  }
}

TEST_CASE("JSON output round-trips") {
  for (auto c : {Command::test, Command::ci, Command::region, Command::diagnose}) {
    auto r = table(c, 5, 9, 7, 7);
    r.method = "uncond-diff-tb";
    r.beta_grid_points = 201;
    r.sup_grid_points = 201;
    r.diagnose_grid_points = 21;
    const auto out = run(r).output;
    const auto j = Json::parse(out);
    CHECK(j.dump(2) + "\n" == out);
    CHECK(Json::parse(j.dump()) == j);
  }
}

TEST_CASE("text, csv and json carry the same numbers") {
  auto r = table(Command::test, 8, 14, 1, 7);
  r.measure = "oddsratio";
  r.method = "fisher-central";
  const auto j = run_json(r);
  r.format = OutputFormat::text;
  const auto t = parse_text(run(r).output);
  r.format = OutputFormat::csv;
  std::istringstream csv(run(r).output);
  std::string head, row;
  std::getline(csv, head);
  std::getline(csv, row);
  const auto keys = split_csv(head);
  const auto vals = split_csv(row);
  REQUIRE(keys.size() == vals.size());
  std::map<std::string, std::string> c;
  for (size_t i = 0; i < keys.size(); ++i) c[keys[i]] = vals[i];
  CHECK(t == c);
  for (const char* k : {"p_value", "p_less", "p_greater", "p_two_sided", "estimate", "beta0"}) {
    INFO(k);
    CHECK(std::stod(t.at(k)) == j[k].get<double>());
  }
  CHECK(j["p_value"].get<double>() == doctest::Approx(0.157).epsilon(0.005));
}

TEST_CASE("numbers use ten significant digits and infinities are strings") {
  auto r = table(Command::ci, 0, 5, 3, 5);
  r.measure = "ratio";
  r.method = "melded";
  const auto j = run_json(r);
  CHECK(j["ci"]["upper"] == "inf");
  CHECK(j["estimate"] == "inf");
  r = table(Command::test, 1, 3, 2, 3);
  const auto t = run_json(r);
  const double p = t["p_less"].get<double>();
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", p);
  CHECK(std::strtod(buf, nullptr) == p);
}

TEST_CASE("power, size and sweep") {
  RequestSpec r;
  r.command = Command::power;
  r.n1 = 9;
  r.n2 = 7;
  r.method = "uncond-score";
  r.alternative = "two.sided.minlike";
  r.theta1 = 0.4;
  r.theta2 = 0.9;
  CHECK(run_json(r)["power"].get<double>() == doctest::Approx(0.619).epsilon(1e-3));

  r = RequestSpec{};
  r.command = Command::size;
  r.n1 = r.n2 = 8;
  r.measure = "oddsratio";
  const auto s = run_json(r);
  CHECK(s["valid"] == true);
  CHECK(s["size"].get<double>() <= 0.05);

  r = RequestSpec{};
  r.command = Command::sweep;
  r.n1 = 6;
  r.n2 = 6;
  r.method = "uncond-diff-tb";
  r.compare = "fisher-central";
  r.sweep_points = 5;
  const auto g = run_json(r);
  CHECK(g["quantity"] == "power_difference");
  CHECK(g["values"].size() == 5);
  CHECK(g["summary"]["fraction_within"].get<double>() + g["summary"]["fraction_above"].get<double>() +
            g["summary"]["fraction_below"].get<double>() ==
        doctest::Approx(1.0));
  r.format = OutputFormat::csv;
  const auto csv = run(r).output;
  CHECK(csv.rfind("theta1\\theta2,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("command and format names") {
  CHECK(parse_command("diagnose") == Command::diagnose);
  CHECK(to_string(Command::sweep) == "sweep");
  CHECK_THROWS_AS(parse_command("plot"), std::invalid_argument);
  CHECK(parse_format("csv") == OutputFormat::csv);
  CHECK_THROWS_AS(parse_format("xml"), std::invalid_argument);
}
