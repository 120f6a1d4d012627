#include <catch2/catch_amalgamated.hpp>

#include "fext/harness.hpp"

#include <json.hpp>

using namespace fext;
using hn::Scenario;

namespace {

RatFunc rf(int64_t c) { return RatFunc::constant(2, 1, c); }
RatFunc tv() { return RatFunc::variable(2, 1, 0); }

const char* kEx3Text =
    "# two stacked square roots\n"
    "name twostep\n"
    "base 2 t\n"
    "step u x^2+t\n"
    "step s x^2+x+u\n"
    "auto u, s+1\n"
    "budget seed 11\n"
    "budget samples 5\n"
    "expect rank 4\n"
    "check classify\n"
    "check correspondence\n";

}  // namespace

TEST_CASE("scenario text parses into steps, autos, and checks") {
  Scenario s = hn::parse_scenario(kEx3Text);
  CHECK(s.name == "twostep");
  CHECK(s.has_base);
  CHECK(s.p == 2);
  REQUIRE(s.vars == std::vector<std::string>{"t"});
  REQUIRE(s.steps.size() == 2);
  CHECK(s.steps[0].gen == "u");
  CHECK(s.steps[1].gen == "s");
  REQUIRE(s.autos.size() == 1);
  CHECK(s.autos[0].images.size() == 2);
  CHECK(s.checks == std::vector<std::string>{"classify", "correspondence"});
  CHECK(s.seed == 11);
  CHECK(s.samples == 5);
  REQUIRE(s.expect.size() == 1);
  CHECK(s.expect[0].first == "rank");
  CHECK(s.expect[0].second == 4);
}

TEST_CASE("parse errors carry the offending line and column") {
  auto col_of = [](const std::string& text) -> std::pair<size_t, size_t> {
    try {
      hn::parse_scenario(text);
    } catch (const ParseError& e) {
      return {e.line, e.col};
    }
    return {0, 0};
  };

  SECTION("a doubled caret points at the second caret") {
    auto [line, col] = col_of("base 2 t\nstep u x^^2\n");
    CHECK(line == 2);
    CHECK(col == 10);
  }
  SECTION("unknown keywords are rejected where they start") {
    auto [line, col] = col_of("base 2 t\nblah 3\n");
    CHECK(line == 2);
    CHECK(col == 1);
  }
  SECTION("unknown identifiers inside step polynomials") {
    auto [line, col] = col_of("base 2 t\nstep u x^2+w\n");
    CHECK(line == 2);
    CHECK(col == 12);
  }
  SECTION("duplicate generators") {
    CHECK_THROWS_AS(
        hn::parse_scenario("base 2 t\nstep u x^2+t\nstep u x^2+x+1\n"),
        ParseError);
  }
  SECTION("base and ambient exclude each other") {
    CHECK_THROWS_AS(
        hn::parse_scenario("base 2 t\nambient 2 x y\nambient_base x^2\nambient_gen x\n"),
        ParseError);
  }
  SECTION("automorphism image count must match the generator count") {
    CHECK_THROWS_AS(
        hn::parse_scenario("base 2 t\nstep u x^2+t\nstep s x^2+x+u\nauto u\n"),
        ParseError);
  }
  SECTION("unknown budget keys") {
    CHECK_THROWS_AS(hn::parse_scenario("base 2 t\nstep u x^2+t\nbudget foo 3\n"),
                    ParseError);
  }
  SECTION("unknown expectation keys") {
    CHECK_THROWS_AS(
        hn::parse_scenario("base 2 t\nstep u x^2+t\nexpect blorp 1\n"),
        ParseError);
  }
  SECTION("chained exponentiation needs parentheses") {
    CHECK_THROWS_AS(hn::parse_scenario("base 2 t\nstep u x^2^3\n"), ParseError);
  }
  SECTION("oversized exponents are rejected at parse time") {
    CHECK_THROWS_AS(hn::parse_scenario("base 2 t\nstep u x^5000+t\n"),
                    ParseError);
  }
  SECTION("a scenario needs a base or an ambient description") {
    CHECK_THROWS_AS(hn::parse_scenario("check classify\n"), ParseError);
  }
  SECTION("unknown checks raise their own error type") {
    CHECK_THROWS_AS(hn::parse_scenario("base 2 t\nstep u x^2+t\ncheck nonsense\n"),
                    UnknownCheck);
  }
}

TEST_CASE("step expressions follow precedence, division, and unary minus") {
  SECTION("products bind tighter than sums") {
    auto built = hn::build_scenario(
        hn::parse_scenario("base 2 t\nstep u x^2+t*x+t^2+1\n"));
    const auto& m = built.tower->st.mins[0];
    REQUIRE(m.size() == 3);
    CHECK(m[0][0] == tv() * tv() + rf(1));
    CHECK(m[1][0] == tv());
    CHECK(m[2][0] == rf(1));
  }
  SECTION("division by base constants") {
    auto built = hn::build_scenario(
        hn::parse_scenario("base 2 t\nstep u x^2+x+t/(t+1)\n"));
    const auto& m = built.tower->st.mins[0];
    CHECK(m[0][0] == tv() / (tv() + rf(1)));
  }
  SECTION("division by the indeterminate is rejected") {
    CHECK_THROWS_AS(
        hn::build_scenario(hn::parse_scenario("base 2 t\nstep u x^2/x+t\n")),
        ParseError);
  }
  SECTION("unary minus in odd characteristic") {
    auto built =
        hn::build_scenario(hn::parse_scenario("base 3 t\nstep r x^3-t\n"));
    const auto& m = built.tower->st.mins[0];
    RatFunc t3 = RatFunc::variable(3, 1, 0);
    CHECK(m[0][0] == RatFunc::zero(3, 1) - t3);
  }
  SECTION("steps of degree one are rejected") {
    CHECK_THROWS_AS(
        hn::build_scenario(hn::parse_scenario("base 2 t\nstep u x+t\n")),
        ParseError);
  }
}

TEST_CASE("builtin catalog builds and stays distinct") {
  auto cat = hn::builtin_catalog();
  REQUIRE(cat.size() == 10);
  std::set<std::string> names;
  for (const auto& s : cat) names.insert(s.name);
  CHECK(names.size() == cat.size());
  std::map<std::string, size_t> ranks;
  for (const auto& s : cat) {
    CAPTURE(s.name);
    CHECK(s.checks == hn::suite_names());
    ranks[s.name] = hn::build_scenario(s).tower->rank();
  }
  CHECK(ranks["ex0"] == 4);
  CHECK(ranks["ex1"] == 2);
  CHECK(ranks["ex2"] == 2);
  CHECK(ranks["ex3"] == 4);
  CHECK(ranks["ex4"] == 3);
  CHECK(ranks["ex5"] == 8);
  CHECK(ranks["ex1p3"] == 3);
  CHECK(ranks["ex2p3"] == 3);
  CHECK(ranks["ex6"] == 6);
  CHECK(ranks["ex7"] == 8);
  CHECK(hn::find_builtin("ex3").has_value());
  CHECK_FALSE(hn::find_builtin("nope").has_value());
}

TEST_CASE("run_checks reports suites in declared order with honest gates") {
  auto s = *hn::find_builtin("ex2");
  hn::Report rep = hn::run_checks(s);
  REQUIRE(rep.checks.size() == hn::suite_names().size());
  for (size_t i = 0; i < rep.checks.size(); ++i)
    CHECK(rep.checks[i].name == hn::suite_names()[i]);
  std::map<std::string, std::string> status;
  std::map<std::string, std::string> notes;
  for (const auto& c : rep.checks) {
    status[c.name] = c.status;
    notes[c.name] = c.note;
  }
  CHECK(status["classify"] == "heuristic-pass");
  CHECK(status["triple_agreement"] == "pass");
  CHECK(status["pi_correspondence"] == "skip");
  CHECK(notes["pi_correspondence"].find("purely inseparable") != std::string::npos);
  CHECK(status["tensor"] == "skip");
  CHECK(status["disjoint"] == "heuristic-pass");
  CHECK(rep.all_ok());
}

TEST_CASE("a tower with certified automorphisms passes without heuristics") {
  auto s = *hn::find_builtin("ex1");
  hn::Report rep = hn::run_checks(s);
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CHECK((c.status == "pass" || c.status == "skip"));
  }
  std::map<std::string, std::string> status;
  for (const auto& c : rep.checks) status[c.name] = c.status;
  CHECK(status["pi_correspondence"] == "pass");
  CHECK(rep.all_ok());
}

TEST_CASE("declared automorphisms that are not automorphisms fail classify") {
  Scenario s = hn::parse_scenario(
      "base 2 t\nstep s x^2+x+t\nauto s+t\ncheck classify\n");
  hn::Report rep = hn::run_checks(s);
  REQUIRE(rep.checks.size() == 1);
  CHECK(rep.checks[0].status == "fail");
  CHECK(rep.checks[0].note.find("declared automorphism") != std::string::npos);
  CHECK_FALSE(rep.all_ok());
}

TEST_CASE("expectation mismatches fail classify with the observed value") {
  Scenario s = hn::parse_scenario(
      "base 2 t\nstep u x^2+t\nexpect dim_d 5\ncheck classify\n");
  hn::Report rep = hn::run_checks(s);
  REQUIRE(rep.checks.size() == 1);
  CHECK(rep.checks[0].status == "fail");
  CHECK(rep.checks[0].note.find("want 5") != std::string::npos);
  CHECK_FALSE(rep.all_ok());
}

TEST_CASE("reports emit deterministically in both formats") {
  auto s = *hn::find_builtin("ex3");
  s.checks = {"classify", "skew"};
  s.seed = 7;
  std::string a = hn::emit_report(hn::run_checks(s), "json");
  std::string b = hn::emit_report(hn::run_checks(s), "json");
  CHECK(a == b);

  auto parsed = nlohmann::json::parse(a);
  CHECK(parsed["scenario"] == "ex3");
  REQUIRE(parsed["checks"].size() == 2);
  CHECK(parsed["checks"][0]["name"] == "classify");
  CHECK(parsed["checks"][0]["millis"] == 0);
  CHECK(parsed["checks"][0]["witnesses"]["dims"].is_object());
  CHECK(parsed["checks"][0]["witnesses"]["group_order"] == 2);

  std::string text = hn::emit_report(hn::run_checks(s), "text");
  CHECK(text.find("scenario ex3") != std::string::npos);
  CHECK(text.find("classify") != std::string::npos);
  CHECK_THROWS_AS(hn::emit_report(hn::run_checks(s), "yaml"), AlgebraError);
}

TEST_CASE("fuzzing aggregates per-suite outcomes over random towers") {
  hn::FuzzBounds b;
  b.max_degree = 6;
  b.max_steps = 2;
  hn::Report rep = hn::fuzz_towers(1, 6, b);
  REQUIRE(!rep.checks.empty());
  CHECK(rep.checks[0].name == "samples");
  int64_t requested = 0, built = 0, discarded = 0;
  for (const auto& [k, v] : rep.checks[0].dims) {
    if (k == "requested") requested = v;
    if (k == "built") built = v;
    if (k == "discarded") discarded = v;
  }
  CHECK(requested == 6);
  CHECK(built + discarded == 6);
  CHECK(built >= 4);
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CHECK(c.status != "fail");
  }
  CHECK(rep.all_ok());
}
