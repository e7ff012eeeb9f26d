#include <doctest.h>

#include "helpers.hpp"
#include "moran/errors.hpp"
#include "moran/spec.hpp"

using namespace moran;

TEST_SUITE("spec") {
  TEST_CASE("parse resolves the corpus") {
    for (const auto& name : th::kAllSpecs) {
      MoranSpec s = th::load_spec(name);
      CHECK(s.name == name);
      CHECK(s.r_inf > 0);
      CHECK(s.r_inf < 1);
      for (const LevelRule& r : s.levels) CHECK(r.branch >= 2);
    }
    CHECK(th::load_spec("rotated-2d").approximate);
    CHECK_FALSE(th::load_spec("seeded-b").constant_ratio);
    CHECK(th::load_spec("cantor-3").constant_ratio);
  }

  TEST_CASE("parse rejects malformed input") {
    CHECK_THROWS_AS(parse_spec_file(th::fixture_path("broken")), ConfigError);
    CHECK_THROWS_AS(parse_spec_file(th::fixture_path("bad-ratio")), ConfigError);
    // n*r > 1 cannot pack disjointly into an interval.
    CHECK_THROWS_AS(parse_spec_file(th::fixture_path("packing-violation")), ConfigError);
    CHECK_THROWS_AS(parse_spec_file("/nonexistent/x.json"), ConfigError);
  }

  TEST_CASE("rule schedule repeats from the marker") {
    MoranSpec s = th::load_spec("ends-packed");
    CHECK(s.rule_at_depth(1).uniform[1].offset()[0] == Rational(1) / 3);
    for (int k = 2; k <= 9; ++k)
      CHECK(s.rule_at_depth(k).uniform[1].offset()[0] == Rational(2) / 3);
    CHECK(s.period() == 1);
  }

  TEST_CASE("prefix products and cut depths") {
    MoranSpec b = th::load_spec("seeded-b");  // ratios alternate 1/5, 1/4
    CHECK(b.r_inf == Rational(1) / 5);
    for (int n = 1; n <= 8; ++n) {
      int k = b.cut_depth(n);
      Rational rn = rational_pow(b.r_inf, static_cast<unsigned>(n));
      CHECK(b.prefix_product(k) <= rn);
      CHECK(b.prefix_product(k - 1) > rn);
    }
    // Known values: products 1/5, 1/20, 1/100, 1/400, 1/2000, ...
    CHECK(b.cut_depth(1) == 1);
    CHECK(b.cut_depth(2) == 3);
    CHECK(b.cut_depth(3) == 4);
    CHECK(b.cut_depth(4) == 5);
    // Constant-ratio specs cut exactly at their own depth.
    MoranSpec c = th::load_spec("cantor-3");
    for (int n = 0; n <= 10; ++n) CHECK(c.cut_depth(n) == n);
  }

  TEST_CASE("word counts grow by the branch schedule") {
    MoranSpec b = th::load_spec("seeded-b");
    CHECK(b.words_at_depth(0) == 1);
    CHECK(b.words_at_depth(1) == 3);
    CHECK(b.words_at_depth(2) == 6);
    CHECK(b.words_at_depth(3) == 18);
    CHECK(b.words_at_depth(4) == 36);
  }

  TEST_CASE("seeded placements are deterministic and valid") {
    MoranSpec a1 = th::load_spec("seeded-a");
    MoranSpec a2 = th::load_spec("seeded-a");
    const auto& u1 = a1.levels[0].uniform;
    const auto& u2 = a2.levels[0].uniform;
    REQUIRE(u1.size() == u2.size());
    for (size_t i = 0; i < u1.size(); ++i) CHECK(u1[i].offset() == u2[i].offset());
    // The declared minimum gap is honored (children are 1/3 wide).
    REQUIRE(u1.size() == 2);
    Rational gap = u1[1].offset()[0] - (u1[0].offset()[0] + Rational(1) / 3);
    CHECK(gap >= Rational(1) / 12);
    ValidationReport rep = validate_spec(a1, 5);
    CHECK(rep.valid);
  }

  TEST_CASE("validation accepts the corpus") {
    for (const auto& name : th::kBundled) {
      ValidationReport rep = validate_spec(th::load_spec(name), 4);
      CHECK(rep.valid);
      CHECK(rep.violations.empty());
      CHECK(rep.words_checked > 0);
    }
    ValidationReport c = validate_spec(th::load_spec("cantor-3"), 4);
    CHECK(c.words_checked == 30);
  }

  TEST_CASE("validation reports overlap with the witness interval") {
    MoranSpec bad = parse_spec_file(th::fixture_path("overlapping-offsets"));
    ValidationReport rep = validate_spec(bad, 2);
    CHECK_FALSE(rep.valid);
    REQUIRE_FALSE(rep.violations.empty());
    const Violation& v = rep.violations.front();
    CHECK(v.kind == Violation::Kind::Overlap);
    CHECK(v.parent.key() == "");
    CHECK(v.child_a == 1);
    CHECK(v.child_b == 2);
    CHECK(v.detail.find("1/4") != std::string::npos);
    CHECK(v.detail.find("1/3") != std::string::npos);
  }

  TEST_CASE("validation reports escape from the parent") {
    MoranSpec bad = parse_spec_file(th::fixture_path("escape-overlap"));
    ValidationReport rep = validate_spec(bad, 1);
    CHECK_FALSE(rep.valid);
    bool containment = false;
    for (const auto& v : rep.violations)
      containment = containment || v.kind == Violation::Kind::Containment;
    CHECK(containment);
  }

  TEST_CASE("float-mode validation is flagged approximate") {
    ValidationReport rep = validate_spec(th::load_spec("rotated-2d"), 3);
    CHECK(rep.approximate);
    CHECK(rep.valid);
  }

  TEST_CASE("vertical structure comparison") {
    MoranSpec e = th::load_spec("ends-packed"), c = th::load_spec("cantor-3");
    CHECK(e.same_vertical_structure(c));
    CHECK_FALSE(c.same_vertical_structure(th::load_spec("dyadic-chain")));  // ratios differ
    CHECK_FALSE(c.same_vertical_structure(th::load_spec("seeded-b")));
  }
}
