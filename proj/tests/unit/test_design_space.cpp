#include <doctest.h>

#include <cmath>

#include "dsgen/design_space.hpp"
#include "dsgen/sampling.hpp"

using namespace dsgen;

namespace {

const char* kTinySpace = R"(
space tiny
feature x
  kind continuous
  lower 0
  upper 1
)";

const char* kDependentSpace = R"(
space dep
feature a
  kind continuous
  lower 0
  upper 10
feature b
  kind continuous
  lower 0.2*a
  upper 0.5*a + 1
)";

}  // namespace

TEST_CASE("bundled compressor space matches the published table") {
  auto space = compressor_space();
  CHECK(space->name() == "compressor");
  CHECK(space->dimension() == 23);

  const int r4 = space->feature_index("r4");
  REQUIRE(r4 >= 0);
  const auto [lo, hi] = space->resolve_bounds({}, r4);
  CHECK(lo == doctest::Approx(5.0));
  CHECK(hi == doctest::Approx(250.0));
  CHECK(space->feature(r4).unit == "mm");

  const int fluid = space->feature_index("fluid");
  REQUIRE(fluid >= 0);
  CHECK(space->feature(fluid).kind == FeatureKind::categorical);
  CHECK(space->feature(fluid).categories ==
        std::vector<std::string>{"air", "ammonia", "isobutane", "pentane", "propane",
                                 "R1234yf", "R134a", "R245fa"});

  const int pr1 = space->feature_index("Pr1");
  REQUIRE(pr1 >= 0);
  CHECK(space->feature(pr1).distribution == DistributionKind::power);
  CHECK(space->feature(pr1).power_alpha == doctest::Approx(5.0));

  // Fixed rows are modeled as fixed-distribution features.
  const int ra = space->feature_index("Ra");
  REQUIRE(ra >= 0);
  CHECK(space->feature(ra).distribution == DistributionKind::fixed);
  const auto [ra_lo, ra_hi] = space->resolve_bounds({}, ra);
  CHECK(ra_lo == doctest::Approx(1.2e-5));
  CHECK(ra_lo == ra_hi);

  // Dependent-bound graph is acyclic by construction: every reference points
  // to an earlier feature.
  for (int i = 0; i < space->dimension(); ++i) {
    const FeatureSpec& f = space->feature(i);
    CHECK(f.lower.max_feature() < i);
    CHECK(f.upper.max_feature() < i);
  }
}

TEST_CASE("minimal one-feature space") {
  const DesignSpace space = DesignSpace::parse(kTinySpace);
  CHECK(space.dimension() == 1);
  CHECK(space.feature(0).kind == FeatureKind::continuous);
}

TEST_CASE("forward references are rejected") {
  const char* doc = R"(
feature r2s
  kind continuous
  lower 1.2*r2h
  upper 10
feature r2h
  kind continuous
  lower 0
  upper 5
)";
  CHECK_THROWS_AS(DesignSpace::parse(doc), ParseError);
  try {
    DesignSpace::parse(doc);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("r2h") != std::string::npos);
    CHECK(e.line() == 4);
  }
}

TEST_CASE("parse errors carry positions and reasons") {
  CHECK_THROWS_AS(DesignSpace::parse("feature x\n  kind continuous\n  lower 0\n"),
                  ParseError);  // unbounded
  CHECK_THROWS_AS(DesignSpace::parse("feature x\n  kind continuous\n  lower 0\n  upper 1\n"
                                     "  distribution gaussian\n"),
                  ParseError);  // unknown distribution
  CHECK_THROWS_AS(DesignSpace::parse("feature x\n  kind continuous\n  lower 0\n  upper 1\n"
                                     "feature x\n  kind continuous\n  lower 0\n  upper 1\n"),
                  ParseError);  // duplicate name
  CHECK_THROWS_AS(DesignSpace::parse("feature x\n  kind continuous\n  lower 0 $\n  upper 1\n"),
                  ParseError);  // bad expression token
}

TEST_CASE("resolve_bounds on dependent features") {
  auto space = compressor_space();
  DesignVector partial(static_cast<std::size_t>(space->dimension()), 0.0);
  partial[0] = 100.0;  // r4 [mm]

  const int r2h = space->feature_index("r2h");
  const auto [lo, hi] = space->resolve_bounds(std::span(partial.data(), r2h), r2h);
  CHECK(lo == doctest::Approx(10.0));
  CHECK(hi == doctest::Approx(50.0));

  const int b4 = space->feature_index("b4");
  const int b5 = space->feature_index("b5");
  partial[static_cast<std::size_t>(b4)] = 3.0;
  const auto [b5_lo, b5_hi] = space->resolve_bounds(std::span(partial.data(), b5), b5);
  CHECK(b5_lo == doctest::Approx(1.5));
  CHECK(b5_hi == doctest::Approx(4.5));

  // Independent bounds pass through regardless of the partial vector.
  const int beta4 = space->feature_index("beta4");
  const auto [a_lo, a_hi] = space->resolve_bounds(std::span(partial.data(), beta4), beta4);
  CHECK(a_lo == doctest::Approx(-70.0));
  CHECK(a_hi == doctest::Approx(-35.0));
}

TEST_CASE("splitter-blade rule resolves conditionally") {
  auto space = compressor_space();
  const int zb = space->feature_index("Zb");
  const int zs = space->feature_index("Zs");
  DesignVector partial(static_cast<std::size_t>(zs), 0.0);

  partial[static_cast<std::size_t>(zb)] = 12.0;
  auto [lo_hi, hi_hi] = space->resolve_bounds(partial, zs);
  CHECK(lo_hi == 0.0);
  CHECK(hi_hi == 0.0);

  partial[static_cast<std::size_t>(zb)] = 10.0;
  auto [lo_lo, hi_lo] = space->resolve_bounds(partial, zs);
  CHECK(lo_lo == 10.0);
  CHECK(hi_lo == 10.0);
}

TEST_CASE("validate reports bound violations") {
  auto space = compressor_space();
  const DesignVector mid = space->denormalize(DesignVector(23, 0.5));
  CHECK(space->validate(mid).valid);

  SUBCASE("hub radius below its dependent lower bound") {
    DesignVector x = mid;
    x[static_cast<std::size_t>(space->feature_index("r4"))] = 100.0;
    x[static_cast<std::size_t>(space->feature_index("r2h"))] = 5.0;
    const auto report = space->validate(x);
    CHECK_FALSE(report.valid);
    bool found = false;
    for (const auto& v : report.violations)
      if (v.feature == "r2h") {
        found = true;
        CHECK(v.lower == doctest::Approx(10.0));
        CHECK(v.value == doctest::Approx(5.0));
      }
    CHECK(found);
  }

  SUBCASE("splitter count must drop to zero on dense wheels") {
    DesignVector x = mid;
    x[static_cast<std::size_t>(space->feature_index("Zb"))] = 12.0;
    x[static_cast<std::size_t>(space->feature_index("Zs"))] = 12.0;
    const auto report = space->validate(x);
    CHECK_FALSE(report.valid);
    CHECK(report.violations.size() == 1);
    CHECK(report.violations[0].feature == "Zs");
  }

  SUBCASE("integrality is checked for integer features") {
    DesignVector x = mid;
    x[static_cast<std::size_t>(space->feature_index("Zb"))] = 7.5;
    const auto report = space->validate(x);
    CHECK_FALSE(report.valid);
  }
}

TEST_CASE("normalize and denormalize") {
  const DesignSpace space = DesignSpace::parse(kDependentSpace);

  SUBCASE("lower bounds map to zeros, upper bounds to ones") {
    const DesignVector lo = space.denormalize({0.0, 0.0});
    CHECK(space.normalize(lo) == DesignVector{0.0, 0.0});
    const DesignVector hi = space.denormalize({1.0, 1.0});
    CHECK(space.normalize(hi)[0] == doctest::Approx(1.0));
    CHECK(space.normalize(hi)[1] == doctest::Approx(1.0));
  }

  SUBCASE("midpoint maps to one half") {
    auto comp = compressor_space();
    DesignVector mid = comp->denormalize(DesignVector(23, 0.5));
    CHECK(mid[0] == doctest::Approx(127.5));
    CHECK(comp->normalize(mid)[0] == doctest::Approx(0.5));
  }

  SUBCASE("round trip is exact for integers and categoricals, 1e-9 for continuous") {
    auto comp = compressor_space();
    const SampleBatch batch = sample_uniform(comp, 200, 99);
    for (const auto& x : batch.rows) {
      const DesignVector back = comp->denormalize(comp->normalize(x));
      for (int i = 0; i < comp->dimension(); ++i) {
        const auto& f = comp->feature(i);
        if (f.kind == FeatureKind::continuous) {
          const double scale = std::max(1.0, std::abs(x[static_cast<std::size_t>(i)]));
          CHECK(std::abs(back[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)]) <=
                1e-9 * scale);
        } else {
          CHECK(back[static_cast<std::size_t>(i)] == x[static_cast<std::size_t>(i)]);
        }
      }
    }
  }

  SUBCASE("normalization preserves order on continuous coordinates") {
    const DesignVector a = {4.0, 1.0};
    DesignVector b = a;
    b[1] = 2.0;
    CHECK(space.normalize(a)[1] < space.normalize(b)[1]);
  }

  SUBCASE("degenerate non-fixed bounds normalize to one half") {
    const char* doc = R"(
feature a
  kind continuous
  lower 1
  upper 1
)";
    const DesignSpace degen = DesignSpace::parse(doc);
    CHECK(degen.normalize({1.0})[0] == 0.5);
    CHECK(degen.denormalize({0.5})[0] == 1.0);
  }
}

TEST_CASE("with_bounds restricts constant bounds only") {
  auto space = compressor_space();
  const DesignSpace boxed = space->with_bounds("Ma21", 0.15, 0.25);
  const int i = boxed.feature_index("Ma21");
  const auto [lo, hi] = boxed.resolve_bounds({}, i);
  CHECK(lo == doctest::Approx(0.15));
  CHECK(hi == doctest::Approx(0.25));
  CHECK_THROWS_AS(space->with_bounds("r2h", 10.0, 20.0), DataError);  // dependent
  CHECK_THROWS_AS(space->with_bounds("Ma21", 0.0, 0.25), DataError);  // outside
  CHECK_THROWS_AS(space->with_bounds("nope", 0.0, 1.0), DataError);
}
