#include <doctest.h>

#include <cmath>

#include "dsgen/compressor.hpp"
#include "dsgen/report.hpp"
#include "dsgen/sampling.hpp"
#include "dsgen/testsets.hpp"

using namespace dsgen;

TEST_CASE("report blocks follow the dataset's state") {
  auto space = compressor_space();
  Dataset ds = Dataset::from_batch(sample_uniform(space, 400, 77));

  SUBCASE("unlabeled dataset skips label blocks with a notice") {
    const EvalReport rep = build_report(ds);
    CHECK_FALSE(rep.has_labels);
    CHECK_FALSE(rep.has_realism);
    CHECK(rep.test_f1.empty());
    bool noticed = false;
    for (const auto& n : rep.notices)
      if (n.find("label") != std::string::npos) noticed = true;
    CHECK(noticed);
    CHECK(rep.column_stats.size() == 23);
  }

  SUBCASE("labeled dataset carries class balance and the share map") {
    batch_annotate(ds, *find_evaluator("compressor"), 2);
    const EvalReport rep = build_report(ds);
    CHECK(rep.has_labels);
    CHECK(rep.working_fraction > 0.0);
    CHECK(rep.working_fraction < 1.0);
    CHECK(rep.has_share_map);
    CHECK(rep.share_map.size() == 400);  // 20 x 20 bins
    for (const double share : rep.share_map)
      CHECK((share == -1.0 || (share >= 0.0 && share <= 1.0)));
    CHECK(rep.column_stats.size() == 25);  // features + eta_tt + pr_tt

    // Invariants on the serialized pieces.
    double ratio_sum = 0.0;
    for (const double r : rep.explained_variance_ratio) {
      CHECK(r >= 0.0);
      ratio_sum += r;
    }
    CHECK(ratio_sum <= 1.0 + 1e-9);
    for (const auto& row : rep.pearson)
      for (const double v : row)
        if (!std::isnan(v)) {
          CHECK(v >= -1.0);
          CHECK(v <= 1.0);
        }
    const std::string json = report_to_json(rep);
    CHECK(json.find("working_share_map") != std::string::npos);
    const std::string md = report_to_markdown(rep);
    CHECK(md.find("working fraction") != std::string::npos);
  }

  SUBCASE("realism block against the dataset itself is exactly zero") {
    batch_annotate(ds, *find_evaluator("compressor"), 2);
    ReportOptions opt;
    opt.reference = &ds;
    const EvalReport rep = build_report(ds, opt);
    CHECK(rep.has_realism);
    CHECK(rep.kl == 0.0);
    CHECK(rep.hausdorff == 0.0);
    CHECK(rep.chamfer == 0.0);
  }

  SUBCASE("classifier scores appear once split tags exist") {
    batch_annotate(ds, *find_evaluator("compressor"), 2);
    SplitPlan plan;
    plan.tests.push_back({"uniform", build_uniform_testset(ds, 10, 5)});
    apply_split(ds, plan);
    const EvalReport rep = build_report(ds);
    REQUIRE(rep.test_f1.size() == 1);
    CHECK(rep.test_f1[0].first == "uniform");
    CHECK(rep.test_f1[0].second >= 0.0);
    CHECK(rep.test_f1[0].second <= 1.0);
  }

  SUBCASE("reference on a different space is rejected") {
    Dataset other;
    other.space = std::make_shared<DesignSpace>(
        DesignSpace::parse("feature x\n  kind continuous\n  lower 0\n  upper 1\n"));
    other.rows.push_back({0.5});
    ReportOptions opt;
    opt.reference = &other;
    CHECK_THROWS_AS(build_report(ds, opt), DataError);
  }
}

TEST_CASE("degenerate dependent bounds are surfaced as errors") {
  const char* doc = R"(
feature a
  kind continuous
  lower 0
  upper 10
feature b
  kind continuous
  lower a
  upper 5
)";
  const DesignSpace space = DesignSpace::parse(doc);
  const std::vector<double> partial = {8.0};  // lower 8 > upper 5
  CHECK_THROWS_AS(space.resolve_bounds(partial, 1), DataError);
  // validate reports instead of throwing
  const auto report = space.validate({8.0, 5.0});
  CHECK_FALSE(report.valid);
  CHECK(report.violations[0].reason == "empty resolved interval");
}
