#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dsgen/compressor.hpp"
#include "dsgen/dataset_io.hpp"
#include "dsgen/sampling.hpp"
#include "dsgen/testsets.hpp"

using namespace dsgen;

namespace {

std::filesystem::path temp_base(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "dsgen_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("format_double round trips") {
  for (const double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 0.0, 12.0, 127.5, 1.2e-5}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(12.0) == "12");
}

TEST_CASE("dataset round trip through CSV and sidecar") {
  auto space = compressor_space();
  Dataset ds = Dataset::from_batch(sample_uniform(space, 50, 2025));
  batch_annotate(ds, *find_evaluator("compressor"), 2);

  SplitPlan plan;
  plan.tests.push_back({"uniform", {1, 2, 3}});
  apply_split(ds, plan);

  const auto base = temp_base("roundtrip");
  write_dataset(ds, base);
  const Dataset back = read_dataset(base.string() + ".csv");

  REQUIRE(back.size() == ds.size());
  CHECK(back.space->name() == "compressor");
  CHECK(back.space->dimension() == 23);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j = 0; j < ds.rows[i].size(); ++j)
      CHECK(back.rows[i][j] == ds.rows[i][j]);  // exact: shortest round-trip format
    CHECK(back.labels[i].working == ds.labels[i].working);
    CHECK(back.labels[i].eta_tt == ds.labels[i].eta_tt);
    CHECK(back.labels[i].pr_tt == ds.labels[i].pr_tt);
    CHECK(back.labels[i].error == ds.labels[i].error);
  }
  CHECK(back.split == ds.split);
  CHECK(back.provenance.method == "uniform");
  CHECK(back.provenance.seed == 2025);
  CHECK(back.provenance.evaluator_id == "compressor");
}

TEST_CASE("augmentation provenance round trips") {
  auto space = compressor_space();
  const SampleBatch parents = sample_uniform(space, 3, 1);
  Dataset ds = Dataset::from_batch(augment(space, parents.rows, 9, 0.01, 2));
  const auto base = temp_base("parents");
  write_dataset(ds, base);
  const Dataset back = read_dataset(base.string() + ".csv");
  CHECK(back.parents == ds.parents);
  CHECK(back.provenance.method == "augment");
}

TEST_CASE("CSV bytes are identical across writes") {
  auto space = compressor_space();
  Dataset ds = Dataset::from_batch(sample_uniform(space, 30, 7));
  const auto a = temp_base("bytes_a");
  const auto b = temp_base("bytes_b");
  write_dataset(ds, a);
  write_dataset(ds, b);
  CHECK(slurp(a.string() + ".csv") == slurp(b.string() + ".csv"));
}

TEST_CASE("categorical values are written as category names") {
  auto space = compressor_space();
  Dataset ds;
  ds.space = space;
  ds.rows.push_back(space->denormalize(DesignVector(23, 0.0)));
  const auto base = temp_base("categories");
  write_dataset(ds, base);
  const std::string csv = slurp(base.string() + ".csv");
  CHECK(csv.find("air") != std::string::npos);

  Dataset back = read_dataset(base.string() + ".csv");
  CHECK(back.rows[0][static_cast<std::size_t>(space->feature_index("fluid"))] == 0.0);
}

TEST_CASE("bare CSV needs a space; header mismatches are reported") {
  const auto base = temp_base("bare");
  {
    std::ofstream f(base.string() + ".csv", std::ios::binary);
    f << "x\n0.5\n";
  }
  CHECK_THROWS_AS(read_dataset(base.string() + ".csv"), DataError);  // no sidecar

  auto tiny = std::make_shared<DesignSpace>(
      DesignSpace::parse("feature x\n  kind continuous\n  lower 0\n  upper 1\n"));
  const Dataset ds = read_csv_with_space(base.string() + ".csv", tiny);
  CHECK(ds.size() == 1);
  CHECK(ds.rows[0][0] == 0.5);
  CHECK_FALSE(ds.labeled());

  auto other = std::make_shared<DesignSpace>(
      DesignSpace::parse("feature y\n  kind continuous\n  lower 0\n  upper 1\n"));
  CHECK_THROWS_AS(read_csv_with_space(base.string() + ".csv", other), ParseError);
}

TEST_CASE("malformed rows are rejected with line numbers") {
  const auto base = temp_base("malformed");
  {
    std::ofstream f(base.string() + ".csv", std::ios::binary);
    f << "x\n0.5\nnot_a_number\n";
  }
  auto tiny = std::make_shared<DesignSpace>(
      DesignSpace::parse("feature x\n  kind continuous\n  lower 0\n  upper 1\n"));
  try {
    read_csv_with_space(base.string() + ".csv", tiny);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}
