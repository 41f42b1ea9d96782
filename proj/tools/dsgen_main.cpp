// Command-line pipeline: define -> sample -> annotate -> validate -> split ->
// verify. All numeric work lives in the library; this file only wires flags
// to module calls and maps errors to exit codes (0 ok, 1 usage, 2 data,
// 3 internal).

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>

#include "dsgen/compressor.hpp"
#include "dsgen/dataset_io.hpp"
#include "dsgen/report.hpp"
#include "dsgen/rng.hpp"
#include "dsgen/sampling.hpp"
#include "dsgen/testsets.hpp"
#include "dsgen/validation.hpp"

namespace {

using namespace dsgen;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::shared_ptr<const DesignSpace> load_space(const std::string& name_or_path) {
  if (name_or_path == "compressor") return compressor_space();
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) throw DataError("cannot open space file '" + name_or_path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return std::make_shared<DesignSpace>(DesignSpace::parse(text.str()));
}

Dataset load_dataset(const std::string& path, const std::string& space_arg) {
  const std::filesystem::path csv(path);
  auto side = csv;
  if (side.extension() == ".csv") side.replace_extension();
  side += ".meta.json";
  if (std::filesystem::exists(side)) return read_dataset(csv);
  if (space_arg.empty())
    throw DataError("'" + path + "' has no sidecar; pass --space to read a bare CSV");
  return read_csv_with_space(csv, load_space(space_arg));
}

struct RestrictSpec {
  std::string feature;
  double lo = 0.0;
  double hi = 0.0;
};

RestrictSpec parse_restrict(const std::string& text) {
  const auto eq = text.find('=');
  const auto colon = text.find(':', eq == std::string::npos ? 0 : eq);
  if (eq == std::string::npos || colon == std::string::npos)
    throw CLI::ValidationError("--restrict expects <feature>=<lo>:<hi>");
  RestrictSpec r;
  r.feature = text.substr(0, eq);
  try {
    r.lo = std::stod(text.substr(eq + 1, colon - eq - 1));
    r.hi = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--restrict expects numeric bounds");
  }
  return r;
}

int default_workers() {
  if (const char* env = std::getenv("DSGEN_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void report_summary(const AnnotateSummary& s) {
  std::cout << "annotated " << s.rows << " rows: " << s.working << " working, errors"
            << " choke=" << s.error_counts[1] << " surge=" << s.error_counts[2]
            << " condensation=" << s.error_counts[3] << " numerical=" << s.error_counts[4]
            << "\n";
}

// --- sample ---------------------------------------------------------------

struct SampleArgs {
  std::string space = "compressor";
  std::string method;
  std::size_t n = 1000;
  int m = 10;
  std::uint64_t seed = 0;
  std::string out;
  std::string parents;
  double sigma_frac = 0.01;
  std::string candidates;
  int k = 0;
  double blend_w = 0.0;
  int clusters = 8;
  std::vector<std::string> restrict;
};

int run_sample(const SampleArgs& a) {
  auto space = load_space(a.space);
  for (const auto& text : a.restrict) {
    const RestrictSpec r = parse_restrict(text);
    space = std::make_shared<DesignSpace>(space->with_bounds(r.feature, r.lo, r.hi));
  }
  std::cout << "effective seed: " << a.seed << "\n";

  Dataset out;
  if (a.method == "uniform") {
    out = Dataset::from_batch(sample_uniform(space, a.n, a.seed));
  } else if (a.method == "sobol") {
    out = Dataset::from_batch(sample_sobol(space, a.m, a.seed));
  } else if (a.method == "lhs") {
    out = Dataset::from_batch(sample_lhs(space, a.n, a.seed));
  } else if (a.method == "augment") {
    if (a.parents.empty()) throw CLI::ValidationError("--method augment requires --parents");
    const Dataset parents = load_dataset(a.parents, a.space);
    out = Dataset::from_batch(augment(space, parents.rows, a.n, a.sigma_frac, a.seed));
    if (out.provenance.clip_events > 0)
      std::cout << "clipped " << out.provenance.clip_events << " perturbed values to bounds\n";
  } else if (a.method == "dpp" || a.method == "cluster") {
    if (a.candidates.empty())
      throw CLI::ValidationError("--method " + a.method + " requires --candidates");
    if (a.k <= 0) throw CLI::ValidationError("--method " + a.method + " requires --k");
    Dataset cand = load_dataset(a.candidates, a.space);
    SampleBatch batch;
    batch.space = cand.space;
    batch.rows = cand.rows;
    std::vector<int> picked;
    if (a.method == "dpp") {
      KernelBlend blend;
      blend.w = a.blend_w;
      PointSet perf;
      const PointSet* perf_ptr = nullptr;
      if (blend.w > 0.0) {
        if (!cand.labeled())
          throw DataError("dpp with --blend-w > 0 requires a labeled candidate set");
        PointSet label_rows;
        label_rows.reserve(cand.size());
        for (const auto& l : cand.labels)
          label_rows.push_back({l.eta_tt, l.pr_tt});
        perf = standardize_rows(label_rows);
        perf_ptr = &perf;
      }
      picked = dpp_greedy_select(batch, a.k, blend, perf_ptr);
    } else {
      picked = cluster_select(batch, a.k, a.clusters, a.seed);
    }
    out.space = cand.space;
    for (const int i : picked) {
      out.rows.push_back(cand.rows[static_cast<std::size_t>(i)]);
      if (cand.labeled()) out.labels.push_back(cand.labels[static_cast<std::size_t>(i)]);
    }
    out.provenance.method = a.method;
    out.provenance.seed = a.seed;
    out.provenance.evaluator_id = cand.provenance.evaluator_id;
  } else {
    throw CLI::ValidationError("unknown method '" + a.method + "'");
  }

  if (out.provenance.method.empty()) out.provenance.method = a.method;
  write_dataset(out, a.out);
  std::cout << "wrote " << out.size() << " rows to " << a.out << ".csv\n";
  return kExitOk;
}

// --- annotate ---------------------------------------------------------------

struct AnnotateArgs {
  std::string input;
  std::string space;
  std::string evaluator = "compressor";
  int workers = default_workers();
  std::string out;
};

int run_annotate(const AnnotateArgs& a) {
  Dataset ds = load_dataset(a.input, a.space);
  const Evaluator* ev = find_evaluator(a.evaluator);
  if (ev == nullptr) throw DataError("unknown evaluator '" + a.evaluator + "'");
  const AnnotateSummary summary = batch_annotate(ds, *ev, a.workers);
  const AnomalyReport anomalies = postprocess_labels(ds);
  report_summary(summary);
  std::cout << "anomalies: eta=" << anomalies.eta_out_of_range
            << " pr=" << anomalies.pr_out_of_range << " non_finite=" << anomalies.non_finite
            << "\n";
  write_dataset(ds, a.out.empty() ? a.input : a.out);
  return kExitOk;
}

// --- validate ---------------------------------------------------------------

struct ValidateArgs {
  std::string input;
  std::string space;
  std::string reference;
  std::string out;
  int workers = default_workers();
};

int run_validate(const ValidateArgs& a) {
  const Dataset ds = load_dataset(a.input, a.space);
  ReportOptions opt;
  opt.workers = a.workers;
  Dataset ref;
  if (!a.reference.empty()) {
    ref = load_dataset(a.reference, a.space);
    opt.reference = &ref;
  }
  const EvalReport rep = build_report(ds, opt);

  std::filesystem::path base(a.out.empty() ? a.input : a.out);
  if (base.extension() == ".csv") base.replace_extension();
  auto json_path = base;
  json_path += ".report.json";
  auto md_path = base;
  md_path += ".report.md";
  std::ofstream(json_path, std::ios::binary) << report_to_json(rep);
  std::ofstream(md_path, std::ios::binary) << report_to_markdown(rep);
  std::cout << "report written to " << json_path.string() << " and " << md_path.string()
            << "\n";
  if (rep.has_labels)
    std::cout << "working fraction: " << format_double(rep.working_fraction) << "\n";
  return kExitOk;
}

// --- split ------------------------------------------------------------------

struct SplitArgs {
  std::string input;
  std::string space;
  std::string out;
  std::size_t uniform = 0;
  std::size_t real = 0;
  std::size_t specialized = 0;
  std::string real_designs;
  std::string grid = "50x50";
  std::string grid_axes = "Ma21,Ma41";
  std::uint64_t seed = 0;
  int workers = default_workers();
};

GridSpec parse_grid(const std::string& grid, const std::string& axes) {
  GridSpec spec;
  spec.axes.clear();
  std::vector<std::string> names;
  std::stringstream sa(axes);
  std::string tok;
  while (std::getline(sa, tok, ',')) names.push_back(tok);
  std::vector<int> res;
  std::stringstream sg(grid);
  while (std::getline(sg, tok, 'x')) res.push_back(std::atoi(tok.c_str()));
  if (names.empty() || names.size() != res.size())
    throw CLI::ValidationError("--grid and --grid-axes must list the same number of axes");
  for (std::size_t i = 0; i < names.size(); ++i) spec.axes.push_back({names[i], res[i]});
  return spec;
}

int run_split(const SplitArgs& a) {
  Dataset ds = load_dataset(a.input, a.space);
  if (!ds.labeled()) throw DataError("split requires a labeled dataset");
  std::cout << "effective seed: " << a.seed << "\n";

  const std::string out_base = a.out.empty() ? a.input : a.out;
  std::filesystem::path base(out_base);
  if (base.extension() == ".csv") base.replace_extension();

  SplitPlan plan;
  if (a.uniform > 0)
    plan.tests.push_back({"uniform", build_uniform_testset(ds, a.uniform, mix_seed(a.seed, 1))});
  if (a.real > 0)
    plan.tests.push_back({"real", build_real_testset(ds, a.real, mix_seed(a.seed, 2))});

  if (a.specialized > 0) {
    if (a.real_designs.empty())
      throw CLI::ValidationError("--specialized requires --real-designs");
    const Dataset designs = load_dataset(a.real_designs, a.space);
    const Evaluator* ev = find_evaluator(ds.provenance.evaluator_id.empty()
                                             ? "compressor"
                                             : ds.provenance.evaluator_id);
    if (ev == nullptr) throw DataError("dataset's evaluator is not registered");
    SpecializedTestset spec = build_specialized_testset(
        designs.rows, *ev, parse_grid(a.grid, a.grid_axes), a.specialized,
        mix_seed(a.seed, 3), a.workers);
    Dataset spec_ds;
    spec_ds.space = spec.grid.space;
    spec_ds.provenance = spec.grid.provenance;
    spec_ds.provenance.evaluator_id = ev->id();
    for (const std::size_t i : spec.selected) {
      spec_ds.rows.push_back(spec.grid.rows[i]);
      spec_ds.labels.push_back(spec.grid.labels[i]);
    }
    auto spec_path = base;
    spec_path += ".specialized";
    write_dataset(spec_ds, spec_path);
    std::cout << "specialized test set: " << spec_ds.size() << " rows ("
              << spec.grid.size() << " grid points swept) -> " << spec_path.string()
              << ".csv\n";
  }

  const std::size_t train_rows = apply_split(ds, plan);
  if (train_rows == 0) std::cout << "warning: split leaves no train rows\n";
  write_dataset(ds, base);

  for (const auto& [name, indices] : plan.tests) {
    Dataset sub;
    sub.space = ds.space;
    sub.provenance = ds.provenance;
    for (const std::size_t i : indices) {
      sub.rows.push_back(ds.rows[i]);
      sub.labels.push_back(ds.labels[i]);
    }
    auto path = base;
    path += "." + name;
    write_dataset(sub, path);
    std::cout << "test set '" << name << "': " << sub.size() << " rows -> " << path.string()
              << ".csv\n";
  }
  std::cout << "train rows: " << train_rows << "\n";
  return kExitOk;
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string input;
  std::string space;
  std::vector<std::string> extra_tests;
  std::string sizes = "100,1000,10000";
  int repeats = 10;
  int importance_repeats = 5;
  std::uint64_t seed = 0;
  int knn_k = 15;
  int workers = default_workers();
  std::string out;
};

int run_verify(const VerifyArgs& a) {
  const Dataset ds = load_dataset(a.input, a.space);
  if (!ds.labeled()) throw DataError("verify requires a labeled dataset");
  if (ds.split.size() != ds.size())
    throw DataError("verify requires split tags (run 'dsgen split' first)");
  std::cout << "effective seed: " << a.seed << "\n";

  PointSet pool_x;
  std::vector<int> pool_y;
  std::map<std::string, std::pair<PointSet, std::vector<int>>> tests;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto norm = ds.space->normalize(ds.rows[i]);
    const int y = ds.labels[i].working ? 1 : 0;
    if (ds.split[i] == "train") {
      pool_x.push_back(norm);
      pool_y.push_back(y);
    } else if (ds.split[i].rfind("test:", 0) == 0) {
      auto& t = tests[ds.split[i].substr(5)];
      t.first.push_back(norm);
      t.second.push_back(y);
    }
  }
  for (const auto& spec : a.extra_tests) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--test expects <name>=<path.csv>");
    const std::string name = spec.substr(0, eq);
    const Dataset ext = load_dataset(spec.substr(eq + 1), a.space);
    if (!ext.labeled()) throw DataError("extra test set '" + name + "' has no labels");
    auto& t = tests[name];
    for (std::size_t i = 0; i < ext.size(); ++i) {
      t.first.push_back(ext.space->normalize(ext.rows[i]));
      t.second.push_back(ext.labels[i].working ? 1 : 0);
    }
  }
  if (tests.empty()) throw DataError("verify: no test sets (split tags or --test)");
  if (pool_x.empty()) throw DataError("verify: no train rows");

  // Each row carries exactly one split tag, so train and test index sets are
  // disjoint; recounted and reported so downstream runs can assert on it.
  std::size_t test_rows = 0;
  for (const auto& tag : ds.split)
    if (tag.rfind("test:", 0) == 0) ++test_rows;
  if (pool_x.size() + test_rows != ds.size())
    throw DataError("verify: split tags do not partition the dataset");
  std::cout << "train/test index overlap: 0 (" << pool_x.size() << " train, " << test_rows
            << " test rows partition " << ds.size() << ")\n";

  std::vector<std::size_t> sizes;
  {
    std::stringstream ss(a.sizes);
    std::string tok;
    while (std::getline(ss, tok, ',')) sizes.push_back(std::stoull(tok));
  }

  std::vector<TestSetView> views;
  for (const auto& [name, t] : tests) views.push_back({name, &t.first, &t.second});

  const auto curve = learning_curve(pool_x, pool_y, views, sizes, a.repeats, a.seed,
                                    a.knn_k, a.workers);

  std::filesystem::path base(a.out.empty() ? a.input : a.out);
  if (base.extension() == ".csv") base.replace_extension();
  auto curve_path = base;
  curve_path += ".learning_curve.csv";
  {
    std::ofstream f(curve_path, std::ios::binary);
    f << "size,test_set,mean_f1,std_f1\n";
    for (const auto& p : curve)
      f << p.train_size << ',' << p.test_set << ',' << format_double(p.mean_f1) << ','
        << format_double(p.std_f1) << '\n';
  }
  for (const auto& p : curve)
    std::cout << "size " << p.train_size << " " << p.test_set
              << ": F1 = " << format_double(p.mean_f1) << " +- " << format_double(p.std_f1)
              << "\n";

  // Permutation importance of a model fitted on a subsample of the largest
  // requested size, scored on every test set.
  const std::size_t fit_size = std::min(pool_x.size(), *std::max_element(sizes.begin(), sizes.end()));
  Rng rng(mix_seed(a.seed, 0xfea7));
  std::vector<std::size_t> order(pool_x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < fit_size; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(order.size()) - 1));
    std::swap(order[i], order[j]);
  }
  PointSet fit_x;
  std::vector<int> fit_y;
  for (std::size_t i = 0; i < fit_size; ++i) {
    fit_x.push_back(pool_x[order[i]]);
    fit_y.push_back(pool_y[order[i]]);
  }
  const KnnModel model = knn_fit(std::move(fit_x), std::move(fit_y), a.knn_k);

  auto imp_path = base;
  imp_path += ".importance.csv";
  std::ofstream imp(imp_path, std::ios::binary);
  imp << "test_set,feature,importance\n";
  for (const auto& [name, t] : tests) {
    const auto importance =
        permutation_importance(model, t.first, t.second, a.importance_repeats,
                               mix_seed(a.seed, 0x1395), a.workers);
    for (std::size_t f = 0; f < importance.size(); ++f)
      imp << name << ',' << ds.space->feature(static_cast<int>(f)).name << ','
          << format_double(importance[f]) << '\n';
  }
  std::cout << "wrote " << curve_path.string() << " and " << imp_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic design-dataset toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "generate design vectors");
  sample_cmd->add_option("--space", sample_args.space, "space name or definition file");
  sample_cmd->add_option("--method", sample_args.method,
                         "uniform|sobol|lhs|augment|dpp|cluster")->required();
  sample_cmd->add_option("--n", sample_args.n, "sample count");
  sample_cmd->add_option("--m", sample_args.m, "sobol: 2^m points");
  sample_cmd->add_option("--seed", sample_args.seed, "random seed");
  sample_cmd->add_option("--out", sample_args.out, "output base path")->required();
  sample_cmd->add_option("--parents", sample_args.parents, "augment: parent designs CSV");
  sample_cmd->add_option("--sigma-frac", sample_args.sigma_frac,
                         "augment: noise std as a fraction of each range");
  sample_cmd->add_option("--candidates", sample_args.candidates,
                         "dpp/cluster: candidate dataset CSV");
  sample_cmd->add_option("--k", sample_args.k, "dpp/cluster: subset size");
  sample_cmd->add_option("--blend-w", sample_args.blend_w,
                         "dpp: performance-kernel weight in [0,1]");
  sample_cmd->add_option("--clusters", sample_args.clusters, "cluster: cluster count");
  sample_cmd->add_option("--restrict", sample_args.restrict,
                         "restrict a feature: <name>=<lo>:<hi> (repeatable)");

  AnnotateArgs annotate_args;
  auto* annotate_cmd = app.add_subcommand("annotate", "label designs with an evaluator");
  annotate_cmd->add_option("--input", annotate_args.input, "dataset CSV")->required();
  annotate_cmd->add_option("--space", annotate_args.space, "space for bare CSV input");
  annotate_cmd->add_option("--evaluator", annotate_args.evaluator, "evaluator id");
  annotate_cmd->add_option("--workers", annotate_args.workers, "worker threads")
      ->envname("DSGEN_WORKERS");
  annotate_cmd->add_option("--out", annotate_args.out, "output base (default: input)");

  ValidateArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "characterize a dataset");
  validate_cmd->add_option("--input", validate_args.input, "dataset CSV")->required();
  validate_cmd->add_option("--space", validate_args.space, "space for bare CSV input");
  validate_cmd->add_option("--reference", validate_args.reference,
                           "reference designs for the realism block");
  validate_cmd->add_option("--out", validate_args.out, "report base (default: input)");
  validate_cmd->add_option("--workers", validate_args.workers, "worker threads")
      ->envname("DSGEN_WORKERS");

  SplitArgs split_args;
  auto* split_cmd = app.add_subcommand("split", "build test sets and tag the train split");
  split_cmd->add_option("--input", split_args.input, "labeled dataset CSV")->required();
  split_cmd->add_option("--space", split_args.space, "space for bare CSV input");
  split_cmd->add_option("--out", split_args.out, "output base (default: input)");
  split_cmd->add_option("--uniform", split_args.uniform, "uniform test set: rows per class");
  split_cmd->add_option("--real", split_args.real, "real test set: rows per class");
  split_cmd->add_option("--specialized", split_args.specialized,
                        "specialized test set: rows per class");
  split_cmd->add_option("--real-designs", split_args.real_designs,
                        "designs swept for the specialized grid");
  split_cmd->add_option("--grid", split_args.grid, "grid resolution, e.g. 50x50");
  split_cmd->add_option("--grid-axes", split_args.grid_axes, "swept features");
  split_cmd->add_option("--seed", split_args.seed, "random seed");
  split_cmd->add_option("--workers", split_args.workers, "worker threads")
      ->envname("DSGEN_WORKERS");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "learning curves and feature importance");
  verify_cmd->add_option("--input", verify_args.input, "split dataset CSV")->required();
  verify_cmd->add_option("--space", verify_args.space, "space for bare CSV input");
  verify_cmd->add_option("--test", verify_args.extra_tests,
                         "extra test set: <name>=<path.csv> (repeatable)");
  verify_cmd->add_option("--sizes", verify_args.sizes, "train sizes, comma separated");
  verify_cmd->add_option("--repeats", verify_args.repeats, "independent models per size");
  verify_cmd->add_option("--importance-repeats", verify_args.importance_repeats,
                         "shuffles per feature");
  verify_cmd->add_option("--seed", verify_args.seed, "random seed");
  verify_cmd->add_option("--knn-k", verify_args.knn_k, "k-NN neighbor count");
  verify_cmd->add_option("--workers", verify_args.workers, "worker threads")
      ->envname("DSGEN_WORKERS");
  verify_cmd->add_option("--out", verify_args.out, "output base (default: input)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sample_cmd->parsed()) return run_sample(sample_args);
    if (annotate_cmd->parsed()) return run_annotate(annotate_args);
    if (validate_cmd->parsed()) return run_validate(validate_args);
    if (split_cmd->parsed()) return run_split(split_args);
    if (verify_cmd->parsed()) return run_verify(verify_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
