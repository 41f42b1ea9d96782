// Python bindings for the core operations: spaces, samplers, the compressor
// evaluator, metrics, validation/verification helpers, test sets, and
// dataset I/O.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dsgen/compressor.hpp"
#include "dsgen/dataset_io.hpp"
#include "dsgen/report.hpp"
#include "dsgen/sampling.hpp"
#include "dsgen/sobol.hpp"
#include "dsgen/testsets.hpp"
#include "dsgen/validation.hpp"

namespace py = pybind11;
using namespace dsgen;

namespace {

const Evaluator& evaluator_or_throw(const std::string& id) {
  const Evaluator* ev = find_evaluator(id);
  if (ev == nullptr) throw DataError("unknown evaluator '" + id + "'");
  return *ev;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "synthetic design-dataset toolkit (C++ core)";
  m.attr("__version__") = DSGEN_VERSION;

  py::register_exception<ParseError>(m, "SpaceParseError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  // --- design space ---------------------------------------------------------
  py::class_<BoundViolation>(m, "BoundViolation")
      .def_readonly("feature", &BoundViolation::feature)
      .def_readonly("lower", &BoundViolation::lower)
      .def_readonly("upper", &BoundViolation::upper)
      .def_readonly("value", &BoundViolation::value)
      .def_readonly("reason", &BoundViolation::reason)
      .def("__repr__", [](const BoundViolation& v) {
        return "BoundViolation(" + v.feature + ": " + format_double(v.value) + " not in [" +
               format_double(v.lower) + ", " + format_double(v.upper) + "])";
      });

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("valid", &ValidationReport::valid)
      .def_readonly("violations", &ValidationReport::violations);

  py::class_<DesignSpace, std::shared_ptr<DesignSpace>>(m, "DesignSpace")
      .def_static("parse",
                  [](const std::string& text) {
                    return std::make_shared<DesignSpace>(DesignSpace::parse(text));
                  })
      .def_property_readonly("name", &DesignSpace::name)
      .def_property_readonly("dimension", &DesignSpace::dimension)
      .def_property_readonly("feature_names",
                             [](const DesignSpace& s) {
                               std::vector<std::string> names;
                               for (const auto& f : s.features()) names.push_back(f.name);
                               return names;
                             })
      .def("feature_index", &DesignSpace::feature_index)
      .def("resolve_bounds",
           [](const DesignSpace& s, const std::vector<double>& partial, int index) {
             return s.resolve_bounds(partial, index);
           })
      .def("validate", &DesignSpace::validate)
      .def("normalize", &DesignSpace::normalize)
      .def("denormalize", &DesignSpace::denormalize)
      .def("with_bounds",
           [](const DesignSpace& s, const std::string& feature, double lo, double hi) {
             return std::make_shared<DesignSpace>(s.with_bounds(feature, lo, hi));
           })
      .def_property_readonly("document", &DesignSpace::document);

  m.def("compressor_space", [] {
    return std::const_pointer_cast<DesignSpace>(compressor_space());
  });

  // --- sampling ---------------------------------------------------------------
  py::class_<SampleBatch>(m, "SampleBatch")
      .def_readonly("rows", &SampleBatch::rows)
      .def_readonly("seed", &SampleBatch::seed)
      .def_readonly("method", &SampleBatch::method)
      .def_readonly("parent_ids", &SampleBatch::parent_ids)
      .def_readonly("clip_events", &SampleBatch::clip_events)
      .def("__len__", &SampleBatch::size);

  m.def(
      "sample_uniform",
      [](std::shared_ptr<DesignSpace> space, std::size_t n, std::uint64_t seed) {
        return sample_uniform(std::move(space), n, seed);
      },
      py::arg("space"), py::arg("n"), py::arg("seed") = 0);
  m.def(
      "sample_sobol",
      [](std::shared_ptr<DesignSpace> space, int m_exp, std::uint64_t seed) {
        return sample_sobol(std::move(space), m_exp, seed);
      },
      py::arg("space"), py::arg("m"), py::arg("seed") = 0);
  m.def(
      "sample_lhs",
      [](std::shared_ptr<DesignSpace> space, std::size_t n, std::uint64_t seed) {
        return sample_lhs(std::move(space), n, seed);
      },
      py::arg("space"), py::arg("n"), py::arg("seed") = 0);
  m.def(
      "augment",
      [](std::shared_ptr<DesignSpace> space, const std::vector<DesignVector>& parents,
         std::size_t n, double sigma_frac, std::uint64_t seed) {
        return augment(std::move(space), parents, n, sigma_frac, seed);
      },
      py::arg("space"), py::arg("parents"), py::arg("n"), py::arg("sigma_frac") = 0.01,
      py::arg("seed") = 0);
  m.def("sobol_points", &sobol_points, py::arg("dim"), py::arg("m"), py::arg("seed") = 0,
        py::arg("scramble") = true);

  m.def(
      "dpp_select",
      [](const SampleBatch& candidates, int k, double w,
         const std::optional<PointSet>& performance) {
        KernelBlend blend;
        blend.w = w;
        if (w > 0.0) {
          if (!performance) throw DataError("w > 0 requires performance rows");
          const PointSet standardized = standardize_rows(*performance);
          return dpp_greedy_select(candidates, k, blend, &standardized);
        }
        return dpp_greedy_select(candidates, k, blend);
      },
      py::arg("candidates"), py::arg("k"), py::arg("w") = 0.0,
      py::arg("performance") = std::nullopt);
  m.def("cluster_select", &cluster_select, py::arg("candidates"), py::arg("k"),
        py::arg("n_clusters"), py::arg("seed") = 0);

  // --- annotation ---------------------------------------------------------------
  py::enum_<LabelError>(m, "LabelErrorKind")
      .value("none", LabelError::none)
      .value("choke", LabelError::choke)
      .value("surge", LabelError::surge)
      .value("condensation", LabelError::condensation)
      .value("numerical", LabelError::numerical);

  py::class_<Labels>(m, "Labels")
      .def_readonly("working", &Labels::working)
      .def_readonly("eta_tt", &Labels::eta_tt)
      .def_readonly("pr_tt", &Labels::pr_tt)
      .def_readonly("error", &Labels::error)
      .def("__repr__", [](const Labels& l) {
        return "Labels(working=" + std::string(l.working ? "True" : "False") +
               ", eta_tt=" + format_double(l.eta_tt) + ", pr_tt=" + format_double(l.pr_tt) +
               (l.error == LabelError::none ? std::string(")")
                                            : ", error=" + std::string(to_string(l.error)) + ")");
      });

  py::class_<Dataset>(m, "Dataset")
      .def_static("from_batch", [](const SampleBatch& b) { return Dataset::from_batch(b); })
      .def_readwrite("rows", &Dataset::rows)
      .def_readwrite("labels", &Dataset::labels)
      .def_readwrite("split", &Dataset::split)
      .def_readwrite("parents", &Dataset::parents)
      .def_property_readonly("space",
                             [](const Dataset& d) {
                               return std::const_pointer_cast<DesignSpace>(d.space);
                             })
      .def_property_readonly("labeled", &Dataset::labeled)
      .def("__len__", &Dataset::size);

  m.def(
      "batch_annotate",
      [](Dataset& ds, const std::string& evaluator, int workers) {
        const auto summary = batch_annotate(ds, evaluator_or_throw(evaluator), workers);
        py::dict out;
        out["rows"] = summary.rows;
        out["working"] = summary.working;
        out["choke"] = summary.error_counts[1];
        out["surge"] = summary.error_counts[2];
        out["condensation"] = summary.error_counts[3];
        out["numerical"] = summary.error_counts[4];
        return out;
      },
      py::arg("dataset"), py::arg("evaluator") = "compressor", py::arg("workers") = 1);
  m.def("postprocess_labels", [](Dataset& ds) {
    const auto rep = postprocess_labels(ds);
    py::dict out;
    out["eta_out_of_range"] = rep.eta_out_of_range;
    out["pr_out_of_range"] = rep.pr_out_of_range;
    out["non_finite"] = rep.non_finite;
    return out;
  });
  m.def("compressor_evaluate", &compressor_evaluate);
  m.def("evaluator_ids", &evaluator_ids);

  // --- metrics ---------------------------------------------------------------
  m.def(
      "distance",
      [](const std::vector<double>& a, const std::vector<double>& b, const std::string& kind) {
        return distance(a, b,
                        kind == "manhattan" ? DistanceKind::manhattan : DistanceKind::euclidean);
      },
      py::arg("a"), py::arg("b"), py::arg("kind") = "euclidean");
  m.def("rbf_similarity",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return rbf_similarity(a, b);
        });
  m.def("cosine_similarity",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return cosine_similarity(a, b);
        });
  m.def(
      "set_distance",
      [](const PointSet& a, const PointSet& b, const std::string& kind) {
        return set_distance(
            a, b, kind == "chamfer" ? SetDistanceKind::chamfer : SetDistanceKind::hausdorff);
      },
      py::arg("a"), py::arg("b"), py::arg("kind") = "hausdorff");
  m.def(
      "kl_divergence_hist",
      [](const PointSet& p, const PointSet& q, int bins,
         const std::vector<std::pair<double, double>>& range) {
        std::vector<HistRange> r;
        for (const auto& [lo, hi] : range) r.push_back({lo, hi});
        return kl_divergence_hist(p, q, bins, r);
      },
      py::arg("p"), py::arg("q"), py::arg("bins"), py::arg("range"));
  m.def(
      "shannon_entropy",
      [](const PointSet& samples, int bins, const std::vector<std::pair<double, double>>& range) {
        std::vector<HistRange> r;
        for (const auto& [lo, hi] : range) r.push_back({lo, hi});
        return shannon_entropy(samples, bins, r);
      },
      py::arg("samples"), py::arg("bins"), py::arg("range"));
  m.def("hull_and_box", [](const PointSet& pts) {
    const auto r = hull_and_box(pts);
    py::dict out;
    out["hull_area"] = r.hull_area;
    out["box_area"] = r.box_area;
    out["circle_area"] = r.circle_area;
    out["degenerate"] = r.degenerate;
    return out;
  });
  m.def("nn_distance_stats", [](const PointSet& pts) {
    const auto s = nn_distance_stats(pts);
    return py::make_tuple(s.mean, s.stddev, s.min, s.max);
  });

  // --- validation ---------------------------------------------------------------
  m.def("descriptive_stats", [](const std::vector<double>& col) {
    const auto s = descriptive_stats(col);
    py::dict out;
    out["mean"] = s.mean;
    out["variance"] = s.variance;
    out["median"] = s.median;
    out["iqr"] = s.iqr;
    out["min"] = s.min;
    out["max"] = s.max;
    return out;
  });
  m.def(
      "correlation",
      [](const PointSet& columns, const std::string& kind) {
        return correlation(columns, kind == "spearman" ? CorrelationKind::spearman
                                                       : CorrelationKind::pearson);
      },
      py::arg("columns"), py::arg("kind") = "pearson");
  m.def(
      "pca_fit_transform",
      [](const PointSet& rows, int k) {
        const PCAModel model = pca_fit(rows, k);
        py::dict out;
        out["embedding"] = pca_transform(model, rows);
        out["explained_variance_ratio"] = model.explained_variance_ratio;
        out["components"] = model.components;
        return out;
      },
      py::arg("rows"), py::arg("k") = 2);
  m.def(
      "kmeans",
      [](const PointSet& rows, int k, std::uint64_t seed) {
        const auto r = kmeans(rows, k, seed);
        return py::make_tuple(r.assignment, r.centroids, r.inertia);
      },
      py::arg("rows"), py::arg("n_clusters"), py::arg("seed") = 0);

  py::class_<KnnModel>(m, "KnnModel");
  m.def("knn_fit", &knn_fit, py::arg("train_x"), py::arg("train_y"),
        py::arg("k_neighbors") = 15);
  m.def("knn_predict", &knn_predict, py::arg("model"), py::arg("rows"), py::arg("workers") = 1);
  m.def("f1_score", [](const std::vector<int>& pred, const std::vector<int>& truth) {
    return f1_score(pred, truth);
  });
  m.def("permutation_importance", &permutation_importance, py::arg("model"), py::arg("test_x"),
        py::arg("test_y"), py::arg("repeats") = 5, py::arg("seed") = 0, py::arg("workers") = 1);
  m.def(
      "learning_curve",
      [](const PointSet& pool_x, const std::vector<int>& pool_y,
         const std::map<std::string, std::pair<PointSet, std::vector<int>>>& tests,
         const std::vector<std::size_t>& sizes, int repeats, std::uint64_t seed,
         int k_neighbors, int workers) {
        std::vector<TestSetView> views;
        views.reserve(tests.size());
        for (const auto& [name, xy] : tests) views.push_back({name, &xy.first, &xy.second});
        const auto rows = learning_curve(pool_x, pool_y, views, sizes, repeats, seed,
                                         k_neighbors, workers);
        py::list out;
        for (const auto& r : rows)
          out.append(py::make_tuple(r.train_size, r.test_set, r.mean_f1, r.std_f1));
        return out;
      },
      py::arg("pool_x"), py::arg("pool_y"), py::arg("tests"), py::arg("sizes"),
      py::arg("repeats") = 10, py::arg("seed") = 0, py::arg("k_neighbors") = 15,
      py::arg("workers") = 1);

  // --- test sets ---------------------------------------------------------------
  m.def("build_uniform_testset", &build_uniform_testset, py::arg("dataset"),
        py::arg("n_per_class"), py::arg("seed") = 0);
  m.def("build_real_testset", &build_real_testset, py::arg("dataset"), py::arg("n_per_class"),
        py::arg("seed") = 0);
  m.def(
      "build_specialized_testset",
      [](const std::vector<DesignVector>& designs, const std::string& evaluator,
         const std::vector<std::pair<std::string, int>>& axes, std::size_t n_per_class,
         std::uint64_t seed, int workers) {
        GridSpec grid;
        if (!axes.empty()) {
          grid.axes.clear();
          for (const auto& [name, res] : axes) grid.axes.push_back({name, res});
        }
        auto result = build_specialized_testset(designs, evaluator_or_throw(evaluator), grid,
                                                n_per_class, seed, workers);
        py::dict out;
        out["grid"] = std::move(result.grid);
        out["selected"] = result.selected;
        std::vector<bool> marked(result.near_boundary.begin(), result.near_boundary.end());
        out["near_boundary"] = marked;
        return out;
      },
      py::arg("designs"), py::arg("evaluator") = "compressor",
      py::arg("axes") = std::vector<std::pair<std::string, int>>{}, py::arg("n_per_class") = 500,
      py::arg("seed") = 0, py::arg("workers") = 1);
  m.def(
      "apply_split",
      [](Dataset& ds, const std::map<std::string, std::vector<std::size_t>>& tests) {
        SplitPlan plan;
        for (const auto& [name, idx] : tests) plan.tests.push_back({name, idx});
        return apply_split(ds, plan);
      },
      py::arg("dataset"), py::arg("tests"));

  // --- io and reports ------------------------------------------------------------
  m.def("write_dataset", &write_dataset, py::arg("dataset"), py::arg("base"));
  m.def("read_dataset", &read_dataset, py::arg("csv_path"));
  m.def(
      "read_csv_with_space",
      [](const std::filesystem::path& p, std::shared_ptr<DesignSpace> space) {
        return read_csv_with_space(p, std::move(space));
      },
      py::arg("csv_path"), py::arg("space"));
  m.def(
      "build_report_json",
      [](const Dataset& ds, const Dataset* reference, int workers) {
        ReportOptions opt;
        opt.reference = reference;
        opt.workers = workers;
        return report_to_json(build_report(ds, opt));
      },
      py::arg("dataset"), py::arg("reference") = nullptr, py::arg("workers") = 1);
}
