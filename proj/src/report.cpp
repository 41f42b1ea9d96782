#include "dsgen/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dsgen/dataset_io.hpp"
#include "dsgen/rng.hpp"
#include "dsgen/sampling.hpp"

namespace dsgen {

namespace {

using ordered_json = nlohmann::ordered_json;

PointSet normalized_rows(const Dataset& ds) {
  PointSet out;
  out.reserve(ds.size());
  for (const auto& row : ds.rows) out.push_back(ds.space->normalize(row));
  return out;
}

double json_safe(double v) { return std::isfinite(v) ? v : 0.0; }

ordered_json matrix_to_json(const std::vector<std::vector<double>>& m) {
  ordered_json out = ordered_json::array();
  for (const auto& row : m) {
    ordered_json r = ordered_json::array();
    for (const double v : row) {
      if (std::isnan(v)) r.push_back(nullptr);  // undefined (zero-variance column)
      else r.push_back(v);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

EvalReport build_report(const Dataset& dataset, const ReportOptions& options) {
  if (!dataset.space) throw DataError("build_report: dataset has no design space");
  if (dataset.size() == 0) throw DataError("build_report: dataset is empty");

  EvalReport rep;
  rep.rows = dataset.size();
  rep.space_name = dataset.space->name();
  rep.has_labels = dataset.labeled();
  if (!rep.has_labels)
    rep.notices.push_back("no labels: label-dependent blocks skipped");

  const auto& features = dataset.space->features();
  const std::size_t d = features.size();

  // Column stats over raw feature values (plus label columns when present).
  std::vector<double> col(dataset.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < dataset.size(); ++i) col[i] = dataset.rows[i][j];
    rep.column_names.push_back(features[j].name);
    rep.column_stats.push_back(descriptive_stats(col, options.histogram_bins));
  }
  if (rep.has_labels) {
    for (const char* name : {"eta_tt", "pr_tt"}) {
      for (std::size_t i = 0; i < dataset.size(); ++i)
        col[i] = std::string_view(name) == "eta_tt" ? dataset.labels[i].eta_tt
                                                    : dataset.labels[i].pr_tt;
      rep.column_names.push_back(name);
      rep.column_stats.push_back(descriptive_stats(col, options.histogram_bins));
    }
  }

  // Correlations over numeric (non-categorical) features plus labels.
  PointSet corr_cols;
  for (std::size_t j = 0; j < d; ++j) {
    if (features[j].kind == FeatureKind::categorical) continue;
    rep.numeric_columns.push_back(features[j].name);
    std::vector<double> c(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) c[i] = dataset.rows[i][j];
    corr_cols.push_back(std::move(c));
  }
  if (rep.has_labels) {
    std::vector<double> eta(dataset.size()), pr(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      eta[i] = dataset.labels[i].eta_tt;
      pr[i] = dataset.labels[i].pr_tt;
    }
    rep.numeric_columns.push_back("eta_tt");
    corr_cols.push_back(std::move(eta));
    rep.numeric_columns.push_back("pr_tt");
    corr_cols.push_back(std::move(pr));
  }
  if (dataset.size() >= 2) {
    rep.pearson = correlation(corr_cols, CorrelationKind::pearson);
    rep.spearman = correlation(corr_cols, CorrelationKind::spearman);
  } else {
    rep.notices.push_back("fewer than 2 rows: correlations skipped");
  }

  // PCA embedding of the normalized design space; diversity lives there.
  const PointSet normalized = normalized_rows(dataset);
  PointSet embedding;
  if (dataset.size() >= 2) {
    const PCAModel pca = pca_fit(normalized, 2);
    rep.explained_variance_ratio = pca.explained_variance_ratio;
    if (!pca.dropped_columns.empty())
      rep.notices.push_back(std::to_string(pca.dropped_columns.size()) +
                            " zero-variance columns dropped from the PCA");
    embedding = pca_transform(pca, normalized);

    rep.hull = hull_and_box(embedding);
    if (dataset.size() >= 2) rep.nn = nn_distance_stats(embedding);

    std::array<HistRange, 2> range;
    for (int a = 0; a < 2; ++a) {
      double lo = embedding[0][static_cast<std::size_t>(a)], hi = lo;
      for (const auto& p : embedding) {
        lo = std::min(lo, p[static_cast<std::size_t>(a)]);
        hi = std::max(hi, p[static_cast<std::size_t>(a)]);
      }
      range[static_cast<std::size_t>(a)] = {lo, hi};
    }
    rep.entropy = shannon_entropy(embedding, options.entropy_bins, range);

    // DPP diversity score: log-det of a greedy reference subset under the
    // RBF kernel; capped candidate count keeps the kernel tractable.
    PointSet kernel_rows;
    if (normalized.size() > options.kernel_cap) {
      Rng rng(0x00d1ce);
      std::vector<std::size_t> idx(normalized.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      for (std::size_t i = 0; i < options.kernel_cap; ++i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(
            static_cast<std::int64_t>(i), static_cast<std::int64_t>(idx.size()) - 1));
        std::swap(idx[i], idx[j]);
        kernel_rows.push_back(normalized[idx[i]]);
      }
      rep.notices.push_back("diversity kernel computed on a " +
                            std::to_string(options.kernel_cap) + "-row subsample");
    } else {
      kernel_rows = normalized;
    }
    const SimilarityMatrix kernel = rbf_kernel(kernel_rows);
    rep.dpp_subset_size =
        std::min<int>(options.dpp_subset_size, static_cast<int>(kernel_rows.size()));
    const auto subset = dpp_greedy_map(kernel, rep.dpp_subset_size);
    rep.dpp_logdet = dpp_log_det(subset, kernel);
  } else {
    rep.notices.push_back("fewer than 2 rows: PCA/diversity skipped");
  }

  // Realism vs a reference set on the same space.
  if (options.reference != nullptr) {
    const Dataset& ref = *options.reference;
    if (!ref.space || ref.space->name() != dataset.space->name())
      throw DataError("build_report: reference dataset uses a different space");
    if (ref.size() == 0) throw DataError("build_report: reference dataset is empty");
    const PointSet ref_normalized = normalized_rows(ref);

    rep.hausdorff = set_distance(normalized, ref_normalized, SetDistanceKind::hausdorff);
    rep.chamfer = set_distance(normalized, ref_normalized, SetDistanceKind::chamfer);

    if (dataset.size() >= 2) {
      const PCAModel pca = pca_fit(normalized, 2);
      const PointSet emb_p = pca_transform(pca, normalized);
      const PointSet emb_q = pca_transform(pca, ref_normalized);
      std::array<HistRange, 2> range;
      for (int a = 0; a < 2; ++a) {
        double lo = emb_p[0][static_cast<std::size_t>(a)], hi = lo;
        for (const auto* set : {&emb_p, &emb_q})
          for (const auto& p : *set) {
            lo = std::min(lo, p[static_cast<std::size_t>(a)]);
            hi = std::max(hi, p[static_cast<std::size_t>(a)]);
          }
        range[static_cast<std::size_t>(a)] = {lo, hi};
      }
      rep.kl = kl_divergence_hist(emb_p, emb_q, options.histogram_bins, range);
    }
    rep.has_realism = true;
  }

  if (rep.has_labels) {
    std::size_t working = 0;
    for (const auto& l : dataset.labels) {
      if (l.working) ++working;
      ++rep.error_counts[static_cast<std::size_t>(l.error)];
    }
    rep.working_fraction = static_cast<double>(working) / static_cast<double>(dataset.size());

    std::vector<int> cls(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) cls[i] = dataset.labels[i].working ? 1 : 0;
    if (working > 0 && working < dataset.size() && dataset.size() >= 3) {
      for (std::size_t j = 0; j < corr_cols.size(); ++j) {
        if (rep.numeric_columns[j] == "eta_tt") break;
        rep.feature_class_anova.push_back(json_safe(anova_f(corr_cols[j], cls)));
      }
    }

    // Working-share map over the two operating Mach numbers, when present.
    const int i21 = dataset.space->feature_index("Ma21");
    const int i41 = dataset.space->feature_index("Ma41");
    if (i21 >= 0 && i41 >= 0) {
      const auto& f21 = dataset.space->feature(i21);
      const auto& f41 = dataset.space->feature(i41);
      if (f21.lower.is_constant() && f21.upper.is_constant() && f41.lower.is_constant() &&
          f41.upper.is_constant()) {
        const int bins = options.share_map_bins;
        const double lo21 = f21.lower.eval({}), hi21 = f21.upper.eval({});
        const double lo41 = f41.lower.eval({}), hi41 = f41.upper.eval({});
        std::vector<std::size_t> total(static_cast<std::size_t>(bins) * bins, 0);
        std::vector<std::size_t> work(static_cast<std::size_t>(bins) * bins, 0);
        for (std::size_t i = 0; i < dataset.size(); ++i) {
          auto bin = [&](double v, double lo, double hi) {
            int b = static_cast<int>((v - lo) / (hi - lo) * bins);
            return static_cast<std::size_t>(std::clamp(b, 0, bins - 1));
          };
          const std::size_t b21 = bin(dataset.rows[i][static_cast<std::size_t>(i21)], lo21, hi21);
          const std::size_t b41 = bin(dataset.rows[i][static_cast<std::size_t>(i41)], lo41, hi41);
          const std::size_t cell = b21 * static_cast<std::size_t>(bins) + b41;
          ++total[cell];
          if (dataset.labels[i].working) ++work[cell];
        }
        rep.share_map.resize(total.size());
        for (std::size_t c = 0; c < total.size(); ++c)
          rep.share_map[c] = total[c] > 0
                                 ? static_cast<double>(work[c]) / static_cast<double>(total[c])
                                 : -1.0;
        rep.share_map_bins = bins;
        rep.has_share_map = true;
      }
    }

    // Baseline classifier scores per test split.
    if (dataset.split.size() == dataset.size()) {
      PointSet train_x;
      std::vector<int> train_y;
      std::vector<std::string> test_names;
      for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset.split[i] == "train") {
          train_x.push_back(normalized[i]);
          train_y.push_back(cls[i]);
        } else if (dataset.split[i].rfind("test:", 0) == 0 &&
                   std::find(test_names.begin(), test_names.end(), dataset.split[i]) ==
                       test_names.end()) {
          test_names.push_back(dataset.split[i]);
        }
      }
      std::sort(test_names.begin(), test_names.end());
      if (!train_x.empty() && !test_names.empty()) {
        const KnnModel model = knn_fit(std::move(train_x), std::move(train_y), options.knn_k);
        for (const auto& name : test_names) {
          PointSet test_x;
          std::vector<int> test_y;
          for (std::size_t i = 0; i < dataset.size(); ++i)
            if (dataset.split[i] == name) {
              test_x.push_back(normalized[i]);
              test_y.push_back(cls[i]);
            }
          const auto pred = knn_predict(model, test_x, options.workers);
          rep.test_f1.push_back({name.substr(5), f1_score(pred, test_y)});
        }
      }
    }
  }

  return rep;
}

std::string report_to_json(const EvalReport& rep) {
  ordered_json j;
  j["format"] = "dsgen.report/1";
  j["space"] = rep.space_name;
  j["rows"] = rep.rows;

  ordered_json stats = ordered_json::array();
  for (std::size_t i = 0; i < rep.column_names.size(); ++i) {
    const ColumnStats& s = rep.column_stats[i];
    ordered_json e;
    e["column"] = rep.column_names[i];
    e["mean"] = json_safe(s.mean);
    e["variance"] = json_safe(s.variance);
    e["median"] = json_safe(s.median);
    e["iqr"] = json_safe(s.iqr);
    e["min"] = json_safe(s.min);
    e["max"] = json_safe(s.max);
    e["histogram"] = s.histogram;
    stats.push_back(std::move(e));
  }
  j["columns"] = std::move(stats);

  j["correlation"] = {{"columns", rep.numeric_columns},
                      {"pearson", matrix_to_json(rep.pearson)},
                      {"spearman", matrix_to_json(rep.spearman)}};
  j["pca"] = {{"explained_variance_ratio", rep.explained_variance_ratio}};
  j["diversity"] = {{"hull_area", rep.hull.hull_area},
                    {"bounding_box_area", rep.hull.box_area},
                    {"bounding_circle_area", rep.hull.circle_area},
                    {"hull_degenerate", rep.hull.degenerate},
                    {"nn_mean", rep.nn.mean},
                    {"nn_std", rep.nn.stddev},
                    {"nn_min", rep.nn.min},
                    {"nn_max", rep.nn.max},
                    {"entropy", rep.entropy},
                    {"dpp_logdet", std::isfinite(rep.dpp_logdet) ? ordered_json(rep.dpp_logdet)
                                                                 : ordered_json(nullptr)},
                    {"dpp_subset_size", rep.dpp_subset_size}};
  if (rep.has_realism)
    j["realism"] = {{"kl", rep.kl}, {"hausdorff", rep.hausdorff}, {"chamfer", rep.chamfer}};
  if (rep.has_labels) {
    j["labels"] = {{"working_fraction", rep.working_fraction},
                   {"errors",
                    {{"choke", rep.error_counts[1]},
                     {"surge", rep.error_counts[2]},
                     {"condensation", rep.error_counts[3]},
                     {"numerical", rep.error_counts[4]}}}};
    if (!rep.feature_class_anova.empty()) j["labels"]["feature_class_anova"] = rep.feature_class_anova;
    if (rep.has_share_map) {
      // Row-major bins: Ma21 outer, Ma41 inner; -1 marks empty bins.
      j["labels"]["working_share_map"] = {{"bins", rep.share_map_bins},
                                          {"axes", {"Ma21", "Ma41"}},
                                          {"share", rep.share_map}};
    }
  }
  if (!rep.test_f1.empty()) {
    ordered_json scores = ordered_json::object();
    for (const auto& [name, f1] : rep.test_f1) scores[name] = f1;
    j["classifier"] = {{"model", "knn"}, {"f1", std::move(scores)}};
  }
  j["notices"] = rep.notices;
  return j.dump(2) + "\n";
}

std::string report_to_markdown(const EvalReport& rep) {
  std::ostringstream md;
  md << "# Dataset report\n\n";
  md << "- space: `" << rep.space_name << "`\n";
  md << "- rows: " << rep.rows << "\n";
  if (rep.has_labels) {
    md << "- working fraction: " << format_double(rep.working_fraction) << "\n";
    md << "- errors: choke " << rep.error_counts[1] << ", surge " << rep.error_counts[2]
       << ", condensation " << rep.error_counts[3] << ", numerical " << rep.error_counts[4]
       << "\n";
  }
  md << "\n## Column statistics\n\n";
  md << "| column | mean | variance | median | IQR | min | max |\n";
  md << "|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < rep.column_names.size(); ++i) {
    const ColumnStats& s = rep.column_stats[i];
    md << "| " << rep.column_names[i] << " | " << format_double(json_safe(s.mean)) << " | "
       << format_double(json_safe(s.variance)) << " | " << format_double(json_safe(s.median))
       << " | " << format_double(json_safe(s.iqr)) << " | " << format_double(json_safe(s.min))
       << " | " << format_double(json_safe(s.max)) << " |\n";
  }
  md << "\n## Diversity (2-D PCA embedding)\n\n";
  if (!rep.explained_variance_ratio.empty()) {
    md << "- explained variance ratio:";
    for (const double v : rep.explained_variance_ratio) md << ' ' << format_double(v);
    md << "\n";
  }
  md << "- convex hull area: " << format_double(rep.hull.hull_area)
     << (rep.hull.degenerate ? " (degenerate)" : "") << "\n";
  md << "- bounding box area: " << format_double(rep.hull.box_area) << "\n";
  md << "- bounding circle area: " << format_double(rep.hull.circle_area) << "\n";
  md << "- nearest-neighbor distance: mean " << format_double(rep.nn.mean) << ", std "
     << format_double(rep.nn.stddev) << ", min " << format_double(rep.nn.min) << ", max "
     << format_double(rep.nn.max) << "\n";
  md << "- entropy: " << format_double(rep.entropy) << "\n";
  md << "- DPP log-det (subset of " << rep.dpp_subset_size << "): ";
  if (std::isfinite(rep.dpp_logdet)) md << format_double(rep.dpp_logdet) << "\n";
  else md << "-inf\n";
  if (rep.has_realism) {
    md << "\n## Realism vs reference\n\n";
    md << "- KL divergence (2-D embedding): " << format_double(rep.kl) << "\n";
    md << "- Hausdorff distance: " << format_double(rep.hausdorff) << "\n";
    md << "- Chamfer distance: " << format_double(rep.chamfer) << "\n";
  }
  if (!rep.test_f1.empty()) {
    md << "\n## Classifier (k-NN baseline)\n\n";
    md << "| test set | F1 |\n|---|---|\n";
    for (const auto& [name, f1] : rep.test_f1)
      md << "| " << name << " | " << format_double(f1) << " |\n";
  }
  if (!rep.notices.empty()) {
    md << "\n## Notices\n\n";
    for (const auto& n : rep.notices) md << "- " << n << "\n";
  }
  return md.str();
}

}  // namespace dsgen
