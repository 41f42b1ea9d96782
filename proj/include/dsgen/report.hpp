#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsgen/annotate.hpp"
#include "dsgen/metrics.hpp"
#include "dsgen/validation.hpp"

namespace dsgen {

struct ReportOptions {
  const Dataset* reference = nullptr;  // enables the realism block
  int histogram_bins = 10;
  int entropy_bins = 10;       // per dimension, on the 2-D embedding
  int share_map_bins = 20;     // working-share map over (Ma21, Ma41)
  int dpp_subset_size = 20;
  std::size_t kernel_cap = 2000;  // subsample cap for the diversity kernel
  int knn_k = 15;
  int workers = 1;
};

// Statistical characterization plus diversity/realism measures and, when the
// dataset carries split tags, classifier scores per test set.
struct EvalReport {
  std::size_t rows = 0;
  std::string space_name;

  std::vector<std::string> column_names;  // features, then eta_tt/pr_tt when labeled
  std::vector<ColumnStats> column_stats;

  std::vector<std::string> numeric_columns;  // rows/cols of the correlation matrices
  std::vector<std::vector<double>> pearson;
  std::vector<std::vector<double>> spearman;

  std::vector<double> explained_variance_ratio;  // 2-component PCA

  // Diversity, on the 2-D PCA embedding of the normalized features.
  HullBoxResult hull;
  NnStats nn;
  double entropy = 0.0;
  double dpp_logdet = 0.0;
  int dpp_subset_size = 0;

  // Realism vs the reference set (same space); KL on the shared 2-D
  // embedding, Hausdorff/Chamfer in the normalized design space.
  bool has_realism = false;
  double kl = 0.0;
  double hausdorff = 0.0;
  double chamfer = 0.0;

  bool has_labels = false;
  double working_fraction = 0.0;
  std::array<std::size_t, 5> error_counts{};
  std::vector<double> feature_class_anova;  // per numeric feature, labeled only

  // Working-share map over (Ma21, Ma41); -1 marks empty bins.
  bool has_share_map = false;
  int share_map_bins = 0;
  std::vector<double> share_map;  // row-major, Ma21 outer

  // F1 of the k-NN baseline per test split (requires split tags + labels).
  std::vector<std::pair<std::string, double>> test_f1;

  std::vector<std::string> notices;
};

EvalReport build_report(const Dataset& dataset, const ReportOptions& options = {});

std::string report_to_json(const EvalReport& report);      // pretty-printed
std::string report_to_markdown(const EvalReport& report);

}  // namespace dsgen
