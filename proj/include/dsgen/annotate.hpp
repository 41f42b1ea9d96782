#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsgen/design_space.hpp"
#include "dsgen/sampling.hpp"

namespace dsgen {

enum class LabelError { none, choke, surge, condensation, numerical };

std::string_view to_string(LabelError e);
std::optional<LabelError> label_error_from_string(std::string_view s);

// Per-design annotation record. Non-working designs carry the sentinel pair
// (eta_tt, pr_tt) = (0, 1).
struct Labels {
  bool working = false;
  double eta_tt = 0.0;
  double pr_tt = 1.0;
  LabelError error = LabelError::none;
};

struct Provenance {
  std::string method;
  std::uint64_t seed = 0;
  std::string evaluator_id;
  std::string toolkit_version = DSGEN_VERSION;
  std::string created_at;  // informational only; not part of reproducibility
  int clip_events = 0;
};

// Feature table plus optional label columns, split tags and per-row parent
// provenance.
struct Dataset {
  std::shared_ptr<const DesignSpace> space;
  std::vector<DesignVector> rows;
  std::vector<Labels> labels;           // empty, or one per row
  std::vector<std::string> split;       // empty, or per row: "", "train", "test:<name>"
  std::vector<std::int64_t> parents;    // empty, or per row (-1 = no parent)
  Provenance provenance;

  std::size_t size() const { return rows.size(); }
  bool labeled() const { return labels.size() == rows.size(); }

  static Dataset from_batch(SampleBatch batch);
};

// Pure labeling function over a specific design space.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual const std::string& id() const = 0;
  virtual const DesignSpace& space() const = 0;
  virtual Labels evaluate(const DesignVector& x) const = 0;
};

// Registered evaluators, selectable by id ("compressor" is built in).
const Evaluator* find_evaluator(std::string_view id);
std::vector<std::string> evaluator_ids();

struct AnnotateSummary {
  std::size_t rows = 0;
  std::size_t working = 0;
  // indexed by LabelError (none, choke, surge, condensation, numerical)
  std::array<std::size_t, 5> error_counts{};
};

// Fills the label columns. Rows are distributed over `workers` threads and
// written back by index, so the result does not depend on the worker count.
// A throwing evaluator poisons only its own row (error = numerical).
AnnotateSummary batch_annotate(Dataset& dataset, const Evaluator& evaluator, int workers = 1);

struct AnomalyReport {
  std::size_t eta_out_of_range = 0;
  std::size_t pr_out_of_range = 0;
  std::size_t non_finite = 0;
  std::size_t total() const { return eta_out_of_range + pr_out_of_range + non_finite; }
};

// Flags rows with eta_tt outside [0,1], pr_tt < 1 or non-finite label values;
// flagged rows are forced to the non-working sentinel with error = numerical.
AnomalyReport postprocess_labels(Dataset& dataset);

}  // namespace dsgen
