#include "dsgen/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dsgen/compressor.hpp"

namespace dsgen {

std::string_view to_string(LabelError e) {
  switch (e) {
    case LabelError::none: return "";
    case LabelError::choke: return "choke";
    case LabelError::surge: return "surge";
    case LabelError::condensation: return "condensation";
    case LabelError::numerical: return "numerical";
  }
  return "";
}

std::optional<LabelError> label_error_from_string(std::string_view s) {
  if (s.empty()) return LabelError::none;
  if (s == "choke") return LabelError::choke;
  if (s == "surge") return LabelError::surge;
  if (s == "condensation") return LabelError::condensation;
  if (s == "numerical") return LabelError::numerical;
  return std::nullopt;
}

Dataset Dataset::from_batch(SampleBatch batch) {
  Dataset ds;
  ds.space = std::move(batch.space);
  ds.rows = std::move(batch.rows);
  ds.parents = std::move(batch.parent_ids);
  ds.provenance.method = std::move(batch.method);
  ds.provenance.seed = batch.seed;
  ds.provenance.clip_events = batch.clip_events;
  return ds;
}

const Evaluator* find_evaluator(std::string_view id) {
  static const CompressorEvaluator compressor;
  if (id == compressor.id()) return &compressor;
  return nullptr;
}

std::vector<std::string> evaluator_ids() { return {"compressor"}; }

namespace {

void check_compatible(const Dataset& ds, const Evaluator& ev) {
  if (!ds.space) throw DataError("batch_annotate: dataset has no design space");
  const DesignSpace& es = ev.space();
  if (ds.space->name() != es.name() || ds.space->dimension() != es.dimension())
    throw DataError("evaluator '" + ev.id() + "' is defined on space '" + es.name() +
                    "', dataset uses '" + ds.space->name() + "'");
  for (int i = 0; i < es.dimension(); ++i)
    if (ds.space->feature(i).name != es.feature(i).name)
      throw DataError("evaluator/space mismatch at feature " + std::to_string(i));
}

}  // namespace

AnnotateSummary batch_annotate(Dataset& dataset, const Evaluator& evaluator, int workers) {
  check_compatible(dataset, evaluator);
  if (workers < 1) workers = 1;

  const std::size_t n = dataset.size();
  dataset.labels.assign(n, Labels{});
  dataset.provenance.evaluator_id = evaluator.id();

  auto annotate_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        dataset.labels[i] = evaluator.evaluate(dataset.rows[i]);
      } catch (const std::exception&) {
        dataset.labels[i] = Labels{false, 0.0, 1.0, LabelError::numerical};
      }
    }
  };

  if (workers == 1 || n < 2) {
    annotate_range(0, n);
  } else {
    const auto t = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> threads;
    threads.reserve(t);
    const std::size_t chunk = (n + t - 1) / t;
    for (std::size_t w = 0; w < t; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(annotate_range, begin, end);
    }
    for (auto& th : threads) th.join();
  }

  AnnotateSummary summary;
  summary.rows = n;
  for (const Labels& l : dataset.labels) {
    if (l.working) ++summary.working;
    ++summary.error_counts[static_cast<std::size_t>(l.error)];
  }
  return summary;
}

AnomalyReport postprocess_labels(Dataset& dataset) {
  if (!dataset.labeled()) throw DataError("postprocess_labels: dataset has no labels");
  AnomalyReport report;
  for (Labels& l : dataset.labels) {
    bool flagged = false;
    if (!std::isfinite(l.eta_tt) || !std::isfinite(l.pr_tt)) {
      ++report.non_finite;
      flagged = true;
    } else {
      if (l.eta_tt < 0.0 || l.eta_tt > 1.0) {
        ++report.eta_out_of_range;
        flagged = true;
      }
      if (l.pr_tt < 1.0) {
        ++report.pr_out_of_range;
        flagged = true;
      }
    }
    if (flagged) l = Labels{false, 0.0, 1.0, LabelError::numerical};
  }
  return report;
}

}  // namespace dsgen
