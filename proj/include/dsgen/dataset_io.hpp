#pragma once

#include <filesystem>
#include <string>

#include "dsgen/annotate.hpp"

namespace dsgen {

// Shortest decimal representation that round-trips; locale independent.
std::string format_double(double v);

// Writes <base>.csv plus the <base>.meta.json sidecar. The CSV holds the
// feature columns (categorical values as category names) and, when labeled,
// the columns working,eta_tt,pr_tt,error. Split tags, parent ids, the space
// definition and provenance live in the sidecar. Output bytes depend only on
// the dataset content (the sidecar's created_at timestamp aside).
void write_dataset(const Dataset& dataset, const std::filesystem::path& base);

// Reads a dataset written by write_dataset; the sidecar must be present.
Dataset read_dataset(const std::filesystem::path& csv_path);

// Reads a bare CSV (no sidecar) against a known space; labels are picked up
// when the label columns are present.
Dataset read_csv_with_space(const std::filesystem::path& csv_path,
                            std::shared_ptr<const DesignSpace> space);

}  // namespace dsgen
