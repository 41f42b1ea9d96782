#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsgen/errors.hpp"

namespace dsgen {

// A design vector stores one value per feature: continuous and integer
// features as their numeric value, categorical features as a 0-based index.
using DesignVector = std::vector<double>;

enum class FeatureKind { continuous, integer, categorical };
enum class DistributionKind { uniform, power, fixed };

// Linear combination of previously declared features plus a constant,
// e.g. "0.1*r4" or "beta2 - 20".
struct LinearExpr {
  struct Term {
    double coef;
    int feature;
  };
  double constant = 0.0;
  std::vector<Term> terms;

  double eval(std::span<const double> values) const;
  int max_feature() const;
  bool is_constant() const { return terms.empty(); }
};

// Bound expression: a linear expression, optionally gated by a single
// threshold comparison ("Zb if Zb <= 11 else 0"). The conditional form is
// what the splitter-blade rule needs; anything richer is rejected at parse
// time.
struct BoundExpr {
  enum class Cmp { le, lt, ge, gt };
  struct Condition {
    int feature;
    Cmp op;
    double threshold;
  };

  LinearExpr value;
  std::optional<Condition> condition;
  LinearExpr alternative;

  double eval(std::span<const double> values) const;
  int max_feature() const;
  bool is_constant() const;
};

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::continuous;
  BoundExpr lower;
  BoundExpr upper;
  std::string unit;
  DistributionKind distribution = DistributionKind::uniform;
  double power_alpha = 0.0;               // power distribution only
  std::vector<std::string> categories;    // categorical only

  bool numeric() const { return kind != FeatureKind::categorical; }
};

struct BoundViolation {
  std::string feature;
  double lower = 0.0;
  double upper = 0.0;
  double value = 0.0;
  std::string reason;
};

struct ValidationReport {
  bool valid = true;
  std::vector<BoundViolation> violations;
};

// Ordered feature set with independent or dependent interval bounds.
// Immutable after parsing; all operations are pure.
class DesignSpace {
 public:
  // Parses a space definition document (see assets/compressor.space for the
  // format). Throws ParseError with a line number on malformed input.
  static DesignSpace parse(std::string_view document);

  const std::string& name() const { return name_; }
  int dimension() const { return static_cast<int>(features_.size()); }
  const std::vector<FeatureSpec>& features() const { return features_; }
  const FeatureSpec& feature(int index) const { return features_.at(index); }
  // -1 when absent.
  int feature_index(std::string_view feature_name) const;
  // Original document text; embedded in dataset sidecars.
  const std::string& document() const { return document_; }

  // Numeric bounds of feature `index` given values for every feature it
  // depends on. Throws DataError when the resolved interval is empty.
  std::pair<double, double> resolve_bounds(std::span<const double> partial,
                                           int index) const;

  // Bound and integrality check; never throws on out-of-range values, the
  // report carries them. Resolved-empty intervals are reported as
  // violations of the offending feature.
  ValidationReport validate(const DesignVector& x) const;

  // Affine map onto [0,1]^d using per-row resolved bounds. Categorical
  // features map to index/(n-1); degenerate intervals map to 0.5.
  DesignVector normalize(const DesignVector& x) const;
  DesignVector denormalize(const DesignVector& unit) const;

  // Copy of the space with a feature's constant bounds replaced (used for
  // restricted-region sampling). The feature must have constant bounds that
  // contain [lo, hi].
  DesignSpace with_bounds(std::string_view feature_name, double lo,
                          double hi) const;

 private:
  std::string name_;
  std::string document_;
  std::vector<FeatureSpec> features_;
};

// The bundled centrifugal-compressor space (versioned asset, embedded at
// build time).
std::string_view compressor_space_document();
std::shared_ptr<const DesignSpace> compressor_space();

}  // namespace dsgen
