#pragma once

#include <string>
#include <vector>

#include "dsgen/annotate.hpp"

namespace dsgen {

// Ideal-gas working fluid with Antoine saturation coefficients
// (log10(Psat [kPa]) = A - B / (T + C)). The inlet pressure is Pr1 times
// p_ref_kpa.
struct Fluid {
  std::string name;
  double gas_constant;  // J/(kg K)
  double gamma;         // heat-capacity ratio, in (1, 2)
  double antoine_a;
  double antoine_b;
  double antoine_c;
  double p_ref_kpa = 1.0;
  bool condensable = true;
};

// Order matches the category order of the bundled compressor space.
const std::vector<Fluid>& fluid_table();

// Mean-line stand-in for a centrifugal compressor: ideal-gas state, Wiesner
// slip, five lumped loss terms, and working checks for condensation, choke
// and surge. Deterministic and pure.
Labels compressor_evaluate(const DesignVector& x);

class CompressorEvaluator final : public Evaluator {
 public:
  const std::string& id() const override;
  const DesignSpace& space() const override;
  Labels evaluate(const DesignVector& x) const override { return compressor_evaluate(x); }
};

}  // namespace dsgen
