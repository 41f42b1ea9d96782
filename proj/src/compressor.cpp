#include "dsgen/compressor.hpp"

#include <cmath>

namespace dsgen {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;

// Lumped loss coefficients of the stand-in model. Frozen so that labels are
// reproducible; the mid-range reference design lands at eta_tt ~ 0.74.
constexpr double kIncidenceCoef = 0.5;
constexpr double kFrictionCoef = 1.0;
constexpr double kClearanceCoef = 0.6;
constexpr double kBackfaceCoef = 0.3;
constexpr double kDiffuserRadiusCoef = 0.25;
constexpr double kDiffuserWidthCoef = 0.15;

// Working checks.
constexpr double kSurgeFlowCoefficientFloor = 0.01;
constexpr double kSurgeFlowAngleCeilingDeg = 85.0;
constexpr double kMinOpenThroatFraction = 0.05;

// Feature layout of the bundled compressor space, resolved once by name.
struct FeatureIndex {
  int r4, beta2, beta4, e_b, Zb;
  int r2h, r2s, r1, r5, b4, b5, beta2s, e_tp, e_bk, l_ind, Zs;
  int Ra, c_b;
  int fluid, Ma21, Ma41, T1, Pr1;

  static const FeatureIndex& get() {
    static const FeatureIndex idx = [] {
      const DesignSpace& s = *compressor_space();
      auto at = [&](const char* name) {
        const int i = s.feature_index(name);
        if (i < 0) throw DataError(std::string("compressor space is missing '") + name + "'");
        return i;
      };
      FeatureIndex f{};
      f.r4 = at("r4");
      f.beta2 = at("beta2");
      f.beta4 = at("beta4");
      f.e_b = at("e_b");
      f.Zb = at("Zb");
      f.r2h = at("r2h");
      f.r2s = at("r2s");
      f.r1 = at("r1");
      f.r5 = at("r5");
      f.b4 = at("b4");
      f.b5 = at("b5");
      f.beta2s = at("beta2s");
      f.e_tp = at("e_tp");
      f.e_bk = at("e_bk");
      f.l_ind = at("l_ind");
      f.Zs = at("Zs");
      f.Ra = at("Ra");
      f.c_b = at("c_b");
      f.fluid = at("fluid");
      f.Ma21 = at("Ma21");
      f.Ma41 = at("Ma41");
      f.T1 = at("T1");
      f.Pr1 = at("Pr1");
      return f;
    }();
    return idx;
  }
};

Labels not_working(LabelError code) { return Labels{false, 0.0, 1.0, code}; }

}  // namespace

const std::vector<Fluid>& fluid_table() {
  // Antoine coefficients give log10(Psat [kPa]); they are plausible fits, not
  // reference data, like the rest of the stand-in physics. Air is treated as
  // non-condensable.
  static const std::vector<Fluid> fluids = {
      {"air", 287.05, 1.40, 0.0, 0.0, 0.0, 1.0, false},
      {"ammonia", 488.2, 1.31, 6.869, 1113.93, -10.41, 1.0, true},
      {"isobutane", 143.0, 1.10, 5.944, 912.14, -29.81, 1.0, true},
      {"pentane", 115.2, 1.07, 5.989, 1070.62, -40.45, 1.0, true},
      {"propane", 188.6, 1.13, 5.983, 819.30, -24.42, 1.0, true},
      {"R1234yf", 72.9, 1.10, 6.214, 920.30, -25.00, 1.0, true},
      {"R134a", 81.5, 1.11, 6.345, 942.00, -30.00, 1.0, true},
      {"R245fa", 62.0, 1.08, 6.346, 1077.60, -40.00, 1.0, true},
  };
  return fluids;
}

Labels compressor_evaluate(const DesignVector& x) {
  const FeatureIndex& F = FeatureIndex::get();
  const std::size_t dim = static_cast<std::size_t>(compressor_space()->dimension());
  if (x.size() != dim)
    throw DataError("compressor_evaluate: expected " + std::to_string(dim) + " features");

  auto mm = [&](int i) { return x[static_cast<std::size_t>(i)] * 1e-3; };
  auto deg = [&](int i) { return x[static_cast<std::size_t>(i)] * kDegToRad; };
  auto val = [&](int i) { return x[static_cast<std::size_t>(i)]; };

  const long fluid_index = std::lround(val(F.fluid));
  if (fluid_index < 0 || fluid_index >= static_cast<long>(fluid_table().size()))
    return not_working(LabelError::numerical);
  const Fluid& fluid = fluid_table()[static_cast<std::size_t>(fluid_index)];

  const double r4 = mm(F.r4);
  const double r2h = mm(F.r2h);
  const double r2s = mm(F.r2s);
  const double r1 = mm(F.r1);
  const double r5 = mm(F.r5);
  const double b4 = mm(F.b4);
  const double b5 = mm(F.b5);
  const double e_b = mm(F.e_b);
  const double e_tp = mm(F.e_tp);
  const double e_bk = mm(F.e_bk);
  const double l_ind = mm(F.l_ind);
  const double roughness = val(F.Ra);  // already in meters
  const double blockage = val(F.c_b);
  const double blade_count = val(F.Zb);
  const double splitter_count = val(F.Zs);
  const double beta2 = deg(F.beta2);
  const double beta2s = deg(F.beta2s);
  const double beta4 = deg(F.beta4);

  const double gas_r = fluid.gas_constant;
  const double gamma = fluid.gamma;
  const double cp = gamma * gas_r / (gamma - 1.0);

  // (1) inlet state. T1/P1 are the total conditions; Mach numbers are
  // referenced to the total sound speed.
  const double t_total = val(F.T1);
  const double p_total = val(F.Pr1) * fluid.p_ref_kpa * 1e3;  // Pa
  const double a_total = std::sqrt(gamma * gas_r * t_total);

  const double c_inlet = val(F.Ma21) * a_total;  // meridional velocity at the eye
  const double u_tip = val(F.Ma41) * a_total;    // impeller tip speed
  const double omega = u_tip / r4;

  const double t_static = t_total - c_inlet * c_inlet / (2.0 * cp);
  if (!(t_static > 0.0)) return not_working(LabelError::numerical);
  const double p_static = p_total * std::pow(t_static / t_total, gamma / (gamma - 1.0));
  const double rho_inlet = p_static / (gas_r * t_static);
  const double a_static = std::sqrt(gamma * gas_r * t_static);

  // Condensation: static pressure above the saturation line at the static
  // temperature (non-air fluids).
  if (fluid.condensable) {
    const double denom = t_static + fluid.antoine_c;
    if (denom <= 1.0) return not_working(LabelError::condensation);
    const double psat = 1e3 * std::pow(10.0, fluid.antoine_a - fluid.antoine_b / denom);
    if (p_static > psat) return not_working(LabelError::condensation);
  }

  // (2) mass flow through the impeller eye.
  const double eye_area = kPi * (r2s * r2s - r2h * r2h) * blockage;
  if (!(eye_area > 0.0)) return not_working(LabelError::numerical);
  const double mdot = rho_inlet * c_inlet * eye_area;

  // Choke: relative Mach at the inducer throat, metal blockage included.
  const double w_shroud = std::hypot(c_inlet, omega * r2s);
  const double open_fraction =
      1.0 - blade_count * e_b / (2.0 * kPi * r1 * std::cos(beta2s));
  if (open_fraction < kMinOpenThroatFraction) return not_working(LabelError::choke);
  if (w_shroud / (open_fraction * a_static) >= 1.0) return not_working(LabelError::choke);

  // (3) impeller-exit velocity triangle with Wiesner slip.
  const double c_m4 = mdot / (rho_inlet * 2.0 * kPi * r4 * b4 * blockage);
  const double z_eff = blade_count + 0.5 * splitter_count;
  const double slip = 1.0 - std::sqrt(std::cos(std::abs(beta4))) / std::pow(z_eff, 0.7);
  const double c_u4_ideal = u_tip + c_m4 * std::tan(beta4);  // beta4 < 0: backsweep
  const double c_u4 = slip * c_u4_ideal;
  const double euler_work = u_tip * c_u4;
  // Swirl collapse: the flow overruns what the wheel can pump at this speed,
  // i.e. the choke side of the map.
  if (!(euler_work > 0.0)) return not_working(LabelError::choke);

  // Surge proxy: exit flow coefficient floor and absolute flow angle ceiling.
  const double flow_coefficient = c_m4 / u_tip;
  const double flow_angle_deg = std::atan2(c_u4, c_m4) / kDegToRad;
  if (flow_coefficient < kSurgeFlowCoefficientFloor ||
      flow_angle_deg > kSurgeFlowAngleCeilingDeg)
    return not_working(LabelError::surge);

  // (4) lumped losses (J/kg).
  const double r_m1 = 0.5 * (r2s + r2h);
  const double incidence_tan = -(omega * r_m1) / c_inlet - std::tan(beta2);
  const double loss_incidence =
      kIncidenceCoef * 0.5 * c_inlet * c_inlet * incidence_tan * incidence_tan;

  const double hydraulic_diameter = 2.0 * (r2s - r2h);
  const double mean_w2 = 0.5 * (w_shroud * w_shroud + c_inlet * c_inlet);
  const double friction_factor =
      0.02 * std::pow(1.0 + 1e3 * roughness / hydraulic_diameter, 0.25);
  const double loss_friction =
      kFrictionCoef * 4.0 * friction_factor * (l_ind / hydraulic_diameter) * 0.5 * mean_w2;

  const double loss_clearance = kClearanceCoef * (e_tp / b4) * 0.5 * u_tip * u_tip;
  const double loss_backface = kBackfaceCoef * (e_bk / r4) * 0.5 * u_tip * u_tip;

  const double c4_sq = c_u4 * c_u4 + c_m4 * c_m4;
  const double width_ratio = b5 / b4;
  const double loss_diffuser =
      0.5 * c4_sq * (kDiffuserRadiusCoef * (1.0 - r4 / r5) +
                     kDiffuserWidthCoef * (width_ratio - 1.0) * (width_ratio - 1.0));

  const double losses =
      loss_incidence + loss_friction + loss_clearance + loss_backface + loss_diffuser;

  const double eta = (euler_work - losses) / euler_work;
  if (!std::isfinite(eta) || eta <= 0.0 || eta > 1.0)
    return not_working(LabelError::numerical);

  const double pressure_ratio =
      std::pow(1.0 + eta * euler_work / (cp * t_total), gamma / (gamma - 1.0));
  if (!std::isfinite(pressure_ratio) || pressure_ratio <= 1.0)
    return not_working(LabelError::numerical);

  return Labels{true, eta, pressure_ratio, LabelError::none};
}

const std::string& CompressorEvaluator::id() const {
  static const std::string name = "compressor";
  return name;
}

const DesignSpace& CompressorEvaluator::space() const { return *compressor_space(); }

}  // namespace dsgen
