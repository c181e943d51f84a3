// SPDX-License-Identifier: Apache-2.0
#include "nlin/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace nlin {

namespace {

using json = nlohmann::json;

struct Params {
  std::string name;
  Case kase = Case::A;
  Modulation cut_format = Modulation::QAM16;
  Modulation int_format = Modulation::QAM16;
  int channels = 5;
  double spacing = 37.5e9;
  double symbol_rate = 28e9;
  double roll_off = 0.2;
  double cut_frequency = 193.4e12;
  double power = 0.0;
  FiberParams fiber;
  int span_count = 10;
  double pre_dispersion = units::ps_nm_to_si(13000.0);
  std::optional<double> gain_db;
  SimulationSettings sim;
  ModelSettings model;
};

Params profile_params(const std::string& profile) {
  Params p;
  p.power = units::dbm_to_watt(3.0);
  if (profile == "desk") {
    p.channels = 5;
    p.sim.frame_symbols = 1u << 13;
    p.sim.realizations = 2;
  } else if (profile == "thesis") {
    p.channels = 9;
    p.sim.frame_symbols = 1u << 16;
    p.sim.realizations = 5;
  } else {
    throw ConfigError("unknown profile '" + profile + "' (expected desk or thesis)");
  }
  return p;
}

Scenario build(const Params& p) {
  Scenario s;
  s.name = p.name.empty() ? std::string(to_string(p.kase)) : p.name;
  s.plan = make_plan(p.channels, p.spacing, p.symbol_rate, p.roll_off, p.power, p.cut_format, p.int_format);
  s.plan.cut_frequency = p.cut_frequency;
  s.link.span_count = p.span_count;
  s.link.fiber = p.fiber;
  s.link.launch_power_per_channel = p.power;
  s.link.amplifier_gain_db = p.gain_db;
  s.sim = p.sim;
  s.model = p.model;
  apply_case(s, p.kase, p.pre_dispersion);
  s.validate();
  return s;
}

// Section reader that rejects keys it was not asked about.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config: section '" + name_ + "' must be an object");
  }
  ~Section() = default;

  template <class T>
  bool get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return false;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: " + name_ + "." + key + " has the wrong type");
    }
    return true;
  }
  bool number(const char* key, double& out, double scale = 1.0) {
    double v = 0.0;
    if (!get(key, v)) return false;
    if (!std::isfinite(v)) throw ConfigError("config: " + name_ + "." + key + " must be finite");
    out = v * scale;
    return true;
  }
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError("config: unknown key '" + name_ + "." + k + "'");
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

Modulation format_of(const std::string& s) {
  try {
    return modulation_from_string(s);
  } catch (const Error&) {
    throw ConfigError("config: unknown modulation format '" + s + "'");
  }
}

void parse(const json& root, Params& p) {
  static const std::set<std::string> sections{"profile", "scenario", "plan",     "fiber", "link",
                                              "simulation", "receiver", "metrics", "model"};
  for (const auto& [k, v] : root.items())
    if (!sections.count(k)) throw ConfigError("config: unknown key '" + k + "'");

  if (root.contains("scenario")) {
    Section s(root["scenario"], "scenario");
    std::string v;
    s.get("name", p.name);
    if (s.get("case", v)) p.kase = case_from_string(v);
    if (s.get("cut_format", v)) p.cut_format = format_of(v);
    if (s.get("interferer_format", v)) p.int_format = format_of(v);
    s.finish();
  }
  if (root.contains("plan")) {
    Section s(root["plan"], "plan");
    s.get("channels", p.channels);
    s.number("spacing_ghz", p.spacing, units::GHz);
    s.number("symbol_rate_gbd", p.symbol_rate, units::GHz);
    s.number("roll_off", p.roll_off);
    s.number("cut_frequency_thz", p.cut_frequency, units::THz);
    double dbm = 0.0;
    if (s.number("launch_power_dbm", dbm)) p.power = units::dbm_to_watt(dbm);
    s.finish();
  }
  if (root.contains("fiber")) {
    Section s(root["fiber"], "fiber");
    FiberParams& f = p.fiber;
    s.number("span_length_km", f.length, units::km);
    s.number("attenuation_db_km", f.attenuation_db_km);
    double v = 0.0;
    if (s.number("dispersion_ps_nm_km", v)) f.dispersion = units::ps_nm_km_to_si(v);
    if (s.number("pmd_ps_sqrt_km", v)) f.pmd = units::ps_sqrt_km_to_si(v);
    s.number("n2_m2_w", f.n2);
    s.number("a_eff_um2", f.a_eff, 1e-12);
    s.number("wavelength_nm", f.wavelength, units::nm);
    s.number("dual_pol_kerr", f.dual_pol_kerr);
    if (s.number("gamma_per_w_km", v)) f.gamma_override = v / units::km;
    s.finish();
  }
  if (root.contains("link")) {
    Section s(root["link"], "link");
    s.get("span_count", p.span_count);
    double v = 0.0;
    if (s.number("pre_dispersion_ps_nm", v)) p.pre_dispersion = units::ps_nm_to_si(v);
    if (s.number("amplifier_gain_db", v)) p.gain_db = v;
    s.finish();
  }
  if (root.contains("simulation")) {
    Section s(root["simulation"], "simulation");
    SimulationSettings& m = p.sim;
    s.get("frame_symbols", m.frame_symbols);
    s.get("realizations", m.realizations);
    s.get("seed", m.seed);
    s.get("samples_per_symbol", m.samples_per_symbol);
    s.number("max_nonlinear_phase_rad", m.step.max_nonlinear_phase);
    s.number("max_step_m", m.step.max_step);
    s.get("min_steps_per_span", m.step.min_steps_per_span);
    s.get("pmd", m.pmd);
    s.get("threads", m.threads);
    std::string dir;
    if (s.get("calibration_dir", dir)) m.calibration_dir = dir;
    s.get("auto_calibrate", m.auto_calibrate);
    s.finish();
  }
  if (root.contains("receiver")) {
    Section s(root["receiver"], "receiver");
    s.get("fde_taps", p.sim.rx.fde_taps);
    s.get("backpropagation", p.sim.rx.backpropagation);
    s.number("extract_bandwidth_ghz", p.sim.rx.extract_bandwidth, units::GHz);
    s.finish();
  }
  if (root.contains("metrics")) {
    Section s(root["metrics"], "metrics");
    s.number("epsilon", p.sim.measure.epsilon);
    s.get("n_max", p.sim.measure.n_max);
    s.get("acf_max_lag", p.sim.measure.acf_max_lag);
    s.finish();
  }
  if (root.contains("model")) {
    Section s(root["model"], "model");
    s.get("enabled", p.model.enabled);
    double frac = 0.0;
    if (s.number("resolution_fraction", frac)) {
      if (!(frac > 0.0)) throw ConfigError("config: model.resolution_fraction must be positive");
      p.model.options.resolution = frac * p.symbol_rate;
    }
    s.get("include_sci", p.model.options.include_sci);
    s.number("self_check_tolerance", p.model.options.self_check_tolerance);
    std::string path;
    if (s.get("egn_constants", path)) p.model.constants = load_egn_constants(path);
    s.finish();
  }
}

}  // namespace

Scenario profile_scenario(const std::string& profile, Case c) {
  Params p = profile_params(profile);
  p.kase = c;
  return build(p);
}

Scenario scenario_from_json(const std::string& text, const std::string& profile) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: top level must be an object");
  std::string prof = "desk";
  if (root.contains("profile")) {
    if (!root["profile"].is_string()) throw ConfigError("config: profile must be a string");
    prof = root["profile"].get<std::string>();
  }
  if (!profile.empty()) prof = profile;
  Params p = profile_params(prof);
  parse(root, p);
  return build(p);
}

Scenario load_config(const std::filesystem::path& path, const std::string& profile) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str(), profile);
}

std::string scenario_to_json(const Scenario& s) {
  nlohmann::ordered_json j;
  const ChannelSpec& cut = s.plan.cut();
  Modulation int_format = cut.format;
  for (const auto& c : s.plan.channels)
    if (c.index != 0) {
      int_format = c.format;
      break;
    }
  j["scenario"] = {{"name", s.name},
                   {"case", to_string(s.kase)},
                   {"cut_format", to_string(cut.format)},
                   {"interferer_format", to_string(int_format)}};
  j["plan"] = {{"channels", s.plan.channels.size()},
               {"spacing_ghz", s.plan.spacing / units::GHz},
               {"symbol_rate_gbd", s.plan.symbol_rate / units::GHz},
               {"roll_off", s.plan.roll_off},
               {"cut_frequency_thz", s.plan.cut_frequency / units::THz},
               {"launch_power_dbm", units::watt_to_dbm(cut.launch_power)}};
  const FiberParams& f = s.link.fiber;
  j["fiber"] = {{"span_length_km", f.length / units::km},
                {"attenuation_db_km", f.attenuation_db_km},
                {"dispersion_ps_nm_km", f.dispersion / units::ps_nm_km_to_si(1.0)},
                {"pmd_ps_sqrt_km", f.pmd / units::ps_sqrt_km_to_si(1.0)},
                {"n2_m2_w", f.n2},
                {"a_eff_um2", f.a_eff / 1e-12},
                {"wavelength_nm", f.wavelength / units::nm},
                {"dual_pol_kerr", f.dual_pol_kerr}};
  if (f.gamma_override) j["fiber"]["gamma_per_w_km"] = *f.gamma_override * units::km;
  j["link"] = {{"span_count", s.link.span_count},
               {"pre_dispersion_ps_nm", s.pre_dispersion / units::ps_nm_to_si(1.0)}};
  if (s.link.amplifier_gain_db) j["link"]["amplifier_gain_db"] = *s.link.amplifier_gain_db;
  j["simulation"] = {{"frame_symbols", s.sim.frame_symbols},
                     {"realizations", s.sim.realizations},
                     {"seed", s.sim.seed},
                     {"samples_per_symbol", s.sim.samples_per_symbol},
                     {"max_nonlinear_phase_rad", s.sim.step.max_nonlinear_phase},
                     {"max_step_m", s.sim.step.max_step},
                     {"min_steps_per_span", s.sim.step.min_steps_per_span},
                     {"pmd", s.sim.pmd},
                     {"threads", s.sim.threads},
                     {"calibration_dir", s.sim.calibration_dir.string()},
                     {"auto_calibrate", s.sim.auto_calibrate}};
  j["receiver"] = {{"fde_taps", s.sim.rx.fde_taps},
                   {"backpropagation", s.sim.rx.backpropagation},
                   {"extract_bandwidth_ghz", s.sim.rx.extract_bandwidth / units::GHz}};
  j["metrics"] = {{"epsilon", s.sim.measure.epsilon},
                  {"n_max", s.sim.measure.n_max},
                  {"acf_max_lag", s.sim.measure.acf_max_lag}};
  const double res = s.model.options.resolution > 0.0 ? s.model.options.resolution : s.plan.symbol_rate / 64.0;
  j["model"] = {{"enabled", s.model.enabled},
                {"resolution_fraction", res / s.plan.symbol_rate},
                {"include_sci", s.model.options.include_sci},
                {"self_check_tolerance", s.model.options.self_check_tolerance}};
  return j.dump(2) + "\n";
}

}  // namespace nlin
