// SPDX-License-Identifier: Apache-2.0
// nlinsim: simulation, model and collision runs from the command line.
#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nlin/config.hpp"
#include "nlin/report.hpp"

namespace {

using namespace nlin;

struct Common {
  std::string config;
  std::string scenario;
  std::string profile;
  long long seed = -1;
  int realizations = 0;
  std::string out = "out";
  std::string format = "csv";
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON configuration file");
  app->add_option("--scenario", c.scenario, "case A|B|C|D")->check(CLI::IsMember({"A", "B", "C", "D"}));
  app->add_option("--profile", c.profile, "desk|thesis")->check(CLI::IsMember({"desk", "thesis"}));
  app->add_option("--seed", c.seed, "base seed")->check(CLI::NonNegativeNumber);
  app->add_option("--realizations", c.realizations, "realizations per scenario")->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "output directory");
  app->add_option("--format", c.format, "csv|records")->check(CLI::IsMember({"csv", "records"}));
}

Scenario scenario_of(const Common& c) {
  Scenario s = c.config.empty() ? profile_scenario(c.profile.empty() ? "desk" : c.profile)
                                : load_config(c.config, c.profile);
  if (!c.scenario.empty()) {
    const double pre = s.pre_dispersion != 0.0 ? s.pre_dispersion : units::ps_nm_to_si(13000.0);
    const bool default_name = s.name == to_string(s.kase);
    apply_case(s, case_from_string(c.scenario), pre);
    if (default_name) s.name = to_string(s.kase);
  }
  if (c.seed >= 0) s.sim.seed = static_cast<std::uint64_t>(c.seed);
  if (c.realizations > 0) s.sim.realizations = c.realizations;
  s.validate();
  return s;
}

void log_line(const std::string& m) { std::fprintf(stderr, "%s\n", m.c_str()); }

std::vector<double> parse_values(const std::string& text, SweepParameter p) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (p == SweepParameter::modulation_format) {
      const Modulation m = modulation_from_string(item);
      v.push_back(m == Modulation::QPSK ? 0.0 : m == Modulation::QAM16 ? 1.0 : 2.0);
      continue;
    }
    double x = 0.0;
    try {
      x = std::stod(item);
    } catch (const std::exception&) {
      throw ConfigError("sweep: cannot parse value '" + item + "'");
    }
    v.push_back(p == SweepParameter::span_length ? x * units::km : x * units::GHz);
  }
  if (v.empty()) throw ConfigError("sweep: no values given");
  return v;
}

int run(int argc, char** argv) {
  CLI::App app{"Nonlinear interference simulation and model workbench"};
  app.require_subcommand(1);

  Common sim_c, model_c, sweep_c, cal_c, col_c;
  bool calibrate_first = false, no_models = false;
  auto* sim = app.add_subcommand("simulate", "propagate, receive and measure one scenario");
  add_common(sim, sim_c);
  sim->add_flag("--calibrate", calibrate_first, "calibrate missing FDE coefficients first");
  sim->add_flag("--no-models", no_models, "skip GN/EGN predictions");

  int psd_spans = 0;
  auto* model = app.add_subcommand("model", "GN/EGN predictions per span count");
  add_common(model, model_c);
  model->add_option("--psd-spans", psd_spans, "also write the NLI PSD for this span count");

  std::string parameter, values;
  bool sweep_calibrate = false, sweep_no_models = false;
  auto* sw = app.add_subcommand("sweep", "runs over span length, channel spacing or interferer format");
  add_common(sw, sweep_c);
  sw->add_option("--parameter", parameter, "span_length|channel_spacing|modulation_format")->required();
  sw->add_option("--values", values, "comma list: km, GHz or format names")->required();
  sw->add_flag("--calibrate", sweep_calibrate, "calibrate missing FDE coefficients first");
  sw->add_flag("--no-models", sweep_no_models, "skip GN/EGN predictions");

  auto* cal = app.add_subcommand("calibrate", "gamma = 0 FDE calibration for every span count");
  add_common(cal, cal_c);

  double col_length_km = 100.0, col_spacing_ghz = 50.0, col_floor = 1e-2;
  int col_reach = 8;
  auto* col = app.add_subcommand("collisions", "pulse-collision coefficients and accumulation curves");
  add_common(col, col_c);
  col->add_option("--length-km", col_length_km, "link length")->check(CLI::PositiveNumber);
  col->add_option("--spacing-ghz", col_spacing_ghz, "interferer offset")->check(CLI::PositiveNumber);
  col->add_option("--floor", col_floor, "overlap floor for the index set")->check(CLI::Range(1e-9, 0.999));
  col->add_option("--reach", col_reach, "max |index| for the listed curves")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (sim->parsed()) {
    Scenario s = scenario_of(sim_c);
    s.sim.auto_calibrate = s.sim.auto_calibrate || calibrate_first;
    s.model.enabled = s.model.enabled && !no_models;
    const auto rows = run_scenario(s, {log_line});
    for (const auto& p : emit_report(rows, sim_c.out, report_format_from_string(sim_c.format)))
      log_line("wrote " + p.string());
  } else if (model->parsed()) {
    const Scenario s = scenario_of(model_c);
    const auto rows = run_models(s);
    std::string csv = "scenario,case,span,distance_km,gn_w,egn_w,egn_adapted_w,note\n";
    for (const auto& m : rows) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s,%s,%d,%.10g,%.10g,%.10g,%.10g,", s.name.c_str(), to_string(s.kase), m.span,
                    m.span * s.link.span_length() / 1e3, m.gn_w, m.egn_w, m.egn_adapted_w);
      csv += buf + m.note + "\n";
    }
    const std::filesystem::path out(model_c.out);
    write_file(out / "model.csv", csv);
    log_line("wrote " + (out / "model.csv").string());
    if (psd_spans > 0) {
      const double d = s.model.options.resolution > 0.0 ? s.model.options.resolution : s.plan.symbol_rate / 64.0;
      const rvec grid = band_grid(-0.5 * s.plan.symbol_rate, 0.5 * s.plan.symbol_rate, d);
      const NliPsd psd = s.pre_dispersion == 0.0
                             ? egn_nli_psd(s.plan, s.link, grid, psd_spans, s.model.constants, s.model.options)
                             : gn_nli_psd(s.plan, s.link, grid, psd_spans, s.model.options);
      write_file(out / ("psd_" + s.name + ".csv"), format_psd(psd));
      log_line("wrote " + (out / ("psd_" + s.name + ".csv")).string());
    }
  } else if (sw->parsed()) {
    Scenario s = scenario_of(sweep_c);
    s.sim.auto_calibrate = s.sim.auto_calibrate || sweep_calibrate;
    const SweepParameter p = sweep_parameter_from_string(parameter);
    const auto rows = sweep(s, p, parse_values(values, p), s.model.enabled && !sweep_no_models, {log_line});
    for (const auto& f : emit_report(rows, sweep_c.out, report_format_from_string(sweep_c.format)))
      log_line("wrote " + f.string());
  } else if (cal->parsed()) {
    const Scenario s = scenario_of(cal_c);
    calibrate_fde(s);
    log_line("calibration written below " + s.sim.calibration_dir.string());
  } else if (col->parsed()) {
    CollisionDemo demo;
    demo.link.length = col_length_km * units::km;
    demo.link.span_length = demo.link.length;
    demo.offset = 2.0 * constants::pi * col_spacing_ghz * units::GHz;
    const auto idx = collision_indices(demo.link, demo.pulse, demo.offset, col_floor);
    log_line("evaluating " + std::to_string(idx.size()) + " collision coefficients");
    const CollisionTable table = collision_table(idx, demo.link, demo.pulse);
    const std::filesystem::path out(col_c.out);
    write_file(out / "collision_table.csv", format_collision_table(table));
    const rvec z = collision_z_grid(demo.link, demo.pulse, demo.offset);
    std::string curves = "type,h,k,m,z_m,re,im\n";
    for (int k = -col_reach; k <= col_reach; ++k) {
      const CollisionIndex picks[] = {{0, k, k, demo.offset}, {0, k, k + 1, demo.offset},
                                      {1, k, k, demo.offset}, {1, k, k + 1, demo.offset}};
      for (const auto& i : picks) {
        const cvec acc = accumulation_curve(i, demo.link, z, demo.pulse);
        for (std::size_t j = 0; j < z.size(); ++j) {
          char buf[200];
          std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.10g,%.10g,%.10g\n", to_string(classify(i)), i.h, i.k, i.m,
                        z[j], acc[j].real(), acc[j].imag());
          curves += buf;
        }
      }
    }
    write_file(out / "accumulation_curves.csv", curves);
    log_line("wrote " + (out / "collision_table.csv").string() + " and " + (out / "accumulation_curves.csv").string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const nlin::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 1;
  } catch (const nlin::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const nlin::IoError& e) {
    std::fprintf(stderr, "I/O failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
