// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "nlin/coeff_store.hpp"
#include "nlin/metrics.hpp"
#include "nlin/models.hpp"

namespace nlin {

enum class Case { A, B, C, D };
const char* to_string(Case c);
Case case_from_string(const std::string& s);
inline bool case_pre_dispersed(Case c) { return c == Case::B || c == Case::D; }
inline bool case_replaces(Case c) { return c == Case::C || c == Case::D; }

struct SimulationSettings {
  std::size_t frame_symbols = 8192;  // per polarization, header included
  int realizations = 2;
  std::uint64_t seed = 1;
  int samples_per_symbol = 0;  // 0: smallest even value >= 1.2 x WDM bandwidth / S_R
  StepControl step;
  bool pmd = true;
  ReceiverConfig rx;
  MeasureOptions measure;
  std::filesystem::path calibration_dir = "calibration";
  bool auto_calibrate = false;  // calibrate missing FDE coefficients on the fly
  int threads = 0;              // realization workers; 0: hardware concurrency
};

struct ModelSettings {
  ModelOptions options;
  EgnConstants constants = default_egn_constants();
  bool enabled = true;
};

struct Scenario {
  std::string name;
  Case kase = Case::A;
  ChannelPlan plan;
  LinkConfig link;
  double pre_dispersion = 0.0;  // [s/m] on every interferer (B, D)
  bool replace_int_each_span = false;
  SimulationSettings sim;
  ModelSettings model;

  void validate() const;
};

// Plan of `channels` slots (odd count, CUT in the middle) at `spacing`; slot
// indices run 1.. over the interferers in order of increasing offset.
ChannelPlan make_plan(int channels, double spacing, double symbol_rate, double roll_off, double launch_power,
                      Modulation cut_format, Modulation int_format);

// Applies the case: pre-dispersion on the interferers for B/D, ROADM
// replacement for C/D.
void apply_case(Scenario& s, Case c, double pre_dispersion = 13.0 /* 13000 ps/nm */);

int wdm_samples_per_symbol(const ChannelPlan& plan);

struct ResultRow {
  std::string scenario;
  Case kase = Case::A;
  int span = 0;
  double distance_km = 0.0;
  NoiseReport report;  // averaged over realizations
  double p_nli_db = 0.0;  // 10 log10(p_nli / P_CUT)
  double gn_w = std::numeric_limits<double>::quiet_NaN();
  double egn_w = std::numeric_limits<double>::quiet_NaN();
  double egn_adapted_w = std::numeric_limits<double>::quiet_NaN();
};

// Configuration fingerprint of the channel-under-test path that FDE
// coefficients depend on (frame, shaping, fiber, PMD sections, receiver).
std::uint64_t calibration_fingerprint(const Scenario& s, std::uint64_t realization_seed);
std::uint64_t realization_seed(const SimulationSettings& sim, int realization);

// gamma = 0 run of the channel under test alone, trained after every span.
// Coefficients go to sim.calibration_dir / <fingerprint>.
void calibrate_fde(const Scenario& s);
CoefficientStore calibration_store(const Scenario& s, std::uint64_t realization_seed);

struct RunProgress {
  std::function<void(const std::string&)> log;
};

// Per span: propagate, ROADM-replace interferers (C/D), amplify,
// checkpoint-receive a copy and measure. Rows are averaged over realizations.
std::vector<ResultRow> run_scenario(const Scenario& s, const RunProgress& progress = {});

// Per-realization reports (realization-major) without averaging.
std::vector<std::vector<NoiseReport>> run_realizations(const Scenario& s, const RunProgress& progress = {});

struct ModelRow {
  int span = 0;
  double gn_w = std::numeric_limits<double>::quiet_NaN();
  double egn_w = std::numeric_limits<double>::quiet_NaN();
  double egn_adapted_w = std::numeric_limits<double>::quiet_NaN();
  std::string note;  // unsupported-configuration message, if any
};
std::vector<ModelRow> run_models(const Scenario& s);
void attach_models(std::vector<ResultRow>& rows, const std::vector<ModelRow>& models);

enum class SweepParameter { span_length, channel_spacing, modulation_format };
SweepParameter sweep_parameter_from_string(const std::string& s);

// Independent runs of copies of `base` with one parameter changed. Values are
// metres for span_length, Hz for channel_spacing, and for modulation_format
// the interferer format index (0 QPSK, 1 16QAM, 2 Gaussian). Every run reuses
// the base seeds. Scenario names get a "_<value>" suffix.
std::vector<Scenario> sweep_scenarios(const Scenario& base, SweepParameter p, const std::vector<double>& values);
std::vector<ResultRow> sweep(const Scenario& base, SweepParameter p, const std::vector<double>& values,
                             bool with_models = true, const RunProgress& progress = {});

}  // namespace nlin
