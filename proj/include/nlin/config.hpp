// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "nlin/scenario.hpp"

namespace nlin {

// Named parameter sets. "desk": 2^13 symbols, 5 channels, 2 realizations,
// 10 x 80 km. "thesis": 2^16 symbols, 9 channels, 5 realizations.
// Both use 28 GBd, r = 0.2, 37.5 GHz spacing, 3 dBm per channel, a 16QAM CUT
// at 193.4 THz and 16QAM interferers.
Scenario profile_scenario(const std::string& profile, Case c = Case::A);

// JSON configuration. Every section is optional and overrides the profile
// named by the top-level "profile" key (or `profile` when given). Unknown
// keys are errors.
//
// {
//   "profile": "desk",
//   "scenario": {"name": "A", "case": "A", "cut_format": "16QAM", "interferer_format": "QPSK"},
//   "plan": {"channels": 5, "spacing_ghz": 37.5, "symbol_rate_gbd": 28, "roll_off": 0.2,
//            "cut_frequency_thz": 193.4, "launch_power_dbm": 3},
//   "fiber": {"span_length_km": 80, "attenuation_db_km": 0.19, "dispersion_ps_nm_km": 16.8,
//             "pmd_ps_sqrt_km": 0.1, "n2_m2_w": 2.25e-20, "a_eff_um2": 84.95, "wavelength_nm": 1550,
//             "dual_pol_kerr": 0.8889, "gamma_per_w_km": 1.07},
//   "link": {"span_count": 10, "pre_dispersion_ps_nm": 13000, "amplifier_gain_db": 15.2},
//   "simulation": {"frame_symbols": 8192, "realizations": 2, "seed": 1, "samples_per_symbol": 0,
//                  "max_nonlinear_phase_rad": 0.001, "max_step_m": 1000, "pmd": true, "threads": 0,
//                  "calibration_dir": "calibration", "auto_calibrate": false},
//   "receiver": {"fde_taps": 128, "backpropagation": true, "extract_bandwidth_ghz": 0},
//   "metrics": {"epsilon": 0, "n_max": 0, "acf_max_lag": 200},
//   "model": {"enabled": true, "resolution_fraction": 0.015625, "include_sci": true,
//             "egn_constants": "data/egn_constants.json", "self_check_tolerance": 0}
// }
Scenario scenario_from_json(const std::string& text, const std::string& profile = "");
Scenario load_config(const std::filesystem::path& path, const std::string& profile = "");

// Effective configuration in the same schema.
std::string scenario_to_json(const Scenario& s);

}  // namespace nlin
