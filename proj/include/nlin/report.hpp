// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nlin/collision.hpp"
#include "nlin/scenario.hpp"

namespace nlin {

enum class ReportFormat { csv, records };
ReportFormat report_format_from_string(const std::string& s);

// Fixed column order: scenario, case, span, distance_km, p_nli_w, p_nli_db,
// p_phase_w, p_circular_w, cnr_pct, n_opt, gn_w, egn_w, egn_adapted_w.
std::string csv_header();
std::string format_csv(const std::vector<ResultRow>& rows);
// One JSON object per line with the CSV fields plus flags and spread.
std::string format_records(const std::vector<ResultRow>& rows);

// Writes results.csv or results.jsonl plus plot-ready files:
//   power_vs_distance.csv  scenario, distance_km, p_nli_db, gn_db, egn_db, egn_adapted_db
//   cnr_vs_distance.csv    scenario, distance_km, cnr_pct, n_opt
//   acf_<scenario>.csv     lag, acf (phase-noise ACF at the last span)
// Rows are sorted by (scenario, span); identical rows give identical bytes.
// Returns the written paths.
std::vector<std::filesystem::path> emit_report(const std::vector<ResultRow>& rows, const std::filesystem::path& dir,
                                               ReportFormat format);

// frequency_hz, total, gn, sci, xci, mci, correction
std::string format_psd(const NliPsd& psd);
// h, k, m, type, re, im
std::string format_collision_table(const CollisionTable& t);
// z_m, re, im
std::string format_curve(const rvec& z, const cvec& values);

// Atomic write (temporary file + rename); throws IoError.
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace nlin
