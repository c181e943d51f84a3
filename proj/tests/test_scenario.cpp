// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "nlin/config.hpp"
#include "nlin/report.hpp"

using namespace nlin;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("nlin_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// Three channels, two 40 km spans, short frames.
Scenario small_scenario(Case c, const std::filesystem::path& cal) {
  Scenario s = profile_scenario("desk");
  s.plan = make_plan(3, 37.5e9, 28e9, 0.2, s.plan.cut().launch_power, Modulation::QAM16, Modulation::QAM16);
  s.link.fiber.length = 40e3;
  s.link.span_count = 2;
  s.sim.frame_symbols = 2048;
  s.sim.realizations = 1;
  s.sim.threads = 1;
  s.sim.auto_calibrate = true;
  s.sim.calibration_dir = cal;
  apply_case(s, c);
  s.name = to_string(c);
  s.validate();
  return s;
}

// Same structure and values; numbers within 1e-12 relative (unit conversions
// round in the last place).
bool json_close(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y));
  }
  if (a.type() != b.type() || a.size() != b.size()) return false;
  if (a.is_object()) {
    for (auto it = a.begin(); it != a.end(); ++it)
      if (!b.contains(it.key()) || !json_close(it.value(), b.at(it.key()))) return false;
    return true;
  }
  if (a.is_array()) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!json_close(a[i], b[i])) return false;
    return true;
  }
  return a == b;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("profiles") {
    const Scenario desk = profile_scenario("desk");
    CHECK(desk.plan.channels.size() == 5u);
    CHECK(desk.sim.frame_symbols == 8192u);
    CHECK(desk.link.span_count == 10);
    CHECK(desk.link.span_length() == 80e3);
    CHECK(desk.plan.cut().launch_power == doctest::Approx(units::dbm_to_watt(3.0)));
    const Scenario thesis = profile_scenario("thesis");
    CHECK(thesis.plan.channels.size() == 9u);
    CHECK(thesis.sim.frame_symbols == 65536u);
    CHECK_THROWS_AS(profile_scenario("laptop"), ConfigError);
    CHECK_NOTHROW(desk.validate());
  }

  TEST_CASE("cases set pre-dispersion and replacement") {
    Scenario s = profile_scenario("desk");
    apply_case(s, Case::D);
    CHECK(s.pre_dispersion == doctest::Approx(units::ps_nm_to_si(13000.0)));
    CHECK(s.link.roadm.active);
    for (const auto& c : s.plan.channels) CHECK(c.pre_dispersion == (c.index ? s.pre_dispersion : 0.0));
    apply_case(s, Case::A);
    CHECK_FALSE(s.link.roadm.active);
    CHECK(s.pre_dispersion == 0.0);
    CHECK_NOTHROW(s.validate());
    s.link.roadm.active = true;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK(case_from_string("C") == Case::C);
    CHECK_THROWS_AS(case_from_string("E"), ConfigError);
  }

  TEST_CASE("configuration round trip and unknown keys") {
    const Scenario s = scenario_from_json(R"({"profile": "desk", "scenario": {"case": "B"},
                                              "plan": {"channels": 7, "spacing_ghz": 50},
                                              "link": {"span_count": 4}})");
    CHECK(s.kase == Case::B);
    CHECK(s.plan.channels.size() == 7u);
    CHECK(s.plan.spacing == doctest::Approx(50e9));
    CHECK(s.link.span_count == 4);
    const Scenario back = scenario_from_json(scenario_to_json(s));
    CHECK(json_close(nlohmann::json::parse(scenario_to_json(back)), nlohmann::json::parse(scenario_to_json(s))));
    CHECK(back.pre_dispersion == doctest::Approx(s.pre_dispersion));
    CHECK_THROWS_AS(scenario_from_json(R"({"plan": {"chanels": 7}})"), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(R"({"colour": 1})"), ConfigError);
    CHECK_THROWS_AS(scenario_from_json(R"({"plan": {"channels": 4}})"), ConfigError);
    CHECK_THROWS_AS(scenario_from_json("{not json"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/nlin.json"), IoError);
  }

  TEST_CASE("sweeps copy the base with one change") {
    const Scenario base = profile_scenario("desk");
    const auto v = sweep_scenarios(base, SweepParameter::span_length, {40e3, 80e3});
    REQUIRE(v.size() == 2u);
    CHECK(v[0].link.span_length() == 40e3);
    CHECK(v[0].name == base.name + "_40km");
    CHECK(v[1].sim.seed == base.sim.seed);
    const auto f = sweep_scenarios(base, SweepParameter::modulation_format, {0.0});
    for (const auto& c : f[0].plan.channels)
      if (c.index) CHECK(c.format == Modulation::QPSK);
    CHECK(sweep_parameter_from_string("channel_spacing") == SweepParameter::channel_spacing);
    CHECK_THROWS_AS(sweep_parameter_from_string("power"), ConfigError);
  }

  TEST_CASE("calibration fingerprint tracks the CUT path only") {
    const Scenario a = small_scenario(Case::A, scratch("fp"));
    Scenario b = a;
    for (auto& c : b.plan.channels)
      if (c.index) c.format = Modulation::QPSK;
    CHECK(calibration_fingerprint(a, 1) == calibration_fingerprint(b, 1));
    Scenario c = a;
    c.link.fiber.length = 60e3;
    CHECK(calibration_fingerprint(a, 1) != calibration_fingerprint(c, 1));
    CHECK(calibration_fingerprint(a, 1) != calibration_fingerprint(a, 2));
  }

  TEST_CASE("runs are deterministic and reported in a fixed layout") {
    const auto cal = scratch("cal");
    const Scenario s = small_scenario(Case::C, cal);
    const auto rows = run_scenario(s);
    REQUIRE(rows.size() == 2u);
    CHECK(rows[0].span == 1);
    CHECK(rows[1].distance_km == doctest::Approx(80.0));
    for (const auto& r : rows) {
      CHECK(r.report.p_nli > 0.0);
      CHECK(std::isfinite(r.gn_w));
      CHECK(std::isfinite(r.egn_w));
      CHECK(r.egn_adapted_w == doctest::Approx(rows[0].egn_w * r.span).epsilon(1e-12));
      CHECK(r.p_nli_db == doctest::Approx(10.0 * std::log10(r.report.p_nli / s.plan.cut().launch_power)));
    }
    const auto again = run_scenario(s);
    CHECK(format_csv(again) == format_csv(rows));

    CHECK(csv_header().rfind(
              "scenario,case,span,distance_km,p_nli_w,p_nli_db,p_phase_w,p_circular_w,cnr_pct,n_opt,gn_w,egn_w,"
          "egn_adapted_w",
              0) == 0);
    const auto out = scratch("report");
    const auto files = emit_report(rows, out, ReportFormat::csv);
    CHECK(files.size() >= 3u);
    const std::string csv = slurp(out / "results.csv");
    CHECK(csv.rfind(csv_header(), 0) == 0);
    emit_report(again, out, ReportFormat::csv);
    CHECK(slurp(out / "results.csv") == csv);
    emit_report(rows, out, ReportFormat::records);
    std::ifstream rec(out / "results.jsonl");
    std::string line;
    int n = 0;
    while (std::getline(rec, line)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.contains("p_nli_w"));
      ++n;
    }
    CHECK(n == 2);
    CHECK_THROWS_AS(emit_report({}, out, ReportFormat::csv), ConfigError);
    CHECK_THROWS_AS(report_format_from_string("xml"), ConfigError);
  }

  TEST_CASE("pre-dispersed cases get GN but no EGN") {
    Scenario s = profile_scenario("desk");
    apply_case(s, Case::B);
    s.link.span_count = 2;
    const auto m = run_models(s);
    REQUIRE(m.size() == 2u);
    CHECK(std::isfinite(m[1].gn_w));
    CHECK(std::isnan(m[1].egn_w));
    CHECK_FALSE(m[1].note.empty());
  }

  TEST_CASE("missing calibration is reported") {
    Scenario s = small_scenario(Case::A, scratch("empty_cal"));
    s.sim.auto_calibrate = false;
    CHECK_THROWS_AS(run_scenario(s), MissingCalibration);
  }
}
