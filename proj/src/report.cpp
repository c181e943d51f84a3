// SPDX-License-Identifier: Apache-2.0
#include "nlin/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace nlin {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string db(double w, double ref) {
  if (std::isnan(w) || !(w > 0.0)) return "nan";
  return num(10.0 * std::log10(w / ref));
}

std::vector<ResultRow> sorted(std::vector<ResultRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.scenario != b.scenario) return a.scenario < b.scenario;
    return a.span < b.span;
  });
  return rows;
}

// JSON string escaping for scenario names.
std::string quoted(const std::string& s) {
  std::string o = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      o += '\\';
      o += c;
    } else if (static_cast<unsigned char>(c) < 0x20) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04x", c);
      o += buf;
    } else {
      o += c;
    }
  }
  return o + "\"";
}

std::string json_num(double v) { return std::isfinite(v) ? num(v) : "null"; }

std::string safe_name(const std::string& s) {
  std::string o;
  for (char c : s) o += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  return o;
}

double signal_power_of(const ResultRow& r) {
  // p_nli_db is relative to the CUT power; recover it for the model columns
  if (r.report.p_nli > 0.0) return r.report.p_nli / std::pow(10.0, r.p_nli_db / 10.0);
  return 1.0;
}

}  // namespace

ReportFormat report_format_from_string(const std::string& s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "records") return ReportFormat::records;
  throw ConfigError("unknown report format '" + s + "' (csv or records)");
}

std::string csv_header() {
  return "scenario,case,span,distance_km,p_nli_w,p_nli_db,p_phase_w,p_circular_w,cnr_pct,n_opt,gn_w,egn_w,"
         "egn_adapted_w\n";
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header();
  for (const auto& r : sorted(rows)) {
    out += r.scenario + "," + to_string(r.kase) + "," + std::to_string(r.span) + "," + num(r.distance_km) + "," +
           num(r.report.p_nli) + "," + num(r.p_nli_db) + "," + num(r.report.p_phase) + "," +
           num(r.report.p_circular) + "," + num(r.report.cnr_percent) + "," + std::to_string(r.report.n_opt) + "," +
           num(r.gn_w) + "," + num(r.egn_w) + "," + num(r.egn_adapted_w) + "\n";
  }
  return out;
}

std::string format_records(const std::vector<ResultRow>& rows) {
  std::string out;
  for (const auto& r : sorted(rows)) {
    out += "{\"scenario\":" + quoted(r.scenario) + ",\"case\":\"" + to_string(r.kase) +
           "\",\"span\":" + std::to_string(r.span) + ",\"distance_km\":" + json_num(r.distance_km) +
           ",\"p_nli_w\":" + json_num(r.report.p_nli) + ",\"p_nli_db\":" + json_num(r.p_nli_db) +
           ",\"p_phase_w\":" + json_num(r.report.p_phase) + ",\"p_circular_w\":" + json_num(r.report.p_circular) +
           ",\"cnr_pct\":" + json_num(r.report.cnr_percent) + ",\"n_opt\":" + std::to_string(r.report.n_opt) +
           ",\"gn_w\":" + json_num(r.gn_w) + ",\"egn_w\":" + json_num(r.egn_w) +
           ",\"egn_adapted_w\":" + json_num(r.egn_adapted_w) +
           ",\"search_exhausted\":" + (r.report.search_exhausted ? "true" : "false") +
           ",\"large_angle\":" + (r.report.large_angle ? "true" : "false") +
           ",\"p_nli_spread\":" + json_num(r.report.p_nli_spread) + ",\"count\":" + std::to_string(r.report.count) +
           "}\n";
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::vector<std::filesystem::path> emit_report(const std::vector<ResultRow>& rows, const std::filesystem::path& dir,
                                               ReportFormat format) {
  if (rows.empty()) throw ConfigError("emit_report: no rows to write");
  const auto all = sorted(rows);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::filesystem::path& p, const std::string& c) {
    write_file(p, c);
    written.push_back(p);
  };
  if (format == ReportFormat::csv)
    put(dir / "results.csv", format_csv(all));
  else
    put(dir / "results.jsonl", format_records(all));

  std::string power = "scenario,distance_km,p_nli_db,gn_db,egn_db,egn_adapted_db\n";
  std::string cnr = "scenario,distance_km,cnr_pct,n_opt\n";
  for (const auto& r : all) {
    const double ref = signal_power_of(r);
    power += r.scenario + "," + num(r.distance_km) + "," + num(r.p_nli_db) + "," + db(r.gn_w, ref) + "," +
             db(r.egn_w, ref) + "," + db(r.egn_adapted_w, ref) + "\n";
    cnr += r.scenario + "," + num(r.distance_km) + "," + num(r.report.cnr_percent) + "," +
           std::to_string(r.report.n_opt) + "\n";
  }
  put(dir / "power_vs_distance.csv", power);
  put(dir / "cnr_vs_distance.csv", cnr);

  for (std::size_t i = 0; i < all.size(); ++i) {
    const bool last = i + 1 == all.size() || all[i + 1].scenario != all[i].scenario;
    if (!last) continue;
    std::string acf = "lag,acf\n";
    for (std::size_t l = 0; l < all[i].report.acf.size(); ++l)
      acf += std::to_string(l) + "," + num(all[i].report.acf[l]) + "\n";
    put(dir / ("acf_" + safe_name(all[i].scenario) + ".csv"), acf);
  }
  return written;
}

std::string format_psd(const NliPsd& psd) {
  auto at = [](const rvec& v, std::size_t i) { return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN(); };
  std::string out = "frequency_hz,total,gn,sci,xci,mci,correction\n";
  for (std::size_t i = 0; i < psd.frequency.size(); ++i)
    out += num(psd.frequency[i]) + "," + num(at(psd.total, i)) + "," + num(at(psd.gn, i)) + "," +
           num(at(psd.sci, i)) + "," + num(at(psd.xci, i)) + "," + num(at(psd.mci, i)) + "," +
           num(at(psd.correction, i)) + "\n";
  return out;
}

std::string format_collision_table(const CollisionTable& t) {
  std::string out = "h,k,m,type,re,im\n";
  for (std::size_t i = 0; i < t.index.size(); ++i) {
    const auto& x = t.index[i];
    out += std::to_string(x.h) + "," + std::to_string(x.k) + "," + std::to_string(x.m) + "," + to_string(classify(x)) +
           "," + num(t.value[i].real()) + "," + num(t.value[i].imag()) + "\n";
  }
  return out;
}

std::string format_curve(const rvec& z, const cvec& values) {
  if (z.size() != values.size()) throw ConfigError("format_curve: size mismatch");
  std::string out = "z_m,re,im\n";
  for (std::size_t i = 0; i < z.size(); ++i)
    out += num(z[i]) + "," + num(values[i].real()) + "," + num(values[i].imag()) + "\n";
  return out;
}

}  // namespace nlin
