// SPDX-License-Identifier: Apache-2.0
#include "nlin/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "nlin/roadm.hpp"

namespace nlin {

const char* to_string(Case c) {
  switch (c) {
    case Case::A: return "A";
    case Case::B: return "B";
    case Case::C: return "C";
    case Case::D: return "D";
  }
  return "?";
}

Case case_from_string(const std::string& s) {
  if (s == "A" || s == "a") return Case::A;
  if (s == "B" || s == "b") return Case::B;
  if (s == "C" || s == "c") return Case::C;
  if (s == "D" || s == "d") return Case::D;
  throw ConfigError("unknown scenario case '" + s + "' (expected A, B, C or D)");
}

void Scenario::validate() const {
  if (name.empty()) throw ConfigError("scenario: empty name");
  plan.validate();
  link.validate();
  if (link.span_count < 1) throw ConfigError("scenario: span_count must be >= 1");
  if (case_pre_dispersed(kase) != (pre_dispersion != 0.0))
    throw ConfigError(std::string("scenario: case ") + to_string(kase) + " inconsistent with pre-dispersion setting");
  if (case_replaces(kase) != replace_int_each_span || replace_int_each_span != link.roadm.active)
    throw ConfigError(std::string("scenario: case ") + to_string(kase) + " inconsistent with interferer replacement");
  for (const auto& c : plan.channels) {
    const double want = c.index == 0 ? 0.0 : pre_dispersion;
    if (c.pre_dispersion != want)
      throw ConfigError("scenario: channel " + std::to_string(c.index) + " pre-dispersion differs from the case");
  }
  if (sim.frame_symbols < 2 * kHeaderLength)
    throw ConfigError("scenario: frame_symbols must be at least " + std::to_string(2 * kHeaderLength));
  if (sim.realizations < 1) throw ConfigError("scenario: realizations must be >= 1");
  if (sim.samples_per_symbol < 0 || sim.samples_per_symbol % 2)
    throw ConfigError("scenario: samples_per_symbol must be even (0 selects automatically)");
  sim.step.validate();
}

ChannelPlan make_plan(int channels, double spacing, double symbol_rate, double roll_off, double launch_power,
                      Modulation cut_format, Modulation int_format) {
  if (channels < 1 || channels % 2 == 0) throw ConfigError("make_plan: channel count must be odd and positive");
  ChannelPlan p;
  p.spacing = spacing;
  p.symbol_rate = symbol_rate;
  p.roll_off = roll_off;
  const int half = channels / 2;
  int next = 1;
  for (int slot = -half; slot <= half; ++slot) {
    ChannelSpec c;
    c.index = slot == 0 ? 0 : next++;
    c.center_offset = slot * spacing;
    c.format = slot == 0 ? cut_format : int_format;
    c.launch_power = launch_power;
    p.channels.push_back(c);
  }
  p.validate();
  return p;
}

void apply_case(Scenario& s, Case c, double pre_dispersion) {
  s.kase = c;
  s.pre_dispersion = case_pre_dispersed(c) ? pre_dispersion : 0.0;
  s.replace_int_each_span = case_replaces(c);
  s.link.roadm.active = s.replace_int_each_span;
  s.link.roadm.passband_width = s.plan.spacing;
  for (auto& ch : s.plan.channels) ch.pre_dispersion = ch.index == 0 ? 0.0 : s.pre_dispersion;
}

int wdm_samples_per_symbol(const ChannelPlan& plan) {
  double lo = 0.0, hi = 0.0;
  for (const auto& c : plan.channels) {
    lo = std::min(lo, c.center_offset);
    hi = std::max(hi, c.center_offset);
  }
  const double bw = hi - lo + plan.occupied_bandwidth();
  int sps = static_cast<int>(std::ceil(1.2 * bw / plan.symbol_rate - 1e-9));
  if (sps % 2) ++sps;
  return std::max(sps, 2);
}

std::uint64_t realization_seed(const SimulationSettings& sim, int realization) {
  return mix_seed(sim.seed, static_cast<std::uint64_t>(realization));
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void append(std::string& s, const char* key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%.17g;", key, v);
  s += buf;
}

double extraction_width(const Scenario& s) {
  const double w = s.sim.rx.extract_bandwidth > 0.0 ? s.sim.rx.extract_bandwidth : s.plan.spacing;
  return std::min(w, 2.0 * s.plan.symbol_rate);
}

constexpr int kCalibrationSps = 4;

struct Transmitters {
  std::vector<TxChannel> tx;
  std::vector<std::pair<ChannelSpec, Signal>> conditioned;
};

Transmitters make_transmitters(const ChannelPlan& plan, std::size_t frame, int sps, std::uint64_t seed_r) {
  Transmitters t;
  for (auto spec : plan.channels) {
    spec.seed = seeds::channel_data(seed_r, spec.index);
    TxChannel ch = generate_channel(spec, plan, frame, sps);
    Signal c = condition_channel(ch.signal, seeds::channel_condition(seed_r, spec.index), plan.symbol_rate);
    t.conditioned.emplace_back(spec, std::move(c));
    t.tx.push_back(std::move(ch));
  }
  return t;
}

const TxChannel& cut_of(const Transmitters& t) {
  for (const auto& c : t.tx)
    if (c.spec.index == 0) return c;
  throw ConfigError("scenario: plan has no channel under test");
}

ChannelPlan cut_only_plan(const ChannelPlan& plan) {
  ChannelPlan p = plan;
  p.channels = {plan.cut()};
  return p;
}

LinkConfig linear_link(const LinkConfig& link) {
  LinkConfig l = link;
  l.fiber.gamma_override = 0.0;
  l.roadm.active = false;
  return l;
}

std::string span_tag(const std::string& name, std::uint64_t seed, int span) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s seed %016llx span %d", name.c_str(), static_cast<unsigned long long>(seed),
                span);
  return buf;
}

void calibrate_realization(const Scenario& s, std::uint64_t seed_r, bool only_missing) {
  const CoefficientStore store = calibration_store(s, seed_r);
  if (only_missing) {
    bool all = true;
    for (int span = 1; span <= s.link.span_count; ++span) all = all && store.contains(seed_r, span);
    if (all) return;
  }
  const std::uint64_t fp = calibration_fingerprint(s, seed_r);
  const ChannelPlan plan = cut_only_plan(s.plan);
  const LinkConfig link = linear_link(s.link);
  const Transmitters t = make_transmitters(plan, s.sim.frame_symbols, kCalibrationSps, seed_r);
  const TxChannel& cut = cut_of(t);
  Signal sig = multiplex(t.conditioned);
  const Signal ref = reference_waveform(cut.symbols.x, cut.symbols.y, plan.symbol_rate, plan.roll_off, 2);
  const auto [hx, hy] = training_header();
  for (int span = 1; span <= s.link.span_count; ++span) {
    PmdRealization pmd{s.sim.pmd, seeds::pmd(seed_r), static_cast<std::uint64_t>(span)};
    try {
      sig = propagate_span(sig, link.fiber, s.sim.step, pmd);
    } catch (const NumericalError& e) {
      throw NumericalError("calibration, " + span_tag(s.name, seed_r, span) + ": " + e.what());
    }
    sig = amplify(sig, link.gain_db());
    const Signal front = receive_front(sig, plan, link, span, s.sim.step, s.sim.rx);
    FdeCoefficients c =
        fde_train(front, ref, hx, hy, kHeaderLength, plan.symbol_rate, plan.roll_off, s.sim.rx.fde_taps);
    c.seed = seed_r;
    c.span = static_cast<std::uint32_t>(span);
    c.fingerprint = fp;
    store.save(c);
  }
}

template <class F>
void parallel_for(int count, int threads, F&& f) {
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, count);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<NoiseReport> run_one(const Scenario& s, int realization, const RunProgress& progress) {
  const std::uint64_t seed_r = realization_seed(s.sim, realization);
  const CoefficientStore store = calibration_store(s, seed_r);
  const std::uint64_t fp = calibration_fingerprint(s, seed_r);
  std::vector<FdeCoefficients> fde;
  auto load_all = [&] {
    fde.clear();
    for (int span = 1; span <= s.link.span_count; ++span)
      fde.push_back(store.load(seed_r, static_cast<std::uint32_t>(span), fp));
  };
  try {
    load_all();
  } catch (const MissingCalibration&) {
    if (!s.sim.auto_calibrate) throw;
    calibrate_realization(s, seed_r, false);
    load_all();
  }

  const int sps = s.sim.samples_per_symbol > 0 ? s.sim.samples_per_symbol : wdm_samples_per_symbol(s.plan);
  const Transmitters t = make_transmitters(s.plan, s.sim.frame_symbols, sps, seed_r);
  const TxChannel& cut = cut_of(t);
  Signal wdm = multiplex(t.conditioned);
  RoadmConfig roadm = s.link.roadm;
  roadm.seed = seeds::roadm(seed_r);

  std::vector<NoiseReport> out;
  for (int span = 1; span <= s.link.span_count; ++span) {
    PmdRealization pmd{s.sim.pmd, seeds::pmd(seed_r), static_cast<std::uint64_t>(span)};
    try {
      wdm = propagate_span(wdm, s.link.fiber, s.sim.step, pmd);
    } catch (const NumericalError& e) {
      throw NumericalError(span_tag(s.name, seed_r, span) + ": " + e.what());
    }
    if (s.replace_int_each_span) {
      // fresh interferers with new data for every span
      std::vector<std::pair<ChannelSpec, Signal>> fresh;
      for (const auto& ch : t.tx) {
        if (ch.spec.index == 0) continue;
        ChannelSpec spec = ch.spec;
        spec.seed = mix_seed(ch.spec.seed, static_cast<std::uint64_t>(span));
        fresh.emplace_back(spec, generate_channel(spec, s.plan, s.sim.frame_symbols, sps).signal);
      }
      wdm = replace_interferers(wdm, s.plan, fresh, static_cast<std::size_t>(span), roadm);
    }
    wdm = amplify(wdm, s.link.gain_db());

    const Signal front = receive_front(wdm, s.plan, s.link, span, s.sim.step, s.sim.rx);
    const Signal eq = fde_apply(front, fde[static_cast<std::size_t>(span - 1)]);
    SymbolFrame f = downsample_align(eq, cut.symbols.x, cut.symbols.y, s.plan.symbol_rate, cut.symbols.header);
    restore_phase(f);
    MeasureOptions mo = s.sim.measure;
    mo.signal_power = cut.spec.launch_power;
    NoiseReport r = measure(f, mo);
    r.scenario = s.name;
    r.realization = realization;
    r.span = span;
    r.distance = span * s.link.span_length();
    out.push_back(r);
    if (progress.log) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s r%d span %d: P_NLI %.4g W (%.2f dB), CNR %.1f%%", s.name.c_str(),
                    realization, span, r.p_nli, 10.0 * std::log10(r.p_nli / cut.spec.launch_power),
                    r.cnr_percent);
      progress.log(buf);
    }
  }
  return out;
}

}  // namespace

std::uint64_t calibration_fingerprint(const Scenario& s, std::uint64_t seed_r) {
  const ChannelSpec& cut = s.plan.cut();
  std::string k = "nlin-fde-v1;";
  append(k, "frame", static_cast<double>(s.sim.frame_symbols));
  append(k, "rate", s.plan.symbol_rate);
  append(k, "rolloff", s.plan.roll_off);
  append(k, "format", static_cast<double>(static_cast<int>(cut.format)));
  append(k, "power", cut.launch_power);
  k += "seed=" + std::to_string(seed_r) + ";";
  append(k, "length", s.link.fiber.length);
  append(k, "att", s.link.fiber.attenuation_db_km);
  append(k, "disp", s.link.fiber.dispersion);
  append(k, "pmd", s.sim.pmd ? s.link.fiber.pmd : 0.0);
  append(k, "lambda", s.link.fiber.wavelength);
  append(k, "gain", s.link.gain_db());
  append(k, "section", s.sim.step.max_step);
  append(k, "taps", s.sim.rx.fde_taps);
  append(k, "dbp", s.sim.rx.backpropagation ? 1.0 : 0.0);
  append(k, "width", extraction_width(s));
  return fnv1a(k);
}

CoefficientStore calibration_store(const Scenario& s, std::uint64_t seed_r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(calibration_fingerprint(s, seed_r)));
  return CoefficientStore(s.sim.calibration_dir / buf);
}

void calibrate_fde(const Scenario& s) {
  s.validate();
  parallel_for(s.sim.realizations, s.sim.threads,
               [&](int r) { calibrate_realization(s, realization_seed(s.sim, r), false); });
}

std::vector<std::vector<NoiseReport>> run_realizations(const Scenario& s, const RunProgress& progress) {
  s.validate();
  std::vector<std::vector<NoiseReport>> all(static_cast<std::size_t>(s.sim.realizations));
  std::mutex log_mu;
  RunProgress guarded;
  if (progress.log)
    guarded.log = [&](const std::string& m) {
      std::lock_guard<std::mutex> lock(log_mu);
      progress.log(m);
    };
  parallel_for(s.sim.realizations, s.sim.threads,
               [&](int r) { all[static_cast<std::size_t>(r)] = run_one(s, r, guarded); });
  return all;
}

std::vector<ResultRow> run_scenario(const Scenario& s, const RunProgress& progress) {
  const auto all = run_realizations(s, progress);
  std::vector<ResultRow> rows;
  const double p_cut = s.plan.cut().launch_power;
  for (int span = 1; span <= s.link.span_count; ++span) {
    std::vector<NoiseReport> at;
    for (const auto& r : all) at.push_back(r[static_cast<std::size_t>(span - 1)]);
    ResultRow row;
    row.scenario = s.name;
    row.kase = s.kase;
    row.span = span;
    row.distance_km = span * s.link.span_length() / 1e3;
    row.report = average_reports(at);
    row.p_nli_db = 10.0 * std::log10(row.report.p_nli / p_cut);
    rows.push_back(row);
  }
  if (s.model.enabled) attach_models(rows, run_models(s));
  return rows;
}

std::vector<ModelRow> run_models(const Scenario& s) {
  s.validate();
  std::vector<ModelRow> rows;
  const ModelOptions& opt = s.model.options;
  std::string egn_note;
  double egn_single = std::numeric_limits<double>::quiet_NaN();
  const bool egn_ok = s.pre_dispersion == 0.0;
  if (!egn_ok) egn_note = "EGN model does not support pre-dispersed channels";
  for (int span = 1; span <= s.link.span_count; ++span) {
    ModelRow m;
    m.span = span;
    m.gn_w = gn_xmci(s.plan, s.link, span, opt);
    if (egn_ok) {
      m.egn_w = egn_xmci(s.plan, s.link, span, s.model.constants, opt);
      if (span == 1) egn_single = m.egn_w;
      if (s.replace_int_each_span) m.egn_adapted_w = replaced_int_adaptation(egn_single, span);
    }
    m.note = egn_note;
    rows.push_back(m);
  }
  return rows;
}

void attach_models(std::vector<ResultRow>& rows, const std::vector<ModelRow>& models) {
  std::map<int, const ModelRow*> by_span;
  for (const auto& m : models) by_span[m.span] = &m;
  for (auto& r : rows) {
    auto it = by_span.find(r.span);
    if (it == by_span.end()) continue;
    r.gn_w = it->second->gn_w;
    r.egn_w = it->second->egn_w;
    r.egn_adapted_w = it->second->egn_adapted_w;
  }
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
  if (s == "span_length") return SweepParameter::span_length;
  if (s == "channel_spacing") return SweepParameter::channel_spacing;
  if (s == "modulation_format") return SweepParameter::modulation_format;
  throw ConfigError("unknown sweep parameter '" + s + "' (span_length, channel_spacing, modulation_format)");
}

std::vector<Scenario> sweep_scenarios(const Scenario& base, SweepParameter p, const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep: no values");
  std::vector<Scenario> out;
  for (double v : values) {
    Scenario s = base;
    char buf[64];
    switch (p) {
      case SweepParameter::span_length:
        if (!(v > 0.0)) throw ConfigError("sweep: span length must be positive");
        s.link.fiber.length = v;
        std::snprintf(buf, sizeof buf, "_%gkm", v / 1e3);
        break;
      case SweepParameter::channel_spacing: {
        if (v < base.plan.occupied_bandwidth() * (1.0 - 1e-12))
          throw ConfigError("sweep: spacing below (1+r) * symbol rate");
        const double old = base.plan.spacing;
        s.plan.spacing = v;
        for (auto& c : s.plan.channels) c.center_offset = std::round(c.center_offset / old) * v;
        s.link.roadm.passband_width = v;
        std::snprintf(buf, sizeof buf, "_%gGHz", v / 1e9);
        break;
      }
      case SweepParameter::modulation_format: {
        const int i = static_cast<int>(std::lround(v));
        if (i < 0 || i > 2 || std::abs(v - i) > 1e-9)
          throw ConfigError("sweep: modulation index must be 0 (QPSK), 1 (16QAM) or 2 (Gaussian)");
        const Modulation m = i == 0 ? Modulation::QPSK : i == 1 ? Modulation::QAM16 : Modulation::GAUSSIAN;
        for (auto& c : s.plan.channels)
          if (c.index != 0) c.format = m;
        std::snprintf(buf, sizeof buf, "_%s", to_string(m).c_str());
        break;
      }
    }
    s.name = base.name + buf;
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ResultRow> sweep(const Scenario& base, SweepParameter p, const std::vector<double>& values,
                             bool with_models, const RunProgress& progress) {
  std::vector<ResultRow> rows;
  for (Scenario s : sweep_scenarios(base, p, values)) {
    s.model.enabled = with_models;
    auto r = run_scenario(s, progress);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  return rows;
}

}  // namespace nlin
