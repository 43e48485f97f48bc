#include "tcsim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>

#include <CLI11.hpp>

#include "tcsim/benchmarking.hpp"
#include "tcsim/config.hpp"
#include "tcsim/experiments.hpp"
#include "tcsim/rng.hpp"
#include "tcsim/tuneup.hpp"
#include "tcsim/units.hpp"

namespace tcsim {

namespace fs = std::filesystem;

namespace {

constexpr int schema_version = 1;

std::string section_name(const std::string& sub) {
  std::string s = sub;
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

class Section {
 public:
  Section(const Json& root, const std::string& name) : name_(name) {
    if (root.contains(name)) {
      j_ = root.at(name);
      if (!j_.is_object()) throw SimError(ErrorCode::config, name + " must be an object");
    } else {
      j_ = Json::object();
    }
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw SimError(ErrorCode::config, name_ + "." + key + ": " + e.what());
    }
  }

  std::vector<double> grid(const std::string& key, const Json& fallback) {
    used_.insert(key);
    return grid_from_json(j_.contains(key) ? j_.at(key) : fallback, name_ + "." + key);
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const Json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw SimError(ErrorCode::config, "unknown key " + name_ + "." + k);
  }

 private:
  std::string name_;
  Json j_;
  std::set<std::string> used_;
};

Json range(double start, double stop, int points) { return Json{{"start", start}, {"stop", stop}, {"points", points}}; }

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }
};

struct Context {
  std::string sub;
  Json config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  bool decoherence = false;
  std::string hash;
  Json timestamp;
  fs::path out;
  Device device;

  std::string seed_text() const { return seed ? std::to_string(*seed) : "none"; }

  Json meta() const {
    return Json{{"schema_version", schema_version}, {"tool", "tcsim"},     {"subcommand", sub},
                {"config_hash", hash},              {"seed", seed ? Json(*seed) : Json(nullptr)},
                {"timestamp", timestamp},           {"shots", shots ? Json(*shots) : Json("exact")},
                {"decoherence", decoherence}};
  }

  void write_csv(const Csv& csv, const std::string& stem) const {
    std::ofstream f(out / (stem + ".csv"));
    if (!f) throw SimError(ErrorCode::resource, "cannot write " + (out / (stem + ".csv")).string());
    f << "# tcsim " << sub << " config_hash=" << hash << " seed=" << seed_text() << "\n";
    for (std::size_t i = 0; i < csv.header.size(); ++i) f << (i ? "," : "") << csv.header[i];
    f << "\n";
    for (const auto& r : csv.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << r[i];
      f << "\n";
    }
  }

  void write_json(const Json& results, const std::string& stem) const {
    Json j = meta();
    j["config"] = config;
    j["results"] = results;
    std::ofstream f(out / (stem + ".json"));
    if (!f) throw SimError(ErrorCode::resource, "cannot write " + (out / (stem + ".json")).string());
    f << j.dump(2) << "\n";
  }
};

double dt_of(Section& s) {
  const double dt = ns(s.get<double>("dt_ns", 0.1));
  if (!(dt > 0.0)) throw SimError(ErrorCode::config, "dt_ns must be positive");
  return dt;
}

// ---- subcommands ----

void run_spectroscopy(const Context& ctx, Section& s) {
  const auto v = s.grid("v", range(-0.5, 0.5, 401));
  s.finish();
  const SpectroscopyResult r = coupler_spectroscopy(ctx.device, v);
  Csv csv{{"v", "coupler_ghz", "branch1_ghz", "branch2_ghz", "branch3_ghz", "label1", "label2", "label3"}, {}};
  for (const auto& p : r.points)
    csv.add({num(p.volts), num(to_ghz(p.coupler_bare)), num(to_ghz(p.branches[0])), num(to_ghz(p.branches[1])),
             num(to_ghz(p.branches[2])), p.labels[0], p.labels[1], p.labels[2]});
  Json gaps = Json::array();
  const Frequencies idle = ctx.device.idle();
  for (const auto& g : r.gaps)
    gaps.push_back({{"qubit", to_string(g.qubit)},
                    {"grid_gap_mhz", to_mhz(g.gap)},
                    {"v", g.volts},
                    {"coupler_ghz", to_ghz(g.coupler_bare)},
                    {"resonant_gap_mhz", to_mhz(anticrossing_gap(ctx.device.params, idle, g.qubit, idle[g.qubit]))}});
  ctx.write_csv(csv, ctx.sub);
  ctx.write_json({{"anticrossings", gaps}}, ctx.sub);
}

ChevronOptions chevron_options(const Context& ctx, Section& s) {
  ChevronOptions o;
  o.v_b = s.grid("v_b", range(-0.45, 0.45, 31));
  const auto tau = s.grid("tau_ns", range(0.0, 1000.0, 401));
  for (double t : tau) o.tau.push_back(ns(t));
  o.resonance_frequency = ghz(s.get<double>("resonance_ghz", 4.110));
  o.dt = dt_of(s);
  o.decoherence = ctx.decoherence;
  o.shots = ctx.shots;
  o.seed = ctx.seed.value_or(0);
  s.finish();
  return o;
}

void run_chevron(const Context& ctx, Section& s) {
  const ChevronOptions o = chevron_options(ctx, s);
  const Map2D map = iswap_chevron(SystemModel(ctx.device), o);
  Csv csv{{"v_b", "tau_ns", "p_q1"}, {}};
  for (std::size_t ix = 0; ix < map.x.size(); ++ix)
    for (std::size_t iy = 0; iy < map.y.size(); ++iy) csv.add({num(map.x[ix]), num(to_ns(map.y[iy])), num(map.at(ix, iy))});
  ctx.write_csv(csv, ctx.sub);
  ctx.write_json({{"points", map.x.size() * map.y.size()}, {"resonance_ghz", to_ghz(o.resonance_frequency)}}, ctx.sub);
}

void run_coupling(const Context& ctx, Section& s) {
  const ChevronOptions o = chevron_options(ctx, s);
  const SystemModel model(ctx.device);
  const auto est = coupling_from_chevron(iswap_chevron(model, o));
  Csv csv{{"v_b", "coupler_ghz", "g_mhz", "g_model_mhz", "peak_mhz", "resolved"}, {}};
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0.0;
  for (const auto& e : est) {
    const double wc = ctx.device.frequencies_at({0.0, 0.0, e.x}).coupler;
    double model_g = std::numeric_limits<double>::quiet_NaN();
    try {
      model_g = to_mhz(effective_coupling(ctx.device.params, o.resonance_frequency, o.resonance_frequency, wc));
    } catch (const SimError&) {
    }
    csv.add({num(e.x), num(to_ghz(wc)), num(to_mhz(e.coupling)), num(model_g), num(e.peak_frequency * 1e-6),
             e.resolved ? "1" : "0"});
    if (e.resolved) {
      gmin = std::min(gmin, to_mhz(e.coupling));
      gmax = std::max(gmax, to_mhz(e.coupling));
    }
  }
  const double span = o.tau.back() - o.tau.front() + (o.tau[1] - o.tau[0]);
  ctx.write_csv(csv, ctx.sub);
  ctx.write_json({{"g_min_mhz", finite_or_null(gmin)},
                  {"g_max_mhz", gmax},
                  {"g_resolution_mhz", 1e-6 / (2.0 * span)}},
                 ctx.sub);
}

void run_ramsey(const Context& ctx, Section& s) {
  const CzFamily family = cz_family_from_string(s.get<std::string>("family", "adiabatic"));
  const double v_b = s.get<double>("v_b", 0.2357);
  const double v_q = s.get<double>("v_q", 0.0);
  const double duration = ns(s.get<double>("duration_ns", 89.4));
  const double rise = ns(s.get<double>("rise_ns", 2.0));
  RamseyOptions o;
  o.alpha = default_alpha_grid(static_cast<std::size_t>(s.get<int>("alpha_points", 24)));
  o.dt = dt_of(s);
  o.min_contrast = s.get<double>("min_contrast", 0.1);
  o.decoherence = ctx.decoherence;
  o.shots = ctx.shots;
  s.finish();
  const SystemModel model(ctx.device);
  const Schedule sched = cz_schedule(family, v_b, v_q, duration, rise);
  o.seed = derive_seed(ctx.seed.value_or(0), {0});
  const RamseyTrace t0 = ramsey_conditional_phase(model, sched, o);
  o.control_excited = true;
  o.seed = derive_seed(ctx.seed.value_or(0), {1});
  const RamseyTrace t1 = ramsey_conditional_phase(model, sched, o);
  Csv csv{{"alpha", "p_control_0", "p_control_1"}, {}};
  for (std::size_t i = 0; i < o.alpha.size(); ++i) csv.add({num(o.alpha[i]), num(t0.p_excited[i]), num(t1.p_excited[i])});
  ctx.write_csv(csv, ctx.sub);
  ctx.write_json({{"phi_control_0", t0.fit.phase},
                  {"phi_control_1", t1.fit.phase},
                  {"phi_c", wrap_phase(t1.fit.phase - t0.fit.phase)},
                  {"contrast_control_0", t0.fit.contrast},
                  {"contrast_control_1", t1.fit.contrast}},
                 ctx.sub);
}

void run_phase_scan(const Context& ctx, Section& s) {
  PhaseScanOptions o;
  o.family = cz_family_from_string(s.get<std::string>("family", "adiabatic"));
  o.v_b = s.grid("v_b", range(0.0, 0.3, 61));
  o.v_q = s.grid("v_q", Json::array({0.0}));
  o.duration = ns(s.get<double>("duration_ns", 30.0));
  o.rise = ns(s.get<double>("rise_ns", 2.0));
  o.dt = dt_of(s);
  o.alpha = default_alpha_grid(static_cast<std::size_t>(s.get<int>("alpha_points", 24)));
  o.decoherence = ctx.decoherence;
  s.finish();
  const Map2D map = conditional_phase_scan(SystemModel(ctx.device), o);
  Csv csv{{"v_b", "v_q", "phi_c"}, {}};
  std::size_t invalid = 0;
  for (std::size_t iy = 0; iy < map.y.size(); ++iy)
    for (std::size_t ix = 0; ix < map.x.size(); ++ix) {
      csv.add({num(map.x[ix]), num(map.y[iy]), num(map.at(ix, iy))});
      invalid += std::isnan(map.at(ix, iy)) ? 1 : 0;
    }
  ctx.write_csv(csv, ctx.sub);
  ctx.write_json({{"points", map.x.size() * map.y.size()}, {"low_contrast_points", invalid}}, ctx.sub);
}

void run_leakage_map(const Context& ctx, Section& s) {
  LeakageMapOptions o;
  o.v_b = s.grid("v_b", range(0.0, 0.3, 31));
  o.v_q = s.grid("v_q", range(0.0, 0.3, 31));
  o.duration = ns(s.get<double>("duration_ns", 18.0));
  o.rise = ns(s.get<double>("rise_ns", 2.0));
  o.dt = dt_of(s);
  o.decoherence = ctx.decoherence;
  s.finish();
  const LeakageMaps m = leakage_map(SystemModel(ctx.device), o);
  Csv csv{{"v_b", "v_q", "ground_increase", "noncomputational"}, {}};
  double worst = 0.0;
  for (std::size_t iy = 0; iy < o.v_q.size(); ++iy)
    for (std::size_t ix = 0; ix < o.v_b.size(); ++ix) {
      csv.add({num(o.v_b[ix]), num(o.v_q[iy]), num(m.ground_increase.at(ix, iy)), num(m.noncomputational.at(ix, iy))});
      worst = std::max(worst, m.noncomputational.at(ix, iy));
    }
  ctx.write_csv(csv, ctx.sub);
  ctx.write_json({{"points", o.v_b.size() * o.v_q.size()}, {"max_noncomputational", worst}}, ctx.sub);
}

Json calibration_json(const CzCalibration& c) {
  return Json{{"family", to_string(c.family)},
              {"v_b", c.v_b},
              {"v_q", c.v_q},
              {"duration_ns", to_ns(c.duration)},
              {"rise_ns", to_ns(c.rise)},
              {"phi_c", c.gate.phi_c},
              {"leakage", c.gate.leakage},
              {"qubit_leakage", c.gate.qubit_leakage},
              {"infidelity", c.infidelity},
              {"fidelity", 1.0 - c.infidelity},
              {"objective", c.objective},
              {"virtual_z", {{"phi_1", c.virtual_z.phi_1}, {"phi_2", c.virtual_z.phi_2}}}};
}

// ---- benchmarking ----

struct RbSetup {
  RbConfig config;
  std::unique_ptr<SystemModel> model;
  std::unique_ptr<RbBackend> backend;
  std::optional<CzCalibration> cz;
};

RbSetup rb_setup(const Context& ctx, Section& s) {
  RbSetup st;
  RbConfig& c = st.config;
  c.lengths = s.get<std::vector<int>>("lengths", {1, 5, 10, 20, 40, 60, 80, 100});
  const int samples = s.get<int>("samples", 100);
  if (samples < 1) throw SimError(ErrorCode::config, "samples must be at least 1");
  c.samples = static_cast<std::size_t>(samples);
  c.seed = *ctx.seed;
  c.shots = ctx.shots;
  const std::string inter = s.get<std::string>("interleave", "cz");
  if (inter == "cz") {
    c.interleave = cz_unitary();
  } else if (inter == "identity") {
    c.interleave = Mat4::Identity();
  } else if (inter != "none") {
    throw SimError(ErrorCode::config, "interleave must be cz, identity or none");
  }
  validate(c);

  const std::string backend = s.get<std::string>("backend", "lindblad");
  const double d = s.get<double>("depolarizing", 0.01);
  const double d_int = s.get<double>("interleaved_depolarizing", 0.0);
  const double theta = s.get<double>("theta", 0.05);
  LindbladOptions lo;
  lo.decoherence = ctx.decoherence;
  lo.single_qubit_time = ns(s.get<double>("single_qubit_ns", 20.0));
  lo.single_qubit_depolarizing = s.get<double>("single_qubit_depolarizing", 0.0);
  lo.dt = dt_of(s);
  Json cz = s.has("cz") ? s.raw("cz") : Json{{"tune", "adiabatic"}};
  s.finish();

  if (backend == "ideal") {
    st.backend = std::make_unique<IdealBackend>(true);
  } else if (backend == "depolarizing") {
    st.backend = std::make_unique<DepolarizingBackend>(d, d_int);
  } else if (backend == "over-rotation") {
    st.backend = std::make_unique<OverRotationBackend>(theta);
  } else if (backend == "lindblad") {
    st.model = std::make_unique<SystemModel>(ctx.device);
    Section cs(Json{{"cz", cz}}, "cz");
    if (cs.has("tune")) {
      const std::string fam = cs.get<std::string>("tune", "adiabatic");
      cs.finish();
      st.cz = fam == "diabatic" ? tune_diabatic_cz(*st.model) : tune_adiabatic_cz(*st.model);
    } else {
      const CzFamily fam = cz_family_from_string(cs.get<std::string>("family", "adiabatic"));
      const double v_b = cs.get<double>("v_b", 0.2357);
      const double v_q = cs.get<double>("v_q", 0.0);
      const double dur = ns(cs.get<double>("duration_ns", 89.4));
      const double rise = ns(cs.get<double>("rise_ns", 2.0));
      cs.finish();
      st.cz = evaluate_cz(*st.model, fam, v_b, v_q, dur, rise, lo.dt);
    }
    st.backend = std::make_unique<LindbladBackend>(*st.model, st.cz->schedule(), lo);
  } else {
    throw SimError(ErrorCode::config, "backend must be ideal, depolarizing, over-rotation or lindblad");
  }
  return st;
}

Json fit_json(const DecayFit& f) {
  return Json{{"A", f.amplitude},          {"decay", f.decay},
              {"B", f.offset},             {"decay_sigma", f.decay_sigma()},
              {"residual_norm", f.residual_norm}};
}

Json estimate_json(const std::optional<Estimate>& e) {
  if (!e) return nullptr;
  return Json{{"value", e->value}, {"sigma", e->sigma}};
}

void add_table(Csv& csv, const std::string& series, const RbTable& t) {
  for (const auto& p : t) csv.add({series, std::to_string(p.m), num(p.mean), num(p.std)});
}

void run_rb_cli(const Context& ctx, Section& s, bool purity) {
  RbSetup st = rb_setup(ctx, s);
  RbConfig ref_cfg = st.config;
  ref_cfg.interleave.reset();
  Csv csv{{"series", "m", "mean", "std"}, {}};
  Json fits;
  std::optional<DecayFit> f_ref, f_int, u_ref, u_int;
  auto run_one = [&](const RbConfig& cfg, const std::string& tag, std::optional<DecayFit>& f,
                     std::optional<DecayFit>& u) {
    if (purity) {
      const RbPbTables t = run_rb_pb(cfg, *st.backend);
      add_table(csv, tag + "_fidelity", t.fidelity);
      add_table(csv, tag + "_purity", t.purity);
      f = fit_decay(t.fidelity, DecayModel::fidelity);
      u = fit_decay(t.purity, DecayModel::purity);
      fits[tag + "_purity"] = fit_json(*u);
    } else {
      const RbTable t = run_rb(cfg, *st.backend);
      add_table(csv, tag, t);
      f = fit_decay(t, DecayModel::fidelity);
    }
    fits[tag] = fit_json(*f);
  };
  run_one(ref_cfg, "reference", f_ref, u_ref);
  if (st.config.interleave) run_one(st.config, "interleaved", f_int, u_int);
  const ErrorReport rep = error_rates(*f_ref, f_int, u_ref, u_int);
  Json rates{{"r_ref", estimate_json(rep.r_ref)},
             {"r_int", estimate_json(rep.r_int)},
             {"r_cz", estimate_json(rep.r_cz)},
             {"f_cz", estimate_json(rep.f_cz)}};
  if (purity) {
    rates["r_incoherent_ref"] = estimate_json(rep.r_incoherent_ref);
    rates["r_incoherent_int"] = estimate_json(rep.r_incoherent_int);
    rates["incoherent_fraction"] = rep.incoherent_fraction ? Json(*rep.incoherent_fraction) : Json(nullptr);
  }
  Json results{{"backend", st.backend->name()}, {"fits", fits}, {"rates", rates}};
  if (st.cz) results["cz"] = calibration_json(*st.cz);
  ctx.write_csv(csv, ctx.sub);
  ctx.write_json(results, ctx.sub);
}

NMConfig nm_config(Section& s) {
  NMConfig nm;
  nm.max_evaluations = s.get<int>("max_evaluations", 100);
  return nm;
}

void write_calibration(const Context& ctx, const CzCalibration& c, const std::vector<std::string>& names) {
  Csv csv{{"evaluation"}, {}};
  for (const auto& n : names) csv.header.push_back(n);
  csv.header.push_back("objective");
  Json trace = Json::array();
  for (std::size_t i = 0; i < c.optimization.trace.size(); ++i) {
    const auto& e = c.optimization.trace[i];
    std::vector<std::string> row{std::to_string(i)};
    for (double x : e.x) row.push_back(num(x));
    row.push_back(num(e.value));
    csv.add(row);
    trace.push_back({{"x", e.x}, {"objective", e.value}});
  }
  Json results = calibration_json(c);
  results["start"] = {{"v_b", c.start_v_b}, {"v_q", c.start_v_q}, {"scan_duration_ns", to_ns(c.scan_duration)}};
  results["optimizer"] = {{"parameters", names}, {"evaluations", trace.size()}, {"converged", c.optimization.converged}};
  results["trace"] = trace;
  ctx.write_csv(csv, ctx.sub);
  ctx.write_json(results, ctx.sub);
}

void run_tune_adiabatic(const Context& ctx, Section& s) {
  AdiabaticTuneOptions o;
  o.duration = ns(s.get<double>("duration_ns", 30.0));
  o.optimize_duration = s.get<bool>("optimize_duration", true);
  o.grow_duration = s.get<bool>("grow_duration", true);
  o.max_duration = ns(s.get<double>("max_duration_ns", 200.0));
  o.scan_v_b = s.grid("scan_v_b", range(0.0, 0.3, 61));
  o.dt = dt_of(s);
  o.nm = nm_config(s);
  s.finish();
  const CzCalibration c = tune_adiabatic_cz(SystemModel(ctx.device), o);
  write_calibration(ctx, c, o.optimize_duration ? std::vector<std::string>{"v_b", "duration_ns"}
                                                : std::vector<std::string>{"v_b"});
}

void run_tune_diabatic(const Context& ctx, Section& s) {
  DiabaticTuneOptions o;
  o.duration = ns(s.get<double>("duration_ns", 18.0));
  o.rise = ns(s.get<double>("rise_ns", 2.0));
  o.v_b = s.grid("v_b", range(0.0, 0.3, 16));
  o.v_q = s.grid("v_q", range(0.0, 0.2, 16));
  o.leakage_weight = s.get<double>("leakage_weight", 1.0);
  o.leakage_threshold = s.get<double>("leakage_threshold", 0.05);
  o.dt = dt_of(s);
  o.nm = nm_config(s);
  s.finish();
  const CzCalibration c = tune_diabatic_cz(SystemModel(ctx.device), o);
  write_calibration(ctx, c, {"v_b", "v_q", "duration_ns"});
}

void run_zz(const Context& ctx, Section& s) {
  const auto v_c = s.grid("v_c", Json::array({0.0}));
  s.finish();
  Csv csv{{"v_c", "coupler_ghz", "zz_mhz"}, {}};
  for (double v : v_c) {
    const Frequencies f = ctx.device.frequencies_at({0.0, 0.0, v});
    csv.add({num(v), num(to_ghz(f.coupler)), num(to_mhz(compute_zz(ctx.device.params, f)))});
  }
  const Frequencies idle = ctx.device.idle();
  ctx.write_csv(csv, ctx.sub);
  ctx.write_json({{"zz_mhz", to_mhz(compute_zz(ctx.device.params, idle))},
                  {"idle_ghz", {to_ghz(idle.q1), to_ghz(idle.q2), to_ghz(idle.coupler)}}},
                 ctx.sub);
}

void dispatch(const Context& ctx) {
  Section s(ctx.config, section_name(ctx.sub));
  if (ctx.sub == "spectroscopy") return run_spectroscopy(ctx, s);
  if (ctx.sub == "chevron") return run_chevron(ctx, s);
  if (ctx.sub == "coupling") return run_coupling(ctx, s);
  if (ctx.sub == "ramsey-phase") return run_ramsey(ctx, s);
  if (ctx.sub == "phase-scan") return run_phase_scan(ctx, s);
  if (ctx.sub == "leakage-map") return run_leakage_map(ctx, s);
  if (ctx.sub == "rb") return run_rb_cli(ctx, s, false);
  if (ctx.sub == "pb") return run_rb_cli(ctx, s, true);
  if (ctx.sub == "tune-adiabatic") return run_tune_adiabatic(ctx, s);
  if (ctx.sub == "tune-diabatic") return run_tune_diabatic(ctx, s);
  if (ctx.sub == "zz") return run_zz(ctx, s);
  throw SimError(ErrorCode::config, "unknown subcommand " + ctx.sub);
}

Json timestamp_from(const std::string& flag) {
  if (!flag.empty()) return flag;
  const char* sde = std::getenv("SOURCE_DATE_EPOCH");
  if (!sde || !*sde) return nullptr;
  char* end = nullptr;
  const long long secs = std::strtoll(sde, &end, 10);
  if (*end != '\0' || secs < 0) throw SimError(ErrorCode::config, "SOURCE_DATE_EPOCH must be a non-negative integer");
  const std::time_t t = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Tunable-coupler two-qubit simulator"};
  std::string sub, config_path, out_dir, shots_text = "exact", decoherence_text, timestamp;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  app.add_option("subcommand", sub, "Experiment to run")->required()->check(CLI::IsMember(cli_subcommands));
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", seed, "Master seed (required for stochastic runs)");
  app.add_option("--out", out_dir, "Output directory (default: $TCSIM_OUT or .)");
  app.add_option("--threads", threads, "Worker thread cap")->check(CLI::PositiveNumber);
  app.add_option("--shots", shots_text, "Shots per point, or exact");
  app.add_option("--decoherence", decoherence_text, "on or off")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--timestamp", timestamp, "Timestamp recorded in artifacts");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Context ctx;
  ctx.sub = sub;
  try {
    if (threads > 0) set_thread_count(threads);
    ctx.config = config_path.empty() ? Json::object() : load_config(config_path);
    std::set<std::string> allowed{"device", "description"};
    for (const auto& s : cli_subcommands) allowed.insert(section_name(s));
    for (const auto& [k, v] : ctx.config.items())
      if (!allowed.count(k)) throw SimError(ErrorCode::config, "unknown config key " + k);
    ctx.device = ctx.config.contains("device") ? device_from_json(ctx.config.at("device")) : Device::nominal();
    if (shots_text != "exact") {
      try {
        std::size_t pos = 0;
        const long long n = std::stoll(shots_text, &pos);
        if (pos != shots_text.size() || n < 1) throw std::invalid_argument("shots");
        ctx.shots = static_cast<std::uint64_t>(n);
      } catch (const std::exception&) {
        throw SimError(ErrorCode::config, "--shots must be a positive integer or exact");
      }
    }
    const bool stochastic_default = sub == "rb" || sub == "pb";
    ctx.decoherence = decoherence_text.empty() ? stochastic_default : decoherence_text == "on";
    ctx.seed = seed;
    if (!seed && (stochastic_default || ctx.shots))
      throw SimError(ErrorCode::config, "--seed is required for " + sub + (ctx.shots ? " with shots" : ""));
    const Json hashed{{"subcommand", sub},
                      {"config", ctx.config},
                      {"shots", ctx.shots ? Json(*ctx.shots) : Json("exact")},
                      {"decoherence", ctx.decoherence}};
    ctx.hash = hex64(fnv1a64(hashed.dump()));
    ctx.timestamp = timestamp_from(timestamp);
    if (out_dir.empty()) {
      const char* env = std::getenv("TCSIM_OUT");
      out_dir = env && *env ? env : ".";
    }
    ctx.out = out_dir;
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec || !fs::is_directory(ctx.out)) throw SimError(ErrorCode::config, "output directory is not writable: " + out_dir);
  } catch (const SimError& e) {
    std::cerr << "tcsim: invalid configuration: " << e.what() << "\n";
    return 2;
  }

  try {
    dispatch(ctx);
  } catch (const SimError& e) {
    if (e.code() == ErrorCode::config) {
      std::cerr << "tcsim: invalid configuration: " << e.what() << "\n";
      return 2;
    }
    std::cerr << "tcsim: " << sub << " failed: " << e.what() << "\n";
    Json j = ctx.meta();
    j["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    std::ofstream(ctx.out / (sub + ".error.json")) << j.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "tcsim: " << sub << " failed: " << e.what() << "\n";
    Json j = ctx.meta();
    j["error"] = {{"code", "internal"}, {"message", e.what()}};
    std::ofstream(ctx.out / (sub + ".error.json")) << j.dump(2) << "\n";
    return 1;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> storage{"tcsim"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace tcsim
