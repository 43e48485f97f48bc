#include "tcsim/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "tcsim/errors.hpp"
#include "tcsim/experiments.hpp"
#include "tcsim/units.hpp"

namespace tcsim {

namespace {

const std::vector<std::string> device_keys{"omega_max_ghz", "alpha_mhz", "g_1c_mhz", "g_2c_mhz", "g_12_mhz",
                                           "t1_us", "t2_us", "dims", "idle_ghz", "flux_period_v"};

std::array<double, 3> triple(const Json& j, const std::string& key, std::array<double, 3> fallback,
                             double (*unit)(double)) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 3) throw SimError(ErrorCode::config, key + " must be an array of 3 numbers");
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = unit(v.at(i).get<double>());
  return out;
}

double scalar(const Json& j, const std::string& key, double fallback, double (*unit)(double)) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw SimError(ErrorCode::config, key + " must be a number");
  return unit(j.at(key).get<double>());
}

double as_ghz(double v) { return ghz(v); }
double as_mhz(double v) { return mhz(v); }
double as_us(double v) { return us(v); }
double as_is(double v) { return v; }

}  // namespace

Device device_from_json(const Json& j) {
  if (!j.is_object()) throw SimError(ErrorCode::config, "device must be an object");
  for (const auto& [k, v] : j.items())
    if (std::find(device_keys.begin(), device_keys.end(), k) == device_keys.end())
      throw SimError(ErrorCode::config, "unknown device key: " + k);
  try {
    Device d = Device::nominal();
    DeviceParams& p = d.params;
    p.omega_max = triple(j, "omega_max_ghz", p.omega_max, as_ghz);
    p.alpha = triple(j, "alpha_mhz", p.alpha, as_mhz);
    p.g_1c = scalar(j, "g_1c_mhz", p.g_1c, as_mhz);
    p.g_2c = scalar(j, "g_2c_mhz", p.g_2c, as_mhz);
    p.g_12 = scalar(j, "g_12_mhz", p.g_12, as_mhz);
    p.t1 = triple(j, "t1_us", p.t1, as_us);
    p.t2 = triple(j, "t2_us", p.t2, as_us);
    if (j.contains("dims")) {
      const Json& v = j.at("dims");
      if (!v.is_array() || v.size() != 3) throw SimError(ErrorCode::config, "dims must be an array of 3 integers");
      for (std::size_t i = 0; i < 3; ++i) p.dims[i] = v.at(i).get<int>();
    }
    p.validate();
    const Frequencies nominal_idle = Device::nominal_idle();
    const auto idle = triple(j, "idle_ghz", {nominal_idle.q1, nominal_idle.q2, nominal_idle.coupler}, as_ghz);
    const double period = scalar(j, "flux_period_v", 1.0, as_is);
    if (!(period > 0.0)) throw SimError(ErrorCode::config, "flux_period_v must be positive");
    d.flux = FluxMap::for_idle(p, Frequencies{idle[0], idle[1], idle[2]}, period);
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw SimError(ErrorCode::config, std::string("device: ") + e.what());
  } catch (const SimError& e) {
    throw SimError(ErrorCode::config, e.what());
  }
}

Json device_to_json(const Device& d) {
  const DeviceParams& p = d.params;
  auto arr = [](const std::array<double, 3>& a, double (*unit)(double)) {
    return Json::array({unit(a[0]), unit(a[1]), unit(a[2])});
  };
  const Frequencies idle = d.idle();
  return Json{{"omega_max_ghz", arr(p.omega_max, to_ghz)},
              {"alpha_mhz", arr(p.alpha, to_mhz)},
              {"g_1c_mhz", to_mhz(p.g_1c)},
              {"g_2c_mhz", to_mhz(p.g_2c)},
              {"g_12_mhz", to_mhz(p.g_12)},
              {"t1_us", arr(p.t1, to_us)},
              {"t2_us", arr(p.t2, to_us)},
              {"dims", Json::array({p.dims[0], p.dims[1], p.dims[2]})},
              {"idle_ghz", Json::array({to_ghz(idle.q1), to_ghz(idle.q2), to_ghz(idle.coupler)})},
              {"flux_period_v", d.flux[Mode::coupler].v_period}};
}

std::vector<double> grid_from_json(const Json& j, const std::string& name) {
  try {
    if (j.is_number()) return {j.get<double>()};
    if (j.is_array()) {
      std::vector<double> v;
      for (const auto& x : j) v.push_back(x.get<double>());
      if (v.empty()) throw SimError(ErrorCode::config, name + " grid is empty");
      return v;
    }
    if (j.is_object()) {
      const int points = j.at("points").get<int>();
      if (points < 1) throw SimError(ErrorCode::config, name + ".points must be at least 1");
      return linspace(j.at("start").get<double>(), j.at("stop").get<double>(), static_cast<std::size_t>(points));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SimError(ErrorCode::config, name + ": " + e.what());
  }
  throw SimError(ErrorCode::config, name + " must be a number, an array or {start, stop, points}");
}

Json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SimError(ErrorCode::config, "cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SimError(ErrorCode::config, "config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw SimError(ErrorCode::config, "config must be a JSON object");
  if (j.contains("device_file")) {
    if (j.contains("device")) throw SimError(ErrorCode::config, "give either device or device_file");
    const auto dev_path = path.parent_path() / j.at("device_file").get<std::string>();
    std::ifstream din(dev_path);
    if (!din) throw SimError(ErrorCode::config, "cannot open device file " + dev_path.string());
    try {
      j["device"] = Json::parse(din);
    } catch (const nlohmann::json::exception& e) {
      throw SimError(ErrorCode::config, "device file is not valid JSON: " + std::string(e.what()));
    }
    j.erase("device_file");
  }
  return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace tcsim
