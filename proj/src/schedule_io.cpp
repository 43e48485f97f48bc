#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tcsim/errors.hpp"
#include "tcsim/pulses.hpp"
#include "tcsim/units.hpp"

namespace tcsim {

namespace {

constexpr const char* kMagic = "# tcsim schedule v1";
constexpr const char* kHeader = "channel,shape,start_ns,duration_ns,amplitude,phase,rise_ns,drive_ghz";

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_num(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw SimError(ErrorCode::schedule, "line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

}  // namespace

void write_schedule(std::ostream& os, const Schedule& schedule) {
  os << kMagic << '\n';
  os << "duration_ns=" << num(to_ns(schedule.duration())) << '\n';
  os << kHeader << '\n';
  for (const auto& s : schedule.segments()) {
    os << to_string(s.channel) << ',' << to_string(s.shape) << ',' << num(to_ns(s.start)) << ','
       << num(to_ns(s.duration)) << ',' << num(s.amplitude) << ',' << num(s.phase) << ','
       << num(to_ns(s.rise)) << ',' << num(to_ghz(s.drive_frequency)) << '\n';
  }
}

Schedule read_schedule(std::istream& is) {
  std::string line;
  int lineno = 0;
  auto next = [&]() -> bool {
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next() || line != kMagic) throw SimError(ErrorCode::schedule, "missing schedule header");
  if (!next() || line.rfind("duration_ns=", 0) != 0)
    throw SimError(ErrorCode::schedule, "missing duration_ns line");
  Schedule sched(ns(parse_num(line.substr(12), lineno)));
  if (!next() || line != kHeader) throw SimError(ErrorCode::schedule, "missing column header");
  while (next()) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 8)
      throw SimError(ErrorCode::schedule, "line " + std::to_string(lineno) + ": expected 8 fields");
    PulseSegment s;
    s.channel = channel_from_string(f[0]);
    s.shape = shape_from_string(f[1]);
    s.start = ns(parse_num(f[2], lineno));
    s.duration = ns(parse_num(f[3], lineno));
    s.amplitude = parse_num(f[4], lineno);
    s.phase = parse_num(f[5], lineno);
    s.rise = ns(parse_num(f[6], lineno));
    s.drive_frequency = ghz(parse_num(f[7], lineno));
    sched.add(s);
  }
  sched.validate();
  return sched;
}

}  // namespace tcsim
