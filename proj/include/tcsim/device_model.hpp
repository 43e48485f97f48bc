#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tcsim/linalg.hpp"

namespace tcsim {

/// Physical element. Parameter arrays are indexed in this order.
enum class Mode : int { q1 = 0, q2 = 1, coupler = 2 };

inline constexpr std::array<Mode, 3> all_modes{Mode::q1, Mode::q2, Mode::coupler};

constexpr int index_of(Mode m) { return static_cast<int>(m); }
std::string to_string(Mode m);

struct Frequencies {
  double q1 = 0.0;
  double q2 = 0.0;
  double coupler = 0.0;

  double operator[](Mode m) const;
  double& operator[](Mode m);
};

struct DeviceParams {
  std::array<double, 3> omega_max{};  // rad/s
  std::array<double, 3> alpha{};      // rad/s, negative
  double g_1c = 0.0;
  double g_2c = 0.0;
  double g_12 = 0.0;
  std::array<double, 3> t1{};  // s; 0 disables relaxation
  std::array<double, 3> t2{};  // s; 0 means "same as T1"
  std::array<int, 3> dims{3, 3, 3};
  std::size_t max_dimension = 4096;

  static DeviceParams nominal();

  /// Throws SimError(config) on broken invariants.
  void validate(bool require_third_level = false) const;

  /// Pure dephasing time from 1/Tphi = 1/T2 - 1/(2 T1); infinity when absent.
  double t_phi(Mode m) const;
  double relaxation_rate(Mode m) const;
  double dephasing_rate(Mode m) const;  // 1/Tphi
};

/// Product space Q1 x C x Q2 with basis labels |n1, nc, n2>.
class HilbertSpace {
 public:
  explicit HilbertSpace(const std::array<int, 3>& dims);

  std::size_t dimension() const { return size_; }
  int dim(Mode m) const;
  std::size_t index(int n1, int nc, int n2) const;
  /// Occupation of each mode for basis index i, returned as (n1, nc, n2).
  std::array<int, 3> label(std::size_t i) const;
  int occupation(std::size_t i, Mode m) const;
  int excitations(std::size_t i) const;
  std::string label_string(std::size_t i) const;

  /// Embeds a single-mode operator at its tensor slot.
  RMat embed(const RMat& op, Mode m) const;

  /// Basis indices grouped by total excitation number, ascending within each group.
  const std::vector<std::vector<std::size_t>>& sectors() const { return sectors_; }
  /// (sector, position within sector) of basis index i.
  std::pair<int, std::size_t> sector_position(std::size_t i) const;

 private:
  int d1_, dc_, d2_;
  std::size_t size_;
  std::vector<std::vector<std::size_t>> sectors_;
  std::vector<std::size_t> position_;
};

RMat annihilation_operator(int dim);

RMat build_static_hamiltonian(const DeviceParams& params, const Frequencies& freqs);

double effective_coupling(const DeviceParams& params, double omega1, double omega2,
                          double omega_c);

struct FluxElement {
  bool tunable = true;
  double v_period = 1.0;  // V
  double v_offset = 0.0;  // V
};

struct FluxMap {
  std::array<FluxElement, 3> elements{};

  const FluxElement& operator[](Mode m) const { return elements[index_of(m)]; }
  FluxElement& operator[](Mode m) { return elements[index_of(m)]; }

  /// Offsets chosen so that V = 0 lands each element on its idle frequency.
  static FluxMap for_idle(const DeviceParams& params, const Frequencies& idle,
                          double v_period = 1.0);
};

double flux_to_frequency(const FluxMap& map, const DeviceParams& params, Mode m, double volts);

/// Inverse on the branch where frequency decreases with V.
double frequency_to_flux(const FluxMap& map, const DeviceParams& params, Mode m, double omega);

double compute_zz(const DeviceParams& params, const Frequencies& freqs);

struct Device {
  DeviceParams params;
  FluxMap flux;

  static Device nominal();
  static Frequencies nominal_idle();
  Frequencies frequencies_at(const std::array<double, 3>& volts) const;
  Frequencies idle() const { return frequencies_at({0.0, 0.0, 0.0}); }
};

}  // namespace tcsim
