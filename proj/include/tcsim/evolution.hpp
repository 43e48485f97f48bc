#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "tcsim/device_model.hpp"
#include "tcsim/parallel.hpp"
#include "tcsim/pulses.hpp"
#include "tcsim/spectrum.hpp"

namespace tcsim {

enum class Frame { lab, rotating };

/// Device plus cached operators: sector layout, idle dressed basis and frame energies.
class SystemModel {
 public:
  explicit SystemModel(Device device);

  const Device& device() const { return device_; }
  const DeviceParams& params() const { return device_.params; }
  const HilbertSpace& space() const { return space_; }
  Frequencies idle() const { return idle_; }
  Frequencies frequencies(const SampledControl& c, std::size_t step) const;

  int sector_count() const { return static_cast<int>(space_.sectors().size()); }
  std::size_t sector_size(int s) const { return space_.sectors()[static_cast<std::size_t>(s)].size(); }
  RMat sector_hamiltonian(int s, const Frequencies& f) const;
  RMat hamiltonian(const Frequencies& f) const;

  const DressedStates& dressed() const { return dressed_; }
  /// Dressed eigenvectors restricted to sector s (columns ordered like the sector).
  const RMat& dressed_block(int s) const { return dressed_blocks_[static_cast<std::size_t>(s)]; }
  /// Rotating frame is H - reference_frequency * N.
  double reference_frequency() const { return omega_ref_; }
  /// E000 + n1*w1 + nc*wc + n2*w2 with the dressed single-excitation energies.
  const RVec& frame_energies() const { return frame_energies_; }
  /// |000>, |001>, |100>, |101>.
  std::array<std::size_t, 4> computational_indices() const;

  // Per-sector diagonal operators, used by the density kernel.
  const RVec& sector_occupation(int s, Mode m) const;
  const RMat& sector_lowering(int s, Mode m) const;  // block of a_m from sector s to s-1

 private:
  struct SectorTerms {
    std::array<RVec, 3> occupation;  // by Mode
    RVec anharmonic;
    RMat coupling;
    std::array<RMat, 3> lowering;
  };

  Device device_;
  HilbertSpace space_;
  Frequencies idle_;
  std::vector<SectorTerms> terms_;
  DressedStates dressed_;
  std::vector<RMat> dressed_blocks_;
  double omega_ref_ = 0.0;
  RVec frame_energies_;
};

/// Block-diagonal unitary, one block per excitation sector.
struct BlockUnitary {
  std::vector<CMat> blocks;
  CMat dense(const HilbertSpace& space) const;
};

/// max_sector < 0 propagates every sector; skipped sectors are left empty.
BlockUnitary block_propagator(const SampledControl& controls, const SystemModel& model, Frame frame,
                              int max_sector = -1);
CMat propagator(const SampledControl& controls, const SystemModel& model, Frame frame = Frame::rotating);

/// Rewrites a propagator in the dressed idle basis with the linear frame removed.
CMat to_computational_frame(const CMat& u, const SystemModel& model, Frame frame, double duration);

struct GateResult {
  Mat4 block = Mat4::Identity();  // |000>, |001>, |100>, |101>
  double leakage = 0.0;           // 1 - min column norm^2 inside the block
  double qubit_leakage = 0.0;     // same with the coupler traced out
  double phi_c = 0.0;
  double phi_1 = 0.0;
  double phi_2 = 0.0;
  double global_phase = 0.0;  // arg of the |000> entry
};

GateResult computational_projection(const CMat& u, const HilbertSpace& space);
GateResult simulate_gate(const SystemModel& model, const SampledControl& controls,
                         Frame frame = Frame::rotating);

struct VirtualZ {
  double phi_1 = 0.0;
  double phi_2 = 0.0;
  double global = 0.0;
};

VirtualZ compensation_for(const GateResult& result);
Mat4 virtual_z_compensation(const GateResult& result);
/// Applies exp(-i (n1 phi_1 + n2 phi_2 + global)) on the left of a full-space operator.
CMat apply_virtual_z(const CMat& u, const HilbertSpace& space, const VirtualZ& vz);

Mat4 cz_target();
double average_gate_fidelity(const Mat4& m, const Mat4& target);

/// Qubit unitaries on levels 0/1, identity on higher levels and on the coupler.
CMat local_unitary(const HilbertSpace& space, const Mat2& u1, const Mat2& u2);

class QuantumState {
 public:
  enum class Kind { vector, density };

  static QuantumState from_vector(CVec psi);
  static QuantumState from_density(CMat rho);
  static QuantumState basis(const HilbertSpace& space, int n1, int nc, int n2, Kind kind = Kind::vector);

  Kind kind() const { return kind_; }
  std::size_t dimension() const;
  const CVec& vector() const;
  CMat density() const;
  RVec populations() const;
  QuantumState as_density() const { return from_density(density()); }

  /// Throws SimError(config) when norm, trace, hermiticity or positivity is off by more than tol.
  void validate(double tol = 1e-9) const;

 private:
  Kind kind_ = Kind::vector;
  CVec psi_;
  CMat rho_;
};

QuantumState evolve_density(const QuantumState& rho0, const SampledControl& controls,
                            const SystemModel& model, bool include_decoherence,
                            Frame frame = Frame::rotating);

/// Densities after each requested step count (ascending), same frame convention as evolve_density.
std::vector<CMat> evolve_density_trajectory(const QuantumState& rho0, const SampledControl& controls,
                                           const SystemModel& model, bool include_decoherence,
                                           Frame frame, const std::vector<std::size_t>& record_steps);

/// Counts keyed by qubit levels "n1n2" with the coupler traced out.
std::map<std::string, std::uint64_t> measure(const QuantumState& state, const HilbertSpace& space,
                                             std::uint64_t shots, double assignment_error,
                                             std::uint64_t seed);

/// Column-stacked superoperator acting on density matrices in the computational frame.
struct Superoperator {
  std::size_t dim = 0;
  Eigen::SparseMatrix<cplx> matrix;
  CMat apply(const CMat& rho) const;
};

struct ChannelOptions {
  bool include_decoherence = true;
  Frame frame = Frame::rotating;
  VirtualZ virtual_z{};
  /// Inputs |j><k| with a sector above this limit evolve without dissipation (-1: no limit).
  int max_dissipative_sector = -1;
};

Superoperator gate_superoperator(const SystemModel& model, const SampledControl& controls,
                                 const ChannelOptions& options, Exec exec = Exec::parallel);

/// Density matrix after the schedule, expressed in the computational frame.
CMat evolve_in_computational_frame(const CMat& rho, const SystemModel& model,
                                   const SampledControl& controls, const ChannelOptions& options);

}  // namespace tcsim
