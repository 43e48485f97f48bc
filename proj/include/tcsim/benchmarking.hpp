#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tcsim/clifford.hpp"
#include "tcsim/evolution.hpp"

namespace tcsim {

struct SequenceResult {
  double fidelity = 0.0;
  double purity = 1.0;  // before the recovery gate
};

/// Runs whole RB sequences. Implementations are const and safe to call concurrently.
class RbBackend {
 public:
  virtual ~RbBackend() = default;
  virtual std::string name() const = 0;
  virtual bool supports_density() const = 0;
  virtual SequenceResult run(const RbSequence& seq, bool want_purity) const = 0;
};

class IdealBackend final : public RbBackend {
 public:
  explicit IdealBackend(bool density = true) : density_(density) {}
  std::string name() const override { return density_ ? "ideal-density" : "ideal-vector"; }
  bool supports_density() const override { return density_; }
  SequenceResult run(const RbSequence& seq, bool want_purity) const override;

 private:
  bool density_;
};

/// rho -> (1 - d) rho + d I/4 after every element; interleaved elements use their own strength.
class DepolarizingBackend final : public RbBackend {
 public:
  explicit DepolarizingBackend(double d, double d_interleaved = 0.0);
  std::string name() const override { return "depolarizing"; }
  bool supports_density() const override { return true; }
  SequenceResult run(const RbSequence& seq, bool want_purity) const override;

 private:
  double d_;
  double d_interleaved_;
};

/// Rx(theta) on both qubits after every element.
class OverRotationBackend final : public RbBackend {
 public:
  explicit OverRotationBackend(double theta) : theta_(theta) {}
  std::string name() const override { return "over-rotation"; }
  bool supports_density() const override { return true; }
  SequenceResult run(const RbSequence& seq, bool want_purity) const override;

 private:
  double theta_;
};

struct LindbladOptions {
  bool decoherence = true;
  double single_qubit_time = 20e-9;
  double dt = 0.1e-9;
  double single_qubit_depolarizing = 0.0;  // per pulse, per qubit
};

/// Full three-mode density simulation: ideal local pulses followed by an idle, CZ as a simulated channel.
class LindbladBackend final : public RbBackend {
 public:
  LindbladBackend(const SystemModel& model, const Schedule& cz, const LindbladOptions& options = {},
                  Exec exec = Exec::parallel);
  std::string name() const override { return "lindblad"; }
  bool supports_density() const override { return true; }
  SequenceResult run(const RbSequence& seq, bool want_purity) const override;

  const GateResult& cz_result() const { return cz_result_; }

 private:
  CMat apply_layer(const CMat& rho, const Layer& layer) const;

  const SystemModel& model_;
  LindbladOptions options_;
  GateResult cz_result_;
  Superoperator cz_;
  Superoperator idle_;
  std::vector<CMat> locals_;  // 7 x 7 pulse pairs
  std::array<CMat, 3> paulis_q1_;
  std::array<CMat, 3> paulis_q2_;
};

struct RbConfig {
  std::vector<int> lengths;
  std::size_t samples = 0;
  std::optional<Mat4> interleave;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> shots;
};

struct RbPoint {
  int m = 0;
  double mean = 0.0;
  double std = 0.0;
  std::vector<double> values;
};

using RbTable = std::vector<RbPoint>;

/// Throws SimError(config) on empty lengths, samples = 0 or m < 1.
void validate(const RbConfig& config);

RbTable run_rb(const RbConfig& config, const RbBackend& backend, Exec exec = Exec::parallel);
RbTable run_pb(const RbConfig& config, const RbBackend& backend, Exec exec = Exec::parallel);

struct RbPbTables {
  RbTable fidelity;
  RbTable purity;
};

/// Both tables from one pass over the same sequences.
RbPbTables run_rb_pb(const RbConfig& config, const RbBackend& backend, Exec exec = Exec::parallel);

enum class DecayModel { fidelity, purity };

struct DecayFit {
  DecayModel model = DecayModel::fidelity;
  double amplitude = 0.0;
  double decay = 0.0;  // p or u
  double offset = 0.0;
  RMat covariance = RMat::Zero(3, 3);  // (A, decay, B)
  double residual_norm = 0.0;

  double decay_sigma() const;
  double evaluate(double m) const;
};

DecayFit fit_decay(const RbTable& table, DecayModel model);
DecayFit fit_decay(const std::vector<double>& m, const std::vector<double>& y, DecayModel model);

struct Estimate {
  double value = 0.0;
  double sigma = 0.0;
};

struct ErrorReport {
  Estimate r_ref;
  std::optional<Estimate> r_int;
  std::optional<Estimate> r_cz;
  std::optional<Estimate> f_cz;
  std::optional<Estimate> r_incoherent_ref;
  std::optional<Estimate> r_incoherent_int;
  std::optional<double> incoherent_fraction;
};

double rb_error(double p);
double interleaved_error(double p_ref, double p_int);
double incoherent_error(double u);

ErrorReport error_rates(const DecayFit& ref, const std::optional<DecayFit>& interleaved = std::nullopt,
                        const std::optional<DecayFit>& purity_ref = std::nullopt,
                        const std::optional<DecayFit>& purity_int = std::nullopt);

}  // namespace tcsim
