#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tcsim/linalg.hpp"

namespace tcsim {

enum class Pulse1 { id, x90, mx90, y90, my90, x180, y180 };

std::string to_string(Pulse1 p);
Mat2 pulse_unitary(Pulse1 p);

/// One time slice: simultaneous single-qubit pulses, or a CZ.
struct Layer {
  bool cz = false;
  Pulse1 q1 = Pulse1::id;
  Pulse1 q2 = Pulse1::id;
};

/// Basis |q1 q2> with Q1 as the most significant bit.
Mat4 kron(const Mat2& a, const Mat2& b);
Mat4 cz_unitary();
Mat4 layer_unitary(const Layer& layer);

struct CliffordCircuit {
  std::size_t index = 0;
  std::vector<Layer> layers;  // time order
  Mat4 unitary = Mat4::Identity();

  int cz_count() const;
};

/// |Tr(U^dag V)| / 4
double phase_insensitive_overlap(const Mat4& u, const Mat4& v);

class CliffordGroup {
 public:
  static const CliffordGroup& instance();

  std::size_t size() const { return elements_.size(); }
  const CliffordCircuit& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<CliffordCircuit>& elements() const { return elements_; }

  std::optional<std::size_t> find(const Mat4& u) const;
  std::size_t inverse(std::size_t i) const;
  /// Element equal to applying a then b.
  std::size_t compose(std::size_t a, std::size_t b) const;

  static std::string key(const Mat4& u);

 private:
  CliffordGroup();
  void insert(CliffordCircuit c);

  std::vector<CliffordCircuit> elements_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// The 24 single-qubit Cliffords as shortest pulse strings, identity first.
std::vector<std::vector<Pulse1>> single_qubit_cliffords();

struct SequenceStep {
  std::size_t element = 0;
  bool interleaved = false;
};

struct RbSequence {
  std::vector<SequenceStep> steps;
  std::size_t recovery = 0;
};

/// m random elements, each followed by the interleaved gate when given.
RbSequence rb_sequence(int m, const std::optional<Mat4>& interleave, std::uint64_t seed);

Mat4 sequence_unitary(const RbSequence& seq, bool with_recovery = true);

}  // namespace tcsim
