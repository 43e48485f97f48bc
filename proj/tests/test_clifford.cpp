#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "tcsim/clifford.hpp"
#include "tcsim/errors.hpp"

using namespace tcsim;

namespace {

// Phase-free fingerprint: divide by the phase of the first nonzero entry and round.
std::vector<long long> fingerprint(const Mat4& u) {
  cplx ref = 0.0;
  for (int j = 0; j < 4 && ref == 0.0; ++j)
    for (int i = 0; i < 4; ++i)
      if (std::abs(u(i, j)) > 1e-6) {
        ref = u(i, j) / std::abs(u(i, j));
        break;
      }
  std::vector<long long> out;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      const cplx v = u(i, j) / ref;
      out.push_back(std::llround(v.real() * 1e6));
      out.push_back(std::llround(v.imag() * 1e6));
    }
  return out;
}

bool equal_up_to_phase(const Mat4& a, const Mat4& b, double tol = 1e-9) {
  return std::abs(phase_insensitive_overlap(a, b) - 1.0) < tol;
}

}  // namespace

TEST(Clifford, ClosureOracleMatchesGroup) {
  const double s = 1.0 / std::sqrt(2.0);
  Mat2 h;
  h << s, s, s, -s;
  Mat2 ph;
  ph << 1, 0, 0, cplx(0, 1);
  const Mat2 id = Mat2::Identity();
  const std::vector<Mat4> gens{kron(h, id), kron(id, h), kron(ph, id), kron(id, ph), cz_unitary()};
  std::set<std::vector<long long>> seen;
  std::queue<Mat4> todo;
  seen.insert(fingerprint(Mat4::Identity()));
  todo.push(Mat4::Identity());
  std::vector<Mat4> all;
  while (!todo.empty()) {
    const Mat4 u = todo.front();
    todo.pop();
    all.push_back(u);
    for (const Mat4& g : gens) {
      const Mat4 v = g * u;
      if (seen.insert(fingerprint(v)).second) todo.push(v);
    }
  }
  EXPECT_EQ(all.size(), 11520u);
  const CliffordGroup& grp = CliffordGroup::instance();
  ASSERT_EQ(grp.size(), 11520u);
  for (const Mat4& u : all) EXPECT_TRUE(grp.find(u).has_value());
}

TEST(Clifford, ElementsMatchTheirLayers) {
  const CliffordGroup& g = CliffordGroup::instance();
  EXPECT_TRUE(g[0].layers.empty());
  EXPECT_TRUE(equal_up_to_phase(g[0].unitary, Mat4::Identity()));
  double cz_total = 0.0;
  for (const auto& c : g.elements()) {
    Mat4 u = Mat4::Identity();
    for (const Layer& l : c.layers) u = layer_unitary(l) * u;
    ASSERT_TRUE(equal_up_to_phase(u, c.unitary)) << c.index;
    EXPECT_NEAR((c.unitary.adjoint() * c.unitary - Mat4::Identity()).cwiseAbs().maxCoeff(), 0.0, 1e-12);
    cz_total += c.cz_count();
  }
  EXPECT_NEAR(cz_total / static_cast<double>(g.size()), 1.5, 1e-12);
}

TEST(Clifford, InverseAndCompose) {
  const CliffordGroup& g = CliffordGroup::instance();
  for (std::size_t i = 0; i < g.size(); i += 37) {
    const std::size_t inv = g.inverse(i);
    EXPECT_TRUE(equal_up_to_phase(g[inv].unitary * g[i].unitary, Mat4::Identity()));
    const std::size_t j = (i * 7919) % g.size();
    const std::size_t c = g.compose(i, j);
    EXPECT_TRUE(equal_up_to_phase(g[c].unitary, g[j].unitary * g[i].unitary));
  }
}

TEST(Clifford, SingleQubitSet) {
  const auto c1 = single_qubit_cliffords();
  ASSERT_EQ(c1.size(), 24u);
  EXPECT_TRUE(c1[0].empty() || (c1[0].size() == 1 && c1[0][0] == Pulse1::id));
  std::set<std::vector<long long>> keys;
  for (const auto& seq : c1) {
    Mat2 u = Mat2::Identity();
    for (Pulse1 p : seq) u = pulse_unitary(p) * u;
    keys.insert(fingerprint(kron(u, Mat2::Identity())));
  }
  EXPECT_EQ(keys.size(), 24u);
}

TEST(RbSequence, ComposesToIdentity) {
  for (int m : {1, 2, 5, 20, 100}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const RbSequence seq = rb_sequence(m, std::nullopt, seed);
      EXPECT_EQ(seq.steps.size(), static_cast<std::size_t>(m));
      EXPECT_TRUE(equal_up_to_phase(sequence_unitary(seq), Mat4::Identity()));
    }
  }
}

TEST(RbSequence, InterleavedCZ) {
  const RbSequence seq = rb_sequence(10, cz_unitary(), 3);
  ASSERT_EQ(seq.steps.size(), 20u);
  for (std::size_t i = 0; i < seq.steps.size(); ++i) EXPECT_EQ(seq.steps[i].interleaved, i % 2 == 1);
  EXPECT_TRUE(equal_up_to_phase(sequence_unitary(seq), Mat4::Identity()));
  const RbSequence again = rb_sequence(10, cz_unitary(), 3);
  for (std::size_t i = 0; i < seq.steps.size(); ++i) EXPECT_EQ(seq.steps[i].element, again.steps[i].element);
  EXPECT_EQ(seq.recovery, again.recovery);
}

TEST(RbSequence, Errors) {
  Mat2 t;
  t << 1, 0, 0, std::polar(1.0, M_PI / 4);
  try {
    rb_sequence(5, kron(t, Mat2::Identity()), 1);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_interleave);
  }
  try {
    rb_sequence(0, std::nullopt, 1);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
  }
}

TEST(RbSequence, SeedsDiffer) {
  const RbSequence a = rb_sequence(30, std::nullopt, 1);
  const RbSequence b = rb_sequence(30, std::nullopt, 2);
  int same = 0;
  for (std::size_t i = 0; i < 30; ++i) same += a.steps[i].element == b.steps[i].element;
  EXPECT_LT(same, 5);
}
