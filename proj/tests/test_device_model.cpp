#include <gtest/gtest.h>

#include <cmath>

#include "tcsim/device_model.hpp"
#include "tcsim/errors.hpp"
#include "tcsim/rng.hpp"
#include "tcsim/spectrum.hpp"
#include "tcsim/units.hpp"

using namespace tcsim;

namespace {

DeviceParams random_params(Rng& rng) {
  DeviceParams p = DeviceParams::nominal();
  for (int i = 0; i < 3; ++i) {
    p.omega_max[i] = ghz(4.0 + 2.0 * rng.uniform());
    p.alpha[i] = -mhz(100.0 + 250.0 * rng.uniform());
    p.dims[i] = 2 + static_cast<int>(rng.index(3));
  }
  p.g_1c = mhz(50.0 + 100.0 * rng.uniform());
  p.g_2c = mhz(50.0 + 100.0 * rng.uniform());
  p.g_12 = mhz(1.0 + 10.0 * rng.uniform());
  return p;
}

Frequencies random_freqs(Rng& rng) {
  return {ghz(3.5 + 2.0 * rng.uniform()), ghz(3.5 + 2.0 * rng.uniform()), ghz(4.0 + 2.0 * rng.uniform())};
}

// Bisection on the monotone branch, independent of the library inverse.
double bisect_flux(const FluxMap& map, const DeviceParams& p, Mode m, double target) {
  const double half = map[m].v_period / 2.0;
  double lo = -map[m].v_offset, hi = -map[m].v_offset + half;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (flux_to_frequency(map, p, m, mid) > target) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Annihilation, Entries) {
  const RMat a2 = annihilation_operator(2);
  EXPECT_DOUBLE_EQ(a2(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(a2.sum(), 1.0);
  const RMat a3 = annihilation_operator(3);
  EXPECT_DOUBLE_EQ(a3(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(a3(1, 2), std::sqrt(2.0));
  const RMat n = a3.transpose() * a3;
  EXPECT_TRUE(n.isApprox(RVec::LinSpaced(3, 0, 2).asDiagonal().toDenseMatrix()));
}

TEST(Annihilation, RejectsSmallDimension) {
  try {
    annihilation_operator(1);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_dimension);
  }
}

TEST(Annihilation, TruncatedCommutator) {
  for (int d = 2; d <= 6; ++d) {
    const RMat a = annihilation_operator(d);
    const RMat c = a * a.transpose() - a.transpose() * a;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double expect = i != j ? 0.0 : (i == d - 1 ? 1.0 - d : 1.0);
        EXPECT_NEAR(c(i, j), expect, 1e-14);
      }
  }
}

TEST(Hamiltonian, DecoupledIsDiagonalSum) {
  DeviceParams p = DeviceParams::nominal();
  p.g_1c = p.g_2c = p.g_12 = 0.0;
  p.dims = {2, 2, 2};
  const Frequencies f{ghz(4.2), ghz(4.6), ghz(5.3)};
  const RMat h = build_static_hamiltonian(p, f);
  const HilbertSpace space(p.dims);
  ASSERT_EQ(h.rows(), 8);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto l = space.label(i);
    const double e = l[0] * f.q1 + l[1] * f.coupler + l[2] * f.q2;
    EXPECT_NEAR(h(i, i), e, 1e-3);
  }
  EXPECT_NEAR((h - RMat(h.diagonal().asDiagonal())).norm(), 0.0, 1e-12);
}

TEST(Hamiltonian, HermitianForRandomParams) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const DeviceParams p = random_params(rng);
    const RMat h = build_static_hamiltonian(p, random_freqs(rng));
    EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-12 * h.cwiseAbs().maxCoeff());
  }
}

TEST(Hamiltonian, MatchesKroneckerConstruction) {
  DeviceParams p = DeviceParams::nominal();
  const Frequencies f{ghz(4.3), ghz(4.7), ghz(5.4)};
  const RMat a = annihilation_operator(3);
  const RMat id = RMat::Identity(3, 3);
  auto kron3 = [](const RMat& x, const RMat& y, const RMat& z) {
    RMat xy(x.rows() * y.rows(), x.cols() * y.cols());
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < x.cols(); ++j) xy.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    RMat out(xy.rows() * z.rows(), xy.cols() * z.cols());
    for (int i = 0; i < xy.rows(); ++i)
      for (int j = 0; j < xy.cols(); ++j) out.block(i * z.rows(), j * z.cols(), z.rows(), z.cols()) = xy(i, j) * z;
    return out;
  };
  const RMat a1 = kron3(a, id, id), ac = kron3(id, a, id), a2 = kron3(id, id, a);
  auto mode_terms = [](const RMat& op, double w, double al) {
    const RMat ad = op.transpose();
    return RMat(w * ad * op + 0.5 * al * ad * ad * op * op);
  };
  auto exch = [](const RMat& x, const RMat& y) { return RMat(x.transpose() * y + x * y.transpose()); };
  const RMat expect = mode_terms(a1, f.q1, p.alpha[0]) + mode_terms(a2, f.q2, p.alpha[1]) +
                      mode_terms(ac, f.coupler, p.alpha[2]) + p.g_1c * exch(a1, ac) + p.g_2c * exch(a2, ac) +
                      p.g_12 * exch(a1, a2);
  const RMat h = build_static_hamiltonian(p, f);
  EXPECT_LT((h - expect).cwiseAbs().maxCoeff(), 1e-6 * expect.cwiseAbs().maxCoeff());
}

TEST(Hamiltonian, TwoExcitationLevelShiftsWithCoupling) {
  DeviceParams p = DeviceParams::nominal();
  const Frequencies f{ghz(4.283), ghz(4.679), ghz(5.419)};
  DeviceParams bare = p;
  bare.g_1c = bare.g_2c = bare.g_12 = 0.0;
  const Eigen::SelfAdjointEigenSolver<RMat> es(build_static_hamiltonian(p, f));
  const double target = f.q1 + f.q2;
  double nearest = es.eigenvalues()(0);
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i) - target) < std::abs(nearest - target)) nearest = es.eigenvalues()(i);
  EXPECT_GT(std::abs(nearest - target), mhz(0.1));
  EXPECT_LT(std::abs(nearest - target), mhz(100.0));
}

TEST(Hamiltonian, ResourceCap) {
  DeviceParams p = DeviceParams::nominal();
  p.dims = {10, 10, 10};
  p.max_dimension = 500;
  try {
    build_static_hamiltonian(p, {ghz(4), ghz(4.5), ghz(5)});
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::resource);
  }
}

TEST(EffectiveCoupling, DirectOnlyWithoutCoupler) {
  DeviceParams p = DeviceParams::nominal();
  p.g_1c = p.g_2c = 0.0;
  EXPECT_DOUBLE_EQ(effective_coupling(p, ghz(4.1), ghz(4.1), ghz(5.4)), p.g_12);
}

TEST(EffectiveCoupling, ResonancePoint) {
  const DeviceParams p = DeviceParams::nominal();
  const double w = ghz(4.110);
  const double oracle = 100.0 * 100.0 / 2.0 * 2.0 / (4110.0 - 5419.0) + 5.0;
  EXPECT_NEAR(to_mhz(effective_coupling(p, w, w, ghz(5.419))), oracle, 1e-9);
  EXPECT_NEAR(to_mhz(effective_coupling(p, w, w, ghz(5.419))), -2.64, 0.01);
  EXPECT_NEAR(to_mhz(effective_coupling(p, w, w, ghz(4.8))), -9.49, 0.01);
}

TEST(EffectiveCoupling, SingularAtResonance) {
  const DeviceParams p = DeviceParams::nominal();
  try {
    effective_coupling(p, ghz(4.5), ghz(4.1), ghz(4.5));
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::singularity);
  }
}

TEST(EffectiveCoupling, AgreesWithSplittingInDispersiveRegime) {
  DeviceParams p = DeviceParams::nominal();
  const HilbertSpace space(p.dims);
  const double w = ghz(4.110);
  for (double fc : {4.8, 5.0, 5.2, 5.419}) {
    const Frequencies f{w, w, ghz(fc)};
    const RMat h = build_static_hamiltonian(p, f);
    const auto& sector = space.sectors()[1];
    RMat block(sector.size(), sector.size());
    for (std::size_t i = 0; i < sector.size(); ++i)
      for (std::size_t j = 0; j < sector.size(); ++j) block(i, j) = h(sector[i], sector[j]);
    const Eigen::SelfAdjointEigenSolver<RMat> es(block);
    const double split = es.eigenvalues()(1) - es.eigenvalues()(0);
    const double g = effective_coupling(p, w, w, ghz(fc));
    EXPECT_NEAR(split / 2.0, std::abs(g), 0.1 * std::abs(g)) << fc;
  }
}

TEST(Flux, SweetSpotAndMonotone) {
  const DeviceParams p = DeviceParams::nominal();
  const FluxMap map;
  for (Mode m : all_modes) {
    EXPECT_NEAR(flux_to_frequency(map, p, m, 0.0), p.omega_max[index_of(m)], 1e-3);
    double prev = flux_to_frequency(map, p, m, 0.0);
    for (int i = 1; i < 50; ++i) {
      const double v = 0.5 * i / 50.0;
      const double w = flux_to_frequency(map, p, m, v);
      EXPECT_LT(w, prev);
      prev = w;
    }
  }
}

TEST(Flux, NonTunableRejected) {
  const DeviceParams p = DeviceParams::nominal();
  FluxMap map;
  map[Mode::q1].tunable = false;
  try {
    flux_to_frequency(map, p, Mode::q1, 0.1);
    FAIL();
  } catch (const SimError& e) {
    EXPECT_EQ(e.code(), ErrorCode::unsupported_control);
  }
}

TEST(Flux, InverseRoundTripAgainstBisection) {
  const Device d = Device::nominal();
  const double target = ghz(4.8);
  const double v_lib = frequency_to_flux(d.flux, d.params, Mode::coupler, target);
  const double v_ref = bisect_flux(d.flux, d.params, Mode::coupler, target);
  EXPECT_NEAR(to_mhz(flux_to_frequency(d.flux, d.params, Mode::coupler, v_lib)) * 1e3, to_ghz(target) * 1e6, 1.0);
  EXPECT_NEAR(v_lib, v_ref, 1e-9);
  for (double f : {4.0, 4.4, 5.0, 5.3}) {
    const double v = frequency_to_flux(d.flux, d.params, Mode::coupler, ghz(f));
    EXPECT_NEAR(to_ghz(flux_to_frequency(d.flux, d.params, Mode::coupler, v)), f, 1e-6);
  }
}

TEST(Flux, IdleOffsetsLandOnIdleFrequencies) {
  const Device d = Device::nominal();
  const Frequencies idle = d.idle();
  EXPECT_NEAR(to_ghz(idle.q1), 4.283, 1e-9);
  EXPECT_NEAR(to_ghz(idle.q2), 4.679, 1e-9);
  EXPECT_NEAR(to_ghz(idle.coupler), 5.419, 1e-9);
}

TEST(ZZ, ZeroWithoutCoupling) {
  DeviceParams p = DeviceParams::nominal();
  p.g_1c = p.g_2c = p.g_12 = 0.0;
  EXPECT_NEAR(compute_zz(p, Device::nominal_idle()), 0.0, 1e-3);
}

TEST(ZZ, SmallAtIdlePoint) {
  const double zz = compute_zz(DeviceParams::nominal(), Device::nominal_idle());
  EXPECT_LT(std::abs(to_mhz(zz)), 0.5);
}

TEST(ZZ, GrowsAsCouplerApproaches) {
  const DeviceParams p = DeviceParams::nominal();
  double prev = 0.0;
  for (double fc : {6.5, 6.0, 5.6, 5.3, 5.1}) {
    const double zz = std::abs(compute_zz(p, {ghz(4.283), ghz(4.679), ghz(fc)}));
    EXPECT_GT(zz, prev) << fc;
    prev = zz;
  }
}

TEST(HilbertSpace, IndexLabelRoundTrip) {
  const HilbertSpace s({3, 4, 2});
  EXPECT_EQ(s.dimension(), 24u);
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    const auto l = s.label(i);
    EXPECT_EQ(s.index(l[0], l[1], l[2]), i);
  }
  EXPECT_EQ(s.index(1, 0, 0), 8u);
  std::size_t total = 0;
  for (const auto& sec : s.sectors()) total += sec.size();
  EXPECT_EQ(total, s.dimension());
}

TEST(DeviceParams, Validation) {
  DeviceParams p = DeviceParams::nominal();
  EXPECT_NO_THROW(p.validate(true));
  p.alpha[0] = mhz(10);
  EXPECT_THROW(p.validate(), SimError);
  p = DeviceParams::nominal();
  p.dims[1] = 2;
  EXPECT_NO_THROW(p.validate());
  EXPECT_THROW(p.validate(true), SimError);
}

TEST(Spectrum, LabelsFollowBareStatesWhenDecoupled) {
  DeviceParams p = DeviceParams::nominal();
  p.g_1c = p.g_2c = p.g_12 = 0.0;
  const HilbertSpace s(p.dims);
  const DressedStates d = label_eigenstates(build_static_hamiltonian(p, Device::nominal_idle()), s);
  for (Eigen::Index i = 0; i < d.overlaps.size(); ++i) EXPECT_NEAR(d.overlaps(i), 1.0, 1e-12);
}
