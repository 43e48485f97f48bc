#include "tcsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include "tcsim/errors.hpp"
#include "tcsim/rng.hpp"
#include "tcsim/units.hpp"

namespace tcsim {

Map2D::Map2D(std::string xl, std::vector<double> xs, std::string yl, std::vector<double> ys, std::string vl)
    : x_label(std::move(xl)), y_label(std::move(yl)), value_label(std::move(vl)), x(std::move(xs)), y(std::move(ys)) {
  values = RMat::Zero(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(x.size()));
}

std::vector<double> linspace(double start, double stop, std::size_t points) {
  std::vector<double> v(points);
  if (points == 1) {
    v[0] = start;
    return v;
  }
  for (std::size_t i = 0; i < points; ++i)
    v[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
  return v;
}

namespace {

double sample_binomial(double p, std::uint64_t shots, std::uint64_t seed) {
  Rng rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < shots; ++s)
    if (rng.uniform() < p) ++hits;
  return static_cast<double>(hits) / static_cast<double>(shots);
}

RMat single_excitation_block(const DeviceParams& params, const Frequencies& f, std::array<std::size_t, 3>& order) {
  const HilbertSpace space(params.dims);
  const RMat h = build_static_hamiltonian(params, f);
  order = {space.index(1, 0, 0), space.index(0, 1, 0), space.index(0, 0, 1)};
  RMat b(3, 3);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      b(r, c) = h(static_cast<Eigen::Index>(order[static_cast<std::size_t>(r)]),
                  static_cast<Eigen::Index>(order[static_cast<std::size_t>(c)]));
  return b;
}

Mat2 x_half(double axis_phase) {
  // exp(-i pi/4 (cos a X - sin a Y))
  const double s = 1.0 / std::sqrt(2.0);
  Mat2 m;
  m << s, cplx(0, -s) * std::polar(1.0, axis_phase), cplx(0, -s) * std::polar(1.0, -axis_phase), s;
  return m;
}

Mat2 x_pi() {
  Mat2 m;
  m << 0.0, cplx(0, -1), cplx(0, -1), 0.0;
  return m;
}

double q2_excited(const CMat& rho, const HilbertSpace& space) {
  double p = 0.0;
  for (std::size_t i = 0; i < space.dimension(); ++i)
    if (space.label(i)[2] == 1) p += rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  return p;
}

CMat ramsey_input(const HilbertSpace& space, bool control_excited) {
  CVec psi = CVec::Zero(static_cast<Eigen::Index>(space.dimension()));
  psi(static_cast<Eigen::Index>(space.index(0, 0, 0))) = 1.0;
  const Mat2 id = Mat2::Identity();
  psi = local_unitary(space, control_excited ? x_pi() : id, x_half(0.0)) * psi;
  return psi * psi.adjoint();
}

std::vector<double> ramsey_readout(const CMat& rho, const HilbertSpace& space, const std::vector<double>& alpha,
                                   const std::optional<std::uint64_t>& shots, std::uint64_t seed) {
  std::vector<double> p(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const CMat r = local_unitary(space, Mat2::Identity(), x_half(alpha[i]));
    p[i] = q2_excited(r * rho * r.adjoint(), space);
    if (shots) p[i] = sample_binomial(p[i], *shots, derive_seed(seed, {i}));
  }
  return p;
}

}  // namespace

// ---- spectroscopy ----

double anticrossing_gap(const DeviceParams& params, const Frequencies& idle, Mode qubit, double coupler_frequency) {
  Frequencies f = idle;
  f.coupler = coupler_frequency;
  std::array<std::size_t, 3> order{};
  Eigen::SelfAdjointEigenSolver<RMat> es(single_excitation_block(params, f, order), Eigen::EigenvaluesOnly);
  const RVec e = es.eigenvalues();
  const double target = idle[qubit];
  // The two eigenvalues nearest the bare qubit frequency.
  std::array<int, 3> idx{0, 1, 2};
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return std::abs(e(a) - target) < std::abs(e(b) - target); });
  return std::abs(e(idx[0]) - e(idx[1]));
}

SpectroscopyResult coupler_spectroscopy(const Device& device, const std::vector<double>& v_grid, Exec exec) {
  if (v_grid.empty()) throw SimError(ErrorCode::config, "spectroscopy grid is empty");
  SpectroscopyResult out;
  out.points.resize(v_grid.size());
  const Frequencies idle = device.idle();
  for_each_index(v_grid.size(), exec, [&](std::size_t i) {
    SpectroscopyPoint& pt = out.points[i];
    pt.volts = v_grid[i];
    Frequencies f = idle;
    f.coupler = flux_to_frequency(device.flux, device.params, Mode::coupler, v_grid[i]);
    pt.coupler_bare = f.coupler;
    std::array<std::size_t, 3> order{};
    const RMat blk = single_excitation_block(device.params, f, order);
    const RMat h0 = build_static_hamiltonian(device.params, Frequencies{0.0, 0.0, 0.0});
    const double e0 = h0(0, 0);
    Eigen::SelfAdjointEigenSolver<RMat> es(blk);
    static const std::array<const char*, 3> names{"100", "010", "001"};
    for (int k = 0; k < 3; ++k) {
      pt.branches[static_cast<std::size_t>(k)] = es.eigenvalues()(k) - e0;
      Eigen::Index best = 0;
      const double w = es.eigenvectors().col(k).cwiseAbs2().maxCoeff(&best);
      pt.labels[static_cast<std::size_t>(k)] = w >= 0.5 ? names[static_cast<std::size_t>(best)] : "";
    }
  });
  for (Mode q : {Mode::q1, Mode::q2}) {
    AntiCrossing best;
    best.qubit = q;
    best.gap = std::numeric_limits<double>::infinity();
    for (const auto& pt : out.points) {
      double gap = std::numeric_limits<double>::infinity();
      // Adjacent branches straddling the bare qubit frequency.
      for (int k = 0; k < 2; ++k) {
        const double lo = pt.branches[static_cast<std::size_t>(k)];
        const double hi = pt.branches[static_cast<std::size_t>(k + 1)];
        if (lo <= idle[q] + 1e-9 && hi >= idle[q] - 1e-9) gap = std::min(gap, hi - lo);
      }
      if (gap < best.gap) {
        best.gap = gap;
        best.volts = pt.volts;
        best.coupler_bare = pt.coupler_bare;
      }
    }
    if (std::isfinite(best.gap)) out.gaps.push_back(best);
  }
  return out;
}

// ---- chevron ----

Map2D iswap_chevron(const SystemModel& model, const ChevronOptions& opt, Exec exec) {
  if (opt.v_b.empty() || opt.tau.empty()) throw SimError(ErrorCode::config, "chevron grid is empty");
  const Device& dev = model.device();
  const double v1 = frequency_to_flux(dev.flux, dev.params, Mode::q1, opt.resonance_frequency);
  const double v2 = frequency_to_flux(dev.flux, dev.params, Mode::q2, opt.resonance_frequency);
  Map2D map("v_b", opt.v_b, "tau", opt.tau, "p_q1");
  const HilbertSpace& space = model.space();
  const std::size_t start = space.index(1, 0, 0);

  for_each_index(opt.v_b.size(), exec, [&](std::size_t ix) {
    const double vb = opt.v_b[ix];
    std::vector<double> column(opt.tau.size());
    if (!opt.decoherence) {
      const Frequencies f = dev.frequencies_at({v1, v2, vb});
      const RMat h = model.sector_hamiltonian(1, f);
      Eigen::SelfAdjointEigenSolver<RMat> es(h);
      const auto pos = static_cast<Eigen::Index>(space.sector_position(start).second);
      const RVec proj = es.eigenvectors().row(pos).transpose();
      for (std::size_t iy = 0; iy < opt.tau.size(); ++iy) {
        cplx amp = 0.0;
        for (Eigen::Index k = 0; k < proj.size(); ++k)
          amp += proj(k) * proj(k) * std::polar(1.0, -es.eigenvalues()(k) * opt.tau[iy]);
        column[iy] = std::norm(amp);
      }
    } else {
      const double tmax = *std::max_element(opt.tau.begin(), opt.tau.end());
      SampledControl c = SampledControl::idle(tmax, opt.dt);
      std::fill(c.flux[index_of(Mode::q1)].begin(), c.flux[index_of(Mode::q1)].end(), v1);
      std::fill(c.flux[index_of(Mode::q2)].begin(), c.flux[index_of(Mode::q2)].end(), v2);
      std::fill(c.flux[index_of(Mode::coupler)].begin(), c.flux[index_of(Mode::coupler)].end(), vb);
      std::vector<std::size_t> order(opt.tau.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return opt.tau[a] < opt.tau[b]; });
      std::vector<std::size_t> steps(order.size());
      for (std::size_t i = 0; i < order.size(); ++i)
        steps[i] = std::min(c.steps, static_cast<std::size_t>(std::llround(opt.tau[order[i]] / opt.dt)));
      const auto traj = evolve_density_trajectory(QuantumState::basis(space, 1, 0, 0, QuantumState::Kind::density), c,
                                                  model, true, Frame::rotating, steps);
      for (std::size_t i = 0; i < order.size(); ++i) {
        double p = 0.0;
        for (std::size_t s = 0; s < space.dimension(); ++s)
          if (space.label(s)[0] == 1) p += traj[i](static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
        column[order[i]] = p;
      }
    }
    for (std::size_t iy = 0; iy < opt.tau.size(); ++iy) {
      double p = column[iy];
      if (opt.shots) p = sample_binomial(p, *opt.shots, derive_seed(opt.seed, {ix, iy}));
      map.at(ix, iy) = p;
    }
  });
  return map;
}

std::vector<CouplingEstimate> coupling_from_chevron(const Map2D& map) {
  const std::size_t n = map.y.size();
  if (n < 4) throw SimError(ErrorCode::sampling, "need at least 4 delay points");
  const double step = map.y[1] - map.y[0];
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((map.y[i] - map.y[i - 1]) - step) > 1e-6 * std::abs(step))
      throw SimError(ErrorCode::sampling, "delay grid must be uniform");
  const double span = step * static_cast<double>(n);
  const std::size_t pad = 16 * n;
  const std::size_t bins = pad / 2;
  std::vector<CouplingEstimate> out(map.x.size());
  Eigen::FFT<double> fft;
  for (std::size_t ix = 0; ix < map.x.size(); ++ix) {
    CouplingEstimate& est = out[ix];
    est.x = map.x[ix];
    std::vector<double> s(n);
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += (s[k] = map.at(ix, k));
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double& v : s) {
      v -= mean;
      var += v * v;
    }
    if (var / static_cast<double>(n) < 1e-12) continue;
    s.resize(pad, 0.0);
    std::vector<cplx> spec;
    fft.fwd(spec, s);
    std::vector<double> mag(bins + 1);
    for (std::size_t m = 0; m <= bins; ++m) mag[m] = std::abs(spec[m]);
    std::size_t peak = 1;
    for (std::size_t m = 1; m <= bins; ++m)
      if (mag[m] > mag[peak]) peak = m;
    double shift = 0.0;
    if (peak > 0 && peak < bins) {
      const double a = mag[peak - 1], b = mag[peak], c = mag[peak + 1];
      const double den = a - 2.0 * b + c;
      if (den != 0.0) shift = 0.5 * (a - c) / den;
    }
    const double f = (static_cast<double>(peak) + shift) / (static_cast<double>(pad) * step);
    est.peak_frequency = f;
    if (f < 1.0 / span) continue;
    est.resolved = true;
    est.coupling = two_pi * f / 2.0;
  }
  return out;
}

// ---- Ramsey ----

CosineFit fit_cosine(const std::vector<double>& alpha, const std::vector<double>& p) {
  if (alpha.size() != p.size() || alpha.size() < 3) throw SimError(ErrorCode::fit, "need at least 3 Ramsey points");
  const auto n = static_cast<Eigen::Index>(alpha.size());
  RMat a(n, 3);
  RVec b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::cos(alpha[static_cast<std::size_t>(i)]);
    a(i, 2) = std::sin(alpha[static_cast<std::size_t>(i)]);
    b(i) = p[static_cast<std::size_t>(i)];
  }
  const RVec x = a.colPivHouseholderQr().solve(b);
  CosineFit fit;
  fit.offset = x(0);
  fit.contrast = 2.0 * std::hypot(x(1), x(2));
  fit.phase = std::atan2(-x(2), x(1));
  fit.residual = (a * x - b).norm();
  return fit;
}

std::vector<double> default_alpha_grid(std::size_t points) {
  std::vector<double> a(points);
  for (std::size_t i = 0; i < points; ++i) a[i] = two_pi * static_cast<double>(i) / static_cast<double>(points);
  return a;
}

CMat run_schedule(const SystemModel& model, const CMat& rho, const SampledControl& controls, bool decoherence) {
  if (decoherence) {
    ChannelOptions o;
    o.include_decoherence = true;
    return evolve_in_computational_frame(rho, model, controls, o);
  }
  const CMat g = to_computational_frame(block_propagator(controls, model, Frame::rotating).dense(model.space()), model,
                                        Frame::rotating, controls.duration());
  return g * rho * g.adjoint();
}

namespace {

void check_alpha_span(const std::vector<double>& alpha) {
  if (alpha.size() < 3) throw SimError(ErrorCode::config, "alpha grid needs at least 3 points");
  const auto [lo, hi] = std::minmax_element(alpha.begin(), alpha.end());
  const double spacing = (*hi - *lo) / static_cast<double>(alpha.size() - 1);
  if (*hi - *lo + spacing < two_pi - 1e-9) throw SimError(ErrorCode::config, "alpha grid must span 2*pi");
}

}  // namespace

RamseyTrace ramsey_conditional_phase(const SystemModel& model, const Schedule& cz, const RamseyOptions& opt) {
  check_alpha_span(opt.alpha);
  const SampledControl c = sample_schedule(cz, opt.dt);
  const CMat rho = run_schedule(model, ramsey_input(model.space(), opt.control_excited), c, opt.decoherence);
  RamseyTrace tr;
  tr.alpha = opt.alpha;
  tr.p_excited = ramsey_readout(rho, model.space(), opt.alpha, opt.shots, opt.seed);
  tr.fit = fit_cosine(tr.alpha, tr.p_excited);
  if (tr.fit.contrast < opt.min_contrast)
    throw SimError(ErrorCode::low_contrast, "Ramsey contrast " + std::to_string(tr.fit.contrast) + " below threshold");
  return tr;
}

Map2D conditional_phase_scan(const SystemModel& model, const PhaseScanOptions& opt, Exec exec) {
  if (opt.v_b.empty() || opt.v_q.empty()) throw SimError(ErrorCode::config, "phase scan grid is empty");
  check_alpha_span(opt.alpha);
  Map2D map("v_b", opt.v_b, "v_q", opt.v_q, "phi_c");
  const HilbertSpace& space = model.space();
  const CMat in0 = ramsey_input(space, false);
  const CMat in1 = ramsey_input(space, true);
  const std::size_t nx = opt.v_b.size();
  for_each_index(nx * opt.v_q.size(), exec, [&](std::size_t flat) {
    const std::size_t ix = flat % nx;
    const std::size_t iy = flat / nx;
    const SampledControl c =
        sample_schedule(cz_schedule(opt.family, opt.v_b[ix], opt.v_q[iy], opt.duration, opt.rise), opt.dt);
    const CosineFit f0 = fit_cosine(opt.alpha, ramsey_readout(run_schedule(model, in0, c, opt.decoherence), space,
                                                              opt.alpha, std::nullopt, 0));
    const CosineFit f1 = fit_cosine(opt.alpha, ramsey_readout(run_schedule(model, in1, c, opt.decoherence), space,
                                                              opt.alpha, std::nullopt, 0));
    map.at(ix, iy) = (f0.contrast < 0.1 || f1.contrast < 0.1) ? std::numeric_limits<double>::quiet_NaN()
                                                              : wrap_phase(f1.phase - f0.phase);
  });
  return map;
}

LeakageMaps leakage_map(const SystemModel& model, const LeakageMapOptions& opt, Exec exec) {
  if (opt.v_b.empty() || opt.v_q.empty()) throw SimError(ErrorCode::config, "leakage grid is empty");
  for (int d : model.params().dims)
    if (d < 3) throw SimError(ErrorCode::invalid_dimension, "leakage map needs at least 3 levels");
  LeakageMaps out{Map2D("v_b", opt.v_b, "v_q", opt.v_q, "ground_increase"),
                  Map2D("v_b", opt.v_b, "v_q", opt.v_q, "noncomputational")};
  const HilbertSpace& space = model.space();
  const Mode lower = model.idle().q1 <= model.idle().q2 ? Mode::q1 : Mode::q2;
  CMat rho0 = CMat::Zero(static_cast<Eigen::Index>(space.dimension()), static_cast<Eigen::Index>(space.dimension()));
  const auto i101 = static_cast<Eigen::Index>(space.index(1, 0, 1));
  rho0(i101, i101) = 1.0;
  const auto comp = model.computational_indices();
  const std::size_t nx = opt.v_b.size();
  for_each_index(nx * opt.v_q.size(), exec, [&](std::size_t flat) {
    const std::size_t ix = flat % nx;
    const std::size_t iy = flat / nx;
    const SampledControl c = sample_schedule(diabatic_cz_schedule(opt.v_b[ix], opt.v_q[iy], opt.duration, opt.rise), opt.dt);
    const CMat rho = run_schedule(model, rho0, c, opt.decoherence);
    double ground = 0.0;
    double inside = 0.0;
    for (std::size_t i = 0; i < space.dimension(); ++i) {
      const double p = rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
      if (space.occupation(i, lower) == 0) ground += p;
    }
    for (std::size_t i : comp) inside += rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    out.ground_increase.at(ix, iy) = ground;
    out.noncomputational.at(ix, iy) = std::max(0.0, 1.0 - inside);
  });
  return out;
}

}  // namespace tcsim
