#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include <unsupported/Eigen/LevenbergMarquardt>

#include "tcsim/benchmarking.hpp"
#include "tcsim/errors.hpp"

namespace tcsim {

namespace {

constexpr double asymptote = 0.25;

// Parameters (A, p, B), or (A, p) with B held at a fixed value.
struct DecayFunctor : Eigen::DenseFunctor<double> {
  DecayFunctor(const RVec& x, const RVec& y, std::optional<double> fixed_offset = std::nullopt)
      : Eigen::DenseFunctor<double>(fixed_offset ? 2 : 3, static_cast<int>(x.size())),
        x_(x),
        y_(y),
        fixed_(fixed_offset) {}

  double offset(const RVec& q) const { return fixed_ ? *fixed_ : q(2); }

  int operator()(const RVec& q, RVec& r) const {
    for (Eigen::Index i = 0; i < x_.size(); ++i) r(i) = q(0) * std::pow(q(1), x_(i)) + offset(q) - y_(i);
    return 0;
  }

  int df(const RVec& q, RMat& j) const {
    for (Eigen::Index i = 0; i < x_.size(); ++i) {
      const double pk = std::pow(q(1), x_(i));
      j(i, 0) = pk;
      j(i, 1) = x_(i) == 0.0 ? 0.0 : q(0) * x_(i) * std::pow(q(1), x_(i) - 1.0);
      if (!fixed_) j(i, 2) = 1.0;
    }
    return 0;
  }

  const RVec& x_;
  const RVec& y_;
  std::optional<double> fixed_;
};

RVec minimize(DecayFunctor& f, RVec q) {
  Eigen::LevenbergMarquardt<DecayFunctor> lm(f);
  lm.setMaxfev(2000);
  const auto status = lm.minimize(q);
  using S = Eigen::LevenbergMarquardtSpace::Status;
  if (status == S::ImproperInputParameters || status == S::TooManyFunctionEvaluation || !q.allFinite())
    throw SimError(ErrorCode::fit, "decay fit did not converge (status " + std::to_string(static_cast<int>(status)) +
                                       ", p=" + std::to_string(q(1)) + ")");
  return q;
}

bool physical(const RVec& q) { return q(0) >= 0.0 && q(0) <= 1.0 && q(2) >= 0.0 && q(2) <= 1.0; }

}  // namespace

double DecayFit::decay_sigma() const { return std::sqrt(std::max(0.0, covariance(1, 1))); }

double DecayFit::evaluate(double m) const {
  const double k = model == DecayModel::purity ? m - 1.0 : m;
  return amplitude * std::pow(decay, k) + offset;
}

DecayFit fit_decay(const RbTable& table, DecayModel model) {
  std::vector<double> m, y;
  for (const auto& p : table) {
    m.push_back(p.m);
    y.push_back(p.mean);
  }
  return fit_decay(m, y, model);
}

DecayFit fit_decay(const std::vector<double>& m, const std::vector<double>& y, DecayModel model) {
  if (m.size() != y.size()) throw SimError(ErrorCode::fit, "length mismatch");
  if (std::set<double>(m.begin(), m.end()).size() < 3) throw SimError(ErrorCode::fit, "need at least 3 distinct m");
  const auto n = static_cast<Eigen::Index>(m.size());
  RVec x(n), v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = model == DecayModel::purity ? m[static_cast<std::size_t>(i)] - 1.0 : m[static_cast<std::size_t>(i)];
    v(i) = y[static_cast<std::size_t>(i)];
    if (!std::isfinite(v(i))) throw SimError(ErrorCode::fit, "non-finite data");
  }
  DecayFit fit;
  fit.model = model;

  const double spread = v.maxCoeff() - v.minCoeff();
  if (spread < 1e-12) {
    if (v.mean() <= asymptote + 1e-9)
      throw SimError(ErrorCode::fit, "constant data at the asymptote; decay is unidentifiable");
    fit.amplitude = v.mean() - asymptote;
    fit.decay = 1.0;
    fit.offset = asymptote;
    return fit;
  }

  // Log-linear seed on points above the asymptote.
  std::vector<std::pair<double, double>> pts;
  for (Eigen::Index i = 0; i < n; ++i)
    if (v(i) - asymptote > 1e-12) pts.emplace_back(x(i), std::log(v(i) - asymptote));
  if (pts.size() < 2) throw SimError(ErrorCode::fit, "no signal above the asymptote");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [a, b] : pts) {
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  const double k = static_cast<double>(pts.size());
  const double den = k * sxx - sx * sx;
  double slope = den != 0.0 ? (k * sxy - sx * sy) / den : 0.0;
  double p0 = std::clamp(std::exp(slope), 1e-3, 1.0 - 1e-9);
  double a0 = std::exp((sy - slope * sx) / k);

  RVec q(3);
  q << a0, p0, asymptote;
  DecayFunctor f(x, v);
  q = minimize(f, q);
  bool fixed = false;
  if (!physical(q)) {
    // Nearly linear decays leave A and B unidentified; pin B to the unital asymptote.
    DecayFunctor f2(x, v, asymptote);
    const RVec q2 = minimize(f2, RVec{{a0, p0}});
    q << q2(0), q2(1), asymptote;
    fixed = true;
  }
  if (q(1) <= 0.0) throw SimError(ErrorCode::fit, "fitted decay is not positive: " + std::to_string(q(1)));
  if (q(1) > 1.0) {
    // Only A + B is identifiable at the bound.
    q(1) = 1.0;
    q(0) = v.mean() - asymptote;
    q(2) = asymptote;
  }
  fit.amplitude = q(0);
  fit.decay = q(1);
  fit.offset = q(2);

  RVec r(n);
  f(q, r);
  fit.residual_norm = r.norm();
  RMat j(n, 3);
  f.df(q, j);
  const Eigen::Index np = fixed ? 2 : 3;
  const double dof = std::max<double>(1.0, static_cast<double>(n - np));
  const double s2 = r.squaredNorm() / dof;
  const RMat jk = j.leftCols(np);
  fit.covariance = RMat::Zero(3, 3);
  fit.covariance.topLeftCorner(np, np) = s2 * (jk.transpose() * jk).completeOrthogonalDecomposition().pseudoInverse();
  return fit;
}

}  // namespace tcsim
