#include <algorithm>
#include <cmath>
#include <numeric>

#include "tcsim/tuneup.hpp"

namespace tcsim {

void NMConfig::validate(std::size_t dim) const {
  if (dim == 0) throw SimError(ErrorCode::config, "optimizer needs at least one parameter");
  for (double c : {reflection, expansion, contraction, shrink})
    if (!(c > 0.0)) throw SimError(ErrorCode::config, "simplex coefficients must be positive");
  if (max_evaluations < static_cast<int>(dim) + 1)
    throw SimError(ErrorCode::config, "max evaluations must be at least dim + 1");
  if (!scale.empty() && scale.size() != dim) throw SimError(ErrorCode::config, "simplex scale has wrong length");
}

namespace {

struct BudgetExhausted {};

using Point = std::vector<double>;

Point affine(const Point& a, double s, const Point& b, const Point& c) {
  // a + s * (b - c)
  Point out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * (b[i] - c[i]);
  return out;
}

}  // namespace

NMResult nelder_mead(const Objective& f, const std::vector<double>& x0, const NMConfig& cfg) {
  const std::size_t n = x0.size();
  cfg.validate(n);
  NMResult res;
  auto eval = [&](const Point& x) {
    if (static_cast<int>(res.trace.size()) >= cfg.max_evaluations) throw BudgetExhausted{};
    const double v = f(x);
    res.trace.push_back({x, v});
    if (!std::isfinite(v)) throw OptimizerError("objective returned a non-finite value", res.trace);
    return v;
  };

  std::vector<Point> pts{x0};
  for (std::size_t i = 0; i < n; ++i) {
    Point p = x0;
    const double step = cfg.scale.empty() ? (x0[i] != 0.0 ? 0.05 * std::abs(x0[i]) : 0.00025) : cfg.scale[i];
    p[i] += step;
    pts.push_back(std::move(p));
  }
  std::vector<double> vals;
  try {
    for (const auto& p : pts) vals.push_back(eval(p));
    std::vector<std::size_t> order(n + 1);
    while (true) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
      const std::size_t best = order.front();
      const std::size_t worst = order.back();
      const std::size_t second = order[n - 1];
      if (vals[worst] - vals[best] <= cfg.tolerance) {
        res.converged = true;
        break;
      }
      Point c(n, 0.0);
      for (std::size_t k = 0; k <= n; ++k)
        if (k != worst)
          for (std::size_t i = 0; i < n; ++i) c[i] += pts[k][i] / static_cast<double>(n);

      const Point xr = affine(c, cfg.reflection, c, pts[worst]);
      const double fr = eval(xr);
      if (fr < vals[best]) {
        const Point xe = affine(c, cfg.expansion, xr, c);
        const double fe = eval(xe);
        if (fe < fr) {
          pts[worst] = xe;
          vals[worst] = fe;
        } else {
          pts[worst] = xr;
          vals[worst] = fr;
        }
        continue;
      }
      if (fr < vals[second]) {
        pts[worst] = xr;
        vals[worst] = fr;
        continue;
      }
      const bool outside = fr < vals[worst];
      const Point xc = outside ? affine(c, cfg.contraction, xr, c) : affine(c, cfg.contraction, pts[worst], c);
      const double fc = eval(xc);
      if (outside ? fc <= fr : fc < vals[worst]) {
        pts[worst] = xc;
        vals[worst] = fc;
        continue;
      }
      for (std::size_t k = 0; k <= n; ++k) {
        if (k == best) continue;
        pts[k] = affine(pts[best], cfg.shrink, pts[k], pts[best]);
        vals[k] = eval(pts[k]);
      }
    }
  } catch (const BudgetExhausted&) {
  }
  const auto it = std::min_element(res.trace.begin(), res.trace.end(),
                                   [](const NMEvaluation& a, const NMEvaluation& b) { return a.value < b.value; });
  res.x = it->x;
  res.value = it->value;
  return res;
}

}  // namespace tcsim
