#include "lfp/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lfp/rng.hpp"

namespace lfp {

namespace {

void clamp_to_box(std::vector<double>& x, const Box& box) {
  for (std::size_t d = 0; d < x.size(); ++d)
    x[d] = std::clamp(x[d], box[d].first, box[d].second);
}

}  // namespace

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& start, const Box& box,
                     const NmOptions& opts) {
  const int d = static_cast<int>(start.size());
  if (static_cast<int>(box.size()) != d)
    throw std::invalid_argument("nelder_mead: box/start dimension mismatch");

  // initial simplex: start plus 5% of the box width along each axis
  std::vector<std::vector<double>> pts(d + 1, start);
  for (int k = 0; k < d; ++k) {
    double step = 0.05 * (box[k].second - box[k].first);
    if (step == 0.0) step = 1e-3;
    pts[k + 1][k] += pts[k + 1][k] + step <= box[k].second ? step : -step;
    clamp_to_box(pts[k + 1], box);
  }
  std::vector<double> vals(d + 1);
  for (int k = 0; k <= d; ++k) vals[k] = f(pts[k]);

  std::vector<int> order(d + 1);
  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });
    const int best = order[0], worst = order[d], second = order[d - 1];
    if (std::isfinite(vals[worst]) &&
        vals[worst] - vals[best] <= opts.tol * (1.0 + std::abs(vals[best])))
      break;

    std::vector<double> centroid(d, 0.0);
    for (int k = 0; k <= d; ++k) {
      if (k == worst) continue;
      for (int j = 0; j < d; ++j) centroid[j] += pts[k][j] / d;
    }
    auto blend = [&](double coef) {
      std::vector<double> x(d);
      for (int j = 0; j < d; ++j)
        x[j] = centroid[j] + coef * (centroid[j] - pts[worst][j]);
      clamp_to_box(x, box);
      return x;
    };

    std::vector<double> xr = blend(1.0);
    const double fr = f(xr);
    if (fr < vals[best]) {
      std::vector<double> xe = blend(2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = std::move(xe);
        vals[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = std::move(xr);
      vals[worst] = fr;
    } else {
      std::vector<double> xc = blend(fr < vals[worst] ? 0.5 : -0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = std::move(xc);
        vals[worst] = fc;
      } else {
        // shrink toward the best vertex
        for (int k = 0; k <= d; ++k) {
          if (k == best) continue;
          for (int j = 0; j < d; ++j)
            pts[k][j] = pts[best][j] + 0.5 * (pts[k][j] - pts[best][j]);
          vals[k] = f(pts[k]);
        }
      }
    }
  }

  int best = 0;
  for (int k = 1; k <= d; ++k)
    if (vals[k] < vals[best]) best = k;
  return {pts[best], vals[best], iter};
}

NmResult multistart_minimize(
    const std::function<double(const std::vector<double>&)>& f, const Box& box,
    std::uint64_t seed, const NmOptions& opts) {
  const int d = static_cast<int>(box.size());
  const int s = std::max(1, opts.multistarts);
  Rng rng(mix_seed(seed, 0x4c617469));

  // Latin hypercube: one stratum per start along each axis, with an
  // independent seeded permutation per coordinate.
  std::vector<std::vector<int>> perms(d);
  for (int j = 0; j < d; ++j) {
    perms[j].resize(s);
    std::iota(perms[j].begin(), perms[j].end(), 0);
    for (int k = s - 1; k > 0; --k)
      std::swap(perms[j][k], perms[j][rng.below(k + 1)]);
  }

  NmResult best;
  bool have = false;
  for (int k = 0; k < s; ++k) {
    std::vector<double> start(d);
    for (int j = 0; j < d; ++j) {
      const double frac = (perms[j][k] + rng.uniform()) / s;
      start[j] = box[j].first + frac * (box[j].second - box[j].first);
    }
    NmResult r = nelder_mead(f, start, box, opts);
    if (!have || r.value < best.value) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

}  // namespace lfp
