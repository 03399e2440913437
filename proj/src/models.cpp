#include "lfp/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lfp/normal.hpp"

namespace lfp {

namespace {

double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

std::vector<std::string> game_labels() { return {"00", "01", "10", "11"}; }

std::vector<std::string> index_labels(int n) {
  std::vector<std::string> labels(n);
  for (int j = 0; j < n; ++j) labels[j] = std::to_string(j);
  return labels;
}

std::vector<std::string> path_labels(int T) {
  std::vector<std::string> labels(std::size_t{1} << T);
  for (std::size_t idx = 0; idx < labels.size(); ++idx) {
    std::string s(T, '0');
    for (int t = 0; t < T; ++t)
      if ((idx >> (T - 1 - t)) & 1) s[t] = '1';
    labels[idx] = s;
  }
  return labels;
}

/// Sample an atom index of a FixedNodes rule by cumulative weight.
std::size_t sample_node(const QuadratureRule& rule, double u01) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < rule.weights.size(); ++i) {
    acc += rule.weights[i];
    if (u01 < acc) return i;
  }
  return rule.weights.size() - 1;
}

}  // namespace

Density ModelSpec::lfp_closed_form(const std::vector<double>&,
                                   const std::vector<double>&,
                                   const Density&) const {
  throw std::logic_error("model has no closed-form LFP density");
}

Density ModelSpec::kl_closed_form(const std::vector<double>&,
                                  const std::vector<double>&,
                                  const Density&) const {
  throw std::logic_error("model has no closed-form KL projection");
}

std::vector<double> ModelSpec::coarse_probs(const std::vector<double>&,
                                            const std::vector<double>&) const {
  throw std::logic_error("model defines no coarse classes");
}

// ---------------------------------------------------------------------------
// Entry game

EntryGameModel::EntryGameModel(int cov_dim, LatentSpec latent)
    : cov_dim_(cov_dim), latent_(std::move(latent)), space_(game_labels()) {
  if (cov_dim < 0) throw std::invalid_argument("covariate dimension < 0");
  if (latent_.kind == LatentKind::FixedNodes) {
    if (latent_.nodes.nodes.empty() || latent_.nodes.nodes[0].size() != 2)
      throw std::invalid_argument("entry game needs 2-dimensional nodes");
  }
}

// Region masses of the PSNE correspondence. Entry thresholds on u_j are
// t_j = -x_j'delta_j when the rival stays out and tb_j = t_j - beta_j when it
// enters; beta_j <= 0 makes tb_j >= t_j and the multiplicity region the
// rectangle [t1,tb1) x [t2,tb2).
GameMasses EntryGameModel::masses(const std::vector<double>& theta,
                                  const std::vector<double>& x) const {
  if (static_cast<int>(theta.size()) != theta_dim())
    throw std::invalid_argument("entry game theta size mismatch");
  if (static_cast<int>(x.size()) != covariate_dim())
    throw std::invalid_argument("entry game covariate size mismatch");
  const double beta1 = theta[0], beta2 = theta[1];
  if (beta1 > 1e-12 || beta2 > 1e-12)
    throw std::invalid_argument("entry game requires beta_j <= 0");
  const double t1 = -dot(theta.data() + 2, x.data(), cov_dim_);
  const double t2 = -dot(theta.data() + 2 + cov_dim_, x.data() + cov_dim_,
                         cov_dim_);
  const double tb1 = t1 - beta1, tb2 = t2 - beta2;

  GameMasses gm;
  if (latent_.kind == LatentKind::BivariateNormalIID) {
    const double P1 = norm_cdf(t1), P2 = norm_cdf(t2);
    const double B1 = norm_cdf(tb1), B2 = norm_cdf(tb2);
    gm.f00 = P1 * P2;
    gm.f11 = (1.0 - B1) * (1.0 - B2);
    gm.mult = (B1 - P1) * (B2 - P2);
    gm.s10 = (1.0 - P1) * B2 - gm.mult;
    gm.s01 = B1 * (1.0 - P2) - gm.mult;
  } else {
    for (std::size_t i = 0; i < latent_.nodes.nodes.size(); ++i) {
      const double u1 = latent_.nodes.nodes[i][0];
      const double u2 = latent_.nodes.nodes[i][1];
      const double w = latent_.nodes.weights[i];
      if (u1 < t1 && u2 < t2)
        gm.f00 += w;
      else if (u1 >= tb1 && u2 >= tb2)
        gm.f11 += w;
      else if (u1 >= t1 && u1 < tb1 && u2 >= t2 && u2 < tb2)
        gm.mult += w;
      else if (u1 >= t1 && u2 < tb2)
        gm.s10 += w;
      else
        gm.s01 += w;
    }
  }
  return gm;
}

GameEtas EntryGameModel::etas(const GameMasses& gm) const {
  const double eta1 = 1.0 - gm.f00 - gm.f11;
  return GameEtas(eta1, std::min(gm.s10 + gm.mult, eta1), gm.s10);
}

RandomSetDistribution EntryGameModel::random_set(
    const std::vector<double>& theta, const std::vector<double>& x) const {
  const GameMasses gm = masses(theta, x);
  std::vector<RandomSetAtom> atoms{{Mask{1} << 0, gm.f00},
                                   {Mask{1} << 1, gm.s01},
                                   {Mask{1} << 2, gm.s10},
                                   {Mask{1} << 3, gm.f11},
                                   {(Mask{1} << 1) | (Mask{1} << 2), gm.mult}};
  return RandomSetDistribution(4, std::move(atoms));
}

SetDraw EntryGameModel::draw_set(const std::vector<double>& theta,
                                 const std::vector<double>& x,
                                 Rng& rng) const {
  double u1, u2;
  if (latent_.kind == LatentKind::BivariateNormalIID) {
    u1 = rng.normal();
    u2 = rng.normal();
  } else {
    const auto& node = latent_.nodes.nodes[sample_node(latent_.nodes,
                                                       rng.uniform())];
    u1 = node[0];
    u2 = node[1];
  }
  const double beta1 = theta[0], beta2 = theta[1];
  const double t1 = -dot(theta.data() + 2, x.data(), cov_dim_);
  const double t2 = -dot(theta.data() + 2 + cov_dim_, x.data() + cov_dim_,
                         cov_dim_);
  const double tb1 = t1 - beta1, tb2 = t2 - beta2;
  SetDraw draw;
  draw.latent_score = u1 - u2;
  if (u1 < t1 && u2 < t2)
    draw.set = Mask{1} << 0;
  else if (u1 >= tb1 && u2 >= tb2)
    draw.set = Mask{1} << 3;
  else if (u1 >= t1 && u1 < tb1 && u2 >= t2 && u2 < tb2)
    draw.set = (Mask{1} << 1) | (Mask{1} << 2);
  else if (u1 >= t1 && u2 < tb2)
    draw.set = Mask{1} << 2;
  else
    draw.set = Mask{1} << 1;
  return draw;
}

Density EntryGameModel::lfp_closed_form(const std::vector<double>& theta,
                                        const std::vector<double>& x,
                                        const Density& p) const {
  const GameMasses gm = masses(theta, x);
  const GameEtas e = etas(gm);
  if (e.eta1 <= 1e-14 || p[1] <= 0.0 || p[2] <= 0.0) {
    // degenerate off-diagonal mass: the core pins everything
    const double q10 = std::clamp(0.5 * e.eta1, e.eta3, e.eta2);
    return Density({gm.f00, e.eta1 - q10, q10, gm.f11});
  }
  return entry_game_lfp(e, p, gm.f00, gm.f11);
}

// KL projection onto the game core: only q(1,0) is free, and the stationary
// point of -phat10 ln q - phat01 ln(eta1 - q) is the proportional split.
Density EntryGameModel::kl_closed_form(const std::vector<double>& theta,
                                       const std::vector<double>& x,
                                       const Density& p_hat) const {
  const GameMasses gm = masses(theta, x);
  const GameEtas e = etas(gm);
  const double off = p_hat[1] + p_hat[2];
  const double rel = off > 0.0 ? p_hat[2] / off : 0.5;
  const double q10 = std::clamp(rel * e.eta1, e.eta3, e.eta2);
  return Density({gm.f00, e.eta1 - q10, q10, gm.f11});
}

std::vector<double> EntryGameModel::coarse_probs(
    const std::vector<double>& theta, const std::vector<double>& x) const {
  const GameMasses gm = masses(theta, x);
  return {gm.f00, 1.0 - gm.f00 - gm.f11, gm.f11};
}

// ---------------------------------------------------------------------------
// Heterogeneous choice sets

ChoiceSetModel::ChoiceSetModel(int J, int kappa, int cov_dim,
                               LatentSpec latent)
    : J_(J),
      kappa_(kappa),
      cov_dim_(cov_dim),
      latent_(std::move(latent)),
      space_(index_labels(J)) {
  if (J < 2 || J > 12)
    throw std::invalid_argument("choice-set model requires 2 <= J <= 12");
  if (kappa < 2 || kappa > J)
    throw std::invalid_argument("choice-set model requires 2 <= kappa <= J");
  if (cov_dim < 1) throw std::invalid_argument("covariate dimension < 1");
  if (latent_.kind != LatentKind::FixedNodes ||
      latent_.nodes.nodes.empty() ||
      static_cast<int>(latent_.nodes.nodes[0].size()) != J)
    throw std::invalid_argument(
        "choice-set model needs FixedNodes over R^J");
}

// G(u) = set of argmaxes over all kappa-subsets K (argmax over any feasible
// C with |C| >= kappa coincides with the argmax of some kappa-subset).
// Ties broken by lowest alternative index.
Mask ChoiceSetModel::predicted_set(const std::vector<double>& theta,
                                   const std::vector<double>& x,
                                   const std::vector<double>& u) const {
  std::vector<double> v(J_);
  for (int j = 0; j < J_; ++j)
    v[j] = dot(theta.data(), x.data() + j * cov_dim_, cov_dim_) + u[j];
  Mask g = 0;
  const Mask all = (Mask{1} << J_) - 1;
  for (Mask k = 1; k <= all; ++k) {
    if (popcount(k) != kappa_) continue;
    int best = -1;
    for (int j = 0; j < J_; ++j)
      if ((k >> j) & 1)
        if (best < 0 || v[j] > v[best]) best = j;
    g |= Mask{1} << best;
  }
  return g;
}

RandomSetDistribution ChoiceSetModel::random_set(
    const std::vector<double>& theta, const std::vector<double>& x) const {
  if (static_cast<int>(theta.size()) != theta_dim() ||
      static_cast<int>(x.size()) != covariate_dim())
    throw std::invalid_argument("choice-set model input size mismatch");
  std::vector<RandomSetAtom> atoms;
  for (std::size_t i = 0; i < latent_.nodes.nodes.size(); ++i)
    atoms.push_back({predicted_set(theta, x, latent_.nodes.nodes[i]),
                     latent_.nodes.weights[i]});
  return RandomSetDistribution(J_, std::move(atoms));
}

SetDraw ChoiceSetModel::draw_set(const std::vector<double>& theta,
                                 const std::vector<double>& x,
                                 Rng& rng) const {
  const auto& node =
      latent_.nodes.nodes[sample_node(latent_.nodes, rng.uniform())];
  SetDraw draw;
  draw.set = predicted_set(theta, x, node);
  draw.latent_score = node[0] - node[1];
  return draw;
}

Density ChoiceSetModel::complete_density(const std::vector<double>& theta,
                                         const std::vector<double>& x) const {
  std::vector<double> probs(J_, 0.0);
  for (std::size_t i = 0; i < latent_.nodes.nodes.size(); ++i) {
    const Mask g = predicted_set(theta, x, latent_.nodes.nodes[i]);
    for (int j = 0; j < J_; ++j)
      if ((g >> j) & 1) probs[j] += latent_.nodes.weights[i];
  }
  return Density(std::move(probs));
}

Density ChoiceSetModel::lfp_closed_form(const std::vector<double>& theta,
                                        const std::vector<double>& x,
                                        const Density&) const {
  if (kappa_ != J_)
    throw std::logic_error("closed form requires the complete model");
  return complete_density(theta, x);
}

Density ChoiceSetModel::kl_closed_form(const std::vector<double>& theta,
                                       const std::vector<double>& x,
                                       const Density&) const {
  if (kappa_ != J_)
    throw std::logic_error("closed form requires the complete model");
  return complete_density(theta, x);
}

// ---------------------------------------------------------------------------
// Panel binary choice

PanelModel::PanelModel(int T, int cov_dim, LatentSpec latent)
    : T_(T),
      cov_dim_(cov_dim),
      latent_(std::move(latent)),
      space_(path_labels(T)) {
  if (T < 2 || T > 4)
    throw std::invalid_argument(
        "panel model requires 2 <= T <= 4 (outcome space 2^T)");
  if (cov_dim < 1) throw std::invalid_argument("covariate dimension < 1");
  if (latent_.kind != LatentKind::FixedNodes ||
      latent_.nodes.nodes.empty() ||
      static_cast<int>(latent_.nodes.nodes[0].size()) != T)
    throw std::invalid_argument("panel model needs FixedNodes over R^T");
}

// For fixed (u, y0) the path a -> y(a) is piecewise constant with breakpoints
// among {-g_t - u_t, -g_t - gamma - u_t}; evaluating one representative per
// interval of the sorted breakpoints enumerates every attainable path.
Mask PanelModel::predicted_set(const std::vector<double>& theta,
                               const std::vector<double>& x,
                               const std::vector<double>& u) const {
  const double gamma = theta[cov_dim_];
  std::vector<double> g(T_);
  for (int t = 0; t < T_; ++t)
    g[t] = dot(theta.data(), x.data() + t * cov_dim_, cov_dim_);

  std::vector<double> brk;
  for (int t = 0; t < T_; ++t) {
    brk.push_back(-g[t] - u[t]);
    brk.push_back(-g[t] - gamma - u[t]);
  }
  std::sort(brk.begin(), brk.end());
  std::vector<double> reps;
  reps.push_back(brk.front() - 1.0);
  for (std::size_t i = 0; i + 1 < brk.size(); ++i)
    reps.push_back(0.5 * (brk[i] + brk[i + 1]));
  reps.push_back(brk.back() + 1.0);
  // breakpoints themselves matter: y_t switches exactly at a = breakpoint
  reps.insert(reps.end(), brk.begin(), brk.end());

  Mask set = 0;
  for (int y0 = 0; y0 <= 1; ++y0) {
    for (double a : reps) {
      int prev = y0;
      Mask path = 0;
      for (int t = 0; t < T_; ++t) {
        const int yt = a + g[t] + gamma * prev + u[t] >= 0.0 ? 1 : 0;
        if (yt) path |= Mask{1} << (T_ - 1 - t);
        prev = yt;
      }
      set |= Mask{1} << path;
    }
  }
  return set;
}

RandomSetDistribution PanelModel::random_set(
    const std::vector<double>& theta, const std::vector<double>& x) const {
  if (static_cast<int>(theta.size()) != theta_dim() ||
      static_cast<int>(x.size()) != covariate_dim())
    throw std::invalid_argument("panel model input size mismatch");
  std::vector<RandomSetAtom> atoms;
  for (std::size_t i = 0; i < latent_.nodes.nodes.size(); ++i)
    atoms.push_back({predicted_set(theta, x, latent_.nodes.nodes[i]),
                     latent_.nodes.weights[i]});
  return RandomSetDistribution(1 << T_, std::move(atoms));
}

SetDraw PanelModel::draw_set(const std::vector<double>& theta,
                             const std::vector<double>& x, Rng& rng) const {
  const auto& node =
      latent_.nodes.nodes[sample_node(latent_.nodes, rng.uniform())];
  SetDraw draw;
  draw.set = predicted_set(theta, x, node);
  draw.latent_score = node[0] - node[1];
  return draw;
}

}  // namespace lfp
