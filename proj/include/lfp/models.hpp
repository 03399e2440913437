#ifndef LFP_MODELS_HPP
#define LFP_MODELS_HPP

#include <vector>

#include "lfp/capacity.hpp"
#include "lfp/quadrature.hpp"
#include "lfp/rng.hpp"
#include "lfp/solvers.hpp"

// Concrete model families mapping (theta, x) to a random-set prediction:
// the two-player entry game, the heterogeneous-choice-set model, and the
// panel binary choice model. All evaluations are pure functions of
// (theta, x, latent spec), so model objects are safe to share across threads.

namespace lfp {

enum class LatentKind { BivariateNormalIID, FixedNodes };

/// Law of the latent vector U. BivariateNormalIID means independent standard
/// normal coordinates with closed-form region probabilities (entry game
/// only); FixedNodes discretizes U on a deterministic quadrature rule.
struct LatentSpec {
  LatentKind kind = LatentKind::BivariateNormalIID;
  QuadratureRule nodes;
};

/// Predicted set plus a latent-dependent score consumed by selection
/// mechanisms that are allowed to peek at U.
struct SetDraw {
  Mask set = 0;
  double latent_score = 0.0;
};

class ModelSpec {
 public:
  virtual ~ModelSpec() = default;

  virtual const OutcomeSpace& space() const = 0;
  virtual int theta_dim() const = 0;
  virtual int covariate_dim() const = 0;

  /// Distribution of the predicted set G(U|x;theta).
  virtual RandomSetDistribution random_set(
      const std::vector<double>& theta, const std::vector<double>& x) const = 0;

  /// One DGP draw of the predicted set.
  virtual SetDraw draw_set(const std::vector<double>& theta,
                           const std::vector<double>& x, Rng& rng) const = 0;

  // Closed-form program solutions, available for the entry game and for
  // complete models (singleton cores). Must agree with the generic solvers.
  virtual bool has_closed_form(const std::vector<double>& theta) const {
    (void)theta;
    return false;
  }
  virtual Density lfp_closed_form(const std::vector<double>& theta,
                                  const std::vector<double>& x,
                                  const Density& p) const;
  virtual Density kl_closed_form(const std::vector<double>& theta,
                                 const std::vector<double>& x,
                                 const Density& p_hat) const;

  /// Coarsening W = phi(Y) with a complete reduced form under the model, or
  /// -1 if the model supplies none (disables the entrants-style estimator).
  virtual int coarse_class(int y) const {
    (void)y;
    return -1;
  }
  /// P(W = k | x; theta) for the coarse classes.
  virtual std::vector<double> coarse_probs(const std::vector<double>& theta,
                                           const std::vector<double>& x) const;
};

/// Region masses of the two-player entry game (PSNE prediction): the four
/// unique-equilibrium regions plus the multiplicity region {(0,1),(1,0)}.
struct GameMasses {
  double f00 = 0.0;
  double s01 = 0.0;
  double s10 = 0.0;
  double f11 = 0.0;
  double mult = 0.0;
};

/// Two-player entry game. Outcomes ordered ("00","01","10","11") with index
/// 2*y1 + y2; theta = (beta1, beta2, delta1, delta2) with per-player
/// covariate blocks of length cov_dim; x = (x1, x2) concatenated likewise.
class EntryGameModel : public ModelSpec {
 public:
  explicit EntryGameModel(int cov_dim = 0, LatentSpec latent = {});

  const OutcomeSpace& space() const override { return space_; }
  int theta_dim() const override { return 2 + 2 * cov_dim_; }
  int covariate_dim() const override { return 2 * cov_dim_; }

  GameMasses masses(const std::vector<double>& theta,
                    const std::vector<double>& x) const;
  GameEtas etas(const GameMasses& gm) const;

  RandomSetDistribution random_set(const std::vector<double>& theta,
                                   const std::vector<double>& x) const override;
  SetDraw draw_set(const std::vector<double>& theta,
                   const std::vector<double>& x, Rng& rng) const override;

  bool has_closed_form(const std::vector<double>& theta) const override {
    (void)theta;
    return true;
  }
  Density lfp_closed_form(const std::vector<double>& theta,
                          const std::vector<double>& x,
                          const Density& p) const override;
  Density kl_closed_form(const std::vector<double>& theta,
                         const std::vector<double>& x,
                         const Density& p_hat) const override;

  /// W = number of entrants, the coarsening with a complete reduced form.
  int coarse_class(int y) const override { return (y >> 1) + (y & 1); }
  std::vector<double> coarse_probs(
      const std::vector<double>& theta,
      const std::vector<double>& x) const override;

 private:
  int cov_dim_;
  LatentSpec latent_;
  OutcomeSpace space_;
};

/// Heterogeneous choice sets over J alternatives: the analyst knows only
/// |C| >= kappa, so G(u) collects the argmax of every kappa-subset.
/// theta are utility-index coefficients; x concatenates J per-alternative
/// covariate blocks of length cov_dim. Requires a FixedNodes latent over R^J.
class ChoiceSetModel : public ModelSpec {
 public:
  ChoiceSetModel(int J, int kappa, int cov_dim, LatentSpec latent);

  const OutcomeSpace& space() const override { return space_; }
  int theta_dim() const override { return cov_dim_; }
  int covariate_dim() const override { return J_ * cov_dim_; }

  RandomSetDistribution random_set(const std::vector<double>& theta,
                                   const std::vector<double>& x) const override;
  SetDraw draw_set(const std::vector<double>& theta,
                   const std::vector<double>& x, Rng& rng) const override;

  /// Complete when kappa = J: the choice set is known and G is a singleton.
  bool has_closed_form(const std::vector<double>& theta) const override {
    (void)theta;
    return kappa_ == J_;
  }
  Density lfp_closed_form(const std::vector<double>& theta,
                          const std::vector<double>& x,
                          const Density& p) const override;
  Density kl_closed_form(const std::vector<double>& theta,
                         const std::vector<double>& x,
                         const Density& p_hat) const override;

 private:
  Mask predicted_set(const std::vector<double>& theta,
                     const std::vector<double>& x,
                     const std::vector<double>& u) const;
  Density complete_density(const std::vector<double>& theta,
                           const std::vector<double>& x) const;

  int J_;
  int kappa_;
  int cov_dim_;
  LatentSpec latent_;
  OutcomeSpace space_;
};

/// Panel binary choice with fixed effect a and unknown initial condition:
/// y_t = 1{a + g(x_t;theta) + gamma y_{t-1} + u_t >= 0}. G(u) sweeps a over
/// the real line and unions over y_0 in {0,1}. Outcomes are the 2^T binary
/// paths labeled with y_1 first; theta = (index coefficients, gamma);
/// x concatenates T per-period blocks of length cov_dim.
class PanelModel : public ModelSpec {
 public:
  PanelModel(int T, int cov_dim, LatentSpec latent);

  const OutcomeSpace& space() const override { return space_; }
  int theta_dim() const override { return cov_dim_ + 1; }
  int covariate_dim() const override { return T_ * cov_dim_; }

  RandomSetDistribution random_set(const std::vector<double>& theta,
                                   const std::vector<double>& x) const override;
  SetDraw draw_set(const std::vector<double>& theta,
                   const std::vector<double>& x, Rng& rng) const override;

 private:
  Mask predicted_set(const std::vector<double>& theta,
                     const std::vector<double>& x,
                     const std::vector<double>& u) const;

  int T_;
  int cov_dim_;
  LatentSpec latent_;
  OutcomeSpace space_;
};

}  // namespace lfp

#endif  // LFP_MODELS_HPP
