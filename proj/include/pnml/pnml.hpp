#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pnml/linalg.hpp"

namespace pnml {

/// Relative threshold on ||x_perp|| / ||x|| deciding whether a sample has a
/// component outside the training row space.
inline constexpr double kDefaultOrthTol = 1e-6;

/// Probabilities are kept this far away from the simplex boundary before
/// regret evaluation (entries exactly 0 or 1 are exempt).
inline constexpr double kProbClip = 1e-12;

/// Length-C probability simplex element.
class ProbVector {
public:
    /// Throws InvalidInput unless C >= 2, every entry is in [0, 1] and the
    /// entries sum to 1 within 1e-9.
    explicit ProbVector(Eigen::VectorXd probs);

    Eigen::Index size() const { return probs_.size(); }
    double operator[](Eigen::Index i) const { return probs_[i]; }
    const Eigen::VectorXd& values() const { return probs_; }

    Eigen::Index argmax() const;
    double max() const { return probs_.maxCoeff(); }

private:
    Eigen::VectorXd probs_;
};

/// Per-sample score record.
struct RegretScore {
    double xtg = 0.0;           ///< the statistic x^T g, in [0, 1]
    double regret = 0.0;        ///< Gamma, in nats, in [0, log C]
    ProbVector pnml_posterior;  ///< genie probabilities normalized by K
    double baseline = 0.0;      ///< max entry of the ERM probability vector
    Eigen::VectorXd genie_probs; ///< per-label genie outputs (unnormalized)
};

/// The scalar statistic x^T g. If x has a component outside the training
/// row space (||x_perp|| > orth_tol * ||x||) the value is exactly 1.
/// Otherwise q = x^T quad_kernel x and the value is q / (1 + q) < 1.
double x_top_g(const Eigen::VectorXd& x, const PnmlStats& stats,
               double orth_tol = kDefaultOrthTol);

/// Probability the refit-with-the-true-label model assigns to class c:
///   p_c / (p_c + p_c^xtg * (1 - p_c))
/// with the boundary conventions genie_prob(0, .) = 0 and
/// genie_prob(1, .) = 1.
double genie_prob(double p_c, double xtg);

/// All per-label genie outputs genie_prob(p_i, xtg) at once, with the
/// kProbClip guard applied to p first. regret is the log of their sum and
/// pnml_posterior their normalization.
Eigen::VectorXd genie_terms(const ProbVector& p, double xtg);

/// The regret Gamma = log sum_i genie_prob(p_i, xtg), in nats.
/// Zero when xtg = 0 and bounded above by log C. Values of xtg above 1
/// are accepted (they occur only on the simulation path).
double regret(const ProbVector& p, double xtg);

/// Posterior q_i = genie_prob(p_i, xtg) / K with K = sum_j genie_prob(p_j,
/// xtg) = exp(regret). Preserves the argmax of p.
ProbVector pnml_posterior(const ProbVector& p, double xtg);

/// Two-class regret response: for each grid value returns (xtg,
/// regret((p1, 1-p1), xtg) / log 2). Requires p1 in (0, 1).
std::vector<std::pair<double, double>>
response_curve(double p1, std::span<const double> xtg_grid);

} // namespace pnml
