#include "pnml/pnml.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pnml {

namespace {

// Genie probability of one class with the boundary conventions applied.
// The direct form p / (p + p^t (1-p)) never overflows for p in (0,1).
double genie_term(double pc, double xtg) {
    if (pc <= 0.0)
        return 0.0;
    if (pc >= 1.0)
        return 1.0;
    return pc / (pc + std::pow(pc, xtg) * (1.0 - pc));
}

// Entries exactly 0 or 1 are kept (boundary conventions). The rest are
// clamped away from the simplex boundary and rescaled so the total mass is
// unchanged.
Eigen::VectorXd clip_probs(const Eigen::VectorXd& p) {
    Eigen::VectorXd out = p;
    double free_old = 0.0;
    double free_new = 0.0;
    bool changed = false;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        const double v = p[i];
        if (v == 0.0 || v == 1.0)
            continue;
        const double c = std::clamp(v, kProbClip, 1.0 - kProbClip);
        out[i] = c;
        free_old += v;
        free_new += c;
        changed |= (c != v);
    }
    if (changed && free_new > 0.0) {
        const double scale = free_old / free_new;
        for (Eigen::Index i = 0; i < p.size(); ++i)
            if (p[i] != 0.0 && p[i] != 1.0)
                out[i] *= scale;
    }
    return out;
}

void check_xtg(double xtg) {
    if (!std::isfinite(xtg) || xtg < 0.0)
        throw InvalidInput("xtg must be finite and nonnegative");
}

} // namespace

ProbVector::ProbVector(Eigen::VectorXd probs) : probs_(std::move(probs)) {
    if (probs_.size() < 2)
        throw InvalidInput("probability vector needs at least two classes");
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
        const double v = probs_[i];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0 + 1e-12)
            throw InvalidInput("probability entry " + std::to_string(i) + " outside [0, 1]");
    }
    if (std::abs(probs_.sum() - 1.0) > 1e-9)
        throw InvalidInput("probabilities do not sum to 1");
}

Eigen::Index ProbVector::argmax() const {
    Eigen::Index at = 0;
    probs_.maxCoeff(&at);
    return at;
}

double x_top_g(const Eigen::VectorXd& x, const PnmlStats& stats, double orth_tol) {
    if (!(orth_tol > 0.0))
        throw InvalidInput("orth_tol must be positive");
    const Eigen::VectorXd x_perp = project_orth(x, stats);
    if (x_perp.norm() > orth_tol * x.norm())
        return 1.0; // x^T g = x^T x_perp / ||x_perp||^2 = 1 in this branch
    const double q = std::max(0.0, x.dot(stats.quad_kernel * x));
    return q / (1.0 + q);
}

double genie_prob(double p_c, double xtg) {
    if (!std::isfinite(p_c) || p_c < 0.0 || p_c > 1.0)
        throw InvalidInput("p_c must lie in [0, 1]");
    check_xtg(xtg);
    return genie_term(p_c, xtg);
}

Eigen::VectorXd genie_terms(const ProbVector& p, double xtg) {
    check_xtg(xtg);
    const Eigen::VectorXd clipped = clip_probs(p.values());
    Eigen::VectorXd terms(clipped.size());
    for (Eigen::Index i = 0; i < clipped.size(); ++i)
        terms[i] = genie_term(clipped[i], xtg);
    return terms;
}

double regret(const ProbVector& p, double xtg) {
    return std::max(0.0, std::log(genie_terms(p, xtg).sum()));
}

ProbVector pnml_posterior(const ProbVector& p, double xtg) {
    const Eigen::VectorXd terms = genie_terms(p, xtg);
    const double normalizer = terms.sum();
    if (!(normalizer > 0.0))
        throw NumericalFailure("pNML normalizer vanished; input was not a simplex");
    return ProbVector(terms / normalizer);
}

std::vector<std::pair<double, double>>
response_curve(double p1, std::span<const double> xtg_grid) {
    if (!std::isfinite(p1) || p1 <= 0.0 || p1 >= 1.0)
        throw InvalidInput("p1 must lie strictly inside (0, 1)");
    Eigen::VectorXd two(2);
    two << p1, 1.0 - p1;
    const ProbVector p(two);
    const double max_regret = std::log(2.0);

    std::vector<std::pair<double, double>> curve;
    curve.reserve(xtg_grid.size());
    for (const double g : xtg_grid)
        curve.emplace_back(g, regret(p, g) / max_regret);
    return curve;
}

} // namespace pnml
