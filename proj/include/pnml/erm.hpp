#pragma once

#include <vector>

#include <Eigen/Core>

#include "pnml/pnml.hpp"

namespace pnml {

/// Default mass taken off the hot class when building inverse-softmax
/// targets for one-hot labels.
inline constexpr double kDefaultTargetEps = 0.01;

/// N one-hot labels of width C, stored as class indices.
class LabelMatrix {
public:
    /// Throws InvalidInput unless n_classes >= 2 and every index is in
    /// [0, n_classes).
    LabelMatrix(std::vector<Eigen::Index> classes, Eigen::Index n_classes);

    Eigen::Index rows() const { return static_cast<Eigen::Index>(classes_.size()); }
    Eigen::Index n_classes() const { return n_classes_; }
    Eigen::Index class_of(Eigen::Index row) const { return classes_[row]; }

    /// The explicit N x C one-hot matrix Y.
    Eigen::MatrixXd one_hot() const;

private:
    std::vector<Eigen::Index> classes_;
    Eigen::Index n_classes_;
};

/// Single-layer softmax model: logits are x^T theta.
struct LinearModel {
    Eigen::MatrixXd weights; ///< M x C, columns are per-class weight vectors

    Eigen::Index n_features() const { return weights.rows(); }
    Eigen::Index n_classes() const { return weights.cols(); }
};

/// Inverse-activation regression targets, one row of width C per sample.
struct ZTargets {
    Eigen::MatrixXd rows; ///< N x C
};

/// Numerically stable softmax (max-shifted).
ProbVector softmax(const Eigen::VectorXd& logits);

/// Inverse-softmax targets for one-hot labels: the hot class gets
/// ln(1 - eps), every other class ln(eps / (C - 1)). Softmax of such a row
/// recovers (1 - eps, eps/(C-1), ...). Requires 0 < eps < 1/C.
ZTargets one_hot_targets(const LabelMatrix& labels, double eps = kDefaultTargetEps);

/// Least-squares fit theta = quad_kernel * X^T * Z (the pseudo-inverse
/// solution X^+ Z). Degenerate stats give theta = 0.
LinearModel fit(const EmbeddingMatrix& train, const ZTargets& targets,
                const PnmlStats& stats);

/// One-sample update theta' = theta + g * (z_row - x^T theta) where
///   g = x_perp / ||x_perp||^2            if ||x_perp|| > orth_tol * ||x||
///   g = quad_kernel x / (1 + x^T quad_kernel x)   otherwise.
/// In the first branch the new sample is interpolated exactly:
/// x^T theta' = z_row.
LinearModel recursive_update(const LinearModel& model, const PnmlStats& stats,
                             const Eigen::VectorXd& x, const Eigen::RowVectorXd& z_row,
                             double orth_tol = kDefaultOrthTol);

/// Softmax of x^T theta.
ProbVector predict(const LinearModel& model, const Eigen::VectorXd& x);

/// Refit oracle for the genie probability: fits the base model, sets the
/// assumed class's target to ln sum_j exp(theta_j^T x) (all other columns
/// keep zero innovation), applies recursive_update and returns the updated
/// softmax probability of the assumed class.
double genie_refit_oracle(const EmbeddingMatrix& train, const ZTargets& targets,
                          const Eigen::VectorXd& x, Eigen::Index assumed_class,
                          const PnmlStats& stats, double orth_tol = kDefaultOrthTol);

} // namespace pnml
