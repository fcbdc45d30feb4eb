#pragma once

#include <limits>

#include <Eigen/Core>

#include "pnml/embedding.hpp"

namespace pnml {

/// Eigenvalues below rank_tol_factor * lambda_max * max(N, M) count as zero.
inline constexpr double kDefaultRankTolFactor = std::numeric_limits<double>::epsilon();

/// Eigendecomposition of the training Gram matrix X^T X.
struct EigenBasis {
    Eigen::MatrixXd eigvecs; ///< M x M, orthonormal columns, sign-fixed
    Eigen::VectorXd eigvals; ///< length M, nonnegative, sorted descending
    Eigen::Index rank = 0;   ///< count of eigenvalues above the rank tolerance
};

/// Precomputed training statistics for scoring: the eigenbasis, the
/// quadratic-form kernel X^+ X^+T = (X^T X)^+ and the row-space projector
/// X^+ X. Immutable after construction.
struct PnmlStats {
    EigenBasis basis;
    Eigen::MatrixXd quad_kernel; ///< M x M symmetric PSD
    Eigen::MatrixXd row_proj;    ///< M x M symmetric idempotent
    Eigen::Index n_train = 0;
    bool normalized_inputs = false; ///< stats built from L2-normalized rows

    Eigen::Index dim() const { return quad_kernel.rows(); }
    bool degenerate() const { return basis.rank == 0; }
};

/// Eigendecomposition of X^T X. Eigenvalues are clamped at zero, sorted
/// descending, and each eigenvector's largest-magnitude component is made
/// positive so results are reproducible. Rank counts eigenvalues strictly
/// above rank_tol_factor * lambda_max * max(N, M).
EigenBasis decompose(const EmbeddingMatrix& train,
                     double rank_tol_factor = kDefaultRankTolFactor);

/// Builds the pseudo-inverse products from a basis:
///   quad_kernel = sum_{m < rank} u_m u_m^T / lambda_m
///   row_proj    = sum_{m < rank} u_m u_m^T
/// A rank-0 basis yields zero matrices; stats.degenerate() reports it.
PnmlStats build_stats(const EigenBasis& basis, Eigen::Index n_train,
                      bool normalized_inputs = false);

/// Projection of x onto the orthogonal complement of the training row
/// space: x - row_proj * x.
Eigen::VectorXd project_orth(const Eigen::VectorXd& x, const PnmlStats& stats);

} // namespace pnml
