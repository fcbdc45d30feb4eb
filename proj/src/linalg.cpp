#include "pnml/linalg.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Dense>

namespace pnml {

EigenBasis decompose(const EmbeddingMatrix& train, double rank_tol_factor) {
    if (!(rank_tol_factor > 0.0))
        throw InvalidInput("rank_tol_factor must be positive");

    const Eigen::MatrixXd& x = train.data();
    const Eigen::MatrixXd gram = x.transpose() * x;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success)
        throw NumericalFailure("eigendecomposition of the Gram matrix did not converge");

    const Eigen::Index m = gram.rows();
    EigenBasis basis;
    basis.eigvals.resize(m);
    basis.eigvecs.resize(m, m);

    // Eigen returns ascending order; flip to descending and clamp noise.
    for (Eigen::Index i = 0; i < m; ++i) {
        basis.eigvals[i] = std::max(0.0, solver.eigenvalues()[m - 1 - i]);
        basis.eigvecs.col(i) = solver.eigenvectors().col(m - 1 - i);
    }

    // Sign convention: largest-magnitude component of each eigenvector is
    // positive.
    for (Eigen::Index i = 0; i < m; ++i) {
        Eigen::Index at = 0;
        basis.eigvecs.col(i).cwiseAbs().maxCoeff(&at);
        if (basis.eigvecs(at, i) < 0.0)
            basis.eigvecs.col(i) = -basis.eigvecs.col(i);
    }

    const double scale = static_cast<double>(std::max(train.rows(), train.cols()));
    const double tol = rank_tol_factor * basis.eigvals[0] * scale;
    basis.rank = 0;
    while (basis.rank < m && basis.eigvals[basis.rank] > tol)
        ++basis.rank;
    return basis;
}

PnmlStats build_stats(const EigenBasis& basis, Eigen::Index n_train, bool normalized_inputs) {
    const Eigen::Index m = basis.eigvals.size();
    if (m < 1 || basis.eigvecs.rows() != m || basis.eigvecs.cols() != m)
        throw InvalidInput("eigenbasis has inconsistent dimensions");
    if (basis.rank < 0 || basis.rank > m)
        throw InvalidInput("eigenbasis rank out of range");
    if (n_train < 1)
        throw InvalidInput("n_train must be positive");
    for (Eigen::Index i = 0; i < m; ++i) {
        if (basis.eigvals[i] < 0.0 || (i > 0 && basis.eigvals[i] > basis.eigvals[i - 1]))
            throw InvalidInput("eigenvalues must be nonnegative and sorted descending");
        if (i < basis.rank && !(basis.eigvals[i] > 0.0))
            throw InvalidInput("eigenvalues within the rank must be positive");
    }

    PnmlStats stats;
    stats.basis = basis;
    stats.n_train = n_train;
    stats.normalized_inputs = normalized_inputs;
    stats.quad_kernel = Eigen::MatrixXd::Zero(m, m);
    stats.row_proj = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < basis.rank; ++i) {
        const auto u = basis.eigvecs.col(i);
        stats.quad_kernel.noalias() += (u * u.transpose()) / basis.eigvals[i];
        stats.row_proj.noalias() += u * u.transpose();
    }
    return stats;
}

Eigen::VectorXd project_orth(const Eigen::VectorXd& x, const PnmlStats& stats) {
    if (x.size() != stats.dim())
        throw InvalidInput("vector length " + std::to_string(x.size()) +
                           " does not match stats dimension " + std::to_string(stats.dim()));
    if (!x.allFinite())
        throw InvalidInput("vector contains a non-finite entry");
    return x - stats.row_proj * x;
}

} // namespace pnml
