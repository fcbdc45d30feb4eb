#include "pnml/erm.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "pnml/embedding.hpp"
#include "pnml/errors.hpp"
#include "pnml/linalg.hpp"

namespace pnml {

LabelMatrix::LabelMatrix(std::vector<Eigen::Index> classes, Eigen::Index n_classes)
    : classes_(std::move(classes)), n_classes_(n_classes) {
    if (n_classes_ < 2)
        throw InvalidInput("need at least two classes");
    if (classes_.empty())
        throw InvalidInput("label set is empty");
    for (std::size_t i = 0; i < classes_.size(); ++i)
        if (classes_[i] < 0 || classes_[i] >= n_classes_)
            throw InvalidInput("label " + std::to_string(i) + " outside [0, n_classes)");
}

Eigen::MatrixXd LabelMatrix::one_hot() const {
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(rows(), n_classes_);
    for (Eigen::Index i = 0; i < rows(); ++i)
        y(i, classes_[i]) = 1.0;
    return y;
}

ProbVector softmax(const Eigen::VectorXd& logits) {
    if (logits.size() < 2)
        throw InvalidInput("softmax needs at least two logits");
    if (!logits.allFinite())
        throw InvalidInput("softmax input has non-finite logits");
    // Scalar exp: huge negative gaps must underflow to an exact 0, which
    // Eigen's clamped vector exp does not guarantee.
    const double shift = logits.maxCoeff();
    const Eigen::VectorXd shifted =
        logits.unaryExpr([shift](double v) { return std::exp(v - shift); });
    return ProbVector(shifted / shifted.sum());
}

ZTargets one_hot_targets(const LabelMatrix& labels, double eps) {
    const Eigen::Index c = labels.n_classes();
    if (!(eps > 0.0) || !(eps < 1.0 / static_cast<double>(c)))
        throw InvalidInput("eps must lie in (0, 1/n_classes)");
    const double hot = std::log(1.0 - eps);
    const double cold = std::log(eps / static_cast<double>(c - 1));

    ZTargets z;
    z.rows = Eigen::MatrixXd::Constant(labels.rows(), c, cold);
    for (Eigen::Index i = 0; i < labels.rows(); ++i)
        z.rows(i, labels.class_of(i)) = hot;
    return z;
}

LinearModel fit(const EmbeddingMatrix& train, const ZTargets& targets,
                const PnmlStats& stats) {
    if (train.cols() != stats.dim())
        throw InvalidInput("training width does not match the stats dimension");
    if (targets.rows.rows() != train.rows())
        throw InvalidInput("target rows do not match training rows");
    if (targets.rows.cols() < 2)
        throw InvalidInput("targets need at least two classes");
    if (!targets.rows.allFinite())
        throw InvalidInput("targets contain non-finite entries");
    return LinearModel{stats.quad_kernel * (train.data().transpose() * targets.rows)};
}

LinearModel recursive_update(const LinearModel& model, const PnmlStats& stats,
                             const Eigen::VectorXd& x, const Eigen::RowVectorXd& z_row,
                             double orth_tol) {
    if (model.n_features() != stats.dim())
        throw InvalidInput("model width does not match the stats dimension");
    if (z_row.size() != model.n_classes())
        throw InvalidInput("target row width does not match the model");
    if (!z_row.allFinite())
        throw InvalidInput("target row has non-finite entries");
    if (!(orth_tol > 0.0))
        throw InvalidInput("orth_tol must be positive");

    const Eigen::VectorXd x_perp = project_orth(x, stats);
    Eigen::VectorXd gain;
    if (x_perp.norm() > orth_tol * x.norm()) {
        gain = x_perp / x_perp.squaredNorm();
    } else {
        const double q = std::max(0.0, x.dot(stats.quad_kernel * x));
        gain = (stats.quad_kernel * x) / (1.0 + q);
    }
    const Eigen::RowVectorXd innovation = z_row - x.transpose() * model.weights;
    return LinearModel{model.weights + gain * innovation};
}

ProbVector predict(const LinearModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.n_features())
        throw InvalidInput("sample width does not match the model");
    if (!x.allFinite())
        throw InvalidInput("sample has non-finite entries");
    return softmax(model.weights.transpose() * x);
}

double genie_refit_oracle(const EmbeddingMatrix& train, const ZTargets& targets,
                          const Eigen::VectorXd& x, Eigen::Index assumed_class,
                          const PnmlStats& stats, double orth_tol) {
    if (assumed_class < 0 || assumed_class >= targets.rows.cols())
        throw InvalidInput("assumed class outside [0, n_classes)");

    const LinearModel base = fit(train, targets, stats);
    const Eigen::VectorXd logits = base.weights.transpose() * x;
    if (!logits.allFinite())
        throw NumericalFailure("base model produced non-finite logits");

    const double shift = logits.maxCoeff();
    const double ln_s =
        shift +
        std::log(logits.unaryExpr([shift](double v) { return std::exp(v - shift); }).sum());

    // Keep every other column at its current value so only the assumed
    // class carries innovation.
    Eigen::RowVectorXd z_row = logits.transpose();
    z_row[assumed_class] = ln_s;

    const LinearModel updated = recursive_update(base, stats, x, z_row, orth_tol);
    return predict(updated, x)[assumed_class];
}

} // namespace pnml
