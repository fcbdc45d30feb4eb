#pragma once

#include <span>

#include <Eigen/Core>

#include "pnml/errors.hpp"

namespace pnml {

/// N x M matrix of embeddings, one sample per row. Carries a flag telling
/// whether the rows are known to have unit L2 norm.
class EmbeddingMatrix {
public:
    /// Takes ownership of `data`. Throws InvalidInput if the matrix is
    /// empty, contains a non-finite entry, or `normalized` is set while
    /// some row is not unit-norm within 1e-9.
    explicit EmbeddingMatrix(Eigen::MatrixXd data, bool normalized = false);

    /// Builds from a row-major buffer of rows*cols values.
    static EmbeddingMatrix from_row_major(Eigen::Index rows, Eigen::Index cols,
                                          std::span<const double> values);

    Eigen::Index rows() const { return data_.rows(); }
    Eigen::Index cols() const { return data_.cols(); }
    const Eigen::MatrixXd& data() const { return data_; }
    bool normalized() const { return normalized_; }

private:
    Eigen::MatrixXd data_;
    bool normalized_;
};

} // namespace pnml
