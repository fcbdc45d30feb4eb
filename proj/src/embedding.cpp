#include "pnml/embedding.hpp"

#include <string>

namespace pnml {

EmbeddingMatrix::EmbeddingMatrix(Eigen::MatrixXd data, bool normalized)
    : data_(std::move(data)), normalized_(normalized) {
    if (data_.rows() < 1 || data_.cols() < 1)
        throw InvalidInput("embedding matrix must have at least one row and one column");
    if (!data_.allFinite())
        throw InvalidInput("embedding matrix contains a non-finite entry");
    if (normalized_) {
        for (Eigen::Index i = 0; i < data_.rows(); ++i) {
            const double norm = data_.row(i).norm();
            if (std::abs(norm - 1.0) > 1e-9)
                throw InvalidInput("row " + std::to_string(i) +
                                   " is not unit-norm but the normalized flag is set");
        }
    }
}

EmbeddingMatrix EmbeddingMatrix::from_row_major(Eigen::Index rows, Eigen::Index cols,
                                                std::span<const double> values) {
    if (rows < 1 || cols < 1)
        throw InvalidInput("embedding matrix must have at least one row and one column");
    if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != values.size())
        throw InvalidInput("buffer size does not match rows * cols");
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> view(values.data(), rows, cols);
    return EmbeddingMatrix(Eigen::MatrixXd(view));
}

} // namespace pnml
