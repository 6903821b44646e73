#include "lpc/matrix_core.hpp"

#include <cmath>
#include <unordered_set>

#include "lpc/error.hpp"

namespace lpc {

namespace {

std::vector<std::string> numbered_ids(char prefix, Index count) {
    std::vector<std::string> ids;
    ids.reserve(count);
    for (Index i = 0; i < count; ++i) {
        ids.push_back(prefix + std::to_string(i + 1));
    }
    return ids;
}

}

std::vector<std::string> default_sample_ids(Index n) { return numbered_ids('s', n); }
std::vector<std::string> default_feature_ids(Index p) { return numbered_ids('f', p); }

ExpressionMatrix::ExpressionMatrix(Matrix values, std::vector<std::string> sample_ids, std::vector<std::string> feature_ids) :
    values_(std::move(values)), sample_ids_(std::move(sample_ids)), feature_ids_(std::move(feature_ids))
{
    if (values_.rows() < 2) {
        throw DataError("expression matrix needs at least 2 samples, got " + std::to_string(values_.rows()));
    }
    if (values_.cols() < 1) {
        throw DataError("expression matrix needs at least 1 feature");
    }
    if (static_cast<Index>(sample_ids_.size()) != values_.rows()) {
        throw DataError("sample id count " + std::to_string(sample_ids_.size()) + " does not match " + std::to_string(values_.rows()) + " rows");
    }
    if (static_cast<Index>(feature_ids_.size()) != values_.cols()) {
        throw DataError("feature id count " + std::to_string(feature_ids_.size()) + " does not match " + std::to_string(values_.cols()) + " columns");
    }

    for (Index j = 0; j < values_.cols(); ++j) {
        for (Index i = 0; i < values_.rows(); ++i) {
            if (!std::isfinite(values_(i, j))) {
                throw DataError(
                    "non-finite value at row " + std::to_string(i) + " (sample '" + sample_ids_[i] + "'), column " +
                    std::to_string(j) + " (feature '" + feature_ids_[j] + "')"
                );
            }
        }
    }

    std::unordered_set<std::string> seen;
    for (const auto& id : feature_ids_) {
        if (!seen.insert(id).second) {
            throw DataError("duplicate feature id '" + id + "'");
        }
    }
    seen.clear();
    for (const auto& id : sample_ids_) {
        if (!seen.insert(id).second) {
            throw DataError("duplicate sample id '" + id + "'");
        }
    }
}

ExpressionMatrix::ExpressionMatrix(Matrix values) :
    ExpressionMatrix(values, default_sample_ids(values.rows()), default_feature_ids(values.cols())) {}

ExpressionMatrix ExpressionMatrix::select_samples(std::span<const Index> rows) const {
    Matrix sub(static_cast<Index>(rows.size()), values_.cols());
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        sub.row(static_cast<Index>(r)) = values_.row(rows[r]);
        ids.push_back(sample_ids_[rows[r]]);
    }
    return ExpressionMatrix(std::move(sub), std::move(ids), feature_ids_);
}

ExpressionMatrix center_features(const ExpressionMatrix& x) {
    Matrix centered = x.values();
    const double n = static_cast<double>(centered.rows());
    for (Index j = 0; j < centered.cols(); ++j) {
        auto col = centered.col(j);
        // Second pass mops up the rounding error of the first.
        double mean = col.sum() / n;
        mean += (col.array() - mean).sum() / n;
        col.array() -= mean;
    }
    return ExpressionMatrix(std::move(centered), x.sample_ids(), x.feature_ids());
}

EigenBasis thin_svd(const Matrix& x, double rank_tolerance) {
    if (!(rank_tolerance > 0 && rank_tolerance < 1)) {
        throw DataError("rank tolerance must lie in (0, 1)");
    }
    if (x.size() == 0 || x.cwiseAbs().maxCoeff() == 0) {
        throw NumericalError("zero matrix has no eigenarrays");
    }

    Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    Index rank = 0;
    while (rank < sv.size() && sv[rank] > rank_tolerance * sv[0]) {
        ++rank;
    }

    EigenBasis basis{svd.matrixU().leftCols(rank), sv.head(rank), svd.matrixV().leftCols(rank)};
    for (Index i = 0; i < rank; ++i) {
        Index largest;
        basis.V.col(i).cwiseAbs().maxCoeff(&largest);
        if (basis.V(largest, i) < 0) {
            basis.V.col(i) *= -1;
            basis.U.col(i) *= -1;
        }
    }
    return basis;
}

Matrix reconstruct(const EigenBasis& basis) {
    return basis.U * basis.d.asDiagonal() * basis.V.transpose();
}

}
