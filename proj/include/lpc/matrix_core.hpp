#ifndef LPC_MATRIX_CORE_HPP
#define LPC_MATRIX_CORE_HPP

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

/**
 * @file matrix_core.hpp
 * @brief Expression matrix representation, feature centering and the thin SVD.
 */

namespace lpc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * @brief Samples-by-features data matrix with identifiers.
 *
 * Rows are samples and columns are features. On disk the layout is
 * transposed (one feature per line); see `io.hpp`. Construction validates
 * that there are at least two samples and one feature, that the id vectors
 * match the dimensions, and that every entry is finite.
 */
class ExpressionMatrix {
public:
    ExpressionMatrix(Matrix values, std::vector<std::string> sample_ids, std::vector<std::string> feature_ids);

    /** Ids default to `s1..sn` and `f1..fp`. */
    explicit ExpressionMatrix(Matrix values);

    Index num_samples() const { return values_.rows(); }
    Index num_features() const { return values_.cols(); }

    const Matrix& values() const { return values_; }
    const std::vector<std::string>& sample_ids() const { return sample_ids_; }
    const std::vector<std::string>& feature_ids() const { return feature_ids_; }

    /** Rows `rows` in the given order, ids carried along. */
    ExpressionMatrix select_samples(std::span<const Index> rows) const;

private:
    Matrix values_;
    std::vector<std::string> sample_ids_;
    std::vector<std::string> feature_ids_;
};

/** Subtract each column's mean. Order and ids are preserved. */
ExpressionMatrix center_features(const ExpressionMatrix& x);

/** Sample ids `s1..sn`, also used by the simulators. */
std::vector<std::string> default_sample_ids(Index n);
std::vector<std::string> default_feature_ids(Index p);

/**
 * @brief Thin singular value decomposition `X = U diag(d) V^T`.
 *
 * Only the `r` directions with `d_i > rank_tolerance * d_1` are kept.
 * The columns of `V` are the eigenarrays (length-p patterns over features)
 * and the columns of `U` the eigengenes. Each column of `V` is sign-fixed so
 * that its largest-magnitude entry is positive, with the matching column of
 * `U` flipped alongside.
 */
struct EigenBasis {
    Matrix U;
    Vector d;
    Matrix V;

    Index rank() const { return d.size(); }
};

EigenBasis thin_svd(const Matrix& x, double rank_tolerance = 1e-12);

inline EigenBasis thin_svd(const ExpressionMatrix& x, double rank_tolerance = 1e-12) {
    return thin_svd(x.values(), rank_tolerance);
}

/** `U diag(d) V^T`. */
Matrix reconstruct(const EigenBasis& basis);

}

#endif
