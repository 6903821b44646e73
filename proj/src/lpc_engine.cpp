#include "lpc/lpc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lpc/error.hpp"

namespace lpc {

namespace {

constexpr double kSingularTolerance = 1e-10;

OlsFit solve_with_intercept(const Vector& T, const Matrix& V) {
    if (T.size() != V.rows()) {
        throw DataError("score vector has " + std::to_string(T.size()) + " entries but the eigenarrays have " +
                        std::to_string(V.rows()));
    }
    const Index r = V.cols();
    const double p = static_cast<double>(V.rows());
    Vector ones_proj = V.transpose() * Vector::Ones(V.rows());

    // With orthonormal V the Schur complement of the intercept block is
    // p - ||V^T 1||^2; it vanishes exactly when 1 is in span(V).
    Matrix gram(r + 1, r + 1);
    gram(0, 0) = p;
    gram.block(0, 1, 1, r) = ones_proj.transpose();
    gram.block(1, 0, r, 1) = ones_proj;
    gram.block(1, 1, r, r) = V.transpose() * V;

    Eigen::LDLT<Matrix> ldlt(gram.block(1, 1, r, r));
    double schur = p - ones_proj.dot(ldlt.solve(ones_proj));
    if (!(schur > kSingularTolerance * p)) {
        Index worst = 0;
        if (r > 0) {
            ones_proj.cwiseAbs().maxCoeff(&worst);
        }
        throw NumericalError("normal equations are singular: the all-ones vector lies in the span of the eigenarrays; "
                             "drop eigenarray " + std::to_string(worst + 1) + " (the one most aligned with it)");
    }

    Vector rhs(r + 1);
    rhs[0] = T.sum();
    rhs.tail(r) = V.transpose() * T;
    Vector solution = gram.ldlt().solve(rhs);
    return OlsFit{solution[0], solution.tail(r)};
}

}

OlsFit ols_on_eigenarrays(const Vector& T, const EigenBasis& basis) {
    return solve_with_intercept(T, basis.V);
}

Vector soft_threshold(const Vector& coefs, double lambda) {
    if (!(lambda >= 0)) {
        throw DataError("lambda must be non-negative");
    }
    const double cut = lambda / 2;
    Vector out(coefs.size());
    for (Index i = 0; i < coefs.size(); ++i) {
        double magnitude = std::abs(coefs[i]) - cut;
        out[i] = magnitude > 0 ? std::copysign(magnitude, coefs[i]) : 0.0;
    }
    return out;
}

LpcFit shrink_fit(const OlsFit& ols, const EigenBasis& basis, double lambda) {
    LpcFit fit;
    fit.lambda = lambda;
    fit.intercept = ols.intercept;
    fit.ols_coefs = ols.coefs;
    fit.shrunk_coefs = soft_threshold(ols.coefs, lambda);
    fit.fitted = (basis.V * fit.shrunk_coefs).array() + ols.intercept;
    for (Index i = 0; i < fit.shrunk_coefs.size(); ++i) {
        if (fit.shrunk_coefs[i] != 0) {
            fit.active_set.push_back(i);
        }
    }
    return fit;
}

LpcFit lpc_scores(const ScoreVector& T, const EigenBasis& basis, double lambda) {
    return shrink_fit(ols_on_eigenarrays(T.values, basis), basis, lambda);
}

MultiClassLpc lpc_multiclass(const ContrastMatrix& contrasts, const EigenBasis& basis, double lambda) {
    const Index K = contrasts.S.rows();
    if (K < 2) {
        throw DataError("multi-class LPC needs at least 2 contrasts");
    }
    MultiClassLpc out;
    out.score = Vector::Zero(contrasts.S.cols());
    for (Index k = 0; k < K; ++k) {
        Vector row = contrasts.S.row(k).transpose();
        out.fits.push_back(shrink_fit(ols_on_eigenarrays(row, basis), basis, lambda));
        out.score += out.fits.back().fitted.cwiseAbs2();
    }
    if (K == 2) {
        out.signed_two_class = out.fits[0].fitted;
    }
    return out;
}

Vector leading_projection(const Vector& T, const EigenBasis& basis, Index count) {
    count = std::min(count, basis.rank());
    auto ols = solve_with_intercept(T, basis.V.leftCols(count));
    return (basis.V.leftCols(count) * ols.coefs).array() + ols.intercept;
}

std::vector<Index> rank_features(const Vector& key, const Vector& tiebreak) {
    if (key.size() != tiebreak.size()) {
        throw DataError("ranking key and tiebreak differ in length");
    }
    std::vector<Index> order(key.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        double ka = std::abs(key[a]), kb = std::abs(key[b]);
        if (ka != kb) {
            return ka > kb;
        }
        double ta = std::abs(tiebreak[a]), tb = std::abs(tiebreak[b]);
        if (ta != tb) {
            return ta > tb;
        }
        return a < b;
    });
    return order;
}

std::vector<Index> ranks_from_order(const std::vector<Index>& order) {
    std::vector<Index> ranks(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        ranks[order[pos]] = static_cast<Index>(pos) + 1;
    }
    return ranks;
}

LpcPath::LpcPath(const Vector& scores, const EigenBasis& basis) : V_(basis.V) {
    fits_.push_back(ols_on_eigenarrays(scores, basis));
}

LpcPath::LpcPath(const ContrastMatrix& contrasts, const EigenBasis& basis) : V_(basis.V), multiclass_(true) {
    for (Index k = 0; k < contrasts.S.rows(); ++k) {
        fits_.push_back(ols_on_eigenarrays(contrasts.S.row(k).transpose(), basis));
    }
}

Vector LpcPath::statistic(double lambda) const {
    auto fitted = [&](const OlsFit& ols) -> Vector {
        return (V_ * soft_threshold(ols.coefs, lambda)).array() + ols.intercept;
    };
    if (!multiclass_) {
        return fitted(fits_.front());
    }
    Vector total = Vector::Zero(V_.rows());
    for (const auto& ols : fits_) {
        total += fitted(ols).cwiseAbs2();
    }
    return total;
}

double LpcPath::max_abs_coef() const {
    double best = 0;
    for (const auto& ols : fits_) {
        if (ols.coefs.size() > 0) {
            best = std::max(best, ols.coefs.cwiseAbs().maxCoeff());
        }
    }
    return best;
}

}
