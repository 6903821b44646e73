#include "lpc/gene_scores.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lpc/error.hpp"

namespace lpc {

namespace {

constexpr double kDegenerateTolerance = 1e-12;

// Numerator and denominator of a ratio statistic, plus the magnitude a
// "nonzero" denominator is judged against.
struct RatioParts {
    Vector numerator;
    Vector denominator;
    double reference = 0;
};

Matrix centered_values(const ExpressionMatrix& x) {
    return center_features(x).values();
}

double scale_of(const Matrix& centered) {
    return centered.cwiseAbs().maxCoeff();
}

double median_of(Vector values) {
    auto n = values.size();
    auto mid = values.data() + n / 2;
    std::nth_element(values.data(), mid, values.data() + n);
    double upper = *mid;
    if (n % 2 == 1) {
        return upper;
    }
    double lower = *std::max_element(values.data(), mid);
    return (lower + upper) / 2;
}

ScoreVector finish_ratio(const RatioParts& parts, double s0, ScoreKind kind, const std::string& what) {
    if (s0 < 0 || !std::isfinite(s0)) {
        throw DataError("fudge constant must be finite and non-negative");
    }
    ScoreVector out{Vector(parts.numerator.size()), kind, s0, score_kind_name(kind)};
    for (Index j = 0; j < parts.numerator.size(); ++j) {
        double denom = parts.denominator[j];
        if (s0 == 0 && !(denom > kDegenerateTolerance * parts.reference)) {
            throw NumericalError("degenerate denominator in " + what + " for feature " + std::to_string(j) +
                                 "; use a positive fudge constant");
        }
        out.values[j] = parts.numerator[j] / (denom + s0);
    }
    return out;
}

RatioParts t_parts(const ExpressionMatrix& x, const TwoClass& outcome) {
    validate_outcome(outcome, x.num_samples());
    Matrix xc = centered_values(x);
    auto sizes = class_sizes(outcome);
    const Index p = xc.cols();

    Vector sum1 = Vector::Zero(p), sum2 = Vector::Zero(p);
    for (Index i = 0; i < xc.rows(); ++i) {
        (outcome.labels[i] == 1 ? sum1 : sum2) += xc.row(i).transpose();
    }
    Vector mean1 = sum1 / static_cast<double>(sizes[0]);
    Vector mean2 = sum2 / static_cast<double>(sizes[1]);

    Vector ss = Vector::Zero(p);
    for (Index i = 0; i < xc.rows(); ++i) {
        const Vector& centre = outcome.labels[i] == 1 ? mean1 : mean2;
        ss += (xc.row(i).transpose() - centre).cwiseAbs2();
    }

    double n1 = static_cast<double>(sizes[0]), n2 = static_cast<double>(sizes[1]);
    Vector pooled_var = ss / (n1 + n2 - 2);
    RatioParts parts;
    parts.numerator = mean2 - mean1;
    parts.denominator = (pooled_var * (1 / n1 + 1 / n2)).cwiseSqrt();
    parts.reference = scale_of(xc);
    return parts;
}

RatioParts quant_parts(const ExpressionMatrix& x, const Quantitative& outcome) {
    validate_outcome(outcome, x.num_samples());
    if (x.num_samples() < 3) {
        throw DataError("quantitative score needs at least 3 samples");
    }
    Matrix xc = centered_values(x);
    Vector yc = outcome.y.array() - outcome.y.mean();
    const Index p = xc.cols();
    const double dof = static_cast<double>(xc.rows() - 2);

    RatioParts parts{Vector(p), Vector(p), scale_of(xc) * yc.norm()};
    for (Index j = 0; j < p; ++j) {
        auto col = xc.col(j);
        double sxx = col.squaredNorm();
        double sxy = col.dot(yc);
        double rss = sxx > 0 ? (yc - (sxy / sxx) * col).squaredNorm() : yc.squaredNorm();
        parts.numerator[j] = sxy;
        parts.denominator[j] = std::sqrt(rss / dof) * std::sqrt(sxx);
    }
    return parts;
}

RatioParts cox_parts(const ExpressionMatrix& x, const Survival& outcome) {
    validate_outcome(outcome, x.num_samples());
    Matrix xc = centered_values(x);
    const Index n = xc.rows(), p = xc.cols();

    std::vector<Index> order(n);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return outcome.time[a] > outcome.time[b]; });

    // Walk times in decreasing order so the risk set only ever grows. All
    // samples sharing a time join it before any of that time's events are
    // scored, which is the Breslow convention.
    Vector risk_sum = Vector::Zero(p), risk_sumsq = Vector::Zero(p);
    Vector score = Vector::Zero(p), information = Vector::Zero(p);
    Index at_risk = 0, events = 0;
    for (Index start = 0; start < n;) {
        Index end = start;
        while (end < n && outcome.time[order[end]] == outcome.time[order[start]]) {
            Index i = order[end];
            risk_sum += xc.row(i).transpose();
            risk_sumsq += xc.row(i).transpose().cwiseAbs2();
            ++at_risk;
            ++end;
        }

        Index deaths = 0;
        Vector death_sum = Vector::Zero(p);
        for (Index e = start; e < end; ++e) {
            Index i = order[e];
            if (outcome.event[i]) {
                death_sum += xc.row(i).transpose();
                ++deaths;
            }
        }
        if (deaths > 0) {
            double m = static_cast<double>(at_risk), d = static_cast<double>(deaths);
            Vector mean = risk_sum / m;
            score += death_sum - d * mean;
            information += d * (risk_sumsq / m - mean.cwiseAbs2()).cwiseMax(0.0);
            events += deaths;
        }
        start = end;
    }

    return RatioParts{score, information.cwiseSqrt(), scale_of(xc) * std::sqrt(static_cast<double>(events))};
}

struct ClassMoments {
    Matrix means;      // K x p
    Vector overall;    // p
    Vector ss_within;  // p
    std::vector<Index> sizes;
};

ClassMoments class_moments(const Matrix& xc, const MultiClass& outcome) {
    ClassMoments out;
    out.sizes = class_sizes(outcome);
    const int K = outcome.num_classes;
    const Index p = xc.cols();
    out.means = Matrix::Zero(K, p);
    for (Index i = 0; i < xc.rows(); ++i) {
        out.means.row(outcome.labels[i] - 1) += xc.row(i);
    }
    for (int k = 0; k < K; ++k) {
        out.means.row(k) /= static_cast<double>(out.sizes[k]);
    }
    out.overall = xc.colwise().mean().transpose();
    out.ss_within = Vector::Zero(p);
    for (Index i = 0; i < xc.rows(); ++i) {
        out.ss_within += (xc.row(i) - out.means.row(outcome.labels[i] - 1)).cwiseAbs2().transpose();
    }
    return out;
}

Vector pooled_sd(const ClassMoments& moments, Index n, int K) {
    return (moments.ss_within / static_cast<double>(n - K)).cwiseSqrt();
}

void check_multiclass(const ExpressionMatrix& x, const MultiClass& outcome) {
    validate_outcome(outcome, x.num_samples());
    if (x.num_samples() <= outcome.num_classes) {
        throw DataError("multi-class statistics need more samples than classes");
    }
}

template<class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };

template<class Expected>
const Expected& expect_outcome(const Outcome& outcome, ScoreKind kind) {
    if (auto ptr = std::get_if<Expected>(&outcome)) {
        return *ptr;
    }
    throw DataError("score kind '" + score_kind_name(kind) + "' does not apply to a " + outcome_kind_name(outcome) + " outcome");
}

}

std::string score_kind_name(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::t: return "t";
        case ScoreKind::quant: return "quant";
        case ScoreKind::cox: return "cox";
        case ScoreKind::f: return "f";
        case ScoreKind::external: return "external";
        case ScoreKind::simplified: return "simplified";
    }
    return "unknown";
}

ScoreKind parse_score_kind(const std::string& name) {
    for (auto kind : {ScoreKind::t, ScoreKind::quant, ScoreKind::cox, ScoreKind::f, ScoreKind::external, ScoreKind::simplified}) {
        if (score_kind_name(kind) == name) {
            return kind;
        }
    }
    throw DataError("unknown score kind '" + name + "'");
}

std::string fudge_rule_name(FudgeRule rule) {
    switch (rule) {
        case FudgeRule::zero: return "zero";
        case FudgeRule::median_sd: return "median-sd";
        case FudgeRule::median_denominator: return "median";
        case FudgeRule::fixed: return "fixed";
    }
    return "unknown";
}

FudgeRule parse_fudge_rule(const std::string& name) {
    for (auto rule : {FudgeRule::zero, FudgeRule::median_sd, FudgeRule::median_denominator, FudgeRule::fixed}) {
        if (fudge_rule_name(rule) == name) {
            return rule;
        }
    }
    throw DataError("unknown fudge rule '" + name + "'");
}

double fudge_constant(const ExpressionMatrix& x, const FudgePolicy& policy) {
    switch (policy.rule) {
        case FudgeRule::zero:
            return 0;
        case FudgeRule::fixed:
            if (!(policy.value >= 0) || !std::isfinite(policy.value)) {
                throw DataError("fixed fudge constant must be finite and non-negative");
            }
            return policy.value;
        case FudgeRule::median_sd: {
            Matrix xc = centered_values(x);
            Vector sd = (xc.colwise().squaredNorm().transpose() / static_cast<double>(xc.rows() - 1)).cwiseSqrt();
            return median_of(std::move(sd));
        }
        case FudgeRule::median_denominator:
            break;
    }
    throw DataError("the median-denominator fudge rule needs an outcome and a score kind");
}

double fudge_constant(const ExpressionMatrix& x, const Outcome& outcome, ScoreKind kind, const FudgePolicy& policy) {
    if (kind == ScoreKind::simplified || kind == ScoreKind::external) {
        return 0;
    }
    if (policy.rule != FudgeRule::median_denominator) {
        return fudge_constant(x, policy);
    }
    switch (kind) {
        case ScoreKind::t:
            return median_of(t_parts(x, expect_outcome<TwoClass>(outcome, kind)).denominator);
        case ScoreKind::quant:
            return median_of(quant_parts(x, expect_outcome<Quantitative>(outcome, kind)).denominator);
        case ScoreKind::cox:
            return median_of(cox_parts(x, expect_outcome<Survival>(outcome, kind)).denominator);
        case ScoreKind::f: {
            const auto& mc = expect_outcome<MultiClass>(outcome, kind);
            check_multiclass(x, mc);
            Matrix xc = centered_values(x);
            return median_of(pooled_sd(class_moments(xc, mc), xc.rows(), mc.num_classes));
        }
        default:
            return 0;
    }
}

ScoreVector t_score_two_class(const ExpressionMatrix& x, const TwoClass& outcome, double s0) {
    return finish_ratio(t_parts(x, outcome), s0, ScoreKind::t, "two-sample t");
}

ScoreVector quant_score(const ExpressionMatrix& x, const Quantitative& outcome, double s0) {
    return finish_ratio(quant_parts(x, outcome), s0, ScoreKind::quant, "standardized slope");
}

ScoreVector simplified_score(const ExpressionMatrix& x, const Quantitative& outcome) {
    validate_outcome(outcome, x.num_samples());
    return ScoreVector{x.values().transpose() * outcome.y, ScoreKind::simplified, 0, "simplified"};
}

ScoreVector cox_score(const ExpressionMatrix& x, const Survival& outcome, double s0) {
    return finish_ratio(cox_parts(x, outcome), s0, ScoreKind::cox, "Cox score");
}

ScoreVector anova_f(const ExpressionMatrix& x, const MultiClass& outcome) {
    check_multiclass(x, outcome);
    Matrix xc = centered_values(x);
    auto moments = class_moments(xc, outcome);
    const int K = outcome.num_classes;
    const Index p = xc.cols(), n = xc.rows();

    Vector ss_between = Vector::Zero(p);
    for (int k = 0; k < K; ++k) {
        ss_between += static_cast<double>(moments.sizes[k]) * (moments.means.row(k).transpose() - moments.overall).cwiseAbs2();
    }

    RatioParts parts;
    parts.numerator = ss_between / static_cast<double>(K - 1);
    parts.denominator = moments.ss_within / static_cast<double>(n - K);
    double scale = scale_of(xc);
    parts.reference = scale * scale;
    return finish_ratio(parts, 0, ScoreKind::f, "ANOVA F");
}

ContrastMatrix class_contrasts(const ExpressionMatrix& x, const MultiClass& outcome, double s0) {
    check_multiclass(x, outcome);
    Matrix xc = centered_values(x);
    auto moments = class_moments(xc, outcome);
    const int K = outcome.num_classes;
    Vector sd = pooled_sd(moments, xc.rows(), K);

    ContrastMatrix out{Matrix(K, xc.cols()), sd, s0};
    for (int k = 0; k < K; ++k) {
        RatioParts parts{moments.means.row(k).transpose() - moments.overall, sd, scale_of(xc)};
        out.S.row(k) = finish_ratio(parts, s0, ScoreKind::f, "class contrast").values.transpose();
    }
    return out;
}

ScoreVector external_scores(const Vector& values, Index num_features, std::string label) {
    if (values.size() != num_features) {
        throw DataError("external scores have " + std::to_string(values.size()) + " entries but the matrix has " +
                        std::to_string(num_features) + " features");
    }
    for (Index j = 0; j < values.size(); ++j) {
        if (!std::isfinite(values[j])) {
            throw DataError("non-finite external score for feature " + std::to_string(j));
        }
    }
    return ScoreVector{values, ScoreKind::external, 0, std::move(label)};
}

ScoreKind default_score_kind(const Outcome& outcome) {
    return std::visit(overloaded{
        [](const Quantitative&) { return ScoreKind::quant; },
        [](const TwoClass&) { return ScoreKind::t; },
        [](const MultiClass&) { return ScoreKind::f; },
        [](const Survival&) { return ScoreKind::cox; },
    }, outcome);
}

ScoreVector compute_scores(const ExpressionMatrix& x, const Outcome& outcome, ScoreKind kind, double s0) {
    switch (kind) {
        case ScoreKind::t:
            return t_score_two_class(x, expect_outcome<TwoClass>(outcome, kind), s0);
        case ScoreKind::quant:
            return quant_score(x, expect_outcome<Quantitative>(outcome, kind), s0);
        case ScoreKind::simplified:
            return simplified_score(x, expect_outcome<Quantitative>(outcome, kind));
        case ScoreKind::cox:
            return cox_score(x, expect_outcome<Survival>(outcome, kind), s0);
        case ScoreKind::f:
            return anova_f(x, expect_outcome<MultiClass>(outcome, kind));
        case ScoreKind::external:
            break;
    }
    throw DataError("external scores cannot be recomputed from data");
}

ScoreVector compute_scores(const ExpressionMatrix& x, const Outcome& outcome, const ScoreSpec& spec) {
    double s0 = fudge_constant(x, outcome, spec.kind, spec.fudge);
    auto out = compute_scores(x, outcome, spec.kind, s0);
    out.fudge = spec.kind == ScoreKind::f ? 0 : s0;
    return out;
}

}
