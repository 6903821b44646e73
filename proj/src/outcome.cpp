#include "lpc/outcome.hpp"

#include <cmath>

#include "lpc/error.hpp"

namespace lpc {

namespace {

template<class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };

std::vector<Index> count_labels(const std::vector<int>& labels, int num_classes) {
    std::vector<Index> sizes(num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 1 || labels[i] > num_classes) {
            throw DataError("class label " + std::to_string(labels[i]) + " at sample " + std::to_string(i) +
                            " is outside 1.." + std::to_string(num_classes));
        }
        ++sizes[labels[i] - 1];
    }
    return sizes;
}

void check_class_sizes(const std::vector<Index>& sizes) {
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] < 2) {
            throw DataError("class " + std::to_string(k + 1) + " has " + std::to_string(sizes[k]) +
                            " member(s); at least 2 are required");
        }
    }
}

}

Index outcome_size(const Outcome& outcome) {
    return std::visit(overloaded{
        [](const Quantitative& o) { return o.y.size(); },
        [](const TwoClass& o) { return static_cast<Index>(o.labels.size()); },
        [](const MultiClass& o) { return static_cast<Index>(o.labels.size()); },
        [](const Survival& o) { return o.time.size(); },
    }, outcome);
}

std::string outcome_kind_name(const Outcome& outcome) {
    return std::visit(overloaded{
        [](const Quantitative&) { return std::string("quantitative"); },
        [](const TwoClass&) { return std::string("two-class"); },
        [](const MultiClass&) { return std::string("multi-class"); },
        [](const Survival&) { return std::string("survival"); },
    }, outcome);
}

std::vector<Index> class_sizes(const TwoClass& outcome) {
    return count_labels(outcome.labels, 2);
}

std::vector<Index> class_sizes(const MultiClass& outcome) {
    return count_labels(outcome.labels, outcome.num_classes);
}

void validate_outcome(const Outcome& outcome, Index n) {
    if (outcome_size(outcome) != n) {
        throw DataError("outcome has " + std::to_string(outcome_size(outcome)) + " entries but the matrix has " +
                        std::to_string(n) + " samples");
    }

    std::visit(overloaded{
        [](const Quantitative& o) {
            for (Index i = 0; i < o.y.size(); ++i) {
                if (!std::isfinite(o.y[i])) {
                    throw DataError("non-finite outcome at sample " + std::to_string(i));
                }
            }
        },
        [](const TwoClass& o) { check_class_sizes(class_sizes(o)); },
        [](const MultiClass& o) {
            if (o.num_classes < 2) {
                throw DataError("multi-class outcome needs at least 2 classes");
            }
            check_class_sizes(class_sizes(o));
        },
        [](const Survival& o) {
            if (static_cast<Index>(o.event.size()) != o.time.size()) {
                throw DataError("survival time and event vectors differ in length");
            }
            bool any_event = false;
            for (Index i = 0; i < o.time.size(); ++i) {
                if (!std::isfinite(o.time[i]) || o.time[i] <= 0) {
                    throw DataError("survival time at sample " + std::to_string(i) + " must be positive and finite");
                }
                if (o.event[i] > 1) {
                    throw DataError("event indicator at sample " + std::to_string(i) + " must be 0 or 1");
                }
                any_event = any_event || o.event[i] == 1;
            }
            if (!any_event) {
                throw DataError("survival outcome has no observed events (all censored)");
            }
        },
    }, outcome);
}

Outcome select_outcome(const Outcome& outcome, std::span<const Index> indices) {
    const auto m = static_cast<Index>(indices.size());
    return std::visit(overloaded{
        [&](const Quantitative& o) -> Outcome {
            Quantitative out{Vector(m)};
            for (Index i = 0; i < m; ++i) {
                out.y[i] = o.y[indices[i]];
            }
            return out;
        },
        [&](const TwoClass& o) -> Outcome {
            TwoClass out;
            for (auto i : indices) {
                out.labels.push_back(o.labels[i]);
            }
            return out;
        },
        [&](const MultiClass& o) -> Outcome {
            MultiClass out{{}, o.num_classes};
            for (auto i : indices) {
                out.labels.push_back(o.labels[i]);
            }
            return out;
        },
        [&](const Survival& o) -> Outcome {
            Survival out{Vector(m), {}};
            for (Index i = 0; i < m; ++i) {
                out.time[i] = o.time[indices[i]];
                out.event.push_back(o.event[indices[i]]);
            }
            return out;
        },
    }, outcome);
}

}
