#ifndef LPC_OUTCOME_HPP
#define LPC_OUTCOME_HPP

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lpc/matrix_core.hpp"

/**
 * @file outcome.hpp
 * @brief Per-sample outcomes: quantitative, two-class, multi-class or survival.
 */

namespace lpc {

struct Quantitative {
    Vector y;
};

/** Labels are 1 or 2. */
struct TwoClass {
    std::vector<int> labels;
};

/** Labels are 1..num_classes. */
struct MultiClass {
    std::vector<int> labels;
    int num_classes = 0;
};

/** `event[i]` is 1 for an observed death and 0 for a censored time. */
struct Survival {
    Vector time;
    std::vector<std::uint8_t> event;
};

using Outcome = std::variant<Quantitative, TwoClass, MultiClass, Survival>;

Index outcome_size(const Outcome& outcome);

std::string outcome_kind_name(const Outcome& outcome);

/**
 * Throws `DataError` unless the outcome has `n` entries, class labels are in
 * range with at least 2 members per class, survival times are positive and
 * at least one event is observed, and every value is finite.
 */
void validate_outcome(const Outcome& outcome, Index n);

/** Entries `indices` in the given order. Survival pairs move together. */
Outcome select_outcome(const Outcome& outcome, std::span<const Index> indices);

/** Number of members of each class (index 0 is class 1). */
std::vector<Index> class_sizes(const TwoClass& outcome);
std::vector<Index> class_sizes(const MultiClass& outcome);

}

#endif
