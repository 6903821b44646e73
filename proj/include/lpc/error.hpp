#ifndef LPC_ERROR_HPP
#define LPC_ERROR_HPP

#include <stdexcept>
#include <string>

/**
 * @file error.hpp
 * @brief Exception types shared by all modules.
 *
 * The CLI maps each type onto a distinct exit code, so library code should
 * throw the most specific one that applies.
 */

namespace lpc {

/**
 * Malformed or inconsistent input data: dimension mismatches, bad ids,
 * non-finite values, outcomes that violate their invariants.
 */
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * A computation that cannot proceed numerically, e.g. a zero denominator
 * with no fudge constant or singular normal equations.
 */
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}

#endif
