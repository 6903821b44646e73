#ifndef LPC_IO_HPP
#define LPC_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lpc/matrix_core.hpp"
#include "lpc/outcome.hpp"

/**
 * @file io.hpp
 * @brief Tab-separated file formats.
 *
 * Matrix files store features as rows: a header line of sample ids (with
 * or without a leading corner cell), then one line per feature holding its id
 * and one value per sample. Outcome files start with a `sample_id` header;
 * survival outcomes use columns named `time` and `event`, all others a single
 * value column. Lines starting with `#` and blank lines are ignored.
 * Reals are written with 12 significant digits in scientific notation.
 */

namespace lpc {

enum class OutcomeKind { automatic, quantitative, two_class, multi_class, survival };

std::string outcome_kind_flag(OutcomeKind kind);
OutcomeKind parse_outcome_kind(const std::string& name);

struct Dataset {
    ExpressionMatrix x;
    Outcome outcome;
};

ExpressionMatrix read_matrix(std::istream& input, const std::string& source);
ExpressionMatrix read_matrix(const std::string& path);

/**
 * Outcome rows are matched to `sample_ids` by id. With `automatic`, a
 * `time`/`event` pair means survival, a column holding only 1s and 2s means
 * two classes, and anything else is quantitative. Multi-class outcomes must
 * be requested explicitly and use labels `1..K`.
 */
Outcome read_outcome(std::istream& input, const std::string& source, const std::vector<std::string>& sample_ids,
                     OutcomeKind kind = OutcomeKind::automatic);
Outcome read_outcome(const std::string& path, const std::vector<std::string>& sample_ids,
                     OutcomeKind kind = OutcomeKind::automatic);

Dataset load_dataset(const std::string& matrix_path, const std::string& outcome_path,
                     OutcomeKind kind = OutcomeKind::automatic);

/** Truth file: `feature_id<TAB>truth` with 0/1 values, matched by id. */
std::vector<std::uint8_t> read_truth(const std::string& path, const std::vector<std::string>& feature_ids);

/** `%.11e`. */
std::string format_real(double value);

void write_matrix(std::ostream& output, const ExpressionMatrix& x);
void write_outcome(std::ostream& output, const Outcome& outcome, const std::vector<std::string>& sample_ids);
void write_truth(std::ostream& output, const std::vector<std::string>& feature_ids,
                 const std::vector<std::uint8_t>& truth);

}

#endif
