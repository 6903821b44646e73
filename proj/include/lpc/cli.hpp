#ifndef LPC_CLI_HPP
#define LPC_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpc/gene_scores.hpp"
#include "lpc/io.hpp"

/**
 * @file cli.hpp
 * @brief Command-line driver: `score`, `lpc`, `tune`, `fdr`, `advantage`,
 * `simulate` and `camp-demo`.
 *
 * Each command writes TSV tables into the output directory. Tables start
 * with `#` comment lines recording every parameter needed to regenerate
 * them. The worker count is deliberately not recorded: it never changes
 * the output.
 *
 * Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical error.
 * Failures print one line `error[<usage|data|numerical>]: <message>`.
 */

namespace lpc {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string matrix_path;
    std::string outcome_path;
    std::string truth_path;
    std::string output_dir = ".";
    OutcomeKind outcome_kind = OutcomeKind::automatic;
    /** Empty means the default for the outcome type. */
    std::optional<ScoreKind> score_kind;
    /** Empty means "auto": tune on the data. */
    std::optional<double> lambda;
    FudgePolicy fudge;
    /** Required by every stochastic command. */
    std::optional<std::uint64_t> seed;
    int threads = 1;

    Index permutations = 200;
    Index n_splits = 20;
    double fdr_split_fraction = 0.5;
    int n_repeats = 10;
    Index top_m = 0;
    double tune_split_fraction = 2.0 / 3.0;
    Index max_k = 100;
    Index resamples = 0;
    double resample_fraction = 0.9;

    double advantage_split_fraction = 0.5;
    std::vector<double> alphas{0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};

    std::string generator = "sim1";
    int noise_blocks = 3;

    Index replicates = 200;
};

/** `median`, `median-sd`, `zero` or a non-negative number. Throws `UsageError`. */
FudgePolicy parse_fudge(const std::string& text);

/** Run one command; errors are reported on `err` and mapped to exit codes. */
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

/** Parse `args` (without the program name) and run. */
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}

#endif
