#include "lpc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"

#include "lpc/error.hpp"
#include "lpc/lambda_tuning.hpp"
#include "lpc/lpc_engine.hpp"
#include "lpc/resampling.hpp"
#include "lpc/rng.hpp"
#include "lpc/significance.hpp"
#include "lpc/sim_lab.hpp"

namespace lpc {

namespace {

constexpr const char* kVersion = "0.1.0";

using Header = std::vector<std::pair<std::string, std::string>>;

std::string join_indices(const std::vector<Index>& values) {
    if (values.empty()) {
        return "none";
    }
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? "," : "") + std::to_string(values[i] + 1);
    }
    return out;
}

class Writer {
public:
    Writer(const RunConfig& config, std::ostream& log) : config_(config), log_(log) {}

    void write(const std::string& name, const Header& header, const std::string& body) {
        std::filesystem::path dir(config_.output_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        auto path = dir / name;
        std::ofstream output(path, std::ios::binary);
        if (!output) {
            throw DataError("cannot write '" + path.string() + "'");
        }
        output << "# lpcscore " << kVersion << ' ' << config_.command << '\n';
        for (const auto& [key, value] : header) {
            output << "# " << key << ": " << value << '\n';
        }
        output << body;
        if (!output) {
            throw DataError("failed writing '" + path.string() + "'");
        }
        log_ << "wrote " << path.string() << '\n';
    }

    void write_plain(const std::string& name, const std::string& body) {
        std::filesystem::path dir(config_.output_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        auto path = dir / name;
        std::ofstream output(path, std::ios::binary);
        if (!output) {
            throw DataError("cannot write '" + path.string() + "'");
        }
        output << body;
        log_ << "wrote " << path.string() << '\n';
    }

private:
    const RunConfig& config_;
    std::ostream& log_;
};

std::uint64_t require_seed(const RunConfig& config, const std::string& why) {
    if (!config.seed) {
        throw UsageError("--seed is required for " + why);
    }
    return *config.seed;
}

void check_fraction(double value, const std::string& flag) {
    if (!(value > 0 && value < 1)) {
        throw UsageError(flag + " must lie strictly between 0 and 1");
    }
}

void validate_config(const RunConfig& c) {
    if (c.threads < 1) throw UsageError("--threads must be at least 1");
    if (c.permutations < 1) throw UsageError("--permutations must be at least 1");
    if (c.n_splits < 1) throw UsageError("--splits must be at least 1");
    if (c.n_repeats < 1) throw UsageError("--repeats must be at least 1");
    if (c.top_m < 0) throw UsageError("--top-m must be non-negative");
    if (c.max_k < 1) throw UsageError("--max-k must be at least 1");
    if (c.resamples < 0) throw UsageError("--resamples must be non-negative");
    if (c.replicates < 1) throw UsageError("--replicates must be at least 1");
    if (c.lambda && !(*c.lambda >= 0)) throw UsageError("--lambda must be 'auto' or a non-negative number");
    if (c.fudge.rule == FudgeRule::fixed && !(c.fudge.value >= 0)) throw UsageError("--fudge must be non-negative");
    check_fraction(c.fdr_split_fraction, "--split-fraction");
    check_fraction(c.tune_split_fraction, "--tune-fraction");
    check_fraction(c.resample_fraction, "--resample-fraction");
    check_fraction(c.advantage_split_fraction, "--split-fraction");
    for (double a : c.alphas) check_fraction(a, "--alphas");
}

Dataset load_inputs(const RunConfig& config) {
    if (config.matrix_path.empty() || config.outcome_path.empty()) {
        throw UsageError("'" + config.command + "' needs --matrix and --outcome");
    }
    return load_dataset(config.matrix_path, config.outcome_path, config.outcome_kind);
}

ScoreSpec make_spec(const RunConfig& config, const Outcome& outcome) {
    return ScoreSpec{config.score_kind.value_or(default_score_kind(outcome)), config.fudge};
}

void describe_scores(Header& header, const Dataset& data, const ScoreSpec& spec, const ScoreVector& T) {
    header.emplace_back("samples", std::to_string(data.x.num_samples()));
    header.emplace_back("features", std::to_string(data.x.num_features()));
    header.emplace_back("outcome", outcome_kind_name(data.outcome));
    header.emplace_back("score_kind", score_kind_name(T.kind));
    header.emplace_back("fudge_rule", fudge_rule_name(spec.fudge.rule));
    header.emplace_back("s0", format_real(T.fudge));
}

TuningOptions tuning_options(const RunConfig& config) {
    TuningOptions options;
    options.n_repeats = config.n_repeats;
    options.top_m = config.top_m;
    options.split_fraction = config.tune_split_fraction;
    options.seed = config.seed.value_or(0);
    options.num_threads = config.threads;
    return options;
}

double resolve_lambda(const RunConfig& config, const ExpressionMatrix& x, const Outcome& outcome,
                      const ScoreSpec& spec, Header& header)
{
    if (config.lambda) {
        header.emplace_back("lambda", format_real(*config.lambda));
        header.emplace_back("lambda_source", "fixed");
        return *config.lambda;
    }
    require_seed(config, "--lambda auto");
    auto report = select_lambda(x, outcome, spec, tuning_options(config));
    header.emplace_back("lambda", format_real(report.chosen_lambda));
    header.emplace_back("lambda_source", "auto");
    header.emplace_back("tune_repeats", std::to_string(report.n_repeats));
    header.emplace_back("tune_top_m", std::to_string(report.top_m));
    header.emplace_back("tune_fraction", format_real(report.split_fraction));
    return report.chosen_lambda;
}

std::vector<Index> requested_ks(const RunConfig& config, Index p) {
    std::vector<Index> ks;
    for (Index k = 1; k <= std::min(p, config.max_k); ++k) {
        ks.push_back(k);
    }
    return ks;
}

void command_score(const RunConfig& config, Writer& writer) {
    auto data = load_inputs(config);
    auto spec = make_spec(config, data.outcome);
    auto T = compute_scores(data.x, data.outcome, spec);
    auto ranks = ranks_from_order(rank_features(T.values, T.values));
    Header header;
    describe_scores(header, data, spec, T);
    std::ostringstream body;
    body << "feature_id\tscore\trank\n";
    for (Index j = 0; j < data.x.num_features(); ++j) {
        body << data.x.feature_ids()[j] << '\t' << format_real(T.values[j]) << '\t' << ranks[j] << '\n';
    }
    writer.write("scores.tsv", header, body.str());
}

void command_lpc(const RunConfig& config, Writer& writer) {
    auto data = load_inputs(config);
    auto spec = make_spec(config, data.outcome);
    auto T = compute_scores(data.x, data.outcome, spec);
    Header header;
    describe_scores(header, data, spec, T);
    if (config.seed) {
        header.emplace_back("seed", std::to_string(*config.seed));
    }
    double lambda = resolve_lambda(config, data.x, data.outcome, spec, header);
    auto basis = eigenarrays_of(data.x);
    header.emplace_back("eigenarrays", std::to_string(basis.rank()));

    Vector L;
    if (auto mc = std::get_if<MultiClass>(&data.outcome)) {
        double s0 = fudge_constant(data.x, data.outcome, ScoreKind::f, spec.fudge);
        auto fit = lpc_multiclass(class_contrasts(data.x, *mc, s0), basis, lambda);
        L = fit.score;
        header.emplace_back("contrast_s0", format_real(s0));
        for (std::size_t k = 0; k < fit.fits.size(); ++k) {
            header.emplace_back("active_eigenarrays_class" + std::to_string(k + 1), join_indices(fit.fits[k].active_set));
        }
    } else {
        auto fit = lpc_scores(T, basis, lambda);
        L = fit.fitted;
        header.emplace_back("active_eigenarrays", join_indices(fit.active_set));
    }
    auto t_ranks = ranks_from_order(rank_features(T.values, T.values));
    auto l_ranks = ranks_from_order(rank_features(L, T.values));
    std::ostringstream body;
    body << "feature_id\tscore\trank\tlpc_score\tlpc_rank\n";
    for (Index j = 0; j < data.x.num_features(); ++j) {
        body << data.x.feature_ids()[j] << '\t' << format_real(T.values[j]) << '\t' << t_ranks[j] << '\t'
             << format_real(L[j]) << '\t' << l_ranks[j] << '\n';
    }
    writer.write("lpc.tsv", header, body.str());
}

void command_tune(const RunConfig& config, Writer& writer) {
    std::uint64_t seed = require_seed(config, "'tune'");
    auto data = load_inputs(config);
    auto spec = make_spec(config, data.outcome);
    auto report = select_lambda(data.x, data.outcome, spec, tuning_options(config));
    Header header{
        {"seed", std::to_string(seed)},
        {"outcome", outcome_kind_name(data.outcome)},
        {"score_kind", score_kind_name(spec.kind)},
        {"fudge_rule", fudge_rule_name(spec.fudge.rule)},
        {"repeats", std::to_string(report.n_repeats)},
        {"top_m", std::to_string(report.top_m)},
        {"split_fraction", format_real(report.split_fraction)},
    };
    std::ostringstream body;
    body << "lambda\tmean_test_score\tstd_error\n";
    for (std::size_t g = 0; g < report.grid.size(); ++g) {
        body << format_real(report.grid[g]) << '\t' << format_real(report.mean_test_score[g]) << '\t'
             << format_real(report.std_error[g]) << '\n';
    }
    body << "# chosen_lambda: " << format_real(report.chosen_lambda) << '\n';
    writer.write("tuning.tsv", header, body.str());
}

void command_fdr(const RunConfig& config, Writer& writer) {
    std::uint64_t seed = require_seed(config, "'fdr'");
    auto data = load_inputs(config);
    auto spec = make_spec(config, data.outcome);
    Header header{{"seed", std::to_string(seed)}};
    double lambda = resolve_lambda(config, data.x, data.outcome, spec, header);

    FdrLpcOptions options;
    options.n_permutations = config.permutations;
    options.n_splits = config.n_splits;
    options.split_fraction = config.fdr_split_fraction;
    options.seed = seed;
    options.ks = requested_ks(config, data.x.num_features());
    options.num_threads = config.threads;
    auto result = fdr_lpc(data.x, data.outcome, spec, lambda, options);

    header.emplace_back("outcome", outcome_kind_name(data.outcome));
    header.emplace_back("score_kind", score_kind_name(spec.kind));
    header.emplace_back("fudge_rule", fudge_rule_name(spec.fudge.rule));
    header.emplace_back("permutations", std::to_string(config.permutations));
    header.emplace_back("splits", std::to_string(config.n_splits));
    header.emplace_back("split_fraction", format_real(config.fdr_split_fraction));
    header.emplace_back("pi0", format_real(result.t_curve.pi0));
    header.emplace_back("denominator", format_real(result.denominator));
    for (const auto& w : result.warnings) {
        header.emplace_back("warning", w);
    }

    std::optional<std::vector<double>> true_t, true_l;
    if (!config.truth_path.empty()) {
        auto truth = read_truth(config.truth_path, data.x.feature_ids());
        auto T = compute_scores(data.x, data.outcome, spec);
        Vector L = lpc_path_for(data.x, data.outcome, spec, T, eigenarrays_of(data.x)).statistic(lambda);
        true_t = true_fdr(rank_features(T.values, T.values), truth, options.ks);
        true_l = true_fdr(rank_features(L, T.values), truth, options.ks);
        header.emplace_back("truth", config.truth_path);
    }

    std::ostringstream body;
    body << "k\tfdr_t\tfdr_lpc\traw_fdr_t\traw_fdr_lpc\tdelta";
    if (true_t) {
        body << "\ttrue_fdr_t\ttrue_fdr_lpc";
    }
    body << '\n';
    for (std::size_t i = 0; i < options.ks.size(); ++i) {
        const auto& t = result.t_curve.points[i];
        const auto& l = result.lpc_curve.points[i];
        body << t.k << '\t' << format_real(t.fdr) << '\t' << format_real(l.fdr) << '\t' << format_real(t.raw) << '\t'
             << format_real(l.raw) << '\t' << format_real(result.delta[i]);
        if (true_t) {
            body << '\t' << format_real((*true_t)[i]) << '\t' << format_real((*true_l)[i]);
        }
        body << '\n';
    }
    writer.write("fdr.tsv", header, body.str());

    if (config.resamples > 0) {
        auto diff = resampled_fdr_difference(data.x, data.outcome, spec, lambda, config.resample_fraction,
                                             config.resamples, options);
        Header rheader = header;
        rheader.emplace_back("resamples", std::to_string(config.resamples));
        rheader.emplace_back("resample_fraction", format_real(config.resample_fraction));
        std::ostringstream rbody;
        rbody << "k\tmean_difference\tstd_error\n";
        for (std::size_t i = 0; i < diff.ks.size(); ++i) {
            rbody << diff.ks[i] << '\t' << format_real(diff.mean[i]) << '\t'
                  << (diff.std_error[i] ? format_real(*diff.std_error[i]) : std::string("NA")) << '\n';
        }
        writer.write("fdr_resampled.tsv", rheader, rbody.str());
    }
}

void command_advantage(const RunConfig& config, Writer& writer) {
    std::uint64_t seed = require_seed(config, "'advantage'");
    auto data = load_inputs(config);
    auto spec = make_spec(config, data.outcome);
    RandomStream rng(seed, stream_id(StreamTag::advantage_split, 0));
    auto split = split_samples(data.outcome, config.advantage_split_fraction, rng);
    auto x_train = data.x.select_samples(split.train);
    auto x_test = data.x.select_samples(split.test);
    auto y_train = select_outcome(data.outcome, split.train);
    auto y_test = select_outcome(data.outcome, split.test);

    Header header{{"seed", std::to_string(seed)},
                  {"split_fraction", format_real(config.advantage_split_fraction)},
                  {"train_samples", std::to_string(split.train.size())},
                  {"test_samples", std::to_string(split.test.size())}};
    double lambda = resolve_lambda(config, x_train, y_train, spec, header);
    auto curve = predictive_advantage(x_train, x_test, y_train, y_test, spec, lambda, config.alphas);
    header.emplace_back("score_kind", score_kind_name(spec.kind));
    header.emplace_back("fudge_rule", fudge_rule_name(spec.fudge.rule));
    std::ostringstream body;
    body << "alpha\tselected\tlpc_conditional_mean\tt_conditional_mean\tadvantage\n";
    for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
        body << format_real(curve.alphas[i]) << '\t' << curve.selected[i] << '\t' << format_real(curve.lpc_conditional_mean[i]) << '\t'
             << format_real(curve.t_conditional_mean[i]) << '\t' << format_real(curve.advantage[i]) << '\n';
    }
    writer.write("advantage.tsv", header, body.str());
}

SimulatedDataset generate(const RunConfig& config, std::uint64_t seed) {
    const auto& g = config.generator;
    if (g == "sim1") return simulate_1(seed);
    if (g == "sim2") {
        if (config.noise_blocks != 3 && config.noise_blocks != 7) {
            throw UsageError("--noise-blocks must be 3 or 7");
        }
        return simulate_2(seed, config.noise_blocks);
    }
    if (g == "sim3") return simulate_3(seed);
    if (g == "latent") return latent_model_sample(LatentModelSpec{}, seed).first;
    if (g == "confounded") return simulate_confounded(seed);
    if (g == "isolated") return simulate_isolated(seed);
    throw UsageError("unknown generator '" + g + "' (expected sim1, sim2, sim3, latent, confounded or isolated)");
}

void command_simulate(const RunConfig& config, Writer& writer) {
    std::uint64_t seed = require_seed(config, "'simulate'");
    auto data = generate(config, seed);
    if (config.outcome_kind == OutcomeKind::two_class && std::holds_alternative<Quantitative>(data.outcome)) {
        data = as_two_class(std::move(data));
    } else if (config.outcome_kind != OutcomeKind::automatic &&
               config.outcome_kind != OutcomeKind::quantitative &&
               config.outcome_kind != OutcomeKind::two_class) {
        throw UsageError("simulate supports --outcome-kind quantitative or two-class");
    }
    std::string stamp = "# generator: " + data.generator + "\n# seed: " + std::to_string(seed) + "\n";
    std::ostringstream matrix, outcome, truth;
    matrix << stamp;
    write_matrix(matrix, data.x);
    outcome << stamp;
    write_outcome(outcome, data.outcome, data.x.sample_ids());
    truth << stamp;
    write_truth(truth, data.x.feature_ids(), data.truth);
    writer.write_plain("matrix.tsv", matrix.str());
    writer.write_plain("outcome.tsv", outcome.str());
    writer.write_plain("truth.tsv", truth.str());
}

void command_camp_demo(const RunConfig& config, Writer& writer) {
    std::uint64_t seed = require_seed(config, "'camp-demo'");
    auto report = camp_demo(seed, config.replicates);
    Header header{{"seed", std::to_string(seed)},
                  {"replicates", std::to_string(report.replicates)},
                  {"hypotheses", std::to_string(report.n_hypotheses)},
                  {"nonnull", std::to_string(report.n_nonnull)},
                  {"called", std::to_string(report.called)}};
    std::ostringstream body;
    body << "statistic\tcutoff\testimated_fdr\ttrue_fdr\n";
    body << "p_value\t" << format_real(report.pvalue_cutoff) << '\t' << format_real(report.pvalue_estimated_fdr) << '\t'
         << format_real(report.pvalue_true_fdr) << '\n';
    body << "camp\t" << format_real(report.camp_cutoff) << '\t' << format_real(report.camp_estimated_fdr) << '\t'
         << format_real(report.camp_true_fdr) << '\n';
    writer.write("camp_demo.tsv", header, body.str());
}

std::optional<double> parse_lambda(const std::string& text) {
    if (text == "auto") {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used == text.size()) {
            return value;
        }
    } catch (const std::exception&) {
    }
    throw UsageError("--lambda must be 'auto' or a non-negative number");
}

}

FudgePolicy parse_fudge(const std::string& text) {
    if (text == "median") return {FudgeRule::median_denominator, 0};
    if (text == "median-sd") return {FudgeRule::median_sd, 0};
    if (text == "zero") return {FudgeRule::zero, 0};
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used == text.size()) {
            return {FudgeRule::fixed, value};
        }
    } catch (const std::exception&) {
    }
    throw UsageError("--fudge must be median, median-sd, zero or a number");
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        validate_config(config);
        Writer writer(config, out);
        const auto& c = config.command;
        if (c == "score") command_score(config, writer);
        else if (c == "lpc") command_lpc(config, writer);
        else if (c == "tune") command_tune(config, writer);
        else if (c == "fdr") command_fdr(config, writer);
        else if (c == "advantage") command_advantage(config, writer);
        else if (c == "simulate") command_simulate(config, writer);
        else if (c == "camp-demo") command_camp_demo(config, writer);
        else throw UsageError("unknown command '" + c + "'");
        return 0;
    } catch (const UsageError& e) {
        err << "error[usage]: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        err << "error[data]: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        err << "error[numerical]: " << e.what() << '\n';
        return 4;
    }
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lassoed principal components for feature ranking and FDR estimation", "lpc"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    RunConfig config;
    std::string lambda_text = "auto", fudge_text = "median", outcome_kind = "auto", score_kind;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out,-o", config.output_dir, "Output directory")->capture_default_str();
        sub->add_option("--threads", config.threads, "Worker threads (results do not depend on this)")->capture_default_str();
        sub->add_option("--seed", seed, "Random seed (required by stochastic commands)");
    };
    auto add_data = [&](CLI::App* sub) {
        add_common(sub);
        sub->add_option("--matrix,-m", config.matrix_path, "Feature-by-sample matrix TSV")->required();
        sub->add_option("--outcome,-y", config.outcome_path, "Outcome TSV")->required();
        sub->add_option("--outcome-kind", outcome_kind, "auto, quantitative, two-class, multi-class or survival")->capture_default_str();
        sub->add_option("--score-kind", score_kind, "t, quant, cox, f or simplified (default: by outcome)");
        sub->add_option("--fudge", fudge_text, "median, median-sd, zero or a fixed value")->capture_default_str();
    };
    auto add_tuning = [&](CLI::App* sub) {
        sub->add_option("--lambda", lambda_text, "'auto' or a fixed shrinkage value")->capture_default_str();
        sub->add_option("--repeats", config.n_repeats, "Tuning repeats")->capture_default_str();
        sub->add_option("--top-m", config.top_m, "Tuning criterion size (0: min(50, ceil(p/4)))")->capture_default_str();
        sub->add_option("--tune-fraction", config.tune_split_fraction, "Tuning training fraction")->capture_default_str();
    };

    add_data(app.add_subcommand("score", "Conventional per-feature scores"));
    auto lpc = app.add_subcommand("lpc", "LPC scores");
    add_data(lpc);
    add_tuning(lpc);
    auto tune = app.add_subcommand("tune", "Choose lambda by repeated splits");
    add_data(tune);
    add_tuning(tune);
    tune->remove_option(tune->get_option("--lambda"));
    auto fdr = app.add_subcommand("fdr", "Permutation FDR for T and LPC");
    add_data(fdr);
    add_tuning(fdr);
    fdr->add_option("--permutations,-B", config.permutations, "Permutations")->capture_default_str();
    fdr->add_option("--splits", config.n_splits, "Train/test splits")->capture_default_str();
    fdr->add_option("--split-fraction", config.fdr_split_fraction, "Training fraction per split")->capture_default_str();
    fdr->add_option("--max-k", config.max_k, "Largest number of called features")->capture_default_str();
    fdr->add_option("--truth", config.truth_path, "Truth TSV; adds true FDR columns");
    fdr->add_option("--resamples", config.resamples, "Subsamples for the FDR difference (0: skip)")->capture_default_str();
    fdr->add_option("--resample-fraction", config.resample_fraction, "Subsample fraction")->capture_default_str();
    auto adv = app.add_subcommand("advantage", "Predictive advantage of LPC over T");
    add_data(adv);
    add_tuning(adv);
    adv->add_option("--split-fraction", config.advantage_split_fraction, "Training fraction")->capture_default_str();
    adv->add_option("--alphas", config.alphas, "Quantile levels")->delimiter(',');
    auto sim = app.add_subcommand("simulate", "Write a synthetic dataset");
    add_common(sim);
    sim->add_option("--generator,-g", config.generator, "sim1, sim2, sim3, latent, confounded or isolated")->capture_default_str();
    sim->add_option("--noise-blocks", config.noise_blocks, "Noise blocks for sim2 (3 or 7)")->capture_default_str();
    sim->add_option("--outcome-kind", outcome_kind, "quantitative or two-class")->capture_default_str();
    auto demo = app.add_subcommand("camp-demo", "Permutation FDR bias of a rank-dependent statistic");
    add_common(demo);
    demo->add_option("--replicates", config.replicates, "Null replicates")->capture_default_str();

    std::vector<std::string> storage{"lpc"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) {
        argv.push_back(s.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e, out, err);
        }
        err << "error[usage]: " << e.what() << '\n';
        return 2;
    }

    try {
        config.command = app.get_subcommands().front()->get_name();
        config.seed = seed;
        config.lambda = parse_lambda(lambda_text);
        config.fudge = parse_fudge(fudge_text);
        config.outcome_kind = parse_outcome_kind(outcome_kind);
        if (!score_kind.empty()) {
            config.score_kind = parse_score_kind(score_kind);
        }
    } catch (const std::exception& e) {
        err << "error[usage]: " << e.what() << '\n';
        return 2;
    }
    return run_command(config, out, err);
}

}
