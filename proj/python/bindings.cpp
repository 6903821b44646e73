// Python bindings for the lpcscore core library.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lpc/cli.hpp"
#include "lpc/error.hpp"
#include "lpc/io.hpp"
#include "lpc/lambda_tuning.hpp"
#include "lpc/lpc_engine.hpp"
#include "lpc/resampling.hpp"
#include "lpc/significance.hpp"
#include "lpc/sim_lab.hpp"

namespace py = pybind11;
using namespace lpc;

namespace {

Outcome make_outcome(const std::string& kind, const Vector& values, const std::optional<std::vector<int>>& event) {
    auto as_labels = [&] {
        std::vector<int> labels(values.size());
        for (Index i = 0; i < values.size(); ++i) {
            if (values[i] != std::round(values[i])) throw DataError("class labels must be integers");
            labels[i] = static_cast<int>(values[i]);
        }
        return labels;
    };
    Outcome out;
    if (kind == "survival") {
        if (!event) throw DataError("survival outcomes need event indicators");
        out = Survival{values, std::vector<std::uint8_t>(event->begin(), event->end())};
    } else if (kind == "two-class") {
        out = TwoClass{as_labels()};
    } else if (kind == "multi-class") {
        auto labels = as_labels();
        int k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
        out = MultiClass{labels, k};
    } else if (kind == "quantitative") {
        out = Quantitative{values};
    } else {
        throw UsageError("outcome kind must be quantitative, two-class, multi-class or survival");
    }
    validate_outcome(out, values.size());
    return out;
}

py::dict outcome_dict(const Outcome& outcome) {
    py::dict d;
    d["kind"] = outcome_kind_name(outcome);
    std::visit([&](const auto& o) {
        using O = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<O, Quantitative>) {
            d["values"] = o.y;
        } else if constexpr (std::is_same_v<O, Survival>) {
            d["values"] = o.time;
            d["event"] = o.event;
        } else {
            d["values"] = o.labels;
        }
    }, outcome);
    return d;
}

struct Problem {
    ExpressionMatrix x;
    Outcome outcome;
    ScoreSpec spec;
};

Problem problem(const Matrix& x, const Vector& y, const std::string& kind, const std::optional<std::vector<int>>& event,
                const std::optional<std::string>& score_kind, const std::string& fudge) {
    ExpressionMatrix m(x);
    Outcome o = make_outcome(kind, y, event);
    ScoreKind sk = score_kind ? parse_score_kind(*score_kind) : default_score_kind(o);
    return {std::move(m), std::move(o), ScoreSpec{sk, parse_fudge(fudge)}};
}

double resolve_lambda(const Problem& p, std::optional<double> lambda, std::uint64_t seed, int threads) {
    if (lambda) return *lambda;
    TuningOptions options;
    options.seed = seed;
    options.num_threads = threads;
    return select_lambda(p.x, p.outcome, p.spec, options).chosen_lambda;
}

py::list curve_list(const FdrCurve& curve) {
    py::list out;
    for (const auto& point : curve.points) out.append(py::make_tuple(point.k, point.fdr, point.raw));
    return out;
}

}

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lassoed principal components scoring";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

#define LPC_PROBLEM_ARGS py::arg("x"), py::arg("y"), py::arg("kind") = "quantitative", py::arg("event") = py::none(), \
        py::arg("score_kind") = py::none(), py::arg("fudge") = "median"

    m.def("simulate", [](const std::string& generator, std::uint64_t seed, int noise_blocks) {
        SimulatedDataset d = [&] {
            if (generator == "sim1") return simulate_1(seed);
            if (generator == "sim2") return simulate_2(seed, noise_blocks);
            if (generator == "sim3") return simulate_3(seed);
            if (generator == "latent") return LatentModel(LatentModelSpec{}).sample(seed);
            if (generator == "confounded") return simulate_confounded(seed);
            if (generator == "isolated") return simulate_isolated(seed);
            throw UsageError("unknown generator '" + generator + "'");
        }();
        py::dict out = outcome_dict(d.outcome);
        out["x"] = d.x.values();
        out["truth"] = std::vector<int>(d.truth.begin(), d.truth.end());
        out["generator"] = d.generator;
        return out;
    }, py::arg("generator") = "sim1", py::arg("seed") = 0, py::arg("noise_blocks") = 3,
       "Draw one simulated dataset; returns x, values, truth and kind.");

    m.def("scores", [](const Matrix& x, const Vector& y, const std::string& kind, std::optional<std::vector<int>> event,
                       std::optional<std::string> score_kind, const std::string& fudge) {
        auto p = problem(x, y, kind, event, score_kind, fudge);
        return compute_scores(p.x, p.outcome, p.spec).values;
    }, LPC_PROBLEM_ARGS, "Per-feature association scores.");

    m.def("lpc", [](const Matrix& x, const Vector& y, const std::string& kind, std::optional<std::vector<int>> event,
                    std::optional<std::string> score_kind, const std::string& fudge, std::optional<double> lambda,
                    std::uint64_t seed, int threads) {
        auto p = problem(x, y, kind, event, score_kind, fudge);
        double lam = resolve_lambda(p, lambda, seed, threads);
        auto T = compute_scores(p.x, p.outcome, p.spec);
        auto path = lpc_path_for(p.x, p.outcome, p.spec, T, eigenarrays_of(p.x));
        py::dict out;
        out["scores"] = T.values;
        out["lpc"] = path.statistic(lam);
        out["lambda"] = lam;
        return out;
    }, LPC_PROBLEM_ARGS, py::arg("lam") = py::none(), py::arg("seed") = 0, py::arg("threads") = 1,
       "LPC statistic; lam=None tunes lambda by repeated splitting.");

    m.def("tune", [](const Matrix& x, const Vector& y, const std::string& kind, std::optional<std::vector<int>> event,
                     std::optional<std::string> score_kind, const std::string& fudge, std::uint64_t seed, int repeats,
                     int threads) {
        auto p = problem(x, y, kind, event, score_kind, fudge);
        TuningOptions options;
        options.seed = seed;
        options.n_repeats = repeats;
        options.num_threads = threads;
        auto report = select_lambda(p.x, p.outcome, p.spec, options);
        py::dict out;
        out["grid"] = report.grid;
        out["mean_test_score"] = report.mean_test_score;
        out["std_error"] = report.std_error;
        out["chosen_lambda"] = report.chosen_lambda;
        out["top_m"] = report.top_m;
        return out;
    }, LPC_PROBLEM_ARGS, py::arg("seed") = 0, py::arg("repeats") = 10, py::arg("threads") = 1);

    m.def("fdr", [](const Matrix& x, const Vector& y, const std::string& kind, std::optional<std::vector<int>> event,
                    std::optional<std::string> score_kind, const std::string& fudge, std::optional<double> lambda,
                    std::uint64_t seed, Index permutations, Index splits, Index max_k, int threads) {
        auto p = problem(x, y, kind, event, score_kind, fudge);
        double lam = resolve_lambda(p, lambda, seed, threads);
        FdrLpcOptions options;
        options.seed = seed;
        options.n_permutations = permutations;
        options.n_splits = splits;
        options.num_threads = threads;
        for (Index k = 1; k <= std::min(max_k, p.x.num_features()); ++k) options.ks.push_back(k);
        auto result = fdr_lpc(p.x, p.outcome, p.spec, lam, options);
        py::dict out;
        out["lambda"] = lam;
        out["pi0"] = result.t_curve.pi0;
        out["t"] = curve_list(result.t_curve);
        out["lpc"] = curve_list(result.lpc_curve);
        out["delta"] = result.delta;
        out["degenerate"] = result.degenerate;
        out["warnings"] = result.warnings;
        return out;
    }, LPC_PROBLEM_ARGS, py::arg("lam") = py::none(), py::arg("seed") = 0, py::arg("permutations") = 200,
       py::arg("splits") = 20, py::arg("max_k") = 100, py::arg("threads") = 1,
       "Permutation FDR curves for the conventional and LPC rankings; entries are (k, fdr, raw).");

    m.def("camp_demo", [](std::uint64_t seed, Index replicates) {
        auto r = camp_demo(seed, replicates);
        py::dict out;
        out["called"] = r.called;
        out["pvalue_cutoff"] = r.pvalue_cutoff;
        out["pvalue_estimated_fdr"] = r.pvalue_estimated_fdr;
        out["pvalue_true_fdr"] = r.pvalue_true_fdr;
        out["camp_cutoff"] = r.camp_cutoff;
        out["camp_estimated_fdr"] = r.camp_estimated_fdr;
        out["camp_true_fdr"] = r.camp_true_fdr;
        return out;
    }, py::arg("seed"), py::arg("replicates") = 200);

    m.def("camp_transform", [](const Vector& p) { return camp_transform(p).values; }, py::arg("p_values"));

    m.def("main", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = run_main(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Run the command line tool in-process; returns (exit_code, stdout, stderr).");

#undef LPC_PROBLEM_ARGS
}
