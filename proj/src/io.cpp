#include "lpc/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "lpc/error.hpp"

namespace lpc {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        auto tab = line.find('\t', start);
        fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) {
            break;
        }
        start = tab + 1;
    }
    return fields;
}

/** Content lines with their 1-based line numbers. */
struct LineReader {
    std::istream& input;
    std::string source;
    std::size_t number = 0;

    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(input, line)) {
            ++number;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.empty() || line[0] == '#') {
                continue;
            }
            fields = split_tabs(line);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw DataError(source + ":" + std::to_string(number) + ": " + message);
    }
};

double parse_real(const LineReader& reader, const std::string& text, const std::string& what) {
    const char* begin = text.c_str();
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (text.empty() || end != begin + text.size()) {
        reader.fail("cannot parse " + what + " '" + text + "' as a number");
    }
    if (!std::isfinite(value)) {
        reader.fail("non-finite " + what + " '" + text + "'");
    }
    return value;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream input(path);
    if (!input) {
        throw DataError("cannot open '" + path + "'");
    }
    return input;
}

}

std::string outcome_kind_flag(OutcomeKind kind) {
    switch (kind) {
        case OutcomeKind::automatic: return "auto";
        case OutcomeKind::quantitative: return "quantitative";
        case OutcomeKind::two_class: return "two-class";
        case OutcomeKind::multi_class: return "multi-class";
        case OutcomeKind::survival: return "survival";
    }
    return "auto";
}

OutcomeKind parse_outcome_kind(const std::string& name) {
    for (auto kind : {OutcomeKind::automatic, OutcomeKind::quantitative, OutcomeKind::two_class,
                      OutcomeKind::multi_class, OutcomeKind::survival}) {
        if (outcome_kind_flag(kind) == name) {
            return kind;
        }
    }
    throw DataError("unknown outcome kind '" + name + "'");
}

ExpressionMatrix read_matrix(std::istream& input, const std::string& source) {
    LineReader reader{input, source};
    std::vector<std::string> header, fields;
    if (!reader.next(header)) {
        throw DataError(source + ": matrix file is empty");
    }
    std::size_t header_line = reader.number;

    std::vector<std::string> feature_ids;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    while (reader.next(fields)) {
        if (width == 0) {
            width = fields.size();
            if (width < 2) {
                reader.fail("feature rows need an id and at least one value");
            }
            if (header.size() == width) {
                header.erase(header.begin());
            } else if (header.size() != width - 1) {
                throw DataError(source + ":" + std::to_string(header_line) + ": header has " +
                                std::to_string(header.size()) + " fields but feature rows have " + std::to_string(width));
            }
        }
        if (fields.size() != width) {
            reader.fail("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
        }
        std::vector<double> values(width - 1);
        for (std::size_t i = 1; i < width; ++i) {
            values[i - 1] = parse_real(reader, fields[i], "value for sample '" + header[i - 1] + "'");
        }
        feature_ids.push_back(fields[0]);
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw DataError(source + ": matrix file has no feature rows");
    }

    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t f = 0; f < feature_ids.size(); ++f) {
        auto [it, fresh] = seen.emplace(feature_ids[f], f);
        if (!fresh) {
            throw DataError(source + ": duplicate feature id '" + feature_ids[f] + "' (feature rows " +
                            std::to_string(it->second + 1) + " and " + std::to_string(f + 1) + ")");
        }
    }

    const auto n = static_cast<Index>(header.size());
    const auto p = static_cast<Index>(rows.size());
    Matrix values(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) {
            values(i, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        }
    }
    return ExpressionMatrix(std::move(values), std::move(header), std::move(feature_ids));
}

ExpressionMatrix read_matrix(const std::string& path) {
    auto input = open_input(path);
    return read_matrix(input, path);
}

Outcome read_outcome(std::istream& input, const std::string& source, const std::vector<std::string>& sample_ids,
                     OutcomeKind kind)
{
    LineReader reader{input, source};
    std::vector<std::string> header, fields;
    if (!reader.next(header)) {
        throw DataError(source + ": outcome file is empty");
    }
    if (header.size() < 2) {
        reader.fail("outcome header needs a sample id column and at least one value column");
    }
    int time_col = -1, event_col = -1;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c] == "time") {
            time_col = static_cast<int>(c);
        } else if (header[c] == "event") {
            event_col = static_cast<int>(c);
        }
    }
    bool survival = time_col > 0 && event_col > 0;
    if (kind == OutcomeKind::survival && !survival) {
        reader.fail("survival outcomes need columns named 'time' and 'event'");
    }
    if (kind != OutcomeKind::automatic && kind != OutcomeKind::survival) {
        survival = false;
    }
    if (!survival && header.size() != 2) {
        reader.fail("expected exactly one outcome value column, found " + std::to_string(header.size() - 1));
    }

    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < sample_ids.size(); ++i) {
        position.emplace(sample_ids[i], i);
    }
    const std::size_t n = sample_ids.size();
    std::vector<double> primary(n), secondary(n);
    std::vector<std::size_t> filled_at(n, 0);
    while (reader.next(fields)) {
        if (fields.size() != header.size()) {
            reader.fail("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
        }
        auto it = position.find(fields[0]);
        if (it == position.end()) {
            reader.fail("unknown sample id '" + fields[0] + "' (not a column of the matrix)");
        }
        if (filled_at[it->second] != 0) {
            reader.fail("sample '" + fields[0] + "' already given on line " + std::to_string(filled_at[it->second]));
        }
        filled_at[it->second] = reader.number;
        if (survival) {
            primary[it->second] = parse_real(reader, fields[static_cast<std::size_t>(time_col)], "time");
            secondary[it->second] = parse_real(reader, fields[static_cast<std::size_t>(event_col)], "event");
        } else {
            primary[it->second] = parse_real(reader, fields[1], "outcome value");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (filled_at[i] == 0) {
            throw DataError(source + ": no outcome for sample '" + sample_ids[i] + "'");
        }
    }

    auto require_integer = [&](double v, const std::string& what) {
        if (v != std::floor(v)) {
            throw DataError(source + ": " + what + " must be integers, found " + format_real(v));
        }
        return static_cast<int>(v);
    };

    Outcome outcome;
    if (survival) {
        Survival s{Vector(static_cast<Index>(n)), std::vector<std::uint8_t>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            s.time[static_cast<Index>(i)] = primary[i];
            int e = require_integer(secondary[i], "event indicators");
            if (e != 0 && e != 1) {
                throw DataError(source + ": event indicators must be 0 or 1 (sample '" + sample_ids[i] + "')");
            }
            s.event[i] = static_cast<std::uint8_t>(e);
        }
        outcome = std::move(s);
    } else {
        if (kind == OutcomeKind::automatic) {
            bool binary = true;
            for (double v : primary) {
                binary = binary && (v == 1 || v == 2);
            }
            kind = binary ? OutcomeKind::two_class : OutcomeKind::quantitative;
        }
        if (kind == OutcomeKind::quantitative) {
            outcome = Quantitative{Eigen::Map<const Vector>(primary.data(), static_cast<Index>(n))};
        } else {
            std::vector<int> labels(n);
            int top = 0;
            for (std::size_t i = 0; i < n; ++i) {
                labels[i] = require_integer(primary[i], "class labels");
                if (labels[i] < 1) {
                    throw DataError(source + ": class labels must be positive (sample '" + sample_ids[i] + "')");
                }
                top = std::max(top, labels[i]);
            }
            if (kind == OutcomeKind::two_class) {
                outcome = TwoClass{std::move(labels)};
            } else {
                outcome = MultiClass{std::move(labels), top};
            }
        }
    }
    try {
        validate_outcome(outcome, static_cast<Index>(n));
    } catch (const DataError& e) {
        throw DataError(source + ": " + e.what());
    }
    return outcome;
}

Outcome read_outcome(const std::string& path, const std::vector<std::string>& sample_ids, OutcomeKind kind) {
    auto input = open_input(path);
    return read_outcome(input, path, sample_ids, kind);
}

Dataset load_dataset(const std::string& matrix_path, const std::string& outcome_path, OutcomeKind kind) {
    auto x = read_matrix(matrix_path);
    auto outcome = read_outcome(outcome_path, x.sample_ids(), kind);
    return Dataset{std::move(x), std::move(outcome)};
}

std::vector<std::uint8_t> read_truth(const std::string& path, const std::vector<std::string>& feature_ids) {
    auto input = open_input(path);
    LineReader reader{input, path};
    std::vector<std::string> fields;
    if (!reader.next(fields) || fields.size() != 2) {
        throw DataError(path + ": truth file needs a two-column header");
    }
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t j = 0; j < feature_ids.size(); ++j) {
        position.emplace(feature_ids[j], j);
    }
    std::vector<std::uint8_t> truth(feature_ids.size(), 0);
    std::vector<bool> seen(feature_ids.size(), false);
    while (reader.next(fields)) {
        if (fields.size() != 2) {
            reader.fail("expected 2 fields, found " + std::to_string(fields.size()));
        }
        auto it = position.find(fields[0]);
        if (it == position.end()) {
            reader.fail("unknown feature id '" + fields[0] + "'");
        }
        if (fields[1] != "0" && fields[1] != "1") {
            reader.fail("truth values must be 0 or 1");
        }
        truth[it->second] = fields[1] == "1";
        seen[it->second] = true;
    }
    for (std::size_t j = 0; j < seen.size(); ++j) {
        if (!seen[j]) {
            throw DataError(path + ": no truth value for feature '" + feature_ids[j] + "'");
        }
    }
    return truth;
}

std::string format_real(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.11e", value);
    return buffer;
}

void write_matrix(std::ostream& output, const ExpressionMatrix& x) {
    output << "feature_id";
    for (const auto& id : x.sample_ids()) {
        output << '\t' << id;
    }
    output << '\n';
    for (Index j = 0; j < x.num_features(); ++j) {
        output << x.feature_ids()[static_cast<std::size_t>(j)];
        for (Index i = 0; i < x.num_samples(); ++i) {
            output << '\t' << format_real(x.values()(i, j));
        }
        output << '\n';
    }
}

void write_outcome(std::ostream& output, const Outcome& outcome, const std::vector<std::string>& sample_ids) {
    if (static_cast<Index>(sample_ids.size()) != outcome_size(outcome)) {
        throw DataError("outcome length does not match the sample ids");
    }
    if (auto s = std::get_if<Survival>(&outcome)) {
        output << "sample_id\ttime\tevent\n";
        for (std::size_t i = 0; i < sample_ids.size(); ++i) {
            output << sample_ids[i] << '\t' << format_real(s->time[static_cast<Index>(i)]) << '\t'
                   << static_cast<int>(s->event[i]) << '\n';
        }
    } else if (auto q = std::get_if<Quantitative>(&outcome)) {
        output << "sample_id\ty\n";
        for (std::size_t i = 0; i < sample_ids.size(); ++i) {
            output << sample_ids[i] << '\t' << format_real(q->y[static_cast<Index>(i)]) << '\n';
        }
    } else {
        const auto& labels = std::holds_alternative<TwoClass>(outcome) ? std::get<TwoClass>(outcome).labels
                                                                       : std::get<MultiClass>(outcome).labels;
        output << "sample_id\tclass\n";
        for (std::size_t i = 0; i < sample_ids.size(); ++i) {
            output << sample_ids[i] << '\t' << labels[i] << '\n';
        }
    }
}

void write_truth(std::ostream& output, const std::vector<std::string>& feature_ids,
                 const std::vector<std::uint8_t>& truth) {
    if (feature_ids.size() != truth.size()) {
        throw DataError("truth vector does not match the feature ids");
    }
    output << "feature_id\ttruth\n";
    for (std::size_t j = 0; j < truth.size(); ++j) {
        output << feature_ids[j] << '\t' << static_cast<int>(truth[j]) << '\n';
    }
}

}
