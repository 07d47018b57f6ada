#include "mimic/tsdata.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mimic {

MultivariateSeries::MultivariateSeries(std::size_t dims, std::size_t length, double fill)
    : dims_(dims), length_(length), values_(dims * length, fill) {
    if (dims == 0 || length == 0) {
        throw std::invalid_argument("MultivariateSeries: V and T must both be >= 1");
    }
}

MultivariateSeries MultivariateSeries::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows[0].empty()) {
        throw std::invalid_argument("MultivariateSeries: V and T must both be >= 1");
    }
    MultivariateSeries out(rows.size(), rows[0].size());
    for (std::size_t v = 0; v < rows.size(); ++v) {
        if (rows[v].size() != rows[0].size()) {
            throw std::invalid_argument("MultivariateSeries: ragged rows");
        }
        std::copy(rows[v].begin(), rows[v].end(), out.row(v).begin());
    }
    return out;
}

bool is_normalized(const MultivariateSeries& series) {
    for (double x : series.values()) {
        if (!(x > 0.0 && x <= 1.0)) return false;
    }
    return !series.empty();
}

MultivariateSeries normalize(const MultivariateSeries& series) {
    MultivariateSeries out(series.dims(), series.length());
    for (std::size_t v = 0; v < series.dims(); ++v) {
        const auto in = series.row(v);
        double lo = in[0], hi = in[0];
        for (std::size_t t = 0; t < in.size(); ++t) {
            if (!std::isfinite(in[t])) {
                throw std::invalid_argument("normalize: non-finite value at (dim " +
                                            std::to_string(v) + ", t " + std::to_string(t) + ")");
            }
            lo = std::min(lo, in[t]);
            hi = std::max(hi, in[t]);
        }
        // Constant rows collapse to 1/1 = 1; the row maximum evaluates the
        // same expression as the denominator, so it maps to exactly 1.
        const double den = hi - lo + 1.0;
        auto dst = out.row(v);
        for (std::size_t t = 0; t < in.size(); ++t) {
            dst[t] = (in[t] - lo + 1.0) / den;
        }
    }
    return out;
}

LabeledDataset::LabeledDataset(std::string name,
                               std::vector<MultivariateSeries> instances,
                               std::vector<std::string> labels)
    : name_(std::move(name)), instances_(std::move(instances)), labels_(std::move(labels)) {
    if (instances_.empty()) throw std::invalid_argument("LabeledDataset: no instances");
    if (instances_.size() != labels_.size()) {
        throw std::invalid_argument("LabeledDataset: instance/label count mismatch");
    }
    const std::size_t v = instances_[0].dims();
    const std::size_t t = instances_[0].length();
    for (std::size_t i = 1; i < instances_.size(); ++i) {
        if (instances_[i].dims() != v || instances_[i].length() != t) {
            throw std::invalid_argument("LabeledDataset: instance " + std::to_string(i + 1) +
                                        " violates the equal-length restriction");
        }
    }
    std::set<std::string> distinct(labels_.begin(), labels_.end());
    label_set_.assign(distinct.begin(), distinct.end());
}

DatasetMeta LabeledDataset::meta() const {
    return {size(), dims(), length(), label_set_.size()};
}

std::size_t LabeledDataset::label_index(const std::string& label) const {
    const auto it = std::lower_bound(label_set_.begin(), label_set_.end(), label);
    if (it == label_set_.end() || *it != label) {
        throw std::invalid_argument("unknown label: " + label);
    }
    return static_cast<std::size_t>(it - label_set_.begin());
}

LabeledDataset LabeledDataset::normalized() const {
    std::vector<MultivariateSeries> out;
    out.reserve(instances_.size());
    for (const auto& s : instances_) out.push_back(normalize(s));
    return {name_, std::move(out), labels_};
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& indices) const {
    std::vector<MultivariateSeries> inst;
    std::vector<std::string> labs;
    inst.reserve(indices.size());
    labs.reserve(indices.size());
    for (std::size_t i : indices) {
        inst.push_back(instances_.at(i));
        labs.push_back(labels_.at(i));
    }
    return {name_, std::move(inst), std::move(labs)};
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

bool parse_double(const std::string& token, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(token, &pos);
        return pos == token.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

}  // namespace

LabeledDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);

    std::size_t lineno = 0;
    std::string line;
    auto next_line = [&](const char* expected) -> std::string {
        if (!std::getline(in, line)) {
            parse_fail(path, lineno + 1, std::string("unexpected end of file, expected ") + expected);
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++lineno;
        return line;
    };

    if (next_line("magic line") != "# mimic-ts 1") {
        parse_fail(path, lineno, "bad magic, expected '# mimic-ts 1'");
    }

    const auto header = split_ws(next_line("header 'V T N'"));
    long long v = 0, t = 0, n = 0;
    if (header.size() != 3) parse_fail(path, lineno, "malformed header, expected 'V T N'");
    try {
        v = std::stoll(header[0]);
        t = std::stoll(header[1]);
        n = std::stoll(header[2]);
    } catch (const std::exception&) {
        parse_fail(path, lineno, "malformed header, expected three integers");
    }
    if (v < 1 || t < 1) parse_fail(path, lineno, "header requires V >= 1 and T >= 1");
    if (n < 1) parse_fail(path, lineno, "no instances");

    std::vector<MultivariateSeries> instances;
    std::vector<std::string> labels;
    instances.reserve(static_cast<std::size_t>(n));
    for (long long rec = 0; rec < n; ++rec) {
        const auto label_tokens = split_ws(next_line("label line"));
        if (label_tokens.size() != 1) {
            parse_fail(path, lineno, "instance " + std::to_string(rec + 1) +
                                         ": label must be a single token without spaces");
        }
        labels.push_back(label_tokens[0]);

        MultivariateSeries series(static_cast<std::size_t>(v), static_cast<std::size_t>(t));
        for (long long row = 0; row < v; ++row) {
            const auto tokens = split_ws(next_line("value row"));
            if (tokens.size() != static_cast<std::size_t>(t)) {
                parse_fail(path, lineno, "instance " + std::to_string(rec + 1) + ", dim " +
                                             std::to_string(row) + ": expected " + std::to_string(t) +
                                             " values, got " + std::to_string(tokens.size()));
            }
            for (long long col = 0; col < t; ++col) {
                double x = 0.0;
                if (!parse_double(tokens[static_cast<std::size_t>(col)], x)) {
                    parse_fail(path, lineno, "instance " + std::to_string(rec + 1) +
                                                 ": bad numeric token '" +
                                                 tokens[static_cast<std::size_t>(col)] + "'");
                }
                series(static_cast<std::size_t>(row), static_cast<std::size_t>(col)) = x;
            }
        }
        instances.push_back(std::move(series));
    }

    std::string name = path;
    if (const auto slash = name.find_last_of('/'); slash != std::string::npos) {
        name = name.substr(slash + 1);
    }
    if (const auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0) {
        name = name.substr(0, dot);
    }
    return {name, std::move(instances), std::move(labels)};
}

void save_dataset(const LabeledDataset& dataset, const std::string& path) {
    for (const auto& label : dataset.labels()) {
        if (label.empty() ||
            std::any_of(label.begin(), label.end(),
                        [](unsigned char c) { return std::isspace(c) != 0; })) {
            throw std::invalid_argument("save_dataset: label '" + label +
                                        "' contains the field separator");
        }
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);

    out << "# mimic-ts 1\n";
    out << dataset.dims() << ' ' << dataset.length() << ' ' << dataset.size() << '\n';
    char buf[64];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out << dataset.labels()[i] << '\n';
        const auto& series = dataset.instances()[i];
        for (std::size_t v = 0; v < series.dims(); ++v) {
            for (std::size_t t = 0; t < series.length(); ++t) {
                std::snprintf(buf, sizeof(buf), "%.17g", series(v, t));
                if (t > 0) out << ' ';
                out << buf;
            }
            out << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace mimic
