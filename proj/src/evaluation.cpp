#include "mimic/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mimic/rng.hpp"
#include "mimic/stats.hpp"

namespace mimic {

std::vector<std::vector<std::size_t>> stratified_folds(const LabeledDataset& data,
                                                       std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("stratified_folds: need at least 2 folds");

    std::vector<std::vector<std::size_t>> by_class(data.label_set().size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        by_class[data.label_index(data.labels()[i])].push_back(i);
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        if (by_class[c].size() < folds) {
            throw std::invalid_argument(
                "stratified_folds: class " + data.label_set()[c] + " has only " +
                std::to_string(by_class[c].size()) + " instances; use a fold count of at most " +
                std::to_string(by_class[c].size()));
        }
    }

    std::vector<std::vector<std::size_t>> out(folds);
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        Rng rng(splitmix64(seed ^ (0x666F6C64ULL + c * 0x9E3779B97F4A7C15ULL)));
        rng.shuffle(by_class[c]);
        for (std::size_t i = 0; i < by_class[c].size(); ++i) {
            out[i % folds].push_back(by_class[c][i]);
        }
    }
    for (auto& fold : out) std::sort(fold.begin(), fold.end());
    return out;
}

TTestResult paired_ttest(const std::vector<double>& base, const std::vector<double>& mimic) {
    if (base.size() != mimic.size()) {
        throw std::invalid_argument("paired_ttest: sample lengths differ");
    }
    const std::size_t n = base.size();
    if (n < 2) throw std::invalid_argument("paired_ttest: need at least 2 paired samples");

    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = mimic[i] - base[i];
    const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double d : diff) var += (d - mean) * (d - mean);
    var /= static_cast<double>(n - 1);

    TTestResult result;
    if (var == 0.0) {
        // Zero-variance differences: p = 1 when they are all exactly zero,
        // otherwise flagged degenerate.
        if (mean == 0.0) {
            result.t = 0.0;
            result.p = 1.0;
        } else {
            result.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
            result.p = 0.0;
            result.degenerate = true;
        }
        return result;
    }
    result.t = mean / std::sqrt(var / static_cast<double>(n));
    result.p = student_t_two_tailed_p(result.t, n - 1);
    return result;
}

namespace {

FoldResult score_fold(std::size_t fold_index, const LabeledDataset& train,
                      const LabeledDataset& test, const OracleFactory& factory,
                      const PipelineParams& params) {
    const auto oracle = factory(train);
    if (!oracle) throw std::invalid_argument("oracle factory returned null");
    const MimicModel model = fit_mimic(train, *oracle, params);

    FoldResult fold;
    fold.fold_index = fold_index;
    std::size_t base_hits = 0, mimic_hits = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        PredictionRecord rec;
        rec.truth = test.labels()[i];
        rec.base = oracle->predict(test.instances()[i]);
        rec.mimic = classify(test.instances()[i], model.shapes).label;
        base_hits += rec.base == rec.truth ? 1 : 0;
        mimic_hits += rec.mimic == rec.truth ? 1 : 0;
        fold.predictions.push_back(std::move(rec));
    }
    fold.base_accuracy = static_cast<double>(base_hits) / static_cast<double>(test.size());
    fold.mimic_accuracy = static_cast<double>(mimic_hits) / static_cast<double>(test.size());
    return fold;
}

void finalize_report(EvaluationReport& report) {
    double base_sum = 0.0, mimic_sum = 0.0;
    for (const auto& fold : report.folds) {
        base_sum += fold.base_accuracy;
        mimic_sum += fold.mimic_accuracy;
    }
    const auto n = static_cast<double>(report.folds.size());
    report.base_mean = base_sum / n;
    report.mimic_mean = mimic_sum / n;
    report.difference = report.mimic_mean - report.base_mean;
    report.significant = report.p_value < 0.05;
}

}  // namespace

EvaluationReport cross_validate(const LabeledDataset& data, const OracleFactory& factory,
                                const PipelineParams& params, std::size_t folds,
                                std::uint64_t seed) {
    const auto fold_indices = stratified_folds(data, folds, seed);
    const LabeledDataset normalized = data.normalized();

    EvaluationReport report;
    report.dataset = data.name();
    report.mode = "cv:" + std::to_string(folds);

    std::vector<std::size_t> all(normalized.size());
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_idx;
        for (std::size_t i : all) {
            if (!std::binary_search(fold_indices[f].begin(), fold_indices[f].end(), i)) {
                train_idx.push_back(i);
            }
        }
        report.folds.push_back(score_fold(f, normalized.subset(train_idx),
                                          normalized.subset(fold_indices[f]), factory, params));
    }

    std::vector<double> base_acc, mimic_acc;
    for (const auto& fold : report.folds) {
        base_acc.push_back(fold.base_accuracy);
        mimic_acc.push_back(fold.mimic_accuracy);
    }
    const TTestResult tt = paired_ttest(base_acc, mimic_acc);
    report.t_statistic = tt.t;
    report.p_value = tt.p;
    finalize_report(report);
    return report;
}

EvaluationReport evaluate_split(const LabeledDataset& train, const LabeledDataset& test,
                                const OracleFactory& factory, const PipelineParams& params) {
    if (train.label_set() != test.label_set()) {
        throw std::invalid_argument("evaluate_split: train and test label sets differ");
    }
    const LabeledDataset train_norm = train.normalized();
    const LabeledDataset test_norm = test.normalized();

    EvaluationReport report;
    report.dataset = train.name();
    report.mode = "split";
    report.folds.push_back(score_fold(0, train_norm, test_norm, factory, params));

    // With a single fold the paired test runs over per-instance 0/1
    // correctness indicators instead of per-fold accuracies.
    const auto& predictions = report.folds[0].predictions;
    if (predictions.size() >= 2) {
        std::vector<double> base_hits, mimic_hits;
        for (const auto& rec : predictions) {
            base_hits.push_back(rec.base == rec.truth ? 1.0 : 0.0);
            mimic_hits.push_back(rec.mimic == rec.truth ? 1.0 : 0.0);
        }
        const TTestResult tt = paired_ttest(base_hits, mimic_hits);
        report.t_statistic = tt.t;
        report.p_value = tt.p;
    } else {
        report.t_statistic = 0.0;
        report.p_value = 1.0;
    }
    finalize_report(report);
    return report;
}

namespace {

std::string format_p(double p) {
    if (p < 0.05) return "<.05";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", p);
    std::string s(buf);
    if (s.size() > 1 && s[0] == '0' && s[1] == '.') s.erase(0, 1);
    return s;
}

}  // namespace

std::string format_report_row(const std::string& name, double base_mean, double mimic_mean,
                              double p, bool significant) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s  %.2f  %.2f  %+.2f  %s", name.c_str(), base_mean * 100.0,
                  mimic_mean * 100.0, (mimic_mean - base_mean) * 100.0, format_p(p).c_str());
    std::string row(buf);
    if (significant) row += "  *";
    return row;
}

std::string render_report_table(const std::vector<EvaluationReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("render_report_table: no reports");

    std::ostringstream out;
    out << "dataset  base  mimic  diff  p  sig\n";
    for (const auto& r : reports) {
        out << format_report_row(r.dataset, r.base_mean, r.mimic_mean, r.p_value, r.significant)
            << '\n';
    }

    double base_mean = 0.0, mimic_mean = 0.0;
    double p = reports[0].p_value;
    bool significant = reports[0].significant;
    for (const auto& r : reports) {
        base_mean += r.base_mean;
        mimic_mean += r.mimic_mean;
    }
    base_mean /= static_cast<double>(reports.size());
    mimic_mean /= static_cast<double>(reports.size());
    if (reports.size() >= 2) {
        std::vector<double> base, mimic;
        for (const auto& r : reports) {
            base.push_back(r.base_mean);
            mimic.push_back(r.mimic_mean);
        }
        const TTestResult tt = paired_ttest(base, mimic);
        p = tt.p;
        significant = tt.p < 0.05;
    }
    out << format_report_row("Average", base_mean, mimic_mean, p, significant) << '\n';
    return out.str();
}

std::string render_report_csv(const std::vector<EvaluationReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("render_report_csv: no reports");
    std::ostringstream out;
    out << "dataset,base_acc,mimic_acc,diff,t,p,significant\n";
    char buf[160];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof(buf), "%s,%.2f,%.2f,%.2f,%.4f,%.6f,%d", r.dataset.c_str(),
                      r.base_mean * 100.0, r.mimic_mean * 100.0, r.difference * 100.0,
                      r.t_statistic, r.p_value, r.significant ? 1 : 0);
        out << buf << '\n';
    }
    return out.str();
}

}  // namespace mimic
