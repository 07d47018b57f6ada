#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mimic/classifiers.hpp"
#include "mimic/pipeline.hpp"
#include "mimic/tsdata.hpp"

namespace mimic {

struct PredictionRecord {
    std::string truth;
    std::string base;
    std::string mimic;
};

struct FoldResult {
    std::size_t fold_index = 0;
    double base_accuracy = 0.0;
    double mimic_accuracy = 0.0;
    std::vector<PredictionRecord> predictions;
};

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    bool degenerate = false;  // zero-variance differences with nonzero mean
};

struct EvaluationReport {
    std::string dataset;
    std::string mode;  // "cv:<folds>" or "split"
    std::vector<FoldResult> folds;
    double base_mean = 0.0;
    double mimic_mean = 0.0;
    double difference = 0.0;  // mimic_mean - base_mean
    double t_statistic = 0.0;
    double p_value = 1.0;
    bool significant = false;  // p < 0.05
};

using OracleFactory =
    std::function<std::unique_ptr<ProbabilityOracle>(const LabeledDataset& normalized_train)>;

/// Stratified fold index sets: disjoint, covering, per-fold class counts
/// within one instance of the global proportions. Deterministic in the seed.
std::vector<std::vector<std::size_t>> stratified_folds(const LabeledDataset& data,
                                                       std::size_t folds, std::uint64_t seed);

/// Two-tailed paired t-test over per-fold accuracies (differences are
/// mimic - base). All-zero differences give p = 1; identical nonzero
/// differences are flagged degenerate with p = 0. Requires >= 2 pairs.
TTestResult paired_ttest(const std::vector<double>& base, const std::vector<double>& mimic);

/// Per fold: fit the oracle on the training split, run the extraction
/// pipeline on the same split, then score both the oracle and the mimic
/// classifier on the held-out split. Every class needs >= `folds` instances.
EvaluationReport cross_validate(const LabeledDataset& data, const OracleFactory& factory,
                                const PipelineParams& params, std::size_t folds = 10,
                                std::uint64_t seed = 0);

/// Fixed train/test evaluation: one fold; the paired test runs over
/// per-instance 0/1 correctness differences.
EvaluationReport evaluate_split(const LabeledDataset& train, const LabeledDataset& test,
                                const OracleFactory& factory, const PipelineParams& params);

/// One text-table row per report plus an aggregate row; the significance
/// column carries a `*` when p < 0.05.
std::string render_report_table(const std::vector<EvaluationReport>& reports);
std::string format_report_row(const std::string& name, double base_mean, double mimic_mean,
                              double p, bool significant);

/// CSV: dataset,base_acc,mimic_acc,diff,t,p,significant (accuracies as
/// percentages with two decimals).
std::string render_report_csv(const std::vector<EvaluationReport>& reports);

}  // namespace mimic
