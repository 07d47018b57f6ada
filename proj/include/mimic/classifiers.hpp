#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mimic/tsdata.hpp"

namespace mimic {

struct DtwBand;

/// Contract every probed classifier satisfies: a full distribution over the
/// sorted label set, non-negative and summing to 1 within 1e-9, identical for
/// identical inputs. Oracles that cannot take concurrent calls (such as a
/// subprocess bridge) report thread_safe() == false and are probed serially.
class ProbabilityOracle {
public:
    virtual ~ProbabilityOracle() = default;

    virtual std::vector<double> predict_proba(const MultivariateSeries& series) const = 0;
    virtual const std::vector<std::string>& label_set() const = 0;
    virtual bool thread_safe() const { return true; }

    /// Score for one label; the label must belong to the label set.
    double predict_proba(const MultivariateSeries& series, const std::string& label) const;

    /// Argmax label, ties broken by sorted label order.
    std::string predict(const MultivariateSeries& series) const;
};

/// Throws unless `dist` is a valid distribution over `n` labels.
void check_distribution(const std::vector<double>& dist, std::size_t n);

/// 1-nearest-neighbour oracle under dependent multivariate DTW, calibrated
/// into a distribution with a per-class softmin:
///   Pr(c) = exp(-d_c / theta) / sum_c' exp(-d_c' / theta),
/// where d_c is the smallest DTW distance to a training instance of class c.
class OneNnDtwOracle : public ProbabilityOracle {
public:
    std::vector<double> predict_proba(const MultivariateSeries& series) const override;
    const std::vector<std::string>& label_set() const override { return labels_; }

    double temperature() const { return temperature_; }
    int band_radius() const { return band_radius_; }

private:
    friend OneNnDtwOracle fit_1nn_dtw(const LabeledDataset&, int, double);

    LabeledDataset train_;
    std::vector<std::string> labels_;
    std::vector<std::vector<std::size_t>> by_class_;  // instance indices per label
    int band_radius_ = -1;
    double temperature_ = 1.0;
};

/// Fits the reference set; `temperature <= 0` selects the median pairwise
/// training DTW distance. Every class must be represented and the data must
/// be normalized.
OneNnDtwOracle fit_1nn_dtw(const LabeledDataset& train, int band_radius = -1,
                           double temperature = 0.0);

/// Interval-statistics random forest: each tree draws random (dimension,
/// start, length) intervals, summarizes them as (mean, stddev, slope), and
/// grows a gini-split decision tree on those features. The distribution is
/// the fraction of trees voting each class, so a single tree is one-hot.
class IntervalForestOracle : public ProbabilityOracle {
public:
    std::vector<double> predict_proba(const MultivariateSeries& series) const override;
    const std::vector<std::string>& label_set() const override { return labels_; }

    std::size_t tree_count() const { return trees_.size(); }

private:
    friend IntervalForestOracle fit_interval_forest(const LabeledDataset&, std::size_t, std::size_t,
                                                    std::uint64_t);

    struct Interval {
        std::size_t dimension, start, length;
    };
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1, right = -1;
        std::size_t leaf_class = 0;
    };
    struct Tree {
        std::vector<Interval> intervals;
        std::vector<Node> nodes;
    };

    std::vector<double> features_for(const Tree& tree, const MultivariateSeries& series) const;

    std::vector<std::string> labels_;
    std::vector<Tree> trees_;
    std::size_t train_dims_ = 0;
    std::size_t train_length_ = 0;
};

IntervalForestOracle fit_interval_forest(const LabeledDataset& train, std::size_t trees,
                                         std::size_t intervals_per_tree, std::uint64_t seed);

/// Bridge to an external classifier over a line protocol on stdin/stdout:
/// handshake `HELLO mimic-oracle 1` / `OK <num_labels>`, then per query one
/// `PREDICT` line plus a mimic-ts record without its label line, answered by
/// one line of probabilities in sorted label-set order. Not thread safe.
class SubprocessOracle : public ProbabilityOracle {
public:
    SubprocessOracle(const std::string& command, std::vector<std::string> labels);
    ~SubprocessOracle() override;

    SubprocessOracle(const SubprocessOracle&) = delete;
    SubprocessOracle& operator=(const SubprocessOracle&) = delete;

    std::vector<double> predict_proba(const MultivariateSeries& series) const override;
    const std::vector<std::string>& label_set() const override { return labels_; }
    bool thread_safe() const override { return false; }

private:
    struct Process;
    std::vector<std::string> labels_;
    std::unique_ptr<Process> process_;
};

}  // namespace mimic
