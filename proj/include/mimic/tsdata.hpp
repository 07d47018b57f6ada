#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mimic {

/// Dense V x T real matrix: V dimensions (channels), T time steps.
class MultivariateSeries {
public:
    MultivariateSeries() = default;
    MultivariateSeries(std::size_t dims, std::size_t length, double fill = 0.0);
    static MultivariateSeries from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t dims() const { return dims_; }
    std::size_t length() const { return length_; }
    bool empty() const { return values_.empty(); }

    double operator()(std::size_t v, std::size_t t) const { return values_[v * length_ + t]; }
    double& operator()(std::size_t v, std::size_t t) { return values_[v * length_ + t]; }

    std::span<const double> row(std::size_t v) const {
        return {values_.data() + v * length_, length_};
    }
    std::span<double> row(std::size_t v) { return {values_.data() + v * length_, length_}; }

    const std::vector<double>& values() const { return values_; }

    bool operator==(const MultivariateSeries&) const = default;

private:
    std::size_t dims_ = 0;
    std::size_t length_ = 0;
    std::vector<double> values_;
};

/// True when every entry is in (0, 1] (the post-normalization range).
bool is_normalized(const MultivariateSeries& series);

/// Per-dimension shifted max-min scaling: (x - min + 1) / (max - min + 1).
/// Maps every row into (0, 1] with the row maximum landing exactly on 1.
/// Throws on non-finite input, naming the offending (dimension, time step).
MultivariateSeries normalize(const MultivariateSeries& series);

struct DatasetMeta {
    std::size_t instance_count = 0;
    std::size_t dims = 0;
    std::size_t length = 0;
    std::size_t class_count = 0;
};

/// Equal-length labeled collection. All instances share one V x T shape and
/// every label occurs in the sorted distinct label set.
class LabeledDataset {
public:
    LabeledDataset() = default;
    LabeledDataset(std::string name,
                   std::vector<MultivariateSeries> instances,
                   std::vector<std::string> labels);

    const std::string& name() const { return name_; }
    const std::vector<MultivariateSeries>& instances() const { return instances_; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<std::string>& label_set() const { return label_set_; }
    DatasetMeta meta() const;

    std::size_t size() const { return instances_.size(); }
    std::size_t dims() const { return instances_.empty() ? 0 : instances_[0].dims(); }
    std::size_t length() const { return instances_.empty() ? 0 : instances_[0].length(); }

    /// Index of a label within the sorted label set; throws on unknown label.
    std::size_t label_index(const std::string& label) const;

    /// Copy with every instance normalized (labels and name preserved).
    LabeledDataset normalized() const;

    /// Subset by instance indices; keeps the parent's name.
    LabeledDataset subset(const std::vector<std::size_t>& indices) const;

private:
    std::string name_;
    std::vector<MultivariateSeries> instances_;
    std::vector<std::string> labels_;
    std::vector<std::string> label_set_;
};

/// Reads the mimic-ts v1 text format. Parse failures throw with line numbers.
LabeledDataset load_dataset(const std::string& path);

/// Writes the mimic-ts v1 text format; values carry 17 significant digits so
/// a save/load round trip is exact. Labels with whitespace are rejected.
void save_dataset(const LabeledDataset& dataset, const std::string& path);

}  // namespace mimic
