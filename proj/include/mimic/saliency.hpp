#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mimic/classifiers.hpp"
#include "mimic/masking.hpp"
#include "mimic/tsdata.hpp"

namespace mimic {

/// Per-label V x T map of values in [0, 1]. Entries are clamped; the largest
/// value seen before clamping is kept for diagnostics.
struct ImportanceMap {
    std::vector<double> values;  // row-major V x T
    std::size_t dims = 0;
    std::size_t length = 0;
    std::string label;
    std::size_t sample_count = 0;
    MaskDistribution distribution;
    double pre_clamp_max = 0.0;

    double operator()(std::size_t v, std::size_t t) const { return values[v * length + t]; }
    double& operator()(std::size_t v, std::size_t t) { return values[v * length + t]; }
};

/// Monte-Carlo estimate over the sampled masks:
///   I(beta) = clamp01( (1 / (p * N)) * sum_i Pr(series (x) M_i)[label] * M_i(beta) ).
/// One oracle probe per mask; contributions are reduced in mask-index order,
/// so the result is bit-identical for any thread count.
ImportanceMap estimate_importance(const MultivariateSeries& series, const ProbabilityOracle& oracle,
                                  const std::string& label, const MaskSet& masks,
                                  unsigned threads = 1);

/// Maps for every label in the oracle's sorted label set, sharing one probe
/// per mask (each probe returns the full distribution).
std::vector<ImportanceMap> importance_for_all_labels(const MultivariateSeries& series,
                                                     const ProbabilityOracle& oracle,
                                                     const MaskSet& masks, unsigned threads = 1);

/// Exact conditional expectation over the full mask enumeration:
///   I(beta) = (1/p) * sum_m Pr(series (x) m)[label] * m(beta) * P(M = m).
ImportanceMap exact_importance(const MultivariateSeries& series, const ProbabilityOracle& oracle,
                               const std::string& label, const MaskDistribution& dist);

std::vector<ImportanceMap> exact_importance_for_all_labels(const MultivariateSeries& series,
                                                           const ProbabilityOracle& oracle,
                                                           const MaskDistribution& dist);

/// Per-class map: the per-coordinate mean of instance maps over training
/// instances of that class (at most `per_class_cap` instances per class when
/// the cap is nonzero, taken in dataset order). One map per label in sorted
/// label-set order; every instance is probed once per mask.
std::vector<ImportanceMap> class_importance_maps(const LabeledDataset& train,
                                                 const ProbabilityOracle& oracle,
                                                 const MaskSet& masks,
                                                 std::size_t per_class_cap = 0,
                                                 unsigned threads = 1);

/// CSV persistence: comment header `# label=<id> N=<n> p=<p> w=<w> seed=<s>`,
/// then one row per dimension with T comma-separated values.
void write_importance_csv(const ImportanceMap& map, std::ostream& out);
void save_importance_csv(const ImportanceMap& map, const std::string& path);

}  // namespace mimic
