#pragma once

#include <cstdint>
#include <vector>

#include "mimic/classifiers.hpp"
#include "mimic/masking.hpp"
#include "mimic/saliency.hpp"
#include "mimic/shapelets.hpp"
#include "mimic/tsdata.hpp"

namespace mimic {

/// Knobs for the full probe -> map -> binarize -> extract pipeline.
/// Zero-valued size fields resolve against the series length T:
/// cell_width -> max(1, T/8), min_length -> max(3, T/20), max_length -> T/2.
struct PipelineParams {
    double keep_probability = 0.5;
    std::size_t cell_width = 0;
    std::size_t mask_count = 2000;
    std::uint64_t seed = 0;
    double quantile = 0.5;
    std::size_t shapelets_per_label = 3;
    std::size_t min_length = 0;
    std::size_t max_length = 0;
    int band_radius = -1;
    std::size_t explain_per_class = 0;  // 0 = use every training instance
    unsigned threads = 1;

    MaskDistribution mask_distribution(std::size_t series_length) const;
    ExtractionParams extraction_params() const;
};

struct MimicModel {
    std::vector<ImportanceMap> class_maps;  // one per label, sorted label order
    std::vector<BinaryMap> binary_maps;
    MimicShapeSet shapes;
};

/// Runs the whole extraction pipeline on normalized training data: sample
/// masks, probe the oracle, average per-class importance maps, binarize,
/// and extract MimicShapes.
MimicModel fit_mimic(const LabeledDataset& normalized_train, const ProbabilityOracle& oracle,
                     const PipelineParams& params);

}  // namespace mimic
