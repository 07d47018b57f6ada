#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mimic/tsdata.hpp"

namespace mimic {

/// Planted-motif generator: every class owns a distinct waveform planted at a
/// fixed (dimension, start) position on top of i.i.d. uniform noise, which
/// gives ground truth for saliency and extraction tests. A class-independent
/// calibration ramp at the head of each dimension pins every row's range so
/// normalization cannot leak the class through the row scale.
struct SyntheticParams {
    std::size_t instances = 200;
    std::size_t dims = 3;
    std::size_t length = 100;
    std::size_t motif_length = 15;
    double noise = 0.1;
    std::uint64_t seed = 0;
    std::size_t classes = 2;
};

struct MotifInfo {
    std::string label;
    std::size_t dimension = 0;
    std::size_t start = 0;
    std::size_t length = 0;
    std::vector<double> values;  // raw motif, before any normalization
};

struct SyntheticData {
    LabeledDataset dataset;
    std::vector<MotifInfo> motifs;  // one per class, sorted label order
};

SyntheticData generate_planted_motif(const SyntheticParams& params);

}  // namespace mimic
