#include "mimic/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "mimic/rng.hpp"

namespace mimic {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Class c gets c+1 positive arcs across the motif window, so shapes are
// mutually distinct under DTW (one bump, two bumps, ...). Keeping motifs
// non-negative stops masked-out zeros from imitating a motif trough.
double motif_value(std::size_t cls, std::size_t j, std::size_t len) {
    const double phase = static_cast<double>(j + 1) / static_cast<double>(len + 1);
    return std::fabs(std::sin(kPi * phase * static_cast<double>(cls + 1)));
}

}  // namespace

SyntheticData generate_planted_motif(const SyntheticParams& params) {
    if (params.classes < 2) throw std::invalid_argument("gen-synthetic: need at least 2 classes");
    if (params.classes > 26) throw std::invalid_argument("gen-synthetic: at most 26 classes");
    if (params.instances < params.classes) {
        throw std::invalid_argument("gen-synthetic: need at least one instance per class");
    }
    if (params.motif_length < 2 || params.motif_length > params.length) {
        throw std::invalid_argument("gen-synthetic: motif length must lie in [2, T]");
    }
    if (params.dims < 1 || params.length < 1) {
        throw std::invalid_argument("gen-synthetic: V and T must be >= 1");
    }
    if (params.noise < 0.0) throw std::invalid_argument("gen-synthetic: noise must be >= 0");

    std::vector<MotifInfo> motifs;
    std::size_t first_start = params.length;
    for (std::size_t c = 0; c < params.classes; ++c) {
        MotifInfo info;
        info.label = std::string(1, static_cast<char>('A' + c));
        info.dimension = c % params.dims;
        info.start = ((c + 1) * (params.length - params.motif_length)) / (params.classes + 1);
        info.length = params.motif_length;
        for (std::size_t j = 0; j < params.motif_length; ++j) {
            info.values.push_back(motif_value(c, j, params.motif_length));
        }
        first_start = std::min(first_start, info.start);
        motifs.push_back(std::move(info));
    }

    // Shared calibration ramp spanning [-1, 1] at the head of every
    // dimension. It pins each row's range, so per-row normalization maps the
    // background to the same level whether or not the row carries a motif;
    // without it the row scale alone would give the class away.
    const std::size_t cal_len = std::min<std::size_t>(std::max<std::size_t>(2, params.motif_length),
                                                      std::max<std::size_t>(2, first_start));

    std::vector<MultivariateSeries> instances;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < params.instances; ++i) {
        const std::size_t cls = i % params.classes;
        Rng rng(splitmix64(params.seed ^ (0x73796E74ULL + i * 0x9E3779B97F4A7C15ULL)));
        MultivariateSeries series(params.dims, params.length);
        for (std::size_t v = 0; v < params.dims; ++v) {
            for (std::size_t t = 0; t < params.length; ++t) {
                series(v, t) = params.noise * (2.0 * rng.uniform() - 1.0);
            }
            for (std::size_t j = 0; j < cal_len && j < params.length; ++j) {
                series(v, j) += -1.0 + 2.0 * static_cast<double>(j) /
                                           static_cast<double>(cal_len - 1);
            }
        }
        const MotifInfo& motif = motifs[cls];
        for (std::size_t j = 0; j < motif.length; ++j) {
            series(motif.dimension, motif.start + j) += motif.values[j];
        }
        instances.push_back(std::move(series));
        labels.push_back(motif.label);
    }

    SyntheticData out{LabeledDataset("synthetic", std::move(instances), std::move(labels)),
                      std::move(motifs)};
    return out;
}

}  // namespace mimic
