#include "mimic/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace mimic {

MaskDistribution PipelineParams::mask_distribution(std::size_t series_length) const {
    MaskDistribution dist;
    dist.keep_probability = keep_probability;
    dist.cell_width = cell_width > 0 ? cell_width : std::max<std::size_t>(1, series_length / 8);
    dist.cell_width = std::min(dist.cell_width, series_length);
    dist.seed = seed;
    return dist;
}

ExtractionParams PipelineParams::extraction_params() const {
    ExtractionParams params;
    params.quantile = quantile;
    params.shapelets_per_label = shapelets_per_label;
    params.min_length = min_length;
    params.max_length = max_length;
    params.band = DtwBand{band_radius};
    return params;
}

MimicModel fit_mimic(const LabeledDataset& normalized_train, const ProbabilityOracle& oracle,
                     const PipelineParams& params) {
    if (normalized_train.label_set() != oracle.label_set()) {
        throw std::invalid_argument("fit_mimic: oracle labels differ from training labels");
    }
    const auto dist = params.mask_distribution(normalized_train.length());
    const auto masks =
        generate_masks(dist, normalized_train.dims(), normalized_train.length(), params.mask_count);

    MimicModel model;
    model.class_maps = class_importance_maps(normalized_train, oracle, masks,
                                             params.explain_per_class, params.threads);
    model.binary_maps.reserve(model.class_maps.size());
    for (const auto& map : model.class_maps) {
        model.binary_maps.push_back(binarize(map, params.quantile));
    }
    model.shapes =
        extract_mimicshapes(normalized_train, model.binary_maps, params.extraction_params());
    return model;
}

}  // namespace mimic
