#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mimic/saliency.hpp"
#include "mimic/tsdata.hpp"

namespace mimic {

/// Sakoe-Chiba band radius; negative means unconstrained.
struct DtwBand {
    int radius = -1;

    bool unbounded() const { return radius < 0; }
    static DtwBand none() { return {-1}; }
};

/// Alignment cost between two sequences: dynamic programming over monotone
/// boundary-to-boundary paths with steps {down, right, diagonal} and local
/// cost (a_i - b_j)^2. No square root is applied. The band constrains the
/// path to |i - j| <= radius and must admit the length difference.
double dtw_distance(std::span<const double> a, std::span<const double> b,
                    DtwBand band = DtwBand::none());

/// Dependent multivariate variant: one alignment path, local cost summed over
/// channels. Shapes must share V.
double dtw_distance_multivariate(const MultivariateSeries& a, const MultivariateSeries& b,
                                 DtwBand band = DtwBand::none());

/// Thresholded importance map. bits[beta] = 1 iff I(beta) > tau, where tau is
/// chosen per dimension from the importance values (see binarize).
struct BinaryMap {
    std::vector<std::uint8_t> bits;  // row-major V x T
    std::size_t dims = 0;
    std::size_t length = 0;
    std::vector<double> thresholds;  // per dimension
    std::string label;

    std::uint8_t operator()(std::size_t v, std::size_t t) const { return bits[v * length + t]; }
};

/// Maximal run of 1-bits on one dimension, carrying the series values.
struct Segment {
    std::size_t dimension = 0;
    std::size_t start = 0;
    std::size_t instance = 0;  // index within the source dataset
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

struct MimicShape {
    std::string label;
    std::size_t dimension = 0;
    std::vector<double> values;
    std::size_t support = 0;   // segments in this medoid's cluster
    std::size_t instance = 0;  // medoid provenance
    std::size_t start = 0;
};

struct ExtractionParams {
    double quantile = 0.5;           // binarize threshold quantile
    std::size_t shapelets_per_label = 3;
    std::size_t min_length = 0;      // 0 -> max(3, T/20)
    std::size_t max_length = 0;      // 0 -> T/2
    DtwBand band = DtwBand::none();

    std::size_t resolved_min_length(std::size_t series_length) const;
    std::size_t resolved_max_length(std::size_t series_length) const;
};

struct MimicShapeSet {
    std::vector<MimicShape> shapes;  // grouped by label, then dimension
    std::vector<std::string> label_set;
    ExtractionParams params;
    std::vector<std::string> warnings;

    std::vector<const MimicShape*> for_label(const std::string& label) const;
    std::size_t labels_with_shapes() const;
};

/// Per-dimension quantile threshold over the map's values (linear
/// interpolation between order statistics); bits = (I > tau). At q = 0 the
/// threshold is the row minimum, so zero entries stay 0 and, whenever the row
/// contains a zero, every positive entry survives.
BinaryMap binarize(const ImportanceMap& map, double quantile);

/// Splits each dimension of the map-constrained series into maximal runs of
/// 1-bits; runs shorter than min_length are dropped. Values are taken from
/// the series itself (inside a run the constrained series equals the input).
std::vector<Segment> constrain_and_segment(const MultivariateSeries& series, const BinaryMap& map,
                                           std::size_t min_length, std::size_t instance_index = 0);

/// Pools segments per (label, dimension) across that label's training
/// instances, then picks up to k medoids per group under dtw_distance
/// (greedy farthest-point seeding followed by one assignment/update pass).
/// Labels whose map admits no segments yield no shapes and a warning.
MimicShapeSet extract_mimicshapes(const LabeledDataset& train,
                                  const std::vector<BinaryMap>& maps_per_label,
                                  const ExtractionParams& params);

struct ClassificationResult {
    std::string label;
    std::vector<std::pair<std::string, double>> scores;  // ascending by score
};

/// score(label) = mean over the label's shapes of the best length-normalized
/// sliding-window DTW match; the predicted label is the argmin, ties broken
/// by sorted label order. Requires shapes for at least two labels.
ClassificationResult classify(const MultivariateSeries& series, const MimicShapeSet& shapes);

/// mimic-shapes v1 text format.
void save_shapes(const MimicShapeSet& shapes, const std::string& path);
MimicShapeSet load_shapes(const std::string& path);
void write_shapes(const MimicShapeSet& shapes, std::ostream& out);

}  // namespace mimic
