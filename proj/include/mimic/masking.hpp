#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mimic/tsdata.hpp"

namespace mimic {

/// Block-Bernoulli mask distribution: each dimension is tiled into cells of
/// `cell_width` consecutive time steps (the final cell absorbs the remainder)
/// and every cell is kept independently with probability `keep_probability`.
/// Per coordinate, E[M(beta)] = keep_probability.
struct MaskDistribution {
    double keep_probability = 0.5;
    std::size_t cell_width = 1;
    std::uint64_t seed = 0;

    void validate(std::size_t series_length) const;
    std::size_t cells_per_dim(std::size_t series_length) const;
};

/// Binary V x T filter, constant within each cell.
class Mask {
public:
    Mask() = default;
    Mask(std::size_t dims, std::size_t length) : dims_(dims), length_(length), bits_(dims * length, 0) {}

    std::size_t dims() const { return dims_; }
    std::size_t length() const { return length_; }
    std::uint8_t operator()(std::size_t v, std::size_t t) const { return bits_[v * length_ + t]; }
    std::uint8_t& operator()(std::size_t v, std::size_t t) { return bits_[v * length_ + t]; }
    const std::vector<std::uint8_t>& bits() const { return bits_; }

    bool operator==(const Mask&) const = default;

private:
    std::size_t dims_ = 0;
    std::size_t length_ = 0;
    std::vector<std::uint8_t> bits_;
};

struct MaskSet {
    std::vector<Mask> masks;
    MaskDistribution distribution;

    std::size_t size() const { return masks.size(); }
};

/// Exhaustive enumeration of every cell assignment together with its
/// probability under the distribution; probabilities sum to 1.
struct MaskEnumeration {
    std::vector<Mask> masks;
    std::vector<double> probabilities;
    MaskDistribution distribution;

    std::size_t size() const { return masks.size(); }
};

/// Draws `count` independent masks. Each mask's random stream is derived from
/// (seed, mask index), so the result is identical no matter how generation is
/// scheduled.
MaskSet generate_masks(const MaskDistribution& dist, std::size_t dims, std::size_t length,
                       std::size_t count);

/// Element-wise product; requires matching shapes.
MultivariateSeries apply_mask(const MultivariateSeries& series, const Mask& mask);

/// All 2^(V*C) cell assignments with probabilities p^k (1-p)^(V*C-k).
/// Refuses shapes with V*C > 20.
MaskEnumeration enumerate_all_masks(const MaskDistribution& dist, std::size_t dims,
                                    std::size_t length);

}  // namespace mimic
