#include "mimic/masking.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mimic/rng.hpp"

namespace mimic {

void MaskDistribution::validate(std::size_t series_length) const {
    if (!(keep_probability > 0.0 && keep_probability < 1.0)) {
        throw std::invalid_argument("MaskDistribution: keep probability must lie in (0, 1)");
    }
    if (cell_width < 1 || cell_width > series_length) {
        throw std::invalid_argument("MaskDistribution: cell width must lie in [1, T]");
    }
}

std::size_t MaskDistribution::cells_per_dim(std::size_t series_length) const {
    return (series_length + cell_width - 1) / cell_width;
}

namespace {

void fill_mask_from_cells(Mask& mask, std::size_t cell_width,
                          const std::vector<std::uint8_t>& cells) {
    const std::size_t cells_per_dim = (mask.length() + cell_width - 1) / cell_width;
    for (std::size_t v = 0; v < mask.dims(); ++v) {
        for (std::size_t c = 0; c < cells_per_dim; ++c) {
            const std::uint8_t bit = cells[v * cells_per_dim + c];
            const std::size_t start = c * cell_width;
            const std::size_t stop = std::min(mask.length(), start + cell_width);
            for (std::size_t t = start; t < stop; ++t) mask(v, t) = bit;
        }
    }
}

}  // namespace

MaskSet generate_masks(const MaskDistribution& dist, std::size_t dims, std::size_t length,
                       std::size_t count) {
    if (dims < 1 || length < 1) throw std::invalid_argument("generate_masks: V and T must be >= 1");
    if (count < 1) throw std::invalid_argument("generate_masks: count must be >= 1");
    dist.validate(length);

    const std::size_t cells = dist.cells_per_dim(length);
    MaskSet out;
    out.distribution = dist;
    out.masks.reserve(count);
    std::vector<std::uint8_t> cell_bits(dims * cells);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng(splitmix64(dist.seed ^ (0x6D61736BULL + i)));
        for (auto& bit : cell_bits) {
            bit = rng.uniform() < dist.keep_probability ? 1 : 0;
        }
        Mask mask(dims, length);
        fill_mask_from_cells(mask, dist.cell_width, cell_bits);
        out.masks.push_back(std::move(mask));
    }
    return out;
}

MultivariateSeries apply_mask(const MultivariateSeries& series, const Mask& mask) {
    if (series.dims() != mask.dims() || series.length() != mask.length()) {
        throw std::invalid_argument("apply_mask: series and mask shapes differ");
    }
    MultivariateSeries out(series.dims(), series.length());
    for (std::size_t v = 0; v < series.dims(); ++v) {
        for (std::size_t t = 0; t < series.length(); ++t) {
            out(v, t) = series(v, t) * static_cast<double>(mask(v, t));
        }
    }
    return out;
}

MaskEnumeration enumerate_all_masks(const MaskDistribution& dist, std::size_t dims,
                                    std::size_t length) {
    if (dims < 1 || length < 1) {
        throw std::invalid_argument("enumerate_all_masks: V and T must be >= 1");
    }
    dist.validate(length);
    const std::size_t cells = dist.cells_per_dim(length);
    const std::size_t total_cells = dims * cells;
    if (total_cells > 20) {
        throw std::invalid_argument(
            "enumerate_all_masks: V*C = " + std::to_string(total_cells) +
            " exceeds the enumeration guard of 20 (would require " +
            std::to_string(std::pow(2.0, static_cast<double>(total_cells))) + " masks)");
    }

    const double p = dist.keep_probability;
    const std::size_t count = std::size_t{1} << total_cells;
    MaskEnumeration out;
    out.distribution = dist;
    out.masks.reserve(count);
    out.probabilities.reserve(count);
    std::vector<std::uint8_t> cell_bits(total_cells);
    for (std::size_t code = 0; code < count; ++code) {
        std::size_t kept = 0;
        for (std::size_t c = 0; c < total_cells; ++c) {
            cell_bits[c] = (code >> c) & 1u;
            kept += cell_bits[c];
        }
        Mask mask(dims, length);
        fill_mask_from_cells(mask, dist.cell_width, cell_bits);
        out.masks.push_back(std::move(mask));
        out.probabilities.push_back(std::pow(p, static_cast<double>(kept)) *
                                    std::pow(1.0 - p, static_cast<double>(total_cells - kept)));
    }
    return out;
}

}  // namespace mimic
