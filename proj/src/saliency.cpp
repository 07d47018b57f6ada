#include "mimic/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mimic/parallel.hpp"

namespace mimic {

namespace {

std::size_t label_position(const std::vector<std::string>& labels, const std::string& label) {
    const auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) {
        throw std::invalid_argument("unknown label: " + label);
    }
    return static_cast<std::size_t>(it - labels.begin());
}

// One oracle call per mask; each probe yields the full distribution so all
// labels share the same N evaluations. Probes run in parallel only when the
// oracle allows concurrent calls.
std::vector<std::vector<double>> probe_masks(const MultivariateSeries& series,
                                             const ProbabilityOracle& oracle,
                                             const std::vector<Mask>& masks, unsigned threads) {
    std::vector<std::vector<double>> scores(masks.size());
    const unsigned workers = oracle.thread_safe() ? std::max(1u, threads) : 1u;
    parallel_for(masks.size(), workers, [&](std::size_t i) {
        const auto dist = oracle.predict_proba(apply_mask(series, masks[i]));
        try {
            check_distribution(dist, oracle.label_set().size());
        } catch (const std::exception& e) {
            throw std::runtime_error("probe " + std::to_string(i) + ": " + e.what());
        }
        scores[i] = dist;
    });
    return scores;
}

ImportanceMap reduce_weighted(const std::vector<Mask>& masks, const std::vector<double>& weights,
                              double normalizer, const MultivariateSeries& series,
                              const std::string& label, const MaskDistribution& dist) {
    ImportanceMap map;
    map.dims = series.dims();
    map.length = series.length();
    map.label = label;
    map.sample_count = masks.size();
    map.distribution = dist;
    map.values.assign(map.dims * map.length, 0.0);

    // Fixed mask-index order keeps the accumulation bit-identical no matter
    // how the probes were scheduled.
    for (std::size_t i = 0; i < masks.size(); ++i) {
        const double w = weights[i];
        if (w == 0.0) continue;
        const auto& bits = masks[i].bits();
        for (std::size_t k = 0; k < bits.size(); ++k) {
            if (bits[k]) map.values[k] += w;
        }
    }
    map.pre_clamp_max = 0.0;
    for (double& x : map.values) {
        x /= normalizer;
        map.pre_clamp_max = std::max(map.pre_clamp_max, x);
        x = std::clamp(x, 0.0, 1.0);
    }
    return map;
}

void check_shapes(const MultivariateSeries& series, std::size_t mask_dims,
                  std::size_t mask_length) {
    if (series.dims() != mask_dims || series.length() != mask_length) {
        throw std::invalid_argument("importance: mask shape does not match series shape");
    }
}

}  // namespace

ImportanceMap estimate_importance(const MultivariateSeries& series, const ProbabilityOracle& oracle,
                                  const std::string& label, const MaskSet& masks,
                                  unsigned threads) {
    if (masks.masks.empty()) throw std::invalid_argument("estimate_importance: empty mask set");
    check_shapes(series, masks.masks[0].dims(), masks.masks[0].length());
    const std::size_t pos = label_position(oracle.label_set(), label);

    const auto scores = probe_masks(series, oracle, masks.masks, threads);
    std::vector<double> weights(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) weights[i] = scores[i][pos];
    const double normalizer =
        masks.distribution.keep_probability * static_cast<double>(masks.size());
    return reduce_weighted(masks.masks, weights, normalizer, series, label, masks.distribution);
}

std::vector<ImportanceMap> importance_for_all_labels(const MultivariateSeries& series,
                                                     const ProbabilityOracle& oracle,
                                                     const MaskSet& masks, unsigned threads) {
    if (masks.masks.empty()) throw std::invalid_argument("importance_for_all_labels: empty mask set");
    check_shapes(series, masks.masks[0].dims(), masks.masks[0].length());

    const auto scores = probe_masks(series, oracle, masks.masks, threads);
    const double normalizer =
        masks.distribution.keep_probability * static_cast<double>(masks.size());
    std::vector<ImportanceMap> maps;
    maps.reserve(oracle.label_set().size());
    std::vector<double> weights(scores.size());
    for (std::size_t l = 0; l < oracle.label_set().size(); ++l) {
        for (std::size_t i = 0; i < scores.size(); ++i) weights[i] = scores[i][l];
        maps.push_back(reduce_weighted(masks.masks, weights, normalizer, series,
                                       oracle.label_set()[l], masks.distribution));
    }
    return maps;
}

std::vector<ImportanceMap> exact_importance_for_all_labels(const MultivariateSeries& series,
                                                           const ProbabilityOracle& oracle,
                                                           const MaskDistribution& dist) {
    const auto enumeration = enumerate_all_masks(dist, series.dims(), series.length());
    std::vector<std::vector<double>> scores(enumeration.size());
    for (std::size_t i = 0; i < enumeration.size(); ++i) {
        scores[i] = oracle.predict_proba(apply_mask(series, enumeration.masks[i]));
        check_distribution(scores[i], oracle.label_set().size());
    }

    std::vector<ImportanceMap> maps;
    maps.reserve(oracle.label_set().size());
    std::vector<double> weights(enumeration.size());
    for (std::size_t l = 0; l < oracle.label_set().size(); ++l) {
        for (std::size_t i = 0; i < enumeration.size(); ++i) {
            weights[i] = scores[i][l] * enumeration.probabilities[i];
        }
        maps.push_back(reduce_weighted(enumeration.masks, weights, dist.keep_probability, series,
                                       oracle.label_set()[l], dist));
    }
    return maps;
}

ImportanceMap exact_importance(const MultivariateSeries& series, const ProbabilityOracle& oracle,
                               const std::string& label, const MaskDistribution& dist) {
    const std::size_t pos = label_position(oracle.label_set(), label);
    return exact_importance_for_all_labels(series, oracle, dist)[pos];
}

std::vector<ImportanceMap> class_importance_maps(const LabeledDataset& train,
                                                 const ProbabilityOracle& oracle,
                                                 const MaskSet& masks, std::size_t per_class_cap,
                                                 unsigned threads) {
    if (train.label_set() != oracle.label_set()) {
        throw std::invalid_argument("class_importance_maps: oracle labels differ from dataset labels");
    }

    std::vector<ImportanceMap> out;
    out.reserve(train.label_set().size());
    for (const auto& label : train.label_set()) {
        ImportanceMap mean;
        std::size_t used = 0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            if (train.labels()[i] != label) continue;
            if (per_class_cap > 0 && used >= per_class_cap) break;
            ImportanceMap inst = estimate_importance(train.instances()[i], oracle, label, masks,
                                                     threads);
            if (used == 0) {
                mean = std::move(inst);
            } else {
                for (std::size_t k = 0; k < mean.values.size(); ++k) {
                    mean.values[k] += inst.values[k];
                }
                mean.pre_clamp_max = std::max(mean.pre_clamp_max, inst.pre_clamp_max);
            }
            ++used;
        }
        if (used > 1) {
            for (double& x : mean.values) x /= static_cast<double>(used);
        }
        out.push_back(std::move(mean));
    }
    return out;
}

void write_importance_csv(const ImportanceMap& map, std::ostream& out) {
    char buf[64];
    out << "# label=" << map.label << " N=" << map.sample_count;
    std::snprintf(buf, sizeof(buf), "%.17g", map.distribution.keep_probability);
    out << " p=" << buf << " w=" << map.distribution.cell_width
        << " seed=" << map.distribution.seed << '\n';
    for (std::size_t v = 0; v < map.dims; ++v) {
        for (std::size_t t = 0; t < map.length; ++t) {
            std::snprintf(buf, sizeof(buf), "%.17g", map(v, t));
            if (t > 0) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

void save_importance_csv(const ImportanceMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_importance_csv(map, out);
    if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace mimic
