#include "mimic/shapelets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mimic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_band(std::size_t na, std::size_t nb, DtwBand band) {
    if (na == 0 || nb == 0) throw std::invalid_argument("dtw_distance: empty input");
    const std::size_t diff = na > nb ? na - nb : nb - na;
    if (!band.unbounded() && static_cast<std::size_t>(band.radius) < diff) {
        throw std::invalid_argument("dtw_distance: band radius " + std::to_string(band.radius) +
                                    " cannot bridge length difference " + std::to_string(diff));
    }
}

// Shared DP: local_cost(i, j) over an na x nb grid, |i - j| <= radius.
template <typename Cost>
double dtw_core(std::size_t na, std::size_t nb, DtwBand band, Cost local_cost) {
    const std::size_t radius = band.unbounded() ? std::max(na, nb)
                                                : static_cast<std::size_t>(band.radius);
    std::vector<double> prev(nb + 1, kInf), curr(nb + 1, kInf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= na; ++i) {
        std::fill(curr.begin(), curr.end(), kInf);
        const std::size_t j_lo = i > radius ? i - radius : 1;
        const std::size_t j_hi = std::min(nb, i + radius);
        for (std::size_t j = j_lo; j <= j_hi; ++j) {
            const double best = std::min({prev[j], curr[j - 1], prev[j - 1]});
            curr[j] = local_cost(i - 1, j - 1) + best;
        }
        std::swap(prev, curr);
    }
    return prev[nb];
}

}  // namespace

double dtw_distance(std::span<const double> a, std::span<const double> b, DtwBand band) {
    check_band(a.size(), b.size(), band);
    return dtw_core(a.size(), b.size(), band, [&](std::size_t i, std::size_t j) {
        const double d = a[i] - b[j];
        return d * d;
    });
}

double dtw_distance_multivariate(const MultivariateSeries& a, const MultivariateSeries& b,
                                 DtwBand band) {
    if (a.dims() != b.dims()) {
        throw std::invalid_argument("dtw_distance_multivariate: dimension counts differ");
    }
    check_band(a.length(), b.length(), band);
    return dtw_core(a.length(), b.length(), band, [&](std::size_t i, std::size_t j) {
        double sum = 0.0;
        for (std::size_t v = 0; v < a.dims(); ++v) {
            const double d = a(v, i) - b(v, j);
            sum += d * d;
        }
        return sum;
    });
}

std::size_t ExtractionParams::resolved_min_length(std::size_t series_length) const {
    if (min_length > 0) return min_length;
    return std::max<std::size_t>(3, series_length / 20);
}

std::size_t ExtractionParams::resolved_max_length(std::size_t series_length) const {
    if (max_length > 0) return max_length;
    return std::max<std::size_t>(1, series_length / 2);
}

std::vector<const MimicShape*> MimicShapeSet::for_label(const std::string& label) const {
    std::vector<const MimicShape*> out;
    for (const auto& s : shapes) {
        if (s.label == label) out.push_back(&s);
    }
    return out;
}

std::size_t MimicShapeSet::labels_with_shapes() const {
    std::set<std::string> seen;
    for (const auto& s : shapes) seen.insert(s.label);
    return seen.size();
}

namespace {

// Linear interpolation between order statistics at rank q * (n - 1).
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

BinaryMap binarize(const ImportanceMap& map, double quantile) {
    if (!(quantile >= 0.0 && quantile < 1.0)) {
        throw std::invalid_argument("binarize: quantile must lie in [0, 1)");
    }
    BinaryMap out;
    out.dims = map.dims;
    out.length = map.length;
    out.label = map.label;
    out.bits.assign(map.dims * map.length, 0);
    out.thresholds.resize(map.dims);
    std::vector<double> row(map.length);
    for (std::size_t v = 0; v < map.dims; ++v) {
        for (std::size_t t = 0; t < map.length; ++t) row[t] = map(v, t);
        std::sort(row.begin(), row.end());
        const double tau = quantile_sorted(row, quantile);
        out.thresholds[v] = tau;
        for (std::size_t t = 0; t < map.length; ++t) {
            out.bits[v * map.length + t] = map(v, t) > tau ? 1 : 0;
        }
    }
    return out;
}

std::vector<Segment> constrain_and_segment(const MultivariateSeries& series, const BinaryMap& map,
                                           std::size_t min_length, std::size_t instance_index) {
    if (series.dims() != map.dims || series.length() != map.length) {
        throw std::invalid_argument("constrain_and_segment: series and map shapes differ");
    }
    if (min_length < 1) min_length = 1;
    std::vector<Segment> out;
    for (std::size_t v = 0; v < map.dims; ++v) {
        std::size_t t = 0;
        while (t < map.length) {
            if (!map(v, t)) {
                ++t;
                continue;
            }
            std::size_t run_end = t;
            while (run_end < map.length && map(v, run_end)) ++run_end;
            if (run_end - t >= min_length) {
                Segment seg;
                seg.dimension = v;
                seg.start = t;
                seg.instance = instance_index;
                seg.values.assign(series.row(v).begin() + static_cast<std::ptrdiff_t>(t),
                                  series.row(v).begin() + static_cast<std::ptrdiff_t>(run_end));
                out.push_back(std::move(seg));
            }
            t = run_end;
        }
    }
    return out;
}

namespace {

DtwBand widened_band(DtwBand band, std::size_t na, std::size_t nb) {
    if (band.unbounded()) return band;
    const std::size_t diff = na > nb ? na - nb : nb - na;
    const int needed = static_cast<int>(diff);
    return {std::max(band.radius, needed)};
}

double segment_dtw(const Segment& a, const Segment& b, DtwBand band) {
    return dtw_distance(a.values, b.values, widened_band(band, a.values.size(), b.values.size()));
}

// Greedy farthest-point seeding, then one assignment pass and one medoid
// update pass. Ties are always broken toward the lowest index so the result
// does not depend on evaluation order. Returns (medoid index, support).
std::vector<std::pair<std::size_t, std::size_t>> k_medoids(const std::vector<Segment>& pool,
                                                           std::size_t k, DtwBand band) {
    const std::size_t n = pool.size();
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = segment_dtw(pool[i], pool[j], band);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    // First seed: the pool's 1-medoid.
    std::size_t first = 0;
    double best_total = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) total += dist[i * n + j];
        if (total < best_total) {
            best_total = total;
            first = i;
        }
    }
    std::vector<std::size_t> medoids{first};
    while (medoids.size() < k) {
        std::size_t candidate = n;
        double best_gap = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::find(medoids.begin(), medoids.end(), i) != medoids.end()) continue;
            double nearest = kInf;
            for (std::size_t m : medoids) nearest = std::min(nearest, dist[i * n + m]);
            if (nearest > best_gap) {
                best_gap = nearest;
                candidate = i;
            }
        }
        // Remaining points duplicate a chosen medoid; stop early.
        if (candidate == n || best_gap <= 0.0) break;
        medoids.push_back(candidate);
    }

    std::vector<std::size_t> assignment(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best_m = 0;
        double best_d = kInf;
        for (std::size_t m = 0; m < medoids.size(); ++m) {
            const double d = dist[i * n + medoids[m]];
            if (d < best_d) {
                best_d = d;
                best_m = m;
            }
        }
        assignment[i] = best_m;
    }

    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t m = 0; m < medoids.size(); ++m) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (assignment[i] == m) members.push_back(i);
        }
        if (members.empty()) continue;
        std::size_t best_i = members[0];
        double best_cost = kInf;
        for (std::size_t i : members) {
            double cost = 0.0;
            for (std::size_t j : members) cost += dist[i * n + j];
            if (cost < best_cost) {
                best_cost = cost;
                best_i = i;
            }
        }
        out.emplace_back(best_i, members.size());
    }
    return out;
}

}  // namespace

MimicShapeSet extract_mimicshapes(const LabeledDataset& train,
                                  const std::vector<BinaryMap>& maps_per_label,
                                  const ExtractionParams& params) {
    const std::size_t lmin = params.resolved_min_length(train.length());
    const std::size_t lmax = params.resolved_max_length(train.length());
    if (lmax < lmin) {
        throw std::invalid_argument("extract_mimicshapes: max length below min length");
    }

    std::map<std::string, const BinaryMap*> map_by_label;
    for (const auto& m : maps_per_label) map_by_label[m.label] = &m;
    for (const auto& label : train.label_set()) {
        if (!map_by_label.count(label)) {
            throw std::invalid_argument("extract_mimicshapes: no map for label " + label);
        }
    }

    MimicShapeSet out;
    out.label_set = train.label_set();
    out.params = params;
    for (const auto& label : train.label_set()) {
        const BinaryMap& map = *map_by_label.at(label);
        std::vector<Segment> pool;
        for (std::size_t i = 0; i < train.size(); ++i) {
            if (train.labels()[i] != label) continue;
            auto segs = constrain_and_segment(train.instances()[i], map, lmin, i);
            for (auto& seg : segs) {
                if (seg.values.size() > lmax) {
                    // Centered truncation of over-long segments.
                    const std::size_t offset = (seg.values.size() - lmax) / 2;
                    seg.values = {seg.values.begin() + static_cast<std::ptrdiff_t>(offset),
                                  seg.values.begin() + static_cast<std::ptrdiff_t>(offset + lmax)};
                    seg.start += offset;
                }
                pool.push_back(std::move(seg));
            }
        }
        if (pool.empty()) {
            out.warnings.push_back("label " + label +
                                   ": importance map admits no segments, no shapelets extracted");
            continue;
        }
        std::map<std::size_t, std::vector<Segment>> by_dim;
        for (auto& seg : pool) by_dim[seg.dimension].push_back(std::move(seg));
        for (const auto& [dim, segs] : by_dim) {
            const auto medoids = k_medoids(segs, params.shapelets_per_label, params.band);
            for (const auto& [idx, support] : medoids) {
                MimicShape shape;
                shape.label = label;
                shape.dimension = dim;
                shape.values = segs[idx].values;
                shape.support = support;
                shape.instance = segs[idx].instance;
                shape.start = segs[idx].start;
                out.shapes.push_back(std::move(shape));
            }
        }
    }
    return out;
}

ClassificationResult classify(const MultivariateSeries& series, const MimicShapeSet& shapes) {
    if (!is_normalized(series)) {
        throw std::invalid_argument("classify: series must be normalized into (0, 1]");
    }
    if (shapes.labels_with_shapes() < 2) {
        throw std::invalid_argument("classify: need shapelets for at least two labels");
    }

    const std::size_t total = series.length();
    auto best_window_match = [&](const MimicShape& shape) {
        const auto len = static_cast<double>(shape.values.size());
        const auto w_lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.8 * len)));
        const auto w_hi =
            std::min<std::size_t>(total, static_cast<std::size_t>(std::floor(1.2 * len)));
        double best = kInf;
        for (std::size_t wl = w_lo; wl <= w_hi; ++wl) {
            for (std::size_t start = 0; start + wl <= total; ++start) {
                const auto window = series.row(shape.dimension).subspan(start, wl);
                const double d =
                    dtw_distance(shape.values, window,
                                 widened_band(shapes.params.band, shape.values.size(), wl)) /
                    (len + static_cast<double>(wl));
                best = std::min(best, d);
            }
        }
        return best;
    };

    ClassificationResult result;
    double best_score = kInf;
    for (const auto& label : shapes.label_set) {
        const auto group = shapes.for_label(label);
        if (group.empty()) continue;
        double sum = 0.0;
        for (const auto* shape : group) sum += best_window_match(*shape);
        const double score = sum / static_cast<double>(group.size());
        result.scores.emplace_back(label, score);
        if (score < best_score) {
            best_score = score;
            result.label = label;
        }
    }
    if (result.label.empty()) {
        throw std::runtime_error("classify: no shapelet produced a finite score");
    }
    std::stable_sort(result.scores.begin(), result.scores.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    return result;
}

void write_shapes(const MimicShapeSet& shapes, std::ostream& out) {
    out << "# mimic-shapes 1\n";
    char buf[64];
    for (const auto& s : shapes.shapes) {
        out << s.label << ' ' << s.dimension << ' ' << s.support << ' ' << s.start << ' '
            << s.values.size() << '\n';
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", s.values[i]);
            if (i > 0) out << ' ';
            out << buf;
        }
        out << '\n';
    }
}

void save_shapes(const MimicShapeSet& shapes, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_shapes(shapes, out);
    if (!out) throw std::runtime_error("write failure: " + path);
}

MimicShapeSet load_shapes(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open shapes file: " + path);

    std::size_t lineno = 0;
    std::string line;
    auto fail = [&](const std::string& what) -> void {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + what);
    };

    if (!std::getline(in, line)) {
        ++lineno;
        fail("empty file, expected '# mimic-shapes 1'");
    }
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "# mimic-shapes 1") fail("bad magic, expected '# mimic-shapes 1'");

    MimicShapeSet out;
    std::set<std::string> labels;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream header(line);
        MimicShape shape;
        std::size_t len = 0;
        if (!(header >> shape.label >> shape.dimension >> shape.support >> shape.start >> len)) {
            fail("malformed shapelet header, expected 'label dim support start len'");
        }
        std::string tail;
        if (header >> tail) fail("trailing tokens after shapelet header");
        if (len < 1) fail("shapelet length must be >= 1");
        if (!std::getline(in, line)) {
            ++lineno;
            fail("missing value line");
        }
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream values(line);
        double x = 0.0;
        while (values >> x) shape.values.push_back(x);
        if (shape.values.size() != len) {
            fail("expected " + std::to_string(len) + " values, got " +
                 std::to_string(shape.values.size()));
        }
        labels.insert(shape.label);
        out.shapes.push_back(std::move(shape));
    }
    out.label_set.assign(labels.begin(), labels.end());
    return out;
}

}  // namespace mimic
