#include "mimic/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include <sys/wait.h>
#include <unistd.h>

#include "mimic/rng.hpp"
#include "mimic/shapelets.hpp"

namespace mimic {

void check_distribution(const std::vector<double>& dist, std::size_t n) {
    if (dist.size() != n) {
        throw std::runtime_error("oracle returned " + std::to_string(dist.size()) +
                                 " scores for " + std::to_string(n) + " labels");
    }
    double sum = 0.0;
    for (double x : dist) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw std::runtime_error("oracle returned a negative or non-finite score");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::runtime_error("oracle scores sum to " + std::to_string(sum) + ", expected 1");
    }
}

double ProbabilityOracle::predict_proba(const MultivariateSeries& series,
                                        const std::string& label) const {
    const auto& labels = label_set();
    const auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) {
        throw std::invalid_argument("oracle does not know label: " + label);
    }
    return predict_proba(series)[static_cast<std::size_t>(it - labels.begin())];
}

std::string ProbabilityOracle::predict(const MultivariateSeries& series) const {
    const auto dist = predict_proba(series);
    std::size_t best = 0;
    for (std::size_t i = 1; i < dist.size(); ++i) {
        if (dist[i] > dist[best]) best = i;
    }
    return label_set()[best];
}

// --- 1NN-DTW -----------------------------------------------------------

std::vector<double> OneNnDtwOracle::predict_proba(const MultivariateSeries& series) const {
    if (series.dims() != train_.dims() || series.length() != train_.length()) {
        throw std::invalid_argument("predict_proba: series shape does not match training shape");
    }
    const DtwBand band{band_radius_};
    std::vector<double> class_dist(labels_.size(), 0.0);
    for (std::size_t c = 0; c < labels_.size(); ++c) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t idx : by_class_[c]) {
            best = std::min(best,
                            dtw_distance_multivariate(series, train_.instances()[idx], band));
        }
        class_dist[c] = best;
    }

    // Softmin with the smallest distance factored out for stability.
    const double d_min = *std::min_element(class_dist.begin(), class_dist.end());
    std::vector<double> out(labels_.size());
    double total = 0.0;
    for (std::size_t c = 0; c < labels_.size(); ++c) {
        out[c] = std::exp(-(class_dist[c] - d_min) / temperature_);
        total += out[c];
    }
    for (double& x : out) x /= total;
    return out;
}

OneNnDtwOracle fit_1nn_dtw(const LabeledDataset& train, int band_radius, double temperature) {
    for (const auto& inst : train.instances()) {
        if (!is_normalized(inst)) {
            throw std::invalid_argument("fit_1nn_dtw: training data must be normalized");
        }
    }

    OneNnDtwOracle oracle;
    oracle.train_ = train;
    oracle.labels_ = train.label_set();
    oracle.band_radius_ = band_radius;
    oracle.by_class_.assign(oracle.labels_.size(), {});
    for (std::size_t i = 0; i < train.size(); ++i) {
        oracle.by_class_[train.label_index(train.labels()[i])].push_back(i);
    }
    for (std::size_t c = 0; c < oracle.labels_.size(); ++c) {
        if (oracle.by_class_[c].empty()) {
            throw std::invalid_argument("fit_1nn_dtw: class " + oracle.labels_[c] +
                                        " has no training instances");
        }
    }

    if (temperature > 0.0) {
        oracle.temperature_ = temperature;
    } else {
        // Median pairwise training distance; falls back to 1 when every
        // pairwise distance is zero (or with a single instance).
        std::vector<double> dists;
        dists.reserve(train.size() * (train.size() - 1) / 2);
        const DtwBand band{band_radius};
        for (std::size_t i = 0; i < train.size(); ++i) {
            for (std::size_t j = i + 1; j < train.size(); ++j) {
                dists.push_back(
                    dtw_distance_multivariate(train.instances()[i], train.instances()[j], band));
            }
        }
        double theta = 1.0;
        if (!dists.empty()) {
            std::sort(dists.begin(), dists.end());
            theta = dists[dists.size() / 2];
        }
        oracle.temperature_ = theta > 0.0 ? theta : 1.0;
    }
    return oracle;
}

// --- interval forest ----------------------------------------------------

namespace {

struct IntervalFeatures {
    static void summarize(std::span<const double> window, double* out3) {
        const auto n = static_cast<double>(window.size());
        double sum = 0.0;
        for (double x : window) sum += x;
        const double mean = sum / n;
        double var = 0.0;
        for (double x : window) var += (x - mean) * (x - mean);
        var /= n;
        double slope = 0.0;
        if (window.size() >= 2) {
            const double t_mean = (n - 1.0) / 2.0;
            double num = 0.0, den = 0.0;
            for (std::size_t t = 0; t < window.size(); ++t) {
                const double dt = static_cast<double>(t) - t_mean;
                num += dt * (window[t] - mean);
                den += dt * dt;
            }
            slope = num / den;
        }
        out3[0] = mean;
        out3[1] = std::sqrt(var);
        out3[2] = slope;
    }
};

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
};

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
    if (total == 0) return 0.0;
    double g = 1.0;
    for (std::size_t c : counts) {
        const double f = static_cast<double>(c) / static_cast<double>(total);
        g -= f * f;
    }
    return g;
}

}  // namespace

std::vector<double> IntervalForestOracle::features_for(const Tree& tree,
                                                       const MultivariateSeries& series) const {
    std::vector<double> features(tree.intervals.size() * 3);
    for (std::size_t i = 0; i < tree.intervals.size(); ++i) {
        const auto& iv = tree.intervals[i];
        IntervalFeatures::summarize(series.row(iv.dimension).subspan(iv.start, iv.length),
                                    &features[i * 3]);
    }
    return features;
}

std::vector<double> IntervalForestOracle::predict_proba(const MultivariateSeries& series) const {
    if (series.dims() != train_dims_ || series.length() != train_length_) {
        throw std::invalid_argument("predict_proba: series shape does not match training shape");
    }
    std::vector<double> votes(labels_.size(), 0.0);
    for (const auto& tree : trees_) {
        const auto features = features_for(tree, series);
        int node = 0;
        while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
            const auto& n = tree.nodes[static_cast<std::size_t>(node)];
            node = features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        votes[tree.nodes[static_cast<std::size_t>(node)].leaf_class] += 1.0;
    }
    for (double& v : votes) v /= static_cast<double>(trees_.size());
    return votes;
}

IntervalForestOracle fit_interval_forest(const LabeledDataset& train, std::size_t trees,
                                         std::size_t intervals_per_tree, std::uint64_t seed) {
    if (trees < 1) throw std::invalid_argument("fit_interval_forest: need at least one tree");
    if (intervals_per_tree < 1) {
        throw std::invalid_argument("fit_interval_forest: need at least one interval");
    }

    IntervalForestOracle oracle;
    oracle.labels_ = train.label_set();
    oracle.train_dims_ = train.dims();
    oracle.train_length_ = train.length();
    const std::size_t n = train.size();
    const std::size_t t_len = train.length();
    const std::size_t classes = oracle.labels_.size();

    std::vector<std::size_t> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = train.label_index(train.labels()[i]);

    for (std::size_t tr = 0; tr < trees; ++tr) {
        Rng rng(splitmix64(seed ^ (0x74726565ULL + tr * 0x9E3779B97F4A7C15ULL)));
        IntervalForestOracle::Tree tree;
        const std::size_t min_len = std::min<std::size_t>(3, t_len);
        for (std::size_t i = 0; i < intervals_per_tree; ++i) {
            IntervalForestOracle::Interval iv{};
            iv.dimension = rng.below(train.dims());
            iv.length = min_len + rng.below(t_len - min_len + 1);
            iv.start = rng.below(t_len - iv.length + 1);
            tree.intervals.push_back(iv);
        }

        const std::size_t n_features = tree.intervals.size() * 3;
        std::vector<std::vector<double>> features(n);
        for (std::size_t i = 0; i < n; ++i) {
            features[i] = oracle.features_for(tree, train.instances()[i]);
        }

        // Recursive gini-splitting with explicit tie-breaking toward the
        // lowest feature index and threshold.
        constexpr std::size_t kMaxDepth = 12;
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);

        auto majority = [&](const std::vector<std::size_t>& idx) {
            std::vector<std::size_t> counts(classes, 0);
            for (std::size_t i : idx) counts[y[i]]++;
            return static_cast<std::size_t>(
                std::max_element(counts.begin(), counts.end()) - counts.begin());
        };

        auto build = [&](auto&& self, const std::vector<std::size_t>& idx,
                         std::size_t depth) -> int {
            const int node_id = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();

            std::vector<std::size_t> counts(classes, 0);
            for (std::size_t i : idx) counts[y[i]]++;
            const bool pure =
                std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <=
                1;
            if (pure || depth >= kMaxDepth || idx.size() < 2) {
                tree.nodes[static_cast<std::size_t>(node_id)].leaf_class = majority(idx);
                return node_id;
            }

            SplitChoice best;
            std::vector<std::pair<double, std::size_t>> order(idx.size());
            for (std::size_t f = 0; f < n_features; ++f) {
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    order[i] = {features[idx[i]][f], idx[i]};
                }
                std::sort(order.begin(), order.end());
                std::vector<std::size_t> left_counts(classes, 0);
                std::size_t left_n = 0;
                for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                    left_counts[y[order[i].second]]++;
                    ++left_n;
                    if (order[i].first == order[i + 1].first) continue;
                    std::vector<std::size_t> right_counts(classes, 0);
                    for (std::size_t c = 0; c < classes; ++c) {
                        right_counts[c] = counts[c] - left_counts[c];
                    }
                    const std::size_t right_n = idx.size() - left_n;
                    const double impurity =
                        (static_cast<double>(left_n) * gini(left_counts, left_n) +
                         static_cast<double>(right_n) * gini(right_counts, right_n)) /
                        static_cast<double>(idx.size());
                    if (impurity + 1e-12 < best.impurity) {
                        best.impurity = impurity;
                        best.feature = static_cast<int>(f);
                        best.threshold = 0.5 * (order[i].first + order[i + 1].first);
                    }
                }
            }

            // Degenerate split: every feature identical across the node.
            if (best.feature < 0) {
                tree.nodes[static_cast<std::size_t>(node_id)].leaf_class = majority(idx);
                return node_id;
            }

            std::vector<std::size_t> left_idx, right_idx;
            for (std::size_t i : idx) {
                (features[i][static_cast<std::size_t>(best.feature)] <= best.threshold ? left_idx
                                                                                       : right_idx)
                    .push_back(i);
            }
            tree.nodes[static_cast<std::size_t>(node_id)].feature = best.feature;
            tree.nodes[static_cast<std::size_t>(node_id)].threshold = best.threshold;
            const int left = self(self, left_idx, depth + 1);
            const int right = self(self, right_idx, depth + 1);
            tree.nodes[static_cast<std::size_t>(node_id)].left = left;
            tree.nodes[static_cast<std::size_t>(node_id)].right = right;
            return node_id;
        };
        build(build, all, 0);
        oracle.trees_.push_back(std::move(tree));
    }
    return oracle;
}

// --- subprocess bridge ----------------------------------------------------

struct SubprocessOracle::Process {
    pid_t pid = -1;
    FILE* to_child = nullptr;
    FILE* from_child = nullptr;
    mutable std::mutex io_mutex;

    ~Process() {
        if (to_child) fclose(to_child);
        if (from_child) fclose(from_child);
        if (pid > 0) {
            int status = 0;
            waitpid(pid, &status, 0);
        }
    }

    std::string read_line() const {
        std::string line;
        int ch = 0;
        while ((ch = fgetc(from_child)) != EOF) {
            if (ch == '\n') return line;
            line.push_back(static_cast<char>(ch));
        }
        throw std::runtime_error("subprocess oracle closed its output stream");
    }
};

SubprocessOracle::SubprocessOracle(const std::string& command, std::vector<std::string> labels)
    : labels_(std::move(labels)), process_(std::make_unique<Process>()) {
    if (labels_.size() < 2) {
        throw std::invalid_argument("subprocess oracle needs at least two labels");
    }
    std::sort(labels_.begin(), labels_.end());

    int to_child[2], from_child[2];
    if (pipe(to_child) != 0 || pipe(from_child) != 0) {
        throw std::runtime_error("failed to create oracle pipes");
    }
    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("failed to fork oracle process");
    if (pid == 0) {
        dup2(to_child[0], STDIN_FILENO);
        dup2(from_child[1], STDOUT_FILENO);
        close(to_child[0]);
        close(to_child[1]);
        close(from_child[0]);
        close(from_child[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    process_->pid = pid;
    process_->to_child = fdopen(to_child[1], "w");
    process_->from_child = fdopen(from_child[0], "r");
    if (!process_->to_child || !process_->from_child) {
        throw std::runtime_error("failed to open oracle pipe streams");
    }

    fputs("HELLO mimic-oracle 1\n", process_->to_child);
    fflush(process_->to_child);
    const std::string reply = process_->read_line();
    unsigned long declared = 0;
    if (std::sscanf(reply.c_str(), "OK %lu", &declared) != 1) {
        throw std::runtime_error("oracle handshake failed, got: " + reply);
    }
    if (declared != labels_.size()) {
        throw std::runtime_error("oracle declared " + std::to_string(declared) + " labels, expected " +
                                 std::to_string(labels_.size()));
    }
}

SubprocessOracle::~SubprocessOracle() = default;

std::vector<double> SubprocessOracle::predict_proba(const MultivariateSeries& series) const {
    std::lock_guard<std::mutex> lock(process_->io_mutex);
    fputs("PREDICT\n", process_->to_child);
    char buf[64];
    for (std::size_t v = 0; v < series.dims(); ++v) {
        for (std::size_t t = 0; t < series.length(); ++t) {
            std::snprintf(buf, sizeof(buf), "%.17g", series(v, t));
            if (t > 0) fputc(' ', process_->to_child);
            fputs(buf, process_->to_child);
        }
        fputc('\n', process_->to_child);
    }
    fflush(process_->to_child);

    const std::string reply = process_->read_line();
    std::vector<double> dist;
    const char* cursor = reply.c_str();
    char* end = nullptr;
    while (*cursor != '\0') {
        const double x = std::strtod(cursor, &end);
        if (end == cursor) break;
        dist.push_back(x);
        cursor = end;
    }
    check_distribution(dist, labels_.size());
    return dist;
}

}  // namespace mimic
