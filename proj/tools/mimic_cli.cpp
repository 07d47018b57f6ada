#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "mimic/evaluation.hpp"
#include "mimic/parallel.hpp"
#include "mimic/pipeline.hpp"
#include "mimic/svg.hpp"
#include "mimic/synthetic.hpp"

namespace fs = std::filesystem;
using namespace mimic;

namespace {

struct RunConfig {
    std::string dataset;
    std::string test_dataset;
    std::string oracle = "builtin:1nn-dtw";
    double keep_probability = 0.5;
    std::size_t cell_width = 0;  // 0 = T/8
    std::size_t mask_count = 2000;
    double quantile = 0.5;
    std::size_t shapelets_per_label = 3;
    std::size_t min_length = 0;  // 0 = max(3, T/20)
    std::size_t max_length = 0;  // 0 = T/2
    int band = -1;
    std::size_t folds = 10;
    std::string mode = "cv";
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0 = hardware
    std::size_t explain_per_class = 0;
    std::string out_dir = "mimic-out";

    PipelineParams pipeline_params() const {
        PipelineParams p;
        p.keep_probability = keep_probability;
        p.cell_width = cell_width;
        p.mask_count = mask_count;
        p.seed = seed;
        p.quantile = quantile;
        p.shapelets_per_label = shapelets_per_label;
        p.min_length = min_length;
        p.max_length = max_length;
        p.band_radius = band;
        p.explain_per_class = explain_per_class;
        p.threads = threads == 0 ? default_thread_count() : threads;
        return p;
    }
};

void add_mask_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--p", cfg.keep_probability, "mask keep probability, in (0,1)")
        ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
    cmd->add_option("--cell-width", cfg.cell_width, "mask cell width in time steps (0 = T/8)");
    cmd->add_option("--masks", cfg.mask_count, "number of Monte-Carlo masks N")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--explain-per-class", cfg.explain_per_class,
                    "training instances probed per class for class maps (0 = all)");
}

void add_extract_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--quantile", cfg.quantile, "binarization quantile q, in [0,1)")
        ->check(CLI::Range(0.0, std::nextafter(1.0, 0.0)));
    cmd->add_option("--shapelets-per-label", cfg.shapelets_per_label,
                    "medoids per label and dimension")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lmin", cfg.min_length, "minimum shapelet length (0 = max(3, T/20))");
    cmd->add_option("--lmax", cfg.max_length, "maximum shapelet length (0 = T/2)");
}

void add_common_options(CLI::App* cmd, RunConfig& cfg, bool needs_dataset = true) {
    if (needs_dataset) {
        cmd->add_option("--dataset", cfg.dataset, "mimic-ts dataset path")->required();
        cmd->add_option("--oracle", cfg.oracle,
                        "oracle spec: builtin:1nn-dtw | builtin:forest[:trees] | "
                        "subprocess:<command>");
    }
    cmd->add_option("--band", cfg.band, "Sakoe-Chiba band radius (-1 = unbounded)");
    cmd->add_option("--seed", cfg.seed, "random seed");
    cmd->add_option("--threads", cfg.threads, "worker cap (0 = hardware)");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--config", "key=value config file; flags win on conflict");
}

// Expands `--config <file>` into `--key=value` arguments for every key the
// command line does not already set, so explicit flags always win. Unknown
// keys surface as ordinary unrecognized-option parse errors.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        }
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) throw CLI::FileError::Missing(config_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw CLI::FileError(config_path + ":" + std::to_string(lineno) +
                                 ": expected key=value");
        }
        const std::string flag = "--" + line.substr(0, eq);
        bool already_set = false;
        for (const auto& arg : args) {
            if (arg == flag || arg.rfind(flag + "=", 0) == 0) {
                already_set = true;
                break;
            }
        }
        if (!already_set) args.push_back(flag + "=" + line.substr(eq + 1));
    }
    return args;
}

std::unique_ptr<ProbabilityOracle> make_oracle(const RunConfig& cfg,
                                               const LabeledDataset& normalized_train) {
    const std::string& spec = cfg.oracle;
    if (spec == "builtin:1nn-dtw") {
        return std::make_unique<OneNnDtwOracle>(fit_1nn_dtw(normalized_train, cfg.band));
    }
    if (spec.rfind("builtin:forest", 0) == 0) {
        std::size_t trees = 100;
        if (spec.size() > 14 && spec[14] == ':') {
            trees = static_cast<std::size_t>(std::stoull(spec.substr(15)));
        } else if (spec.size() > 14) {
            throw std::runtime_error("unknown oracle spec: " + spec);
        }
        const auto intervals = std::max<std::size_t>(
            3, static_cast<std::size_t>(std::sqrt(static_cast<double>(normalized_train.length()))));
        return std::make_unique<IntervalForestOracle>(
            fit_interval_forest(normalized_train, trees, intervals, cfg.seed));
    }
    if (spec.rfind("subprocess:", 0) == 0) {
        return std::make_unique<SubprocessOracle>(spec.substr(11), normalized_train.label_set());
    }
    throw std::runtime_error("unknown oracle spec: " + spec);
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
    return out;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failure: " + path.string());
}

MimicModel run_pipeline(const RunConfig& cfg, const LabeledDataset& normalized,
                        const ProbabilityOracle& oracle) {
    return fit_mimic(normalized, oracle, cfg.pipeline_params());
}

int cmd_explain(const RunConfig& cfg) {
    const LabeledDataset data = load_dataset(cfg.dataset);
    const LabeledDataset normalized = data.normalized();
    const auto oracle = make_oracle(cfg, normalized);

    const auto params = cfg.pipeline_params();
    const auto dist = params.mask_distribution(normalized.length());
    const auto masks = generate_masks(dist, normalized.dims(), normalized.length(),
                                      params.mask_count);
    const auto maps = class_importance_maps(normalized, *oracle, masks, params.explain_per_class,
                                            params.threads);

    fs::create_directories(cfg.out_dir);
    for (const auto& map : maps) {
        const fs::path csv = fs::path(cfg.out_dir) / ("importance_" + sanitize(map.label) + ".csv");
        save_importance_csv(map, csv.string());
        const fs::path svg = fs::path(cfg.out_dir) / ("importance_" + sanitize(map.label) + ".svg");
        write_text_file(svg, svg_heatmap(map));
        std::cout << "wrote " << csv.string() << '\n' << "wrote " << svg.string() << '\n';
    }
    return 0;
}

int cmd_extract(const RunConfig& cfg) {
    const LabeledDataset data = load_dataset(cfg.dataset);
    const LabeledDataset normalized = data.normalized();
    const auto oracle = make_oracle(cfg, normalized);
    const MimicModel model = run_pipeline(cfg, normalized, *oracle);

    for (const auto& warning : model.shapes.warnings) {
        std::cerr << "warning: " << warning << '\n';
    }

    fs::create_directories(cfg.out_dir);
    const fs::path shapes_path = fs::path(cfg.out_dir) / "shapes.txt";
    save_shapes(model.shapes, shapes_path.string());
    std::cout << "wrote " << shapes_path.string() << '\n';

    for (std::size_t i = 0; i < model.shapes.shapes.size(); ++i) {
        const auto& shape = model.shapes.shapes[i];
        const fs::path svg = fs::path(cfg.out_dir) /
                             ("shape_" + std::to_string(i) + "_" + sanitize(shape.label) + "_dim" +
                              std::to_string(shape.dimension) + ".svg");
        write_text_file(svg, svg_polyline(shape));
        std::cout << "wrote " << svg.string() << '\n';
    }

    if (model.shapes.shapes.empty()) {
        std::cerr << "error: no shapelets extracted for any label; "
                     "try a lower --quantile or --lmin\n";
        return 1;
    }
    return 0;
}

int cmd_classify(const RunConfig& cfg, const std::string& shapes_path,
                 const std::string& input_path) {
    MimicShapeSet shapes = load_shapes(shapes_path);
    shapes.params.band = DtwBand{cfg.band};
    const LabeledDataset input = load_dataset(input_path);

    char buf[64];
    for (const auto& instance : input.instances()) {
        const auto result = classify(normalize(instance), shapes);
        std::cout << result.label << '\n';
        for (const auto& [label, score] : result.scores) {
            std::snprintf(buf, sizeof(buf), "%.6g", score);
            std::cout << label << ' ' << buf << '\n';
        }
    }
    return 0;
}

std::string companion_test_path(const std::string& train_path) {
    const auto pos = train_path.rfind("_TRAIN");
    if (pos != std::string::npos) {
        std::string out = train_path;
        out.replace(pos, 6, "_TEST");
        return out;
    }
    fs::path p(train_path);
    const std::string stem = p.stem().string();
    const std::string ext = p.extension().string();
    return (p.parent_path() / (stem + "_TEST" + ext)).string();
}

int cmd_evaluate(const RunConfig& cfg) {
    const LabeledDataset data = load_dataset(cfg.dataset);

    std::string mode = cfg.mode;
    std::size_t folds = cfg.folds;
    if (mode.rfind("cv:", 0) == 0) {
        folds = static_cast<std::size_t>(std::stoull(mode.substr(3)));
        mode = "cv";
    }
    if (mode != "cv" && mode != "split") {
        throw std::runtime_error("unknown mode '" + cfg.mode + "', expected cv[:k] or split");
    }

    const OracleFactory factory = [&cfg](const LabeledDataset& train) {
        return make_oracle(cfg, train);
    };

    EvaluationReport report;
    if (mode == "cv") {
        report = cross_validate(data, factory, cfg.pipeline_params(), folds, cfg.seed);
    } else {
        const std::string test_path =
            cfg.test_dataset.empty() ? companion_test_path(cfg.dataset) : cfg.test_dataset;
        const LabeledDataset test = load_dataset(test_path);
        report = evaluate_split(data, test, factory, cfg.pipeline_params());
    }

    std::cout << "mode=" << report.mode << '\n';
    std::cout << render_report_table({report});
    fs::create_directories(cfg.out_dir);
    const fs::path csv = fs::path(cfg.out_dir) / "report.csv";
    write_text_file(csv, render_report_csv({report}));
    std::cout << "wrote " << csv.string() << '\n';
    return 0;
}

int cmd_gen_synthetic(const SyntheticParams& params, const std::string& out_path) {
    const SyntheticData data = generate_planted_motif(params);
    save_dataset(data.dataset, out_path);
    std::cout << "wrote " << out_path << '\n';
    for (const auto& motif : data.motifs) {
        std::cout << "motif label=" << motif.label << " dim=" << motif.dimension
                  << " start=" << motif.start << " len=" << motif.length << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mimic: black-box time-series classifier explanation via "
                 "importance maps and MimicShape patterns"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string shapes_path, input_path;
    SyntheticParams syn;
    std::string syn_out = "synthetic.ts";

    CLI::App* explain = app.add_subcommand("explain", "write per-label importance maps");
    add_common_options(explain, cfg);
    add_mask_options(explain, cfg);

    CLI::App* extract = app.add_subcommand("extract", "extract MimicShape patterns");
    add_common_options(extract, cfg);
    add_mask_options(extract, cfg);
    add_extract_options(extract, cfg);

    CLI::App* classify_cmd = app.add_subcommand("classify", "classify series with saved shapes");
    classify_cmd->add_option("--shapes", shapes_path, "mimic-shapes file")->required();
    classify_cmd->add_option("--input", input_path, "mimic-ts file with query series")->required();
    add_common_options(classify_cmd, cfg, false);

    CLI::App* evaluate = app.add_subcommand("evaluate", "cross-validated fidelity report");
    add_common_options(evaluate, cfg);
    add_mask_options(evaluate, cfg);
    add_extract_options(evaluate, cfg);
    evaluate->add_option("--folds", cfg.folds, "fold count for cv mode")
        ->check(CLI::Range(static_cast<std::size_t>(2), static_cast<std::size_t>(1000)));
    evaluate->add_option("--mode", cfg.mode, "cv | cv:<k> | split");
    evaluate->add_option("--test", cfg.test_dataset, "test dataset for split mode");

    CLI::App* gen = app.add_subcommand("gen-synthetic", "emit a planted-motif dataset");
    gen->add_option("--instances", syn.instances)->check(CLI::PositiveNumber);
    gen->add_option("--dims", syn.dims)->check(CLI::PositiveNumber);
    gen->add_option("--length", syn.length)->check(CLI::PositiveNumber);
    gen->add_option("--motif-length", syn.motif_length)->check(CLI::PositiveNumber);
    gen->add_option("--noise", syn.noise)->check(CLI::NonNegativeNumber);
    gen->add_option("--classes", syn.classes)->check(CLI::PositiveNumber);
    gen->add_option("--seed", syn.seed);
    gen->add_option("--out", syn_out, "output dataset path");

    try {
        auto args = expand_config_args(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes back to front
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*explain) return cmd_explain(cfg);
        if (*extract) return cmd_extract(cfg);
        if (*classify_cmd) return cmd_classify(cfg, shapes_path, input_path);
        if (*evaluate) return cmd_evaluate(cfg);
        if (*gen) return cmd_gen_synthetic(syn, syn_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
