#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvad/benchmark.hpp"
#include "curvad/cloud_io.hpp"
#include "curvad/curvature.hpp"
#include "curvad/error.hpp"
#include "curvad/metrics.hpp"
#include "curvad/random.hpp"
#include "curvad/recon_toy.hpp"
#include "curvad/scoring.hpp"
#include "curvad/synth.hpp"
#include "run_config.hpp"
#include "text_util.hpp"

namespace curvad::cli {
namespace {

namespace fs = std::filesystem;
using detail::format_double;

struct Key {
    std::string name;
    std::string default_value;
    std::string help;
    bool is_flag = false;
};

struct Command {
    std::string name;
    std::string description;
    std::vector<Key> keys;
    std::function<int(const RunConfig&, std::ostream&, std::ostream&)> handler;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

fs::path prepare_out_dir(const RunConfig& cfg) {
    const fs::path dir = cfg.str("out-dir");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    cfg.write(dir / "run.cfg");
    return dir;
}

fs::path require_path(const RunConfig& cfg, const std::string& key) {
    if (!cfg.has(key)) throw UsageError("--" + key + " is required");
    return cfg.str(key);
}

CloudFormat resolve_format(const RunConfig& cfg, const fs::path& path) {
    const std::string& f = cfg.str("format");
    return f == "auto" ? format_from_extension(path) : parse_cloud_format(f);
}

PointCloud load_input(const RunConfig& cfg) {
    const fs::path input = require_path(cfg, "input");
    if (!fs::exists(input)) throw IoError("input file not found: '" + input.string() + "'");
    PointCloud cloud = load_cloud(input, resolve_format(cfg, input));
    if (cfg.flag("normalize")) cloud = normalize_cloud(cloud).first;
    return cloud;
}

std::string extension_for(CloudFormat f) {
    switch (f) {
        case CloudFormat::Ply: return ".ply";
        case CloudFormat::Csv: return ".csv";
        case CloudFormat::XyzAscii: return ".xyz";
    }
    return ".xyz";
}

std::string scores_csv(const std::vector<double>& scores) {
    std::string out = "index,score\n";
    for (std::size_t i = 0; i < scores.size(); ++i) out += std::to_string(i) + "," + format_double(scores[i]) + "\n";
    return out;
}

PseudoAnomalyConfig synth_config(const RunConfig& cfg) {
    PseudoAnomalyConfig s;
    s.num_patches = cfg.count("num-patches");
    s.max_selected = cfg.count("max-selected");
    s.displacement_lo = cfg.number("disp-lo");
    s.displacement_hi = cfg.number("disp-hi");
    s.normal_k = cfg.count("normal-k");
    return s;
}

const std::vector<Key> kSynthKeys = {
    {"num-patches", "64", "patches in the partition"},
    {"max-selected", "3", "displace 1..max-selected patches"},
    {"disp-lo", "0.01", "minimum displacement, fraction of the bounding-box diagonal"},
    {"disp-hi", "0.05", "maximum displacement, fraction of the bounding-box diagonal"},
    {"normal-k", "16", "neighborhood size for normals"},
};

std::vector<Key> with_keys(std::vector<Key> keys, const std::vector<Key>& more) {
    keys.insert(keys.end(), more.begin(), more.end());
    return keys;
}

toy::TrainConfig train_config(const RunConfig& cfg) {
    toy::TrainConfig t;
    t.ks = cfg.counts("ks");
    t.learning_rate = cfg.number("lr");
    t.epochs = cfg.count("epochs");
    t.lr_decay_factor = cfg.number("decay-factor");
    t.lr_decay_interval = cfg.count("decay-interval");
    t.batch_size = cfg.count("batch");
    t.hidden = cfg.count("hidden");
    t.seed = cfg.seed("seed");
    return t;
}

const std::vector<Key> kTrainKeys = {
    {"ks", "8,16,32", "curvature prompt scales"},
    {"lr", "0.01", "Adam learning rate"},
    {"epochs", "200", "pretraining epochs"},
    {"decay-factor", "0.5", "learning-rate decay factor"},
    {"decay-interval", "50", "epochs between learning-rate decays"},
    {"batch", "1", "clouds per optimizer step"},
    {"hidden", "64", "hidden width"},
    {"finetune-epochs", "60", "classifier fine-tuning epochs (0 skips fine-tuning)"},
    {"pseudo-per-cloud", "4", "pseudo-anomalous copies per training cloud"},
};

// --- curvature -------------------------------------------------------------

int cmd_curvature(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const PointCloud cloud = load_input(cfg);
    const CurvatureMode mode = parse_curvature_mode(cfg.str("mode"));
    const double eps = cfg.number("eps");
    std::string csv;
    if (cfg.has("ks")) {
        const auto ks = cfg.counts("ks");
        const auto ms = multi_scale_curvature(cloud, ks, mode, eps);
        csv = "index";
        for (auto k : ks) csv += ",k" + std::to_string(k);
        csv += "\n";
        for (std::size_t i = 0; i < ms.n; ++i) {
            csv += std::to_string(i);
            for (std::size_t s = 0; s < ks.size(); ++s) csv += "," + format_double(ms.at(i, s));
            csv += "\n";
        }
    } else {
        const auto field = curvature_field(cloud, cfg.count("k"), mode, eps);
        csv = "index,value\n";
        for (std::size_t i = 0; i < field.values.size(); ++i) {
            csv += std::to_string(i) + "," + format_double(field.values[i]) + "\n";
        }
    }
    const fs::path dir = prepare_out_dir(cfg);
    write_text(dir / "curvature.csv", csv);
    out << "wrote " << (dir / "curvature.csv").string() << " (" << cloud.size() << " points)\n";
    return kExitOk;
}

// --- detect ----------------------------------------------------------------

int cmd_detect(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const std::string method = cfg.str("method");
    if (method != "curvature" && method != "classifier") {
        throw UsageError("--method must be curvature or classifier");
    }
    if (method == "classifier" && !cfg.has("model")) {
        throw UsageError("--method classifier requires --model");
    }
    const PointCloud cloud = load_input(cfg);
    const double rate = cfg.number("r");
    std::vector<double> scores;
    if (method == "curvature") {
        const auto field = curvature_field(cloud, cfg.count("k"), parse_curvature_mode(cfg.str("mode")),
                                           cfg.number("eps"));
        scores = curvature_score(field);
    } else {
        const auto model = toy::load_model(cfg.str("model"));
        scores = logit_score(toy::predict_probabilities(model.params, cloud, model.cfg), cfg.number("logit-eps"));
    }
    const AnomalyScoreSet set = make_score_set(std::move(scores), rate);
    const std::string cloud_id = fs::path(cfg.str("input")).stem().string();
    const fs::path dir = prepare_out_dir(cfg);
    write_text(dir / "scores.csv", scores_csv(set.point_scores));
    write_text(dir / "object_score.csv", "cloud_id,score\n" + cloud_id + "," + format_double(set.object_score) + "\n");
    out << "object_score=" << format_double(set.object_score) << "\n";
    if (cfg.has("labels")) {
        const LabelSet labels = load_labels(cfg.str("labels"), cloud.size());
        out << "p_auroc=" << format_double(auroc(set.point_scores, labels.values())) << "\n";
    }
    return kExitOk;
}

// --- synth -----------------------------------------------------------------

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    Rng rng(cfg.seed("seed"));
    const std::uint64_t shape_seed = rng.fork();
    const std::uint64_t anomaly_seed = rng.fork();
    PointCloud base = cfg.has("input")
                          ? load_input(cfg)
                          : make_shape(parse_shape_kind(cfg.str("shape")), cfg.count("n"), cfg.number("noise"),
                                       shape_seed);
    const CloudFormat fmt = parse_cloud_format(cfg.str("output-format"));
    LabeledCloud result{base, LabelSet(base.size(), 0), {}};
    if (!cfg.flag("clean")) {
        PseudoAnomalyConfig s = synth_config(cfg);
        s.seed = anomaly_seed;
        result = generate_pseudo_anomaly(base, s);
    } else {
        result.provenance.seed = anomaly_seed;
        result.provenance.diagonal = bounding_diagonal(base);
    }
    const fs::path dir = prepare_out_dir(cfg);
    const fs::path cloud_path = dir / ("cloud" + extension_for(fmt));
    save_cloud(result.cloud, cloud_path, fmt);
    save_labels(result.labels, dir / "labels.txt");
    write_text(dir / "provenance.txt", result.provenance.to_text());
    out << "wrote " << cloud_path.string() << " with " << result.labels.count_anomalous() << " of "
        << result.cloud.size() << " points displaced\n";
    return kExitOk;
}

// --- eval ------------------------------------------------------------------

std::vector<double> read_scores(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<double> scores;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("index", 0) == 0)) continue;
        const auto comma = line.find(',');
        double v = 0.0;
        std::size_t idx = 0;
        const char* b = line.data();
        const auto r1 = std::from_chars(b, b + (comma == std::string::npos ? 0 : comma), idx);
        const auto r2 = comma == std::string::npos
                            ? std::from_chars_result{b, std::errc::invalid_argument}
                            : std::from_chars(b + comma + 1, b + line.size(), v);
        if (comma == std::string::npos || r1.ec != std::errc() || r2.ec != std::errc() ||
            r2.ptr != b + line.size() || idx != scores.size()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 'index,score' in order");
        }
        scores.push_back(v);
    }
    return scores;
}

struct ManifestEntry {
    std::string id;
    std::string category;
    std::uint8_t label = 0;
};

std::vector<ManifestEntry> read_manifest(const fs::path& dir) {
    const fs::path path = dir / "objects.csv";
    std::ifstream in(path);
    if (!in) throw ManifestError("missing manifest '" + path.string() + "'");
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.rfind("cloud_id", 0) == 0)) continue;
        std::stringstream ss(line);
        ManifestEntry e;
        std::string label;
        if (!std::getline(ss, e.id, ',') || !std::getline(ss, e.category, ',') || !std::getline(ss, label) ||
            (label != "0" && label != "1")) {
            throw ManifestError(path.string() + ":" + std::to_string(line_no) +
                                ": expected 'cloud_id,category,object_label'");
        }
        e.label = label == "1" ? 1 : 0;
        entries.push_back(e);
    }
    return entries;
}

std::vector<CloudEvaluation> read_eval_dir(const fs::path& dir, double rate) {
    if (!fs::is_directory(dir)) throw IoError("evaluation directory not found: '" + dir.string() + "'");
    const auto entries = read_manifest(dir);
    std::set<std::string> listed;
    for (const auto& e : entries) listed.insert(e.id);
    std::vector<std::string> offenders;
    for (const auto& e : entries) {
        if (!fs::exists(dir / (e.id + ".scores.csv"))) offenders.push_back(e.id + ".scores.csv (missing)");
        if (!fs::exists(dir / (e.id + ".labels.txt"))) offenders.push_back(e.id + ".labels.txt (missing)");
    }
    std::vector<std::string> names;
    for (const auto& f : fs::directory_iterator(dir)) names.push_back(f.path().filename().string());
    std::sort(names.begin(), names.end());
    for (const auto& name : names) {
        for (const std::string suffix : {".scores.csv", ".labels.txt"}) {
            if (name.size() > suffix.size() && name.ends_with(suffix) &&
                !listed.count(name.substr(0, name.size() - suffix.size()))) {
                offenders.push_back(name + " (not in manifest)");
            }
        }
    }
    if (!offenders.empty()) {
        std::string msg = "unpaired evaluation files:";
        for (const auto& o : offenders) msg += "\n  " + o;
        throw ManifestError(msg);
    }
    std::vector<CloudEvaluation> evals;
    for (const auto& e : entries) {
        auto scores = read_scores(dir / (e.id + ".scores.csv"));
        LabelSet labels = load_labels(dir / (e.id + ".labels.txt"), scores.size());
        evals.push_back({e.id, e.category, make_score_set(std::move(scores), rate), std::move(labels), e.label});
    }
    return evals;
}

void write_eval_dir(const fs::path& dir, std::span<const CloudEvaluation> evals) {
    fs::create_directories(dir);
    std::string manifest = "cloud_id,category,object_label\n";
    for (const auto& e : evals) {
        manifest += e.cloud_id + "," + e.category + "," + std::to_string(e.object_label) + "\n";
        write_text(dir / (e.cloud_id + ".scores.csv"), scores_csv(e.scores.point_scores));
        save_labels(e.point_labels, dir / (e.cloud_id + ".labels.txt"));
    }
    write_text(dir / "objects.csv", manifest);
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    const double rate = cfg.number("r");
    const std::size_t bench = cfg.count("benchmark");
    if (bench == 0 && !cfg.has("dir")) throw UsageError("--dir or --benchmark is required");
    const fs::path dir = prepare_out_dir(cfg);
    fs::path eval_dir = cfg.has("dir") ? fs::path(cfg.str("dir")) : fs::path();
    if (bench > 0) {
        PseudoAnomalyConfig s = synth_config(cfg);
        const auto clouds = make_synthetic_benchmark(parse_shape_kind(cfg.str("shape")), bench, bench,
                                                     cfg.count("n"), cfg.number("noise"), s, cfg.seed("seed"));
        const auto scored = score_with_curvature(clouds, cfg.count("k"), parse_curvature_mode(cfg.str("mode")),
                                                 cfg.number("eps"), rate);
        eval_dir = dir / "benchmark";
        write_eval_dir(eval_dir, scored);
    }
    const auto evals = read_eval_dir(eval_dir, rate);
    const DatasetMetrics m = evaluate_dataset(evals);
    write_text(dir / "metrics.csv", m.to_csv());
    write_text(dir / "metrics.txt", m.to_table());
    out << m.to_table();
    return kExitOk;
}

// --- recon -----------------------------------------------------------------

int cmd_recon(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    toy::TrainConfig t = toy::apply_variant(train_config(cfg), toy::parse_variant(cfg.str("variant")));
    if (cfg.has("mask")) t.mask_ratio = cfg.number("mask");
    Rng rng(cfg.seed("seed"));
    std::vector<PointCloud> clouds;
    if (cfg.has("inputs")) {
        for (const auto& p : cfg.strings("inputs")) {
            if (!fs::exists(p)) throw IoError("input file not found: '" + p + "'");
            clouds.push_back(load_cloud(p, format_from_extension(p)));
        }
    } else {
        const ShapeKind shape = parse_shape_kind(cfg.str("shape"));
        for (std::size_t i = 0; i < cfg.count("clouds"); ++i) {
            clouds.push_back(make_shape(shape, cfg.count("n"), cfg.number("noise"), rng.fork()));
        }
    }
    const toy::TrainResult pre = toy::train_reconstruction(clouds, t);
    std::string curve = "phase,epoch,loss\n";
    for (std::size_t e = 0; e < pre.loss_curve.size(); ++e) {
        curve += "pretrain," + std::to_string(e + 1) + "," + format_double(pre.loss_curve[e]) + "\n";
    }
    toy::ToyModelParams params = pre.params;
    const std::size_t ft_epochs = cfg.count("finetune-epochs");
    if (ft_epochs > 0) {
        std::vector<LabeledCloud> labeled;
        PseudoAnomalyConfig s = synth_config(cfg);
        for (const auto& c : clouds) {
            for (std::size_t j = 0; j < cfg.count("pseudo-per-cloud"); ++j) {
                s.seed = rng.fork();
                labeled.push_back(generate_pseudo_anomaly(c, s));
            }
        }
        const toy::TrainResult fine = toy::finetune_classifier(pre.params, labeled, t, ft_epochs);
        for (std::size_t e = 0; e < fine.loss_curve.size(); ++e) {
            curve += "finetune," + std::to_string(e + 1) + "," + format_double(fine.loss_curve[e]) + "\n";
        }
        params = fine.params;
    }
    const fs::path dir = prepare_out_dir(cfg);
    toy::save_model(params, t, dir / "model.bin",
                    {{"variant", cfg.str("variant")}, {"finetuned", ft_epochs > 0 ? "1" : "0"}});
    write_text(dir / "loss_curve.csv", curve);
    out << "initial_loss=" << format_double(pre.loss_curve.front())
        << " final_loss=" << format_double(pre.loss_curve.back()) << "\n";
    out << "wrote " << (dir / "model.bin").string() << "\n";
    return kExitOk;
}

// --- ablate ----------------------------------------------------------------

int cmd_ablate(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    toy::BenchmarkSettings bench;
    bench.shape = parse_shape_kind(cfg.str("shape"));
    bench.points = cfg.count("n");
    bench.noise_sigma = cfg.number("noise");
    bench.train_clouds = cfg.count("train-clouds");
    bench.pseudo_per_cloud = cfg.count("pseudo-per-cloud");
    bench.eval_clouds = cfg.count("eval-clouds");
    bench.finetune_epochs = cfg.count("finetune-epochs");
    bench.rate = cfg.number("r");
    bench.synth = synth_config(cfg);
    bench.train = train_config(cfg);
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = 0; i < cfg.count("seeds"); ++i) seeds.push_back(cfg.seed("seed") + i);
    if (seeds.empty()) throw UsageError("--seeds must be at least 1");

    const fs::path dir = prepare_out_dir(cfg);
    std::vector<toy::AblationVariant> variants;
    for (const auto& v : cfg.strings("variants")) variants.push_back(toy::parse_variant(v));
    if (!variants.empty()) {
        const auto report = toy::run_ablation(variants, seeds, bench);
        write_text(dir / "ablation.csv", report.to_csv());
        write_text(dir / "ablation.txt", report.to_table());
        out << report.to_table();
    }
    const auto ratios = cfg.numbers("mask-sweep");
    if (!ratios.empty()) {
        const auto sweep = toy::run_mask_sweep(ratios, seeds, bench);
        write_text(dir / "mask_sweep.csv", sweep.to_csv());
        write_text(dir / "mask_sweep.txt", sweep.to_table());
        out << sweep.to_table();
    }
    return kExitOk;
}

std::vector<Command> commands() {
    const Key out_dir{"out-dir", "curvad_out", "output directory"};
    const Key input{"input", "", "input cloud file"};
    const Key format{"format", "auto", "input format: auto, xyz, ply, csv"};
    const Key normalize{"normalize", "0", "normalize the input cloud first", true};
    const Key k{"k", "16", "neighborhood size"};
    const Key mode{"mode", "variation", "curvature mode: variation or literal"};
    const Key eps{"eps", "1e-12", "curvature denominator guard"};
    const Key rate{"r", "0.01", "top-k aggregation rate"};
    const Key seed{"seed", "0", "random seed"};
    const Key shape{"shape", "sphere", "sphere, plane, torus, cylinder"};
    const Key noise{"noise", "0", "Gaussian jitter sigma"};
    return {
        {"curvature", "Per-point curvature as csv",
         {out_dir, input, format, normalize, k, {"ks", "", "comma-separated scales; overrides --k"}, mode, eps},
         cmd_curvature},
        {"detect", "Per-point anomaly scores and the object score",
         {out_dir, input, format, normalize, k, mode, eps, rate,
          {"method", "curvature", "curvature or classifier"},
          {"model", "", "model file for --method classifier"},
          {"logit-eps", "1e-8", "log-ratio guard"},
          {"labels", "", "optional label file; reports P-AUROC"}},
         cmd_detect},
        {"synth", "Generate a shape and a pseudo-anomalous copy",
         with_keys({out_dir, seed, shape, noise, {"n", "2048", "point count"},
                    {"input", "", "perturb this cloud instead of a generated shape"}, format, normalize,
                    {"output-format", "xyz", "xyz, ply, csv"},
                    {"clean", "0", "write the shape without an anomaly", true}},
                   kSynthKeys),
         cmd_synth},
        {"eval", "O-AUROC and P-AUROC over a directory of scored clouds",
         with_keys({out_dir, rate, seed, shape, noise, k, mode, eps,
                    {"dir", "", "directory with objects.csv, <id>.scores.csv, <id>.labels.txt"},
                    {"benchmark", "0", "generate and score this many anomalous and clean clouds"},
                    {"n", "2048", "points per benchmark cloud"}},
                   kSynthKeys),
         cmd_eval},
        {"recon", "Pretrain (and fine-tune) the curvature-prompted reconstruction model",
         with_keys(with_keys({out_dir, seed, shape, noise, {"variant", "D", "A, B, C or D"},
                              {"mask", "", "override the variant's mask ratio"},
                              {"inputs", "", "comma-separated training cloud files"},
                              {"clouds", "4", "generated training clouds"},
                              {"n", "1024", "points per generated cloud"}},
                             kTrainKeys),
                   kSynthKeys),
         cmd_recon},
        {"ablate", "Masking / prompt ablation and mask-ratio sweep",
         with_keys(with_keys({out_dir, seed, shape, noise, rate, {"variants", "A,B,C,D", "variants to run"},
                              {"seeds", "5", "number of seeds (seed, seed+1, ...)"},
                              {"mask-sweep", "", "comma-separated mask ratios for the sweep"},
                              {"n", "1024", "points per cloud"},
                              {"train-clouds", "4", "normal training clouds"},
                              {"eval-clouds", "10", "held-out anomalous and clean clouds each"}},
                             kTrainKeys),
                   kSynthKeys),
         cmd_ablate},
    };
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::UndefinedMetric:
        case ErrorKind::Training: return kExitComputation;
        default: return kExitUsage;
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"curvad: curvature-based point cloud anomaly detection"};
    app.require_subcommand(1);
    const auto cmds = commands();
    std::map<std::string, std::map<std::string, std::string>> raw;
    std::map<std::string, std::map<std::string, CLI::Option*>> opts;
    std::map<std::string, std::string> config_paths;
    std::map<std::string, CLI::App*> subs;
    for (const auto& c : cmds) {
        CLI::App* sub = app.add_subcommand(c.name, c.description);
        subs[c.name] = sub;
        sub->add_option("--config", config_paths[c.name], "key=value config file; flags take precedence");
        for (const auto& key : c.keys) {
            std::string help = key.help;
            if (!key.default_value.empty()) help += " [" + key.default_value + "]";
            if (key.is_flag) {
                opts[c.name][key.name] = sub->add_flag("--" + key.name, help);
            } else {
                opts[c.name][key.name] = sub->add_option("--" + key.name, raw[c.name][key.name], help);
            }
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    for (const auto& c : cmds) {
        if (!subs[c.name]->parsed()) continue;
        try {
            RunConfig cfg;
            for (const auto& key : c.keys) cfg.declare(key.name, key.default_value, key.help);
            if (!config_paths[c.name].empty()) cfg.load_file(config_paths[c.name]);
            for (const auto& key : c.keys) {
                if (opts[c.name][key.name]->count() == 0) continue;
                cfg.set(key.name, key.is_flag ? "1" : raw[c.name][key.name]);
            }
            return c.handler(cfg, out, err);
        } catch (const Error& e) {
            err << "curvad " << c.name << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
            return exit_code_for(e.kind());
        } catch (const std::exception& e) {
            err << "curvad " << c.name << ": " << e.what() << "\n";
            return kExitComputation;
        }
    }
    return kExitUsage;
}

}  // namespace curvad::cli
