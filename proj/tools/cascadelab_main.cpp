// cascadelab — command-line laboratory for synthetic cascade generation,
// ingestion, featurization, model training, and the experiment drivers.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "cascadelab/cascade_io.hpp"
#include "cascadelab/config.hpp"
#include "cascadelab/diffusion.hpp"
#include "cascadelab/features.hpp"
#include "cascadelab/harness.hpp"
#include "cascadelab/model_io.hpp"
#include "cascadelab/netgen.hpp"

namespace fs = std::filesystem;
using namespace cascadelab;

namespace {

std::uint64_t env_master_seed() {
    if (const char* env = std::getenv("CASCADELAB_SEED")) {
        std::uint64_t v = 0;
        if (parse_int(std::string_view(env), v)) return v;
    }
    return 0;
}

// Every run records its resolved configuration next to its outputs.
void write_run_config(const ConfigFile& resolved, const fs::path& out,
                      bool out_is_directory) {
    if (out_is_directory)
        resolved.write(out / "run_config.txt");
    else
        resolved.write(fs::path(out.string() + ".run.cfg"));
}

std::vector<std::string> split_csv_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        if (next > pos) out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

// ---- gen-net ----

struct GenNetArgs {
    std::string model = "ba";
    NetGenConfig cfg;
    std::string out;
};

int run_gen_net(const GenNetArgs& args) {
    NetGenConfig cfg = args.cfg;
    const auto model = net_model_from_string(args.model);
    if (!model) throw InvalidConfigError("unknown network model '" + args.model + "'");
    cfg.model = *model;
    const Network net = generate(cfg);
    save_network(net, args.out);

    ConfigFile resolved;
    resolved.set("run", "command", "gen-net");
    resolved.set("netgen", "model", args.model);
    resolved.set("netgen", "node_count", std::to_string(cfg.node_count));
    resolved.set("netgen", "ba_m", std::to_string(cfg.ba_m));
    resolved.set("netgen", "ws_k", std::to_string(cfg.ws_k));
    resolved.set("netgen", "ws_beta", format_double(cfg.ws_beta));
    resolved.set("netgen", "lfr_gamma", format_double(cfg.lfr_gamma));
    resolved.set("netgen", "lfr_beta_c", format_double(cfg.lfr_beta_c));
    resolved.set("netgen", "lfr_mu", format_double(cfg.lfr_mu));
    resolved.set("netgen", "lfr_avg_deg", format_double(cfg.lfr_avg_deg));
    resolved.set("netgen", "lfr_max_deg", std::to_string(cfg.lfr_max_deg));
    resolved.set("netgen", "lfr_min_comm", std::to_string(cfg.lfr_min_comm));
    resolved.set("netgen", "lfr_max_comm", std::to_string(cfg.lfr_max_comm));
    resolved.set("netgen", "lfr_max_iters", std::to_string(cfg.lfr_max_iters));
    resolved.set("netgen", "seed", std::to_string(cfg.seed));
    write_run_config(resolved, args.out, false);
    std::cerr << "gen-net: wrote " << net.edge_count() << " edges to " << args.out << "\n";
    return 0;
}

// ---- simulate ----

struct SimulateArgs {
    std::string net_path;
    std::string model = "ic";
    DiffusionConfig cfg;
    std::size_t count = 100;
    unsigned threads = 1;
    std::string out;
};

int run_simulate(const SimulateArgs& args) {
    DiffusionConfig cfg = args.cfg;
    const auto model = diffusion_model_from_string(args.model);
    if (!model) throw InvalidConfigError("unknown diffusion model '" + args.model + "'");
    cfg.model = *model;
    const Network net = load_network(args.net_path);
    const auto cascades = generate_dataset(net, cfg, args.count, args.threads);
    serialize_cascades(cascades, args.out);

    ConfigFile resolved;
    resolved.set("run", "command", "simulate");
    resolved.set("diffusion", "net", args.net_path);
    resolved.set("diffusion", "model", args.model);
    resolved.set("diffusion", "ic_p", format_double(cfg.ic_p));
    resolved.set("diffusion", "lt_threshold", format_double(cfg.lt_threshold));
    resolved.set("diffusion", "profile_q", format_double(cfg.profile_q));
    resolved.set("diffusion", "min_size", std::to_string(cfg.min_size));
    resolved.set("diffusion", "max_size", std::to_string(cfg.max_size));
    resolved.set("diffusion", "count", std::to_string(args.count));
    resolved.set("diffusion", "seed", std::to_string(cfg.seed));
    write_run_config(resolved, args.out, false);
    std::cerr << "simulate: wrote " << cascades.size() << " cascades to " << args.out << "\n";
    return 0;
}

// ---- build-group ----

struct BuildGroupArgs {
    std::string name = "group";
    std::vector<std::string> sources;  // FILE:CLASS
    std::size_t per_class = 0;
    std::uint64_t seed = 0;
    std::string out;
};

int run_build_group(const BuildGroupArgs& args) {
    GroupSpec spec;
    spec.name = args.name;
    spec.per_class_count = args.per_class;
    spec.seed = args.seed;
    for (const auto& s : args.sources) {
        const std::size_t colon = s.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 >= s.size())
            throw InvalidConfigError("--source expects FILE:CLASS, got '" + s + "'");
        spec.sources.emplace_back(s.substr(0, colon), s.substr(colon + 1));
    }
    const GroupDataset group = build_group(spec);

    std::vector<Cascade> cascades;
    std::vector<std::pair<std::string, std::string>> labels;
    for (const auto& item : group.items) {
        cascades.push_back(item.cascade);
        labels.emplace_back(item.cascade.cascade_id, group.class_names[item.label]);
    }
    serialize_cascades(cascades, args.out);
    fs::path sidecar(args.out);
    sidecar.replace_extension(".labels.csv");
    write_label_sidecar(labels, sidecar);

    ConfigFile resolved;
    resolved.set("run", "command", "build-group");
    resolved.set("group", "name", args.name);
    resolved.set("group", "per_class_count", std::to_string(args.per_class));
    resolved.set("group", "seed", std::to_string(args.seed));
    for (std::size_t i = 0; i < args.sources.size(); ++i)
        resolved.set("group", "source_" + std::to_string(i), args.sources[i]);
    write_run_config(resolved, args.out, false);
    std::cerr << "build-group: " << group.items.size() << " cascades, "
              << group.class_names.size() << " classes\n";
    return 0;
}

// ---- featurize ----

struct FeaturizeArgs {
    std::string cascades_path;
    std::string labels_path;
    double max_steps = 100.0;
    double max_time = 31536000.0;
    std::string out;
};

int run_featurize(const FeaturizeArgs& args) {
    const auto cascades = parse_cascades(args.cascades_path);
    std::map<std::string, std::string> label_of;
    if (!args.labels_path.empty())
        for (const auto& [id, cls] : read_label_sidecar(args.labels_path)) label_of[id] = cls;

    const ObservationWindow window{args.max_steps, args.max_time};
    std::string csv = feature_csv_header() + "\n";
    for (const Cascade& c : cascades) {
        const FeatureVector f = graph_features(build_graph(c, window));
        const auto it = label_of.find(c.cascade_id);
        csv += feature_csv_row(c.cascade_id, it == label_of.end() ? "" : it->second, f) + "\n";
    }
    write_file_atomic(args.out, csv);

    ConfigFile resolved;
    resolved.set("run", "command", "featurize");
    resolved.set("featurize", "cascades", args.cascades_path);
    resolved.set("featurize", "labels", args.labels_path);
    resolved.set("window", "max_steps", format_double(args.max_steps));
    resolved.set("window", "max_time", format_double(args.max_time));
    write_run_config(resolved, args.out, false);
    std::cerr << "featurize: " << cascades.size() << " rows -> " << args.out << "\n";
    return 0;
}

// ---- shared training data assembly ----

struct LabeledSet {
    GroupDataset group;
    ObservationWindow window;
};

LabeledSet load_labeled_set(const std::string& cascades_path, const std::string& labels_path,
                            double max_steps, double max_time) {
    LabeledSet set;
    set.window = ObservationWindow{max_steps, max_time};
    const auto cascades = parse_cascades(cascades_path);
    std::map<std::string, std::string> label_of;
    for (const auto& [id, cls] : read_label_sidecar(labels_path)) label_of[id] = cls;

    std::map<std::string, int> class_index;
    for (const auto& [id, cls] : label_of)
        if (!class_index.count(cls)) {
            const int idx = static_cast<int>(class_index.size());
            class_index[cls] = idx;
        }
    set.group.name = fs::path(cascades_path).stem().string();
    set.group.class_names.resize(class_index.size());
    for (const auto& [cls, idx] : class_index) set.group.class_names[idx] = cls;
    for (const Cascade& c : cascades) {
        const auto it = label_of.find(c.cascade_id);
        if (it == label_of.end())
            throw InvalidConfigError("cascade '" + c.cascade_id + "' missing from sidecar");
        set.group.items.push_back({c, class_index.at(it->second)});
    }
    return set;
}

// ---- train ----

struct TrainArgs {
    std::string algo = "rf";
    std::string cascades_path;
    std::string labels_path;
    double max_steps = 100.0;
    double max_time = 31536000.0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
};

int run_train(const TrainArgs& args) {
    const auto algo = algo_from_string(args.algo);
    if (!algo) throw InvalidConfigError("unknown algorithm '" + args.algo + "'");
    const LabeledSet set =
        load_labeled_set(args.cascades_path, args.labels_path, args.max_steps, args.max_time);

    ExperimentSpecs specs;
    specs.master_seed = args.seed;
    specs.threads = args.threads;
    specs.window = set.window;

    const SplitIndices idx = split_dataset(set.group, [&] {
        SplitSpec s = specs.split;
        s.seed = derive_seed(args.seed, "split-" + set.group.name);
        return s;
    }());
    const int n_classes = static_cast<int>(set.group.class_names.size());
    const detail::PreparedGroup data = detail::prepare_group(set.group, set.window);

    SavedModel saved;
    saved.class_names = set.group.class_names;
    if (*algo == Algo::random_forest || *algo == Algo::gbt) {
        FeatureRows x_train, x_val;
        std::vector<int> y_train, y_val;
        for (const std::size_t i : idx.train) {
            x_train.push_back(data.tree_features[i]);
            y_train.push_back(data.labels[i]);
        }
        for (const std::size_t i : idx.val) {
            x_val.push_back(data.tree_features[i]);
            y_val.push_back(data.labels[i]);
        }
        TrainSpec spec;
        spec.seed = derive_seed(args.seed, args.algo);
        if (*algo == Algo::random_forest) {
            saved.algo = "random_forest";
            saved.model = train_random_forest(x_train, y_train, n_classes, spec, args.threads);
        } else {
            saved.algo = "gbt";
            saved.model = train_gbt(x_train, y_train, x_val, y_val, n_classes, spec);
        }
    } else if (*algo == Algo::gcn) {
        std::vector<Matrix> raw;
        for (const std::size_t i : idx.train)
            raw.push_back(raw_node_feature_matrix(data.graphs[i], set.window));
        FeatureScaler scaler;
        scaler.fit(raw);
        const auto train = detail::prepare_indexed(data, idx.train, set.window, scaler);
        const auto val = detail::prepare_indexed(data, idx.val, set.window, scaler);
        TrainSpec spec;
        spec.batch_size = 5;
        spec.epochs = 20;
        spec.learning_rate = 0.01;
        spec.seed = derive_seed(args.seed, "gcn");
        saved.algo = "gcn";
        saved.model = train_gcn(train, val, n_classes, spec, scaler, set.group.class_names);
    } else {
        std::vector<CascadeGraph> pool, train_graphs, val_graphs;
        std::vector<int> train_labels, val_labels;
        std::vector<std::string> train_ids, pool_ids;
        for (const std::size_t i : idx.train) {
            pool.push_back(data.graphs[i]);
            pool_ids.push_back(data.ids[i]);
            train_graphs.push_back(data.graphs[i]);
            train_labels.push_back(data.labels[i]);
            train_ids.push_back(data.ids[i]);
        }
        for (const std::size_t i : idx.val) {
            val_graphs.push_back(data.graphs[i]);
            val_labels.push_back(data.labels[i]);
        }
        ContrastiveSpec spec;
        spec.seed = derive_seed(args.seed, "contrastive");
        AugmentConfig aug;
        saved.algo = "contrastive";
        ContrastiveClassifier model = run_contrastive_pipeline(
            pool, train_graphs, train_labels, train_ids, val_graphs, val_labels, pool_ids,
            n_classes, spec, aug, set.window, set.group.class_names);
        saved.phase = model.phase;
        saved.model = std::move(model);
    }
    save_model(saved, args.out);

    ConfigFile resolved;
    resolved.set("run", "command", "train");
    resolved.set("train", "algo", args.algo);
    resolved.set("train", "cascades", args.cascades_path);
    resolved.set("train", "labels", args.labels_path);
    resolved.set("train", "seed", std::to_string(args.seed));
    write_run_config(resolved, args.out, false);
    std::cerr << "train: saved " << saved.algo << " model to " << args.out << "\n";
    return 0;
}

// ---- eval ----

struct EvalArgs {
    std::string model_path;
    std::string cascades_path;
    std::string labels_path;
    double max_steps = 100.0;
    double max_time = 31536000.0;
    std::string out;
};

int run_eval(const EvalArgs& args) {
    const SavedModel saved = load_model(args.model_path);
    const LabeledSet set =
        load_labeled_set(args.cascades_path, args.labels_path, args.max_steps, args.max_time);

    // map sidecar classes onto the model's class order
    std::map<std::string, int> model_class;
    for (std::size_t i = 0; i < saved.class_names.size(); ++i)
        model_class[saved.class_names[i]] = static_cast<int>(i);

    std::vector<int> predictions, truths;
    for (const auto& item : set.group.items) {
        const auto it = model_class.find(set.group.class_names[item.label]);
        if (it == model_class.end())
            throw InvalidConfigError("class '" + set.group.class_names[item.label] +
                                     "' unknown to the model");
        truths.push_back(it->second);
        const CascadeGraph g = build_graph(item.cascade, set.window);
        if (const auto* forest = std::get_if<ForestModel>(&saved.model)) {
            predictions.push_back(predict_class(*forest, graph_features(g).as_row()));
        } else if (const auto* gbt = std::get_if<GbtModel>(&saved.model)) {
            predictions.push_back(predict_class(*gbt, graph_features(g).as_row()));
        } else if (const auto* gcn = std::get_if<GcnModel>(&saved.model)) {
            predictions.push_back(predict_class(*gcn, prepare_graph(g, set.window, &gcn->scaler)));
        } else if (const auto* cc = std::get_if<ContrastiveClassifier>(&saved.model)) {
            predictions.push_back(predict_class(*cc, prepare_graph(g, set.window, &cc->scaler)));
        } else {
            throw InvalidConfigError("encoder checkpoints cannot be evaluated directly");
        }
    }
    EvalReport report = macro_f1(predictions, truths, saved.class_names);
    report.group = set.group.name;
    report.algo = saved.algo;
    write_report_json(report, args.out);

    ConfigFile resolved;
    resolved.set("run", "command", "eval");
    resolved.set("eval", "model", args.model_path);
    resolved.set("eval", "cascades", args.cascades_path);
    write_run_config(resolved, args.out, false);
    std::cerr << "eval: macro_f1 = " << format_double(report.macro_f1) << "\n";
    return 0;
}

// ---- experiment configuration ----

struct ExperimentConfig {
    NetGenConfig net;
    DiffusionConfig diff;
    std::size_t cascades_per_source = 600;
    std::size_t per_class_count = 600;
    ExperimentSpecs specs;
    std::vector<std::string> tasks{"diffusion", "network"};
    std::vector<Algo> algos{Algo::random_forest, Algo::gbt, Algo::gcn, Algo::contrastive};
    // label-fraction settings
    std::string lf_group = "ws";
    std::string lf_external = "lfr";
    std::vector<double> lf_fractions{0.1, 0.2, 0.5, 1.0};
    std::vector<PretrainSource> lf_sources{PretrainSource::self_only, PretrainSource::mixed,
                                           PretrainSource::external_only};
    std::size_t lf_seeds = 3;
};

ExperimentConfig load_experiment_config(const ConfigFile& cfg) {
    ExperimentConfig ec;
    ec.net.node_count = cfg.get_int<NodeId>("netgen", "node_count", 1000);
    ec.net.ba_m = cfg.get_int<std::uint32_t>("netgen", "ba_m", 10);
    ec.net.ws_k = cfg.get_int<std::uint32_t>("netgen", "ws_k", 10);
    ec.net.ws_beta = cfg.get_double("netgen", "ws_beta", 0.1);
    ec.net.lfr_gamma = cfg.get_double("netgen", "lfr_gamma", 2.5);
    ec.net.lfr_beta_c = cfg.get_double("netgen", "lfr_beta_c", 1.5);
    ec.net.lfr_mu = cfg.get_double("netgen", "lfr_mu", 0.1);
    ec.net.lfr_avg_deg = cfg.get_double("netgen", "lfr_avg_deg", 10.0);
    ec.net.lfr_max_deg = cfg.get_int<std::uint32_t>("netgen", "lfr_max_deg", 100);
    ec.net.lfr_min_comm = cfg.get_int<std::uint32_t>("netgen", "lfr_min_comm", 100);
    ec.net.lfr_max_comm = cfg.get_int<std::uint32_t>("netgen", "lfr_max_comm", 600);
    ec.net.lfr_max_iters = cfg.get_int<std::uint32_t>("netgen", "lfr_max_iters", 1000);

    ec.diff.ic_p = cfg.get_double("diffusion", "ic_p", 0.1);
    ec.diff.lt_threshold = cfg.get_double("diffusion", "lt_threshold", 0.09);
    ec.diff.profile_q = cfg.get_double("diffusion", "profile_q", 0.3);
    ec.diff.min_size = cfg.get_int<std::size_t>("diffusion", "min_size", 50);
    ec.diff.max_size = cfg.get_int<std::size_t>("diffusion", "max_size", 500);
    ec.cascades_per_source =
        cfg.get_int<std::size_t>("diffusion", "cascades_per_source", 600);
    ec.per_class_count =
        cfg.get_int<std::size_t>("group", "per_class_count", ec.cascades_per_source);

    ec.specs.window.max_steps = cfg.get_double("window", "max_steps", 100.0);
    ec.specs.window.max_time = cfg.get_double("window", "max_time", 31536000.0);
    ec.specs.split.train_fraction = cfg.get_double("split", "train_fraction", 0.6);
    ec.specs.split.val_ratio = cfg.get_double("split", "val_ratio", 1.0 / 6.0);

    ec.specs.tree_spec.n_trees = cfg.get_int<std::size_t>("train", "n_trees", 100);
    ec.specs.tree_spec.boosting_rounds =
        cfg.get_int<std::size_t>("train", "boosting_rounds", 1000);
    ec.specs.tree_spec.early_stopping_patience =
        cfg.get_int<std::size_t>("train", "early_stopping_patience", 10);
    ec.specs.tree_spec.gbt_learning_rate = cfg.get_double("train", "gbt_learning_rate", 0.1);
    ec.specs.tree_spec.gbt_max_depth = cfg.get_int<std::size_t>("train", "gbt_max_depth", 6);
    ec.specs.gcn_spec.batch_size = cfg.get_int<std::size_t>("train", "gcn_batch_size", 5);
    ec.specs.gcn_spec.epochs = cfg.get_int<std::size_t>("train", "gcn_epochs", 20);
    ec.specs.gcn_spec.learning_rate = cfg.get_double("train", "gcn_learning_rate", 0.01);

    ContrastiveSpec& cs = ec.specs.contrastive;
    cs.temperature = cfg.get_double("contrastive", "temperature", 0.5);
    cs.batch_size = cfg.get_int<std::size_t>("contrastive", "batch_size", 64);
    cs.pretrain_epochs = cfg.get_int<std::size_t>("contrastive", "pretrain_epochs", 30);
    cs.finetune_epochs = cfg.get_int<std::size_t>("contrastive", "finetune_epochs", 20);
    cs.distill_epochs = cfg.get_int<std::size_t>("contrastive", "distill_epochs", 20);
    cs.distill_temperature = cfg.get_double("contrastive", "distill_temperature", 2.0);
    cs.distill_alpha = cfg.get_double("contrastive", "distill_alpha", 0.5);
    cs.learning_rate = cfg.get_double("contrastive", "learning_rate", 0.001);
    cs.encoder_width = cfg.get_int<Eigen::Index>("contrastive", "encoder_width", 64);
    cs.projection_hidden = cfg.get_int<Eigen::Index>("contrastive", "projection_hidden", 64);
    cs.projection_dim = cfg.get_int<Eigen::Index>("contrastive", "projection_dim", 32);

    ec.specs.augment.leaf_drop_rate = cfg.get_double("augment", "leaf_drop_rate", 0.1);
    ec.specs.augment.node_add_rate = cfg.get_double("augment", "node_add_rate", 0.1);
    ec.specs.augment.time_jitter = cfg.get_double("augment", "time_jitter", 0.05);

    ec.specs.master_seed = cfg.get_int<std::uint64_t>("experiment", "master_seed", 0);
    ec.specs.threads = cfg.get_int<unsigned>("experiment", "threads", 1);
    if (cfg.has("experiment", "tasks")) ec.tasks = split_csv_list(cfg.get("experiment", "tasks"));
    if (cfg.has("experiment", "algos")) {
        ec.algos.clear();
        for (const auto& name : split_csv_list(cfg.get("experiment", "algos"))) {
            const auto algo = algo_from_string(name);
            if (!algo) throw InvalidConfigError("unknown algorithm '" + name + "' in config");
            ec.algos.push_back(*algo);
        }
    }

    ec.lf_group = cfg.get("label_fraction", "group", "ws");
    ec.lf_external = cfg.get("label_fraction", "external_group", "lfr");
    if (cfg.has("label_fraction", "fractions")) {
        ec.lf_fractions.clear();
        for (const auto& f : split_csv_list(cfg.get("label_fraction", "fractions"))) {
            double v = 0;
            if (!parse_double(f, v))
                throw InvalidConfigError("bad fraction '" + f + "' in config");
            ec.lf_fractions.push_back(v);
        }
    }
    if (cfg.has("label_fraction", "pretrain_sources")) {
        ec.lf_sources.clear();
        for (const auto& s : split_csv_list(cfg.get("label_fraction", "pretrain_sources"))) {
            const auto src = pretrain_source_from_string(s);
            if (!src) throw InvalidConfigError("unknown pretrain source '" + s + "'");
            ec.lf_sources.push_back(*src);
        }
    }
    ec.lf_seeds = cfg.get_int<std::size_t>("label_fraction", "seeds", 3);
    return ec;
}

ConfigFile resolved_experiment_config(const ExperimentConfig& ec, const std::string& command) {
    ConfigFile out;
    out.set("run", "command", command);
    out.set("netgen", "node_count", std::to_string(ec.net.node_count));
    out.set("netgen", "ba_m", std::to_string(ec.net.ba_m));
    out.set("netgen", "ws_k", std::to_string(ec.net.ws_k));
    out.set("netgen", "ws_beta", format_double(ec.net.ws_beta));
    out.set("netgen", "lfr_gamma", format_double(ec.net.lfr_gamma));
    out.set("netgen", "lfr_beta_c", format_double(ec.net.lfr_beta_c));
    out.set("netgen", "lfr_mu", format_double(ec.net.lfr_mu));
    out.set("netgen", "lfr_avg_deg", format_double(ec.net.lfr_avg_deg));
    out.set("netgen", "lfr_max_deg", std::to_string(ec.net.lfr_max_deg));
    out.set("netgen", "lfr_min_comm", std::to_string(ec.net.lfr_min_comm));
    out.set("netgen", "lfr_max_comm", std::to_string(ec.net.lfr_max_comm));
    out.set("netgen", "lfr_max_iters", std::to_string(ec.net.lfr_max_iters));
    out.set("diffusion", "ic_p", format_double(ec.diff.ic_p));
    out.set("diffusion", "lt_threshold", format_double(ec.diff.lt_threshold));
    out.set("diffusion", "profile_q", format_double(ec.diff.profile_q));
    out.set("diffusion", "min_size", std::to_string(ec.diff.min_size));
    out.set("diffusion", "max_size", std::to_string(ec.diff.max_size));
    out.set("diffusion", "cascades_per_source", std::to_string(ec.cascades_per_source));
    out.set("group", "per_class_count", std::to_string(ec.per_class_count));
    out.set("window", "max_steps", format_double(ec.specs.window.max_steps));
    out.set("window", "max_time", format_double(ec.specs.window.max_time));
    out.set("split", "train_fraction", format_double(ec.specs.split.train_fraction));
    out.set("split", "val_ratio", format_double(ec.specs.split.val_ratio));
    out.set("train", "n_trees", std::to_string(ec.specs.tree_spec.n_trees));
    out.set("train", "boosting_rounds", std::to_string(ec.specs.tree_spec.boosting_rounds));
    out.set("train", "early_stopping_patience",
            std::to_string(ec.specs.tree_spec.early_stopping_patience));
    out.set("train", "gbt_learning_rate", format_double(ec.specs.tree_spec.gbt_learning_rate));
    out.set("train", "gbt_max_depth", std::to_string(ec.specs.tree_spec.gbt_max_depth));
    out.set("train", "gcn_batch_size", std::to_string(ec.specs.gcn_spec.batch_size));
    out.set("train", "gcn_epochs", std::to_string(ec.specs.gcn_spec.epochs));
    out.set("train", "gcn_learning_rate", format_double(ec.specs.gcn_spec.learning_rate));
    const ContrastiveSpec& cs = ec.specs.contrastive;
    out.set("contrastive", "temperature", format_double(cs.temperature));
    out.set("contrastive", "batch_size", std::to_string(cs.batch_size));
    out.set("contrastive", "pretrain_epochs", std::to_string(cs.pretrain_epochs));
    out.set("contrastive", "finetune_epochs", std::to_string(cs.finetune_epochs));
    out.set("contrastive", "distill_epochs", std::to_string(cs.distill_epochs));
    out.set("contrastive", "distill_temperature", format_double(cs.distill_temperature));
    out.set("contrastive", "distill_alpha", format_double(cs.distill_alpha));
    out.set("contrastive", "learning_rate", format_double(cs.learning_rate));
    out.set("contrastive", "encoder_width", std::to_string(cs.encoder_width));
    out.set("contrastive", "projection_hidden", std::to_string(cs.projection_hidden));
    out.set("contrastive", "projection_dim", std::to_string(cs.projection_dim));
    out.set("augment", "leaf_drop_rate", format_double(ec.specs.augment.leaf_drop_rate));
    out.set("augment", "node_add_rate", format_double(ec.specs.augment.node_add_rate));
    out.set("augment", "time_jitter", format_double(ec.specs.augment.time_jitter));
    out.set("experiment", "master_seed", std::to_string(ec.specs.master_seed));
    out.set("experiment", "threads", std::to_string(ec.specs.threads));
    std::string tasks;
    for (const auto& t : ec.tasks) tasks += (tasks.empty() ? "" : ",") + t;
    out.set("experiment", "tasks", tasks);
    std::string algos;
    for (const auto a : ec.algos) algos += (algos.empty() ? std::string() : ",") + to_string(a);
    out.set("experiment", "algos", algos);
    out.set("label_fraction", "group", ec.lf_group);
    out.set("label_fraction", "external_group", ec.lf_external);
    std::string fractions;
    for (const double f : ec.lf_fractions)
        fractions += (fractions.empty() ? "" : ",") + format_double(f);
    out.set("label_fraction", "fractions", fractions);
    std::string sources;
    for (const auto s : ec.lf_sources)
        sources += (sources.empty() ? std::string() : ",") + to_string(s);
    out.set("label_fraction", "pretrain_sources", sources);
    out.set("label_fraction", "seeds", std::to_string(ec.lf_seeds));
    return out;
}

// Generates the three networks and nine datasets shared by both experiments.
struct SyntheticCorpus {
    std::vector<std::string> net_names{"ba", "ws", "lfr"};
    std::vector<std::string> diff_names{"ic", "lt", "profile"};
    std::map<std::string, std::vector<Cascade>> datasets;  // key "<net>-<diff>"
};

SyntheticCorpus generate_corpus(const ExperimentConfig& ec, const fs::path& out_dir) {
    SyntheticCorpus corpus;
    fs::create_directories(out_dir / "networks");
    fs::create_directories(out_dir / "cascades");
    for (const auto& net_name : corpus.net_names) {
        NetGenConfig ncfg = ec.net;
        ncfg.model = *net_model_from_string(net_name);
        ncfg.seed = derive_seed(ec.specs.master_seed, "net-" + net_name);
        const Network net = generate(ncfg);
        save_network(net, out_dir / "networks" / (net_name + ".txt"));
        std::cerr << "  network " << net_name << ": " << net.edge_count() << " edges\n";
        for (const auto& diff_name : corpus.diff_names) {
            DiffusionConfig dcfg = ec.diff;
            dcfg.model = *diffusion_model_from_string(diff_name);
            dcfg.id_prefix = net_name + "-" + diff_name;
            dcfg.seed = derive_seed(ec.specs.master_seed, "data-" + dcfg.id_prefix);
            auto cascades = generate_dataset(net, dcfg, ec.cascades_per_source,
                                             ec.specs.threads);
            serialize_cascades(cascades, out_dir / "cascades" / (dcfg.id_prefix + ".txt"));
            std::cerr << "  dataset " << dcfg.id_prefix << ": " << cascades.size()
                      << " cascades\n";
            corpus.datasets[dcfg.id_prefix] = std::move(cascades);
        }
    }
    return corpus;
}

GroupDataset corpus_group(const SyntheticCorpus& corpus, const ExperimentConfig& ec,
                          const std::string& task, const std::string& group_name) {
    std::vector<GroupSource> sources;
    if (task == "diffusion") {
        for (const auto& diff_name : corpus.diff_names)
            sources.push_back({diff_name, corpus.datasets.at(group_name + "-" + diff_name)});
    } else {
        for (const auto& net_name : corpus.net_names)
            sources.push_back({net_name, corpus.datasets.at(net_name + "-" + group_name)});
    }
    return build_group(group_name, sources, ec.per_class_count,
                       derive_seed(ec.specs.master_seed, "group-" + task + "-" + group_name));
}

// ---- experiment tables ----

struct ExperimentArgs {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
    unsigned threads = 0;
};

int run_experiment_tables(const ExperimentArgs& args) {
    ConfigFile cfg =
        args.config_path.empty() ? ConfigFile() : ConfigFile::parse_file(args.config_path);
    ExperimentConfig ec = load_experiment_config(cfg);
    if (args.seed_given)
        ec.specs.master_seed = args.seed;
    else if (!cfg.has("experiment", "master_seed"))
        ec.specs.master_seed = env_master_seed();
    if (args.threads > 0) ec.specs.threads = args.threads;

    const fs::path out_dir(args.out);
    fs::create_directories(out_dir);
    fs::create_directories(out_dir / "reports");
    resolved_experiment_config(ec, "experiment tables").write(out_dir / "run_config.txt");

    std::cerr << "experiment tables: generating corpus (seed " << ec.specs.master_seed
              << ")\n";
    const SyntheticCorpus corpus = generate_corpus(ec, out_dir);

    std::vector<std::pair<std::string, EvalReport>> summary_rows;
    for (const auto& task : ec.tasks) {
        const auto& group_names =
            (task == "diffusion") ? corpus.net_names : corpus.diff_names;
        const std::string task_label =
            (task == "diffusion") ? "diffusion_model" : "network_model";
        for (const auto& group_name : group_names) {
            const GroupDataset group = corpus_group(corpus, ec, task, group_name);
            std::cerr << "  group " << group_name << " (" << task_label << "): "
                      << group.items.size() << " cascades\n";
            const auto reports = run_group_experiment(group, ec.algos, ec.specs);
            for (const auto& report : reports) {
                write_report_json(report, out_dir / "reports" /
                                              (task_label + "_" + group_name + "_" +
                                               report.algo + ".json"));
                std::cerr << "    " << report.algo << ": macro_f1 = "
                          << format_double(report.macro_f1) << " (" << report.wall_time_s
                          << " s)\n";
                summary_rows.emplace_back(task_label, report);
            }
        }
    }
    write_file_atomic(out_dir / "summary.csv", summary_csv(summary_rows));
    std::cerr << "experiment tables: wrote " << (out_dir / "summary.csv").string() << "\n";
    return 0;
}

// ---- experiment label-fraction ----

int run_experiment_label_fraction(const ExperimentArgs& args) {
    ConfigFile cfg =
        args.config_path.empty() ? ConfigFile() : ConfigFile::parse_file(args.config_path);
    ExperimentConfig ec = load_experiment_config(cfg);
    if (args.seed_given)
        ec.specs.master_seed = args.seed;
    else if (!cfg.has("experiment", "master_seed"))
        ec.specs.master_seed = env_master_seed();
    if (args.threads > 0) ec.specs.threads = args.threads;

    const fs::path out_dir(args.out);
    fs::create_directories(out_dir);
    resolved_experiment_config(ec, "experiment label-fraction")
        .write(out_dir / "run_config.txt");

    std::cerr << "experiment label-fraction: generating corpus (seed "
              << ec.specs.master_seed << ")\n";
    const SyntheticCorpus corpus = generate_corpus(ec, out_dir);
    const GroupDataset group = corpus_group(corpus, ec, "diffusion", ec.lf_group);

    // External pool: training-split cascades of the external group, used as
    // unlabeled data only. Ids never collide with the study group's.
    std::vector<Cascade> external_pool;
    {
        const GroupDataset ext = corpus_group(corpus, ec, "diffusion", ec.lf_external);
        SplitSpec s = ec.specs.split;
        s.seed = derive_seed(ec.specs.master_seed, "split-" + ext.name);
        const SplitIndices idx = split_dataset(ext, s);
        for (const std::size_t i : idx.train) external_pool.push_back(ext.items[i].cascade);
    }

    const LabelFractionTable table = run_label_fraction_experiment(
        group, ec.lf_fractions, ec.lf_sources, external_pool, ec.specs, ec.lf_seeds,
        [](const LabelFractionRow& row) {
            std::cerr << "  " << row.pretrain_source << " fraction "
                      << format_double(row.fraction) << " seed " << row.seed_index
                      << ": macro_f1 = " << format_double(row.macro_f1) << "\n";
        });

    write_file_atomic(out_dir / "label_fraction.tsv", label_fraction_tsv(table));
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows)
        rows.push_back({{"pretrain_source", row.pretrain_source},
                        {"fraction", row.fraction},
                        {"seed_index", row.seed_index},
                        {"macro_f1", row.macro_f1}});
    write_file_atomic(out_dir / "label_fraction_rows.json", rows.dump(2) + "\n");
    std::cerr << "experiment label-fraction: wrote "
              << (out_dir / "label_fraction.tsv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cascadelab — synthetic cascade laboratory and classifier harness"};
    app.require_subcommand(1);

    GenNetArgs gen_net;
    auto* gen = app.add_subcommand("gen-net", "Generate a synthetic network");
    gen->add_option("--model", gen_net.model, "Network model: ba | ws | lfr")->required();
    gen->add_option("--nodes", gen_net.cfg.node_count, "Node count");
    gen->add_option("--ba-m", gen_net.cfg.ba_m, "BA: edges per new node");
    gen->add_option("--ws-k", gen_net.cfg.ws_k, "WS: even lattice degree");
    gen->add_option("--ws-beta", gen_net.cfg.ws_beta, "WS: rewiring probability");
    gen->add_option("--lfr-gamma", gen_net.cfg.lfr_gamma, "LFR: degree exponent");
    gen->add_option("--lfr-beta-c", gen_net.cfg.lfr_beta_c, "LFR: community-size exponent");
    gen->add_option("--lfr-mu", gen_net.cfg.lfr_mu, "LFR: mixing parameter");
    gen->add_option("--lfr-avg-deg", gen_net.cfg.lfr_avg_deg, "LFR: average degree");
    gen->add_option("--lfr-max-deg", gen_net.cfg.lfr_max_deg, "LFR: maximum degree");
    gen->add_option("--lfr-min-comm", gen_net.cfg.lfr_min_comm, "LFR: minimum community size");
    gen->add_option("--lfr-max-comm", gen_net.cfg.lfr_max_comm, "LFR: maximum community size");
    gen->add_option("--lfr-max-iters", gen_net.cfg.lfr_max_iters, "LFR: retry budget");
    gen->add_option("--seed", gen_net.cfg.seed, "Generator seed");
    gen->add_option("--out", gen_net.out, "Output network file")->required();

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate cascades on a network");
    simulate->add_option("--net", sim.net_path, "Network file")
        ->required()
        ->check(CLI::ExistingFile);
    simulate->add_option("--model", sim.model, "Diffusion model: ic | lt | profile")
        ->required();
    simulate->add_option("--ic-p", sim.cfg.ic_p, "IC diffusion probability");
    simulate->add_option("--lt-threshold", sim.cfg.lt_threshold, "LT activation threshold");
    simulate->add_option("--profile-q", sim.cfg.profile_q, "Profile influence strength");
    simulate->add_option("--count", sim.count, "Cascades to collect")->required();
    simulate->add_option("--min-size", sim.cfg.min_size, "Minimum cascade size");
    simulate->add_option("--max-size", sim.cfg.max_size, "Truncation size");
    simulate->add_option("--id-prefix", sim.cfg.id_prefix, "Cascade id prefix");
    simulate->add_option("--seed", sim.cfg.seed, "Simulation seed");
    simulate->add_option("--threads", sim.threads, "Worker threads");
    simulate->add_option("--out", sim.out, "Output cascade file")->required();

    BuildGroupArgs bg;
    auto* build_grp = app.add_subcommand("build-group", "Assemble a labeled group dataset");
    build_grp->add_option("--name", bg.name, "Group name");
    build_grp
        ->add_option("--source", bg.sources, "Cascade source as FILE:CLASS (repeatable)")
        ->required();
    build_grp->add_option("--per-class", bg.per_class, "Cascades sampled per class")
        ->required();
    build_grp->add_option("--seed", bg.seed, "Sampling seed");
    build_grp->add_option("--out", bg.out, "Output cascade file")->required();

    FeaturizeArgs feat;
    auto* featurize = app.add_subcommand("featurize", "Compute graph-level feature CSV");
    featurize->add_option("--cascades", feat.cascades_path, "Cascade file")
        ->required()
        ->check(CLI::ExistingFile);
    featurize->add_option("--labels", feat.labels_path, "Label sidecar CSV")
        ->check(CLI::ExistingFile);
    featurize->add_option("--max-steps", feat.max_steps, "Observation window in steps");
    featurize->add_option("--max-time", feat.max_time, "Observation window in seconds");
    featurize->add_option("--out", feat.out, "Output CSV")->required();

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train one classifier on a labeled group");
    train_cmd->add_option("--algo", train.algo, "rf | gbt | gcn | contrastive")->required();
    train_cmd->add_option("--cascades", train.cascades_path, "Cascade file")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--labels", train.labels_path, "Label sidecar CSV")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--max-steps", train.max_steps, "Observation window in steps");
    train_cmd->add_option("--max-time", train.max_time, "Observation window in seconds");
    train_cmd->add_option("--seed", train.seed, "Master seed");
    train_cmd->add_option("--threads", train.threads, "Worker threads");
    train_cmd->add_option("--out", train.out, "Output model file")->required();

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on labeled cascades");
    eval_cmd->add_option("--model", eval.model_path, "Model file")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--cascades", eval.cascades_path, "Cascade file")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--labels", eval.labels_path, "Label sidecar CSV")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--max-steps", eval.max_steps, "Observation window in steps");
    eval_cmd->add_option("--max-time", eval.max_time, "Observation window in seconds");
    eval_cmd->add_option("--out", eval.out, "Output report JSON")->required();

    ExperimentArgs tables, labelfrac;
    auto* experiment = app.add_subcommand("experiment", "End-to-end experiment drivers");
    experiment->require_subcommand(1);
    auto* tables_cmd = experiment->add_subcommand(
        "tables", "Reproduce the diffusion/network classification tables");
    tables_cmd->add_option("--config", tables.config_path, "Experiment config file")
        ->check(CLI::ExistingFile);
    tables_cmd->add_option("--out", tables.out, "Output directory")->required();
    tables_cmd->add_option("--seed", tables.seed, "Master seed override")
        ->each([&](const std::string&) { tables.seed_given = true; });
    tables_cmd->add_option("--threads", tables.threads, "Worker threads override");

    auto* lf_cmd = experiment->add_subcommand(
        "label-fraction", "Contrastive performance vs labeled-data fraction");
    lf_cmd->add_option("--config", labelfrac.config_path, "Experiment config file")
        ->check(CLI::ExistingFile);
    lf_cmd->add_option("--out", labelfrac.out, "Output directory")->required();
    lf_cmd->add_option("--seed", labelfrac.seed, "Master seed override")
        ->each([&](const std::string&) { labelfrac.seed_given = true; });
    lf_cmd->add_option("--threads", labelfrac.threads, "Worker threads override");

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return run_gen_net(gen_net);
        if (simulate->parsed()) return run_simulate(sim);
        if (build_grp->parsed()) return run_build_group(bg);
        if (featurize->parsed()) return run_featurize(feat);
        if (train_cmd->parsed()) return run_train(train);
        if (eval_cmd->parsed()) return run_eval(eval);
        if (experiment->parsed()) {
            if (tables_cmd->parsed()) return run_experiment_tables(tables);
            if (lf_cmd->parsed()) return run_experiment_label_fraction(labelfrac);
        }
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const InvalidConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
