// harness.hpp — dataset groups, stratified splits, macro-F1 evaluation, and
// the two experiment drivers (per-group model comparison and the
// label-fraction study), plus report writers.
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "cascadelab/cascade.hpp"
#include "cascadelab/cascade_io.hpp"
#include "cascadelab/contrastive.hpp"
#include "cascadelab/features.hpp"
#include "cascadelab/gbt.hpp"
#include "cascadelab/gcn.hpp"
#include "cascadelab/io_util.hpp"
#include "cascadelab/random_forest.hpp"
#include "cascadelab/rng.hpp"

namespace cascadelab {

enum class Algo { random_forest, gbt, gcn, contrastive };

inline const char* to_string(Algo a) {
    switch (a) {
        case Algo::random_forest: return "random_forest";
        case Algo::gbt: return "gbt";
        case Algo::gcn: return "gcn";
        case Algo::contrastive: return "contrastive";
    }
    return "?";
}

inline std::optional<Algo> algo_from_string(std::string_view s) {
    if (s == "random_forest" || s == "rf") return Algo::random_forest;
    if (s == "gbt") return Algo::gbt;
    if (s == "gcn") return Algo::gcn;
    if (s == "contrastive") return Algo::contrastive;
    return std::nullopt;
}

struct GroupSource {
    std::string class_name;
    std::vector<Cascade> cascades;
};

struct LabeledCascade {
    Cascade cascade;
    int label = -1;
};

struct GroupDataset {
    std::string name;
    std::vector<std::string> class_names;
    std::vector<LabeledCascade> items;
};

// Equal-proportion sampling without replacement from each source, labels
// assigned by source, then one deterministic shuffle.
inline GroupDataset build_group(const std::string& name, const std::vector<GroupSource>& sources,
                                std::size_t per_class_count, std::uint64_t seed) {
    if (sources.size() < 2) throw InvalidConfigError("a group needs at least two sources");
    GroupDataset group;
    group.name = name;
    for (std::size_t s = 0; s < sources.size(); ++s) {
        const GroupSource& src = sources[s];
        if (src.cascades.size() < per_class_count)
            throw InvalidConfigError("source '" + src.class_name + "' has " +
                                     std::to_string(src.cascades.size()) +
                                     " cascades, needs " + std::to_string(per_class_count));
        group.class_names.push_back(src.class_name);
        std::vector<std::size_t> order(src.cascades.size());
        std::iota(order.begin(), order.end(), 0);
        Rng rng(derive_seed(seed, "group-src", s));
        rng.shuffle(order);
        for (std::size_t i = 0; i < per_class_count; ++i)
            group.items.push_back({src.cascades[order[i]], static_cast<int>(s)});
    }
    Rng rng(derive_seed(seed, "group-shuffle"));
    rng.shuffle(group.items);
    return group;
}

struct GroupSpec {
    std::string name;
    std::vector<std::pair<std::filesystem::path, std::string>> sources;  // (file, class)
    std::size_t per_class_count = 0;
    std::uint64_t seed = 0;
};

inline GroupDataset build_group(const GroupSpec& spec) {
    std::vector<GroupSource> sources;
    for (const auto& [path, class_name] : spec.sources)
        sources.push_back({class_name, parse_cascades(path)});
    return build_group(spec.name, sources, spec.per_class_count, spec.seed);
}

// Real-data binning rule: groups by average cascade size.
inline std::string size_group_for_average(double average_cascade_size) {
    if (average_cascade_size >= 100.0) return "large";
    if (average_cascade_size >= 50.0) return "medium";
    return "small";
}

struct SplitSpec {
    double train_fraction = 0.6;   // remainder is the test set
    double val_ratio = 1.0 / 6.0;  // validation share of the training pool
    std::uint64_t seed = 0;
};

struct SplitIndices {
    std::vector<std::size_t> train, val, test;
};

// Stratified by class: test gets 1 - train_fraction, the training pool is
// split val_ratio : (1 - val_ratio) into validation and train.
inline SplitIndices split_dataset(const GroupDataset& group, const SplitSpec& spec) {
    if (group.items.size() < 10) throw InvalidConfigError("dataset too small to split");
    if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0 || spec.val_ratio <= 0.0 ||
        spec.val_ratio >= 1.0)
        throw InvalidConfigError("split fractions must lie in (0, 1)");

    const auto n_classes = group.class_names.size();
    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t i = 0; i < group.items.size(); ++i)
        by_class[group.items[i].label].push_back(i);

    SplitIndices out;
    Rng rng(derive_seed(spec.seed, "split"));
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto& members = by_class[c];
        if (members.size() < 3)
            throw InvalidConfigError("class '" + group.class_names[c] +
                                     "' too small to stratify");
        rng.shuffle(members);
        const auto pool =
            static_cast<std::size_t>(std::llround(spec.train_fraction *
                                                  static_cast<double>(members.size())));
        const auto val =
            static_cast<std::size_t>(std::llround(spec.val_ratio * static_cast<double>(pool)));
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i < val)
                out.val.push_back(members[i]);
            else if (i < pool)
                out.train.push_back(members[i]);
            else
                out.test.push_back(members[i]);
        }
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

struct EvalReport {
    std::string group;
    std::string algo;
    std::uint64_t seed = 0;
    double label_fraction = 1.0;
    std::string pretrain_source;  // empty outside the label-fraction experiment
    std::vector<std::string> class_names;
    std::vector<double> per_class_f1;
    double macro_f1 = 0.0;
    std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
    double wall_time_s = 0.0;
};

// Per-class F1 with the zero convention when precision + recall = 0;
// macro-F1 is the unweighted mean.
inline EvalReport macro_f1(const std::vector<int>& predictions, const std::vector<int>& truths,
                           const std::vector<std::string>& class_names) {
    if (predictions.empty() || predictions.size() != truths.size())
        throw InvalidInputError("macro_f1 needs matching non-empty prediction/truth lists");
    const auto k = class_names.size();
    EvalReport report;
    report.class_names = class_names;
    report.confusion.assign(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] < 0 || static_cast<std::size_t>(predictions[i]) >= k ||
            truths[i] < 0 || static_cast<std::size_t>(truths[i]) >= k)
            throw InvalidInputError("label outside the class set");
        ++report.confusion[truths[i]][predictions[i]];
    }
    report.per_class_f1.resize(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        const double tp = static_cast<double>(report.confusion[c][c]);
        double fp = 0.0, fn = 0.0;
        for (std::size_t o = 0; o < k; ++o) {
            if (o == c) continue;
            fp += static_cast<double>(report.confusion[o][c]);
            fn += static_cast<double>(report.confusion[c][o]);
        }
        const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
        const double recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
        report.per_class_f1[c] =
            precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    }
    report.macro_f1 =
        std::accumulate(report.per_class_f1.begin(), report.per_class_f1.end(), 0.0) /
        static_cast<double>(k);
    return report;
}

struct ExperimentSpecs {
    SplitSpec split;
    TrainSpec tree_spec;  // forest + boosting hyperparameters
    TrainSpec gcn_spec;   // batch_size 5, epochs 20, lr 0.01 defaults
    ContrastiveSpec contrastive;
    AugmentConfig augment;
    ObservationWindow window;
    std::uint64_t master_seed = 0;
    unsigned threads = 1;

    ExperimentSpecs() {
        gcn_spec.batch_size = 5;
        gcn_spec.epochs = 20;
        gcn_spec.learning_rate = 0.01;
    }
};

namespace detail {

struct PreparedGroup {
    std::vector<CascadeGraph> graphs;       // windowed, aligned with group items
    std::vector<FeatureRows::value_type> tree_features;
    std::vector<int> labels;
    std::vector<std::string> ids;
};

inline PreparedGroup prepare_group(const GroupDataset& group, const ObservationWindow& window) {
    PreparedGroup out;
    out.graphs.reserve(group.items.size());
    for (const LabeledCascade& item : group.items) {
        CascadeGraph g = build_graph(item.cascade, window);
        out.tree_features.push_back(graph_features(g).as_row());
        out.graphs.push_back(std::move(g));
        out.labels.push_back(item.label);
        out.ids.push_back(item.cascade.cascade_id);
    }
    return out;
}

inline void assert_no_leakage(const PreparedGroup& data, const std::vector<std::size_t>& test,
                              const std::vector<std::size_t>& pool_indices) {
    std::unordered_set<std::string> test_ids;
    for (const std::size_t i : test) test_ids.insert(data.ids[i]);
    for (const std::size_t i : pool_indices)
        if (test_ids.count(data.ids[i]))
            throw InvalidInputError("test-set leakage: cascade '" + data.ids[i] +
                                    "' appears in a training or pretraining pool");
}

inline std::vector<PreparedGraph> prepare_indexed(const PreparedGroup& data,
                                                  const std::vector<std::size_t>& indices,
                                                  const ObservationWindow& window,
                                                  const FeatureScaler& scaler) {
    std::vector<PreparedGraph> out;
    out.reserve(indices.size());
    for (const std::size_t i : indices) {
        PreparedGraph pg = prepare_graph(data.graphs[i], window, &scaler);
        pg.label = data.labels[i];
        pg.cascade_id = data.ids[i];
        out.push_back(std::move(pg));
    }
    return out;
}

}  // namespace detail

// The full contrastive arm: NT-Xent pre-training on the pool, supervised
// fine-tuning (teacher), then distillation into the reported student.
inline ContrastiveClassifier run_contrastive_pipeline(
    const std::vector<CascadeGraph>& pool, const std::vector<CascadeGraph>& train_graphs,
    const std::vector<int>& train_labels, const std::vector<std::string>& train_ids,
    const std::vector<CascadeGraph>& val_graphs, const std::vector<int>& val_labels,
    const std::vector<std::string>& pool_ids, int n_classes, const ContrastiveSpec& spec,
    const AugmentConfig& aug, const ObservationWindow& window,
    std::vector<std::string> class_names) {
    const PretrainResult pre = pretrain(pool, spec, aug, window);
    const FinetuneResult teacher =
        finetune(pre.encoder, train_graphs, train_labels, val_graphs, val_labels, n_classes,
                 spec, window, std::move(class_names));

    // distillation sees labeled cascades once: pool entries that duplicate a
    // labeled id join only through the labeled list
    std::unordered_set<std::string> labeled_ids(train_ids.begin(), train_ids.end());
    std::vector<CascadeGraph> unlabeled;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (!labeled_ids.count(pool_ids[i])) unlabeled.push_back(pool[i]);

    const DistillResult student = distill(teacher.model, train_graphs, train_labels,
                                          val_graphs, val_labels, unlabeled, n_classes, spec,
                                          window);
    return student.model;
}

// Trains every requested algorithm on identical train/val data and evaluates
// on the identical test set.
inline std::vector<EvalReport> run_group_experiment(const GroupDataset& group,
                                                    const std::vector<Algo>& algos,
                                                    const ExperimentSpecs& specs) {
    const detail::PreparedGroup data = detail::prepare_group(group, specs.window);
    const SplitIndices idx = split_dataset(group, [&] {
        SplitSpec s = specs.split;
        s.seed = derive_seed(specs.master_seed, "split-" + group.name);
        return s;
    }());

    std::vector<std::size_t> train_pool = idx.train;
    train_pool.insert(train_pool.end(), idx.val.begin(), idx.val.end());
    detail::assert_no_leakage(data, idx.test, train_pool);

    const int n_classes = static_cast<int>(group.class_names.size());
    std::vector<EvalReport> reports;

    for (const Algo algo : algos) {
        const auto started = std::chrono::steady_clock::now();
        std::vector<int> predictions;
        predictions.reserve(idx.test.size());

        if (algo == Algo::random_forest || algo == Algo::gbt) {
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
            if (algo == Algo::random_forest) {
                TrainSpec spec = specs.tree_spec;
                spec.seed = derive_seed(specs.master_seed, "rf-" + group.name);
                const ForestModel model =
                    train_random_forest(x_train, y_train, n_classes, spec, specs.threads);
                for (const std::size_t i : idx.test)
                    predictions.push_back(predict_class(model, data.tree_features[i]));
            } else {
                TrainSpec spec = specs.tree_spec;
                spec.seed = derive_seed(specs.master_seed, "gbt-" + group.name);
                const GbtModel model = train_gbt(x_train, y_train, x_val, y_val, n_classes, spec);
                for (const std::size_t i : idx.test)
                    predictions.push_back(predict_class(model, data.tree_features[i]));
            }
        } else if (algo == Algo::gcn) {
            std::vector<Matrix> raw;
            for (const std::size_t i : idx.train)
                raw.push_back(raw_node_feature_matrix(data.graphs[i], specs.window));
            FeatureScaler scaler;
            scaler.fit(raw);
            const auto train = detail::prepare_indexed(data, idx.train, specs.window, scaler);
            const auto val = detail::prepare_indexed(data, idx.val, specs.window, scaler);
            TrainSpec spec = specs.gcn_spec;
            spec.seed = derive_seed(specs.master_seed, "gcn-" + group.name);
            GcnModel model = train_gcn(train, val, n_classes, spec, scaler, group.class_names);
            for (const std::size_t i : idx.test)
                predictions.push_back(
                    predict_class(model, prepare_graph(data.graphs[i], specs.window, &scaler)));
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
            ContrastiveSpec spec = specs.contrastive;
            spec.seed = derive_seed(specs.master_seed, "contrastive-" + group.name, 0);
            const ContrastiveClassifier model = run_contrastive_pipeline(
                pool, train_graphs, train_labels, train_ids, val_graphs, val_labels, pool_ids,
                n_classes, spec, specs.augment, specs.window, group.class_names);
            for (const std::size_t i : idx.test)
                predictions.push_back(predict_class(
                    model, prepare_graph(data.graphs[i], specs.window, &model.scaler)));
        }

        std::vector<int> truths;
        for (const std::size_t i : idx.test) truths.push_back(data.labels[i]);
        EvalReport report = macro_f1(predictions, truths, group.class_names);
        report.group = group.name;
        report.algo = to_string(algo);
        report.seed = specs.master_seed;
        report.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        reports.push_back(std::move(report));
    }
    return reports;
}

enum class PretrainSource { self_only, mixed, external_only };

inline const char* to_string(PretrainSource s) {
    switch (s) {
        case PretrainSource::self_only: return "self_only";
        case PretrainSource::mixed: return "mixed";
        case PretrainSource::external_only: return "external_only";
    }
    return "?";
}

inline std::optional<PretrainSource> pretrain_source_from_string(std::string_view s) {
    if (s == "self_only") return PretrainSource::self_only;
    if (s == "mixed") return PretrainSource::mixed;
    if (s == "external_only") return PretrainSource::external_only;
    return std::nullopt;
}

struct LabelFractionRow {
    std::string pretrain_source;
    double fraction = 1.0;
    std::uint64_t seed_index = 0;
    double macro_f1 = 0.0;
};

struct LabelFractionTable {
    std::string group;
    std::vector<double> fractions;
    std::vector<std::string> sources;
    std::size_t n_seeds = 0;
    std::vector<LabelFractionRow> rows;

    double mean(const std::string& source, double fraction) const {
        double total = 0.0;
        std::size_t count = 0;
        for (const auto& row : rows)
            if (row.pretrain_source == source && row.fraction == fraction) {
                total += row.macro_f1;
                ++count;
            }
        return count > 0 ? total / static_cast<double>(count) : 0.0;
    }
};

// Stratified nested subsampling: for each seed, every class is shuffled once
// and each fraction takes a prefix, so smaller fractions are subsets of
// larger ones.
inline std::vector<std::size_t> label_fraction_subset(const detail::PreparedGroup& data,
                                                      const std::vector<std::size_t>& train,
                                                      double fraction, int n_classes,
                                                      std::uint64_t subset_seed) {
    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (const std::size_t i : train) by_class[data.labels[i]].push_back(i);
    std::vector<std::size_t> subset;
    for (int c = 0; c < n_classes; ++c) {
        auto& members = by_class[c];
        Rng rng(derive_seed(subset_seed, "lf-class", static_cast<std::uint64_t>(c)));
        rng.shuffle(members);
        const auto keep = static_cast<std::size_t>(
            std::floor(fraction * static_cast<double>(members.size()) + 1e-9));
        if (keep == 0)
            throw InvalidConfigError("label fraction yields no examples for class '" +
                                     std::to_string(c) + "'");
        for (std::size_t i = 0; i < keep && i < members.size(); ++i)
            subset.push_back(members[i]);
    }
    std::sort(subset.begin(), subset.end());
    return subset;
}

// Label-fraction study: reduced labeled data in fine-tuning and distillation,
// with the pre-training pool drawn from the reduced data, the external pool,
// or both. `external_pool` supplies the unlabeled cascades for mixed and
// external_only modes.
inline LabelFractionTable run_label_fraction_experiment(
    const GroupDataset& group, const std::vector<double>& fractions,
    const std::vector<PretrainSource>& sources, const std::vector<Cascade>& external_pool,
    const ExperimentSpecs& specs, std::size_t n_seeds,
    const std::function<void(const LabelFractionRow&)>& on_row = {}) {
    if (fractions.empty() || sources.empty() || n_seeds == 0)
        throw InvalidConfigError("label-fraction experiment needs fractions, sources, seeds");
    const bool needs_external = std::any_of(sources.begin(), sources.end(), [](auto s) {
        return s != PretrainSource::self_only;
    });
    if (needs_external && external_pool.empty())
        throw InvalidConfigError("pretrain source requires a non-empty external pool");

    const detail::PreparedGroup data = detail::prepare_group(group, specs.window);
    const SplitIndices idx = split_dataset(group, [&] {
        SplitSpec s = specs.split;
        s.seed = derive_seed(specs.master_seed, "split-" + group.name);
        return s;
    }());
    const int n_classes = static_cast<int>(group.class_names.size());

    std::vector<CascadeGraph> external_graphs;
    std::vector<std::string> external_ids;
    for (const Cascade& c : external_pool) {
        external_graphs.push_back(build_graph(c, specs.window));
        external_ids.push_back(c.cascade_id);
    }
    {
        std::unordered_set<std::string> test_ids;
        for (const std::size_t i : idx.test) test_ids.insert(data.ids[i]);
        for (const auto& id : external_ids)
            if (test_ids.count(id))
                throw InvalidInputError("test-set leakage: external pool contains '" + id +
                                        "'");
    }

    std::vector<CascadeGraph> val_graphs;
    std::vector<int> val_labels;
    for (const std::size_t i : idx.val) {
        val_graphs.push_back(data.graphs[i]);
        val_labels.push_back(data.labels[i]);
    }
    std::vector<int> truths;
    for (const std::size_t i : idx.test) truths.push_back(data.labels[i]);

    LabelFractionTable table;
    table.group = group.name;
    table.fractions = fractions;
    table.n_seeds = n_seeds;
    for (const auto s : sources) table.sources.emplace_back(to_string(s));

    for (std::size_t seed_index = 0; seed_index < n_seeds; ++seed_index) {
        const std::uint64_t subset_seed =
            derive_seed(specs.master_seed, "lf-subset-" + group.name, seed_index);
        for (const double fraction : fractions) {
            const auto labeled =
                label_fraction_subset(data, idx.train, fraction, n_classes, subset_seed);
            detail::assert_no_leakage(data, idx.test, labeled);

            std::vector<CascadeGraph> train_graphs;
            std::vector<int> train_labels;
            std::vector<std::string> train_ids;
            for (const std::size_t i : labeled) {
                train_graphs.push_back(data.graphs[i]);
                train_labels.push_back(data.labels[i]);
                train_ids.push_back(data.ids[i]);
            }

            for (const PretrainSource source : sources) {
                std::vector<CascadeGraph> pool;
                std::vector<std::string> pool_ids;
                if (source != PretrainSource::external_only) {
                    pool = train_graphs;
                    pool_ids = train_ids;
                }
                if (source != PretrainSource::self_only) {
                    pool.insert(pool.end(), external_graphs.begin(), external_graphs.end());
                    pool_ids.insert(pool_ids.end(), external_ids.begin(), external_ids.end());
                }

                // seed tag shared with run_group_experiment so that fraction
                // 1.0 with self_only pretraining reproduces its contrastive
                // entry exactly at seed_index 0
                ContrastiveSpec spec = specs.contrastive;
                spec.seed =
                    derive_seed(specs.master_seed, "contrastive-" + group.name, seed_index);
                const ContrastiveClassifier model = run_contrastive_pipeline(
                    pool, train_graphs, train_labels, train_ids, val_graphs, val_labels,
                    pool_ids, n_classes, spec, specs.augment, specs.window,
                    group.class_names);

                std::vector<int> predictions;
                for (const std::size_t i : idx.test)
                    predictions.push_back(predict_class(
                        model, prepare_graph(data.graphs[i], specs.window, &model.scaler)));
                const EvalReport report = macro_f1(predictions, truths, group.class_names);
                table.rows.push_back(
                    {to_string(source), fraction, seed_index, report.macro_f1});
                if (on_row) on_row(table.rows.back());
            }
        }
    }
    return table;
}

// ---- report writers ----

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["group"] = r.group;
    j["algo"] = r.algo;
    j["seed"] = r.seed;
    j["label_fraction"] = r.label_fraction;
    j["pretrain_source"] = r.pretrain_source;
    nlohmann::json per_class = nlohmann::json::object();
    for (std::size_t c = 0; c < r.class_names.size(); ++c)
        per_class[r.class_names[c]] = r.per_class_f1[c];
    j["per_class_f1"] = per_class;
    j["macro_f1"] = r.macro_f1;
    j["confusion_matrix"] = r.confusion;
    j["wall_time_s"] = r.wall_time_s;
    return j;
}

inline void write_report_json(const EvalReport& r, const std::filesystem::path& path) {
    write_file_atomic(path, report_to_json(r).dump(2) + "\n");
}

// Summary CSV: one row per (group, algo); deliberately excludes wall time so
// repeated runs are byte-identical.
inline std::string summary_csv(const std::vector<std::pair<std::string, EvalReport>>& rows) {
    std::string out = "task,group,algo,macro_f1\n";
    for (const auto& [task, r] : rows) {
        out += task;
        out += ',';
        out += r.group;
        out += ',';
        out += r.algo;
        out += ',';
        out += format_double(r.macro_f1);
        out += '\n';
    }
    return out;
}

// Plot-ready TSV: one row per fraction, one column per pretrain source,
// values are macro-F1 means over seeds.
inline std::string label_fraction_tsv(const LabelFractionTable& table) {
    std::string out = "fraction";
    for (const auto& s : table.sources) {
        out += '\t';
        out += s;
    }
    out += '\n';
    for (const double f : table.fractions) {
        out += format_double(f);
        for (const auto& s : table.sources) {
            out += '\t';
            out += format_double(table.mean(s, f));
        }
        out += '\n';
    }
    return out;
}

}  // namespace cascadelab
