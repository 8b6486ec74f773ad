// model_io.hpp — versioned text container for trained models. Parameters are
// written as hex floats, so a loaded model reproduces predictions bit-exactly.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cascadelab/contrastive.hpp"
#include "cascadelab/errors.hpp"
#include "cascadelab/gbt.hpp"
#include "cascadelab/gcn.hpp"
#include "cascadelab/io_util.hpp"
#include "cascadelab/random_forest.hpp"

namespace cascadelab {

inline constexpr std::string_view kModelMagic = "cascadelab-model v1";

struct SavedModel {
    std::string algo;  // random_forest | gbt | gcn | contrastive | encoder
    std::string phase;  // pretrained | finetuned | distilled (contrastive families)
    std::vector<std::string> class_names;
    std::variant<ForestModel, GbtModel, GcnModel, ContrastiveClassifier, EncoderModel> model;
};

namespace detail {

inline void emit_matrix(std::string& out, std::string_view name, const Matrix& m) {
    out += "matrix ";
    out += name;
    out += ' ';
    out += std::to_string(m.rows());
    out += ' ';
    out += std::to_string(m.cols());
    out += '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ' ';
            out += format_double_hex(m(i, j));
        }
        out += '\n';
    }
}

inline void emit_tree(std::string& out, const DecisionTree& tree) {
    out += "tree ";
    out += std::to_string(tree.nodes.size());
    out += '\n';
    for (const TreeNode& n : tree.nodes) {
        out += std::to_string(n.feature);
        out += ' ';
        out += format_double_hex(n.threshold);
        out += ' ';
        out += std::to_string(n.left);
        out += ' ';
        out += std::to_string(n.right);
        out += ' ';
        out += std::to_string(n.value.size());
        for (const double v : n.value) {
            out += ' ';
            out += format_double_hex(v);
        }
        out += '\n';
    }
}

inline void emit_scaler(std::string& out, const FeatureScaler& scaler) {
    out += "scaler ";
    out += std::to_string(scaler.mean.size());
    out += '\n';
    for (Eigen::Index j = 0; j < scaler.mean.size(); ++j) {
        if (j) out += ' ';
        out += format_double_hex(scaler.mean(j));
    }
    out += '\n';
    for (Eigen::Index j = 0; j < scaler.stddev.size(); ++j) {
        if (j) out += ' ';
        out += format_double_hex(scaler.stddev(j));
    }
    out += '\n';
}

class LineReader {
public:
    explicit LineReader(std::string content) : content_(std::move(content)) {}

    bool next(std::string_view& line) {
        if (pos_ >= content_.size()) return false;
        std::size_t eol = content_.find('\n', pos_);
        if (eol == std::string::npos) eol = content_.size();
        line = std::string_view(content_).substr(pos_, eol - pos_);
        pos_ = eol + 1;
        ++line_no_;
        return true;
    }

    std::string_view expect(std::string_view what) {
        std::string_view line;
        if (!next(line)) throw ParseError("unexpected end of model file, wanted " +
                                              std::string(what),
                                          line_no_);
        return line;
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::string content_;
    std::size_t pos_ = 0;
    std::size_t line_no_ = 0;
};

inline std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        std::size_t next = line.find(' ', pos);
        if (next == std::string_view::npos) next = line.size();
        if (next > pos) out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

inline Matrix read_matrix(LineReader& in, std::string_view expected_name) {
    const auto header = tokens(in.expect("matrix header"));
    if (header.size() != 4 || header[0] != "matrix" || header[1] != expected_name)
        throw ParseError("expected matrix " + std::string(expected_name), in.line_no());
    Eigen::Index rows = 0, cols = 0;
    if (!parse_int(header[2], rows) || !parse_int(header[3], cols))
        throw ParseError("bad matrix dimensions", in.line_no());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto vals = tokens(in.expect("matrix row"));
        if (static_cast<Eigen::Index>(vals.size()) != cols)
            throw ParseError("bad matrix row width", in.line_no());
        for (Eigen::Index j = 0; j < cols; ++j) {
            double v = 0;
            if (!parse_double_hex(vals[j], v))
                throw ParseError("bad hex double in matrix", in.line_no());
            m(i, j) = v;
        }
    }
    return m;
}

inline DecisionTree read_tree(LineReader& in) {
    const auto header = tokens(in.expect("tree header"));
    if (header.size() != 2 || header[0] != "tree")
        throw ParseError("expected tree header", in.line_no());
    std::size_t count = 0;
    if (!parse_int(header[1], count)) throw ParseError("bad tree node count", in.line_no());
    DecisionTree tree;
    tree.nodes.resize(count);
    for (auto& node : tree.nodes) {
        const auto vals = tokens(in.expect("tree node"));
        std::size_t value_count = 0;
        if (vals.size() < 5 || !parse_int(vals[0], node.feature) ||
            !parse_double_hex(vals[1], node.threshold) || !parse_int(vals[2], node.left) ||
            !parse_int(vals[3], node.right) || !parse_int(vals[4], value_count) ||
            vals.size() != 5 + value_count)
            throw ParseError("bad tree node line", in.line_no());
        node.value.resize(value_count);
        for (std::size_t v = 0; v < value_count; ++v)
            if (!parse_double_hex(vals[5 + v], node.value[v]))
                throw ParseError("bad hex double in tree node", in.line_no());
    }
    return tree;
}

inline FeatureScaler read_scaler(LineReader& in) {
    const auto header = tokens(in.expect("scaler header"));
    if (header.size() != 2 || header[0] != "scaler")
        throw ParseError("expected scaler header", in.line_no());
    Eigen::Index cols = 0;
    if (!parse_int(header[1], cols)) throw ParseError("bad scaler width", in.line_no());
    FeatureScaler scaler;
    scaler.mean.resize(cols);
    scaler.stddev.resize(cols);
    for (int row = 0; row < 2; ++row) {
        const auto vals = tokens(in.expect("scaler row"));
        if (static_cast<Eigen::Index>(vals.size()) != cols)
            throw ParseError("bad scaler row width", in.line_no());
        for (Eigen::Index j = 0; j < cols; ++j) {
            double v = 0;
            if (!parse_double_hex(vals[j], v))
                throw ParseError("bad hex double in scaler", in.line_no());
            (row == 0 ? scaler.mean : scaler.stddev)(j) = v;
        }
    }
    return scaler;
}

inline void emit_conv_net(std::string& out, const GraphConvNet& net) {
    out += "conv_layers " + std::to_string(net.weights.size()) + '\n';
    for (std::size_t l = 0; l < net.weights.size(); ++l)
        emit_matrix(out, "w" + std::to_string(l), net.weights[l]);
}

inline GraphConvNet read_conv_net(LineReader& in) {
    const auto header = tokens(in.expect("conv_layers header"));
    if (header.size() != 2 || header[0] != "conv_layers")
        throw ParseError("expected conv_layers header", in.line_no());
    std::size_t layers = 0;
    if (!parse_int(header[1], layers)) throw ParseError("bad layer count", in.line_no());
    GraphConvNet net;
    for (std::size_t l = 0; l < layers; ++l)
        net.weights.push_back(read_matrix(in, "w" + std::to_string(l)));
    return net;
}

}  // namespace detail

inline void save_model(const SavedModel& saved, const std::filesystem::path& path) {
    std::string out(kModelMagic);
    out += '\n';
    out += "algo " + saved.algo + '\n';
    if (!saved.phase.empty()) out += "phase " + saved.phase + '\n';
    out += "classes " + std::to_string(saved.class_names.size()) + '\n';
    for (const auto& name : saved.class_names) out += "class " + name + '\n';

    if (const auto* forest = std::get_if<ForestModel>(&saved.model)) {
        out += "param n_classes " + std::to_string(forest->n_classes) + '\n';
        out += "forest " + std::to_string(forest->trees.size()) + '\n';
        for (const DecisionTree& t : forest->trees) detail::emit_tree(out, t);
    } else if (const auto* gbt = std::get_if<GbtModel>(&saved.model)) {
        out += "param n_classes " + std::to_string(gbt->n_classes) + '\n';
        out += "param learning_rate " + format_double_hex(gbt->learning_rate) + '\n';
        out += "param best_round " + std::to_string(gbt->best_round) + '\n';
        out += "gbt_rounds " + std::to_string(gbt->rounds.size()) + ' ' +
               std::to_string(gbt->n_classes) + '\n';
        for (const auto& round : gbt->rounds)
            for (const DecisionTree& t : round) detail::emit_tree(out, t);
    } else if (const auto* gcn = std::get_if<GcnModel>(&saved.model)) {
        detail::emit_scaler(out, gcn->scaler);
        detail::emit_conv_net(out, gcn->net);
        detail::emit_matrix(out, "head_w", gcn->head.w);
        detail::emit_matrix(out, "head_b", gcn->head.b);
    } else if (const auto* cc = std::get_if<ContrastiveClassifier>(&saved.model)) {
        detail::emit_scaler(out, cc->scaler);
        detail::emit_conv_net(out, cc->net);
        detail::emit_matrix(out, "head_w", cc->head.w);
        detail::emit_matrix(out, "head_b", cc->head.b);
    } else if (const auto* enc = std::get_if<EncoderModel>(&saved.model)) {
        detail::emit_scaler(out, enc->scaler);
        detail::emit_conv_net(out, enc->net);
        detail::emit_matrix(out, "proj_w1", enc->projection.l1.w);
        detail::emit_matrix(out, "proj_b1", enc->projection.l1.b);
        detail::emit_matrix(out, "proj_w2", enc->projection.l2.w);
        detail::emit_matrix(out, "proj_b2", enc->projection.l2.b);
    }
    out += "end\n";
    write_file_atomic(path, out);
}

inline SavedModel load_model(const std::filesystem::path& path) {
    detail::LineReader in(read_file(path));
    if (in.expect("magic") != kModelMagic)
        throw ParseError("not a cascadelab model file (bad magic/version)", 1);

    SavedModel saved;
    auto algo_line = detail::tokens(in.expect("algo"));
    if (algo_line.size() != 2 || algo_line[0] != "algo")
        throw ParseError("expected algo line", in.line_no());
    saved.algo = std::string(algo_line[1]);

    std::string_view line = in.expect("phase or classes");
    if (line.substr(0, 6) == "phase ") {
        saved.phase = std::string(line.substr(6));
        line = in.expect("classes");
    }
    auto classes_line = detail::tokens(line);
    std::size_t n_classes_listed = 0;
    if (classes_line.size() != 2 || classes_line[0] != "classes" ||
        !parse_int(classes_line[1], n_classes_listed))
        throw ParseError("expected classes line", in.line_no());
    for (std::size_t i = 0; i < n_classes_listed; ++i) {
        const auto cl = in.expect("class name");
        if (cl.substr(0, 6) != "class ")
            throw ParseError("expected class line", in.line_no());
        saved.class_names.emplace_back(cl.substr(6));
    }

    auto read_params = [&](auto&& apply) {
        std::string_view l = in.expect("params/body");
        while (l.substr(0, 6) == "param ") {
            const auto kv = detail::tokens(l);
            if (kv.size() != 3) throw ParseError("bad param line", in.line_no());
            apply(kv[1], kv[2]);
            l = in.expect("params/body");
        }
        return l;
    };

    if (saved.algo == "random_forest") {
        ForestModel model;
        const auto body = read_params([&](std::string_view k, std::string_view v) {
            if (k == "n_classes") parse_int(v, model.n_classes);
        });
        const auto header = detail::tokens(body);
        std::size_t n_trees = 0;
        if (header.size() != 2 || header[0] != "forest" || !parse_int(header[1], n_trees))
            throw ParseError("expected forest header", in.line_no());
        for (std::size_t t = 0; t < n_trees; ++t) model.trees.push_back(detail::read_tree(in));
        saved.model = std::move(model);
    } else if (saved.algo == "gbt") {
        GbtModel model;
        const auto body = read_params([&](std::string_view k, std::string_view v) {
            if (k == "n_classes") parse_int(v, model.n_classes);
            if (k == "learning_rate") parse_double_hex(v, model.learning_rate);
            if (k == "best_round") parse_int(v, model.best_round);
        });
        const auto header = detail::tokens(body);
        std::size_t rounds = 0, classes = 0;
        if (header.size() != 3 || header[0] != "gbt_rounds" || !parse_int(header[1], rounds) ||
            !parse_int(header[2], classes))
            throw ParseError("expected gbt_rounds header", in.line_no());
        for (std::size_t r = 0; r < rounds; ++r) {
            std::vector<DecisionTree> round;
            for (std::size_t k = 0; k < classes; ++k) round.push_back(detail::read_tree(in));
            model.rounds.push_back(std::move(round));
        }
        saved.model = std::move(model);
    } else if (saved.algo == "gcn") {
        GcnModel model;
        model.scaler = detail::read_scaler(in);
        model.net = detail::read_conv_net(in);
        model.head.w = detail::read_matrix(in, "head_w");
        model.head.b = detail::read_matrix(in, "head_b");
        model.class_names = saved.class_names;
        saved.model = std::move(model);
    } else if (saved.algo == "contrastive") {
        ContrastiveClassifier model;
        model.scaler = detail::read_scaler(in);
        model.net = detail::read_conv_net(in);
        model.head.w = detail::read_matrix(in, "head_w");
        model.head.b = detail::read_matrix(in, "head_b");
        model.class_names = saved.class_names;
        model.phase = saved.phase;
        saved.model = std::move(model);
    } else if (saved.algo == "encoder") {
        EncoderModel model;
        model.scaler = detail::read_scaler(in);
        model.net = detail::read_conv_net(in);
        model.projection.l1.w = detail::read_matrix(in, "proj_w1");
        model.projection.l1.b = detail::read_matrix(in, "proj_b1");
        model.projection.l2.w = detail::read_matrix(in, "proj_w2");
        model.projection.l2.b = detail::read_matrix(in, "proj_b2");
        saved.model = std::move(model);
    } else {
        throw ParseError("unknown algo tag '" + saved.algo + "'", in.line_no());
    }

    if (in.expect("end") != "end") throw ParseError("missing end marker", in.line_no());
    return saved;
}

}  // namespace cascadelab
