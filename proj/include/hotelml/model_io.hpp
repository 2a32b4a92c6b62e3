#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "hotelml/decision_tree.hpp"
#include "hotelml/ensemble.hpp"
#include "hotelml/kmeans.hpp"
#include "hotelml/knn.hpp"
#include "hotelml/logistic_regression.hpp"
#include "hotelml/naive_bayes.hpp"

// Versioned flat-file model format. Line/token oriented:
//
//   hotelml-model v1
//   kind <tag>
//   ...kind-specific records...
//   end
//
// Reals use shortest round-trip formatting, so load followed by save
// reproduces the file byte for byte. Ensemble files nest their base-model
// records between the round/tree headers.

namespace hotelml {

inline constexpr const char* kModelMagic = "hotelml-model";
inline constexpr const char* kModelVersion = "v1";

using AnyModel = std::variant<KMeansModel, NaiveBayesModel, DecisionTreeModel, KnnModel,
                              LogisticRegressionModel, BaggingModel, AdaBoostModel>;

namespace model_io_detail {

inline std::string fmt(double v) { return csv::format_double(v); }

class TokenReader {
public:
    explicit TokenReader(std::istream& in, std::string context) : in_(in), context_(std::move(context)) {}

    std::string next() {
        std::string tok;
        if (!(in_ >> tok)) throw IoError(context_ + ": unexpected end of model file");
        return tok;
    }

    void expect(const std::string& word) {
        const std::string tok = next();
        if (tok != word)
            throw IoError(context_ + ": expected '" + word + "', found '" + tok + "'");
    }

    std::int64_t read_int() {
        const std::string tok = next();
        auto v = detail::parse_int(tok);
        if (!v) throw IoError(context_ + ": expected integer, found '" + tok + "'");
        return *v;
    }

    double read_double() {
        const std::string tok = next();
        auto v = detail::parse_double(tok);
        if (!v) throw IoError(context_ + ": expected real, found '" + tok + "'");
        return *v;
    }

private:
    std::istream& in_;
    std::string context_;
};

// --- decision tree ---------------------------------------------------------

inline void write_tree(std::ostream& out, const DecisionTreeModel& m) {
    out << "kind decision_tree\n";
    out << "criterion " << (m.criterion == SplitCriterion::Entropy ? "entropy" : "gini") << '\n';
    out << "max_depth " << m.max_depth << '\n';
    out << "classes " << m.classes.size();
    for (int c : m.classes) out << ' ' << c;
    out << '\n';
    out << "nodes " << m.nodes.size() << '\n';
    for (const TreeNode& n : m.nodes) {
        if (n.leaf) {
            out << "leaf " << n.pred;
            for (double c : n.class_counts) out << ' ' << fmt(c);
            out << '\n';
        } else {
            out << "split " << n.feature << ' ' << fmt(n.threshold) << ' ' << (n.categorical ? 1 : 0)
                << ' ' << n.left << ' ' << n.right << '\n';
        }
    }
}

/// Reads a tree record from "criterion" on (the kind header already consumed).
inline DecisionTreeModel read_tree_body(TokenReader& r) {
    DecisionTreeModel m;
    r.expect("criterion");
    const std::string crit = r.next();
    if (crit == "entropy") m.criterion = SplitCriterion::Entropy;
    else if (crit == "gini") m.criterion = SplitCriterion::Gini;
    else throw IoError("decision_tree: unknown criterion '" + crit + "'");
    r.expect("max_depth");
    m.max_depth = static_cast<int>(r.read_int());
    r.expect("classes");
    const std::size_t k = static_cast<std::size_t>(r.read_int());
    m.classes.resize(k);
    for (auto& c : m.classes) c = static_cast<int>(r.read_int());
    r.expect("nodes");
    const std::size_t count = static_cast<std::size_t>(r.read_int());
    m.nodes.resize(count);
    for (TreeNode& n : m.nodes) {
        const std::string tag = r.next();
        if (tag == "leaf") {
            n.leaf = true;
            n.pred = static_cast<int>(r.read_int());
            n.class_counts.resize(k);
            for (auto& c : n.class_counts) c = r.read_double();
        } else if (tag == "split") {
            n.leaf = false;
            n.feature = static_cast<int>(r.read_int());
            n.threshold = r.read_double();
            n.categorical = r.read_int() != 0;
            n.left = static_cast<int>(r.read_int());
            n.right = static_cast<int>(r.read_int());
        } else {
            throw IoError("decision_tree: unknown node tag '" + tag + "'");
        }
    }
    return m;
}

inline DecisionTreeModel read_tree(TokenReader& r) {
    r.expect("kind");
    r.expect("decision_tree");
    return read_tree_body(r);
}

// --- kmeans -----------------------------------------------------------------

inline void write_kmeans(std::ostream& out, const KMeansModel& m) {
    out << "kind kmeans\n";
    out << "k " << m.k << " d " << m.centroids.cols << " seed " << m.seed << " iterations "
        << m.iterations_run << '\n';
    out << "inertia " << fmt(m.inertia) << '\n';
    for (std::size_t c = 0; c < m.centroids.rows; ++c) {
        out << "centroid";
        for (std::size_t j = 0; j < m.centroids.cols; ++j) out << ' ' << fmt(m.centroids.at(c, j));
        out << '\n';
    }
}

inline KMeansModel read_kmeans(TokenReader& r) {
    KMeansModel m;
    r.expect("k");
    m.k = static_cast<int>(r.read_int());
    r.expect("d");
    const std::size_t d = static_cast<std::size_t>(r.read_int());
    r.expect("seed");
    m.seed = static_cast<std::uint64_t>(r.read_int());
    r.expect("iterations");
    m.iterations_run = static_cast<int>(r.read_int());
    r.expect("inertia");
    m.inertia = r.read_double();
    m.centroids = Matrix(static_cast<std::size_t>(m.k), d);
    for (std::size_t c = 0; c < m.centroids.rows; ++c) {
        r.expect("centroid");
        for (std::size_t j = 0; j < d; ++j) m.centroids.at(c, j) = r.read_double();
    }
    return m;
}

// --- naive bayes -------------------------------------------------------------

inline void write_naive_bayes(std::ostream& out, const NaiveBayesModel& m) {
    const std::size_t k = m.classes.size(), d = m.kinds.size();
    out << "kind naive_bayes\n";
    out << "alpha " << fmt(m.alpha) << '\n';
    out << "classes " << k;
    for (int c : m.classes) out << ' ' << c;
    out << '\n';
    out << "class_counts";
    for (double c : m.class_counts) out << ' ' << fmt(c);
    out << '\n';
    out << "log_priors";
    for (double p : m.log_priors) out << ' ' << fmt(p);
    out << '\n';
    out << "kinds " << d;
    for (FeatureKind kind : m.kinds) out << ' ' << (kind == FeatureKind::Numeric ? 'n' : 'c');
    out << '\n';
    out << "means";
    for (double v : m.means.data) out << ' ' << fmt(v);
    out << '\n';
    out << "vars";
    for (double v : m.vars.data) out << ' ' << fmt(v);
    out << '\n';
    for (std::size_t j = 0; j < d; ++j) {
        if (m.kinds[j] == FeatureKind::Numeric) continue;
        out << "table " << j << ' ' << m.value_counts[j].size() << '\n';
        for (const auto& [value, counts] : m.value_counts[j]) {
            out << "value " << fmt(value);
            for (double c : counts) out << ' ' << fmt(c);
            out << '\n';
        }
    }
}

inline NaiveBayesModel read_naive_bayes(TokenReader& r) {
    NaiveBayesModel m;
    r.expect("alpha");
    m.alpha = r.read_double();
    r.expect("classes");
    const std::size_t k = static_cast<std::size_t>(r.read_int());
    m.classes.resize(k);
    for (auto& c : m.classes) c = static_cast<int>(r.read_int());
    r.expect("class_counts");
    m.class_counts.resize(k);
    for (auto& c : m.class_counts) c = r.read_double();
    r.expect("log_priors");
    m.log_priors.resize(k);
    for (auto& p : m.log_priors) p = r.read_double();
    r.expect("kinds");
    const std::size_t d = static_cast<std::size_t>(r.read_int());
    m.kinds.resize(d);
    std::size_t categorical = 0;
    for (auto& kind : m.kinds) {
        const std::string tok = r.next();
        kind = tok == "n" ? FeatureKind::Numeric : FeatureKind::Categorical;
        if (kind == FeatureKind::Categorical) ++categorical;
    }
    m.means = Matrix(k, d);
    m.vars = Matrix(k, d);
    r.expect("means");
    for (auto& v : m.means.data) v = r.read_double();
    r.expect("vars");
    for (auto& v : m.vars.data) v = r.read_double();
    m.value_counts.resize(d);
    for (std::size_t t = 0; t < categorical; ++t) {
        r.expect("table");
        const std::size_t j = static_cast<std::size_t>(r.read_int());
        if (j >= d) throw IoError("naive_bayes: feature index out of range");
        const std::size_t values = static_cast<std::size_t>(r.read_int());
        for (std::size_t v = 0; v < values; ++v) {
            r.expect("value");
            const double key = r.read_double();
            std::vector<double> counts(k);
            for (auto& c : counts) c = r.read_double();
            m.value_counts[j][key] = std::move(counts);
        }
    }
    return m;
}

// --- knn ----------------------------------------------------------------------

inline void write_knn(std::ostream& out, const KnnModel& m) {
    out << "kind knn\n";
    out << "k " << m.k << " rows " << m.train.row_count() << " dims " << m.train.dim() << '\n';
    out << "names";
    for (const auto& name : m.train.names) out << ' ' << name;
    out << '\n';
    out << "kinds";
    for (FeatureKind kind : m.train.kinds) out << ' ' << (kind == FeatureKind::Numeric ? 'n' : 'c');
    out << '\n';
    out << "labels";
    for (int y : m.labels) out << ' ' << y;
    out << '\n';
    for (std::size_t i = 0; i < m.train.row_count(); ++i) {
        out << "row";
        for (std::size_t j = 0; j < m.train.dim(); ++j) out << ' ' << fmt(m.train.values.at(i, j));
        out << '\n';
    }
}

inline KnnModel read_knn(TokenReader& r) {
    KnnModel m;
    r.expect("k");
    m.k = static_cast<int>(r.read_int());
    r.expect("rows");
    const std::size_t n = static_cast<std::size_t>(r.read_int());
    r.expect("dims");
    const std::size_t d = static_cast<std::size_t>(r.read_int());
    r.expect("names");
    m.train.names.resize(d);
    for (auto& name : m.train.names) name = r.next();
    r.expect("kinds");
    m.train.kinds.resize(d);
    for (auto& kind : m.train.kinds)
        kind = r.next() == "n" ? FeatureKind::Numeric : FeatureKind::Categorical;
    r.expect("labels");
    m.labels.resize(n);
    for (auto& y : m.labels) y = static_cast<int>(r.read_int());
    m.train.values = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        r.expect("row");
        for (std::size_t j = 0; j < d; ++j) m.train.values.at(i, j) = r.read_double();
    }
    return m;
}

// --- logistic regression -------------------------------------------------------

inline void write_logreg(std::ostream& out, const LogisticRegressionModel& m) {
    out << "kind logreg\n";
    out << "eta " << fmt(m.eta) << " epochs " << m.epochs << " lambda " << fmt(m.lambda) << '\n';
    out << "classes " << m.classes.size();
    for (int c : m.classes) out << ' ' << c;
    out << '\n';
    out << "weights " << m.weights.rows << ' ' << m.weights.cols << '\n';
    for (std::size_t i = 0; i < m.weights.rows; ++i) {
        out << "row";
        for (std::size_t j = 0; j < m.weights.cols; ++j) out << ' ' << fmt(m.weights.at(i, j));
        out << '\n';
    }
    out << "trace " << m.loss_trace.size();
    for (double v : m.loss_trace) out << ' ' << fmt(v);
    out << '\n';
}

inline LogisticRegressionModel read_logreg(TokenReader& r) {
    LogisticRegressionModel m;
    r.expect("eta");
    m.eta = r.read_double();
    r.expect("epochs");
    m.epochs = static_cast<int>(r.read_int());
    r.expect("lambda");
    m.lambda = r.read_double();
    r.expect("classes");
    const std::size_t k = static_cast<std::size_t>(r.read_int());
    m.classes.resize(k);
    for (auto& c : m.classes) c = static_cast<int>(r.read_int());
    r.expect("weights");
    const std::size_t rows = static_cast<std::size_t>(r.read_int());
    const std::size_t cols = static_cast<std::size_t>(r.read_int());
    m.weights = Matrix(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        r.expect("row");
        for (std::size_t j = 0; j < cols; ++j) m.weights.at(i, j) = r.read_double();
    }
    r.expect("trace");
    const std::size_t len = static_cast<std::size_t>(r.read_int());
    m.loss_trace.resize(len);
    for (auto& v : m.loss_trace) v = r.read_double();
    return m;
}

// --- ensembles -------------------------------------------------------------------

inline void write_bagging(std::ostream& out, const BaggingModel& m) {
    out << "kind bagging\n";
    out << "depth " << m.depth << " seed " << m.seed << " trees " << m.trees.size() << '\n';
    for (const auto& tree : m.trees) write_tree(out, tree);
}

inline BaggingModel read_bagging(TokenReader& r) {
    BaggingModel m;
    r.expect("depth");
    m.depth = static_cast<int>(r.read_int());
    r.expect("seed");
    m.seed = static_cast<std::uint64_t>(r.read_int());
    r.expect("trees");
    const std::size_t count = static_cast<std::size_t>(r.read_int());
    m.trees.reserve(count);
    for (std::size_t t = 0; t < count; ++t) m.trees.push_back(read_tree(r));
    return m;
}

inline void write_adaboost(std::ostream& out, const AdaBoostModel& m) {
    out << "kind adaboost\n";
    out << "num_classes " << m.num_classes << " base_depth " << m.base_depth << " rounds "
        << m.rounds.size() << '\n';
    for (const auto& round : m.rounds) {
        out << "round alpha " << fmt(round.alpha) << " epsilon " << fmt(round.epsilon) << '\n';
        write_tree(out, round.learner);
    }
}

inline AdaBoostModel read_adaboost(TokenReader& r) {
    AdaBoostModel m;
    r.expect("num_classes");
    m.num_classes = static_cast<int>(r.read_int());
    r.expect("base_depth");
    m.base_depth = static_cast<int>(r.read_int());
    r.expect("rounds");
    const std::size_t count = static_cast<std::size_t>(r.read_int());
    for (std::size_t t = 0; t < count; ++t) {
        AdaBoostRound round;
        r.expect("round");
        r.expect("alpha");
        round.alpha = r.read_double();
        r.expect("epsilon");
        round.epsilon = r.read_double();
        round.learner = read_tree(r);
        m.rounds.push_back(std::move(round));
    }
    return m;
}

}  // namespace model_io_detail

inline std::string model_kind(const AnyModel& model) {
    struct Visitor {
        std::string operator()(const KMeansModel&) const { return "kmeans"; }
        std::string operator()(const NaiveBayesModel&) const { return "naive_bayes"; }
        std::string operator()(const DecisionTreeModel&) const { return "decision_tree"; }
        std::string operator()(const KnnModel&) const { return "knn"; }
        std::string operator()(const LogisticRegressionModel&) const { return "logreg"; }
        std::string operator()(const BaggingModel&) const { return "bagging"; }
        std::string operator()(const AdaBoostModel&) const { return "adaboost"; }
    };
    return std::visit(Visitor{}, model);
}

inline void write_model(std::ostream& out, const AnyModel& model) {
    out << kModelMagic << ' ' << kModelVersion << '\n';
    std::visit(
        [&out](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, KMeansModel>) model_io_detail::write_kmeans(out, m);
            else if constexpr (std::is_same_v<T, NaiveBayesModel>) model_io_detail::write_naive_bayes(out, m);
            else if constexpr (std::is_same_v<T, DecisionTreeModel>) model_io_detail::write_tree(out, m);
            else if constexpr (std::is_same_v<T, KnnModel>) model_io_detail::write_knn(out, m);
            else if constexpr (std::is_same_v<T, LogisticRegressionModel>) model_io_detail::write_logreg(out, m);
            else if constexpr (std::is_same_v<T, BaggingModel>) model_io_detail::write_bagging(out, m);
            else model_io_detail::write_adaboost(out, m);
        },
        model);
    out << "end\n";
}

inline void save_model(const AnyModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_model(out, model);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline std::string model_to_string(const AnyModel& model) {
    std::ostringstream out;
    write_model(out, model);
    return out.str();
}

inline AnyModel read_model(std::istream& in, const std::string& context) {
    model_io_detail::TokenReader r(in, context);
    const std::string magic = r.next();
    if (magic != kModelMagic) throw IoError(context + ": not a model file (bad magic '" + magic + "')");
    const std::string version = r.next();
    if (version != kModelVersion)
        throw IoError(context + ": unsupported model version '" + version + "'");

    AnyModel model;
    r.expect("kind");
    const std::string kind = r.next();
    if (kind == "kmeans") model = model_io_detail::read_kmeans(r);
    else if (kind == "naive_bayes") model = model_io_detail::read_naive_bayes(r);
    else if (kind == "decision_tree") model = model_io_detail::read_tree_body(r);
    else if (kind == "knn") model = model_io_detail::read_knn(r);
    else if (kind == "logreg") model = model_io_detail::read_logreg(r);
    else if (kind == "bagging") model = model_io_detail::read_bagging(r);
    else if (kind == "adaboost") model = model_io_detail::read_adaboost(r);
    else throw IoError(context + ": unknown model kind '" + kind + "'");

    r.expect("end");
    return model;
}

inline AnyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return read_model(in, path.string());
}

/// Uniform prediction surface over every trained model kind; a k-means model
/// predicts its cluster assignment.
inline std::vector<int> model_predict(const AnyModel& model, const FeatureMatrix& features) {
    struct Visitor {
        const FeatureMatrix& x;
        std::vector<int> operator()(const KMeansModel& m) const { return kmeans_assign(m, x); }
        std::vector<int> operator()(const NaiveBayesModel& m) const { return nb_predict(m, x); }
        std::vector<int> operator()(const DecisionTreeModel& m) const { return tree_predict(m, x); }
        std::vector<int> operator()(const KnnModel& m) const { return knn_predict(m, x); }
        std::vector<int> operator()(const LogisticRegressionModel& m) const { return logreg_predict(m, x); }
        std::vector<int> operator()(const BaggingModel& m) const { return bagging_predict(m, x); }
        std::vector<int> operator()(const AdaBoostModel& m) const { return adaboost_predict(m, x); }
    };
    return std::visit(Visitor{features}, model);
}

/// Class-probability output where the model family supports it.
inline std::optional<Matrix> model_predict_proba(const AnyModel& model, const FeatureMatrix& features) {
    if (const auto* nb = std::get_if<NaiveBayesModel>(&model)) return nb_predict_proba(*nb, features);
    if (const auto* lr = std::get_if<LogisticRegressionModel>(&model)) return logreg_predict_proba(*lr, features);
    return std::nullopt;
}

}  // namespace hotelml
