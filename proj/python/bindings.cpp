#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tweetlab/augment.hpp"
#include "tweetlab/baselines.hpp"
#include "tweetlab/cnn.hpp"
#include "tweetlab/corpus.hpp"
#include "tweetlab/embedding.hpp"
#include "tweetlab/metrics.hpp"
#include "tweetlab/nmf.hpp"
#include "tweetlab/porter.hpp"

namespace py = pybind11;
using namespace tweetlab;

namespace {

using Sentences = std::vector<std::vector<std::string>>;

std::vector<std::vector<double>> to_rows(const Tensor2D& t) {
    std::vector<std::vector<double>> rows(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r)
        rows[r].assign(t.row(r), t.row(r) + t.cols());
    return rows;
}

Tensor2D from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("matrix must be non-empty");
    Tensor2D t(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != t.cols())
            throw std::invalid_argument("matrix rows have uneven lengths");
        for (std::size_t c = 0; c < t.cols(); ++c) t(r, c) = rows[r][c];
    }
    return t;
}

struct PyEmbedding {
    EmbeddingMatrix emb;

    std::vector<std::string> tokens() const {
        std::vector<std::string> out;
        for (std::size_t id = 2; id < emb.vocab->size(); ++id)
            out.push_back(emb.vocab->token(static_cast<std::int32_t>(id)));
        return out;
    }
    std::vector<double> vector(const std::string& token) const {
        auto id = emb.vocab->id(token);
        if (!id) throw std::invalid_argument("'" + token + "' not in vocabulary");
        const auto row = emb.row(*id);
        return {row.begin(), row.end()};
    }
    std::vector<std::pair<std::string, double>> neighbors(const std::string& token, int k) const {
        return nearest_neighbors(emb, token, k);
    }
};

PyEmbedding py_train_embedding(const Sentences& sentences, int dim, int window, int negatives,
                               int epochs, double lr, double subsample, int min_count,
                               std::uint64_t seed, const std::string& objective) {
    auto vocab = std::make_shared<Vocabulary>(Vocabulary::build(sentences, min_count));
    CbowConfig cfg;
    cfg.dim = dim;
    cfg.window = window;
    cfg.negatives = negatives;
    cfg.epochs = epochs;
    cfg.initial_lr = lr;
    cfg.subsample_threshold = subsample;
    cfg.seed = seed;
    auto result = objective == "skipgram" ? train_skipgram(sentences, vocab, cfg)
                                          : train_cbow(sentences, vocab, cfg);
    return PyEmbedding{std::move(result.embedding)};
}

LabeledDataset dataset_from_lists(const Sentences& tweets, const std::vector<int>& labels,
                                  std::shared_ptr<const Vocabulary> vocab, int max_len) {
    if (tweets.size() != labels.size())
        throw std::invalid_argument("tweets and labels must have equal length");
    std::vector<TokenRecord> records;
    for (std::size_t i = 0; i < tweets.size(); ++i)
        records.push_back({std::to_string(i), tweets[i], labels[i]});
    return make_dataset(records, std::move(vocab), max_len);
}

struct PyCnn {
    std::shared_ptr<const Vocabulary> vocab;
    CnnModel model;
    std::vector<double> train_accuracy;

    std::pair<double, int> predict_one(const std::vector<std::string>& tokens) const {
        const auto enc = encode(tokens, *vocab, model.config.max_len);
        const Prediction p = predict(model, enc);
        return {p.probability, p.label};
    }
};

PyCnn py_train_cnn(const Sentences& tweets, const std::vector<int>& labels,
                   const std::optional<PyEmbedding>& embedding, int dim,
                   const std::vector<std::pair<int, int>>& filters, int dense_units, int max_len,
                   int epochs, int batch_size, double lr, double dropout_input,
                   double dropout_bank, double dropout_dense, std::uint64_t seed) {
    PyCnn out;
    EmbeddingMatrix emb;
    if (embedding) {
        out.vocab = embedding->emb.vocab;
        emb = embedding->emb;
    } else {
        out.vocab = std::make_shared<Vocabulary>(Vocabulary::build(tweets, 1));
        emb = random_embedding(out.vocab, dim, seed + 1);
    }
    CnnConfig cfg;
    cfg.filter_specs.clear();
    cfg.dropout_bank.clear();
    for (const auto& [h, count] : filters) {
        cfg.filter_specs.push_back({h, count});
        cfg.dropout_bank[h] = dropout_bank;
    }
    cfg.dense_units = dense_units;
    cfg.dropout_input = dropout_input;
    cfg.dropout_dense = dropout_dense;
    cfg.max_len = max_len;
    cfg.batch_size = batch_size;
    cfg.epochs = epochs;
    cfg.patience = epochs;  // no early stopping through this surface
    cfg.learning_rate = lr;
    cfg.seed = seed;

    LabeledDataset data = dataset_from_lists(tweets, labels, out.vocab, max_len);
    LabeledDataset empty_valid;
    empty_valid.vocab = out.vocab;
    empty_valid.max_len = max_len;
    out.model = init_cnn(cfg, std::move(emb));
    const TrainHistory history = train(out.model, data, empty_valid);
    for (const auto& e : history.epochs) out.train_accuracy.push_back(e.train_accuracy);
    return out;
}

py::dict metrics_dict(const MetricsReport& r) {
    py::dict d;
    d["tp"] = r.counts.tp;
    d["tn"] = r.counts.tn;
    d["fp"] = r.counts.fp;
    d["fn"] = r.counts.fn;
    d["accuracy"] = r.accuracy;
    d["precision"] = r.precision;
    d["recall"] = r.recall;
    d["f1"] = r.f1;
    d["kappa"] = r.cohen_kappa;
    d["auc"] = r.auc_binary;
    d["degenerate"] = r.degenerate;
    return d;
}

}  // namespace

PYBIND11_MODULE(tweetlab, m) {
    m.doc() = "abusive-tweet classification laboratory (C++ core)";

    m.def("tokenize", &tokenize, py::arg("text"),
          "lowercased tokens; urls -> <url>, mentions -> <user>, # stripped");
    m.def("porter_stem", &porter_stem, py::arg("token"));
    m.def("stem_tokens", &stem_tokens, py::arg("tokens"));
    m.def(
        "prefilter",
        [](const std::string& text, const std::vector<std::string>& keywords) {
            return prefilter(text, keywords);
        },
        py::arg("text"), py::arg("keywords") = std::vector<std::string>{"whore", "slut", "rape"});

    py::class_<PyEmbedding>(m, "Embedding")
        .def_property_readonly("dim", [](const PyEmbedding& e) { return e.emb.dim; })
        .def_property_readonly("tokens", &PyEmbedding::tokens)
        .def("vector", &PyEmbedding::vector, py::arg("token"))
        .def("nearest_neighbors", &PyEmbedding::neighbors, py::arg("token"), py::arg("k") = 10)
        .def("save", [](const PyEmbedding& e, const std::string& path) { save_vectors(e.emb, path); },
             py::arg("path"));

    m.def("train_embedding", &py_train_embedding, py::arg("sentences"), py::arg("dim") = 32,
          py::arg("window") = 5, py::arg("negatives") = 5, py::arg("epochs") = 5,
          py::arg("lr") = 0.025, py::arg("subsample") = 1e-3, py::arg("min_count") = 1,
          py::arg("seed") = 1, py::arg("objective") = "cbow",
          "negative-sampling word2vec over tokenized sentences");

    m.def("cosine", [](const std::vector<double>& u, const std::vector<double>& v) {
        return cosine(u, v);
    });

    py::class_<PyCnn>(m, "CnnClassifier")
        .def_property_readonly("train_accuracy",
                               [](const PyCnn& c) { return c.train_accuracy; })
        .def("predict", &PyCnn::predict_one, py::arg("tokens"),
             "returns (probability, label) for a tokenized tweet");

    m.def("train_cnn", &py_train_cnn, py::arg("tweets"), py::arg("labels"),
          py::arg("embedding") = std::nullopt, py::arg("dim") = 16,
          py::arg("filters") = std::vector<std::pair<int, int>>{{3, 8}, {4, 8}, {5, 16}},
          py::arg("dense_units") = 16, py::arg("max_len") = 32, py::arg("epochs") = 30,
          py::arg("batch_size") = 16, py::arg("lr") = 1e-3, py::arg("dropout_input") = 0.0,
          py::arg("dropout_bank") = 0.0, py::arg("dropout_dense") = 0.0, py::arg("seed") = 1,
          "convolutional classifier over tokenized, labelled tweets");

    m.def(
        "confusion",
        [](const std::vector<int>& preds, const std::vector<int>& labels) {
            const auto cm = confusion(preds, labels);
            return py::make_tuple(cm.tp, cm.tn, cm.fp, cm.fn);
        },
        py::arg("predictions"), py::arg("labels"));

    m.def(
        "metrics",
        [](std::int64_t tp, std::int64_t tn, std::int64_t fp, std::int64_t fn) {
            return metrics_dict(metrics(ConfusionMatrix{tp, tn, fp, fn}));
        },
        py::arg("tp"), py::arg("tn"), py::arg("fp"), py::arg("fn"),
        "six derived metrics from confusion counts");

    m.def(
        "nmf",
        [](const std::vector<std::vector<double>>& matrix, int rank, int iterations,
           std::uint64_t seed) {
            const auto f = nmf(from_rows(matrix), rank, iterations, seed);
            return py::make_tuple(to_rows(f.w), to_rows(f.h), f.error_trace);
        },
        py::arg("matrix"), py::arg("rank"), py::arg("iterations") = 200, py::arg("seed") = 1,
        "multiplicative-update factorization; returns (W, H, error_trace)");

    m.def(
        "augment_suite",
        [](const Sentences& tweets, const std::vector<int>& labels, const PyEmbedding& embedding,
           int max_len, std::uint64_t seed, int nmf_rank, int nmf_iterations) {
            LabeledDataset data = dataset_from_lists(tweets, labels, embedding.emb.vocab, max_len);
            AugmentParams params;
            params.seed = seed;
            params.nmf_rank = nmf_rank;
            params.nmf_iterations = nmf_iterations;
            py::dict out;
            for (const auto& run : run_at_suite(data, embedding.emb, params)) {
                Sentences rows;
                std::vector<int> row_labels;
                for (const auto& row : run.data.rows) {
                    rows.push_back(row.tokens);
                    row_labels.push_back(row.label);
                }
                out[policy_name(run.kind)] = py::make_tuple(rows, row_labels);
            }
            return out;
        },
        py::arg("tweets"), py::arg("labels"), py::arg("embedding"), py::arg("max_len") = 32,
        py::arg("seed") = 1, py::arg("nmf_rank") = 5, py::arg("nmf_iterations") = 100,
        "returns {policy: (tweets, labels)} for AT0..AT6");
}
