#include "tweetlab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "tweetlab/augment.hpp"
#include "tweetlab/baselines.hpp"
#include "tweetlab/cnn.hpp"
#include "tweetlab/corpus.hpp"
#include "tweetlab/embedding.hpp"
#include "tweetlab/io.hpp"
#include "tweetlab/metrics.hpp"

namespace tweetlab {

namespace fs = std::filesystem;

namespace {

std::string out_dir(const ExperimentConfig& cfg) {
    const std::string dir = cfg.get_string("paths.out", "out");
    fs::create_directories(dir);
    return dir;
}

std::uint64_t global_seed(const ExperimentConfig& cfg) {
    return static_cast<std::uint64_t>(cfg.get_int("seed", 42));
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::vector<std::string> keywords_from(const ExperimentConfig& cfg) {
    if (cfg.has("paths.keywords")) return read_keywords(cfg.require_string("paths.keywords"));
    return {"whore", "slut", "rape"};
}

CbowConfig cbow_config_from(const ExperimentConfig& cfg, std::uint64_t seed) {
    CbowConfig c;
    c.dim = static_cast<std::int32_t>(cfg.get_int("embedding.dim", 200));
    c.window = static_cast<std::int32_t>(cfg.get_int("embedding.window", 5));
    c.negatives = static_cast<std::int32_t>(cfg.get_int("embedding.negatives", 5));
    c.epochs = static_cast<std::int32_t>(cfg.get_int("embedding.epochs", 5));
    c.initial_lr = cfg.get_double("embedding.lr", 0.025);
    c.subsample_threshold = cfg.get_double("embedding.subsample", 1e-3);
    c.seed = seed;
    return c;
}

std::vector<FilterSpec> parse_filters(const std::string& text) {
    std::vector<FilterSpec> specs;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("config: cnn.filters expects h:count pairs, got '" + item +
                                     "'");
        specs.push_back({static_cast<std::int32_t>(std::stol(item.substr(0, colon))),
                         static_cast<std::int32_t>(std::stol(item.substr(colon + 1)))});
    }
    if (specs.empty()) throw std::runtime_error("config: cnn.filters is empty");
    return specs;
}

CnnConfig cnn_config_from(const ExperimentConfig& cfg, std::uint64_t seed) {
    CnnConfig c;
    c.filter_specs = parse_filters(cfg.get_string("cnn.filters", "3:256,4:256,5:512"));
    c.dense_units = static_cast<std::int32_t>(cfg.get_int("cnn.dense_units", 256));
    c.dropout_input = cfg.get_double("cnn.dropout.input", 0.5);
    c.dropout_dense = cfg.get_double("cnn.dropout.dense", 0.5);
    c.dropout_bank.clear();
    for (const auto& spec : c.filter_specs) {
        const std::string key = "cnn.dropout.h" + std::to_string(spec.height);
        const double fallback = spec.height == 3 ? 0.5 : 0.2;
        c.dropout_bank[spec.height] = cfg.has(key) ? cfg.get_double(key, fallback) : fallback;
    }
    c.threshold = cfg.get_double("cnn.threshold", 0.5);
    c.max_len = static_cast<std::int32_t>(cfg.get_int("cnn.max_len", 64));
    c.batch_size = static_cast<std::int32_t>(cfg.get_int("cnn.batch_size", 32));
    c.epochs = static_cast<std::int32_t>(cfg.get_int("cnn.epochs", 50));
    c.patience = static_cast<std::int32_t>(cfg.get_int("cnn.patience", 5));
    c.learning_rate = cfg.get_double("cnn.lr", 1e-3);
    c.seed = seed;
    c.validate();
    return c;
}

std::vector<TokenRecord> tokenize_records(const std::vector<TweetRecord>& records,
                                          bool require_label) {
    std::vector<TokenRecord> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        if (require_label && !rec.label)
            throw std::runtime_error("dataset: record '" + rec.id + "' is missing a label");
        TokenRecord tr;
        tr.id = rec.id;
        tr.tokens = preprocess(rec.text);
        tr.label = rec.label.value_or(0);
        out.push_back(std::move(tr));
    }
    return out;
}

// Embedding provenance modes: domain and external load a vector file and
// the task vocabulary IS the file vocabulary (the labelled set is encoded
// against it, OOV -> <unk>); random builds the vocabulary from the given
// token records instead.
struct EmbeddingSetup {
    std::shared_ptr<const Vocabulary> vocab;
    EmbeddingMatrix embedding;
};

EmbeddingSetup build_embedding(const ExperimentConfig& cfg,
                               const std::vector<TokenRecord>& vocab_source,
                               std::uint64_t seed) {
    const std::string mode = cfg.get_string("embedding.mode", "random");
    const bool trainable = cfg.get_bool("embedding.trainable", true);
    EmbeddingSetup setup;
    if (mode == "domain" || mode == "external") {
        const RawVectors raw = load_vector_file(cfg.require_string("paths.vectors"));
        setup.vocab = std::make_shared<Vocabulary>(Vocabulary::from_tokens(raw.tokens));
        setup.embedding = project_vectors(raw, setup.vocab,
                                          mode == "domain" ? Provenance::DomainPretrained
                                                           : Provenance::GeneralPretrained,
                                          Rng(seed).child("project").next_u64());
    } else if (mode == "random") {
        std::vector<std::vector<std::string>> sentences;
        sentences.reserve(vocab_source.size());
        for (const auto& rec : vocab_source) sentences.push_back(rec.tokens);
        const auto min_count = cfg.get_int("vocab.min_count", 1);
        setup.vocab = std::make_shared<Vocabulary>(Vocabulary::build(sentences, min_count));
        setup.embedding =
            random_embedding(setup.vocab, static_cast<std::int32_t>(cfg.get_int("embedding.dim", 200)),
                             Rng(seed).child("random-init").next_u64());
    } else {
        throw std::runtime_error("config: embedding.mode must be domain, external or random");
    }
    setup.embedding.trainable = trainable;
    return setup;
}

std::string history_csv(const TrainHistory& history) {
    std::ostringstream out;
    out << "epoch,train_loss,train_accuracy,valid_accuracy\n";
    char buf[40];
    for (std::size_t e = 0; e < history.epochs.size(); ++e) {
        const auto& s = history.epochs[e];
        out << e;
        for (double v : {s.train_loss, s.train_accuracy, s.valid_accuracy}) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Manifest base_manifest(const ExperimentConfig& cfg, const char* command) {
    Manifest m;
    m.set("command", command);
    m.set("config_digest", cfg.digest());
    m.set("seed", static_cast<std::int64_t>(global_seed(cfg)));
    return m;
}

std::vector<int> eval_predictions(const CnnModel& model, const LabeledDataset& data) {
    std::vector<int> preds;
    preds.reserve(data.rows.size());
    for (const auto& row : data.rows)
        preds.push_back(predict(model, row.encoded).label);
    return preds;
}

std::vector<int> dataset_labels(const LabeledDataset& data) {
    std::vector<int> labels;
    labels.reserve(data.rows.size());
    for (const auto& row : data.rows) labels.push_back(row.label);
    return labels;
}

}  // namespace

void run_pretrain(const ExperimentConfig& cfg) {
    const std::string dir = out_dir(cfg);
    const std::uint64_t seed = global_seed(cfg);
    const std::string corpus_path = cfg.require_string("paths.unlabeled");
    const auto records = read_jsonl(corpus_path);
    const auto keywords = keywords_from(cfg);

    std::vector<std::vector<std::string>> sentences;
    std::size_t kept = 0;
    for (const auto& rec : records) {
        if (!prefilter(rec, keywords)) continue;
        auto tokens = preprocess(rec.text);
        if (tokens.empty()) continue;
        sentences.push_back(std::move(tokens));
        ++kept;
    }
    if (sentences.empty()) throw std::runtime_error("pretrain: empty pre-filtered corpus");

    const auto min_count = cfg.get_int("embedding.min_count", 5);
    auto vocab = std::make_shared<Vocabulary>(Vocabulary::build(sentences, min_count));
    const CbowConfig cbow_cfg = cbow_config_from(cfg, Rng(seed).child("pretrain").next_u64());
    const std::string objective = cfg.get_string("embedding.objective", "cbow");
    EmbeddingTrainResult result = objective == "skipgram"
                                      ? train_skipgram(sentences, vocab, cbow_cfg)
                                      : train_cbow(sentences, vocab, cbow_cfg);

    const std::string vectors_path =
        cfg.has("paths.vectors") ? cfg.require_string("paths.vectors")
                                 : join_path(dir, "vectors.txt");
    save_vectors(result.embedding, vectors_path);

    Manifest m = base_manifest(cfg, "pretrain");
    m.set("input.corpus", corpus_path);
    m.set("input.corpus_digest", file_digest(corpus_path));
    m.set("corpus_records", static_cast<std::int64_t>(records.size()));
    m.set("prefiltered_records", static_cast<std::int64_t>(kept));
    m.set("vocabulary_size", static_cast<std::int64_t>(vocab->size()));
    m.set("output.vectors", vectors_path);
    m.set("output.vectors_digest", file_digest(vectors_path));
    m.write(join_path(dir, "pretrain.manifest"));
}

namespace {

struct TrainedArtifacts {
    std::shared_ptr<const Vocabulary> vocab;
    CnnModel model;
    TrainHistory history;
    LabeledDataset train_set, test_set;
    std::vector<TweetRecord> train_records, test_records;
};

TrainedArtifacts train_pipeline(const ExperimentConfig& cfg) {
    const std::uint64_t seed = global_seed(cfg);
    const std::string labeled_path = cfg.require_string("paths.labeled");
    const auto records = read_jsonl(labeled_path);
    auto token_records = tokenize_records(records, true);

    const double test_fraction = cfg.get_double("split.test_fraction", 0.2);
    const auto max_len = static_cast<std::int32_t>(cfg.get_int("cnn.max_len", 64));

    // provisional encoding so the stratified split runs over the dataset
    // type; the vocabulary is rebuilt on the training half afterwards when
    // the mode derives it from labelled data
    auto provisional_vocab = std::make_shared<Vocabulary>(
        Vocabulary::build([&] {
            std::vector<std::vector<std::string>> s;
            for (const auto& r : token_records) s.push_back(r.tokens);
            return s;
        }(), 1));
    LabeledDataset all = make_dataset(token_records, provisional_vocab, max_len);
    auto [train_part, test_part] =
        stratified_split(all, test_fraction, Rng(seed).child("split").next_u64());

    std::vector<TokenRecord> train_tokens, test_tokens;
    for (const auto& row : train_part.rows)
        train_tokens.push_back({row.id, row.tokens, row.label});
    for (const auto& row : test_part.rows) test_tokens.push_back({row.id, row.tokens, row.label});

    EmbeddingSetup setup = build_embedding(cfg, train_tokens, seed);

    TrainedArtifacts art;
    art.vocab = setup.vocab;
    art.train_set = make_dataset(train_tokens, setup.vocab, max_len);
    art.test_set = make_dataset(test_tokens, setup.vocab, max_len);

    // carve an early-stopping validation slice out of the training half
    const double valid_fraction = cfg.get_double("train.valid_fraction", 0.1);
    LabeledDataset fit_set = art.train_set;
    LabeledDataset valid_set;
    valid_set.vocab = setup.vocab;
    valid_set.max_len = max_len;
    if (valid_fraction > 0.0) {
        auto carved =
            stratified_split(art.train_set, valid_fraction, Rng(seed).child("valid").next_u64());
        fit_set = std::move(carved.first);
        valid_set = std::move(carved.second);
    }

    CnnConfig cnn_cfg = cnn_config_from(cfg, Rng(seed).child("cnn").next_u64());
    cnn_cfg.max_len = max_len;
    art.model = init_cnn(cnn_cfg, setup.embedding);
    art.history = train(art.model, fit_set, valid_set);

    std::unordered_map<std::string, const TweetRecord*> by_id;
    for (const auto& rec : records) by_id.emplace(rec.id, &rec);
    for (const auto& row : art.train_set.rows) art.train_records.push_back(*by_id.at(row.id));
    for (const auto& row : art.test_set.rows) art.test_records.push_back(*by_id.at(row.id));
    return art;
}

}  // namespace

void run_train(const ExperimentConfig& cfg) {
    const std::string dir = out_dir(cfg);
    TrainedArtifacts art = train_pipeline(cfg);

    const std::string model_path = join_path(dir, "model.ckpt");
    const std::string vocab_path = join_path(dir, "vocab.txt");
    const std::string history_path = join_path(dir, "history.csv");
    const std::string train_path = join_path(dir, "train.jsonl");
    const std::string test_path = join_path(dir, "test.jsonl");
    save_cnn(art.model, model_path);
    save_vocab(*art.vocab, vocab_path);
    write_text(history_path, history_csv(art.history));
    write_jsonl(art.train_records, train_path);
    write_jsonl(art.test_records, test_path);

    const auto train_counts = art.train_set.class_counts();
    const auto test_counts = art.test_set.class_counts();
    Manifest m = base_manifest(cfg, "train");
    m.set("input.labeled", cfg.require_string("paths.labeled"));
    m.set("input.labeled_digest", file_digest(cfg.require_string("paths.labeled")));
    m.set("split.train_size", static_cast<std::int64_t>(art.train_set.size()));
    m.set("split.train_class0", train_counts[0]);
    m.set("split.train_class1", train_counts[1]);
    m.set("split.test_size", static_cast<std::int64_t>(art.test_set.size()));
    m.set("split.test_class0", test_counts[0]);
    m.set("split.test_class1", test_counts[1]);
    m.set("epochs_run", static_cast<std::int64_t>(art.history.epochs.size()));
    m.set("output.model", model_path);
    m.set("output.model_digest", file_digest(model_path));
    m.set("output.vocab", vocab_path);
    m.set("output.vocab_digest", file_digest(vocab_path));
    m.set("output.history", history_path);
    m.set("output.history_digest", file_digest(history_path));
    m.set("output.train", train_path);
    m.set("output.train_digest", file_digest(train_path));
    m.set("output.test", test_path);
    m.set("output.test_digest", file_digest(test_path));
    m.write(join_path(dir, "train.manifest"));
}

void run_eval(const ExperimentConfig& cfg) {
    const std::string dir = out_dir(cfg);
    const std::string model_path = join_path(dir, "model.ckpt");
    const std::string vocab_path = join_path(dir, "vocab.txt");
    auto vocab = load_vocab(vocab_path);
    CnnModel model = load_cnn(model_path, vocab);

    const std::string eval_path =
        cfg.get_string("paths.eval_data", join_path(dir, "test.jsonl"));
    auto eval_tokens = tokenize_records(read_jsonl(eval_path), true);
    LabeledDataset eval_set = make_dataset(eval_tokens, vocab, model.config.max_len);
    const auto labels = dataset_labels(eval_set);

    std::vector<std::pair<std::string, MetricsReport>> reports;
    reports.emplace_back("cnn", metrics(confusion(eval_predictions(model, eval_set), labels)));

    std::vector<std::string> selected;
    {
        std::istringstream in(cfg.get_string("baselines", "dnn,mnb,knn,ridge"));
        std::string name;
        while (std::getline(in, name, ','))
            if (!name.empty()) selected.push_back(name);
    }
    if (!selected.empty()) {
        const std::string train_path = join_path(dir, "train.jsonl");
        auto train_tokens = tokenize_records(read_jsonl(train_path), true);
        LabeledDataset train_set = make_dataset(train_tokens, vocab, model.config.max_len);
        const IdfModel idf = IdfModel::fit(train_set);
        const auto train_bow = featurize_dataset(train_set, BowScheme::TfIdf, &idf);
        const auto eval_bow = featurize_dataset(eval_set, BowScheme::TfIdf, &idf);
        const auto train_labels = dataset_labels(train_set);
        const std::uint64_t seed = global_seed(cfg);

        for (const auto& name : selected) {
            std::vector<int> preds;
            preds.reserve(eval_bow.size());
            if (name == "dnn") {
                DnnConfig dc;
                dc.learning_rate = cfg.get_double("baseline.dnn_lr", 0.04);
                dc.dropout = cfg.get_double("baseline.dnn_dropout", 0.5);
                dc.epochs = static_cast<std::int32_t>(cfg.get_int("baseline.dnn_epochs", 60));
                dc.seed = Rng(seed).child("dnn").next_u64();
                DnnModel dnn = train_dnn(train_bow, train_labels, vocab->size(), dc);
                for (const auto& x : eval_bow) preds.push_back(predict_dnn(dnn, x));
            } else if (name == "mnb") {
                MnbModel mnb = train_mnb(train_bow, train_labels, vocab->size(),
                                         cfg.get_double("baseline.mnb_alpha", 1.0));
                for (const auto& x : eval_bow) preds.push_back(predict_mnb(mnb, x));
            } else if (name == "knn") {
                const int k = static_cast<int>(cfg.get_int("baseline.knn_k", 5));
                for (const auto& x : eval_bow)
                    preds.push_back(knn_predict(train_bow, train_labels, x, k));
            } else if (name == "ridge") {
                RidgeModel ridge = ridge_fit(train_bow, train_labels, vocab->size(),
                                             cfg.get_double("baseline.ridge_lambda", 1.0));
                for (const auto& x : eval_bow) preds.push_back(ridge_predict(ridge, x));
            } else {
                throw std::runtime_error("eval: unknown baseline '" + name + "'");
            }
            reports.emplace_back(name, metrics(confusion(preds, labels)));
        }
    }

    const std::string csv = metrics_csv(reports);
    const std::string table = report_table(reports);
    const std::string csv_path = join_path(dir, "metrics.csv");
    const std::string table_path = join_path(dir, "table.txt");
    write_text(csv_path, csv);
    write_text(table_path, table);
    std::cout << table;

    Manifest m = base_manifest(cfg, "eval");
    m.set("input.model", model_path);
    m.set("input.model_digest", file_digest(model_path));
    m.set("input.eval_data", eval_path);
    m.set("input.eval_data_digest", file_digest(eval_path));
    m.set("eval_records", static_cast<std::int64_t>(eval_set.size()));
    m.set("output.metrics", csv_path);
    m.set("output.metrics_digest", file_digest(csv_path));
    m.write(join_path(dir, "eval.manifest"));
}

void run_augment(const ExperimentConfig& cfg) {
    const std::string dir = out_dir(cfg);
    const std::uint64_t seed = global_seed(cfg);
    const std::string labeled_path = cfg.require_string("paths.labeled");
    auto token_records = tokenize_records(read_jsonl(labeled_path), true);

    EmbeddingSetup setup = build_embedding(cfg, token_records, seed);
    const auto max_len = static_cast<std::int32_t>(cfg.get_int("cnn.max_len", 64));
    LabeledDataset data = make_dataset(token_records, setup.vocab, max_len);

    AugmentParams params;
    params.replace_prob = cfg.get_double("augment.replace_prob", 0.2);
    params.neighbor_k = static_cast<int>(cfg.get_int("augment.neighbor_k", 5));
    params.expand_count = static_cast<int>(cfg.get_int("augment.expand_count", 5));
    params.tweet_neighbor_count =
        static_cast<int>(cfg.get_int("augment.tweet_neighbor_count", 10));
    params.nmf_rank = static_cast<int>(cfg.get_int("augment.nmf_rank", 20));
    params.nmf_iterations = static_cast<int>(cfg.get_int("augment.nmf_iterations", 200));
    params.nmf_top_terms = static_cast<int>(cfg.get_int("augment.nmf_top_terms", 3));
    params.topic_top_terms = static_cast<int>(cfg.get_int("augment.topic_top_terms", 10));
    params.theta = cfg.get_double("augment.theta", 2.0);
    params.min_count = static_cast<int>(cfg.get_int("augment.min_count", 3));
    params.seed = Rng(seed).child("augment").next_u64();

    const auto runs = run_at_suite(data, setup.embedding, params);
    for (const auto& run : runs) {
        const std::string name = policy_name(run.kind);
        const std::string data_path = join_path(dir, name + ".jsonl");
        if (run.kind == PolicyKind::AT0) {
            // byte-identical passthrough of the input file
            std::ifstream src(labeled_path, std::ios::binary);
            std::ostringstream bytes;
            bytes << src.rdbuf();
            write_text(data_path, bytes.str());
        } else {
            std::vector<TweetRecord> records;
            records.reserve(run.data.rows.size());
            for (const auto& row : run.data.rows) {
                TweetRecord rec;
                rec.id = row.id;
                rec.label = row.label;
                std::string text;
                for (const auto& tok : row.tokens) {
                    if (!text.empty()) text += ' ';
                    text += tok;
                }
                rec.text = std::move(text);
                records.push_back(std::move(rec));
            }
            write_jsonl(records, data_path);
        }

        Manifest m;
        m.set("policy", name);
        m.set("seed", static_cast<std::int64_t>(params.seed));
        m.set("params.replace_prob", std::to_string(params.replace_prob));
        m.set("params.neighbor_k", params.neighbor_k);
        m.set("params.expand_count", params.expand_count);
        m.set("params.tweet_neighbor_count", params.tweet_neighbor_count);
        m.set("params.nmf_rank", params.nmf_rank);
        m.set("params.nmf_iterations", params.nmf_iterations);
        m.set("params.nmf_top_terms", params.nmf_top_terms);
        m.set("params.topic_top_terms", params.topic_top_terms);
        m.set("params.theta", std::to_string(params.theta));
        m.set("params.min_count", params.min_count);
        m.set("input_size", static_cast<std::int64_t>(run.input_size));
        m.set("output_size", static_cast<std::int64_t>(run.output_size));
        m.set("output.data", data_path);
        m.set("output.data_digest", file_digest(data_path));
        m.write(join_path(dir, name + ".manifest"));
    }
}

void run_crossval(const ExperimentConfig& cfg) {
    const std::string dir = out_dir(cfg);
    const std::uint64_t seed = global_seed(cfg);
    const int k = static_cast<int>(cfg.get_int("split.k", 10));
    const std::string labeled_path = cfg.require_string("paths.labeled");
    auto token_records = tokenize_records(read_jsonl(labeled_path), true);
    const auto max_len = static_cast<std::int32_t>(cfg.get_int("cnn.max_len", 64));

    auto provisional_vocab = std::make_shared<Vocabulary>(Vocabulary::build([&] {
        std::vector<std::vector<std::string>> s;
        for (const auto& r : token_records) s.push_back(r.tokens);
        return s;
    }(), 1));
    LabeledDataset all = make_dataset(token_records, provisional_vocab, max_len);
    auto folds = kfold(all, k, Rng(seed).child("kfold").next_u64());

    std::vector<double> fold_accuracy;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<TokenRecord> fold_train, fold_valid;
        for (const auto& row : folds[f].first.rows)
            fold_train.push_back({row.id, row.tokens, row.label});
        for (const auto& row : folds[f].second.rows)
            fold_valid.push_back({row.id, row.tokens, row.label});

        EmbeddingSetup setup = build_embedding(cfg, fold_train, seed);
        LabeledDataset train_set = make_dataset(fold_train, setup.vocab, max_len);
        LabeledDataset valid_set = make_dataset(fold_valid, setup.vocab, max_len);

        CnnConfig cnn_cfg = cnn_config_from(
            cfg, Rng(seed).child("fold-" + std::to_string(f)).next_u64());
        cnn_cfg.max_len = max_len;
        CnnModel model = init_cnn(cnn_cfg, setup.embedding);
        train(model, train_set, valid_set);

        const auto preds = eval_predictions(model, valid_set);
        const auto labels = dataset_labels(valid_set);
        std::int64_t correct = 0;
        for (std::size_t i = 0; i < preds.size(); ++i)
            if (preds[i] == labels[i]) ++correct;
        fold_accuracy.push_back(static_cast<double>(correct) /
                                static_cast<double>(preds.size()));
    }

    double mean = 0.0;
    for (double a : fold_accuracy) mean += a;
    mean /= static_cast<double>(fold_accuracy.size());
    double var = 0.0;
    for (double a : fold_accuracy) var += (a - mean) * (a - mean);
    const double stddev = fold_accuracy.size() > 1
                              ? std::sqrt(var / static_cast<double>(fold_accuracy.size() - 1))
                              : 0.0;

    std::ostringstream csv;
    char buf[40];
    csv << "fold,accuracy\n";
    for (std::size_t f = 0; f < fold_accuracy.size(); ++f) {
        std::snprintf(buf, sizeof buf, "%.17g", fold_accuracy[f]);
        csv << f << ',' << buf << '\n';
    }
    std::snprintf(buf, sizeof buf, "%.17g", mean);
    csv << "mean," << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", stddev);
    csv << "stddev," << buf << '\n';
    const std::string csv_path = join_path(dir, "crossval.csv");
    write_text(csv_path, csv.str());

    Manifest m = base_manifest(cfg, "crossval");
    m.set("input.labeled", labeled_path);
    m.set("input.labeled_digest", file_digest(labeled_path));
    m.set("folds", static_cast<std::int64_t>(k));
    m.set("output.summary", csv_path);
    m.set("output.summary_digest", file_digest(csv_path));
    m.write(join_path(dir, "crossval.manifest"));
}

void run_predict(const ExperimentConfig& cfg, std::istream& in, std::ostream& out) {
    const std::string dir = out_dir(cfg);
    auto vocab = load_vocab(join_path(dir, "vocab.txt"));
    CnnModel model = load_cnn(join_path(dir, "model.ckpt"), vocab);

    out << "id,probability,label\n";
    std::string line;
    std::size_t lineno = 0;
    char buf[40];
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        TweetRecord rec;
        try {
            auto obj = nlohmann::json::parse(line);
            rec.id = obj.at("id").get<std::string>();
            rec.text = obj.at("text").get<std::string>();
        } catch (const std::exception& e) {
            throw std::runtime_error("predict: stdin line " + std::to_string(lineno) + ": " +
                                     e.what());
        }
        const auto tokens = preprocess(rec.text);
        if (tokens.empty())
            throw std::runtime_error("predict: record '" + rec.id +
                                     "' has no tokens after preprocessing");
        const auto enc = encode(tokens, *vocab, model.config.max_len);
        const Prediction p = predict(model, enc);
        std::snprintf(buf, sizeof buf, "%.6f", p.probability);
        out << rec.id << ',' << buf << ',' << p.label << '\n';
    }
}

}  // namespace tweetlab
