#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>

#include "fixtures.hpp"
#include "tweetlab/cnn.hpp"
#include "tweetlab/optim.hpp"

using namespace tweetlab;

namespace {

CnnConfig tiny_config(std::uint64_t seed, std::int32_t max_len = 10) {
    CnnConfig cfg;
    cfg.filter_specs = {{3, 2}, {4, 2}, {5, 2}};
    cfg.dropout_bank = {{3, 0.0}, {4, 0.0}, {5, 0.0}};
    cfg.dropout_input = 0.0;
    cfg.dropout_dense = 0.0;
    cfg.dense_units = 4;
    cfg.max_len = max_len;
    cfg.batch_size = 4;
    cfg.epochs = 5;
    cfg.seed = seed;
    return cfg;
}

EmbeddingMatrix tiny_embedding(std::shared_ptr<const Vocabulary> vocab, std::int32_t dim,
                               std::uint64_t seed) {
    return random_embedding(std::move(vocab), dim, seed);
}

struct TinySetup {
    std::shared_ptr<const Vocabulary> vocab;
    LabeledDataset data;
    CnnModel model;
};

TinySetup tiny_setup(std::uint64_t seed, std::size_t rows = 8, std::int32_t dim = 8) {
    auto fix = fixtures::separable_tweets(rows, seed);
    TinySetup s;
    s.data = fixtures::dataset_from_records(fix.records, 10);
    s.vocab = s.data.vocab;
    s.model = init_cnn(tiny_config(seed), tiny_embedding(s.vocab, dim, seed + 1));
    return s;
}

std::vector<const EncodedTweet*> batch_of(const LabeledDataset& data) {
    std::vector<const EncodedTweet*> batch;
    for (const auto& row : data.rows) batch.push_back(&row.encoded);
    return batch;
}

bool close(double a, double n) {
    return std::abs(a - n) <= 1e-4 * std::max(std::abs(a), std::abs(n)) + 1e-7;
}

// compares analytic gradients against central differences, group by group.
// A coordinate sitting within the step of a relu/max kink gets rechecked
// with a smaller step before it may fail.
void gradcheck(CnnModel& model, const std::vector<const EncodedTweet*>& batch,
               const std::vector<int>& labels) {
    Rng rng(0);
    auto fwd = forward_train(model, batch, rng);
    auto grads = backward(model, *fwd.cache, labels);

    auto check_group = [&](const char* name, const Tensor2D& analytic, Tensor2D& param,
                           bool skip_pad_row) {
        auto loss_of = [&](const Tensor2D& p) {
            const Tensor2D saved = param;
            param = p;
            const double loss = batch_loss(model, batch, labels);
            param = saved;
            return loss;
        };
        auto coord = [&](std::size_t r, std::size_t c, double h) {
            Tensor2D probe = param;
            probe(r, c) = param(r, c) + h;
            const double fp = loss_of(probe);
            probe(r, c) = param(r, c) - h;
            const double fm = loss_of(probe);
            return (fp - fm) / (2.0 * h);
        };
        const Tensor2D numeric = finite_diff_grad(loss_of, param);
        for (std::size_t r = 0; r < param.rows(); ++r) {
            if (skip_pad_row && r == 0) continue;  // pad row is frozen by contract
            for (std::size_t c = 0; c < param.cols(); ++c) {
                bool ok = close(analytic(r, c), numeric(r, c));
                if (!ok) ok = close(analytic(r, c), coord(r, c, 1e-7));
                CAPTURE(name);
                CAPTURE(r);
                CAPTURE(c);
                CHECK(ok);
            }
        }
    };

    check_group("embedding", grads.embedding, model.embedding.vectors, true);
    for (std::size_t b = 0; b < model.banks.size(); ++b) {
        check_group("bank_weights", grads.bank_weights[b], model.banks[b].weights, false);
        check_group("bank_biases", grads.bank_biases[b], model.banks[b].biases, false);
    }
    check_group("dense_w", grads.dense_w, model.dense_w, false);
    check_group("dense_b", grads.dense_b, model.dense_b, false);
    check_group("out_w", grads.out_w, model.out_w, false);
    check_group("out_b", grads.out_b, model.out_b, false);
}

}  // namespace

TEST_CASE("conv_maxpool: hand-computed cases") {
    Tensor2D tweet(3, 2);
    tweet(0, 0) = 1;
    tweet(1, 1) = 1;
    tweet(2, 0) = 1;
    tweet(2, 1) = 1;
    Tensor2D filter(2, 2);
    filter(0, 0) = 1;
    filter(1, 1) = 1;
    CHECK(conv_maxpool(tweet, filter, 0.0) == doctest::Approx(2.0));

    Tensor2D zero_filter(2, 2);
    CHECK(conv_maxpool(tweet, zero_filter, 0.0) == 0.0);
    CHECK(conv_maxpool(tweet, zero_filter, -1.0) == 0.0);  // relu cuts negatives
    CHECK(conv_maxpool(tweet, zero_filter, 0.5) == doctest::Approx(0.5));

    Tensor2D tall(4, 2);
    CHECK_THROWS_AS(conv_maxpool(tweet, tall, 0.0), std::invalid_argument);
}

TEST_CASE("cnn config: defaults match the published architecture") {
    CnnConfig cfg;
    CHECK(cfg.total_filters() == 1024);
    REQUIRE(cfg.filter_specs.size() == 3);
    CHECK(cfg.filter_specs[0].height == 3);
    CHECK(cfg.filter_specs[0].count == 256);
    CHECK(cfg.filter_specs[2].height == 5);
    CHECK(cfg.filter_specs[2].count == 512);
    CHECK(cfg.dropout_input == 0.5);
    CHECK(cfg.dropout_bank.at(3) == 0.5);
    CHECK(cfg.dropout_bank.at(4) == 0.2);
    CHECK(cfg.dropout_bank.at(5) == 0.2);
    CHECK(cfg.dropout_dense == 0.5);
    CHECK(cfg.dense_units == 256);
    CHECK_NOTHROW(cfg.validate());

    CnnConfig bad = cfg;
    bad.max_len = 4;  // filter taller than the tweet
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.dropout_dense = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("bce_loss: analytic values") {
    CHECK(bce_loss(0.5, 1) == doctest::Approx(std::log(2.0)));
    CHECK(bce_loss(0.5, 0) == doctest::Approx(std::log(2.0)));
    CHECK(bce_loss(0.9, 0) == doctest::Approx(-std::log(0.1)));
    CHECK(bce_loss(1.0 - 1e-9, 1) < 1e-8);
    CHECK_THROWS_AS(bce_loss(0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(bce_loss(1.0, 1), std::invalid_argument);
}

TEST_CASE("forward: all-zero parameters emit probability one half") {
    auto s = tiny_setup(1);
    for (auto& bank : s.model.banks) {
        bank.weights.fill(0.0);
        bank.biases.fill(0.0);
    }
    s.model.embedding.vectors.fill(0.0);
    s.model.dense_w.fill(0.0);
    s.model.dense_b.fill(0.0);
    s.model.out_w.fill(0.0);
    s.model.out_b.fill(0.0);
    for (double p : forward_eval(s.model, batch_of(s.data))) CHECK(p == doctest::Approx(0.5));
    const auto pred = predict(s.model, s.data.rows[0].encoded);
    CHECK(pred.probability == doctest::Approx(0.5));
    CHECK(pred.label == 1);  // threshold boundary classifies positive
}

TEST_CASE("forward: eval mode is deterministic and matches predict") {
    auto s = tiny_setup(2);
    auto batch = batch_of(s.data);
    auto p1 = forward_eval(s.model, batch);
    auto p2 = forward_eval(s.model, batch);
    CHECK(p1 == p2);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto pred = predict(s.model, s.data.rows[i].encoded);
        CHECK(pred.probability == p1[i]);
        CHECK(pred.label == (p1[i] >= 0.5 ? 1 : 0));
    }
}

TEST_CASE("forward: matches a straight-line oracle on a tiny model") {
    auto s = tiny_setup(3, 4, 4);
    const auto& enc = s.data.rows[0].encoded;
    const double got = forward_eval(s.model, {&enc})[0];

    // independent re-evaluation with plain loops
    const auto dim = static_cast<std::size_t>(s.model.embedding.dim);
    const auto max_len = static_cast<std::size_t>(s.model.config.max_len);
    std::vector<double> pooled;
    for (const auto& bank : s.model.banks) {
        const auto h = static_cast<std::size_t>(bank.height);
        for (std::size_t j = 0; j < bank.weights.rows(); ++j) {
            double best = -1e300;
            for (std::size_t k = 0; k + h <= max_len; ++k) {
                double acc = bank.biases(0, j);
                for (std::size_t r = 0; r < h; ++r)
                    for (std::size_t c = 0; c < dim; ++c)
                        acc += bank.weights(j, r * dim + c) *
                               s.model.embedding.vectors(
                                   static_cast<std::size_t>(enc.ids[k + r]), c);
                best = std::max(best, acc);
            }
            pooled.push_back(best > 0.0 ? best : 0.0);
        }
    }
    double z2 = s.model.out_b(0, 0);
    for (std::size_t d = 0; d < static_cast<std::size_t>(s.model.config.dense_units); ++d) {
        double z1 = s.model.dense_b(0, d);
        for (std::size_t f = 0; f < pooled.size(); ++f) z1 += pooled[f] * s.model.dense_w(f, d);
        z2 += (z1 > 0.0 ? z1 : 0.0) * s.model.out_w(d, 0);
    }
    const double expected = 1.0 / (1.0 + std::exp(-z2));
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("backward: gradients match finite differences on tiny models") {
    for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
        auto s = tiny_setup(seed);
        std::vector<int> labels;
        for (const auto& row : s.data.rows) labels.push_back(row.label);
        auto batch = batch_of(s.data);
        gradcheck(s.model, batch, labels);
    }
}

TEST_CASE("backward: frozen embedding produces no embedding gradient") {
    auto s = tiny_setup(21);
    s.model.embedding.trainable = false;
    std::vector<int> labels;
    for (const auto& row : s.data.rows) labels.push_back(row.label);
    Rng rng(0);
    auto fwd = forward_train(s.model, batch_of(s.data), rng);
    auto grads = backward(s.model, *fwd.cache, labels);
    CHECK(grads.embedding.size() == 0);
}

TEST_CASE("backward: max pooling routes gradient to the argmax tokens only") {
    // one h=1 filter; token t1 holds the maximal response, t2/t3 do not
    auto vocab = std::make_shared<Vocabulary>(Vocabulary::from_tokens({"t1", "t2", "t3"}));
    CnnConfig cfg;
    cfg.filter_specs = {{1, 1}};
    cfg.dropout_bank = {{1, 0.0}};
    cfg.dropout_input = 0.0;
    cfg.dropout_dense = 0.0;
    cfg.dense_units = 1;
    cfg.max_len = 3;
    CnnModel model = init_cnn(cfg, tiny_embedding(vocab, 2, 5));
    model.embedding.vectors.fill(0.0);
    model.embedding.vectors(2, 0) = 2.0;  // t1
    model.embedding.vectors(3, 0) = 1.0;  // t2
    model.embedding.vectors(4, 1) = 1.0;  // t3
    model.banks[0].weights.fill(0.0);
    model.banks[0].weights(0, 0) = 1.0;
    model.banks[0].biases.fill(0.0);
    model.dense_w.fill(1.0);
    model.dense_b.fill(0.0);
    model.out_w.fill(1.0);
    model.out_b.fill(0.0);

    const auto enc = encode({"t1", "t2", "t3"}, *vocab, 3);
    Rng rng(0);
    auto fwd = forward_train(model, {&enc}, rng);
    auto grads = backward(model, *fwd.cache, {0});

    auto row_norm = [&](std::int32_t id) {
        double s = 0.0;
        for (std::size_t c = 0; c < 2; ++c)
            s += std::abs(grads.embedding(static_cast<std::size_t>(id), c));
        return s;
    };
    CHECK(row_norm(2) > 0.0);   // argmax token
    CHECK(row_norm(3) == 0.0);  // other positions receive nothing
    CHECK(row_norm(4) == 0.0);
    CHECK(row_norm(kPadId) == 0.0);

    // filter weight gradient equals ds * argmax slice: direction (2, 0)
    CHECK(grads.bank_weights[0](0, 0) != 0.0);
    CHECK(grads.bank_weights[0](0, 1) == 0.0);
}

TEST_CASE("architecture symmetry: permuting filters and dense rows together") {
    auto s = tiny_setup(31);
    auto batch = batch_of(s.data);
    const auto before = forward_eval(s.model, batch);

    // swap filters 0 and 1 of the first bank plus the matching dense rows
    auto& bank = s.model.banks[0];
    for (std::size_t c = 0; c < bank.weights.cols(); ++c)
        std::swap(bank.weights(0, c), bank.weights(1, c));
    std::swap(bank.biases(0, 0), bank.biases(0, 1));
    for (std::size_t d = 0; d < s.model.dense_w.cols(); ++d)
        std::swap(s.model.dense_w(0, d), s.model.dense_w(1, d));

    const auto after = forward_eval(s.model, batch);
    for (std::size_t i = 0; i < before.size(); ++i)
        CHECK(after[i] == doctest::Approx(before[i]).epsilon(1e-12));
}

TEST_CASE("train: learns a separable toy problem") {
    auto fix = fixtures::separable_tweets(60, 41);
    auto data = fixtures::dataset_from_records(fix.records, 10);
    CnnConfig cfg = tiny_config(41);
    cfg.filter_specs = {{2, 4}, {3, 4}};
    cfg.dropout_bank = {{2, 0.0}, {3, 0.0}};
    cfg.dense_units = 8;
    cfg.epochs = 80;
    cfg.batch_size = 16;
    cfg.learning_rate = 5e-3;
    CnnModel model = init_cnn(cfg, tiny_embedding(data.vocab, 8, 42));
    LabeledDataset no_valid;
    no_valid.vocab = data.vocab;
    no_valid.max_len = data.max_len;
    auto history = train(model, data, no_valid);
    REQUIRE_FALSE(history.epochs.empty());
    double best = 0.0;
    for (const auto& e : history.epochs) best = std::max(best, e.train_accuracy);
    CHECK(best >= 0.9);
}

TEST_CASE("train: zero epochs returns the model unchanged") {
    auto s = tiny_setup(51);
    s.model.config.epochs = 0;
    const auto snapshot = s.model.embedding.vectors.raw();
    const auto dense_before = s.model.dense_w.raw();
    LabeledDataset no_valid;
    no_valid.vocab = s.data.vocab;
    no_valid.max_len = s.data.max_len;
    auto history = train(s.model, s.data, no_valid);
    CHECK(history.epochs.empty());
    CHECK(s.model.embedding.vectors.raw() == snapshot);
    CHECK(s.model.dense_w.raw() == dense_before);
}

TEST_CASE("train: deterministic history and frozen-embedding contract") {
    auto fix = fixtures::separable_tweets(24, 61);
    auto data = fixtures::dataset_from_records(fix.records, 10);
    auto [fit, valid] = stratified_split(data, 0.25, 3);

    auto run = [&](bool trainable) {
        CnnConfig cfg = tiny_config(61);
        cfg.epochs = 6;
        EmbeddingMatrix emb = tiny_embedding(data.vocab, 8, 62);
        emb.trainable = trainable;
        CnnModel model = init_cnn(cfg, std::move(emb));
        auto history = train(model, fit, valid);
        return std::make_pair(std::move(model), std::move(history));
    };

    auto [m1, h1] = run(true);
    auto [m2, h2] = run(true);
    REQUIRE(h1.epochs.size() == h2.epochs.size());
    for (std::size_t e = 0; e < h1.epochs.size(); ++e) {
        CHECK(h1.epochs[e].train_loss == h2.epochs[e].train_loss);
        CHECK(h1.epochs[e].train_accuracy == h2.epochs[e].train_accuracy);
        CHECK(h1.epochs[e].valid_accuracy == h2.epochs[e].valid_accuracy);
    }
    CHECK(m1.dense_w.raw() == m2.dense_w.raw());

    // frozen mode: embedding block bit-identical after training
    const EmbeddingMatrix frozen_before = tiny_embedding(data.vocab, 8, 62);
    auto [frozen_model, fh] = run(false);
    (void)fh;
    CHECK(frozen_model.embedding.vectors.raw() == frozen_before.vectors.raw());
}

TEST_CASE("train: vocabulary mismatch and empty training set are rejected") {
    auto s = tiny_setup(71);
    LabeledDataset empty;
    empty.vocab = s.data.vocab;
    empty.max_len = s.data.max_len;
    CHECK_THROWS_AS(train(s.model, empty, empty), std::invalid_argument);

    auto other = fixtures::dataset_from_records(
        {{"x", {"completely", "different", "tokens"}, 0},
         {"y", {"more", "unseen", "words"}, 1},
         {"x2", {"completely", "different", "words"}, 0},
         {"y2", {"more", "unseen", "tokens"}, 1}},
        10);
    CHECK_THROWS_AS(train(s.model, other, empty), std::invalid_argument);
}

TEST_CASE("checkpoint: exact round trip and hash mismatch diagnostics") {
    auto s = tiny_setup(81);
    const auto path =
        (std::filesystem::temp_directory_path() / "tweetlab_cnn_ckpt.bin").string();
    save_cnn(s.model, path);
    CnnModel loaded = load_cnn(path, s.vocab);
    CHECK(loaded.embedding.vectors.raw() == s.model.embedding.vectors.raw());
    REQUIRE(loaded.banks.size() == s.model.banks.size());
    for (std::size_t b = 0; b < loaded.banks.size(); ++b) {
        CHECK(loaded.banks[b].height == s.model.banks[b].height);
        CHECK(loaded.banks[b].weights.raw() == s.model.banks[b].weights.raw());
        CHECK(loaded.banks[b].biases.raw() == s.model.banks[b].biases.raw());
    }
    CHECK(loaded.dense_w.raw() == s.model.dense_w.raw());
    CHECK(loaded.out_w.raw() == s.model.out_w.raw());
    CHECK(loaded.config.dense_units == s.model.config.dense_units);
    CHECK(loaded.config.dropout_bank == s.model.config.dropout_bank);
    CHECK(loaded.config.threshold == s.model.config.threshold);

    auto wrong = std::make_shared<Vocabulary>(Vocabulary::from_tokens({"alien", "tokens"}));
    CHECK_THROWS_WITH_AS(load_cnn(path, wrong), doctest::Contains("hash mismatch"),
                         std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("vocab file round trip") {
    auto corpus = fixtures::cluster_corpus(50, 4);
    auto vocab = Vocabulary::build(corpus, 1);
    const auto path = (std::filesystem::temp_directory_path() / "tweetlab_vocab.txt").string();
    save_vocab(vocab, path);
    auto loaded = load_vocab(path);
    CHECK(loaded->hash() == vocab.hash());
    CHECK(loaded->size() == vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        CHECK(loaded->token(static_cast<std::int32_t>(i)) ==
              vocab.token(static_cast<std::int32_t>(i)));
        CHECK(loaded->count(static_cast<std::int32_t>(i)) ==
              vocab.count(static_cast<std::int32_t>(i)));
    }
    std::filesystem::remove(path);
}
