// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each criterion pins its tolerances here, in code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fixtures.hpp"
#include "tweetlab/augment.hpp"
#include "tweetlab/baselines.hpp"
#include "tweetlab/cnn.hpp"
#include "tweetlab/commands.hpp"
#include "tweetlab/config.hpp"
#include "tweetlab/embedding.hpp"
#include "tweetlab/io.hpp"
#include "tweetlab/metrics.hpp"
#include "tweetlab/nmf.hpp"
#include "tweetlab/optim.hpp"

using namespace tweetlab;
namespace fs = std::filesystem;

namespace {

struct Runner {
    int failures = 0;

    void criterion(int number, const std::string& name, const std::function<bool()>& body) {
        using clock = std::chrono::steady_clock;
        bool ok = false;
        std::string note;
        const auto start = clock::now();
        try {
            ok = body();
        } catch (const std::exception& e) {
            ok = false;
            note = std::string(" (exception: ") + e.what() + ")";
        }
        const auto secs =
            std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start)
                .count() /
            1000.0;
        std::printf("%s  [%2d] %s (%.1fs)%s\n", ok ? "PASS" : "FAIL", number, name.c_str(), secs,
                    note.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

constexpr double kMetricTol = 0.0005 + 1e-12;

struct TableColumn {
    const char* name;
    ConfusionMatrix counts;
    double accuracy, precision, recall, f1, kappa, auc;
};

bool check_columns(const std::vector<TableColumn>& columns) {
    bool ok = true;
    for (const auto& col : columns) {
        const auto r = metrics(col.counts);
        const std::pair<double, double> checks[] = {
            {r.accuracy, col.accuracy}, {r.precision, col.precision}, {r.recall, col.recall},
            {r.f1, col.f1},             {r.cohen_kappa, col.kappa},   {r.auc_binary, col.auc},
        };
        for (const auto& [got, want] : checks) {
            if (std::abs(got - want) > kMetricTol) {
                std::printf("      %s: got %.6f, printed %.3f\n", col.name, got, want);
                ok = false;
            }
        }
    }
    return ok;
}

bool grad_close(double a, double n) {
    return std::abs(a - n) <= 1e-4 * std::max(std::abs(a), std::abs(n)) + 1e-7;
}

// --- shared synthetic task for criteria 5-7 ---------------------------------

CnnConfig small_cnn_config(std::uint64_t seed, std::int32_t max_len) {
    CnnConfig cfg;
    cfg.filter_specs = {{2, 8}, {3, 8}};
    cfg.dropout_bank = {{2, 0.0}, {3, 0.0}};
    cfg.dropout_input = 0.0;
    cfg.dropout_dense = 0.0;
    cfg.dense_units = 16;
    cfg.max_len = max_len;
    cfg.batch_size = 16;
    cfg.epochs = 30;
    cfg.learning_rate = 2e-3;
    cfg.seed = seed;
    return cfg;
}

double accuracy_of(const CnnModel& model, const LabeledDataset& data) {
    std::int64_t correct = 0;
    for (const auto& row : data.rows)
        if (predict(model, row.encoded).label == row.label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.rows.size());
}

// In-domain unlabelled corpus: two topic clusters over shared filler. The
// labelled task marks tweets by cluster membership, but the test split uses
// signal tokens never seen in the labelled training half.
struct DomainTask {
    std::vector<std::vector<std::string>> unlabeled;
    std::vector<TokenRecord> train, test;
};

DomainTask make_domain_task(std::uint64_t seed) {
    const int cluster = 20, fillers = 30;
    Rng rng(seed);
    DomainTask task;
    auto token = [](const char* stem, int i) { return stem + std::to_string(i); };
    for (int s = 0; s < 8000; ++s) {
        const char* pool = s % 2 == 0 ? "aaa" : "bbb";
        std::vector<std::string> sentence;
        for (int t = 0; t < 4; ++t)
            sentence.push_back(token(pool, static_cast<int>(rng.uniform_int(cluster))));
        for (int t = 0; t < 4; ++t)
            sentence.push_back(token("fff", static_cast<int>(rng.uniform_int(fillers))));
        for (std::size_t t = sentence.size(); t > 1; --t)
            std::swap(sentence[t - 1], sentence[rng.uniform_int(t)]);
        task.unlabeled.push_back(std::move(sentence));
    }
    auto make_tweets = [&](int count, int lo, int hi, const std::string& prefix) {
        std::vector<TokenRecord> out;
        for (int i = 0; i < count; ++i) {
            const int label = i % 2;
            const char* pool = label == 1 ? "aaa" : "bbb";
            std::vector<std::string> tokens;
            for (int t = 0; t < 2; ++t)
                tokens.push_back(
                    token(pool, lo + static_cast<int>(rng.uniform_int(
                                         static_cast<std::uint64_t>(hi - lo)))));
            for (int t = 0; t < 6; ++t)
                tokens.push_back(token("fff", static_cast<int>(rng.uniform_int(fillers))));
            for (std::size_t t = tokens.size(); t > 1; --t)
                std::swap(tokens[t - 1], tokens[rng.uniform_int(t)]);
            out.push_back({prefix + std::to_string(i), tokens, label});
        }
        return out;
    };
    task.train = make_tweets(200, 0, 10, "tr");   // signals aaa0..9 / bbb0..9
    task.test = make_tweets(100, 10, 20, "te");   // signals aaa10..19 / bbb10..19
    return task;
}

}  // namespace

int main() {
    Runner runner;

    runner.criterion(1, "metric oracle: five embedding-run columns", [] {
        return check_columns({
            {"pre_model", {267, 283, 78, 94}, 0.762, 0.774, 0.740, 0.756, 0.524, 0.762},
            {"we2", {264, 279, 82, 97}, 0.752, 0.763, 0.731, 0.747, 0.504, 0.752},
            {"rnd_model", {194, 273, 88, 167}, 0.647, 0.688, 0.537, 0.603, 0.294, 0.647},
            {"we4", {217, 274, 87, 144}, 0.680, 0.714, 0.601, 0.653, 0.360, 0.680},
            {"we5", {199, 281, 80, 162}, 0.665, 0.713, 0.551, 0.622, 0.330, 0.665},
        });
    });

    runner.criterion(2, "metric oracle: nine classifier columns", [] {
        return check_columns({
            {"cnn", {267, 283, 78, 94}, 0.762, 0.774, 0.740, 0.756, 0.524, 0.762},
            {"lstm", {264, 263, 98, 97}, 0.730, 0.729, 0.731, 0.730, 0.460, 0.730},
            {"dnn", {275, 171, 190, 86}, 0.618, 0.591, 0.762, 0.666, 0.235, 0.618},
            {"svc", {257, 244, 117, 104}, 0.694, 0.687, 0.712, 0.699, 0.388, 0.694},
            {"rf", {279, 229, 132, 82}, 0.704, 0.679, 0.773, 0.723, 0.407, 0.704},
            {"xgb", {286, 223, 138, 75}, 0.705, 0.675, 0.792, 0.729, 0.410, 0.705},
            {"mnb", {272, 251, 110, 89}, 0.724, 0.712, 0.753, 0.732, 0.449, 0.724},
            {"knn", {95, 302, 59, 266}, 0.550, 0.617, 0.263, 0.369, 0.100, 0.550},
            {"rc", {263, 245, 116, 98}, 0.704, 0.694, 0.729, 0.711, 0.407, 0.704},
        });
    });

    runner.criterion(3, "metric oracle: seven augmentation columns", [] {
        return check_columns({
            {"at0", {267, 283, 78, 94}, 0.762, 0.774, 0.740, 0.756, 0.524, 0.762},
            {"at1", {270, 275, 86, 91}, 0.755, 0.758, 0.748, 0.753, 0.510, 0.755},
            {"at2", {242, 287, 74, 119}, 0.733, 0.766, 0.670, 0.715, 0.465, 0.733},
            {"at3", {301, 224, 137, 60}, 0.727, 0.687, 0.834, 0.753, 0.454, 0.727},
            {"at4", {281, 203, 158, 80}, 0.670, 0.640, 0.778, 0.703, 0.341, 0.670},
            {"at5", {292, 238, 123, 69}, 0.734, 0.704, 0.809, 0.753, 0.468, 0.734},
            {"at6", {288, 241, 120, 73}, 0.733, 0.706, 0.798, 0.749, 0.465, 0.733},
        });
    });

    runner.criterion(4, "analytic CNN gradients match finite differences, 10 seeds", [] {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto fix = fixtures::separable_tweets(4, seed * 100);
            auto data = fixtures::dataset_from_records(fix.records, 10);
            CnnConfig cfg;
            cfg.filter_specs = {{3, 2}, {4, 2}, {5, 2}};
            cfg.dropout_bank = {{3, 0.0}, {4, 0.0}, {5, 0.0}};
            cfg.dropout_input = 0.0;
            cfg.dropout_dense = 0.0;
            cfg.dense_units = 4;
            cfg.max_len = 10;
            cfg.seed = seed;
            CnnModel model = init_cnn(cfg, random_embedding(data.vocab, 8, seed + 1));

            std::vector<const EncodedTweet*> batch;
            std::vector<int> labels;
            for (const auto& row : data.rows) {
                batch.push_back(&row.encoded);
                labels.push_back(row.label);
            }
            Rng rng(0);
            auto fwd = forward_train(model, batch, rng);
            auto grads = backward(model, *fwd.cache, labels);

            auto check_group = [&](const Tensor2D& analytic, Tensor2D& param, bool skip_pad) {
                auto loss_of = [&](const Tensor2D& p) {
                    const Tensor2D saved = param;
                    param = p;
                    const double loss = batch_loss(model, batch, labels);
                    param = saved;
                    return loss;
                };
                // a coordinate within the step of a relu/max kink is
                // rechecked with a smaller step before it may fail
                auto coord = [&](std::size_t r, std::size_t c, double h) {
                    Tensor2D probe = param;
                    probe(r, c) = param(r, c) + h;
                    const double fp = loss_of(probe);
                    probe(r, c) = param(r, c) - h;
                    const double fm = loss_of(probe);
                    return (fp - fm) / (2.0 * h);
                };
                const Tensor2D numeric = finite_diff_grad(loss_of, param);
                for (std::size_t r = skip_pad ? 1 : 0; r < param.rows(); ++r)
                    for (std::size_t c = 0; c < param.cols(); ++c) {
                        if (grad_close(analytic(r, c), numeric(r, c))) continue;
                        if (!grad_close(analytic(r, c), coord(r, c, 1e-7))) return false;
                    }
                return true;
            };

            if (!check_group(grads.embedding, model.embedding.vectors, true)) return false;
            for (std::size_t b = 0; b < model.banks.size(); ++b) {
                if (!check_group(grads.bank_weights[b], model.banks[b].weights, false))
                    return false;
                if (!check_group(grads.bank_biases[b], model.banks[b].biases, false))
                    return false;
            }
            if (!check_group(grads.dense_w, model.dense_w, false)) return false;
            if (!check_group(grads.dense_b, model.dense_b, false)) return false;
            if (!check_group(grads.out_w, model.out_w, false)) return false;
            if (!check_group(grads.out_b, model.out_b, false)) return false;
        }
        return true;
    });

    runner.criterion(5, "CNN reaches 0.98 training accuracy on 200 separable tweets", [] {
        auto fix = fixtures::separable_tweets(200, 77);
        auto data = fixtures::dataset_from_records(fix.records, 10);
        CnnConfig cfg = small_cnn_config(21, 10);
        cfg.epochs = 200;
        cfg.batch_size = 32;
        CnnModel model = init_cnn(cfg, random_embedding(data.vocab, 16, 22));
        LabeledDataset no_valid;
        no_valid.vocab = data.vocab;
        no_valid.max_len = data.max_len;
        const auto history = train(model, data, no_valid);
        double best = 0.0;
        for (const auto& e : history.epochs) best = std::max(best, e.train_accuracy);
        if (best < 0.98) std::printf("      best train accuracy %.3f\n", best);
        return best >= 0.98;
    });

    runner.criterion(6, "domain pretraining beats random init by 5+ points (median)", [] {
        std::vector<double> gaps;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            DomainTask task = make_domain_task(seed * 1000);

            // pretrained arm: vocabulary and vectors from the in-domain corpus
            auto domain_vocab =
                std::make_shared<Vocabulary>(Vocabulary::build(task.unlabeled, 1));
            CbowConfig cbow;
            cbow.dim = 16;
            cbow.epochs = 5;
            cbow.seed = seed;
            auto pretrained = train_cbow(task.unlabeled, domain_vocab, cbow);
            pretrained.embedding.trainable = true;

            LabeledDataset train_pre = make_dataset(task.train, domain_vocab, 10);
            LabeledDataset test_pre = make_dataset(task.test, domain_vocab, 10);
            CnnModel pre_model = init_cnn(small_cnn_config(seed, 10), pretrained.embedding);
            LabeledDataset no_valid_pre;
            no_valid_pre.vocab = domain_vocab;
            no_valid_pre.max_len = 10;
            train(pre_model, train_pre, no_valid_pre);
            const double acc_pre = accuracy_of(pre_model, test_pre);

            // random-init arm: vocabulary from the labelled training half only,
            // randomly initialized vectors
            std::vector<std::vector<std::string>> train_sentences;
            for (const auto& rec : task.train) train_sentences.push_back(rec.tokens);
            auto label_vocab =
                std::make_shared<Vocabulary>(Vocabulary::build(train_sentences, 1));
            LabeledDataset train_rnd = make_dataset(task.train, label_vocab, 10);
            LabeledDataset test_rnd = make_dataset(task.test, label_vocab, 10);
            CnnModel rnd_model =
                init_cnn(small_cnn_config(seed, 10), random_embedding(label_vocab, 16, seed));
            LabeledDataset no_valid_rnd;
            no_valid_rnd.vocab = label_vocab;
            no_valid_rnd.max_len = 10;
            train(rnd_model, train_rnd, no_valid_rnd);
            const double acc_rnd = accuracy_of(rnd_model, test_rnd);

            gaps.push_back(acc_pre - acc_rnd);
            std::printf("      seed %llu: pretrained %.3f vs random %.3f\n",
                        static_cast<unsigned long long>(seed), acc_pre, acc_rnd);
        }
        std::sort(gaps.begin(), gaps.end());
        return gaps[2] >= 0.05;
    });

    runner.criterion(7, "frozen embedding block is bit-identical after training", [] {
        auto corpus = fixtures::cluster_corpus(500, 5);
        auto vocab = std::make_shared<Vocabulary>(Vocabulary::build(corpus, 1));
        CbowConfig cbow;
        cbow.dim = 12;
        cbow.epochs = 2;
        auto pretrained = train_cbow(corpus, vocab, cbow);
        pretrained.embedding.trainable = false;
        const auto before = pretrained.embedding.vectors.raw();

        std::vector<TokenRecord> records;
        Rng rng(3);
        for (int i = 0; i < 24; ++i) {
            std::vector<std::string> tokens;
            const char pool = i % 2 == 0 ? 'a' : 'b';
            for (int t = 0; t < 6; ++t) {
                auto names = fixtures::cluster_tokens(pool);
                tokens.push_back(names[rng.uniform_int(names.size())]);
            }
            records.push_back({"r" + std::to_string(i), tokens, i % 2});
        }
        LabeledDataset data = make_dataset(records, vocab, 8);
        CnnConfig cfg = small_cnn_config(9, 8);
        cfg.epochs = 5;
        CnnModel model = init_cnn(cfg, pretrained.embedding);
        LabeledDataset no_valid;
        no_valid.vocab = vocab;
        no_valid.max_len = 8;
        train(model, data, no_valid);
        return model.embedding.vectors.raw() == before;
    });

    runner.criterion(8, "CBOW separates the two-cluster corpus by 0.2 cosine", [] {
        auto corpus = fixtures::cluster_corpus(10000, 42);
        auto vocab = std::make_shared<Vocabulary>(Vocabulary::build(corpus, 1));
        CbowConfig cfg;
        cfg.dim = 16;
        cfg.epochs = 5;
        cfg.seed = 7;
        auto result = train_cbow(corpus, vocab, cfg);
        auto mean_cos = [&](const std::vector<std::string>& xs,
                            const std::vector<std::string>& ys) {
            double total = 0.0;
            std::size_t n = 0;
            for (const auto& x : xs)
                for (const auto& y : ys) {
                    if (x == y) continue;
                    total += cosine(result.embedding.row(*vocab->id(x)),
                                    result.embedding.row(*vocab->id(y)));
                    ++n;
                }
            return total / static_cast<double>(n);
        };
        const auto a = fixtures::cluster_tokens('a');
        const auto b = fixtures::cluster_tokens('b');
        const double intra = 0.5 * (mean_cos(a, a) + mean_cos(b, b));
        const double inter = mean_cos(a, b);
        std::printf("      intra %.3f inter %.3f\n", intra, inter);
        return intra - inter >= 0.2;
    });

    runner.criterion(9, "NMF error is monotone and recovers a rank-1 matrix", [] {
        Rng rng(12);
        Tensor2D v(50, 100);
        for (double& x : v.raw()) x = rng.uniform();
        auto f = nmf(v, 5, 200, 3);
        if (f.error_trace.size() != 200) return false;
        for (std::size_t i = 0; i + 1 < f.error_trace.size(); ++i)
            if (f.error_trace[i + 1] > f.error_trace[i] * (1.0 + 1e-10)) return false;

        std::vector<double> u(50), w(100);
        for (double& x : u) x = 0.5 + rng.uniform();
        for (double& x : w) x = 0.5 + rng.uniform();
        Tensor2D r1(50, 100);
        for (std::size_t i = 0; i < 50; ++i)
            for (std::size_t j = 0; j < 100; ++j) r1(i, j) = u[i] * w[j];
        auto g = nmf(r1, 1, 200, 4);
        return g.error_trace.back() / frobenius_norm(r1) <= 1e-3;
    });

    runner.criterion(10, "baseline oracles: kNN scan, MNB hand calc, ridge closed form", [] {
        // kNN equals an exhaustive scan
        Rng rng(91);
        std::vector<BowVector> train;
        std::vector<int> labels;
        for (int i = 0; i < 200; ++i) {
            BowVector v;
            const std::size_t nnz = 1 + rng.uniform_int(6);
            for (std::size_t t = 0; t < nnz; ++t)
                v.weights[2 + static_cast<std::int32_t>(rng.uniform_int(20))] =
                    1.0 + rng.uniform();
            train.push_back(std::move(v));
            labels.push_back(static_cast<int>(rng.uniform_int(2)));
        }
        auto oracle = [&](const BowVector& query, int k) {
            auto norm = [](const BowVector& v) {
                double s = 0.0;
                for (const auto& [id, w] : v.weights) s += w * w;
                return std::sqrt(s);
            };
            std::vector<std::pair<double, std::size_t>> scored;
            for (std::size_t i = 0; i < train.size(); ++i) {
                double dot = 0.0;
                for (const auto& [id, w] : query.weights) {
                    auto it = train[i].weights.find(id);
                    if (it != train[i].weights.end()) dot += w * it->second;
                }
                const double nq = norm(query), nt = norm(train[i]);
                scored.emplace_back((nq == 0.0 || nt == 0.0) ? 0.0 : dot / (nq * nt), i);
            }
            std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first) return a.first > b.first;
                return a.second < b.second;
            });
            int votes = 0;
            for (int i = 0; i < k; ++i) votes += labels[scored[static_cast<std::size_t>(i)].second];
            return votes > k - votes ? 1 : 0;
        };
        for (int q = 0; q < 50; ++q) {
            BowVector query;
            const std::size_t nnz = 1 + rng.uniform_int(6);
            for (std::size_t t = 0; t < nnz; ++t)
                query.weights[2 + static_cast<std::int32_t>(rng.uniform_int(20))] =
                    1.0 + rng.uniform();
            for (int k : {1, 3, 5})
                if (knn_predict(train, labels, query, k) != oracle(query, k)) return false;
        }

        // MNB matches the literal smoothing arithmetic
        std::vector<BowVector> docs(4);
        docs[0].weights = {{2, 2.0}, {3, 1.0}};
        docs[1].weights = {{2, 1.0}, {4, 1.0}};
        docs[2].weights = {{3, 2.0}, {4, 1.0}};
        docs[3].weights = {{4, 1.0}};
        auto mnb = train_mnb(docs, {0, 0, 1, 1}, 5, 1.0);
        BowVector query;
        query.weights = {{2, 1.0}, {3, 1.0}};
        const auto scores = mnb_log_posterior(mnb, query);
        const double s0 = std::log(0.5) + std::log(4.0 / 8.0) + std::log(2.0 / 8.0);
        const double s1 = std::log(0.5) + std::log(1.0 / 7.0) + std::log(3.0 / 7.0);
        if (std::abs(scores[0] - s0) > 1e-9 || std::abs(scores[1] - s1) > 1e-9) return false;

        // ridge: 1-D closed form and the normal equations residual
        std::vector<BowVector> oned(2);
        oned[0].weights = {{0, 1.0}};
        oned[1].weights = {{0, 2.0}};
        auto ridge1 = ridge_fit(oned, {0, 1}, 1, 1.0);
        if (std::abs(ridge1.weights[0] - 1.0 / 6.0) > 1e-12) return false;

        std::vector<BowVector> rdata;
        std::vector<int> rlabels;
        for (int i = 0; i < 40; ++i) {
            BowVector v;
            for (int t = 0; t < 4; ++t)
                v.weights[static_cast<std::int32_t>(rng.uniform_int(10))] = rng.uniform();
            rdata.push_back(std::move(v));
            rlabels.push_back(static_cast<int>(rng.uniform_int(2)));
        }
        const double lambda = 0.7;
        auto fitted = ridge_fit(rdata, rlabels, 10, lambda);
        std::vector<std::vector<double>> gram(10, std::vector<double>(10, 0.0));
        std::vector<double> xty(10, 0.0);
        for (std::size_t i = 0; i < rdata.size(); ++i) {
            const double y = rlabels[i] == 1 ? 1.0 : -1.0;
            for (const auto& [r, wr] : rdata[i].weights) {
                xty[static_cast<std::size_t>(r)] += wr * y;
                for (const auto& [c, wc] : rdata[i].weights)
                    gram[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] += wr * wc;
            }
        }
        double residual = 0.0;
        for (std::size_t r = 0; r < 10; ++r) {
            double lhs = lambda * fitted.weights[r];
            for (std::size_t c = 0; c < 10; ++c) lhs += gram[r][c] * fitted.weights[c];
            residual = std::max(residual, std::abs(lhs - xty[r]));
        }
        return residual <= 1e-8;
    });

    runner.criterion(11, "augmentation counting and label rules on a 100-tweet fixture", [] {
        auto fix = fixtures::separable_tweets(100, 55);
        auto data = fixtures::dataset_from_records(fix.records, 24);
        auto emb = random_embedding(data.vocab, 8, 56);
        AugmentParams params;
        params.seed = 57;
        params.nmf_rank = 5;
        params.nmf_iterations = 80;
        auto runs = run_at_suite(data, emb, params);
        if (runs.size() != 7) return false;
        const std::size_t expected[] = {100, 200, 200, 100, 100, 100 + 2 * 5, 200};
        for (std::size_t r = 0; r < 7; ++r)
            if (runs[r].output_size != expected[r]) return false;

        std::unordered_map<std::string, int> label_of;
        for (const auto& row : data.rows) label_of[row.id] = row.label;
        for (const auto& run : runs) {
            std::array<std::int64_t, 2> at5_counts{0, 0};
            for (const auto& row : run.data.rows) {
                const auto slash = row.id.find('/');
                if (slash != std::string::npos) {
                    if (row.label != label_of.at(row.id.substr(0, slash))) return false;
                } else if (row.id.rfind("at5-", 0) == 0) {
                    ++at5_counts[row.label];
                } else if (row.label != label_of.at(row.id)) {
                    return false;
                }
            }
            if (run.kind == PolicyKind::AT5 &&
                (at5_counts[0] != params.nmf_rank || at5_counts[1] != params.nmf_rank))
                return false;
        }
        return true;
    });

    runner.criterion(12, "stratified split and ten folds are exact on 1800+1800", [] {
        auto data = fixtures::trivial_dataset(1800, 1800);
        auto [train, test] = stratified_split(data, 0.2, 100);
        if (train.class_counts() != std::array<std::int64_t, 2>{1440, 1440}) return false;
        if (test.class_counts() != std::array<std::int64_t, 2>{360, 360}) return false;

        auto folds = kfold(data, 10, 101);
        if (folds.size() != 10) return false;
        std::set<std::string> seen;
        for (const auto& [fold_train, fold_valid] : folds) {
            if (fold_valid.class_counts() != std::array<std::int64_t, 2>{180, 180}) return false;
            if (fold_train.size() + fold_valid.size() != data.size()) return false;
            for (const auto& row : fold_valid.rows)
                if (!seen.insert(row.id).second) return false;  // overlap
        }
        return seen.size() == data.size();
    });

    runner.criterion(13, "two identical train+eval runs emit byte-identical metrics", [] {
        const fs::path root = fs::temp_directory_path() / "tweetlab_acceptance_e2e";
        fs::remove_all(root);
        fs::create_directories(root);

        auto fix = fixtures::separable_tweets(48, 99);
        std::vector<TweetRecord> records;
        for (const auto& rec : fix.records) {
            std::string text;
            for (const auto& tok : rec.tokens) {
                if (!text.empty()) text += ' ';
                text += tok;
            }
            records.push_back({rec.id, text, rec.label});
        }
        write_jsonl(records, (root / "labeled.jsonl").string());

        auto config_for = [&](const std::string& out) {
            std::ostringstream cfg;
            cfg << "paths.labeled=" << (root / "labeled.jsonl").string() << "\n"
                << "paths.out=" << (root / out).string() << "\n"
                << "embedding.mode=random\nembedding.dim=8\n"
                << "cnn.filters=2:2,3:2\ncnn.dropout.input=0.3\ncnn.dropout.dense=0.3\n"
                << "cnn.dense_units=4\ncnn.max_len=12\ncnn.batch_size=8\ncnn.epochs=4\n"
                << "train.valid_fraction=0.2\nsplit.test_fraction=0.25\n"
                << "baselines=dnn,mnb,knn,ridge\nbaseline.dnn_epochs=10\nseed=31\n";
            return ExperimentConfig::from_string(cfg.str());
        };
        for (const char* out : {"a", "b"}) {
            const auto cfg = config_for(out);
            run_train(cfg);
            std::ostringstream sink;  // keep the eval table off the criterion log
            auto* saved = std::cout.rdbuf(sink.rdbuf());
            try {
                run_eval(cfg);
            } catch (...) {
                std::cout.rdbuf(saved);
                throw;
            }
            std::cout.rdbuf(saved);
        }
        auto slurp = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream s;
            s << in.rdbuf();
            return s.str();
        };
        const bool equal = slurp(root / "a" / "metrics.csv") == slurp(root / "b" / "metrics.csv");
        fs::remove_all(root);
        return equal;
    });

    std::printf("%d of 13 criteria passed\n", 13 - runner.failures);
    return runner.failures == 0 ? 0 : 1;
}
