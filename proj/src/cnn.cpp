#include "tweetlab/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "tweetlab/optim.hpp"

namespace tweetlab {

std::int32_t CnnConfig::total_filters() const noexcept {
    std::int32_t total = 0;
    for (const auto& spec : filter_specs) total += spec.count;
    return total;
}

void CnnConfig::validate() const {
    if (filter_specs.empty()) throw std::invalid_argument("cnn config: no filter specs");
    for (const auto& spec : filter_specs) {
        if (spec.count < 1) throw std::invalid_argument("cnn config: filter count must be >= 1");
        if (spec.height < 1 || spec.height > max_len)
            throw std::invalid_argument("cnn config: filter height must lie in [1, max_len]");
        if (!dropout_bank.count(spec.height))
            throw std::invalid_argument("cnn config: missing dropout rate for filter height " +
                                        std::to_string(spec.height));
    }
    auto check_rate = [](double r, const char* name) {
        if (r < 0.0 || r >= 1.0)
            throw std::invalid_argument(std::string("cnn config: dropout rate for ") + name +
                                        " must lie in [0,1)");
    };
    check_rate(dropout_input, "input");
    check_rate(dropout_dense, "dense");
    for (const auto& [h, r] : dropout_bank) check_rate(r, "bank");
    if (dense_units < 1) throw std::invalid_argument("cnn config: dense_units must be >= 1");
    if (max_len < 1) throw std::invalid_argument("cnn config: max_len must be >= 1");
}

double conv_maxpool(const Tensor2D& tweet, const Tensor2D& filter, double bias) {
    const std::size_t m = tweet.rows(), h = filter.rows();
    if (tweet.cols() != filter.cols())
        throw std::invalid_argument("conv_maxpool: embedding width mismatch");
    if (m < h) throw std::invalid_argument("conv_maxpool: tweet shorter than filter");
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + h <= m; ++k) {
        double s = bias;
        for (std::size_t r = 0; r < h; ++r) {
            const double* trow = tweet.row(k + r);
            const double* frow = filter.row(r);
            for (std::size_t c = 0; c < tweet.cols(); ++c) s += trow[c] * frow[c];
        }
        best = std::max(best, s);
    }
    return relu(best);
}

double bce_loss(double p, int label) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("bce_loss: p must lie in (0,1)");
    return label == 1 ? -std::log(p) : -std::log(1.0 - p);
}

CnnModel init_cnn(const CnnConfig& config, EmbeddingMatrix embedding) {
    config.validate();
    for (const auto& spec : config.filter_specs)
        if (spec.height > config.max_len)
            throw std::invalid_argument("init_cnn: filter height exceeds max_len");

    CnnModel model;
    model.config = config;
    model.embedding = std::move(embedding);
    Rng rng(config.seed);
    Rng init_rng = rng.child("cnn-init");

    const auto dim = static_cast<std::size_t>(model.embedding.dim);
    std::vector<FilterSpec> specs = config.filter_specs;
    std::sort(specs.begin(), specs.end(),
              [](const FilterSpec& a, const FilterSpec& b) { return a.height < b.height; });
    for (const auto& spec : specs) {
        FilterBank bank;
        bank.height = spec.height;
        bank.weights = Tensor2D(static_cast<std::size_t>(spec.count),
                                static_cast<std::size_t>(spec.height) * dim);
        for (double& v : bank.weights.raw()) v = init_rng.uniform(-0.05, 0.05);
        bank.biases = Tensor2D(1, static_cast<std::size_t>(spec.count));
        model.banks.push_back(std::move(bank));
    }

    const auto total = static_cast<std::size_t>(config.total_filters());
    const auto dense = static_cast<std::size_t>(config.dense_units);
    model.dense_w = Tensor2D(total, dense);
    const double dense_bound = 1.0 / std::sqrt(static_cast<double>(total));
    for (double& v : model.dense_w.raw()) v = init_rng.uniform(-dense_bound, dense_bound);
    model.dense_b = Tensor2D(1, dense);
    model.out_w = Tensor2D(dense, 1);
    const double out_bound = 1.0 / std::sqrt(static_cast<double>(dense));
    for (double& v : model.out_w.raw()) v = init_rng.uniform(-out_bound, out_bound);
    model.out_b = Tensor2D(1, 1);
    return model;
}

namespace {

struct SampleCache {
    const EncodedTweet* tweet = nullptr;
    Tensor2D x;                      // max_len x dim after input dropout
    Tensor2D input_mask;             // empty in eval mode
    std::vector<std::int32_t> argmax;  // per filter
    std::vector<double> pre_pool;      // max pre-activation per filter
    std::vector<double> pooled_dropped;  // after relu and bank dropout
    std::vector<double> bank_mask;       // per filter
    std::vector<double> z1, a1_dropped, dense_mask;
    double prob = 0.0;
};

}  // namespace

struct BatchCache {
    std::vector<SampleCache> samples;
    bool train_mode = false;
};

namespace {

void forward_sample(const CnnModel& model, const EncodedTweet& tweet, bool train_mode, Rng* rng,
                    SampleCache& s) {
    const auto dim = static_cast<std::size_t>(model.embedding.dim);
    const auto max_len = static_cast<std::size_t>(model.config.max_len);
    s.tweet = &tweet;
    s.x = Tensor2D(max_len, dim);
    for (std::size_t t = 0; t < max_len; ++t) {
        const double* row = model.embedding.vectors.row(static_cast<std::size_t>(tweet.ids[t]));
        std::memcpy(s.x.row(t), row, dim * sizeof(double));
    }
    if (train_mode && model.config.dropout_input > 0.0) {
        s.input_mask = dropout_mask(max_len, dim, model.config.dropout_input, *rng);
        s.x = hadamard(s.x, s.input_mask);
    }

    const auto total = static_cast<std::size_t>(model.config.total_filters());
    s.argmax.assign(total, 0);
    s.pre_pool.assign(total, 0.0);
    s.bank_mask.assign(total, 1.0);
    s.pooled_dropped.assign(total, 0.0);

    std::size_t f = 0;
    for (const auto& bank : model.banks) {
        const auto h = static_cast<std::size_t>(bank.height);
        const std::size_t positions = max_len - h + 1;
        const std::size_t window = h * dim;
        for (std::size_t j = 0; j < bank.weights.rows(); ++j, ++f) {
            const double* w = bank.weights.row(j);
            double best = -std::numeric_limits<double>::infinity();
            std::int32_t best_k = 0;
            for (std::size_t k = 0; k < positions; ++k) {
                const double* slice = s.x.row(k);  // rows are contiguous
                double acc = bank.biases(0, j);
                for (std::size_t i = 0; i < window; ++i) acc += w[i] * slice[i];
                if (acc > best) {
                    best = acc;
                    best_k = static_cast<std::int32_t>(k);
                }
            }
            s.pre_pool[f] = best;
            s.argmax[f] = best_k;
        }
    }
    if (train_mode) {
        std::size_t offset = 0;
        for (const auto& bank : model.banks) {
            const double rate = model.config.dropout_bank.at(bank.height);
            if (rate > 0.0) {
                Tensor2D mask = dropout_mask(1, bank.weights.rows(), rate, *rng);
                for (std::size_t j = 0; j < bank.weights.rows(); ++j)
                    s.bank_mask[offset + j] = mask(0, j);
            }
            offset += bank.weights.rows();
        }
    }
    for (std::size_t i = 0; i < total; ++i)
        s.pooled_dropped[i] = relu(s.pre_pool[i]) * s.bank_mask[i];

    const auto dense = static_cast<std::size_t>(model.config.dense_units);
    s.z1.assign(dense, 0.0);
    for (std::size_t i = 0; i < total; ++i) {
        const double p = s.pooled_dropped[i];
        if (p == 0.0) continue;
        const double* wrow = model.dense_w.row(i);
        for (std::size_t d = 0; d < dense; ++d) s.z1[d] += p * wrow[d];
    }
    for (std::size_t d = 0; d < dense; ++d) s.z1[d] += model.dense_b(0, d);

    s.dense_mask.assign(dense, 1.0);
    if (train_mode && model.config.dropout_dense > 0.0) {
        Tensor2D mask = dropout_mask(1, dense, model.config.dropout_dense, *rng);
        for (std::size_t d = 0; d < dense; ++d) s.dense_mask[d] = mask(0, d);
    }
    s.a1_dropped.assign(dense, 0.0);
    double z2 = model.out_b(0, 0);
    for (std::size_t d = 0; d < dense; ++d) {
        s.a1_dropped[d] = relu(s.z1[d]) * s.dense_mask[d];
        z2 += s.a1_dropped[d] * model.out_w(d, 0);
    }
    s.prob = sigmoid(z2);
    if (!std::isfinite(s.prob)) throw std::runtime_error("cnn forward: non-finite probability");
}

void check_batch(const CnnModel& model, const std::vector<const EncodedTweet*>& batch) {
    if (batch.empty()) throw std::invalid_argument("cnn forward: empty batch");
    for (const auto* tweet : batch) {
        if (static_cast<std::int32_t>(tweet->ids.size()) != model.config.max_len)
            throw std::invalid_argument("cnn forward: tweet length does not match max_len");
        for (std::int32_t id : tweet->ids)
            if (id < 0 || static_cast<std::size_t>(id) >= model.embedding.vocab->size())
                throw std::invalid_argument("cnn forward: token id outside vocabulary");
    }
}

}  // namespace

std::vector<double> forward_eval(const CnnModel& model,
                                 const std::vector<const EncodedTweet*>& batch) {
    check_batch(model, batch);
    std::vector<double> probs;
    probs.reserve(batch.size());
    SampleCache s;
    for (const auto* tweet : batch) {
        forward_sample(model, *tweet, false, nullptr, s);
        probs.push_back(s.prob);
    }
    return probs;
}

ForwardResult forward_train(const CnnModel& model, const std::vector<const EncodedTweet*>& batch,
                            Rng& rng) {
    check_batch(model, batch);
    ForwardResult result;
    result.cache = std::make_shared<BatchCache>();
    result.cache->train_mode = true;
    result.cache->samples.resize(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        forward_sample(model, *batch[i], true, &rng, result.cache->samples[i]);
        result.probabilities.push_back(result.cache->samples[i].prob);
    }
    return result;
}

CnnGradients backward(const CnnModel& model, const BatchCache& cache,
                      const std::vector<int>& labels) {
    if (!cache.train_mode || cache.samples.empty())
        throw std::invalid_argument("cnn backward: stale or eval-mode cache");
    if (labels.size() != cache.samples.size())
        throw std::invalid_argument("cnn backward: label count mismatch");

    const auto dim = static_cast<std::size_t>(model.embedding.dim);
    const auto total = static_cast<std::size_t>(model.config.total_filters());
    const auto dense = static_cast<std::size_t>(model.config.dense_units);
    const bool train_embedding = model.embedding.trainable;

    CnnGradients g;
    if (train_embedding) g.embedding = Tensor2D(model.embedding.vocab->size(), dim);
    for (const auto& bank : model.banks) {
        g.bank_weights.emplace_back(bank.weights.rows(), bank.weights.cols());
        g.bank_biases.emplace_back(1, bank.biases.cols());
    }
    g.dense_w = Tensor2D(total, dense);
    g.dense_b = Tensor2D(1, dense);
    g.out_w = Tensor2D(dense, 1);
    g.out_b = Tensor2D(1, 1);

    const double inv_batch = 1.0 / static_cast<double>(cache.samples.size());
    std::vector<double> dpooled(total), dz1(dense);
    Tensor2D dx;

    for (std::size_t n = 0; n < cache.samples.size(); ++n) {
        const SampleCache& s = cache.samples[n];
        const double dz2 = (s.prob - static_cast<double>(labels[n])) * inv_batch;

        g.out_b(0, 0) += dz2;
        std::fill(dz1.begin(), dz1.end(), 0.0);
        for (std::size_t d = 0; d < dense; ++d) {
            g.out_w(d, 0) += dz2 * s.a1_dropped[d];
            const double da1 = dz2 * model.out_w(d, 0) * s.dense_mask[d];
            dz1[d] = s.z1[d] > 0.0 ? da1 : 0.0;
        }

        std::fill(dpooled.begin(), dpooled.end(), 0.0);
        for (std::size_t i = 0; i < total; ++i) {
            const double p = s.pooled_dropped[i];
            const double* wrow = model.dense_w.row(i);
            double* grow = g.dense_w.row(i);
            double acc = 0.0;
            for (std::size_t d = 0; d < dense; ++d) {
                grow[d] += p * dz1[d];
                acc += wrow[d] * dz1[d];
            }
            dpooled[i] = acc * s.bank_mask[i];
        }
        for (std::size_t d = 0; d < dense; ++d) g.dense_b(0, d) += dz1[d];

        dx = Tensor2D(s.x.rows(), dim);
        std::size_t f = 0;
        for (std::size_t b = 0; b < model.banks.size(); ++b) {
            const auto& bank = model.banks[b];
            const std::size_t window = static_cast<std::size_t>(bank.height) * dim;
            for (std::size_t j = 0; j < bank.weights.rows(); ++j, ++f) {
                // max pooling routes gradient to the argmax window only,
                // and relu kills it when the best pre-activation is <= 0
                if (s.pre_pool[f] <= 0.0) continue;
                const double ds = dpooled[f];
                if (ds == 0.0) continue;
                g.bank_biases[b](0, j) += ds;
                const auto k = static_cast<std::size_t>(s.argmax[f]);
                const double* slice = s.x.row(k);
                const double* w = bank.weights.row(j);
                double* gw = g.bank_weights[b].row(j);
                double* gx = dx.row(k);
                for (std::size_t i = 0; i < window; ++i) {
                    gw[i] += ds * slice[i];
                    gx[i] += ds * w[i];
                }
            }
        }

        if (train_embedding) {
            const bool masked = s.input_mask.size() > 0;
            for (std::size_t t = 0; t < s.x.rows(); ++t) {
                const auto id = static_cast<std::size_t>(s.tweet->ids[t]);
                if (id == static_cast<std::size_t>(kPadId)) continue;  // pad row stays zero
                double* grow = g.embedding.row(id);
                const double* dxrow = dx.row(t);
                if (masked) {
                    const double* mrow = s.input_mask.row(t);
                    for (std::size_t c = 0; c < dim; ++c) grow[c] += dxrow[c] * mrow[c];
                } else {
                    for (std::size_t c = 0; c < dim; ++c) grow[c] += dxrow[c];
                }
            }
        }
    }
    return g;
}

double batch_loss(const CnnModel& model, const std::vector<const EncodedTweet*>& batch,
                  const std::vector<int>& labels) {
    const auto probs = forward_eval(model, batch);
    double loss = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        loss += bce_loss(std::clamp(probs[i], 1e-12, 1.0 - 1e-12), labels[i]);
    return loss / static_cast<double>(probs.size());
}

namespace {

double accuracy_on(const CnnModel& model, const LabeledDataset& data) {
    if (data.rows.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::vector<const EncodedTweet*> batch;
    batch.reserve(data.rows.size());
    for (const auto& row : data.rows) batch.push_back(&row.encoded);
    const auto probs = forward_eval(model, batch);
    std::int64_t correct = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const int label = probs[i] >= model.config.threshold ? 1 : 0;
        if (label == data.rows[i].label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(probs.size());
}

struct ModelParams {
    Tensor2D embedding;
    std::vector<Tensor2D> bank_weights, bank_biases;
    Tensor2D dense_w, dense_b, out_w, out_b;
};

ModelParams snapshot(const CnnModel& m) {
    ModelParams p;
    p.embedding = m.embedding.vectors;
    for (const auto& b : m.banks) {
        p.bank_weights.push_back(b.weights);
        p.bank_biases.push_back(b.biases);
    }
    p.dense_w = m.dense_w;
    p.dense_b = m.dense_b;
    p.out_w = m.out_w;
    p.out_b = m.out_b;
    return p;
}

void restore(CnnModel& m, const ModelParams& p) {
    m.embedding.vectors = p.embedding;
    for (std::size_t b = 0; b < m.banks.size(); ++b) {
        m.banks[b].weights = p.bank_weights[b];
        m.banks[b].biases = p.bank_biases[b];
    }
    m.dense_w = p.dense_w;
    m.dense_b = p.dense_b;
    m.out_w = p.out_w;
    m.out_b = p.out_b;
}

}  // namespace

TrainHistory train(CnnModel& model, const LabeledDataset& train_data,
                   const LabeledDataset& valid_data) {
    if (train_data.rows.empty()) throw std::invalid_argument("cnn train: empty training set");
    if (train_data.vocab->hash() != model.embedding.vocab->hash())
        throw std::invalid_argument("cnn train: dataset vocabulary does not match the model");
    if (train_data.max_len != model.config.max_len)
        throw std::invalid_argument("cnn train: dataset max_len does not match the model");

    const CnnConfig& cfg = model.config;
    Rng rng(cfg.seed);
    Rng shuffle_rng = rng.child("cnn-shuffle");
    Rng dropout_rng = rng.child("cnn-dropout");

    const AdamHyper hyper{cfg.learning_rate, 0.9, 0.999, 1e-8};
    const bool train_embedding = model.embedding.trainable;
    AdamState emb_state(model.embedding.vectors.rows(), model.embedding.vectors.cols(), hyper);
    std::vector<AdamState> bank_w_states, bank_b_states;
    for (const auto& bank : model.banks) {
        bank_w_states.emplace_back(bank.weights.rows(), bank.weights.cols(), hyper);
        bank_b_states.emplace_back(std::size_t{1}, bank.biases.cols(), hyper);
    }
    AdamState dense_w_state(model.dense_w.rows(), model.dense_w.cols(), hyper);
    AdamState dense_b_state(std::size_t{1}, model.dense_b.cols(), hyper);
    AdamState out_w_state(model.out_w.rows(), std::size_t{1}, hyper);
    AdamState out_b_state(std::size_t{1}, std::size_t{1}, hyper);

    TrainHistory history;
    ModelParams best = snapshot(model);
    double best_valid = -1.0;
    int epochs_since_improvement = 0;
    const bool has_valid = !valid_data.rows.empty();

    std::vector<std::size_t> order(train_data.rows.size());
    std::iota(order.begin(), order.end(), 0);
    const auto batch_size = static_cast<std::size_t>(std::max(1, cfg.batch_size));

    for (std::int32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_int(i)]);

        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t stop = std::min(order.size(), start + batch_size);
            std::vector<const EncodedTweet*> batch;
            std::vector<int> labels;
            batch.reserve(stop - start);
            for (std::size_t i = start; i < stop; ++i) {
                batch.push_back(&train_data.rows[order[i]].encoded);
                labels.push_back(train_data.rows[order[i]].label);
            }
            ForwardResult fwd = forward_train(model, batch, dropout_rng);
            double batch_bce = 0.0;
            for (std::size_t i = 0; i < fwd.probabilities.size(); ++i)
                batch_bce +=
                    bce_loss(std::clamp(fwd.probabilities[i], 1e-12, 1.0 - 1e-12), labels[i]);
            loss_sum += batch_bce / static_cast<double>(fwd.probabilities.size());
            ++batches;

            CnnGradients grads = backward(model, *fwd.cache, labels);
            if (train_embedding) adam_step(model.embedding.vectors, grads.embedding, emb_state);
            for (std::size_t b = 0; b < model.banks.size(); ++b) {
                adam_step(model.banks[b].weights, grads.bank_weights[b], bank_w_states[b]);
                adam_step(model.banks[b].biases, grads.bank_biases[b], bank_b_states[b]);
            }
            adam_step(model.dense_w, grads.dense_w, dense_w_state);
            adam_step(model.dense_b, grads.dense_b, dense_b_state);
            adam_step(model.out_w, grads.out_w, out_w_state);
            adam_step(model.out_b, grads.out_b, out_b_state);
        }

        EpochStats stats;
        stats.train_loss = batches > 0 ? loss_sum / static_cast<double>(batches) : 0.0;
        stats.train_accuracy = accuracy_on(model, train_data);
        stats.valid_accuracy = accuracy_on(model, valid_data);
        history.epochs.push_back(stats);

        if (has_valid) {
            if (stats.valid_accuracy > best_valid) {
                best_valid = stats.valid_accuracy;
                best = snapshot(model);
                epochs_since_improvement = 0;
            } else {
                ++epochs_since_improvement;
                if (epochs_since_improvement >= cfg.patience) break;
            }
        }
    }
    if (has_valid && best_valid >= 0.0) restore(model, best);
    return history;
}

Prediction predict(const CnnModel& model, const EncodedTweet& tweet) {
    const auto probs = forward_eval(model, {&tweet});
    Prediction p;
    p.probability = probs[0];
    p.label = p.probability >= model.config.threshold ? 1 : 0;
    return p;
}

// --- checkpoint I/O ---------------------------------------------------------

namespace {

constexpr char kCnnMagic[4] = {'T', 'L', 'C', 'K'};
constexpr std::uint32_t kCnnVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
}

void write_tensor(std::ofstream& out, const Tensor2D& t) {
    write_pod(out, static_cast<std::uint64_t>(t.rows()));
    write_pod(out, static_cast<std::uint64_t>(t.cols()));
    out.write(reinterpret_cast<const char*>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
}

Tensor2D read_tensor(std::ifstream& in) {
    std::uint64_t rows = 0, cols = 0;
    read_pod(in, rows);
    read_pod(in, cols);
    Tensor2D t(rows, cols);
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    return t;
}

}  // namespace

void save_cnn(const CnnModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_cnn: cannot open '" + path + "'");
    out.write(kCnnMagic, 4);
    write_pod(out, kCnnVersion);

    const CnnConfig& c = model.config;
    write_pod(out, static_cast<std::uint32_t>(c.filter_specs.size()));
    for (const auto& spec : c.filter_specs) {
        write_pod(out, spec.height);
        write_pod(out, spec.count);
        write_pod(out, c.dropout_bank.at(spec.height));
    }
    write_pod(out, c.dense_units);
    write_pod(out, c.dropout_input);
    write_pod(out, c.dropout_dense);
    write_pod(out, c.threshold);
    write_pod(out, c.max_len);
    write_pod(out, c.batch_size);
    write_pod(out, c.epochs);
    write_pod(out, c.patience);
    write_pod(out, c.learning_rate);
    write_pod(out, c.seed);

    write_pod(out, model.embedding.vocab->hash());
    write_pod(out, model.embedding.dim);
    write_pod(out, static_cast<std::uint8_t>(model.embedding.provenance));
    write_pod(out, static_cast<std::uint8_t>(model.embedding.trainable ? 1 : 0));
    write_tensor(out, model.embedding.vectors);
    for (const auto& bank : model.banks) {
        write_tensor(out, bank.weights);
        write_tensor(out, bank.biases);
    }
    write_tensor(out, model.dense_w);
    write_tensor(out, model.dense_b);
    write_tensor(out, model.out_w);
    write_tensor(out, model.out_b);
    if (!out) throw std::runtime_error("save_cnn: write failed for '" + path + "'");
}

CnnModel load_cnn(const std::string& path, std::shared_ptr<const Vocabulary> vocab) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_cnn: cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kCnnMagic, 4) != 0)
        throw std::runtime_error("load_cnn: '" + path + "' is not a model checkpoint");
    std::uint32_t version = 0;
    read_pod(in, version);
    if (version != kCnnVersion)
        throw std::runtime_error("load_cnn: unsupported version " + std::to_string(version));

    CnnModel model;
    CnnConfig& c = model.config;
    c.filter_specs.clear();
    c.dropout_bank.clear();
    std::uint32_t n_specs = 0;
    read_pod(in, n_specs);
    for (std::uint32_t i = 0; i < n_specs; ++i) {
        FilterSpec spec;
        double rate = 0.0;
        read_pod(in, spec.height);
        read_pod(in, spec.count);
        read_pod(in, rate);
        c.filter_specs.push_back(spec);
        c.dropout_bank[spec.height] = rate;
    }
    read_pod(in, c.dense_units);
    read_pod(in, c.dropout_input);
    read_pod(in, c.dropout_dense);
    read_pod(in, c.threshold);
    read_pod(in, c.max_len);
    read_pod(in, c.batch_size);
    read_pod(in, c.epochs);
    read_pod(in, c.patience);
    read_pod(in, c.learning_rate);
    read_pod(in, c.seed);

    std::uint64_t stored_hash = 0;
    read_pod(in, stored_hash);
    if (stored_hash != vocab->hash()) {
        char stored[24], given[24];
        std::snprintf(stored, sizeof stored, "%016llx",
                      static_cast<unsigned long long>(stored_hash));
        std::snprintf(given, sizeof given, "%016llx",
                      static_cast<unsigned long long>(vocab->hash()));
        throw std::runtime_error(std::string("load_cnn: vocabulary hash mismatch: checkpoint ") +
                                 stored + " vs dataset " + given);
    }
    model.embedding.vocab = std::move(vocab);
    read_pod(in, model.embedding.dim);
    std::uint8_t provenance = 0, trainable = 0;
    read_pod(in, provenance);
    read_pod(in, trainable);
    model.embedding.provenance = static_cast<Provenance>(provenance);
    model.embedding.trainable = trainable != 0;
    model.embedding.vectors = read_tensor(in);
    for (std::uint32_t i = 0; i < n_specs; ++i) {
        FilterBank bank;
        bank.height = c.filter_specs[i].height;
        bank.weights = read_tensor(in);
        bank.biases = read_tensor(in);
        model.banks.push_back(std::move(bank));
    }
    model.dense_w = read_tensor(in);
    model.dense_b = read_tensor(in);
    model.out_w = read_tensor(in);
    model.out_b = read_tensor(in);
    if (!in) throw std::runtime_error("load_cnn: truncated file '" + path + "'");
    return model;
}

void save_vocab(const Vocabulary& vocab, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_vocab: cannot open '" + path + "'");
    for (std::size_t id = 2; id < vocab.size(); ++id)
        out << vocab.token(static_cast<std::int32_t>(id)) << '\t'
            << vocab.count(static_cast<std::int32_t>(id)) << '\n';
    if (!out) throw std::runtime_error("save_vocab: write failed for '" + path + "'");
}

std::shared_ptr<const Vocabulary> load_vocab(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_vocab: cannot open '" + path + "'");
    std::vector<std::pair<std::string, std::int64_t>> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("load_vocab: malformed line in '" + path + "'");
        entries.emplace_back(line.substr(0, tab), std::stoll(line.substr(tab + 1)));
    }
    return std::make_shared<Vocabulary>(Vocabulary::from_entries(entries));
}

}  // namespace tweetlab
