#include "tweetlab/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "tweetlab/optim.hpp"
#include "tweetlab/rng.hpp"

namespace tweetlab {

IdfModel IdfModel::fit(const LabeledDataset& train) {
    IdfModel model;
    model.idf.assign(train.vocab->size(), 0.0);
    std::vector<std::int64_t> df(train.vocab->size(), 0);
    for (const auto& row : train.rows) {
        std::unordered_set<std::int32_t> seen;
        for (const auto& tok : row.tokens) {
            auto id = train.vocab->id(tok);
            if (id && *id >= 2) seen.insert(*id);
        }
        for (std::int32_t id : seen) ++df[static_cast<std::size_t>(id)];
    }
    const double n = static_cast<double>(train.rows.size());
    for (std::size_t id = 2; id < model.idf.size(); ++id)
        model.idf[id] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[id]))) + 1.0;
    return model;
}

BowVector featurize_bow(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                        BowScheme scheme, const IdfModel* idf) {
    BowVector bow;
    for (const auto& tok : tokens) {
        auto id = vocab.id(tok);
        if (id && *id >= 2) bow.weights[*id] += 1.0;
    }
    if (scheme == BowScheme::TfIdf) {
        if (idf == nullptr) throw std::invalid_argument("featurize_bow: tf-idf requires an IdfModel");
        for (auto& [id, w] : bow.weights) w *= idf->idf[static_cast<std::size_t>(id)];
    }
    return bow;
}

std::vector<BowVector> featurize_dataset(const LabeledDataset& data, BowScheme scheme,
                                         const IdfModel* idf) {
    std::vector<BowVector> out;
    out.reserve(data.rows.size());
    for (const auto& row : data.rows) out.push_back(featurize_bow(row.tokens, *data.vocab, scheme, idf));
    return out;
}

// --- DNN --------------------------------------------------------------------

namespace {

Tensor2D densify(const std::vector<BowVector>& data, const std::vector<std::size_t>& which,
                 std::size_t input_dim) {
    Tensor2D x(which.size(), input_dim);
    for (std::size_t r = 0; r < which.size(); ++r)
        for (const auto& [id, w] : data[which[r]].weights) {
            if (static_cast<std::size_t>(id) < input_dim) x(r, static_cast<std::size_t>(id)) = w;
        }
    return x;
}

Tensor2D one_hot(const std::vector<int>& labels, const std::vector<std::size_t>& which) {
    Tensor2D y(which.size(), 2);
    for (std::size_t r = 0; r < which.size(); ++r) y(r, static_cast<std::size_t>(labels[which[r]])) = 1.0;
    return y;
}

Tensor2D add_row_bias(const Tensor2D& z, const Tensor2D& bias) {
    Tensor2D out = z;
    for (std::size_t r = 0; r < out.rows(); ++r)
        for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bias(0, c);
    return out;
}

struct DnnForward {
    std::vector<Tensor2D> activations;  // a[0] = input, a[L] = softmax probs
    std::vector<Tensor2D> pre_acts;
    double mean_loss = 0.0;
};

DnnForward dnn_forward(const DnnModel& model, const Tensor2D& x, const Tensor2D* y,
                       const std::vector<Tensor2D>* dropout_masks) {
    DnnForward fwd;
    Tensor2D a = x;
    if (dropout_masks) a = hadamard(a, (*dropout_masks)[0]);
    fwd.activations.push_back(a);
    const std::size_t layers = model.weights.size();
    for (std::size_t l = 0; l < layers; ++l) {
        Tensor2D z = add_row_bias(matmul(a, model.weights[l]), model.biases[l]);
        fwd.pre_acts.push_back(z);
        if (l + 1 < layers) {
            a = relu(z);
            if (dropout_masks && l + 1 < dropout_masks->size())
                a = hadamard(a, (*dropout_masks)[l + 1]);
        } else {
            a = softmax(z);
        }
        fwd.activations.push_back(a);
    }
    if (y) {
        double loss = 0.0;
        for (std::size_t r = 0; r < a.rows(); ++r)
            for (std::size_t c = 0; c < 2; ++c)
                if ((*y)(r, c) > 0.5) loss -= std::log(std::max(a(r, c), 1e-12));
        fwd.mean_loss = loss / static_cast<double>(a.rows());
    }
    return fwd;
}

void dnn_backward(const DnnModel& model, const DnnForward& fwd, const Tensor2D& y,
                  const std::vector<Tensor2D>* dropout_masks, std::vector<Tensor2D>& grad_w,
                  std::vector<Tensor2D>& grad_b) {
    const std::size_t layers = model.weights.size();
    const double inv_batch = 1.0 / static_cast<double>(y.rows());
    grad_w.assign(layers, {});
    grad_b.assign(layers, {});
    Tensor2D delta = scale(subtract(fwd.activations.back(), y), inv_batch);
    for (std::size_t l = layers; l-- > 0;) {
        grad_w[l] = matmul(transpose(fwd.activations[l]), delta);
        grad_b[l] = Tensor2D(1, delta.cols());
        for (std::size_t r = 0; r < delta.rows(); ++r)
            for (std::size_t c = 0; c < delta.cols(); ++c) grad_b[l](0, c) += delta(r, c);
        if (l == 0) break;
        Tensor2D da = matmul(delta, transpose(model.weights[l]));
        if (dropout_masks && l < dropout_masks->size()) da = hadamard(da, (*dropout_masks)[l]);
        // relu subgradient
        delta = da;
        const Tensor2D& z = fwd.pre_acts[l - 1];
        for (std::size_t i = 0; i < delta.size(); ++i)
            if (z.data()[i] <= 0.0) delta.data()[i] = 0.0;
    }
}

}  // namespace

DnnModel train_dnn(const std::vector<BowVector>& data, const std::vector<int>& labels,
                   std::size_t input_dim, const DnnConfig& config) {
    if (data.empty() || data.size() != labels.size())
        throw std::invalid_argument("train_dnn: empty or mismatched training data");
    DnnModel model;
    model.config = config;
    model.input_dim = input_dim;
    Rng rng(config.seed);

    std::size_t fan_in = input_dim;
    const auto units = static_cast<std::size_t>(config.units_per_layer);
    for (std::int32_t l = 0; l <= config.hidden_layers; ++l) {
        const std::size_t fan_out = l == config.hidden_layers ? 2 : units;
        Tensor2D w(fan_in, fan_out);
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& v : w.raw()) v = rng.uniform(-bound, bound);
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(1, fan_out);
        fan_in = fan_out;
    }

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    const auto batch_size = static_cast<std::size_t>(std::max(1, config.batch_size));
    for (std::int32_t epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_int(i)]);
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::vector<std::size_t> batch(
                order.begin() + static_cast<std::ptrdiff_t>(start),
                order.begin() + static_cast<std::ptrdiff_t>(
                                    std::min(order.size(), start + batch_size)));
            Tensor2D x = densify(data, batch, input_dim);
            Tensor2D y = one_hot(labels, batch);

            // dropout on the input layer and the first two hidden layers
            std::vector<Tensor2D> masks;
            masks.push_back(dropout_mask(x.rows(), x.cols(), config.dropout, rng));
            for (int l = 0; l < 2 && l < config.hidden_layers; ++l)
                masks.push_back(dropout_mask(x.rows(), units, config.dropout, rng));

            DnnForward fwd = dnn_forward(model, x, &y, &masks);
            std::vector<Tensor2D> grad_w, grad_b;
            dnn_backward(model, fwd, y, &masks, grad_w, grad_b);
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                model.weights[l] = subtract(model.weights[l], scale(grad_w[l], config.learning_rate));
                model.biases[l] = subtract(model.biases[l], scale(grad_b[l], config.learning_rate));
            }
        }
    }
    return model;
}

std::array<double, 2> dnn_probabilities(const DnnModel& model, const BowVector& x) {
    std::vector<std::size_t> one{0};
    std::vector<BowVector> data{x};
    Tensor2D input = densify(data, one, model.input_dim);
    DnnForward fwd = dnn_forward(model, input, nullptr, nullptr);
    return {fwd.activations.back()(0, 0), fwd.activations.back()(0, 1)};
}

int predict_dnn(const DnnModel& model, const BowVector& x) {
    const auto p = dnn_probabilities(model, x);
    return p[1] > p[0] ? 1 : 0;
}

double dnn_batch_loss(const DnnModel& model, const std::vector<BowVector>& data,
                      const std::vector<int>& labels) {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    Tensor2D x = densify(data, all, model.input_dim);
    Tensor2D y = one_hot(labels, all);
    return dnn_forward(model, x, &y, nullptr).mean_loss;
}

void dnn_batch_gradients(const DnnModel& model, const std::vector<BowVector>& data,
                         const std::vector<int>& labels, std::vector<Tensor2D>& grad_w,
                         std::vector<Tensor2D>& grad_b) {
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    Tensor2D x = densify(data, all, model.input_dim);
    Tensor2D y = one_hot(labels, all);
    DnnForward fwd = dnn_forward(model, x, &y, nullptr);
    dnn_backward(model, fwd, y, nullptr, grad_w, grad_b);
}

// --- MNB --------------------------------------------------------------------

MnbModel train_mnb(const std::vector<BowVector>& data, const std::vector<int>& labels,
                   std::size_t vocab_size, double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("train_mnb: alpha must be > 0");
    if (data.empty() || data.size() != labels.size())
        throw std::invalid_argument("train_mnb: empty or mismatched training data");
    std::array<std::int64_t, 2> class_docs{0, 0};
    std::array<double, 2> class_totals{0.0, 0.0};
    std::vector<std::array<double, 2>> counts(vocab_size, {0.0, 0.0});
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int c = labels[i];
        ++class_docs[c];
        for (const auto& [id, w] : data[i].weights) {
            counts[static_cast<std::size_t>(id)][c] += w;
            class_totals[c] += w;
        }
    }
    if (class_docs[0] == 0 || class_docs[1] == 0)
        throw std::invalid_argument("train_mnb: both classes required");

    MnbModel model;
    const double n = static_cast<double>(data.size());
    // smoothing denominator counts the real-token feature space (ids >= 2)
    const double v = static_cast<double>(vocab_size > 2 ? vocab_size - 2 : vocab_size);
    for (int c = 0; c < 2; ++c)
        model.log_prior[c] = std::log(static_cast<double>(class_docs[c]) / n);
    model.log_likelihood.assign(vocab_size, {0.0, 0.0});
    for (std::size_t id = 0; id < vocab_size; ++id)
        for (int c = 0; c < 2; ++c)
            model.log_likelihood[id][c] =
                std::log((counts[id][c] + alpha) / (class_totals[c] + alpha * v));
    return model;
}

std::array<double, 2> mnb_log_posterior(const MnbModel& model, const BowVector& x) {
    std::array<double, 2> score = model.log_prior;
    for (const auto& [id, w] : x.weights) {
        if (static_cast<std::size_t>(id) >= model.log_likelihood.size()) continue;
        for (int c = 0; c < 2; ++c) score[c] += w * model.log_likelihood[static_cast<std::size_t>(id)][c];
    }
    return score;
}

int predict_mnb(const MnbModel& model, const BowVector& x) {
    const auto s = mnb_log_posterior(model, x);
    return s[1] > s[0] ? 1 : 0;
}

// --- kNN --------------------------------------------------------------------

namespace {

double sparse_norm(const BowVector& v) {
    double s = 0.0;
    for (const auto& [id, w] : v.weights) s += w * w;
    return std::sqrt(s);
}

double sparse_cosine(const BowVector& a, double norm_a, const BowVector& b, double norm_b) {
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;  // empty documents match nothing
    double dot = 0.0;
    auto ia = a.weights.begin();
    auto ib = b.weights.begin();
    while (ia != a.weights.end() && ib != b.weights.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return dot / (norm_a * norm_b);
}

}  // namespace

int knn_predict(const std::vector<BowVector>& train, const std::vector<int>& labels,
                const BowVector& query, int k) {
    if (train.empty()) throw std::invalid_argument("knn_predict: empty training set");
    if (train.size() != labels.size())
        throw std::invalid_argument("knn_predict: label count mismatch");
    if (k < 1 || static_cast<std::size_t>(k) > train.size())
        throw std::invalid_argument("knn_predict: k must lie in [1, |train|]");

    const double query_norm = sparse_norm(query);
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i)
        scored.emplace_back(sparse_cosine(query, query_norm, train[i], sparse_norm(train[i])), i);
    std::partial_sort(scored.begin(), scored.begin() + k, scored.end(),
                      [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                      });
    int votes1 = 0;
    for (int i = 0; i < k; ++i) votes1 += labels[scored[static_cast<std::size_t>(i)].second];
    return 2 * votes1 > k ? 1 : 0;
}

// --- ridge ------------------------------------------------------------------

RidgeModel ridge_fit(const std::vector<BowVector>& data, const std::vector<int>& labels,
                     std::size_t input_dim, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("ridge_fit: lambda must be >= 0");
    if (data.empty() || data.size() != labels.size())
        throw std::invalid_argument("ridge_fit: empty or mismatched training data");

    Tensor2D gram(input_dim, input_dim);
    std::vector<double> xty(input_dim, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double target = labels[i] == 1 ? 1.0 : -1.0;
        for (const auto& [r, wr] : data[i].weights) {
            xty[static_cast<std::size_t>(r)] += wr * target;
            for (const auto& [c, wc] : data[i].weights)
                gram(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) += wr * wc;
        }
    }
    for (std::size_t d = 0; d < input_dim; ++d) gram(d, d) += lambda;

    // Cholesky; a zero pivot means X'X is singular and lambda was 0
    Tensor2D l(input_dim, input_dim);
    for (std::size_t i = 0; i < input_dim; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = gram(i, j);
            for (std::size_t t = 0; t < j; ++t) s -= l(i, t) * l(j, t);
            if (i == j) {
                if (s <= 1e-12)
                    throw std::invalid_argument(
                        "ridge_fit: singular system; use lambda > 0");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    std::vector<double> z(input_dim, 0.0);
    for (std::size_t i = 0; i < input_dim; ++i) {
        double s = xty[i];
        for (std::size_t t = 0; t < i; ++t) s -= l(i, t) * z[t];
        z[i] = s / l(i, i);
    }
    RidgeModel model;
    model.weights.assign(input_dim, 0.0);
    for (std::size_t i = input_dim; i-- > 0;) {
        double s = z[i];
        for (std::size_t t = i + 1; t < input_dim; ++t) s -= l(t, i) * model.weights[t];
        model.weights[i] = s / l(i, i);
    }
    return model;
}

double ridge_score(const RidgeModel& model, const BowVector& x) {
    double s = 0.0;
    for (const auto& [id, w] : x.weights)
        if (static_cast<std::size_t>(id) < model.weights.size())
            s += w * model.weights[static_cast<std::size_t>(id)];
    return s;
}

int ridge_predict(const RidgeModel& model, const BowVector& x) {
    return ridge_score(model, x) >= 0.0 ? 1 : 0;
}

}  // namespace tweetlab
