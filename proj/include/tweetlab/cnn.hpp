#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tweetlab/corpus.hpp"
#include "tweetlab/embedding.hpp"
#include "tweetlab/rng.hpp"
#include "tweetlab/tensor.hpp"

namespace tweetlab {

struct FilterSpec {
    std::int32_t height = 0;
    std::int32_t count = 0;
};

struct CnnConfig {
    std::vector<FilterSpec> filter_specs = {{3, 256}, {4, 256}, {5, 512}};
    std::int32_t dense_units = 256;
    double dropout_input = 0.5;
    std::map<std::int32_t, double> dropout_bank = {{3, 0.5}, {4, 0.2}, {5, 0.2}};
    double dropout_dense = 0.5;
    double threshold = 0.5;  // p >= threshold classifies positive
    std::int32_t max_len = 64;
    std::int32_t batch_size = 32;
    std::int32_t epochs = 50;
    std::int32_t patience = 5;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;

    std::int32_t total_filters() const noexcept;
    // throws std::invalid_argument when a filter is taller than max_len,
    // a count is < 1 or a dropout rate leaves [0,1)
    void validate() const;
};

// one convolutional bank: all filters sharing a window height
struct FilterBank {
    std::int32_t height = 0;
    Tensor2D weights;  // count x (height*dim)
    Tensor2D biases;   // 1 x count
};

struct CnnModel {
    CnnConfig config;
    EmbeddingMatrix embedding;
    std::vector<FilterBank> banks;  // ascending height
    Tensor2D dense_w;               // total_filters x dense_units
    Tensor2D dense_b;               // 1 x dense_units
    Tensor2D out_w;                 // dense_units x 1
    Tensor2D out_b;                 // 1 x 1
};

struct EpochStats {
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double valid_accuracy = 0.0;  // NaN when no validation set was given
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
};

// max over positions of ReLU(<filter, slice> + bias), stride 1
double conv_maxpool(const Tensor2D& tweet, const Tensor2D& filter, double bias);

// -[y ln p + (1-y) ln(1-p)]; throws when p is outside (0,1)
double bce_loss(double p, int label);

CnnModel init_cnn(const CnnConfig& config, EmbeddingMatrix embedding);

// eval-mode probabilities, no dropout, deterministic
std::vector<double> forward_eval(const CnnModel& model,
                                 const std::vector<const EncodedTweet*>& batch);

struct BatchCache;  // opaque train-mode cache

struct ForwardResult {
    std::vector<double> probabilities;
    std::shared_ptr<BatchCache> cache;
};

// train-mode forward: dropout masks drawn from rng and kept for backward
ForwardResult forward_train(const CnnModel& model, const std::vector<const EncodedTweet*>& batch,
                            Rng& rng);

struct CnnGradients {
    Tensor2D embedding;  // present only when the embedding is trainable
    std::vector<Tensor2D> bank_weights;
    std::vector<Tensor2D> bank_biases;
    Tensor2D dense_w, dense_b, out_w, out_b;
};

// exact gradients of the mean batch BCE; reuses the dropout masks drawn in
// forward_train
CnnGradients backward(const CnnModel& model, const BatchCache& cache,
                      const std::vector<int>& labels);

// mean BCE through a dropout-free forward; the target of the finite
// difference oracle
double batch_loss(const CnnModel& model, const std::vector<const EncodedTweet*>& batch,
                  const std::vector<int>& labels);

// Mini-batch Adam with early stopping on validation accuracy; the
// best-validation parameters are retained. valid may be empty, which
// disables early stopping. Deterministic in config.seed.
TrainHistory train(CnnModel& model, const LabeledDataset& train_data,
                   const LabeledDataset& valid_data);

struct Prediction {
    double probability = 0.0;
    int label = 0;
};

Prediction predict(const CnnModel& model, const EncodedTweet& tweet);

// versioned binary checkpoint; carries the vocabulary hash, not the
// vocabulary itself. load verifies the hash and names both on mismatch.
void save_cnn(const CnnModel& model, const std::string& path);
CnnModel load_cnn(const std::string& path, std::shared_ptr<const Vocabulary> vocab);

void save_vocab(const Vocabulary& vocab, const std::string& path);
std::shared_ptr<const Vocabulary> load_vocab(const std::string& path);

}  // namespace tweetlab
