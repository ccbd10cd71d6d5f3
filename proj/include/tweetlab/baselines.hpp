#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "tweetlab/corpus.hpp"
#include "tweetlab/tensor.hpp"

namespace tweetlab {

enum class BowScheme { Counts, TfIdf };

// sparse token-id -> weight mapping; ordered so iteration is deterministic
struct BowVector {
    std::map<std::int32_t, double> weights;
};

// document frequencies from the training split; idf = ln((1+N)/(1+df)) + 1
struct IdfModel {
    std::vector<double> idf;  // indexed by token id
    static IdfModel fit(const LabeledDataset& train);
};

BowVector featurize_bow(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                        BowScheme scheme, const IdfModel* idf = nullptr);
std::vector<BowVector> featurize_dataset(const LabeledDataset& data, BowScheme scheme,
                                         const IdfModel* idf = nullptr);

// --- feedforward deep network ----------------------------------------------

struct DnnConfig {
    std::int32_t hidden_layers = 5;
    std::int32_t units_per_layer = 8;
    double dropout = 0.5;  // input layer and first two hidden layers
    double learning_rate = 0.04;
    std::int32_t epochs = 60;
    std::int32_t batch_size = 32;
    std::uint64_t seed = 1;
};

struct DnnModel {
    std::vector<Tensor2D> weights;  // layer l: in x out
    std::vector<Tensor2D> biases;   // 1 x out
    DnnConfig config;
    std::size_t input_dim = 0;
};

// softmax cross-entropy SGD; dense inputs are the shared BowVectors
DnnModel train_dnn(const std::vector<BowVector>& data, const std::vector<int>& labels,
                   std::size_t input_dim, const DnnConfig& config);
// two-way softmax probabilities
std::array<double, 2> dnn_probabilities(const DnnModel& model, const BowVector& x);
int predict_dnn(const DnnModel& model, const BowVector& x);

// gradient of the mean cross-entropy on a batch, dropout off; exposed for
// the finite-difference check
double dnn_batch_loss(const DnnModel& model, const std::vector<BowVector>& data,
                      const std::vector<int>& labels);
void dnn_batch_gradients(const DnnModel& model, const std::vector<BowVector>& data,
                         const std::vector<int>& labels, std::vector<Tensor2D>& grad_w,
                         std::vector<Tensor2D>& grad_b);

// --- multinomial naive Bayes ------------------------------------------------

struct MnbModel {
    std::array<double, 2> log_prior{};
    std::vector<std::array<double, 2>> log_likelihood;  // token id -> per-class log prob
};

// Laplace-smoothed fit; throws when a class is empty
MnbModel train_mnb(const std::vector<BowVector>& data, const std::vector<int>& labels,
                   std::size_t vocab_size, double alpha = 1.0);
std::array<double, 2> mnb_log_posterior(const MnbModel& model, const BowVector& x);
// ties break toward class 0
int predict_mnb(const MnbModel& model, const BowVector& x);

// --- k nearest neighbours ----------------------------------------------------

// majority vote among the k nearest by cosine; distance ties by lower
// training index, vote ties toward class 0
int knn_predict(const std::vector<BowVector>& train, const std::vector<int>& labels,
                const BowVector& query, int k);

// --- ridge classifier ---------------------------------------------------------

struct RidgeModel {
    std::vector<double> weights;
};

// least squares on +-1 targets via the normal equations with an L2 term;
// lambda == 0 on a singular system throws advising lambda > 0
RidgeModel ridge_fit(const std::vector<BowVector>& data, const std::vector<int>& labels,
                     std::size_t input_dim, double lambda);
// sign threshold at 0; zero classifies positive
int ridge_predict(const RidgeModel& model, const BowVector& x);
double ridge_score(const RidgeModel& model, const BowVector& x);

}  // namespace tweetlab
