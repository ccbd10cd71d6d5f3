#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tweetlab/corpus.hpp"
#include "tweetlab/tensor.hpp"

namespace tweetlab {

enum class Provenance : std::uint8_t {
    DomainPretrained = 0,
    GeneralPretrained = 1,
    RandomInit = 2,
};

// Per-token dense vectors over a vocabulary. Row 0 (<pad>) is all zeros and
// is never updated by anything in the project.
struct EmbeddingMatrix {
    std::shared_ptr<const Vocabulary> vocab;
    std::int32_t dim = 0;
    Tensor2D vectors;  // |vocab| x dim
    Provenance provenance = Provenance::RandomInit;
    bool trainable = true;

    std::span<const double> row(std::int32_t id) const {
        return {vectors.row(static_cast<std::size_t>(id)), static_cast<std::size_t>(dim)};
    }
};

struct CbowConfig {
    std::int32_t dim = 200;
    std::int32_t window = 5;          // context radius
    std::int32_t negatives = 5;       // negative samples per positive
    std::int32_t epochs = 5;
    double initial_lr = 0.025;        // decays linearly to min_lr
    double min_lr = 1e-4;
    double subsample_threshold = 1e-3;
    std::uint64_t seed = 1;
};

struct EmbeddingTrainResult {
    EmbeddingMatrix embedding;
    std::vector<double> epoch_loss;  // mean negative-sampling loss per epoch
};

// fresh uniform(-0.5/dim, 0.5/dim) vectors; <unk> gets the wider OOV init
EmbeddingMatrix random_embedding(std::shared_ptr<const Vocabulary> vocab, std::int32_t dim,
                                 std::uint64_t seed);

// Negative-sampling word2vec, single worker, bit-for-bit deterministic in
// the seed. Throws when the in-vocabulary corpus is shorter than
// 2*window+1 tokens.
EmbeddingTrainResult train_cbow(const std::vector<std::vector<std::string>>& corpus,
                                std::shared_ptr<const Vocabulary> vocab, const CbowConfig& config);
EmbeddingTrainResult train_skipgram(const std::vector<std::vector<std::string>>& corpus,
                                    std::shared_ptr<const Vocabulary> vocab,
                                    const CbowConfig& config);

// dot(u,v)/(|u||v|); throws std::invalid_argument on a zero vector
double cosine(std::span<const double> u, std::span<const double> v);

// top-k by cosine, excluding the query, <pad> and <unk>; ties by id.
// Throws on an out-of-vocabulary (or reserved) query token.
std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingMatrix& emb,
                                                              const std::string& token, int k);

// same scan for an arbitrary query vector (used for tweet-level similarity)
std::vector<std::pair<std::int32_t, double>> nearest_to_vector(const EmbeddingMatrix& emb,
                                                               std::span<const double> query,
                                                               int k);

// --- vector file I/O ------------------------------------------------------
// Text format: header "<count> <dim>", then "<token> <v1> ... <v_dim>".

struct RawVectors {
    std::vector<std::string> tokens;
    Tensor2D vectors;
};

// writes the real-token rows (ids >= 2)
void save_vectors(const EmbeddingMatrix& emb, const std::string& path);
// throws std::runtime_error naming the offending line on malformed input
RawVectors load_vector_file(const std::string& path);

// Projects loaded vectors onto a task vocabulary: tokens missing from the
// file get the uniform(-0.25, 0.25) OOV init, <pad> stays zero.
EmbeddingMatrix project_vectors(const RawVectors& raw, std::shared_ptr<const Vocabulary> vocab,
                                Provenance provenance, std::uint64_t seed);

// versioned binary checkpoint carrying the vocabulary block and raw
// little-endian doubles; exact round trip
void save_embedding(const EmbeddingMatrix& emb, const std::string& path);
EmbeddingMatrix load_embedding(const std::string& path);

}  // namespace tweetlab
