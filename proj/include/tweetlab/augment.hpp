#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tweetlab/corpus.hpp"
#include "tweetlab/embedding.hpp"
#include "tweetlab/nmf.hpp"

namespace tweetlab {

enum class PolicyKind {
    AT0,  // passthrough
    AT1,  // random words replaced by embedding neighbours, appended
    AT2,  // discriminative words replaced by embedding neighbours, appended
    AT3,  // tweet expanded in place with neighbours of its mean vector
    AT4,  // tweet expanded in place with terms of its dominant NMF topic
    AT5,  // NMF topics appended as artificial tweets
    AT6,  // neighbour set of the tweet's mean vector appended as a tweet
};

struct AugmentParams {
    double replace_prob = 0.2;     // AT1/AT2 per-word replacement probability
    int neighbor_k = 5;            // neighbour pool for replacements
    int expand_count = 5;          // AT3 words added per tweet
    int tweet_neighbor_count = 10; // AT6 artificial tweet length
    int nmf_rank = 20;             // per class
    int nmf_iterations = 200;
    int nmf_top_terms = 3;         // AT4 terms added per tweet
    int topic_top_terms = 10;      // AT5 artificial tweet length
    double theta = 2.0;            // discriminative ratio threshold
    int min_count = 3;             // discriminative class count floor
    std::uint64_t seed = 1;
};

struct AugmentPolicy {
    PolicyKind kind = PolicyKind::AT0;
    AugmentParams params;
};

struct DiscriminativeLexicon {
    // per class: token -> smoothed frequency ratio, tokens above theta only
    std::array<std::unordered_map<std::string, double>, 2> words;
};

// token qualifies for class c when (freq_c + 1)/(freq_other + 1) >= theta
// and freq_c >= min_count
DiscriminativeLexicon discriminative_words(const LabeledDataset& data, double theta,
                                           int min_count);

const char* policy_name(PolicyKind kind);

// Applies one policy. AT1/AT2/AT6 append one artificial tweet per source
// (doubling the record count), AT3/AT4 modify rows in place, AT5 appends
// rank artificial tweets per class. Deterministic in params.seed.
LabeledDataset augment(const LabeledDataset& data, const AugmentPolicy& policy,
                       const EmbeddingMatrix& emb);

struct PolicyRun {
    PolicyKind kind = PolicyKind::AT0;
    AugmentParams params;
    std::size_t input_size = 0;
    std::size_t output_size = 0;
    LabeledDataset data;
};

// AT0 passthrough plus the six augmented variants
std::vector<PolicyRun> run_at_suite(const LabeledDataset& data, const EmbeddingMatrix& emb,
                                    const AugmentParams& params);

}  // namespace tweetlab
