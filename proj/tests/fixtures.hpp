#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tweetlab/corpus.hpp"
#include "tweetlab/rng.hpp"

namespace fixtures {

using namespace tweetlab;

// two token clusters whose members always share sentence contexts
inline std::vector<std::vector<std::string>> cluster_corpus(std::size_t sentences,
                                                            std::uint64_t seed,
                                                            int cluster_size = 10,
                                                            int sentence_len = 8) {
    std::vector<std::string> a, b;
    for (int i = 0; i < cluster_size; ++i) {
        a.push_back("apple" + std::to_string(i));
        b.push_back("brick" + std::to_string(i));
    }
    Rng rng(seed);
    std::vector<std::vector<std::string>> corpus;
    for (std::size_t s = 0; s < sentences; ++s) {
        const auto& pool = (s % 2 == 0) ? a : b;
        std::vector<std::string> sentence;
        for (int t = 0; t < sentence_len; ++t)
            sentence.push_back(pool[rng.uniform_int(pool.size())]);
        corpus.push_back(std::move(sentence));
    }
    return corpus;
}

inline std::vector<std::string> cluster_tokens(char which, int cluster_size = 10) {
    std::vector<std::string> out;
    const char* stem = which == 'a' ? "apple" : "brick";
    for (int i = 0; i < cluster_size; ++i) out.push_back(stem + std::to_string(i));
    return out;
}

// Linearly separable labelled tweets: the label is carried by which signal
// pool the two marker tokens come from, the rest is shared filler.
struct SeparableData {
    std::vector<TokenRecord> records;
    std::vector<std::vector<std::string>> sentences;  // token lists only
};

inline SeparableData separable_tweets(std::size_t count, std::uint64_t seed,
                                      int signal_lo = 0, int signal_hi = 10,
                                      const std::string& id_prefix = "t") {
    Rng rng(seed);
    SeparableData data;
    for (std::size_t i = 0; i < count; ++i) {
        const int label = static_cast<int>(i % 2);
        const char* pool = label == 1 ? "pos" : "neg";
        std::vector<std::string> tokens;
        for (int s = 0; s < 2; ++s) {
            const auto idx = signal_lo + static_cast<int>(rng.uniform_int(
                                             static_cast<std::uint64_t>(signal_hi - signal_lo)));
            tokens.push_back(pool + std::to_string(idx));
        }
        for (int f = 0; f < 6; ++f)
            tokens.push_back("fill" + std::to_string(rng.uniform_int(20)));
        for (std::size_t t = tokens.size(); t > 1; --t)
            std::swap(tokens[t - 1], tokens[rng.uniform_int(t)]);
        data.records.push_back({id_prefix + std::to_string(i), tokens, label});
        data.sentences.push_back(data.records.back().tokens);
    }
    return data;
}

inline LabeledDataset dataset_from_records(const std::vector<TokenRecord>& records,
                                           std::int32_t max_len = 12,
                                           std::int64_t min_count = 1) {
    std::vector<std::vector<std::string>> sentences;
    for (const auto& r : records) sentences.push_back(r.tokens);
    auto vocab = std::make_shared<Vocabulary>(Vocabulary::build(sentences, min_count));
    return make_dataset(records, vocab, max_len);
}

// balanced single-token dataset for split/fold tests
inline LabeledDataset trivial_dataset(std::size_t n0, std::size_t n1) {
    std::vector<TokenRecord> records;
    for (std::size_t i = 0; i < n0; ++i) records.push_back({"n" + std::to_string(i), {"w"}, 0});
    for (std::size_t i = 0; i < n1; ++i) records.push_back({"p" + std::to_string(i), {"w"}, 1});
    auto vocab = std::make_shared<Vocabulary>(Vocabulary::from_tokens({"w"}));
    return make_dataset(records, vocab, 4);
}

}  // namespace fixtures
