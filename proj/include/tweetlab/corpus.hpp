#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tweetlab {

inline constexpr std::int32_t kPadId = 0;
inline constexpr std::int32_t kUnkId = 1;
inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkToken = "<unk>";
inline constexpr const char* kUrlToken = "<url>";
inline constexpr const char* kUserToken = "<user>";

struct TweetRecord {
    std::string id;
    std::string text;
    std::optional<int> label;  // 1 = misogynistic, 0 = not
};

// Token-to-id mapping with counts. Ids are contiguous from 0; 0 and 1 are
// the reserved <pad> and <unk> entries. Immutable once built.
class Vocabulary {
public:
    // Regular entries ordered by descending count, ties lexicographic.
    // Throws std::invalid_argument when the corpus holds no tokens at all.
    static Vocabulary build(const std::vector<std::vector<std::string>>& corpus,
                            std::int64_t min_count);
    static Vocabulary from_counts(const std::unordered_map<std::string, std::int64_t>& counts,
                                  std::int64_t min_count);
    // Entries in the given order (e.g. the row order of a vector file).
    static Vocabulary from_tokens(const std::vector<std::string>& tokens);
    // as from_tokens but keeping the stored counts (checkpoint loading)
    static Vocabulary from_entries(
        const std::vector<std::pair<std::string, std::int64_t>>& entries);

    std::size_t size() const noexcept { return entries_.size(); }
    const std::string& token(std::int32_t id) const { return entries_[id].first; }
    std::int64_t count(std::int32_t id) const { return entries_[id].second; }
    std::optional<std::int32_t> id(const std::string& token) const;
    bool contains(const std::string& token) const { return index_.count(token) != 0; }

    const std::vector<std::pair<std::string, std::int64_t>>& entries() const noexcept {
        return entries_;
    }

    // FNV-1a over the ordered token list; used to pair checkpoints with the
    // encoding they were trained against.
    std::uint64_t hash() const noexcept;

private:
    Vocabulary() = default;
    void push_entry(std::string token, std::int64_t count);

    std::vector<std::pair<std::string, std::int64_t>> entries_;
    std::unordered_map<std::string, std::int32_t> index_;
};

struct EncodedTweet {
    std::vector<std::int32_t> ids;  // length == max_len, tail padded with kPadId
    std::int32_t true_len = 0;      // token count before padding, capped at max_len
};

struct TokenRecord {
    std::string id;
    std::vector<std::string> tokens;
    int label = 0;
};

struct LabeledRow {
    std::string id;
    std::vector<std::string> tokens;
    EncodedTweet encoded;
    int label = 0;
};

struct LabeledDataset {
    std::vector<LabeledRow> rows;
    std::shared_ptr<const Vocabulary> vocab;
    std::int32_t max_len = 0;

    std::size_t size() const noexcept { return rows.size(); }
    std::array<std::int64_t, 2> class_counts() const noexcept;
};

// Lowercases, maps URLs to <url> and @-mentions to <user>, strips the # off
// hashtags and splits punctuation into single-char tokens. Total function:
// never throws, empty output allowed.
std::vector<std::string> tokenize(const std::string& text);

// porter_stem applied tokenwise; special tokens pass through untouched
std::vector<std::string> stem_tokens(const std::vector<std::string>& tokens);

// tokenize + stem, the preprocessing applied once upstream of everything
std::vector<std::string> preprocess(const std::string& text);

// true iff any stemmed token of the text matches a stemmed keyword
bool prefilter(const std::string& text, const std::vector<std::string>& keywords);
bool prefilter(const TweetRecord& record, const std::vector<std::string>& keywords);

// Fixed-length id sequence. OOV -> <unk>, overlong input truncated at the
// tail. Throws std::invalid_argument on an empty token sequence.
EncodedTweet encode(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                    std::int32_t max_len);
// inverse of encode on the non-pad prefix
std::vector<std::string> decode(const EncodedTweet& enc, const Vocabulary& vocab);

// Throws on duplicate ids, labels outside {0,1} or empty token sequences.
LabeledDataset make_dataset(const std::vector<TokenRecord>& records,
                            std::shared_ptr<const Vocabulary> vocab, std::int32_t max_len);

// Per-class proportions in the test half match test_fraction to within one
// record; deterministic in the seed. Requires two classes with >= 2 members.
std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& data,
                                                           double test_fraction,
                                                           std::uint64_t seed);

// k stratified, pairwise-disjoint validation folds covering the data.
std::vector<std::pair<LabeledDataset, LabeledDataset>> kfold(const LabeledDataset& data, int k,
                                                             std::uint64_t seed);

}  // namespace tweetlab
