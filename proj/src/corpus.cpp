#include "tweetlab/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "tweetlab/porter.hpp"
#include "tweetlab/rng.hpp"

namespace tweetlab {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

// bytes >= 0x80 are kept inside words so multi-byte UTF-8 stays intact
bool is_word_char(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

bool is_special_token(const std::string& s) {
    return s == kPadToken || s == kUnkToken || s == kUrlToken || s == kUserToken;
}

bool has_prefix_ci(const std::string& s, const char* prefix) {
    std::size_t i = 0;
    for (; prefix[i] != '\0'; ++i) {
        if (i >= s.size()) return false;
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

bool looks_like_url(const std::string& chunk) {
    return has_prefix_ci(chunk, "http://") || has_prefix_ci(chunk, "https://") ||
           has_prefix_ci(chunk, "www.");
}

void scan_chunk(const std::string& chunk, std::size_t start, std::vector<std::string>& out) {
    std::string word;
    auto flush = [&] {
        if (!word.empty()) {
            out.push_back(word);
            word.clear();
        }
    };
    for (std::size_t i = start; i < chunk.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(chunk[i]);
        if (is_word_char(c)) {
            word.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
            out.emplace_back(1, chunk[i]);
        }
    }
    flush();
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !is_space(static_cast<unsigned char>(text[j]))) ++j;
        if (j == i) break;
        const std::string chunk = text.substr(i, j - i);
        i = j;

        if (is_special_token(chunk)) {
            out.push_back(chunk);
            continue;
        }
        if (looks_like_url(chunk)) {
            out.emplace_back(kUrlToken);
            continue;
        }
        if (chunk[0] == '@') {
            std::size_t end = 1;
            while (end < chunk.size() &&
                   (is_word_char(static_cast<unsigned char>(chunk[end])) || chunk[end] == '_'))
                ++end;
            if (end > 1) {
                out.emplace_back(kUserToken);
                scan_chunk(chunk, end, out);
                continue;
            }
        }
        std::size_t start = 0;
        while (start < chunk.size() && chunk[start] == '#') ++start;
        scan_chunk(chunk, start, out);
    }
    return out;
}

std::vector<std::string> stem_tokens(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(is_special_token(t) ? t : porter_stem(t));
    return out;
}

std::vector<std::string> preprocess(const std::string& text) {
    return stem_tokens(tokenize(text));
}

bool prefilter(const std::string& text, const std::vector<std::string>& keywords) {
    if (keywords.empty()) throw std::invalid_argument("prefilter: empty keyword set");
    std::unordered_set<std::string> stems;
    for (const auto& kw : keywords) {
        std::string lowered;
        lowered.reserve(kw.size());
        for (unsigned char c : kw) lowered.push_back(static_cast<char>(std::tolower(c)));
        stems.insert(porter_stem(lowered));
    }
    for (const auto& tok : preprocess(text))
        if (stems.count(tok)) return true;
    return false;
}

bool prefilter(const TweetRecord& record, const std::vector<std::string>& keywords) {
    return prefilter(record.text, keywords);
}

void Vocabulary::push_entry(std::string token, std::int64_t count) {
    index_.emplace(token, static_cast<std::int32_t>(entries_.size()));
    entries_.emplace_back(std::move(token), count);
}

Vocabulary Vocabulary::from_counts(const std::unordered_map<std::string, std::int64_t>& counts,
                                   std::int64_t min_count) {
    if (min_count < 1) throw std::invalid_argument("build_vocabulary: min_count must be >= 1");
    if (counts.empty())
        throw std::invalid_argument("build_vocabulary: empty corpus, no trainable vocabulary");

    std::vector<std::pair<std::string, std::int64_t>> kept;
    for (const auto& [token, count] : counts)
        if (count >= min_count) kept.emplace_back(token, count);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    v.push_entry(kPadToken, 0);
    v.push_entry(kUnkToken, 0);
    for (auto& [token, count] : kept) v.push_entry(std::move(token), count);
    return v;
}

Vocabulary Vocabulary::build(const std::vector<std::vector<std::string>>& corpus,
                             std::int64_t min_count) {
    std::unordered_map<std::string, std::int64_t> counts;
    for (const auto& sentence : corpus)
        for (const auto& token : sentence) ++counts[token];
    return from_counts(counts, min_count);
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens) {
    std::vector<std::pair<std::string, std::int64_t>> entries;
    entries.reserve(tokens.size());
    for (const auto& t : tokens) entries.emplace_back(t, 1);
    return from_entries(entries);
}

Vocabulary Vocabulary::from_entries(
    const std::vector<std::pair<std::string, std::int64_t>>& entries) {
    Vocabulary v;
    v.push_entry(kPadToken, 0);
    v.push_entry(kUnkToken, 0);
    for (const auto& [token, count] : entries) {
        if (token == kPadToken || token == kUnkToken) continue;
        if (v.index_.count(token))
            throw std::invalid_argument("Vocabulary::from_tokens: duplicate token '" + token +
                                        "'");
        v.push_entry(token, count);
    }
    return v;
}

std::optional<std::int32_t> Vocabulary::id(const std::string& token) const {
    auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t Vocabulary::hash() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [token, count] : entries_) {
        for (char c : token) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;
        h *= 0x100000001b3ULL;
    }
    return h;
}

EncodedTweet encode(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                    std::int32_t max_len) {
    if (max_len < 1) throw std::invalid_argument("encode: max_len must be >= 1");
    if (tokens.empty())
        throw std::invalid_argument("encode: a tweet with zero tokens cannot be classified");
    EncodedTweet enc;
    enc.ids.assign(static_cast<std::size_t>(max_len), kPadId);
    enc.true_len = static_cast<std::int32_t>(
        std::min<std::size_t>(tokens.size(), static_cast<std::size_t>(max_len)));
    for (std::int32_t i = 0; i < enc.true_len; ++i)
        enc.ids[i] = vocab.id(tokens[i]).value_or(kUnkId);
    return enc;
}

std::vector<std::string> decode(const EncodedTweet& enc, const Vocabulary& vocab) {
    std::vector<std::string> tokens;
    tokens.reserve(enc.true_len);
    for (std::int32_t i = 0; i < enc.true_len; ++i) tokens.push_back(vocab.token(enc.ids[i]));
    return tokens;
}

std::array<std::int64_t, 2> LabeledDataset::class_counts() const noexcept {
    std::array<std::int64_t, 2> counts{0, 0};
    for (const auto& row : rows) ++counts[row.label];
    return counts;
}

LabeledDataset make_dataset(const std::vector<TokenRecord>& records,
                            std::shared_ptr<const Vocabulary> vocab, std::int32_t max_len) {
    LabeledDataset ds;
    ds.vocab = std::move(vocab);
    ds.max_len = max_len;
    std::unordered_set<std::string> seen;
    ds.rows.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.id.empty()) throw std::invalid_argument("make_dataset: empty record id");
        if (!seen.insert(rec.id).second)
            throw std::invalid_argument("make_dataset: duplicate id '" + rec.id + "'");
        if (rec.label != 0 && rec.label != 1)
            throw std::invalid_argument("make_dataset: label of '" + rec.id +
                                        "' must be 0 or 1");
        LabeledRow row;
        row.id = rec.id;
        row.tokens = rec.tokens;
        row.label = rec.label;
        try {
            row.encoded = encode(rec.tokens, *ds.vocab, max_len);
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("make_dataset: record '" + rec.id +
                                        "' has no tokens after preprocessing");
        }
        ds.rows.push_back(std::move(row));
    }
    return ds;
}

namespace {

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
}

std::array<std::vector<std::size_t>, 2> indices_by_class(const LabeledDataset& data) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < data.rows.size(); ++i)
        by_class[data.rows[i].label].push_back(i);
    return by_class;
}

LabeledDataset subset(const LabeledDataset& data, const std::vector<std::size_t>& which) {
    LabeledDataset out;
    out.vocab = data.vocab;
    out.max_len = data.max_len;
    out.rows.reserve(which.size());
    for (std::size_t i : which) out.rows.push_back(data.rows[i]);
    return out;
}

}  // namespace

std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& data,
                                                           double test_fraction,
                                                           std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("stratified_split: test_fraction must be in (0,1)");
    auto by_class = indices_by_class(data);
    for (int c = 0; c < 2; ++c)
        if (by_class[c].size() < 2)
            throw std::invalid_argument("stratified_split: class " + std::to_string(c) +
                                        " has fewer than 2 records");

    Rng rng(seed);
    std::vector<bool> in_test(data.rows.size(), false);
    for (int c = 0; c < 2; ++c) {
        auto idx = by_class[c];
        shuffle_indices(idx, rng);
        const auto n_test = static_cast<std::size_t>(
            std::llround(test_fraction * static_cast<double>(idx.size())));
        for (std::size_t i = 0; i < n_test; ++i) in_test[idx[i]] = true;
    }

    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < data.rows.size(); ++i)
        (in_test[i] ? test_idx : train_idx).push_back(i);
    return {subset(data, train_idx), subset(data, test_idx)};
}

std::vector<std::pair<LabeledDataset, LabeledDataset>> kfold(const LabeledDataset& data, int k,
                                                             std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold: k must be >= 2");
    auto by_class = indices_by_class(data);
    for (int c = 0; c < 2; ++c)
        if (by_class[c].size() < static_cast<std::size_t>(k))
            throw std::invalid_argument("kfold: class " + std::to_string(c) +
                                        " has fewer than k records");

    Rng rng(seed);
    std::vector<int> fold_of(data.rows.size(), 0);
    for (int c = 0; c < 2; ++c) {
        auto idx = by_class[c];
        shuffle_indices(idx, rng);
        for (std::size_t i = 0; i < idx.size(); ++i)
            fold_of[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    }

    std::vector<std::pair<LabeledDataset, LabeledDataset>> folds;
    folds.reserve(static_cast<std::size_t>(k));
    for (int f = 0; f < k; ++f) {
        std::vector<std::size_t> train_idx, valid_idx;
        for (std::size_t i = 0; i < data.rows.size(); ++i)
            (fold_of[i] == f ? valid_idx : train_idx).push_back(i);
        folds.emplace_back(subset(data, train_idx), subset(data, valid_idx));
    }
    return folds;
}

}  // namespace tweetlab
