#include "tweetlab/augment.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "tweetlab/rng.hpp"

namespace tweetlab {

const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::AT0: return "at0";
        case PolicyKind::AT1: return "at1";
        case PolicyKind::AT2: return "at2";
        case PolicyKind::AT3: return "at3";
        case PolicyKind::AT4: return "at4";
        case PolicyKind::AT5: return "at5";
        case PolicyKind::AT6: return "at6";
    }
    return "at?";
}

DiscriminativeLexicon discriminative_words(const LabeledDataset& data, double theta,
                                           int min_count) {
    const auto counts = data.class_counts();
    if (counts[0] == 0 || counts[1] == 0)
        throw std::invalid_argument("discriminative_words: both classes required");
    std::unordered_map<std::string, std::array<std::int64_t, 2>> freq;
    for (const auto& row : data.rows)
        for (const auto& tok : row.tokens) ++freq[tok][row.label];

    DiscriminativeLexicon lex;
    for (const auto& [token, f] : freq) {
        for (int c = 0; c < 2; ++c) {
            const double ratio = (static_cast<double>(f[c]) + 1.0) /
                                 (static_cast<double>(f[1 - c]) + 1.0);
            if (ratio >= theta && f[c] >= min_count) lex.words[c].emplace(token, ratio);
        }
    }
    return lex;
}

namespace {

struct NeighborCache {
    const EmbeddingMatrix& emb;
    int k;
    std::unordered_map<std::int32_t, std::vector<std::int32_t>> cache;

    const std::vector<std::int32_t>& get(std::int32_t id) {
        auto it = cache.find(id);
        if (it != cache.end()) return it->second;
        std::vector<std::int32_t> ids;
        for (const auto& [nid, cos] : nearest_to_vector(emb, emb.row(id), k + 1)) {
            (void)cos;
            if (nid == id) continue;
            ids.push_back(nid);
            if (ids.size() == static_cast<std::size_t>(k)) break;
        }
        return cache.emplace(id, std::move(ids)).first->second;
    }
};

std::vector<double> mean_vector(const std::vector<std::string>& tokens,
                                const EmbeddingMatrix& emb) {
    std::vector<double> mean(static_cast<std::size_t>(emb.dim), 0.0);
    std::size_t used = 0;
    for (const auto& tok : tokens) {
        auto id = emb.vocab->id(tok);
        if (!id || *id < 2) continue;
        const auto row = emb.row(*id);
        for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
        ++used;
    }
    if (used == 0) return {};
    for (double& v : mean) v /= static_cast<double>(used);
    return mean;
}

std::vector<std::string> neighbor_tokens(const EmbeddingMatrix& emb,
                                         const std::vector<double>& query, int count) {
    std::vector<std::string> out;
    for (const auto& [nid, cos] : nearest_to_vector(emb, query, count)) {
        (void)cos;
        out.push_back(emb.vocab->token(nid));
    }
    return out;
}

LabeledRow reencode(LabeledRow row, const LabeledDataset& data) {
    row.encoded = encode(row.tokens, *data.vocab, data.max_len);
    return row;
}

// per-class doc-term count matrix over the dataset vocabulary's real tokens
Tensor2D doc_term_matrix(const std::vector<const LabeledRow*>& rows, const Vocabulary& vocab) {
    Tensor2D m(rows.size(), vocab.size() - 2);
    for (std::size_t d = 0; d < rows.size(); ++d)
        for (const auto& tok : rows[d]->tokens) {
            auto id = vocab.id(tok);
            if (id && *id >= 2) m(d, static_cast<std::size_t>(*id - 2)) += 1.0;
        }
    return m;
}

std::vector<std::int32_t> top_terms(const Tensor2D& h, std::size_t topic, int count) {
    std::vector<std::int32_t> cols(h.cols());
    for (std::size_t c = 0; c < h.cols(); ++c) cols[c] = static_cast<std::int32_t>(c);
    std::sort(cols.begin(), cols.end(), [&](std::int32_t a, std::int32_t b) {
        const double wa = h(topic, static_cast<std::size_t>(a));
        const double wb = h(topic, static_cast<std::size_t>(b));
        if (wa != wb) return wa > wb;
        return a < b;
    });
    cols.resize(std::min<std::size_t>(cols.size(), static_cast<std::size_t>(count)));
    return cols;
}

struct ClassNmf {
    std::vector<const LabeledRow*> rows;
    NmfFactors factors;
};

std::array<ClassNmf, 2> fit_class_nmf(const LabeledDataset& data, const AugmentParams& params) {
    std::array<ClassNmf, 2> out;
    for (const auto& row : data.rows) out[row.label].rows.push_back(&row);
    for (int c = 0; c < 2; ++c) {
        if (out[c].rows.empty())
            throw std::invalid_argument("augment: NMF policies need both classes populated");
        Tensor2D m = doc_term_matrix(out[c].rows, *data.vocab);
        Rng rng(params.seed);
        out[c].factors =
            nmf(m, params.nmf_rank, params.nmf_iterations,
                rng.child(c == 0 ? "nmf-class0" : "nmf-class1").next_u64());
    }
    return out;
}

}  // namespace

LabeledDataset augment(const LabeledDataset& data, const AugmentPolicy& policy,
                       const EmbeddingMatrix& emb) {
    const AugmentParams& params = policy.params;
    LabeledDataset out;
    out.vocab = data.vocab;
    out.max_len = data.max_len;
    Rng rng = Rng(params.seed).child(policy_name(policy.kind));

    switch (policy.kind) {
        case PolicyKind::AT0:
            out.rows = data.rows;
            break;

        case PolicyKind::AT1:
        case PolicyKind::AT2: {
            const bool discriminative_only = policy.kind == PolicyKind::AT2;
            DiscriminativeLexicon lex;
            if (discriminative_only)
                lex = discriminative_words(data, params.theta, params.min_count);
            NeighborCache neighbors{emb, params.neighbor_k, {}};
            out.rows = data.rows;
            for (const auto& row : data.rows) {
                LabeledRow artificial = row;
                artificial.id += std::string("/") + policy_name(policy.kind);
                for (auto& tok : artificial.tokens) {
                    if (discriminative_only && !lex.words[row.label].count(tok)) continue;
                    if (rng.uniform() >= params.replace_prob) continue;
                    auto id = emb.vocab->id(tok);
                    if (!id || *id < 2) continue;
                    const auto& pool = neighbors.get(*id);
                    if (pool.empty()) continue;
                    tok = emb.vocab->token(pool[rng.uniform_int(pool.size())]);
                }
                out.rows.push_back(reencode(std::move(artificial), data));
            }
            break;
        }

        case PolicyKind::AT3: {
            for (const auto& row : data.rows) {
                LabeledRow expanded = row;
                const auto mean = mean_vector(row.tokens, emb);
                if (!mean.empty())
                    for (auto& tok : neighbor_tokens(emb, mean, params.expand_count))
                        expanded.tokens.push_back(std::move(tok));
                out.rows.push_back(reencode(std::move(expanded), data));
            }
            break;
        }

        case PolicyKind::AT4: {
            auto class_nmf = fit_class_nmf(data, params);
            std::array<std::size_t, 2> doc_index{0, 0};
            for (const auto& row : data.rows) {
                const auto& factors = class_nmf[row.label].factors;
                const std::size_t doc = doc_index[row.label]++;
                std::size_t topic = 0;
                for (std::size_t r = 1; r < factors.w.cols(); ++r)
                    if (factors.w(doc, r) > factors.w(doc, topic)) topic = r;
                LabeledRow expanded = row;
                for (std::int32_t term : top_terms(factors.h, topic, params.nmf_top_terms))
                    expanded.tokens.push_back(data.vocab->token(term + 2));
                out.rows.push_back(reencode(std::move(expanded), data));
            }
            break;
        }

        case PolicyKind::AT5: {
            auto class_nmf = fit_class_nmf(data, params);
            out.rows = data.rows;
            for (int c = 0; c < 2; ++c) {
                const auto& factors = class_nmf[c].factors;
                for (std::size_t topic = 0; topic < factors.h.rows(); ++topic) {
                    LabeledRow artificial;
                    artificial.id = std::string("at5-c") + std::to_string(c) + "-t" +
                                    std::to_string(topic);
                    artificial.label = c;
                    for (std::int32_t term : top_terms(factors.h, topic, params.topic_top_terms))
                        artificial.tokens.push_back(data.vocab->token(term + 2));
                    out.rows.push_back(reencode(std::move(artificial), data));
                }
            }
            break;
        }

        case PolicyKind::AT6: {
            out.rows = data.rows;
            for (const auto& row : data.rows) {
                const auto mean = mean_vector(row.tokens, emb);
                LabeledRow artificial;
                artificial.id = row.id + "/at6";
                artificial.label = row.label;
                artificial.tokens = mean.empty()
                                        ? row.tokens
                                        : neighbor_tokens(emb, mean, params.tweet_neighbor_count);
                out.rows.push_back(reencode(std::move(artificial), data));
            }
            break;
        }
    }
    return out;
}

std::vector<PolicyRun> run_at_suite(const LabeledDataset& data, const EmbeddingMatrix& emb,
                                    const AugmentParams& params) {
    std::vector<PolicyRun> runs;
    for (PolicyKind kind : {PolicyKind::AT0, PolicyKind::AT1, PolicyKind::AT2, PolicyKind::AT3,
                            PolicyKind::AT4, PolicyKind::AT5, PolicyKind::AT6}) {
        PolicyRun run;
        run.kind = kind;
        run.params = params;
        run.input_size = data.rows.size();
        run.data = augment(data, AugmentPolicy{kind, params}, emb);
        run.output_size = run.data.rows.size();
        runs.push_back(std::move(run));
    }
    return runs;
}

}  // namespace tweetlab
