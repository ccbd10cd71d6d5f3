#include "tweetlab/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tweetlab/rng.hpp"

namespace tweetlab {

namespace {

constexpr std::size_t kNegativeTableSize = 1 << 20;
constexpr double kLogEps = 1e-12;

double clamped_log(double x) { return std::log(std::max(x, kLogEps)); }

// unigram distribution raised to 0.75, over real tokens only
std::vector<std::int32_t> build_negative_table(const Vocabulary& vocab) {
    std::vector<std::int32_t> table;
    table.reserve(kNegativeTableSize);
    double total = 0.0;
    for (std::size_t id = 2; id < vocab.size(); ++id)
        total += std::pow(static_cast<double>(vocab.count(static_cast<std::int32_t>(id))), 0.75);
    if (total <= 0.0) return table;

    std::size_t id = 2;
    double cumulative =
        std::pow(static_cast<double>(vocab.count(static_cast<std::int32_t>(id))), 0.75) / total;
    for (std::size_t i = 0; i < kNegativeTableSize; ++i) {
        table.push_back(static_cast<std::int32_t>(id));
        if (static_cast<double>(i) / kNegativeTableSize > cumulative && id + 1 < vocab.size()) {
            ++id;
            cumulative +=
                std::pow(static_cast<double>(vocab.count(static_cast<std::int32_t>(id))), 0.75) /
                total;
        }
    }
    return table;
}

struct TrainContext {
    const Vocabulary& vocab;
    const CbowConfig& config;
    std::vector<std::vector<std::int32_t>> sentences;  // in-vocabulary ids
    std::int64_t train_words = 0;
};

TrainContext prepare(const std::vector<std::vector<std::string>>& corpus, const Vocabulary& vocab,
                     const CbowConfig& config) {
    if (config.dim < 1 || config.window < 1 || config.negatives < 1 || config.epochs < 0)
        throw std::invalid_argument("embedding training: invalid config");
    TrainContext ctx{vocab, config, {}, 0};
    for (const auto& sentence : corpus) {
        std::vector<std::int32_t> ids;
        ids.reserve(sentence.size());
        for (const auto& token : sentence) {
            auto id = vocab.id(token);
            if (id && *id >= 2) ids.push_back(*id);  // OOV and reserved tokens are dropped
        }
        ctx.train_words += static_cast<std::int64_t>(ids.size());
        if (!ids.empty()) ctx.sentences.push_back(std::move(ids));
    }
    if (ctx.train_words < 2 * config.window + 1)
        throw std::invalid_argument("embedding training: corpus shorter than 2*window+1 tokens");
    return ctx;
}

EmbeddingMatrix init_embedding(std::shared_ptr<const Vocabulary> vocab, std::int32_t dim,
                               Rng& rng, Provenance provenance) {
    EmbeddingMatrix emb;
    emb.vocab = std::move(vocab);
    emb.dim = dim;
    emb.vectors = Tensor2D(emb.vocab->size(), static_cast<std::size_t>(dim));
    emb.provenance = provenance;
    emb.trainable = true;
    const double bound = 0.5 / static_cast<double>(dim);
    for (std::size_t r = 2; r < emb.vocab->size(); ++r)
        for (std::int32_t c = 0; c < dim; ++c)
            emb.vectors(r, static_cast<std::size_t>(c)) = rng.uniform(-bound, bound);
    for (std::int32_t c = 0; c < dim; ++c)
        emb.vectors(kUnkId, static_cast<std::size_t>(c)) = rng.uniform(-0.25, 0.25);
    return emb;
}

EmbeddingTrainResult train_word2vec(const std::vector<std::vector<std::string>>& corpus,
                                    std::shared_ptr<const Vocabulary> vocab,
                                    const CbowConfig& config, bool cbow) {
    TrainContext ctx = prepare(corpus, *vocab, config);
    Rng rng(config.seed);
    EmbeddingMatrix emb = init_embedding(vocab, config.dim, rng, Provenance::DomainPretrained);
    Tensor2D output(vocab->size(), static_cast<std::size_t>(config.dim));
    const auto table = build_negative_table(*vocab);
    if (table.empty()) throw std::invalid_argument("embedding training: no trainable tokens");

    const std::size_t dim = static_cast<std::size_t>(config.dim);
    const double total_words =
        static_cast<double>(ctx.train_words) * std::max(1, config.epochs) + 1.0;
    std::int64_t processed = 0;

    std::vector<double> hidden(dim), hidden_grad(dim);
    std::vector<std::int32_t> context;
    std::vector<double> epoch_loss;

    for (std::int32_t epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0.0;
        std::int64_t loss_count = 0;
        for (const auto& sentence : ctx.sentences) {
            // frequency subsampling, applied per occurrence
            std::vector<std::int32_t> kept;
            kept.reserve(sentence.size());
            for (std::int32_t id : sentence) {
                ++processed;
                if (config.subsample_threshold > 0.0) {
                    const double freq = static_cast<double>(ctx.vocab.count(id)) /
                                        static_cast<double>(ctx.train_words);
                    const double keep = (std::sqrt(freq / config.subsample_threshold) + 1.0) *
                                        (config.subsample_threshold / freq);
                    if (keep < 1.0 && rng.uniform() >= keep) continue;
                }
                kept.push_back(id);
            }

            const double progress = static_cast<double>(processed) / total_words;
            const double alpha =
                std::max(config.min_lr, config.initial_lr * (1.0 - progress));

            for (std::size_t pos = 0; pos < kept.size(); ++pos) {
                const std::int32_t center = kept[pos];
                const auto radius =
                    static_cast<std::size_t>(1 + rng.uniform_int(
                                                     static_cast<std::uint64_t>(config.window)));
                context.clear();
                const std::size_t lo = pos > radius ? pos - radius : 0;
                const std::size_t hi = std::min(kept.size() - 1, pos + radius);
                for (std::size_t c = lo; c <= hi; ++c)
                    if (c != pos) context.push_back(kept[c]);
                if (context.empty()) continue;

                auto train_pair = [&](std::span<const double> h, auto&& apply_grad) {
                    std::fill(hidden_grad.begin(), hidden_grad.end(), 0.0);
                    for (std::int32_t d = 0; d <= config.negatives; ++d) {
                        std::int32_t target;
                        double label;
                        if (d == 0) {
                            target = center;
                            label = 1.0;
                        } else {
                            target = table[rng.uniform_int(table.size())];
                            if (target == center) continue;
                            label = 0.0;
                        }
                        double* out_row = output.row(static_cast<std::size_t>(target));
                        double s = 0.0;
                        for (std::size_t i = 0; i < dim; ++i) s += h[i] * out_row[i];
                        const double f = 1.0 / (1.0 + std::exp(-s));
                        loss_sum -= label > 0.5 ? clamped_log(f) : clamped_log(1.0 - f);
                        const double g = (label - f) * alpha;
                        for (std::size_t i = 0; i < dim; ++i) {
                            hidden_grad[i] += g * out_row[i];
                            out_row[i] += g * h[i];
                        }
                    }
                    ++loss_count;
                    apply_grad();
                };

                if (cbow) {
                    std::fill(hidden.begin(), hidden.end(), 0.0);
                    for (std::int32_t c : context) {
                        const double* in_row = emb.vectors.row(static_cast<std::size_t>(c));
                        for (std::size_t i = 0; i < dim; ++i) hidden[i] += in_row[i];
                    }
                    const double inv = 1.0 / static_cast<double>(context.size());
                    for (std::size_t i = 0; i < dim; ++i) hidden[i] *= inv;
                    train_pair(hidden, [&] {
                        // hidden is the context mean, so each context vector
                        // receives 1/n of the hidden gradient
                        for (std::int32_t c : context) {
                            double* in_row = emb.vectors.row(static_cast<std::size_t>(c));
                            for (std::size_t i = 0; i < dim; ++i)
                                in_row[i] += hidden_grad[i] * inv;
                        }
                    });
                } else {
                    // skip-gram: the center vector predicts each context word;
                    // swap center/target roles pairwise
                    double* in_row = emb.vectors.row(static_cast<std::size_t>(center));
                    for (std::int32_t c : context) {
                        const std::int32_t saved_center = c;
                        std::fill(hidden_grad.begin(), hidden_grad.end(), 0.0);
                        for (std::int32_t d = 0; d <= config.negatives; ++d) {
                            std::int32_t target;
                            double label;
                            if (d == 0) {
                                target = saved_center;
                                label = 1.0;
                            } else {
                                target = table[rng.uniform_int(table.size())];
                                if (target == saved_center) continue;
                                label = 0.0;
                            }
                            double* out_row = output.row(static_cast<std::size_t>(target));
                            double s = 0.0;
                            for (std::size_t i = 0; i < dim; ++i) s += in_row[i] * out_row[i];
                            const double f = 1.0 / (1.0 + std::exp(-s));
                            loss_sum -= label > 0.5 ? clamped_log(f) : clamped_log(1.0 - f);
                            const double g = (label - f) * alpha;
                            for (std::size_t i = 0; i < dim; ++i) {
                                hidden_grad[i] += g * out_row[i];
                                out_row[i] += g * in_row[i];
                            }
                        }
                        ++loss_count;
                        for (std::size_t i = 0; i < dim; ++i) in_row[i] += hidden_grad[i];
                    }
                }
            }
        }
        epoch_loss.push_back(loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0);
    }

    require_finite(emb.vectors, "embedding training");
    return {std::move(emb), std::move(epoch_loss)};
}

}  // namespace

EmbeddingMatrix random_embedding(std::shared_ptr<const Vocabulary> vocab, std::int32_t dim,
                                 std::uint64_t seed) {
    Rng rng(seed);
    return init_embedding(std::move(vocab), dim, rng, Provenance::RandomInit);
}

EmbeddingTrainResult train_cbow(const std::vector<std::vector<std::string>>& corpus,
                                std::shared_ptr<const Vocabulary> vocab,
                                const CbowConfig& config) {
    return train_word2vec(corpus, std::move(vocab), config, true);
}

EmbeddingTrainResult train_skipgram(const std::vector<std::vector<std::string>>& corpus,
                                    std::shared_ptr<const Vocabulary> vocab,
                                    const CbowConfig& config) {
    return train_word2vec(corpus, std::move(vocab), config, false);
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("cosine: dimension mismatch");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) throw std::invalid_argument("cosine: zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

std::vector<std::pair<std::int32_t, double>> nearest_to_vector(const EmbeddingMatrix& emb,
                                                               std::span<const double> query,
                                                               int k) {
    if (k < 1) throw std::invalid_argument("nearest_neighbors: k must be >= 1");
    std::vector<std::pair<std::int32_t, double>> scored;
    for (std::size_t id = 2; id < emb.vocab->size(); ++id) {
        const auto row = emb.row(static_cast<std::int32_t>(id));
        double nv = 0.0;
        for (double x : row) nv += x * x;
        if (nv == 0.0) continue;
        scored.emplace_back(static_cast<std::int32_t>(id), cosine(query, row));
    }
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (scored.size() > static_cast<std::size_t>(k)) scored.resize(static_cast<std::size_t>(k));
    return scored;
}

std::vector<std::pair<std::string, double>> nearest_neighbors(const EmbeddingMatrix& emb,
                                                              const std::string& token, int k) {
    auto id = emb.vocab->id(token);
    if (!id || *id < 2)
        throw std::invalid_argument("nearest_neighbors: '" + token + "' not in vocabulary");
    auto scored = nearest_to_vector(emb, emb.row(*id), k + 1);
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [nid, cos] : scored) {
        if (nid == *id) continue;
        out.emplace_back(emb.vocab->token(nid), cos);
        if (out.size() == static_cast<std::size_t>(k)) break;
    }
    return out;
}

void save_vectors(const EmbeddingMatrix& emb, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_vectors: cannot open '" + path + "'");
    out << emb.vocab->size() - 2 << ' ' << emb.dim << '\n';
    char buf[32];
    for (std::size_t id = 2; id < emb.vocab->size(); ++id) {
        out << emb.vocab->token(static_cast<std::int32_t>(id));
        for (std::int32_t c = 0; c < emb.dim; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", emb.vectors(id, static_cast<std::size_t>(c)));
            out << ' ' << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("save_vectors: write failed for '" + path + "'");
}

RawVectors load_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_vectors: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("load_vectors: '" + path + "': empty file");
    std::istringstream header(line);
    std::int64_t count = 0, dim = 0;
    if (!(header >> count >> dim) || count < 0 || dim < 1)
        throw std::runtime_error("load_vectors: '" + path + "': malformed header at line 1");

    RawVectors raw;
    raw.tokens.reserve(static_cast<std::size_t>(count));
    raw.vectors = Tensor2D(static_cast<std::size_t>(count), static_cast<std::size_t>(dim));
    std::size_t row = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (row >= static_cast<std::size_t>(count))
            throw std::runtime_error("load_vectors: '" + path + "': more rows than header at line " +
                                     std::to_string(lineno));
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        for (std::int64_t c = 0; c < dim; ++c) {
            double v;
            if (!(ls >> v))
                throw std::runtime_error("load_vectors: '" + path + "': expected " +
                                         std::to_string(dim) + " components at line " +
                                         std::to_string(lineno));
            raw.vectors(row, static_cast<std::size_t>(c)) = v;
        }
        double extra;
        if (ls >> extra)
            throw std::runtime_error("load_vectors: '" + path + "': too many components at line " +
                                     std::to_string(lineno));
        raw.tokens.push_back(std::move(token));
        ++row;
    }
    if (row != static_cast<std::size_t>(count))
        throw std::runtime_error("load_vectors: '" + path + "': header promised " +
                                 std::to_string(count) + " rows, found " + std::to_string(row));
    return raw;
}

EmbeddingMatrix project_vectors(const RawVectors& raw, std::shared_ptr<const Vocabulary> vocab,
                                Provenance provenance, std::uint64_t seed) {
    std::unordered_map<std::string, std::size_t> file_index;
    for (std::size_t i = 0; i < raw.tokens.size(); ++i) file_index.emplace(raw.tokens[i], i);

    EmbeddingMatrix emb;
    emb.vocab = std::move(vocab);
    emb.dim = static_cast<std::int32_t>(raw.vectors.cols());
    emb.vectors = Tensor2D(emb.vocab->size(), raw.vectors.cols());
    emb.provenance = provenance;
    Rng rng(seed);
    auto oov_init = [&](std::size_t r) {
        for (std::size_t c = 0; c < raw.vectors.cols(); ++c)
            emb.vectors(r, c) = rng.uniform(-0.25, 0.25);
    };
    oov_init(kUnkId);
    for (std::size_t id = 2; id < emb.vocab->size(); ++id) {
        auto it = file_index.find(emb.vocab->token(static_cast<std::int32_t>(id)));
        if (it == file_index.end()) {
            oov_init(id);
        } else {
            for (std::size_t c = 0; c < raw.vectors.cols(); ++c)
                emb.vectors(id, c) = raw.vectors(it->second, c);
        }
    }
    return emb;
}

namespace {

constexpr char kEmbeddingMagic[4] = {'T', 'L', 'E', 'B'};
constexpr std::uint32_t kEmbeddingVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
}

void write_string(std::ofstream& out, const std::string& s) {
    write_pod(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::ifstream& in) {
    std::uint32_t len = 0;
    read_pod(in, len);
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
}

}  // namespace

void save_embedding(const EmbeddingMatrix& emb, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_embedding: cannot open '" + path + "'");
    out.write(kEmbeddingMagic, 4);
    write_pod(out, kEmbeddingVersion);
    write_pod(out, emb.dim);
    write_pod(out, static_cast<std::uint64_t>(emb.vocab->size()));
    for (const auto& [token, count] : emb.vocab->entries()) {
        write_string(out, token);
        write_pod(out, count);
    }
    write_pod(out, static_cast<std::uint8_t>(emb.provenance));
    write_pod(out, static_cast<std::uint8_t>(emb.trainable ? 1 : 0));
    out.write(reinterpret_cast<const char*>(emb.vectors.data()),
              static_cast<std::streamsize>(emb.vectors.size() * sizeof(double)));
    if (!out) throw std::runtime_error("save_embedding: write failed for '" + path + "'");
}

EmbeddingMatrix load_embedding(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_embedding: cannot open '" + path + "'");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kEmbeddingMagic, 4) != 0)
        throw std::runtime_error("load_embedding: '" + path + "' is not an embedding checkpoint");
    std::uint32_t version = 0;
    read_pod(in, version);
    if (version != kEmbeddingVersion)
        throw std::runtime_error("load_embedding: unsupported version " + std::to_string(version));
    EmbeddingMatrix emb;
    read_pod(in, emb.dim);
    std::uint64_t vocab_size = 0;
    read_pod(in, vocab_size);
    std::vector<std::string> tokens;
    std::vector<std::int64_t> counts;
    tokens.reserve(vocab_size);
    for (std::uint64_t i = 0; i < vocab_size; ++i) {
        tokens.push_back(read_string(in));
        std::int64_t count = 0;
        read_pod(in, count);
        counts.push_back(count);
    }
    if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken)
        throw std::runtime_error("load_embedding: '" + path + "': corrupt vocabulary block");
    std::vector<std::pair<std::string, std::int64_t>> entries;
    for (std::size_t i = 2; i < tokens.size(); ++i) entries.emplace_back(tokens[i], counts[i]);
    auto vocab = std::make_shared<Vocabulary>(Vocabulary::from_entries(entries));
    emb.vocab = vocab;
    std::uint8_t provenance = 0, trainable = 0;
    read_pod(in, provenance);
    read_pod(in, trainable);
    emb.provenance = static_cast<Provenance>(provenance);
    emb.trainable = trainable != 0;
    emb.vectors = Tensor2D(vocab_size, static_cast<std::size_t>(emb.dim));
    in.read(reinterpret_cast<char*>(emb.vectors.data()),
            static_cast<std::streamsize>(emb.vectors.size() * sizeof(double)));
    if (!in) throw std::runtime_error("load_embedding: truncated file '" + path + "'");
    return emb;
}

}  // namespace tweetlab
