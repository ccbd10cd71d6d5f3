#include "tweetlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace tweetlab {

namespace {

const std::unordered_set<std::string> kKnownKeys = {
    "paths.labeled", "paths.unlabeled", "paths.keywords", "paths.vectors", "paths.eval_data",
    "paths.out",
    "embedding.mode", "embedding.trainable", "embedding.dim", "embedding.window",
    "embedding.negatives", "embedding.epochs", "embedding.min_count", "embedding.subsample",
    "embedding.lr", "embedding.objective",
    "vocab.min_count",
    "cnn.max_len", "cnn.batch_size", "cnn.epochs", "cnn.patience", "cnn.dense_units",
    "cnn.threshold", "cnn.filters", "cnn.lr",
    "cnn.dropout.input", "cnn.dropout.dense", "cnn.dropout.h3", "cnn.dropout.h4",
    "cnn.dropout.h5",
    "train.valid_fraction",
    "split.test_fraction", "split.k",
    "baselines", "baseline.knn_k", "baseline.ridge_lambda", "baseline.mnb_alpha",
    "baseline.dnn_epochs", "baseline.dnn_lr", "baseline.dnn_dropout",
    "augment.replace_prob", "augment.neighbor_k", "augment.expand_count",
    "augment.tweet_neighbor_count", "augment.nmf_rank", "augment.nmf_iterations",
    "augment.nmf_top_terms", "augment.topic_top_terms", "augment.theta", "augment.min_count",
    "seed",
};

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!kKnownKeys.count(key))
            throw std::runtime_error("config line " + std::to_string(lineno) + ": unknown key '" +
                                     key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str());
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string ExperimentConfig::require_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw std::runtime_error("config: required key '" + key + "' is missing");
    return it->second;
}

std::int64_t ExperimentConfig::get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const std::int64_t v = std::stoll(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: '" + key + "' is not an integer: " + it->second);
    }
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: '" + key + "' is not a number: " + it->second);
    }
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::runtime_error("config: '" + key + "' is not a boolean: " + it->second);
}

std::string ExperimentConfig::digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](const std::string& s) {
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        h ^= 0xff;
        h *= 0x100000001b3ULL;
    };
    for (const auto& [key, value] : values_) {
        mix(key);
        mix(value);
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace tweetlab
