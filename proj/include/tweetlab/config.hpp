#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tweetlab {

// Flat key=value experiment config with dotted section prefixes, e.g.
// `cnn.batch_size=32`. '#' starts a comment. Unknown keys are rejected so
// typos fail fast.
class ExperimentConfig {
public:
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_string(const std::string& text);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    // digest of the effective key=value set, recorded in manifests
    std::string digest() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace tweetlab
