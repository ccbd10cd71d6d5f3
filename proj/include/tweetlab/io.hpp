#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tweetlab/corpus.hpp"

namespace tweetlab {

// JSON Lines dataset: one object per line with fields id, text and an
// optional 0/1 label. Parse errors carry the line number.
std::vector<TweetRecord> read_jsonl(const std::string& path);
void write_jsonl(const std::vector<TweetRecord>& records, const std::string& path);

// plain text, one keyword per line, blank lines ignored
std::vector<std::string> read_keywords(const std::string& path);

// FNV-1a 64 digest of a file's bytes, hex encoded
std::string file_digest(const std::string& path);

// sorted key=value lines; every command writes one per artifact set
struct Manifest {
    std::map<std::string, std::string> entries;

    void set(const std::string& key, const std::string& value) { entries[key] = value; }
    void set(const std::string& key, std::int64_t value) {
        entries[key] = std::to_string(value);
    }
    void write(const std::string& path) const;
};

}  // namespace tweetlab
