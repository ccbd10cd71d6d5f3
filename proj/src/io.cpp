#include "tweetlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace tweetlab {

using nlohmann::json;

std::vector<TweetRecord> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_jsonl: cannot open '" + path + "'");
    std::vector<TweetRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("read_jsonl: '" + path + "' line " + std::to_string(lineno) +
                                     ": " + e.what());
        }
        TweetRecord rec;
        if (!obj.contains("id") || !obj["id"].is_string() || obj["id"].get<std::string>().empty())
            throw std::runtime_error("read_jsonl: '" + path + "' line " + std::to_string(lineno) +
                                     ": missing or empty id");
        if (!obj.contains("text") || !obj["text"].is_string())
            throw std::runtime_error("read_jsonl: '" + path + "' line " + std::to_string(lineno) +
                                     ": missing text");
        rec.id = obj["id"].get<std::string>();
        rec.text = obj["text"].get<std::string>();
        if (obj.contains("label") && !obj["label"].is_null()) {
            const auto label = obj["label"].get<int>();
            if (label != 0 && label != 1)
                throw std::runtime_error("read_jsonl: '" + path + "' line " +
                                         std::to_string(lineno) + ": label must be 0 or 1");
            rec.label = label;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_jsonl(const std::vector<TweetRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) throw std::runtime_error("write_jsonl: cannot open '" + path + "'");
    for (const auto& rec : records) {
        json obj;
        obj["id"] = rec.id;
        obj["text"] = rec.text;
        if (rec.label) obj["label"] = *rec.label;
        out << obj.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write_jsonl: write failed for '" + path + "'");
}

std::vector<std::string> read_keywords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_keywords: cannot open '" + path + "'");
    std::vector<std::string> keywords;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) keywords.push_back(line);
    }
    return keywords;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file_digest: cannot open '" + path + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void Manifest::write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("manifest: cannot open '" + path + "'");
    for (const auto& [key, value] : entries) out << key << '=' << value << '\n';
    if (!out) throw std::runtime_error("manifest: write failed for '" + path + "'");
}

}  // namespace tweetlab
