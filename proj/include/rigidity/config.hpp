#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace rigidity {

/// `key = value` text config, '#' comments; unknown keys are rejected against
/// the caller's allowed set; serialize -> parse round-trips.
class KvConfig {
public:
    KvConfig() = default;
    static KvConfig parse(const std::string& text);
    std::string serialize() const;

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    const std::string& get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& dflt) const;
    double get_double(const std::string& key, double dflt) const;
    long long get_int(const std::string& key, long long dflt) const;
    void set(const std::string& key, const std::string& value);

    void reject_unknown(const std::set<std::string>& allowed) const;
    const std::map<std::string, std::string>& entries() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

/// Deterministic CSV: header row, %.17g numbers, timestamps confined to a
/// leading comment line.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void comment(const std::string& line);
    void row(const std::vector<std::string>& cells);
    std::string str() const { return body_; }
    static std::string num(double v);
    static std::string num(long long v);

private:
    std::string body_;
    std::size_t width_;
};

}  // namespace rigidity
