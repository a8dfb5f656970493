#include "rigidity/config.hpp"

#include <cstdio>

#include "rigidity/errors.hpp"

namespace rigidity {

namespace {
std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}
}  // namespace

KvConfig KvConfig::parse(const std::string& text) {
    KvConfig cfg;
    std::size_t pos = 0;
    int lineno = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (cfg.kv_.count(key)) throw ConfigError("duplicate key: " + key);
        cfg.kv_[key] = val;
    }
    return cfg;
}

std::string KvConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
    return out;
}

const std::string& KvConfig::get(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

std::string KvConfig::get_or(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}

double KvConfig::get_double(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    try {
        return std::stod(it->second);
    } catch (...) {
        throw ConfigError("key " + key + ": not a number: " + it->second);
    }
}

long long KvConfig::get_int(const std::string& key, long long dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    try {
        return std::stoll(it->second);
    } catch (...) {
        throw ConfigError("key " + key + ": not an integer: " + it->second);
    }
}

void KvConfig::set(const std::string& key, const std::string& value) { kv_[key] = value; }

void KvConfig::reject_unknown(const std::set<std::string>& allowed) const {
    for (const auto& [k, _] : kv_)
        if (!allowed.count(k)) throw ConfigError("unknown config key: " + k);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) body_ += (i ? "," : "") + header[i];
    body_ += "\n";
}

void CsvWriter::comment(const std::string& line) {
    body_.insert(0, "# " + line + "\n");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) throw ConfigError("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) body_ += (i ? "," : "") + cells[i];
    body_ += "\n";
}

std::string CsvWriter::num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvWriter::num(long long v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", v);
    return buf;
}

}  // namespace rigidity
