#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "npblog/error.hpp"

namespace npblog {

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

/// Flat `key = value` model configuration:
///
///   alpha.Pub = 5.0
///   truncation.Author = 100
///   extent.Draw = 20
///   dist.TitleStrDist.family = StringModel
///   dist.TitleStrDist.temperature = 10.0
class ModelConfig {
  public:
    static ModelConfig parse(std::string_view text) {
        ModelConfig cfg;
        int line_no = 0;
        std::istringstream in{std::string(text)};
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (auto slashes = line.find("//"); slashes != std::string::npos) line.erase(slashes);
            const auto content = detail::trim(line);
            if (content.empty()) continue;
            const auto eq = content.find('=');
            if (eq == std::string::npos) {
                throw Error(ErrorCode::InvalidParam, "config line " + std::to_string(line_no) + " has no '='");
            }
            auto key = detail::trim(content.substr(0, eq));
            auto value = detail::trim(content.substr(eq + 1));
            if (key.empty()) throw Error(ErrorCode::InvalidParam, "config line " + std::to_string(line_no) + " has no key");
            cfg.entries_[key] = value;
        }
        cfg.validate();
        return cfg;
    }

    static ModelConfig load(const std::string& path) { return parse(detail::read_file(path)); }

    void set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

    std::optional<std::string> get(const std::string& key) const {
        if (auto it = entries_.find(key); it != entries_.end()) return it->second;
        return std::nullopt;
    }

    std::optional<double> real(const std::string& key) const {
        auto v = get(key);
        if (!v) return std::nullopt;
        return parse_real(key, *v);
    }

    std::optional<long> integer(const std::string& key) const {
        auto v = get(key);
        if (!v) return std::nullopt;
        long out = 0;
        auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc() || ptr != v->data() + v->size()) {
            throw Error(ErrorCode::InvalidParam, "config key '" + key + "' is not an integer: " + *v);
        }
        return out;
    }

    /// DP concentration for a type or collection symbol.
    double alpha(const std::string& symbol) const {
        auto a = real("alpha." + symbol);
        if (!a) throw Error(ErrorCode::MissingConfig, "no concentration configured: alpha." + symbol);
        return *a;
    }
    bool has_alpha(const std::string& symbol) const { return entries_.contains("alpha." + symbol); }

    std::optional<long> truncation(const std::string& type) const { return integer("truncation." + type); }
    std::optional<long> extent(const std::string& type) const { return integer("extent." + type); }

    /// `dist.<name>.<slot>` entries grouped by distribution name.
    std::map<std::string, std::map<std::string, std::string>> distributions() const {
        std::map<std::string, std::map<std::string, std::string>> out;
        for (const auto& [key, value] : entries_) {
            if (!key.starts_with("dist.")) continue;
            const auto rest = key.substr(5);
            const auto dot = rest.rfind('.');
            if (dot == std::string::npos) {
                throw Error(ErrorCode::InvalidParam, "malformed distribution key '" + key + "'");
            }
            out[rest.substr(0, dot)][rest.substr(dot + 1)] = value;
        }
        return out;
    }

    const std::map<std::string, std::string>& entries() const { return entries_; }

    static double parse_real(const std::string& key, const std::string& text) {
        try {
            std::size_t used = 0;
            double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidParam, "config key '" + key + "' is not a number: " + text);
        }
    }

  private:
    void validate() const {
        for (const auto& [key, value] : entries_) {
            if (key.starts_with("alpha.")) {
                const double a = parse_real(key, value);
                if (!(a > 0.0)) throw Error(ErrorCode::InvalidParam, key + " must be positive");
            } else if (key.starts_with("truncation.")) {
                if (*integer(key) < 1) throw Error(ErrorCode::InvalidParam, key + " must be at least 1");
            } else if (key.starts_with("extent.")) {
                if (*integer(key) < 0) throw Error(ErrorCode::InvalidParam, key + " must be nonnegative");
            }
        }
    }

    std::map<std::string, std::string> entries_;
};

}  // namespace npblog
