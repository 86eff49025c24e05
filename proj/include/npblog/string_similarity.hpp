#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace npblog::similarity {

/// Jaro similarity in [0, 1]. Two empty strings are identical.
inline double jaro(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    if (a == b) return 1.0;

    const std::size_t window = std::max<std::size_t>(std::max(a.size(), b.size()) / 2, 1) - 1;
    std::vector<bool> a_matched(a.size(), false);
    std::vector<bool> b_matched(b.size(), false);
    std::size_t matches = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t lo = i > window ? i - window : 0;
        const std::size_t hi = std::min(b.size(), i + window + 1);
        for (std::size_t j = lo; j < hi; ++j) {
            if (!b_matched[j] && a[i] == b[j]) {
                a_matched[i] = b_matched[j] = true;
                ++matches;
                break;
            }
        }
    }
    if (matches == 0) return 0.0;

    std::size_t half_transpositions = 0;
    for (std::size_t i = 0, j = 0; i < a.size(); ++i) {
        if (!a_matched[i]) continue;
        while (!b_matched[j]) ++j;
        if (a[i] != b[j]) ++half_transpositions;
        ++j;
    }
    const double m = static_cast<double>(matches);
    const double t = static_cast<double>(half_transpositions / 2);
    return (m / static_cast<double>(a.size()) + m / static_cast<double>(b.size()) + (m - t) / m) / 3.0;
}

inline std::string lowercase(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

/// Last whitespace-separated token, lowercased, with surrounding punctuation removed.
inline std::string surname(std::string_view name) {
    std::size_t end = name.size();
    while (end > 0 && !std::isalnum(static_cast<unsigned char>(name[end - 1]))) --end;
    std::size_t begin = end;
    while (begin > 0 && !std::isspace(static_cast<unsigned char>(name[begin - 1]))) --begin;
    std::string token = lowercase(name.substr(begin, end - begin));
    while (!token.empty() && !std::isalnum(static_cast<unsigned char>(token.front()))) token.erase(token.begin());
    return token;
}

inline double jaro_surname(std::string_view a, std::string_view b) {
    if (a == b) return 1.0;
    return jaro(surname(a), surname(b));
}

inline std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

/// TF-IDF cosine similarity with document frequencies taken from a fixed corpus.
class TfIdf {
  public:
    TfIdf() = default;

    explicit TfIdf(const std::vector<std::string>& corpus) : documents_(static_cast<double>(corpus.size())) {
        for (const auto& doc : corpus) {
            auto words = word_tokens(doc);
            std::sort(words.begin(), words.end());
            words.erase(std::unique(words.begin(), words.end()), words.end());
            for (const auto& w : words) ++df_[w];
        }
    }

    /// L2-normalised sparse vector, sorted by term.
    std::vector<std::pair<std::string, double>> vectorize(std::string_view text) const {
        std::map<std::string, double> tf;
        for (auto& w : word_tokens(text)) tf[w] += 1.0;
        std::vector<std::pair<std::string, double>> vec;
        double norm = 0.0;
        for (const auto& [word, count] : tf) {
            const auto it = df_.find(word);
            const double df = it == df_.end() ? 1.0 : static_cast<double>(it->second);
            const double weight = count * std::log(1.0 + std::max(documents_, 1.0) / df);
            vec.emplace_back(word, weight);
            norm += weight * weight;
        }
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (auto& entry : vec) entry.second /= norm;
        }
        return vec;
    }

    static double cosine(const std::vector<std::pair<std::string, double>>& a,
                         const std::vector<std::pair<std::string, double>>& b) {
        double dot = 0.0;
        auto i = a.begin();
        auto j = b.begin();
        while (i != a.end() && j != b.end()) {
            if (i->first < j->first) {
                ++i;
            } else if (j->first < i->first) {
                ++j;
            } else {
                dot += i->second * j->second;
                ++i;
                ++j;
            }
        }
        return std::clamp(dot, 0.0, 1.0);
    }

    double similarity(std::string_view a, std::string_view b) const {
        if (a == b) return 1.0;
        return cosine(vectorize(a), vectorize(b));
    }

  private:
    double documents_ = 0.0;
    std::unordered_map<std::string, long> df_;
};

}  // namespace npblog::similarity
