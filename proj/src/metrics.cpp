#include "geogen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace geogen {

namespace {

constexpr double kEpsilonFloor = 1e-9;

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_digit(c) || (c >= 'a' && c <= 'z'); }

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string run;
    auto flush = [&] {
        if (!run.empty()) {
            tokens.push_back(run);
            run.clear();
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (is_alnum(c)) {
            run += c;
        } else if (c == '.' && !run.empty() && is_digit(run.back()) &&
                   i + 1 < text.size() && is_digit(text[i + 1])) {
            run += c;  // decimal point inside a number
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            flush();
        } else {
            flush();
            tokens.emplace_back(1, c);
        }
    }
    flush();
    return tokens;
}

double bleu4(const std::vector<std::string>& candidate,
             const std::vector<std::string>& reference) {
    if (candidate.empty() || reference.empty())
        throw EmptyInputError("bleu4: empty token sequence");

    double log_sum = 0.0;
    for (int n = 1; n <= 4; ++n) {
        const int total = static_cast<int>(candidate.size()) - n + 1;
        if (total <= 0) continue;  // no n-grams of this order: precision 1

        std::map<std::vector<std::string>, int> ref_counts;
        for (int i = 0; i + n <= static_cast<int>(reference.size()); ++i)
            ++ref_counts[{reference.begin() + i, reference.begin() + i + n}];

        std::map<std::vector<std::string>, int> cand_counts;
        for (int i = 0; i < total; ++i)
            ++cand_counts[{candidate.begin() + i, candidate.begin() + i + n}];

        double clipped = 0.0;
        for (const auto& [gram, count] : cand_counts) {
            auto it = ref_counts.find(gram);
            if (it != ref_counts.end()) clipped += std::min(count, it->second);
        }
        const double p = std::max(clipped, kEpsilonFloor) / total;
        log_sum += 0.25 * std::log(p);
    }

    const double c = static_cast<double>(candidate.size());
    const double r = static_cast<double>(reference.size());
    const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
    return bp * std::exp(log_sum);
}

double bleu4(const std::string& candidate, const std::string& reference) {
    return bleu4(tokenize(candidate), tokenize(reference));
}

double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference) {
    if (candidate.empty() || reference.empty())
        throw EmptyInputError("rouge_l: empty token sequence");

    const std::size_t n = candidate.size(), m = reference.size();
    std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j)
            cur[j] = candidate[i - 1] == reference[j - 1]
                         ? prev[j - 1] + 1
                         : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    const double lcs = static_cast<double>(prev[m]);
    if (lcs == 0.0) return 0.0;
    const double p = lcs / static_cast<double>(n);
    const double r = lcs / static_cast<double>(m);
    return 2.0 * p * r / (p + r);
}

double rouge_l(const std::string& candidate, const std::string& reference) {
    return rouge_l(tokenize(candidate), tokenize(reference));
}

}  // namespace geogen
