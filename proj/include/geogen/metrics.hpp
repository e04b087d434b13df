#pragma once

#include <string>
#include <vector>

#include "geogen/errors.hpp"

namespace geogen {

struct EmptyInputError : Error {
    using Error::Error;
};

// lowercase; alphanumeric runs are tokens ('.' stays inside a number, so
// "1.24" is one token); every other printable character is its own token
std::vector<std::string> tokenize(const std::string& text);

// BLEU-4: geometric mean of clipped n-gram precisions (n = 1..4, uniform
// weights) times brevity penalty exp(1 - r/c) when c < r. Zero-overlap orders
// get an epsilon numerator floor (1e-9); orders with no n-grams at all (short
// strings) count as precision 1 so identity stays exact.
double bleu4(const std::vector<std::string>& candidate,
             const std::vector<std::string>& reference);
double bleu4(const std::string& candidate, const std::string& reference);

// ROUGE-L F1: P = LCS/|candidate|, R = LCS/|reference|, F = 2PR/(P+R),
// 0 when the LCS is empty.
double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference);
double rouge_l(const std::string& candidate, const std::string& reference);

}  // namespace geogen
