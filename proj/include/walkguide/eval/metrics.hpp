#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace walkguide::eval {

// Lowercased whitespace tokens.
std::vector<std::string> tokenize(std::string_view text);

size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// LCS F-measure over lowercased whitespace tokens: P = LCS/|cand|,
// R = LCS/|ref|, F = 2PR/(P+R); 0 when either side is empty.
double rouge_l(std::string_view candidate, std::string_view reference);

// Simplified METEOR: exact then suffix-stemmed unigram alignment,
// F_mean = 10PR/(R+9P), penalty = 0.5*(chunks/matches)^3,
// score = F_mean*(1-penalty). No synonym dictionary.
double meteor_lite(std::string_view candidate, std::string_view reference);

// Crude suffix stemmer backing the second meteor pass.
std::string stem(std::string_view token);

int word_count(std::string_view text);

// Greedy token-embedding F1: precision is the mean over candidate tokens of
// the best cosine match into the reference, recall the mirror image.
double greedy_embedding_f1(const std::vector<std::vector<double>>& candidate_vectors,
                           const std::vector<std::vector<double>>& reference_vectors);

}  // namespace walkguide::eval
