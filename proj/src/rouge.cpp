#include "its/rouge.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <sstream>
#include <unordered_map>

namespace its {

namespace {

double f1_of(double p, double r) { return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::unordered_map<std::string, std::size_t> ngram_counts(const TokenList& tokens, int n) {
    std::unordered_map<std::string, std::size_t> counts;
    if (tokens.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int j = 1; j < n; ++j) {
            key.push_back('\x1f');
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

double metric_key(const RougeScore& s) { return s.f1; }

}  // namespace

TruncationPolicy TruncationPolicy::parse(const std::string& text) {
    if (text == "none" || text.empty()) return none();
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string kind = text.substr(0, colon);
        const std::string num = text.substr(colon + 1);
        std::size_t limit = 0;
        try {
            limit = std::stoul(num);
        } catch (const std::exception&) {
            throw DataError("bad truncation policy: " + text);
        }
        if (limit == 0) throw DataError("truncation limit must be positive: " + text);
        if (kind == "bytes") return bytes(limit);
        if (kind == "words") return words(limit);
    }
    throw DataError("bad truncation policy: " + text + " (want none, bytes:N or words:N)");
}

std::string TruncationPolicy::str() const {
    switch (mode) {
        case Mode::none: return "none";
        case Mode::bytes: return "bytes:" + std::to_string(limit);
        case Mode::words: return "words:" + std::to_string(limit);
    }
    return "none";
}

TokenList truncate(const TokenList& tokens, const TruncationPolicy& policy) {
    switch (policy.mode) {
        case TruncationPolicy::Mode::none:
            return tokens;
        case TruncationPolicy::Mode::words:
            if (tokens.size() <= policy.limit) return tokens;
            return TokenList(tokens.begin(), tokens.begin() + static_cast<long>(policy.limit));
        case TruncationPolicy::Mode::bytes: {
            TokenList out;
            std::size_t used = 0;
            for (const std::string& tok : tokens) {
                // Joined length counts the single separating space.
                const std::size_t cost = tok.size() + (out.empty() ? 0 : 1);
                if (used + cost > policy.limit) break;
                used += cost;
                out.push_back(tok);
            }
            return out;
        }
    }
    return tokens;
}

RougeScore rouge_n(const TokenList& candidate, const TokenList& reference, int n) {
    if (n != 1 && n != 2) throw std::invalid_argument("rouge_n: n must be 1 or 2");
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);

    RougeScore score;
    for (const auto& [gram, count] : cand) score.candidate_units += count;
    for (const auto& [gram, count] : ref) score.reference_units += count;
    for (const auto& [gram, count] : ref) {
        const auto it = cand.find(gram);
        if (it != cand.end()) score.overlap += std::min(count, it->second);
    }
    score.empty_reference = score.reference_units == 0;
    score.precision =
        score.candidate_units > 0
            ? static_cast<double>(score.overlap) / static_cast<double>(score.candidate_units)
            : 0.0;
    score.recall =
        score.reference_units > 0
            ? static_cast<double>(score.overlap) / static_cast<double>(score.reference_units)
            : 0.0;
    score.f1 = f1_of(score.precision, score.recall);
    return score;
}

RougeScore rouge_l(const TokenList& candidate, const TokenList& reference) {
    const std::size_t m = candidate.size();
    const std::size_t n = reference.size();

    std::size_t lcs = 0;
    if (m > 0 && n > 0) {
        std::vector<std::size_t> prev(n + 1, 0), cur(n + 1, 0);
        for (std::size_t i = 1; i <= m; ++i) {
            for (std::size_t j = 1; j <= n; ++j) {
                if (candidate[i - 1] == reference[j - 1]) {
                    cur[j] = prev[j - 1] + 1;
                } else {
                    cur[j] = std::max(prev[j], cur[j - 1]);
                }
            }
            std::swap(prev, cur);
        }
        lcs = prev[n];
    }

    RougeScore score;
    score.overlap = lcs;
    score.candidate_units = m;
    score.reference_units = n;
    score.empty_reference = n == 0;
    score.precision = m > 0 ? static_cast<double>(lcs) / static_cast<double>(m) : 0.0;
    score.recall = n > 0 ? static_cast<double>(lcs) / static_cast<double>(n) : 0.0;
    score.f1 = f1_of(score.precision, score.recall);
    return score;
}

std::string fold_case(const std::string& token) {
    std::string out = token;
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

TokenList fold_tokens(const TokenList& tokens) {
    TokenList out;
    out.reserve(tokens.size());
    for (const std::string& t : tokens) out.push_back(fold_case(t));
    return out;
}

TokenList join_sentences(const std::vector<TokenList>& sentences) {
    TokenList out;
    for (const TokenList& s : sentences) out.insert(out.end(), s.begin(), s.end());
    return out;
}

RougeReport score_corpus(const std::vector<ScoredPair>& pairs, const TruncationPolicy& policy,
                         bool max_over_references) {
    if (pairs.empty()) throw DataError("score_corpus: empty corpus");

    RougeReport report;
    report.documents = pairs.size();
    for (const ScoredPair& pair : pairs) {
        const TokenList cand =
            truncate(fold_tokens(join_sentences(pair.candidate_sentences)), policy);
        if (pair.references.empty()) throw DataError("score_corpus: document without reference");
        if (!max_over_references && pair.references.size() != 1) {
            throw DataError("score_corpus: multiple references require max_over_references");
        }

        RougeScore best1, best2, bestL;
        bool first = true;
        for (const auto& reference : pair.references) {
            const TokenList ref = fold_tokens(join_sentences(reference));
            const RougeScore s1 = rouge_n(cand, ref, 1);
            const RougeScore s2 = rouge_n(cand, ref, 2);
            const RougeScore sL = rouge_l(cand, ref);
            if (first || metric_key(s1) > metric_key(best1)) best1 = s1;
            if (first || metric_key(s2) > metric_key(best2)) best2 = s2;
            if (first || metric_key(sL) > metric_key(bestL)) bestL = sL;
            first = false;
        }

        for (auto [total, part] : {std::pair{&report.rouge1, &best1},
                                   std::pair{&report.rouge2, &best2},
                                   std::pair{&report.rougeL, &bestL}}) {
            total->precision += part->precision;
            total->recall += part->recall;
            total->f1 += part->f1;
            total->overlap += part->overlap;
            total->candidate_units += part->candidate_units;
            total->reference_units += part->reference_units;
        }
    }

    const double inv = 1.0 / static_cast<double>(report.documents);
    for (RougeScore* s : {&report.rouge1, &report.rouge2, &report.rougeL}) {
        s->precision *= inv;
        s->recall *= inv;
        s->f1 *= inv;
    }
    return report;
}

std::string RougeReport::table() const {
    std::ostringstream out;
    out << std::left << std::setw(12) << "" << std::right << std::setw(10) << "Rouge-1"
        << std::setw(10) << "Rouge-2" << std::setw(10) << "Rouge-L" << '\n';
    const auto row = [&](const char* label, double a, double b, double c) {
        out << std::left << std::setw(12) << label << std::right << std::fixed
            << std::setprecision(4) << std::setw(10) << a << std::setw(10) << b << std::setw(10)
            << c << '\n';
    };
    row("recall", rouge1.recall, rouge2.recall, rougeL.recall);
    row("precision", rouge1.precision, rouge2.precision, rougeL.precision);
    row("f1", rouge1.f1, rouge2.f1, rougeL.f1);
    return out.str();
}

std::string RougeReport::json() const {
    std::ostringstream out;
    const auto obj = [&](const RougeScore& s) {
        std::ostringstream o;
        o << "{\"precision\": " << format_double(s.precision)
          << ", \"recall\": " << format_double(s.recall) << ", \"f1\": " << format_double(s.f1)
          << "}";
        return o.str();
    };
    out << "{\"documents\": " << documents << ", \"rouge1\": " << obj(rouge1)
        << ", \"rouge2\": " << obj(rouge2) << ", \"rougeL\": " << obj(rougeL) << "}";
    return out.str();
}

}  // namespace its
