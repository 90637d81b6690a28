#include "plplab/verifier.hpp"

#include <cctype>
#include <stdexcept>

namespace plplab::verifier {

namespace {

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

std::string_view trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

// Canonical plain-decimal form, or nullopt when `s` is not of the shape
// [+-]? digits [. digits]. Pure string surgery: no floating point, so
// equality stays exact for arbitrarily long numerals.
std::optional<std::string> canonical_decimal(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') {
        negative = s[i] == '-';
        ++i;
    }
    std::string_view int_part;
    std::string_view frac_part;
    const std::size_t int_begin = i;
    while (i < s.size() && is_digit(s[i])) ++i;
    int_part = s.substr(int_begin, i - int_begin);
    if (i < s.size() && s[i] == '.') {
        ++i;
        const std::size_t frac_begin = i;
        while (i < s.size() && is_digit(s[i])) ++i;
        frac_part = s.substr(frac_begin, i - frac_begin);
    }
    if (i != s.size()) return std::nullopt;          // trailing junk
    if (int_part.empty() && frac_part.empty()) return std::nullopt;

    while (int_part.size() > 1 && int_part.front() == '0') int_part.remove_prefix(1);
    while (!frac_part.empty() && frac_part.back() == '0') frac_part.remove_suffix(1);

    std::string out;
    if (int_part.empty()) int_part = "0";
    out += int_part;
    if (!frac_part.empty()) {
        out += '.';
        out += frac_part;
    }
    const bool is_zero = out.find_first_not_of("0.") == std::string::npos;
    if (negative && !is_zero) out.insert(out.begin(), '-');
    return out;
}

}  // namespace

std::string normalize_answer(std::string_view raw) {
    std::string_view trimmed = trim(raw);
    std::string stripped;
    stripped.reserve(trimmed.size());
    for (const char c : trimmed) {
        if (c == '\\' || c == '$') continue;  // escapes and currency
        stripped.push_back(c);
    }
    // Thousands separators, judged on the stripped string so "1\,234" and
    // "1,234" normalize identically (and idempotently).
    std::string cleaned;
    cleaned.reserve(stripped.size());
    for (std::size_t i = 0; i < stripped.size(); ++i) {
        if (stripped[i] == ',' && i > 0 && i + 1 < stripped.size() &&
            is_digit(stripped[i - 1]) && is_digit(stripped[i + 1])) {
            continue;
        }
        cleaned.push_back(stripped[i]);
    }
    std::string_view again = trim(cleaned);
    if (auto num = canonical_decimal(again)) {
        return *num;
    }
    return std::string(again);
}

ExtractionResult extract_last_boxed(std::string_view text) {
    ExtractionResult result;
    result.has_think_marker = text.find(kThinkMarker) != std::string_view::npos;

    const std::size_t opener = text.rfind(kBoxedOpener);
    if (opener == std::string_view::npos) {
        result.truncated = true;
        return result;
    }
    const std::size_t content_begin = opener + kBoxedOpener.size();
    int depth = 1;
    for (std::size_t i = content_begin; i < text.size(); ++i) {
        if (text[i] == '{') {
            ++depth;
        } else if (text[i] == '}') {
            --depth;
            if (depth == 0) {
                result.answer = std::string(text.substr(content_begin, i - content_begin));
                return result;
            }
        }
    }
    // Opener with no balancing brace: the output was cut before the final
    // answer finished, which grades as truncated.
    result.truncated = true;
    return result;
}

bool answers_match(std::string_view predicted, const GoldAnswer& gold) {
    // Canonicalization folds equal decimals onto identical strings, so one
    // comparison covers both the numeric and the string case.
    return normalize_answer(predicted) == gold.normalized;
}

GradedCompletion grade_completion(const reward::CompletionRecord& record,
                                  const GoldAnswer& gold) {
    if (!record.text.has_value()) {
        throw std::invalid_argument("grading needs the completion text");
    }
    const ExtractionResult extraction = extract_last_boxed(*record.text);
    GradedCompletion graded;
    graded.record = record;
    graded.extracted_answer = extraction.answer;
    graded.has_think_marker = extraction.has_think_marker;
    graded.truncated = extraction.truncated;
    graded.record.correct =
        extraction.answer.has_value() && answers_match(*extraction.answer, gold);
    return graded;
}

MarkerStats marker_statistics(std::span<const GradedCompletion> records,
                              std::span<const SegmentTokens> segments) {
    if (!segments.empty() && segments.size() != records.size()) {
        throw std::invalid_argument("segment counts must align with records");
    }
    MarkerStats stats;
    stats.total = static_cast<std::int64_t>(records.size());
    for (const auto& rec : records) {
        if (rec.has_think_marker) ++stats.with_marker;
    }
    if (!segments.empty()) {
        std::int64_t think = 0;
        std::int64_t total = 0;
        for (const auto& seg : segments) {
            think += seg.think_tokens;
            total += seg.total_tokens;
        }
        if (total > 0) {
            stats.marker_token_share =
                static_cast<double>(think) / static_cast<double>(total);
        }
    }
    return stats;
}

}  // namespace plplab::verifier
