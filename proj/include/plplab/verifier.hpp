#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plplab/reward.hpp"

namespace plplab::verifier {

// Closing tag separating a reasoning model's deliberation from its answer.
inline constexpr std::string_view kThinkMarker = "</think>";

// The macro wrapping the final answer per the prompt contract.
inline constexpr std::string_view kBoxedOpener = "\\boxed{";

// Canonicalize an answer string: trims whitespace, drops escape backslashes
// and currency '$', removes commas sitting between digits, and renders plain
// decimals in canonical form ("26.0" -> "26", ".5" -> "0.5", "-0" -> "0").
// Non-numeric strings come back cleaned but otherwise unchanged. Total and
// idempotent.
std::string normalize_answer(std::string_view raw);

struct GoldAnswer {
    std::string raw;
    std::string normalized;

    explicit GoldAnswer(std::string_view answer)
        : raw(answer), normalized(normalize_answer(answer)) {}
};

struct ExtractionResult {
    // Brace-balanced content of the LAST boxed occurrence; absent when no
    // occurrence exists or its braces never balance (malformed/truncated
    // output).
    std::optional<std::string> answer;
    bool has_think_marker = false;
    bool truncated = false;  // true exactly when answer is absent
};

// Scans arbitrary text for the final boxed answer. Nested braces are matched
// by depth counting; nothing else of LaTeX is interpreted. Never throws.
ExtractionResult extract_last_boxed(std::string_view text);

// Exact canonical equality: numeric when both sides canonicalize to plain
// decimals (which makes equal values identical strings), plain string
// comparison otherwise. No symbolic algebra.
bool answers_match(std::string_view predicted, const GoldAnswer& gold);

struct GradedCompletion {
    reward::CompletionRecord record;  // correct resolved
    std::optional<std::string> extracted_answer;
    bool has_think_marker = false;
    bool truncated = false;
};

// Resolves record.correct from its text: truncated outputs grade incorrect,
// otherwise the extracted answer is matched against gold. Throws
// std::invalid_argument when the record has no text.
GradedCompletion grade_completion(const reward::CompletionRecord& record,
                                  const GoldAnswer& gold);

// Optional per-record split of the token count at the think marker, for the
// marker-token-share statistic.
struct SegmentTokens {
    std::int64_t think_tokens = 0;
    std::int64_t total_tokens = 0;
};

struct MarkerStats {
    std::int64_t with_marker = 0;
    std::int64_t total = 0;
    // Share of think-segment tokens in total tokens; emitted only when
    // segment counts were supplied.
    std::optional<double> marker_token_share;
};

// `segments`, when non-empty, must be index-aligned with `records`.
MarkerStats marker_statistics(std::span<const GradedCompletion> records,
                              std::span<const SegmentTokens> segments = {});

}  // namespace plplab::verifier
