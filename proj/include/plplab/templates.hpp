#pragma once

#include <string_view>

namespace plplab::templates {

// Input templates as documented constants, byte-verbatim including the
// two-character "\n" escape sequences of the source form ({} are the
// question placeholders). These are reference material for callers that
// assemble prompts; this tool never does its own inference.

inline constexpr std::string_view kDeepseekTemplate =
    R"(<|begin_of_sentence|><|User|>Please reason step by step, and put your final answer within \boxed{{}}.Question: {}<|Assistant|>)";

inline constexpr std::string_view kQwenTemplate =
    R"(<|im_start|>system\nYou are a helpful assistant.<|im_end|>\n<|im_start|>user\nPlease reason step by step, and put your final answer within \\boxed{{}}.\n{}<|im_end|>\n<|im_start|>assistant\n)";

// The bare instruction both templates embed.
inline constexpr std::string_view kBoxedInstruction =
    R"(Please reason step by step, and put your final answer within \boxed{}.)";

}  // namespace plplab::templates
