"""Reward shaping and advantage estimation for length-penalized RL.

Thin re-export of the compiled extension; see the C++ headers and README for
the full contracts.
"""

from ._plplab import (  # noqa: F401
    BOXED_INSTRUCTION,
    DEEPSEEK_TEMPLATE,
    QWEN_TEMPLATE,
    CompletionRecord,
    ExtractionResult,
    QuestionSpec,
    RewardConfig,
    SeparationReport,
    SimConfig,
    TabularPolicy,
    __version__,
    accuracy_indicator,
    answers_match,
    closed_form_mean,
    closed_form_variance,
    correctness_probability,
    default_bins,
    evaluate_policy,
    extract_last_boxed,
    grade,
    gradient_weights,
    grpo_advantages,
    monte_carlo_moments,
    normalize_answer,
    plp_factor,
    plp_small_factor,
    regime_separation,
    reward_spread,
    reward_value,
    rloo_advantages,
    score_request_line,
    sigmoid_standardized_reward,
    train,
    variance_monotonicity_scan,
)
