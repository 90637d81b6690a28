// Python bindings for the core operations: rewards, advantages, variance
// analysis, answer grading, the tabular policy simulator and the line-level
// scoring entry point used by the batch and service paths.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plplab/advantage.hpp"
#include "plplab/harness.hpp"
#include "plplab/reward.hpp"
#include "plplab/simulator.hpp"
#include "plplab/templates.hpp"
#include "plplab/variance.hpp"
#include "plplab/verifier.hpp"
#include "plplab/version.hpp"

namespace py = pybind11;
using namespace plplab;

namespace {

variance::UniformLengthRange make_range(double lo, double hi) {
    variance::UniformLengthRange range{lo, hi};
    range.validate();
    return range;
}

reward::CompletionRecord make_record(std::int64_t length,
                                     std::optional<std::string> text,
                                     std::optional<bool> correct) {
    reward::CompletionRecord record;
    record.length = length;
    record.text = std::move(text);
    record.correct = correct;
    record.validate();
    return record;
}

}  // namespace

PYBIND11_MODULE(_plplab, m) {
    m.doc() = "reward shaping and advantage estimation for length-penalized RL";
    m.attr("__version__") = kToolVersion;
    m.attr("DEEPSEEK_TEMPLATE") = std::string(templates::kDeepseekTemplate);
    m.attr("QWEN_TEMPLATE") = std::string(templates::kQwenTemplate);
    m.attr("BOXED_INSTRUCTION") = std::string(templates::kBoxedInstruction);

    // ---- rewards -------------------------------------------------------
    py::class_<reward::CompletionRecord>(m, "CompletionRecord")
        .def(py::init(&make_record), py::arg("length"),
             py::arg("text") = std::nullopt, py::arg("correct") = std::nullopt)
        .def_readwrite("length", &reward::CompletionRecord::length)
        .def_readwrite("text", &reward::CompletionRecord::text)
        .def_readwrite("correct", &reward::CompletionRecord::correct);

    py::class_<reward::RewardConfig>(m, "RewardConfig")
        .def(py::init([](const std::string& scheme, double alpha, double gamma) {
                 reward::RewardConfig config;
                 config.scheme = reward::parse_scheme(scheme);
                 config.alpha = alpha;
                 config.gamma = gamma;
                 config.validate();
                 return config;
             }),
             py::arg("scheme") = "plp-big", py::arg("alpha") = 4.0,
             py::arg("gamma") = 0.5)
        .def_property(
            "scheme",
            [](const reward::RewardConfig& c) {
                return std::string(reward::scheme_name(c.scheme));
            },
            [](reward::RewardConfig& c, const std::string& name) {
                c.scheme = reward::parse_scheme(name);
            })
        .def_readwrite("alpha", &reward::RewardConfig::alpha)
        .def_readwrite("gamma", &reward::RewardConfig::gamma);

    m.def("accuracy_indicator", &reward::accuracy_indicator, py::arg("correct"));
    m.def("plp_factor", &reward::plp_factor, py::arg("length"), py::arg("alpha"),
          py::arg("gamma"));
    m.def("plp_small_factor", &reward::plp_small_factor, py::arg("length"),
          py::arg("alpha"), py::arg("gamma"));
    m.def(
        "sigmoid_standardized_reward",
        [](std::int64_t length, const std::vector<std::int64_t>& group, double alpha) {
            return reward::sigmoid_standardized_reward(length, group, alpha);
        },
        py::arg("length"), py::arg("group_lengths"), py::arg("alpha"));
    m.def(
        "reward_value",
        [](const reward::CompletionRecord& record, const reward::RewardConfig& config,
           const std::vector<std::int64_t>& group_lengths) {
            return reward::reward_value(record, config, group_lengths);
        },
        py::arg("record"), py::arg("config"),
        py::arg("group_lengths") = std::vector<std::int64_t>{});

    // ---- advantages ----------------------------------------------------
    m.def(
        "rloo_advantages",
        [](const std::vector<double>& rewards) {
            return advantage::rloo_advantages(rewards);
        },
        py::arg("rewards"));
    m.def(
        "grpo_advantages",
        [](const std::vector<double>& rewards) {
            return advantage::grpo_advantages(rewards);
        },
        py::arg("rewards"));
    m.def(
        "gradient_weights",
        [](const std::vector<double>& rewards, const std::string& estimator) {
            return advantage::gradient_weights(
                rewards, advantage::parse_estimator(estimator));
        },
        py::arg("rewards"), py::arg("estimator") = "rloo");

    py::class_<advantage::SeparationReport>(m, "SeparationReport")
        .def_readonly("advantages", &advantage::SeparationReport::advantages)
        .def_readonly("min_correct_advantage",
                      &advantage::SeparationReport::min_correct_advantage)
        .def_readonly("max_incorrect_advantage",
                      &advantage::SeparationReport::max_incorrect_advantage)
        .def_readonly("gap", &advantage::SeparationReport::gap);
    m.def(
        "regime_separation",
        [](const std::vector<double>& correct_rewards, int incorrect_count) {
            return advantage::regime_separation(correct_rewards, incorrect_count);
        },
        py::arg("correct_rewards"), py::arg("incorrect_count") = 1);

    // ---- variance analysis ----------------------------------------------
    m.def(
        "closed_form_variance",
        [](double lo, double hi) {
            return variance::closed_form_variance(make_range(lo, hi));
        },
        py::arg("lo"), py::arg("hi"));
    m.def(
        "closed_form_mean",
        [](double lo, double hi) {
            return variance::closed_form_mean(make_range(lo, hi));
        },
        py::arg("lo"), py::arg("hi"));
    m.def(
        "monte_carlo_moments",
        [](double lo, double hi, std::int64_t samples, std::uint64_t seed) {
            const auto moments =
                variance::monte_carlo_moments(make_range(lo, hi), samples, seed);
            return py::make_tuple(moments.mean, moments.variance);
        },
        py::arg("lo"), py::arg("hi"), py::arg("samples") = 1000000,
        py::arg("seed") = 1);
    m.def(
        "reward_spread",
        [](double lo, double hi, double alpha, double gamma) {
            return variance::reward_spread(make_range(lo, hi), alpha, gamma);
        },
        py::arg("lo"), py::arg("hi"), py::arg("alpha") = 1.0,
        py::arg("gamma") = 0.5);
    m.def(
        "variance_monotonicity_scan",
        [](const std::vector<std::pair<double, double>>& pairs) {
            std::vector<variance::UniformLengthRange> ranges;
            ranges.reserve(pairs.size());
            for (const auto& [lo, hi] : pairs) ranges.push_back(make_range(lo, hi));
            const auto report = variance::variance_monotonicity_scan(ranges);
            py::dict out;
            out["pairs_checked"] = report.pairs_checked;
            out["non_increasing"] = report.non_increasing;
            out["violating_indices"] = report.violating_indices;
            return out;
        },
        py::arg("ranges"));

    // ---- answer verification --------------------------------------------
    py::class_<verifier::ExtractionResult>(m, "ExtractionResult")
        .def_readonly("answer", &verifier::ExtractionResult::answer)
        .def_readonly("has_think_marker",
                      &verifier::ExtractionResult::has_think_marker)
        .def_readonly("truncated", &verifier::ExtractionResult::truncated);
    m.def(
        "extract_last_boxed",
        [](const std::string& text) { return verifier::extract_last_boxed(text); },
        py::arg("text"));
    m.def(
        "normalize_answer",
        [](const std::string& raw) { return verifier::normalize_answer(raw); },
        py::arg("raw"));
    m.def(
        "answers_match",
        [](const std::string& predicted, const std::string& gold) {
            return verifier::answers_match(predicted, verifier::GoldAnswer(gold));
        },
        py::arg("predicted"), py::arg("gold"));
    m.def(
        "grade",
        [](const std::string& text, const std::string& gold, std::int64_t length) {
            reward::CompletionRecord record;
            record.length = length;
            record.text = text;
            const auto graded =
                verifier::grade_completion(record, verifier::GoldAnswer(gold));
            py::dict out;
            out["correct"] = graded.record.correct.value();
            out["truncated"] = graded.truncated;
            out["has_think_marker"] = graded.has_think_marker;
            out["answer"] = graded.extracted_answer
                                ? py::cast(*graded.extracted_answer)
                                : py::none();
            return out;
        },
        py::arg("text"), py::arg("gold"), py::arg("length") = 1);

    // ---- simulator --------------------------------------------------------
    py::class_<sim::QuestionSpec>(m, "QuestionSpec")
        .def(py::init([](std::string id, double threshold, double max_accuracy,
                         double steepness) {
                 sim::QuestionSpec spec{std::move(id), threshold, max_accuracy,
                                        steepness};
                 spec.validate();
                 return spec;
             }),
             py::arg("question_id"), py::arg("difficulty_threshold"),
             py::arg("max_accuracy") = 1.0, py::arg("steepness") = 0.1)
        .def_readonly("question_id", &sim::QuestionSpec::question_id)
        .def_readonly("difficulty_threshold", &sim::QuestionSpec::difficulty_threshold)
        .def_readonly("max_accuracy", &sim::QuestionSpec::max_accuracy)
        .def_readonly("steepness", &sim::QuestionSpec::steepness);

    py::class_<sim::SimConfig>(m, "SimConfig")
        .def(py::init([](int k, double lr, int iterations, int batch,
                         const std::string& scheme, double alpha, double gamma,
                         const std::string& estimator, std::uint64_t seed,
                         std::int64_t cap) {
                 sim::SimConfig config;
                 config.k = k;
                 config.learning_rate = lr;
                 config.iterations = iterations;
                 config.batch_size = batch;
                 config.reward_config.scheme = reward::parse_scheme(scheme);
                 config.reward_config.alpha = alpha;
                 config.reward_config.gamma = gamma;
                 config.estimator = advantage::parse_estimator(estimator);
                 config.seed = seed;
                 config.max_length_cap = cap;
                 config.validate();
                 return config;
             }),
             py::arg("k") = 8, py::arg("learning_rate") = 0.05,
             py::arg("iterations") = 200, py::arg("batch_size") = 32,
             py::arg("scheme") = "plp-big", py::arg("alpha") = 4.0,
             py::arg("gamma") = 0.5, py::arg("estimator") = "rloo",
             py::arg("seed") = 1, py::arg("max_length_cap") = 2000);

    py::class_<sim::TabularPolicy>(m, "TabularPolicy")
        .def_readonly("bins", &sim::TabularPolicy::bins)
        .def_readonly("question_ids", &sim::TabularPolicy::question_ids)
        .def("probabilities", &sim::TabularPolicy::probabilities, py::arg("row"))
        .def("row_index", &sim::TabularPolicy::row_index, py::arg("question_id"));

    m.def("default_bins", &sim::default_bins);
    m.def("correctness_probability", &sim::correctness_probability,
          py::arg("length"), py::arg("spec"));
    m.def(
        "train",
        [](const std::vector<sim::QuestionSpec>& questions,
           std::vector<std::int64_t> bins, const sim::SimConfig& config) {
            auto result = sim::train(questions, std::move(bins), config);
            py::list trace;
            for (const auto& row : result.trace) {
                trace.append(py::make_tuple(row.iteration, row.question_id,
                                            row.mean_length, row.accuracy,
                                            row.mean_reward));
            }
            py::dict out;
            out["policy"] = py::cast(std::move(result.policy));
            out["trace"] = std::move(trace);
            return out;
        },
        py::arg("questions"), py::arg("bins"), py::arg("config"));
    m.def(
        "evaluate_policy",
        [](const sim::TabularPolicy& policy,
           const std::vector<sim::QuestionSpec>& questions, int samples,
           std::uint64_t seed, std::int64_t cap) {
            py::list rows;
            for (const auto& row :
                 sim::evaluate_policy(policy, questions, samples, seed, cap)) {
                rows.append(py::make_tuple(row.question_id, row.accuracy,
                                           row.mean_length));
            }
            return rows;
        },
        py::arg("policy"), py::arg("questions"), py::arg("samples") = 2000,
        py::arg("seed") = 1, py::arg("max_length_cap") = 2000);

    // ---- harness ----------------------------------------------------------
    m.def(
        "score_request_line",
        [](const std::string& line, int line_number) {
            return harness::process_request_line(line, line_number);
        },
        py::arg("line"), py::arg("line_number") = 1,
        "Score one JSONL group request; returns the response (or error) line "
        "exactly as the batch and service paths emit it.");
}
