#include "plplab/harness.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "plplab/rng.hpp"
#include "plplab/variance.hpp"
#include "plplab/verifier.hpp"
#include "plplab/version.hpp"

namespace plplab::harness {

using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

namespace {

// Rewards/advantages are serialized at 12 significant digits so diffs across
// implementations stay meaningful; rounding the value itself (instead of
// post-formatting the JSON) keeps batch and service output byte-identical.
double round12(double value) {
    return std::strtod(format_double(value).c_str(), nullptr);
}

json json_parse_lenient(const std::string& text) {
    return json::parse(text, nullptr, /*allow_exceptions=*/false);
}

}  // namespace

std::optional<GroupRequest> parse_group_request(const std::string& line,
                                                LineError& error,
                                                const RequestDefaults& defaults) {
    const json doc = json_parse_lenient(line);
    if (doc.is_discarded()) {
        error.reason = "parse";
        error.message = "invalid JSON";
        return std::nullopt;
    }
    error.reason = "schema";
    if (!doc.is_object()) {
        error.message = "request must be a JSON object";
        return std::nullopt;
    }

    GroupRequest request;
    request.config = defaults.config;
    request.estimator = defaults.estimator;

    if (!doc.contains("group_id") || !doc["group_id"].is_string()) {
        error.message = "missing string field: group_id";
        return std::nullopt;
    }
    request.group_id = doc["group_id"].get<std::string>();
    error.group_id = request.group_id;

    if (doc.contains("gold")) {
        if (!doc["gold"].is_string()) {
            error.message = "gold must be a string";
            return std::nullopt;
        }
        request.gold = doc["gold"].get<std::string>();
    }
    try {
        if (doc.contains("scheme")) {
            request.config.scheme =
                reward::parse_scheme(doc["scheme"].get<std::string>());
        }
        if (doc.contains("alpha")) request.config.alpha = doc["alpha"].get<double>();
        if (doc.contains("gamma")) request.config.gamma = doc["gamma"].get<double>();
        if (doc.contains("estimator")) {
            request.estimator =
                advantage::parse_estimator(doc["estimator"].get<std::string>());
        }
        request.config.validate();
    } catch (const std::exception& e) {
        error.message = e.what();
        return std::nullopt;
    }

    if (!doc.contains("completions") || !doc["completions"].is_array()) {
        error.message = "missing array field: completions";
        return std::nullopt;
    }
    const auto& completions = doc["completions"];
    if (completions.size() < 2) {
        error.message = "a group needs at least 2 completions";
        return std::nullopt;
    }
    for (std::size_t i = 0; i < completions.size(); ++i) {
        const auto& item = completions[i];
        const std::string at = "completions[" + std::to_string(i) + "]";
        if (!item.is_object()) {
            error.message = at + " must be an object";
            return std::nullopt;
        }
        reward::CompletionRecord record;
        // Token counts are caller-supplied, always; this tool never tokenizes.
        if (!item.contains("length") || !item["length"].is_number_integer() ||
            item["length"].get<std::int64_t>() < 1) {
            error.message = at + ".length must be a positive integer";
            return std::nullopt;
        }
        record.length = item["length"].get<std::int64_t>();
        if (item.contains("text")) {
            if (!item["text"].is_string()) {
                error.message = at + ".text must be a string";
                return std::nullopt;
            }
            record.text = item["text"].get<std::string>();
        }
        if (item.contains("correct")) {
            if (!item["correct"].is_boolean()) {
                error.message = at + ".correct must be a boolean";
                return std::nullopt;
            }
            record.correct = item["correct"].get<bool>();
        }
        if (!record.correct.has_value() &&
            !(record.text.has_value() && request.gold.has_value())) {
            error.message = at + " is unresolvable: needs correct, or text plus gold";
            return std::nullopt;
        }
        request.completions.push_back(std::move(record));
    }
    error.reason.clear();
    return request;
}

std::optional<GroupResponse> score_group(const GroupRequest& request,
                                         LineError& error) {
    error.group_id = request.group_id;
    try {
        std::vector<std::int64_t> lengths;
        lengths.reserve(request.completions.size());
        for (const auto& record : request.completions) lengths.push_back(record.length);

        GroupResponse response;
        response.group_id = request.group_id;
        response.config = request.config;
        response.estimator = request.estimator;
        for (const auto& record : request.completions) {
            bool verdict = false;
            if (record.correct.has_value()) {
                verdict = *record.correct;
            } else if (record.text.has_value() && request.gold.has_value()) {
                const verifier::GoldAnswer gold(*request.gold);
                verdict = verifier::grade_completion(record, gold)
                              .record.correct.value();
            } else {
                error.reason = "score";
                error.message = "completion verdict unresolvable";
                return std::nullopt;
            }
            response.verdicts.push_back(verdict);
            reward::CompletionRecord resolved = record;
            resolved.correct = verdict;
            response.rewards.push_back(
                reward::reward_value(resolved, request.config, lengths));
        }
        response.advantages =
            advantage::gradient_weights(response.rewards, request.estimator);
        return response;
    } catch (const std::exception& e) {
        error.reason = "score";
        error.message = e.what();
        return std::nullopt;
    }
}

std::vector<GroupResponse> score_groups(const std::vector<GroupRequest>& requests) {
    std::vector<GroupResponse> responses;
    responses.reserve(requests.size());
    for (const auto& request : requests) {
        LineError error;
        auto response = score_group(request, error);
        if (!response) {
            throw std::runtime_error("group '" + request.group_id +
                                     "': " + error.message);
        }
        responses.push_back(std::move(*response));
    }
    return responses;
}

std::string serialize_response(const GroupResponse& response) {
    json doc;
    doc["group_id"] = response.group_id;
    doc["verdicts"] = response.verdicts;
    json rewards = json::array();
    for (double r : response.rewards) rewards.push_back(round12(r));
    doc["rewards"] = std::move(rewards);
    json advantages = json::array();
    for (double a : response.advantages) advantages.push_back(round12(a));
    doc["advantages"] = std::move(advantages);
    doc["scheme"] = reward::scheme_name(response.config.scheme);
    doc["alpha"] = round12(response.config.alpha);
    doc["gamma"] = round12(response.config.gamma);
    doc["estimator"] = advantage::estimator_name(response.estimator);
    return doc.dump();
}

std::string serialize_error(const LineError& error) {
    json doc;
    doc["error"] = {{"reason", error.reason}, {"message", error.message}};
    if (!error.group_id.empty()) doc["group_id"] = error.group_id;
    if (error.line > 0) doc["line"] = error.line;
    return doc.dump();
}

std::string process_request_line(const std::string& line, int line_number,
                                 const RequestDefaults& defaults) {
    LineError error;
    error.line = line_number;
    auto request = parse_group_request(line, error, defaults);
    if (!request) return serialize_error(error);
    auto response = score_group(*request, error);
    if (!response) return serialize_error(error);
    return serialize_response(*response);
}

IngestResult ingest_jsonl(const std::string& path, bool strict,
                          const RequestDefaults& defaults) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open input file: " + path);
    }
    IngestResult result;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        LineError error;
        error.line = line_number;
        auto request = parse_group_request(line, error, defaults);
        if (request) {
            result.requests.push_back(std::move(*request));
            result.request_lines.push_back(line_number);
        } else {
            if (strict) {
                throw std::runtime_error("line " + std::to_string(line_number) +
                                         ": " + error.message);
            }
            result.errors.push_back(std::move(error));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    return out;
}

}  // namespace

std::vector<std::string> emit_figure_reports(const std::string& out_dir,
                                             const FigureConfig& config) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> files;

    // Table 1: reward and RLOO advantage at 8 evenly spaced lengths per
    // range, all answers correct, decaying bonus vs group-standardized.
    const std::vector<std::pair<std::int64_t, std::int64_t>> ranges = {
        {300, 600}, {7000, 10000}};
    const std::string table_path =
        (std::filesystem::path(out_dir) / "reward_advantage_by_length.csv").string();
    {
        auto out = open_out(table_path);
        out << "length,reward_plp,reward_std,adv_plp,adv_std,range_label\n";
        for (const auto& [lo, hi] : ranges) {
            constexpr int kPoints = 8;
            std::vector<std::int64_t> lengths;
            for (int i = 0; i < kPoints; ++i) {
                lengths.push_back(lo + (hi - lo) * i / (kPoints - 1));
            }
            std::vector<double> reward_plp;
            std::vector<double> reward_std;
            for (std::int64_t len : lengths) {
                reward_plp.push_back(reward::plp_factor(
                    static_cast<double>(len), config.plp_alpha, config.plp_gamma));
                reward_std.push_back(reward::sigmoid_standardized_reward(
                    len, lengths, config.std_alpha));
            }
            const auto adv_plp = advantage::rloo_advantages(reward_plp);
            const auto adv_std = advantage::rloo_advantages(reward_std);
            const std::string label =
                std::to_string(lo) + "-" + std::to_string(hi);
            for (std::size_t i = 0; i < lengths.size(); ++i) {
                out << lengths[i] << ',' << format_double(reward_plp[i]) << ','
                    << format_double(reward_std[i]) << ','
                    << format_double(adv_plp[i]) << ','
                    << format_double(adv_std[i]) << ',' << label << '\n';
            }
        }
    }
    files.push_back(table_path);

    // Table 2: correct-vs-incorrect advantage gap for 7-correct-1-incorrect
    // groups, bonus-above-1 rewards against the same rewards shifted into
    // [0.6, 1].
    const std::string sep_path =
        (std::filesystem::path(out_dir) / "regime_separation.csv").string();
    {
        auto out = open_out(sep_path);
        out << "trial,gap_big,gap_small\n";
        rng::Engine gen(config.seed);
        for (int trial = 1; trial <= config.separation_trials; ++trial) {
            std::vector<double> big(7);
            std::vector<double> small(7);
            for (int i = 0; i < 7; ++i) {
                big[static_cast<std::size_t>(i)] = rng::uniform(gen, 1.0, 1.4);
                small[static_cast<std::size_t>(i)] =
                    big[static_cast<std::size_t>(i)] - 0.4;
            }
            const double gap_big = advantage::regime_separation(big, 1).gap;
            const double gap_small = advantage::regime_separation(small, 1).gap;
            out << trial << ',' << format_double(gap_big) << ','
                << format_double(gap_small) << '\n';
        }
    }
    files.push_back(sep_path);
    return files;
}

void write_variance_report(const std::string& out_path,
                           const VarianceReportConfig& config) {
    auto out = open_out(out_path);
    out << "range_lo,range_hi,closed_var,mc_var,mc_samples,seed\n";
    std::uint64_t seed = config.seed;
    for (const auto& [lo, hi] : config.ranges) {
        const variance::UniformLengthRange range{lo, hi};
        const double closed = variance::closed_form_variance(range);
        const auto mc = variance::monte_carlo_moments(range, config.samples, seed);
        out << format_double(lo) << ',' << format_double(hi) << ','
            << format_double(closed) << ',' << format_double(mc.variance) << ','
            << config.samples << ',' << seed << '\n';
        ++seed;  // one independent oracle stream per row
    }
}

// ---------------------------------------------------------------------------
// Manifests

std::string manifest_to_json(const RunManifest& manifest) {
    json doc;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["command"] = manifest.command;
    const json config = json_parse_lenient(manifest.config_json);
    doc["config"] = config.is_discarded() ? json(manifest.config_json) : config;
    doc["seeds"] = manifest.seeds;
    if (manifest.input_path) {
        doc["input"] = {{"path", *manifest.input_path},
                        {"digest", manifest.input_digest.value_or("")}};
    } else {
        doc["input"] = nullptr;
    }
    doc["outputs"] = manifest.outputs;
    doc["prng"] = rng::kAlgorithmId;
    return doc.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& json_text) {
    const json doc = json::parse(json_text);
    RunManifest manifest;
    manifest.command = doc.at("command").get<std::string>();
    manifest.config_json = doc.at("config").dump();
    manifest.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    if (doc.contains("input") && doc["input"].is_object()) {
        manifest.input_path = doc["input"].at("path").get<std::string>();
        manifest.input_digest = doc["input"].at("digest").get<std::string>();
    }
    manifest.outputs = doc.at("outputs").get<std::vector<std::string>>();
    return manifest;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
    auto out = open_out(path);
    out << manifest_to_json(manifest);
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for digest: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buf[8192];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ull;
        }
    }
    char hex[32];
    std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(hash));
    return hex;
}

// ---------------------------------------------------------------------------
// Command runners

std::string variance_config_to_json(const VarianceReportConfig& config) {
    json doc;
    json ranges = json::array();
    for (const auto& [lo, hi] : config.ranges) ranges.push_back({lo, hi});
    doc["ranges"] = std::move(ranges);
    doc["samples"] = config.samples;
    doc["seed"] = config.seed;
    return doc.dump();
}

VarianceReportConfig variance_config_from_json(const std::string& json_text) {
    const json doc = json::parse(json_text);
    VarianceReportConfig config;
    config.ranges.clear();
    for (const auto& pair : doc.at("ranges")) {
        config.ranges.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    config.samples = doc.at("samples").get<std::int64_t>();
    config.seed = doc.at("seed").get<std::uint64_t>();
    return config;
}

std::string figure_config_to_json(const FigureConfig& config) {
    json doc;
    doc["plp_alpha"] = config.plp_alpha;
    doc["plp_gamma"] = config.plp_gamma;
    doc["std_alpha"] = config.std_alpha;
    doc["separation_trials"] = config.separation_trials;
    doc["seed"] = config.seed;
    return doc.dump();
}

FigureConfig figure_config_from_json(const std::string& json_text) {
    const json doc = json::parse(json_text);
    FigureConfig config;
    config.plp_alpha = doc.at("plp_alpha").get<double>();
    config.plp_gamma = doc.at("plp_gamma").get<double>();
    config.std_alpha = doc.at("std_alpha").get<double>();
    config.separation_trials = doc.at("separation_trials").get<int>();
    config.seed = doc.at("seed").get<std::uint64_t>();
    return config;
}

RunManifest run_variance(const std::string& out_path,
                         const VarianceReportConfig& config) {
    write_variance_report(out_path, config);
    RunManifest manifest;
    manifest.command = "variance";
    manifest.config_json = variance_config_to_json(config);
    manifest.seeds = {config.seed};
    manifest.outputs = {out_path};
    write_manifest(out_path + ".manifest.json", manifest);
    return manifest;
}

RunManifest run_figures(const std::string& out_dir, const FigureConfig& config) {
    RunManifest manifest;
    manifest.command = "figures";
    manifest.config_json = figure_config_to_json(config);
    manifest.seeds = {config.seed};
    manifest.outputs = emit_figure_reports(out_dir, config);
    write_manifest((std::filesystem::path(out_dir) / "manifest.json").string(),
                   manifest);
    return manifest;
}

std::string simulate_config_to_json(const SimulateRunConfig& config) {
    json doc;
    doc["scheme"] = reward::scheme_name(config.sim_config.reward_config.scheme);
    doc["alpha"] = config.sim_config.reward_config.alpha;
    doc["gamma"] = config.sim_config.reward_config.gamma;
    doc["estimator"] = advantage::estimator_name(config.sim_config.estimator);
    doc["k"] = config.sim_config.k;
    doc["lr"] = config.sim_config.learning_rate;
    doc["iterations"] = config.sim_config.iterations;
    doc["batch"] = config.sim_config.batch_size;
    doc["seed"] = config.sim_config.seed;
    doc["cap"] = config.sim_config.max_length_cap;
    doc["bins"] = config.bins.empty() ? sim::default_bins() : config.bins;
    json questions = json::array();
    const auto qs =
        config.questions.empty() ? sim::default_questions() : config.questions;
    for (const auto& q : qs) {
        questions.push_back({{"id", q.question_id},
                             {"threshold", q.difficulty_threshold},
                             {"max_accuracy", q.max_accuracy},
                             {"steepness", q.steepness}});
    }
    doc["questions"] = std::move(questions);
    return doc.dump();
}

SimulateRunConfig simulate_config_from_json(const std::string& json_text) {
    const json doc = json::parse(json_text);
    SimulateRunConfig config;
    config.sim_config.reward_config.scheme =
        reward::parse_scheme(doc.at("scheme").get<std::string>());
    config.sim_config.reward_config.alpha = doc.at("alpha").get<double>();
    config.sim_config.reward_config.gamma = doc.at("gamma").get<double>();
    config.sim_config.estimator =
        advantage::parse_estimator(doc.at("estimator").get<std::string>());
    config.sim_config.k = doc.at("k").get<int>();
    config.sim_config.learning_rate = doc.at("lr").get<double>();
    config.sim_config.iterations = doc.at("iterations").get<int>();
    config.sim_config.batch_size = doc.at("batch").get<int>();
    config.sim_config.seed = doc.at("seed").get<std::uint64_t>();
    config.sim_config.max_length_cap = doc.at("cap").get<std::int64_t>();
    config.bins = doc.at("bins").get<std::vector<std::int64_t>>();
    for (const auto& q : doc.at("questions")) {
        config.questions.push_back({q.at("id").get<std::string>(),
                                    q.at("threshold").get<double>(),
                                    q.at("max_accuracy").get<double>(),
                                    q.at("steepness").get<double>()});
    }
    return config;
}

SimulateOutcome run_simulate(const std::string& out_path,
                             const SimulateRunConfig& config) {
    const auto bins = config.bins.empty() ? sim::default_bins() : config.bins;
    const auto questions =
        config.questions.empty() ? sim::default_questions() : config.questions;
    const auto result = sim::train(questions, bins, config.sim_config);

    {
        auto out = open_out(out_path);
        out << "iteration,question_id,mean_length,accuracy,mean_reward,"
               "scheme,alpha,gamma,estimator,seed\n";
        const auto& rc = config.sim_config.reward_config;
        for (const auto& row : result.trace) {
            out << row.iteration << ',' << row.question_id << ','
                << format_double(row.mean_length) << ','
                << format_double(row.accuracy) << ','
                << format_double(row.mean_reward) << ','
                << reward::scheme_name(rc.scheme) << ','
                << format_double(rc.alpha) << ',' << format_double(rc.gamma)
                << ',' << advantage::estimator_name(config.sim_config.estimator)
                << ',' << config.sim_config.seed << '\n';
        }
    }

    SimulateOutcome outcome;
    outcome.final_eval =
        sim::evaluate_policy(result.policy, questions, 2000,
                             config.sim_config.seed + 1000003,
                             config.sim_config.max_length_cap);
    outcome.manifest.command = "simulate";
    outcome.manifest.config_json = simulate_config_to_json(config);
    outcome.manifest.seeds = {config.sim_config.seed};
    outcome.manifest.outputs = {out_path};
    write_manifest(out_path + ".manifest.json", outcome.manifest);
    return outcome;
}

RunManifest run_score(const std::string& in_path, const std::string& out_path,
                      bool strict, const RequestDefaults& defaults) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + in_path);
    auto out = open_out(out_path);
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        if (strict) {
            LineError error;
            error.line = line_number;
            auto request = parse_group_request(line, error, defaults);
            if (!request) {
                throw std::runtime_error("line " + std::to_string(line_number) +
                                         ": " + error.message);
            }
            auto response = score_group(*request, error);
            if (!response) {
                throw std::runtime_error("line " + std::to_string(line_number) +
                                         ": " + error.message);
            }
            out << serialize_response(*response) << '\n';
        } else {
            out << process_request_line(line, line_number, defaults) << '\n';
        }
    }
    out.flush();

    RunManifest manifest;
    manifest.command = "score";
    json config;
    config["strict"] = strict;
    config["scheme"] = reward::scheme_name(defaults.config.scheme);
    config["alpha"] = defaults.config.alpha;
    config["gamma"] = defaults.config.gamma;
    config["estimator"] = advantage::estimator_name(defaults.estimator);
    manifest.config_json = config.dump();
    manifest.input_path = in_path;
    manifest.input_digest = file_digest(in_path);
    manifest.outputs = {out_path};
    write_manifest(out_path + ".manifest.json", manifest);
    return manifest;
}

}  // namespace plplab::harness
