// plplab: reward shaping and advantage analysis for length-penalized RL.
//
// Subcommands: score, grade, variance, figures, simulate, serve, templates.
// See README.md for the JSONL/CSV schemas and the service protocol.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plplab/harness.hpp"
#include "plplab/service.hpp"
#include "plplab/templates.hpp"
#include "plplab/verifier.hpp"
#include "plplab/version.hpp"

namespace {

using namespace plplab;

struct CommonRewardFlags {
    std::string scheme = "plp-big";
    double alpha = 4.0;
    double gamma = 0.5;
    std::string estimator = "rloo";

    void attach(CLI::App* app) {
        app->add_option("--scheme", scheme,
                        "reward scheme: plp-big | plp-small | sigmoid-standardized | none")
            ->capture_default_str();
        app->add_option("--alpha", alpha, "penalty coefficient")->capture_default_str();
        app->add_option("--gamma", gamma, "penalty exponent")->capture_default_str();
        app->add_option("--estimator", estimator, "advantage estimator: rloo | grpo")
            ->capture_default_str();
    }

    harness::RequestDefaults defaults() const {
        harness::RequestDefaults d;
        d.config.scheme = reward::parse_scheme(scheme);
        d.config.alpha = alpha;
        d.config.gamma = gamma;
        d.config.validate();
        d.estimator = advantage::parse_estimator(estimator);
        return d;
    }
};

std::vector<std::int64_t> parse_bins(const std::string& csv) {
    std::vector<std::int64_t> bins;
    std::stringstream stream(csv);
    std::string item;
    while (std::getline(stream, item, ',')) {
        bins.push_back(std::stoll(item));
    }
    return bins;
}

int cmd_grade(const std::string& in_path, const std::string& out_path) {
    std::ifstream in(in_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + in_path);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + out_path);

    std::vector<verifier::GradedCompletion> graded;
    std::vector<verifier::SegmentTokens> segments;
    bool have_segments = true;
    std::string line;
    int line_number = 0;
    int errors = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const auto doc = nlohmann::json::parse(line, nullptr, false);
        nlohmann::json reply;
        if (doc.is_discarded() || !doc.is_object() || !doc.contains("text") ||
            !doc.contains("gold")) {
            reply["error"] = {{"reason", doc.is_discarded() ? "parse" : "schema"},
                              {"message", "need text and gold"}};
            reply["line"] = line_number;
            out << reply.dump() << '\n';
            ++errors;
            continue;
        }
        reward::CompletionRecord record;
        record.text = doc["text"].get<std::string>();
        record.length = doc.value("length", std::int64_t{1});
        const verifier::GoldAnswer gold(doc["gold"].get<std::string>());
        const auto result = verifier::grade_completion(record, gold);
        graded.push_back(result);
        if (doc.contains("think_tokens")) {
            segments.push_back(
                {doc["think_tokens"].get<std::int64_t>(), record.length});
        } else {
            have_segments = false;
        }
        reply["correct"] = result.record.correct.value();
        reply["truncated"] = result.truncated;
        reply["has_think_marker"] = result.has_think_marker;
        reply["length"] = record.length;
        if (result.extracted_answer) {
            reply["answer"] = *result.extracted_answer;
        } else {
            reply["answer"] = nullptr;
        }
        out << reply.dump() << '\n';
    }
    out.flush();

    const auto stats = verifier::marker_statistics(
        graded, have_segments ? segments : std::vector<verifier::SegmentTokens>{});
    std::cout << "graded " << graded.size() << " completions (" << errors
              << " bad lines), think marker " << stats.with_marker << "/"
              << stats.total;
    if (stats.marker_token_share) {
        std::cout << ", marker token share "
                  << harness::format_double(*stats.marker_token_share);
    }
    std::cout << "\n";

    harness::RunManifest manifest;
    manifest.command = "grade";
    manifest.config_json = "{}";
    manifest.input_path = in_path;
    manifest.input_digest = harness::file_digest(in_path);
    manifest.outputs = {out_path};
    harness::write_manifest(out_path + ".manifest.json", manifest);
    // Lenient like `score`: bad lines become error objects in the output.
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kToolName) +
                 " - length-penalty reward shaping and RLOO advantage toolkit"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    // --- score ---------------------------------------------------------
    auto* score = app.add_subcommand(
        "score", "score JSONL completion groups (grade -> reward -> advantage)");
    std::string score_in;
    std::string score_out;
    bool strict = false;
    CommonRewardFlags score_flags;
    score->add_option("input", score_in, "input JSONL file")->required();
    score->add_option("--out", score_out, "output JSONL file")->required();
    score->add_flag("--strict", strict, "fail on the first bad line");
    score_flags.attach(score);

    // --- grade ---------------------------------------------------------
    auto* grade = app.add_subcommand(
        "grade", "grade completion texts against gold answers, report marker stats");
    std::string grade_in;
    std::string grade_out;
    grade->add_option("input", grade_in, "input JSONL file with text/gold lines")
        ->required();
    grade->add_option("--out", grade_out, "output JSONL verdict file")->required();

    // --- variance ------------------------------------------------------
    auto* variance_cmd = app.add_subcommand(
        "variance", "closed-form vs Monte-Carlo reward variance report");
    std::string variance_out;
    std::int64_t samples = 1'000'000;
    std::uint64_t variance_seed = 1;
    std::vector<std::string> extra_ranges;
    variance_cmd->add_option("--out", variance_out, "output CSV")->required();
    variance_cmd->add_option("--samples", samples, "Monte-Carlo draws per range")
        ->capture_default_str();
    variance_cmd->add_option("--seed", variance_seed, "base seed")->capture_default_str();
    variance_cmd->add_option("--range", extra_ranges,
                             "extra lo:hi ranges beyond 300:600 and 7000:10000");

    // --- figures -------------------------------------------------------
    auto* figures = app.add_subcommand(
        "figures", "reward/advantage-by-length and regime-separation CSV tables");
    std::string figures_out;
    harness::FigureConfig figure_config;
    figures->add_option("--out", figures_out, "output directory")->required();
    figures->add_option("--alpha", figure_config.plp_alpha, "decaying-bonus alpha")
        ->capture_default_str();
    figures->add_option("--gamma", figure_config.plp_gamma, "decaying-bonus gamma")
        ->capture_default_str();
    figures->add_option("--std-alpha", figure_config.std_alpha,
                        "standardized-scheme alpha")
        ->capture_default_str();
    figures->add_option("--trials", figure_config.separation_trials,
                        "separation trials")
        ->capture_default_str();
    figures->add_option("--seed", figure_config.seed, "seed")->capture_default_str();

    // --- simulate ------------------------------------------------------
    auto* simulate = app.add_subcommand(
        "simulate", "train the tabular length-bin policy and emit a trace CSV");
    std::string simulate_out;
    CommonRewardFlags sim_flags;
    int sim_k = 8;
    std::uint64_t sim_seed = 1;
    int sim_iterations = 300;
    double sim_lr = 0.05;
    int sim_batch = 32;
    std::int64_t sim_cap = 2000;
    std::string sim_bins;
    simulate->add_option("--out", simulate_out, "trace CSV")->required();
    sim_flags.attach(simulate);
    simulate->add_option("--k", sim_k, "samples per question per step")
        ->capture_default_str();
    simulate->add_option("--seed", sim_seed, "training seed")->capture_default_str();
    simulate->add_option("--iterations", sim_iterations, "training iterations")
        ->capture_default_str();
    simulate->add_option("--lr", sim_lr, "learning rate")->capture_default_str();
    simulate->add_option("--batch", sim_batch, "question draws per iteration")
        ->capture_default_str();
    simulate->add_option("--cap", sim_cap,
                         "max generation length; longer bins auto-fail")
        ->capture_default_str();
    simulate->add_option("--bins", sim_bins,
                         "comma-separated length bins (default 32..4096 octaves)");

    // --- serve ---------------------------------------------------------
    auto* serve = app.add_subcommand(
        "serve", "newline-delimited JSON scoring service over TCP");
    service::ScoringServer::Options serve_options;
    serve_options.port = 8431;
    serve->add_option("--host", serve_options.host, "bind address")
        ->envname("PLPLAB_HOST")
        ->capture_default_str();
    serve->add_option("--port", serve_options.port, "bind port")
        ->envname("PLPLAB_PORT")
        ->capture_default_str();
    serve->add_option("--max-line-bytes", serve_options.max_line_bytes,
                      "request line size limit")
        ->capture_default_str();

    // --- templates -----------------------------------------------------
    auto* templates_cmd = app.add_subcommand(
        "templates", "print the documented model input templates");

    CLI11_PARSE(app, argc, argv);

    try {
        if (score->parsed()) {
            harness::run_score(score_in, score_out, strict, score_flags.defaults());
            return 0;
        }
        if (grade->parsed()) {
            return cmd_grade(grade_in, grade_out);
        }
        if (variance_cmd->parsed()) {
            harness::VarianceReportConfig config;
            config.samples = samples;
            config.seed = variance_seed;
            for (const auto& spec : extra_ranges) {
                const auto colon = spec.find(':');
                if (colon == std::string::npos) {
                    throw std::runtime_error("--range expects lo:hi, got " + spec);
                }
                config.ranges.emplace_back(std::stod(spec.substr(0, colon)),
                                           std::stod(spec.substr(colon + 1)));
            }
            harness::run_variance(variance_out, config);
            return 0;
        }
        if (figures->parsed()) {
            harness::run_figures(figures_out, figure_config);
            return 0;
        }
        if (simulate->parsed()) {
            harness::SimulateRunConfig config;
            const auto defaults = sim_flags.defaults();
            config.sim_config.reward_config = defaults.config;
            config.sim_config.estimator = defaults.estimator;
            config.sim_config.k = sim_k;
            config.sim_config.seed = sim_seed;
            config.sim_config.iterations = sim_iterations;
            config.sim_config.learning_rate = sim_lr;
            config.sim_config.batch_size = sim_batch;
            config.sim_config.max_length_cap = sim_cap;
            if (!sim_bins.empty()) config.bins = parse_bins(sim_bins);
            const auto outcome = harness::run_simulate(simulate_out, config);
            for (const auto& row : outcome.final_eval) {
                std::cout << row.question_id << ": accuracy "
                          << harness::format_double(row.accuracy)
                          << ", mean length "
                          << harness::format_double(row.mean_length) << "\n";
            }
            return 0;
        }
        if (serve->parsed()) {
            service::ScoringServer server;
            std::cerr << "listening on " << serve_options.host << ":"
                      << serve_options.port << " (Ctrl-C to stop)\n";
            server.run(serve_options);
            return 0;
        }
        if (templates_cmd->parsed()) {
            std::cout << "# deepseek\n" << templates::kDeepseekTemplate << "\n"
                      << "# qwen\n" << templates::kQwenTemplate << "\n"
                      << "# instruction\n" << templates::kBoxedInstruction << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
