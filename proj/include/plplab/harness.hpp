#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plplab/advantage.hpp"
#include "plplab/reward.hpp"
#include "plplab/simulator.hpp"

namespace plplab::harness {

// One JSONL scoring request: a group of k completions for one prompt, the
// reward configuration (defaults applied when fields are omitted), and
// optionally the gold answer for text grading. Field names are the wire
// contract; see README for the schema.
struct GroupRequest {
    std::string group_id;
    std::optional<std::string> gold;
    reward::RewardConfig config;
    advantage::Estimator estimator = advantage::Estimator::Rloo;
    std::vector<reward::CompletionRecord> completions;
};

struct GroupResponse {
    std::string group_id;
    std::vector<bool> verdicts;
    std::vector<double> rewards;
    std::vector<double> advantages;
    reward::RewardConfig config;  // echo
    advantage::Estimator estimator = advantage::Estimator::Rloo;
};

struct LineError {
    int line = 0;                // 1-based line number, 0 when not line-bound
    std::string group_id;        // empty when unknown (e.g. parse failures)
    std::string reason;          // "parse" | "schema" | "score" | "oversized"
    std::string message;
};

// Values applied to request fields that are omitted on the wire.
struct RequestDefaults {
    reward::RewardConfig config;
    advantage::Estimator estimator = advantage::Estimator::Rloo;
};

// Parses one JSONL line into a request. Throws nothing; errors come back in
// `error`.
std::optional<GroupRequest> parse_group_request(const std::string& line,
                                                LineError& error,
                                                const RequestDefaults& defaults = {});

struct IngestResult {
    std::vector<GroupRequest> requests;
    std::vector<int> request_lines;  // source line per request
    std::vector<LineError> errors;
};

// Reads a JSONL file of requests. Malformed lines are collected with their
// line numbers and do not abort the run; `strict` turns the first error into
// a std::runtime_error. Blank lines are skipped.
IngestResult ingest_jsonl(const std::string& path, bool strict = false,
                          const RequestDefaults& defaults = {});

// grade -> reward -> advantage for one group. Unresolvable verdicts (no
// `correct` and no text+gold) surface in `error` and yield no response.
std::optional<GroupResponse> score_group(const GroupRequest& request,
                                         LineError& error);

std::vector<GroupResponse> score_groups(const std::vector<GroupRequest>& requests);

// Canonical response serialization shared by batch and service paths, so the
// two are byte-identical. Rewards and advantages carry 12 significant digits.
std::string serialize_response(const GroupResponse& response);
std::string serialize_error(const LineError& error);

// Processes one request line end to end (parse -> score -> serialize); the
// single entry point behind both `score` and `serve`. Never throws; errors
// serialize as error objects.
std::string process_request_line(const std::string& line, int line_number,
                                 const RequestDefaults& defaults = {});

// ---------------------------------------------------------------------------
// Reports

// Reward/advantage-vs-length table rows over a length range (8 grid points,
// all answers correct), for the decaying-bonus scheme vs the
// group-standardized one. CSV columns:
//   length,reward_plp,reward_std,adv_plp,adv_std,range_label
struct FigureConfig {
    double plp_alpha = 1.0;
    double plp_gamma = 0.5;
    double std_alpha = 0.4;
    int separation_trials = 100;
    std::uint64_t seed = 1;
};

// Writes reward_advantage_by_length.csv and regime_separation.csv under
// out_dir. The separation table draws `separation_trials` random
// 7-correct-1-incorrect groups with correct rewards in [1, 1.4] and compares
// the advantage gap against the same rewards shifted into [0.6, 1]:
//   trial,gap_big,gap_small
// Returns the list of files written. Throws std::runtime_error on I/O errors.
std::vector<std::string> emit_figure_reports(const std::string& out_dir,
                                             const FigureConfig& config);

// Variance report rows: closed form vs Monte-Carlo for each range.
// CSV columns: range_lo,range_hi,closed_var,mc_var,mc_samples,seed
struct VarianceReportConfig {
    std::vector<std::pair<double, double>> ranges = {{300, 600}, {7000, 10000}};
    std::int64_t samples = 1'000'000;
    std::uint64_t seed = 1;
};

void write_variance_report(const std::string& out_path,
                           const VarianceReportConfig& config);

// ---------------------------------------------------------------------------
// Run manifests

// Every batch run emits exactly one manifest next to its output: the tool
// version, the resolved configuration, input digest, seeds and output files,
// enough to reproduce the run byte-for-byte.
struct RunManifest {
    std::string command;
    std::string config_json;              // resolved config snapshot (JSON object)
    std::vector<std::uint64_t> seeds;
    std::optional<std::string> input_path;
    std::optional<std::string> input_digest;  // "fnv1a64:<16 hex>"
    std::vector<std::string> outputs;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& json_text);
void write_manifest(const std::string& path, const RunManifest& manifest);

// FNV-1a 64-bit digest of a file's raw bytes, formatted "fnv1a64:<hex>".
std::string file_digest(const std::string& path);

// %.12g formatting used for every float that reaches an output file.
std::string format_double(double value);

// ---------------------------------------------------------------------------
// Command runners shared by the CLI and the test suites. Each writes its
// outputs plus one manifest and returns the manifest. Config snapshots round-
// trip through JSON so a manifest is enough to reproduce a run exactly.

std::string variance_config_to_json(const VarianceReportConfig& config);
VarianceReportConfig variance_config_from_json(const std::string& json_text);

std::string figure_config_to_json(const FigureConfig& config);
FigureConfig figure_config_from_json(const std::string& json_text);

RunManifest run_variance(const std::string& out_path,
                         const VarianceReportConfig& config);
RunManifest run_figures(const std::string& out_dir, const FigureConfig& config);
RunManifest run_score(const std::string& in_path, const std::string& out_path,
                      bool strict, const RequestDefaults& defaults = {});

// Training run over the built-in demo questions (or any question set):
// trace CSV columns
//   iteration,question_id,mean_length,accuracy,mean_reward,scheme,alpha,gamma,estimator,seed
struct SimulateRunConfig {
    sim::SimConfig sim_config;
    std::vector<std::int64_t> bins;          // empty -> sim::default_bins()
    std::vector<sim::QuestionSpec> questions;  // empty -> sim::default_questions()
};

std::string simulate_config_to_json(const SimulateRunConfig& config);
SimulateRunConfig simulate_config_from_json(const std::string& json_text);

struct SimulateOutcome {
    RunManifest manifest;
    std::vector<sim::EvalRow> final_eval;  // 2000 draws per question
};

SimulateOutcome run_simulate(const std::string& out_path,
                             const SimulateRunConfig& config);

}  // namespace plplab::harness
