#include "plplab/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

using namespace plplab;
using harness::GroupRequest;
using harness::LineError;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "plplab_harness_test";
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

const char* kCanonicalRequest =
    R"({"group_id":"g1","scheme":"plp-big","alpha":4,"gamma":0.5,"estimator":"rloo","completions":[)"
    R"({"length":100,"correct":true},{"length":100,"correct":true},{"length":100,"correct":true},)"
    R"({"length":100,"correct":true},{"length":100,"correct":true},{"length":100,"correct":true},)"
    R"({"length":100,"correct":true},{"length":100,"correct":false}]})";

}  // namespace

TEST_CASE("parse_group_request applies defaults and validates") {
    LineError error;
    const auto request = harness::parse_group_request(
        R"({"group_id":"g","completions":[{"length":10,"correct":true},{"length":20,"correct":false}]})",
        error);
    REQUIRE(request.has_value());
    CHECK(request->config.scheme == reward::Scheme::PlpBig);
    CHECK(request->config.alpha == 4.0);
    CHECK(request->config.gamma == 0.5);
    CHECK(request->estimator == advantage::Estimator::Rloo);
    CHECK(request->completions.size() == 2);
}

TEST_CASE("parse_group_request rejects malformed input with reasons") {
    LineError error;
    CHECK_FALSE(harness::parse_group_request("{not json", error));
    CHECK(error.reason == "parse");

    CHECK_FALSE(harness::parse_group_request(R"([1,2,3])", error));
    CHECK(error.reason == "schema");

    CHECK_FALSE(harness::parse_group_request(
        R"({"group_id":"g","completions":[{"length":10,"correct":true}]})", error));
    CHECK(error.reason == "schema");  // fewer than 2 completions

    // A completion with neither a verdict nor text+gold is unresolvable.
    CHECK_FALSE(harness::parse_group_request(
        R"({"group_id":"g","completions":[{"length":10,"correct":true},{"length":20}]})",
        error));
    CHECK(error.reason == "schema");
    CHECK(error.message.find("unresolvable") != std::string::npos);

    // Text alone is enough only when gold is present.
    CHECK(harness::parse_group_request(
        R"({"group_id":"g","gold":"26","completions":[{"length":10,"correct":true},{"length":20,"text":"\\boxed{26}"}]})",
        error));

    CHECK_FALSE(harness::parse_group_request(
        R"({"group_id":"g","completions":[{"length":0,"correct":true},{"length":1,"correct":true}]})",
        error));
    CHECK(error.message.find("length") != std::string::npos);

    CHECK_FALSE(harness::parse_group_request(
        R"({"group_id":"g","alpha":-1,"completions":[{"length":1,"correct":true},{"length":1,"correct":true}]})",
        error));
    CHECK_FALSE(harness::parse_group_request(
        R"({"group_id":"g","scheme":"bogus","completions":[{"length":1,"correct":true},{"length":1,"correct":true}]})",
        error));
}

TEST_CASE("score_group on the canonical 7-correct-1-incorrect group") {
    LineError error;
    const auto request = harness::parse_group_request(kCanonicalRequest, error);
    REQUIRE(request.has_value());
    const auto response = harness::score_group(*request, error);
    REQUIRE(response.has_value());
    REQUIRE(response->rewards.size() == 8);
    for (int i = 0; i < 7; ++i) {
        CHECK(response->rewards[i] == doctest::Approx(1.4).epsilon(1e-12));
        CHECK(response->advantages[i] == doctest::Approx(0.2).epsilon(1e-12));
        CHECK(response->verdicts[i]);
    }
    CHECK(response->rewards[7] == 0.0);
    CHECK(response->advantages[7] == doctest::Approx(-1.4).epsilon(1e-12));
    CHECK_FALSE(response->verdicts[7]);
}

TEST_CASE("score_group grades text against gold when no verdict is given") {
    LineError error;
    const auto request = harness::parse_group_request(
        R"({"group_id":"g","gold":"26","scheme":"none","completions":[)"
        R"({"length":54,"text":"... \\boxed{26}"},)"
        R"({"length":265,"text":"... \\boxed{27}"},)"
        R"({"length":1000,"text":"ran out of budget before"}]})",
        error);
    REQUIRE(request.has_value());
    const auto response = harness::score_group(*request, error);
    REQUIRE(response.has_value());
    CHECK(response->verdicts == std::vector<bool>{true, false, false});
    CHECK(response->rewards[0] == 1.0);
    CHECK(response->rewards[1] == 0.0);
    CHECK(response->rewards[2] == 0.0);  // truncated grades incorrect
}

TEST_CASE("all-false groups score to zero rewards and zero advantages") {
    LineError error;
    const auto request = harness::parse_group_request(
        R"({"group_id":"g","completions":[{"length":10,"correct":false},{"length":99,"correct":false}]})",
        error);
    REQUIRE(request.has_value());
    const auto response = harness::score_group(*request, error);
    REQUIRE(response.has_value());
    for (double r : response->rewards) CHECK(r == 0.0);
    for (double a : response->advantages) CHECK(a == 0.0);
}

TEST_CASE("scheme none yields verdict-valued rewards with hand-checked advantages") {
    LineError error;
    const auto request = harness::parse_group_request(
        R"({"group_id":"g","scheme":"none","completions":[)"
        R"({"length":10,"correct":true},{"length":20,"correct":false},{"length":30,"correct":true}]})",
        error);
    REQUIRE(request.has_value());
    const auto response = harness::score_group(*request, error);
    REQUIRE(response.has_value());
    CHECK(response->rewards == std::vector<double>{1.0, 0.0, 1.0});
    CHECK(response->advantages[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(response->advantages[1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(response->advantages[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sigmoid-standardized scoring uses the group lengths") {
    LineError error;
    const auto request = harness::parse_group_request(
        R"({"group_id":"g","scheme":"sigmoid-standardized","alpha":0.4,"completions":[)"
        R"({"length":300,"correct":true},{"length":600,"correct":true}]})",
        error);
    REQUIRE(request.has_value());
    const auto response = harness::score_group(*request, error);
    REQUIRE(response.has_value());
    CHECK(response->rewards[0] == doctest::Approx(0.892423431452002).epsilon(1e-9));
    CHECK(response->rewards[1] == doctest::Approx(0.707576568547998).epsilon(1e-9));
}

TEST_CASE("responses serialize with 12 significant digits and stable field set") {
    LineError error;
    const auto request = harness::parse_group_request(kCanonicalRequest, error);
    const auto response = harness::score_group(*request, error);
    const std::string serialized = harness::serialize_response(*response);
    const auto doc = json::parse(serialized);
    CHECK(doc["group_id"] == "g1");
    CHECK(doc["scheme"] == "plp-big");
    CHECK(doc["estimator"] == "rloo");
    CHECK(doc["alpha"] == 4.0);
    CHECK(doc["gamma"] == 0.5);
    CHECK(doc["verdicts"].size() == 8);
    CHECK(doc["rewards"][0] == 1.4);
    CHECK(doc["advantages"][7] == -1.4);
    // 0.2 would print as 0.19999... if it were not rounded to 12 digits.
    CHECK(serialized.find("0.19999") == std::string::npos);
    CHECK(serialized.find('\n') == std::string::npos);
}

TEST_CASE("process_request_line returns error objects, not exceptions") {
    const std::string parse_err = harness::process_request_line("oops{", 3);
    const auto doc = json::parse(parse_err);
    CHECK(doc["error"]["reason"] == "parse");
    CHECK(doc["line"] == 3);

    const std::string schema_err = harness::process_request_line(
        R"({"group_id":"gX","completions":[]})", 9);
    const auto doc2 = json::parse(schema_err);
    CHECK(doc2["error"]["reason"] == "schema");
    CHECK(doc2["group_id"] == "gX");
}

TEST_CASE("ingest_jsonl: empty file, valid lines, collected errors, strict mode") {
    const auto dir = temp_dir();
    const auto empty = dir / "empty.jsonl";
    write_file(empty, "");
    const auto none = harness::ingest_jsonl(empty.string());
    CHECK(none.requests.empty());
    CHECK(none.errors.empty());

    const auto mixed = dir / "mixed.jsonl";
    write_file(mixed, std::string(kCanonicalRequest) + "\n" +
                          "garbage\n" +
                          R"({"group_id":"g2","completions":[{"length":5,"correct":true},{"length":6,"correct":true}]})" +
                          "\n");
    const auto result = harness::ingest_jsonl(mixed.string());
    CHECK(result.requests.size() == 2);
    CHECK(result.request_lines == std::vector<int>{1, 3});
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].line == 2);
    CHECK(result.errors[0].reason == "parse");

    CHECK_THROWS_AS(harness::ingest_jsonl(mixed.string(), /*strict=*/true),
                    std::runtime_error);
    CHECK_THROWS_AS(harness::ingest_jsonl((dir / "missing.jsonl").string()),
                    std::runtime_error);

    const auto responses = harness::score_groups(result.requests);
    CHECK(responses.size() == 2);
    CHECK(responses[0].group_id == "g1");
    CHECK(responses[1].group_id == "g2");
}

TEST_CASE("figure reports: schema, constants under alpha 0, separation dominance") {
    const auto dir = temp_dir() / "figures";
    harness::FigureConfig config;
    const auto files = harness::emit_figure_reports(dir.string(), config);
    REQUIRE(files.size() == 2);

    const std::string table = slurp(files[0]);
    CHECK(table.rfind("length,reward_plp,reward_std,adv_plp,adv_std,range_label", 0) == 0);
    CHECK(table.find("300-600") != std::string::npos);
    CHECK(table.find("7000-10000") != std::string::npos);
    // 8 grid rows per range plus the header.
    CHECK(std::count(table.begin(), table.end(), '\n') == 17);

    const std::string sep = slurp(files[1]);
    CHECK(sep.rfind("trial,gap_big,gap_small", 0) == 0);
    std::istringstream lines(sep);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double gap_big = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        const double gap_small = std::stod(line.substr(c2 + 1));
        CHECK(gap_big >= gap_small);  // row-wise dominance
    }
    CHECK(rows == config.separation_trials);

    // Disabled penalties flatten the reward columns.
    harness::FigureConfig flat;
    flat.plp_alpha = 0.0;
    flat.std_alpha = 0.0;
    const auto flat_files = harness::emit_figure_reports((dir / "flat").string(), flat);
    std::istringstream flat_lines(slurp(flat_files[0]));
    std::getline(flat_lines, line);
    while (std::getline(flat_lines, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const auto c3 = line.find(',', c2 + 1);
        CHECK(line.substr(c1 + 1, c2 - c1 - 1) == "1");
        CHECK(line.substr(c2 + 1, c3 - c2 - 1) == "1");
    }
}

TEST_CASE("variance report columns and reproducibility") {
    const auto dir = temp_dir();
    const auto path = dir / "variance.csv";
    harness::VarianceReportConfig config;
    config.samples = 50000;
    harness::write_variance_report(path.string(), config);
    const std::string content = slurp(path);
    CHECK(content.rfind("range_lo,range_hi,closed_var,mc_var,mc_samples,seed", 0) == 0);
    CHECK(std::count(content.begin(), content.end(), '\n') == 3);
    CHECK(content.find("300,600,") != std::string::npos);
    CHECK(content.find("7000,10000,") != std::string::npos);

    const auto path2 = dir / "variance2.csv";
    harness::write_variance_report(path2.string(), config);
    CHECK(slurp(path2) == content);
}

TEST_CASE("manifest round-trip and digest stability") {
    const auto dir = temp_dir();
    const auto csv = dir / "for_digest.csv";
    write_file(csv, "a,b\n1,2\n");
    const std::string digest = harness::file_digest(csv.string());
    CHECK(digest.rfind("fnv1a64:", 0) == 0);
    CHECK(digest.size() == 8 + 16);
    CHECK(harness::file_digest(csv.string()) == digest);
    write_file(csv, "a,b\n1,3\n");
    CHECK(harness::file_digest(csv.string()) != digest);

    harness::RunManifest manifest;
    manifest.command = "variance";
    manifest.config_json = harness::variance_config_to_json({});
    manifest.seeds = {1, 2};
    manifest.input_path = csv.string();
    manifest.input_digest = digest;
    manifest.outputs = {"out.csv"};
    const std::string text = harness::manifest_to_json(manifest);
    const auto doc = json::parse(text);
    CHECK(doc["tool"] == "plplab");
    CHECK(doc["prng"] == "mt19937_64/u53");

    const auto parsed = harness::manifest_from_json(text);
    CHECK(parsed.command == "variance");
    CHECK(parsed.seeds == manifest.seeds);
    CHECK(parsed.outputs == manifest.outputs);
    const auto config = harness::variance_config_from_json(parsed.config_json);
    CHECK(config.ranges.size() == 2);
    CHECK(config.samples == 1'000'000);
}

TEST_CASE("run_variance re-run from its manifest is byte-identical") {
    const auto dir = temp_dir();
    const auto out1 = dir / "var_run1.csv";
    harness::VarianceReportConfig config;
    config.samples = 20000;
    config.seed = 9;
    const auto manifest = harness::run_variance(out1.string(), config);
    CHECK(std::filesystem::exists(out1.string() + ".manifest.json"));

    const auto loaded = harness::manifest_from_json(
        slurp(fs::path(out1.string() + ".manifest.json")));
    const auto reconfig = harness::variance_config_from_json(loaded.config_json);
    const auto out2 = dir / "var_run2.csv";
    harness::run_variance(out2.string(), reconfig);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(manifest.outputs == std::vector<std::string>{out1.string()});
}
