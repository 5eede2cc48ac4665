#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "icsthreat/attack_graph.hpp"
#include "icsthreat/error.hpp"
#include "icsthreat/model.hpp"
#include "icsthreat/nvd.hpp"
#include "icsthreat/report.hpp"
#include "icsthreat/scoring.hpp"
#include "icsthreat/stride.hpp"

#ifndef ICSTHREAT_SOURCE_DATA_DIR
#define ICSTHREAT_SOURCE_DATA_DIR "data"
#endif

namespace icsthreat::cli {

namespace fs = std::filesystem;

fs::path data_dir()
{
    if (const char* env = std::getenv("ICSTHREAT_DATA_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ICSTHREAT_SOURCE_DATA_DIR;
}

namespace {

int exit_code(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidModel:
    case ErrorCode::DupId:
        return Findings;
    case ErrorCode::IoError:
        return Io;
    case ErrorCode::NetworkError:
    case ErrorCode::RateLimited:
    case ErrorCode::BadResponse:
        return Network;
    default:
        return Usage;
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
    }
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    }
}

std::string default_path(const char* relative)
{
    return (data_dir() / relative).string();
}

// Options shared by the commands that run the pipeline.
struct Pipeline {
    std::string model_path;
    std::string rules_path = default_path("rules/stride_default.json");
    std::string matrix_path = default_path("attack/ics_matrix.json");
    std::string mapping_path = default_path("attack/stride_mapping.json");
    std::string feed_path;
    std::string bindings_path;
    std::vector<std::string> metrics_fallback;
    std::string entry = "Initial Access";
    std::string goal = "Impact";
    std::size_t max_len = 4;

    // Texts of every input read, in a fixed order, for the report digest.
    std::vector<std::string> inputs;

    std::string load(const std::string& path)
    {
        inputs.push_back(read_file(path));
        return inputs.back();
    }
};

void add_model(CLI::App* cmd, Pipeline& p)
{
    cmd->add_option("model", p.model_path, "System model file")->required();
}

void add_rules(CLI::App* cmd, Pipeline& p)
{
    cmd->add_option("--rules", p.rules_path, "STRIDE rule file")->capture_default_str();
}

void add_attack(CLI::App* cmd, Pipeline& p)
{
    cmd->add_option("--matrix", p.matrix_path, "ATT&CK for ICS matrix file")->capture_default_str();
    cmd->add_option("--mapping", p.mapping_path, "STRIDE to technique mapping file")->capture_default_str();
    cmd->add_option("--entry", p.entry, "Entry tactic")->capture_default_str();
    cmd->add_option("--goal", p.goal, "Goal tactic")->capture_default_str();
    cmd->add_option("--max-len", p.max_len, "Longest path in steps (at least 2)")->capture_default_str();
}

void add_scoring(CLI::App* cmd, Pipeline& p)
{
    cmd->add_option("--nvd", p.feed_path, "Offline CVE feed file");
    cmd->add_option("--bindings", p.bindings_path, "Threat to CVE/score bindings file");
}

SystemModel load_model(Pipeline& p)
{
    SystemModel model = parse_model(p.load(p.model_path));
    require_valid(model);
    return model;
}

ScoredThreatSet score_threats(Pipeline& p, const ThreatSet& threats)
{
    CveCatalog catalog;
    if (!p.feed_path.empty()) {
        catalog = load_feed(p.load(p.feed_path));
    }
    std::vector<ScoreBinding> bindings;
    if (!p.bindings_path.empty()) {
        bindings = load_bindings(p.load(p.bindings_path));
    }
    std::optional<OverallMetrics> fallback;
    if (!p.metrics_fallback.empty()) {
        fallback = parse_overall_metrics(p.metrics_fallback);
    }
    return attach_scores(threats, catalog, bindings, fallback);
}

std::map<std::string, Score> scores_by_threat(const ScoredThreatSet& scored)
{
    std::map<std::string, Score> out;
    for (const auto& t : scored.threats) {
        if (t.score) {
            out.emplace(t.threat.threat_id, *t.score);
        }
    }
    return out;
}

std::string format_score4(double score)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", score);
    return buf;
}

// ---------------------------------------------------------------------------

int cmd_validate(Pipeline& p, std::ostream& out, std::ostream& err)
{
    SystemModel model = parse_model(p.load(p.model_path));
    bool failed = false;
    for (const auto& issue : validate_model(model)) {
        failed = failed || issue.severity == Severity::Error;
        err << to_string(issue.severity) << " " << to_string(issue.code) << " " << issue.subject << ": "
            << issue.message << "\n";
    }
    if (failed) {
        return Findings;
    }
    for (const auto& issue : purdue_check(model)) {
        err << "warning " << to_string(issue.code) << " " << issue.flow_id << "\n";
    }
    out << "model '" << model.name << "': " << model.elements.size() << " elements, " << model.flows.size()
        << " flows, " << trust_boundary_crossings(model).size() << " boundary crossings\n";
    return Ok;
}

int cmd_threats(Pipeline& p, const std::string& format, std::ostream& out)
{
    SystemModel model = load_model(p);
    ThreatSet threats = enumerate_threats(model, load_rules(p.load(p.rules_path)));
    out << (format == "json" ? render_threats_json(threats) : render_threats_markdown(threats));
    return Ok;
}

std::vector<AttackPath> find_paths(Pipeline& p, const SystemModel& model, const ScoredThreatSet& scored,
                                   const ThreatSet& threats, std::size_t top)
{
    AttackMatrix matrix = load_attack_matrix(p.load(p.matrix_path));
    MappingTable mapping = load_mapping(p.load(p.mapping_path), matrix);
    AttackGraph graph = build_attack_graph(model, threats, matrix, mapping);
    StepScores scores = make_step_scores(graph, scores_by_threat(scored));
    return enumerate_paths(graph, p.entry, p.goal, p.max_len, top, scores);
}

int cmd_paths(Pipeline& p, std::size_t top, const std::string& dot_path, std::ostream& out)
{
    SystemModel model = load_model(p);
    ThreatSet threats = enumerate_threats(model, load_rules(p.load(p.rules_path)));
    ScoredThreatSet scored = score_threats(p, threats);
    std::vector<AttackPath> paths = find_paths(p, model, scored, threats, top);

    out << "rank\tscore\tsteps\n";
    for (std::size_t i = 0; i < paths.size(); ++i) {
        out << i + 1 << "\t" << format_score4(paths[i].path_score) << "\t";
        for (std::size_t s = 0; s < paths[i].steps.size(); ++s) {
            const AttackStep& step = paths[i].steps[s];
            out << (s == 0 ? "" : " -> ") << step.element << ": " << step.technique.name << " ("
                << step.technique.tactic << ")";
        }
        out << "\n";
    }
    if (!dot_path.empty()) {
        write_file(dot_path, export_paths_dot(paths));
    }
    return Ok;
}

int cmd_score(const std::string& vector, const std::vector<std::string>& metrics, std::ostream& out, std::ostream& err)
{
    if (vector.empty() == metrics.empty()) {
        err << "score: give exactly one of --vector and --metrics\n";
        return Usage;
    }
    Score score = vector.empty() ? score_overall(parse_overall_metrics(metrics)) : score_cvss31_base(parse_vector(vector));
    out << score.to_string() << " " << to_string(severity_bucket(score)) << "\n";
    return Ok;
}

struct ReportOptions {
    std::size_t top = 5;
    std::size_t paths = 5;
    std::string out_dir;
    std::string reference_path;
};

int cmd_report(Pipeline& p, const ReportOptions& o, std::ostream& out)
{
    SystemModel model = load_model(p);
    ThreatSet threats = enumerate_threats(model, load_rules(p.load(p.rules_path)));
    ScoredThreatSet scored = score_threats(p, threats);
    std::vector<AttackPath> paths = find_paths(p, model, scored, threats, o.paths);

    std::optional<ReferenceTables> reference;
    if (!o.reference_path.empty()) {
        reference = load_reference(p.load(o.reference_path));
    }

    // Options that shape the output are part of the digest as well.
    std::vector<std::string> digest_inputs = p.inputs;
    std::ostringstream settings;
    settings << "top=" << o.top << ";paths=" << o.paths << ";entry=" << p.entry << ";goal=" << p.goal
             << ";max_len=" << p.max_len;
    for (const auto& pair : p.metrics_fallback) {
        settings << ";metrics:" << pair;
    }
    digest_inputs.push_back(settings.str());

    ReportDocument doc = build_report(scored, o.top, paths, input_digest(digest_inputs));
    if (reference) {
        doc.notes = compare_with_reference(doc, *reference);
    }

    const fs::path dir(o.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());
    }
    write_file(dir / "report.md", render_markdown(doc));
    write_file(dir / "report.json", render_json(doc));
    write_file(dir / "dfd.dot", export_dot(model));
    write_file(dir / "paths.dot", export_paths_dot(paths));
    out << "wrote report.md, report.json, dfd.dot, paths.dot to " << dir.string() << "\n";
    return Ok;
}

int cmd_fetch(const FetchOptions& options, std::ostream& out)
{
    std::size_t count = fetch_remote(options);
    out << count << " record(s) written to " << options.output_path << "\n";
    return Ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Threat modeling pipeline for industrial control and IoT systems", "icsthreat"};
    app.require_subcommand(1);
    app.fallthrough(false);

    Pipeline p;

    auto* validate = app.add_subcommand("validate", "Check a system model");
    add_model(validate, p);

    std::string format = "md";
    auto* threats = app.add_subcommand("threats", "List STRIDE threats");
    add_model(threats, p);
    add_rules(threats, p);
    threats->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"md", "json"}))
        ->capture_default_str();

    std::size_t path_top = 10;
    std::string dot_path;
    auto* paths = app.add_subcommand("paths", "Rank attack paths");
    add_model(paths, p);
    add_rules(paths, p);
    add_attack(paths, p);
    add_scoring(paths, p);
    paths->add_option("--top", path_top, "Number of paths to keep (0 keeps all)")->capture_default_str();
    paths->add_option("--dot", dot_path, "Write the ranked paths as DOT to this file");

    std::string vector;
    std::vector<std::string> metrics;
    auto* score = app.add_subcommand("score", "Score a CVSS v3.1 vector or overall-score metrics");
    score->add_option("--vector", vector, "CVSS:3.1 vector string");
    score->add_option("--metrics", metrics, "Overall-score metrics as NAME=Level pairs");

    ReportOptions ro;
    auto* report = app.add_subcommand("report", "Write the full report");
    add_model(report, p);
    add_rules(report, p);
    add_attack(report, p);
    add_scoring(report, p);
    report->add_option("--top", ro.top, "Rows in the top threats table")->capture_default_str();
    report->add_option("--paths", ro.paths, "Attack paths to list")->capture_default_str();
    report->add_option("--out", ro.out_dir, "Output directory")->required();
    report->add_option("--reference", ro.reference_path, "Published tables to compare against");
    report->add_option("--metrics-fallback", p.metrics_fallback, "Overall-score metrics for threats without a binding");

    FetchOptions fetch;
    auto* fetch_cmd = app.add_subcommand("fetch-nvd", "Download a CVE feed (network access)");
    fetch_cmd->add_option("--endpoint", fetch.endpoint, "CVE API 2.0 endpoint URL")->required();
    fetch_cmd->add_option("--keyword", fetch.keyword, "Keyword search term")->required();
    fetch_cmd->add_option("--out", fetch.output_path, "Feed file to write")->required();
    fetch_cmd->add_option("--page-size", fetch.page_size, "Results per request")->capture_default_str();
    fetch_cmd->footer(std::string("The API key is read from $") + kApiKeyVariable + " when set.");

    std::vector<const char*> argv{"icsthreat"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? Ok : Usage;
    }

    try {
        if (validate->parsed()) {
            return cmd_validate(p, out, err);
        }
        if (threats->parsed()) {
            return cmd_threats(p, format, out);
        }
        if (paths->parsed()) {
            return cmd_paths(p, path_top, dot_path, out);
        }
        if (score->parsed()) {
            return cmd_score(vector, metrics, out, err);
        }
        if (report->parsed()) {
            return cmd_report(p, ro, out);
        }
        if (fetch_cmd->parsed()) {
            if (const char* key = std::getenv(kApiKeyVariable); key != nullptr) {
                fetch.api_key = key;
            }
            return cmd_fetch(fetch, out);
        }
    } catch (const Error& e) {
        err << "icsthreat: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const fs::filesystem_error& e) {
        err << "icsthreat: IO_ERROR: " << e.what() << "\n";
        return Io;
    }
    return Usage;
}

} // namespace icsthreat::cli
