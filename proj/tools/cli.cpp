#include "cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "convqa/ablation_report.hpp"
#include "convqa/config.hpp"
#include "convqa/dataset.hpp"
#include "convqa/error.hpp"
#include "convqa/judge.hpp"
#include "convqa/metrics.hpp"
#include "convqa/pipeline.hpp"
#include "convqa/service.hpp"

namespace convqa {
namespace fs = std::filesystem;
namespace {

struct UsageError : Error {
    using Error::Error;
};

AppConfig resolve_config(const std::string& flag) {
    std::string path = flag;
    if (path.empty()) {
        if (const char* env = std::getenv(kConfigEnvVar); env != nullptr) path = env;
    }
    if (path.empty()) throw UsageError(std::string("no config given; pass --config or set ") + kConfigEnvVar);
    return load_config(path);
}

struct Stack {
    AppConfig config;
    std::shared_ptr<const Pipeline> pipeline;
};

Stack build_stack(const std::string& config_flag) {
    Stack s{resolve_config(config_flag), nullptr};
    s.pipeline = std::make_shared<const Pipeline>(build_components(s.config));
    return s;
}

void report_failures(const std::vector<RecordOutcome>& outcomes, std::ostream& err) {
    std::size_t failed = 0;
    for (const RecordOutcome& o : outcomes) {
        if (o.result) continue;
        ++failed;
        err << "record " << o.record.conv_id << "#" << o.record.turn_index << ": " << o.error << "\n";
    }
    if (failed != 0) err << failed << " of " << outcomes.size() << " records failed\n";
}

std::vector<std::string> references_of(const std::vector<DatasetRecord>& records) {
    std::vector<std::string> refs;
    refs.reserve(records.size());
    for (const DatasetRecord& r : records) refs.push_back(r.reference_response);
    return refs;
}

std::vector<std::string> responses_of(const std::vector<RecordOutcome>& outcomes) {
    std::vector<std::string> out;
    out.reserve(outcomes.size());
    for (const RecordOutcome& o : outcomes) out.push_back(o.result ? o.result->response : std::string());
    return out;
}

int cmd_chat(const std::string& config_flag, bool json, std::istream& in, std::ostream& out) {
    const Stack stack = build_stack(config_flag);
    Session session("chat", stack.config.pipeline, Conversation("chat"));
    std::string line;
    out << "> " << std::flush;
    while (std::getline(in, line)) {
        const std::string q = normalize_whitespace(line);
        if (q == "/quit" || q == "/exit") break;
        if (!q.empty()) {
            try {
                const TurnResult r = stack.pipeline->answer_turn(session, q);
                if (json) {
                    out << encode(r, {true, false}).dump() << "\n";
                } else {
                    out << r.response << "\n";
                }
            } catch (const StageError& e) {
                out << "error: " << e.what() << "\n";
            }
        }
        out << "> " << std::flush;
    }
    out << "\n";
    return kExitOk;
}

int cmd_answer(const std::string& config_flag, const std::string& dataset, const std::string& out_path,
               const std::optional<std::string>& drop, bool timings, std::ostream& out, std::ostream& err) {
    const Stack stack = build_stack(config_flag);
    PipelineConfig cfg = stack.config.pipeline;
    if (drop) cfg.ablations = Ablations::parse(*drop);
    const auto records = load_dataset(dataset);
    const auto outcomes = run_dataset(records, *stack.pipeline, cfg);
    write_predictions(outcomes, out_path, {true, timings});
    report_failures(outcomes, err);
    out << "wrote " << outcomes.size() << " predictions (" << cfg.ablations.label() << ") to " << out_path << "\n";
    return kExitOk;
}

int cmd_ablate_matrix(const std::string& config_flag, const std::string& dataset, const std::string& out_dir,
                      bool json, std::ostream& out, std::ostream& err) {
    const Stack stack = build_stack(config_flag);
    const auto records = load_dataset(dataset);
    const auto refs = references_of(records);
    fs::create_directories(out_dir);
    std::map<std::string, MetricScores> runs;
    for (const char* codes : {"none", "qf", "fr", "sc", "all"}) {
        PipelineConfig cfg = stack.config.pipeline;
        cfg.ablations = Ablations::parse(codes);
        const auto outcomes = run_dataset(records, *stack.pipeline, cfg);
        const std::string label = cfg.ablations.label();
        write_predictions(outcomes, fs::path(out_dir) / (label + ".jsonl"));
        report_failures(outcomes, err);
        runs[label] = evaluate_run(responses_of(outcomes), refs, cfg.tokenizer).aggregate;
    }
    const AblationTable table = ablation_report(runs);
    out << (json ? table.encode().dump(2) + "\n" : table.render());
    return kExitOk;
}

int cmd_eval(const std::string& pred, const std::string& ref, const std::string& tokenizer, bool json,
             std::ostream& out) {
    const MetricReport report = evaluate_run(load_texts(pred), load_texts(ref), parse_tokenizer_mode(tokenizer));
    out << (json ? encode(report).dump(2) + "\n" : format_metric_report(report));
    return kExitOk;
}

int cmd_stats(const std::string& dataset, const std::string& tokenizer, bool json, std::ostream& out) {
    const DatasetStats stats = dataset_stats(load_dataset(dataset), parse_tokenizer_mode(tokenizer));
    out << (json ? encode(stats).dump(2) + "\n" : format_stats_report(stats));
    return kExitOk;
}

int cmd_judge(const std::string& config_flag, const std::string& dataset, const std::string& pred_a,
              const std::string& pred_b, const std::string& name_a, const std::string& name_b, int trials,
              std::uint64_t seed, bool json, std::ostream& out) {
    const AppConfig config = resolve_config(config_flag);
    const PipelineComponents components = build_components(config);
    auto it = components.backends.find(BackendRole::judge);
    if (it == components.backends.end()) throw Error("config binds no judge backend");
    const auto records = load_dataset(dataset);
    const auto a = load_texts(pred_a);
    const auto b = load_texts(pred_b);
    if (a.size() != records.size() || b.size() != records.size()) {
        throw Error("length mismatch: " + std::to_string(records.size()) + " records, " + std::to_string(a.size()) +
                    " and " + std::to_string(b.size()) + " predictions");
    }
    WinTally total;
    for (std::size_t i = 0; i < records.size(); ++i) {
        JudgeOptions opts;
        opts.seed = seed + i;
        opts.max_context_turns = config.pipeline.max_context_turns;
        const Conversation ctx(records[i].conv_id, records[i].context);
        accumulate(total, pairwise_judge(ctx, records[i].question, a[i], b[i], *it->second, trials,
                                         components.templates, opts));
    }
    out << (json ? encode(total).dump(2) + "\n" : format_win_table(name_a, name_b, total));
    return kExitOk;
}

int cmd_serve(const std::string& config_flag, const std::string& host, int port, const std::string& ui,
              const std::string& snapshot, std::ostream& out) {
    const Stack stack = build_stack(config_flag);
    ServiceOptions opts;
    opts.host = host;
    opts.port = port;
    opts.config_digest = stack.config.digest();
    if (!ui.empty()) opts.ui_dir = ui;
    if (!snapshot.empty()) opts.snapshot_path = snapshot;

    // Block the stop signals before the server spawns its workers so only
    // sigwait below sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    Service service(stack.pipeline, stack.config.pipeline, opts);
    const int bound = service.start();
    out << "listening on http://" << host << ":" << bound << " (config " << opts.config_digest << ")\n" << std::flush;
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
    out << "stopped\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Conversational question answering over retrieved evidence", "convqa"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string config;
    std::string dataset;
    std::string out_path;
    std::string tokenizer = "unicode";
    bool json = false;

    auto* chat = app.add_subcommand("chat", "Interactive session; one question per line, /quit to leave");
    chat->add_option("--config", config, "Config file (default: $CONVQA_CONFIG)");
    chat->add_flag("--json", json, "Print the full turn result as JSON");

    std::optional<std::string> drop;
    bool timings = false;
    auto* answer = app.add_subcommand("answer", "Answer every record of a dataset");
    answer->add_option("--config", config, "Config file (default: $CONVQA_CONFIG)");
    answer->add_option("--dataset", dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    answer->add_option("--out", out_path, "Predictions JSONL to write")->required();
    answer->add_option("--drop", drop, "Ablate components: qf,fr,sc | all | none");
    answer->add_flag("--timings", timings, "Record stage timings in the trace");

    std::string drop_codes;
    bool matrix = false;
    auto* ablate = app.add_subcommand("ablate", "Answer a dataset with components removed");
    ablate->add_option("--config", config, "Config file (default: $CONVQA_CONFIG)");
    ablate->add_option("--dataset", dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    ablate->add_option("--out", out_path, "Predictions JSONL, or a directory with --matrix")->required();
    auto* drop_opt = ablate->add_option("--drop", drop_codes, "Components to remove: qf,fr,sc | all");
    auto* matrix_opt =
        ablate->add_flag("--matrix", matrix, "Run full, -QF, -FR, -SC and -ALL and print the comparison table");
    drop_opt->excludes(matrix_opt);
    ablate->add_flag("--json", json, "Table as JSON (with --matrix)");

    std::string pred;
    std::string ref;
    auto* eval = app.add_subcommand("eval", "Score predictions against references");
    eval->add_option("--pred", pred, "Predictions JSONL")->required()->check(CLI::ExistingFile);
    eval->add_option("--ref", ref, "References JSONL (dataset or {\"reference\"} lines)")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--tokenizer", tokenizer, "unicode | whitespace | character");
    eval->add_flag("--json", json, "Per-example and aggregate scores as JSON");

    auto* stats = app.add_subcommand("stats", "Dataset statistics");
    stats->add_option("--dataset", dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
    stats->add_option("--tokenizer", tokenizer, "unicode | whitespace | character");
    stats->add_flag("--json", json, "Emit JSON");

    std::string pred_b;
    std::string name_a = "A";
    std::string name_b = "B";
    int trials = 1;
    std::uint64_t seed = 0;
    auto* judge = app.add_subcommand("judge", "Pairwise comparison of two prediction files");
    judge->add_option("--config", config, "Config file binding a judge backend (default: $CONVQA_CONFIG)");
    judge->add_option("--dataset", dataset, "Dataset JSONL giving context and question")
        ->required()
        ->check(CLI::ExistingFile);
    judge->add_option("--a", pred, "Predictions of system A")->required()->check(CLI::ExistingFile);
    judge->add_option("--b", pred_b, "Predictions of system B")->required()->check(CLI::ExistingFile);
    judge->add_option("--name-a", name_a, "Label for system A");
    judge->add_option("--name-b", name_b, "Label for system B");
    judge->add_option("--trials", trials, "Judge calls per record")->check(CLI::PositiveNumber);
    judge->add_option("--seed", seed, "Seed for A/B position randomization");
    judge->add_flag("--json", json, "Emit JSON");

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string ui;
    std::string snapshot;
    auto* serve = app.add_subcommand("serve", "HTTP session service");
    serve->add_option("--config", config, "Config file (default: $CONVQA_CONFIG)");
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--port", port, "Listen port, 0 for any")->check(CLI::Range(0, 65535));
    serve->add_option("--ui", ui, "Directory of built chat UI assets, served under /ui")->check(CLI::ExistingDirectory);
    serve->add_option("--snapshot", snapshot, "Session snapshot file, loaded on start and written on shutdown");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return kExitUsage;
    }

    try {
        if (ablate->parsed() && !matrix && drop_codes.empty()) throw UsageError("ablate needs --drop or --matrix");
        if (chat->parsed()) return cmd_chat(config, json, in, out);
        if (answer->parsed()) return cmd_answer(config, dataset, out_path, drop, timings, out, err);
        if (ablate->parsed()) {
            if (matrix) return cmd_ablate_matrix(config, dataset, out_path, json, out, err);
            return cmd_answer(config, dataset, out_path, drop_codes, false, out, err);
        }
        if (eval->parsed()) return cmd_eval(pred, ref, tokenizer, json, out);
        if (stats->parsed()) return cmd_stats(dataset, tokenizer, json, out);
        if (judge->parsed()) return cmd_judge(config, dataset, pred, pred_b, name_a, name_b, trials, seed, json, out);
        if (serve->parsed()) return cmd_serve(config, host, port, ui, snapshot, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace convqa
