#include "rtlrc/cli.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtlrc/backend.hpp"
#include "rtlrc/corpus.hpp"
#include "rtlrc/error.hpp"
#include "rtlrc/evaluate.hpp"
#include "rtlrc/ftprep.hpp"
#include "rtlrc/metrics.hpp"
#include "rtlrc/pipeline.hpp"
#include "rtlrc/store.hpp"

namespace rtlrc::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string dataset;
    std::string out;
    std::size_t budget = 10240;
    std::vector<std::string> split{"line"};
    std::vector<std::size_t> chunk_size{4096};
    std::vector<std::string> embedder{"hash"};
    std::string embed_endpoint;
    std::string embed_model = "jina-embeddings-v2-base-en";
    std::size_t embed_max_tokens = 8192;
    std::size_t embed_dim = 256;
    std::size_t embed_batch = 32;
    std::string tokenizer = "char4";
    std::string tokenizer_endpoint;
    std::string backend = "http";
    std::string endpoint;
    std::string model;
    double temperature = 0.2;
    std::size_t max_tokens = 128;
    std::string wire = "completion";
    double timeout_s = 120.0;
    int retries = 2;
    std::size_t max_inflight = 4;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::uint64_t seed = 0;
    bool no_gate = false;
    std::string prompt_template = "default-v1";
    std::string context_order = "desc";
    std::size_t min_context_tokens = 0;
    std::optional<std::size_t> limit;
    std::vector<std::size_t> buckets{5000, 10000, 20000, 40000};

    // ablate
    std::vector<std::string> gate{"on"};
    bool resume = false;
    std::size_t jobs = 1;

    // inspect / index
    std::string id;
    std::string repo;
    bool no_text = false;

    // prepare-finetune
    bool force = false;
};

std::string one(const std::vector<std::string>& v, const char* flag) {
    if (v.size() != 1) throw ConfigError(std::string(flag) + " takes a single value here");
    return v.front();
}

std::size_t one(const std::vector<std::size_t>& v, const char* flag) {
    if (v.size() != 1) throw ConfigError(std::string(flag) + " takes a single value here");
    return v.front();
}

std::chrono::milliseconds seconds(double s) {
    return std::chrono::milliseconds(static_cast<long long>(s * 1000.0));
}

TokenCounter make_counter(const Options& o) {
    auto scheme = parse_token_scheme(o.tokenizer);
    if (scheme == TokenScheme::External) {
        if (o.tokenizer_endpoint.empty())
            throw ConfigError("--tokenizer http requires --tokenizer-endpoint");
        return TokenCounter::external(o.tokenizer_endpoint, seconds(o.timeout_s), o.retries);
    }
    return TokenCounter(scheme);
}

EmbedderConfig make_embedder(const Options& o, const std::string& kind) {
    if (kind == "hash") return EmbedderConfig::hashed(o.embed_dim);
    if (kind == "http") {
        if (o.embed_endpoint.empty()) throw ConfigError("--embedder http requires --embed-endpoint");
        auto c = EmbedderConfig::http(o.embed_endpoint, o.embed_model, o.embed_max_tokens);
        c.timeout = seconds(o.timeout_s);
        c.retries = o.retries;
        c.max_batch = o.embed_batch;
        c.max_inflight = o.max_inflight;
        return c;
    }
    throw ConfigError("unknown embedder '" + kind + "' (expected hash|http)");
}

PipelineConfig make_pipeline_config(const Options& o, const std::string& split,
                                    std::size_t chunk_size, const std::string& embedder,
                                    bool gate) {
    PipelineConfig c;
    c.budget = o.budget;
    c.strategy = {parse_split_keyword(split), chunk_size};
    c.counter = make_counter(o);
    c.embedder = make_embedder(o, embedder);
    c.gate_enabled = gate;
    c.prompt_template = o.prompt_template;
    c.context_order = parse_context_order(o.context_order);
    c.validate();
    return c;
}

HttpCompletionConfig make_http_backend_config(const Options& o) {
    HttpCompletionConfig h;
    h.endpoint = o.endpoint;
    h.model = o.model;
    h.temperature = o.temperature;
    h.max_tokens = o.max_tokens;
    h.wire = parse_wire_format(o.wire);
    h.timeout = seconds(o.timeout_s);
    h.retries = o.retries;
    h.max_inflight = o.max_inflight;
    return h;
}

std::unique_ptr<GenerationBackend> make_backend_from(const Options& o) {
    if (o.backend == "http" && o.endpoint.empty())
        throw ConfigError("--backend http requires --endpoint");
    return make_backend(o.backend, make_http_backend_config(o));
}

std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Dataset load_for_run(const Options& o) {
    if (o.dataset.empty()) throw ConfigError("--dataset is required");
    return load_dataset(o.dataset);
}

struct CellResult {
    EvalSummary summary;
    bool partial = false;
};

// One evaluation over `dataset` written into `dir`. Shared by evaluate and
// every ablation cell.
CellResult evaluate_into(const Options& o, const Dataset& dataset, const PipelineConfig& config,
                         const GenerationBackend& backend, const fs::path& dir,
                         const std::vector<std::string>& command_line) {
    const std::string started = utc_now();
    Pipeline pipeline(config);
    Buckets buckets(o.buckets);

    auto samples = filter_by_context(dataset, pipeline, o.min_context_tokens);
    if (o.limit && samples.size() > *o.limit) samples.resize(*o.limit);
    auto records = run_evaluation(samples, pipeline, backend, buckets, o.workers);

    EvalSummary summary = summarize(records, buckets);
    json cfg = describe_config(config);
    cfg["backend"] = backend.describe();
    cfg["temperature"] = o.temperature;
    cfg["min_context_tokens"] = o.min_context_tokens;
    cfg["limit"] = o.limit ? json(*o.limit) : json(nullptr);
    cfg["buckets"] = o.buckets;
    cfg["fingerprint"] = "fnv1a64:" + hex64(fnv1a64(cfg.dump()));
    summary.config = cfg;

    std::size_t chunks_truncated = 0, queries_truncated = 0;
    for (const auto& r : records) {
        chunks_truncated += r.chunks_truncated;
        queries_truncated += r.query_truncated ? 1 : 0;
    }

    fs::create_directories(dir);
    write_records_jsonl(records, dir / "records.jsonl");
    json summary_json = to_json(summary);
    summary_json["chunks_truncated"] = chunks_truncated;
    summary_json["queries_truncated"] = queries_truncated;
    {
        std::ofstream out(dir / "summary.json", std::ios::binary | std::ios::trunc);
        out << summary_json.dump(2) << '\n';
        if (!out) throw IoError("cannot write summary.json in '" + dir.string() + "'");
    }
    write_summary_csv(summary, dir / "summary.csv");

    json manifest{{"tool", "rtlrc"},
                  {"version", kVersion},
                  {"command_line", command_line},
                  {"config", cfg},
                  {"dataset",
                   {{"path", dataset.source_path.string()},
                    {"fingerprint", file_fingerprint(dataset.source_path)},
                    {"samples", dataset.samples.size()},
                    {"evaluated", samples.size()},
                    {"unknown_fields", dataset.unknown_fields}}},
                  {"workers", o.workers},
                  {"seed", o.seed},
                  {"nondeterministic_backend", backend.nondeterministic()},
                  {"started_at", started},
                  {"finished_at", utc_now()}};
    std::ofstream mout(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    mout << manifest.dump(2) << '\n';

    return {summary, summary.n_errors > 0};
}

int cmd_evaluate(const Options& o, const std::vector<std::string>& command_line) {
    if (o.out.empty()) throw ConfigError("--out is required");
    Dataset dataset = load_for_run(o);
    auto config = make_pipeline_config(o, one(o.split, "--split"), one(o.chunk_size, "--chunk-size"),
                                       one(o.embedder, "--embedder"), !o.no_gate);
    auto backend = make_backend_from(o);
    auto result = evaluate_into(o, dataset, config, *backend, o.out, command_line);
    const auto& s = result.summary;
    std::cout << "n=" << s.n << " errors=" << s.n_errors << " EM=" << format_fixed(s.em_pct)
              << " ES=" << format_fixed(s.es_mean) << " (direct=" << s.n_direct
              << " rag=" << s.n_rag << ")\n";
    return result.partial ? kPartial : kOk;
}

bool parse_gate(const std::string& v) {
    if (v == "on") return true;
    if (v == "off") return false;
    throw ConfigError("--gate expects on|off, got '" + v + "'");
}

int cmd_ablate(const Options& o, const std::vector<std::string>& command_line) {
    if (o.out.empty()) throw ConfigError("--out is required");
    Dataset dataset = load_for_run(o);
    auto backend = make_backend_from(o);

    struct Cell {
        std::string split;
        std::size_t chunk_size;
        std::string embedder;
        std::string gate;
        std::string name;
        std::string status = "ok";
        std::string error;
        EvalSummary summary;
    };
    std::vector<Cell> cells;
    for (const auto& split : o.split)
        for (auto chunk : o.chunk_size)
            for (const auto& emb : o.embedder)
                for (const auto& gate : o.gate) {
                    parse_gate(gate);
                    parse_split_keyword(split);
                    std::string name = "split-" + split + "_chunk-" + std::to_string(chunk) +
                                       "_emb-" + emb + "_gate-" + gate;
                    cells.push_back({split, chunk, emb, gate, std::move(name), "ok", {}, {}});
                }

    const fs::path root(o.out);
    fs::create_directories(root / "cells");
    std::mutex log_mu;
    std::atomic<std::size_t> next{0};

    auto run_cell = [&](Cell& cell) {
        const fs::path dir = root / "cells" / cell.name;
        try {
            if (o.resume && fs::exists(dir / "records.jsonl") && fs::exists(dir / "summary.json")) {
                cell.summary = summarize(read_records_jsonl(dir / "records.jsonl"), Buckets(o.buckets));
                cell.status = "resumed";
                return;
            }
            auto config = make_pipeline_config(o, cell.split, cell.chunk_size, cell.embedder,
                                               parse_gate(cell.gate));
            auto cmd = command_line;
            cmd.push_back("# cell " + cell.name);
            cell.summary = evaluate_into(o, dataset, config, *backend, dir, cmd).summary;
            if (cell.summary.n_errors > 0) cell.status = "partial";
        } catch (const std::exception& e) {
            cell.status = "error";
            cell.error = e.what();
        }
        std::lock_guard lock(log_mu);
        std::cerr << "[ablate] " << cell.name << ": " << cell.status;
        if (!cell.error.empty()) std::cerr << " (" << cell.error << ")";
        std::cerr << '\n';
    };
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) run_cell(cells[i]);
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < std::max<std::size_t>(1, std::min(o.jobs, cells.size())); ++i)
            pool.emplace_back(worker);
    }

    std::ofstream csv(root / "ablation.csv", std::ios::binary | std::ios::trunc);
    csv << "cell,split,chunk_size,embedder,gate,status,n,n_errors,em_pct,es_mean\n";
    bool any_failed = false;
    for (const auto& c : cells) {
        any_failed = any_failed || c.status == "error" || c.status == "partial";
        csv << c.name << ',' << c.split << ',' << c.chunk_size << ',' << c.embedder << ',' << c.gate
            << ',' << c.status << ',' << c.summary.n << ',' << c.summary.n_errors << ','
            << format_fixed(c.summary.em_pct) << ',' << format_fixed(c.summary.es_mean) << '\n';
        std::cout << c.name << " " << c.status << " n=" << c.summary.n
                  << " EM=" << format_fixed(c.summary.em_pct)
                  << " ES=" << format_fixed(c.summary.es_mean) << '\n';
    }
    if (!csv) throw IoError("cannot write ablation.csv");
    return any_failed ? kPartial : kOk;
}

int cmd_inspect(const Options& o, bool generate) {
    if (o.id.empty()) throw ConfigError("--id is required");
    Dataset dataset = load_for_run(o);
    const RepoSample* sample = dataset.find(o.id);
    if (!sample) throw UnknownSampleId(o.id);

    auto config = make_pipeline_config(o, one(o.split, "--split"), one(o.chunk_size, "--chunk-size"),
                                       one(o.embedder, "--embedder"), !o.no_gate);
    Pipeline pipeline(config);
    auto a = pipeline.assemble(*sample, true);

    std::ostream& out = std::cout;
    out << "sample: " << sample->id << " (repo " << sample->repo << ", file "
        << sample->current_path << ")\n";
    out << "path=" << (a.path_taken == PathTaken::Direct ? "Direct" : "Rag")
        << " direct_tokens=" << a.direct_tokens << " budget=" << config.budget
        << " prompt_tokens=" << a.prompt_tokens << " file_truncated=" << a.file_truncated << '\n';

    if (a.retrieval) {
        const auto& r = *a.retrieval;
        out << "retrieval: budget=" << r.budget << " used=" << r.total_tokens
            << " admitted=" << r.chunks.size() << "/" << r.chunks_total
            << " query_truncated=" << r.truncated_query << '\n';
        std::size_t rank = 0;
        for (const auto& rc : r.ranking) {
            char score[32];
            std::snprintf(score, sizeof score, "%.6f", rc.score);
            out << "  #" << ++rank << ' ' << (rc.admitted ? "[admitted]" : "[        ]") << ' '
                << rc.chunk.id() << " score=" << score << " tokens=" << rc.chunk.token_len
                << (rc.chunk.oversize ? " oversize" : "") << '\n';
        }
    }

    if (o.no_text) {
        TokenCounter c = config.counter;
        out << "prompt skeleton: context_tokens=" << c.count(a.context_text)
            << " file_tokens=" << c.count(a.file_text) << " total=" << a.prompt_tokens << '\n';
    } else {
        out << "----- prompt -----\n" << a.prompt << "\n----- end prompt -----\n";
    }

    if (generate) {
        auto backend = make_backend_from(o);
        auto prediction = first_line(backend->generate(a.prompt, *sample));
        auto rec = score_record(sample->id, prediction, sample->target);
        out << "prediction: " << prediction << '\n'
            << "target:     " << sample->target << '\n'
            << "EM=" << rec.em << " ES=" << format_fixed(rec.es) << '\n';
    }
    return kOk;
}

int cmd_prepare_finetune(const Options& o) {
    if (o.out.empty()) throw ConfigError("--out is required");
    Dataset dataset = load_for_run(o);
    if (o.limit) dataset = sample_subset(dataset, *o.limit, o.seed);
    auto config = make_pipeline_config(o, one(o.split, "--split"), one(o.chunk_size, "--chunk-size"),
                                       one(o.embedder, "--embedder"), true);
    auto result = prepare_ft_dataset(dataset, config, o.budget);
    export_jsonl(result.samples, o.out, o.force);
    std::size_t truncated = 0;
    for (const auto& s : result.samples) truncated += s.truncated ? 1 : 0;
    for (const auto& s : result.skipped)
        std::cerr << "[prepare-finetune] skipped " << s.sample_id << ": " << s.reason << '\n';
    std::cout << "wrote " << result.samples.size() << " samples (" << truncated << " truncated, "
              << result.skipped.size() << " skipped) to " << o.out << '\n';
    return kOk;
}

int cmd_index(const Options& o) {
    if (o.out.empty()) throw ConfigError("--out is required");
    if (o.id.empty() == o.repo.empty()) throw ConfigError("give exactly one of --id or --repo");
    Dataset dataset = load_for_run(o);

    std::vector<RepoFile> files;
    if (!o.id.empty()) {
        const RepoSample* s = dataset.find(o.id);
        if (!s) throw UnknownSampleId(o.id);
        files = s->context_files;
    } else {
        std::unordered_set<std::string> seen;
        for (const auto& s : dataset.samples)
            if (s.repo == o.repo)
                for (const auto& f : s.context_files)
                    if (seen.insert(f.path).second) files.push_back(f);
        if (files.empty()) throw ConfigError("no context files for repo '" + o.repo + "'");
    }

    auto counter = make_counter(o);
    auto chunks = make_chunks(files, {parse_split_keyword(one(o.split, "--split")),
                                      one(o.chunk_size, "--chunk-size")},
                              counter);
    Embedder embedder(make_embedder(o, one(o.embedder, "--embedder")), counter);
    std::vector<std::string_view> texts;
    for (const auto& c : chunks) texts.emplace_back(c.text);
    auto store = build_store(chunks, embedder.embed_batch(texts));
    store.save(o.out);
    std::cout << "indexed " << store.size() << " chunks (dim " << store.dim() << ") from "
              << files.size() << " files into " << o.out << '\n';
    return kOk;
}

void add_shared_options(CLI::App& app, Options& o) {
    app.add_option("--dataset", o.dataset, "JSONL dataset of samples");
    app.add_option("--out", o.out, "Output directory (file for prepare-finetune/index)");
    app.add_option("--budget", o.budget, "Total prompt budget L in tokens")->capture_default_str();
    app.add_option("--split", o.split, "Split keyword: line|endmodule|para (list for ablate)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--chunk-size", o.chunk_size, "Chunk size in tokens (list for ablate)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--embedder", o.embedder, "Embedder: hash|http (list for ablate)")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--embed-endpoint", o.embed_endpoint, "Embedding service URL");
    app.add_option("--embed-model", o.embed_model, "Embedding model name")->capture_default_str();
    app.add_option("--embed-max-tokens", o.embed_max_tokens, "Embedding window in tokens")
        ->capture_default_str();
    app.add_option("--embed-dim", o.embed_dim, "Hashing embedder dimension")->capture_default_str();
    app.add_option("--embed-batch", o.embed_batch, "Inputs per embedding request")
        ->capture_default_str();
    app.add_option("--tokenizer", o.tokenizer, "Token counter: char4|wspunct|http")
        ->capture_default_str();
    app.add_option("--tokenizer-endpoint", o.tokenizer_endpoint, "Tokenizer service URL");
    app.add_option("--backend", o.backend, "http|echo-target|fixed:<s>|copy-last-line")
        ->capture_default_str();
    app.add_option("--endpoint", o.endpoint, "Completion service URL");
    app.add_option("--model", o.model, "Completion model name");
    app.add_option("--temperature", o.temperature, "Sampling temperature")->capture_default_str();
    app.add_option("--max-tokens", o.max_tokens, "Generation limit")->capture_default_str();
    app.add_option("--wire", o.wire, "completion|chat")->capture_default_str();
    app.add_option("--timeout", o.timeout_s, "Per-request timeout in seconds")->capture_default_str();
    app.add_option("--retries", o.retries, "Retries on transient HTTP failures")
        ->capture_default_str();
    app.add_option("--max-inflight", o.max_inflight, "Concurrent HTTP requests")
        ->capture_default_str();
    app.add_option("--workers", o.workers, "Sample-level worker threads")->capture_default_str();
    app.add_option("--seed", o.seed, "Seed for sampling")->capture_default_str();
    app.add_flag("--no-gate", o.no_gate, "Send every sample down the retrieval path");
    app.add_option("--template", o.prompt_template, "default-v1|instruct-v1")->capture_default_str();
    app.add_option("--context-order", o.context_order, "desc|asc")->capture_default_str();
    app.add_option("--min-context-tokens", o.min_context_tokens,
                   "Only samples whose direct prompt has at least this many tokens")
        ->capture_default_str();
    app.add_option("--limit", o.limit, "Sample limit");
    app.add_option("--buckets", o.buckets, "Context-length bucket thresholds")
        ->delimiter(',')
        ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args) {
    Options o;
    CLI::App app{"Repository-level Verilog next-line completion with length-gated retrieval",
                 "rtlrc"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "TOML file with flat keys mirroring the flags");
    app.require_subcommand(1);
    app.fallthrough();
    add_shared_options(app, o);

    auto* evaluate = app.add_subcommand("evaluate", "Run the pipeline over a dataset and score it");
    auto* ablate = app.add_subcommand("ablate", "Evaluate a grid of configurations");
    ablate->add_option("--gate", o.gate, "on,off")->delimiter(',')->capture_default_str();
    ablate->add_flag("--resume", o.resume, "Skip cells that already have results");
    ablate->add_option("--jobs", o.jobs, "Cells evaluated in parallel")->capture_default_str();
    auto* inspect = app.add_subcommand("inspect", "Show the path, ranking and prompt of one sample");
    inspect->add_option("--id", o.id, "Sample id")->required();
    inspect->add_flag("--no-text", o.no_text, "Print token counts instead of the prompt");
    auto* prepare = app.add_subcommand("prepare-finetune", "Build an instruction-tuning JSONL");
    prepare->add_flag("--force", o.force, "Overwrite an existing output file");
    auto* index = app.add_subcommand("index", "Build and persist a vector store");
    index->add_option("--id", o.id, "Sample id");
    index->add_option("--repo", o.repo, "Repository name (union of its context files)");

    std::vector<const char*> argv{"rtlrc"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kFatal;
    }

    std::vector<std::string> command_line{"rtlrc"};
    command_line.insert(command_line.end(), args.begin(), args.end());
    try {
        if (evaluate->parsed()) return cmd_evaluate(o, command_line);
        if (ablate->parsed()) return cmd_ablate(o, command_line);
        if (inspect->parsed())
            return cmd_inspect(o, app.count("--backend") > 0);
        if (prepare->parsed()) return cmd_prepare_finetune(o);
        if (index->parsed()) return cmd_index(o);
    } catch (const std::exception& e) {
        std::cerr << "rtlrc: " << e.what() << '\n';
        return kFatal;
    }
    return kFatal;
}

}  // namespace rtlrc::cli
