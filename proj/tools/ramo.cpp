// SPDX-License-Identifier: Apache-2.0
// ramo: command-line front end for ingestion, indexing, serving and benchmarks.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ramo/baseline.hpp"
#include "ramo/catalog.hpp"
#include "ramo/config.hpp"
#include "ramo/error.hpp"
#include "ramo/recommender.hpp"
#include "ramo/service.hpp"
#include "ramo/text.hpp"
#include "ramo/vecindex.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

struct CommonOptions {
    std::optional<std::string> config_path;
    std::vector<std::string> sets;
    std::optional<std::string> catalog;
    std::optional<std::string> index;
    std::optional<std::string> template_dir;
    std::optional<std::string> template_id;
    std::optional<std::size_t> top_k;
    bool verbose = false;
};

ramo::ServiceConfig resolve_config(const CommonOptions& opts) {
    std::map<std::string, std::string> overrides;
    for (const auto& kv : opts.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ramo::Error(ramo::ErrorKind::InvalidConfig, "--set expects key=value, got '" + kv + "'");
        }
        overrides[std::string(ramo::trim(std::string_view(kv).substr(0, eq)))] = kv.substr(eq + 1);
    }
    if (opts.catalog) overrides["data.catalog_path"] = *opts.catalog;
    if (opts.index) overrides["data.index_path"] = *opts.index;
    if (opts.template_dir) overrides["data.template_dir"] = *opts.template_dir;
    if (opts.template_id) overrides["data.template_id"] = *opts.template_id;
    if (opts.top_k) overrides["recommender.top_k"] = std::to_string(*opts.top_k);
    return ramo::load_config(opts.config_path, ramo::process_env(), overrides);
}

void add_common(CLI::App& app, CommonOptions& opts) {
    app.add_option("-c,--config", opts.config_path, "Config file ([section] key = value)");
    app.add_option("--set", opts.sets, "Override a config key, e.g. --set recommender.top_k=4");
    app.add_option("--catalog", opts.catalog, "Catalog CSV (data.catalog_path)");
    app.add_option("--index", opts.index, "Saved index file (data.index_path)");
    app.add_option("--template-dir", opts.template_dir, "Prompt template directory");
    app.add_option("--template", opts.template_id, "Template id inside --template-dir");
    app.add_option("-k,--top-k", opts.top_k, "Courses retrieved per question")->check(CLI::PositiveNumber);
    app.add_flag("-v,--verbose", opts.verbose, "Debug logging");
}

int cmd_ingest(const CommonOptions& opts, const std::string& csv_path,
               const std::optional<std::string>& out_path) {
    auto cfg = resolve_config(opts);
    const auto start = std::chrono::steady_clock::now();
    ramo::LoadStats stats;
    const auto catalog = ramo::load_catalog_file(csv_path, cfg.headers, &stats);
    const auto ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    std::cout << "rows=" << stats.rows << " deduped=" << stats.retained << '\n';
    spdlog::info("loaded {} in {:.1f} ms, fingerprint {}", csv_path, ms, catalog.fingerprint());
    if (out_path) {
        std::ofstream out(*out_path, std::ios::binary);
        if (!out) throw ramo::Error(ramo::ErrorKind::Io, "cannot write " + *out_path);
        ramo::write_catalog_csv(catalog, out, cfg.headers);
    }
    return 0;
}

int cmd_build_index(const CommonOptions& opts, const std::string& out_path) {
    auto cfg = resolve_config(opts);
    const auto catalog = ramo::load_catalog_file(cfg.catalog_path, cfg.headers);
    const auto embedder = ramo::make_embedder(cfg);
    const auto index = ramo::build_index(catalog, *embedder);
    ramo::save_index_file(index, out_path);
    std::cout << "courses=" << index.size() << " dim=" << index.dim() << " embedder=" << index.embedder_name()
              << " out=" << out_path << '\n';
    return 0;
}

int cmd_serve(const CommonOptions& opts, const std::optional<std::string>& listen) {
    auto cfg = resolve_config(opts);
    if (listen) cfg.set("server.listen_address", *listen);
    const auto [host, port] = ramo::parse_listen_address(cfg.listen_address);

    ramo::ChatService service(std::chrono::minutes(cfg.session_ttl_minutes));
    ramo::HttpServer server(service, cfg.cors_allowed_origins, cfg.http_threads);
    const int bound = server.bind(host, port);
    if (bound < 0) throw ramo::Error(ramo::ErrorKind::Io, "cannot bind " + cfg.listen_address);

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::thread http([&] { server.listen_after_bind(); });
    spdlog::info("listening on {}:{} (loading pipeline)", host, bound);

    // /healthz answers 503 until the pipeline is in place.
    try {
        service.set_pipeline(ramo::build_recommender(cfg));
    } catch (...) {
        server.stop();
        http.join();
        throw;
    }
    spdlog::info("ready: {} courses", service.pipeline()->catalog().size());

    while (!g_stop.load() && server.is_running()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    server.stop();
    http.join();
    return 0;
}

int cmd_ask(const CommonOptions& opts, const std::string& message,
            const std::optional<std::string>& server_url, const std::optional<std::string>& session,
            bool raw_json) {
    nlohmann::json request{{"message", message}};
    if (session) request["session_id"] = *session;

    int status = 0;
    std::string body;
    if (server_url) {
        httplib::Client client(*server_url);
        client.set_read_timeout(std::chrono::seconds(120));
        httplib::Headers headers;
        if (const char* key = std::getenv("GEN_API_KEY")) headers.emplace("X-Provider-Key", key);
        auto res = client.Post("/api/chat", headers, request.dump(), "application/json");
        if (!res) {
            throw ramo::Error(ramo::ErrorKind::Io,
                              "request to " + *server_url + " failed: " + httplib::to_string(res.error()));
        }
        status = res->status;
        body = res->body;
    } else {
        auto cfg = resolve_config(opts);
        ramo::ChatService service(std::chrono::minutes(cfg.session_ttl_minutes));
        service.set_pipeline(ramo::build_recommender(cfg));
        const auto resp = service.chat(request.dump());
        status = resp.status;
        body = resp.body;
    }

    if (raw_json) {
        std::cout << body << '\n';
    } else if (status == 200) {
        std::cout << nlohmann::json::parse(body).at("reply").get<std::string>() << '\n';
    }
    if (status != 200) {
        std::cerr << "ramo: HTTP " << status << ": " << body << '\n';
        return kExitRuntime;
    }
    return 0;
}

int cmd_bench(const CommonOptions& opts, const std::string& queries_path, std::size_t reps, std::size_t k,
              const std::string& format, const std::optional<std::string>& csv_path) {
    auto cfg = resolve_config(opts);
    std::ifstream in(queries_path, std::ios::binary);
    if (!in) throw ramo::Error(ramo::ErrorKind::Io, "cannot open " + queries_path);
    std::vector<std::string> queries;
    for (std::string line; std::getline(in, line);) {
        auto q = ramo::trim(line);
        if (!q.empty() && q.front() != '#') queries.emplace_back(q);
    }
    if (queries.empty()) throw ramo::Error(ramo::ErrorKind::InvalidArgument, queries_path + " has no queries");

    const auto rag = ramo::build_recommender(cfg);
    const auto model = ramo::build_tfidf(rag->catalog());
    const auto report = ramo::compare_latency(queries, *rag, model, reps, k);

    if (format == "csv") {
        report.write_csv(std::cout);
    } else {
        report.write_table(std::cout);
    }
    if (csv_path) {
        std::ofstream out(*csv_path, std::ios::binary);
        if (!out) throw ramo::Error(ramo::ErrorKind::Io, "cannot write " + *csv_path);
        report.write_csv(out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("ramo"));
    spdlog::set_level(spdlog::level::warn);

    CLI::App app{"RAG course recommender"};
    app.require_subcommand(1);
    CommonOptions opts;

    auto* ingest = app.add_subcommand("ingest", "Load and clean a catalog CSV, print row counts");
    std::string ingest_csv;
    std::optional<std::string> ingest_out;
    ingest->add_option("csv", ingest_csv, "Catalog CSV")->required();
    ingest->add_option("-o,--out", ingest_out, "Write the cleaned, deduplicated catalog here");
    add_common(*ingest, opts);

    auto* build = app.add_subcommand("build-index", "Embed the catalog and save a vector index");
    std::string build_out;
    build->add_option("-o,--out", build_out, "Index file to write")->required();
    add_common(*build, opts);

    auto* serve = app.add_subcommand("serve", "Run the HTTP JSON API");
    std::optional<std::string> listen;
    serve->add_option("-l,--listen", listen, "host:port (server.listen_address)");
    add_common(*serve, opts);

    auto* ask = app.add_subcommand("ask", "Ask one question and print the reply");
    std::string message;
    std::optional<std::string> server_url, session;
    bool raw_json = false;
    ask->add_option("message", message, "The question")->required();
    ask->add_option("--server", server_url, "Send to a running service, e.g. http://127.0.0.1:8080");
    ask->add_option("--session", session, "Session id to continue");
    ask->add_flag("--json", raw_json, "Print the full JSON response");
    add_common(*ask, opts);

    auto* bench = app.add_subcommand("bench", "Compare RAG and TF-IDF baseline latency");
    std::string queries_path;
    std::size_t reps = 10;
    std::size_t bench_k = 5;
    std::string format = "table";
    std::optional<std::string> csv_path;
    bench->add_option("--queries", queries_path, "One query per line")->required();
    bench->add_option("--reps", reps, "Repetitions per query (>= 3)")->check(CLI::Range(3, 100000));
    bench->add_option("--baseline-k", bench_k, "Courses the baseline returns")->check(CLI::PositiveNumber);
    bench->add_option("--format", format, "Report on stdout as table or csv")
        ->check(CLI::IsMember({"table", "csv"}));
    bench->add_option("--csv", csv_path, "Also write the CSV report to this file");
    add_common(*bench, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "ramo: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        std::cerr << (subs.empty() ? app.help() : subs.front()->help());
        return kExitUsage;
    }
    if (opts.verbose) spdlog::set_level(spdlog::level::debug);
    else if (serve->parsed() || bench->parsed()) spdlog::set_level(spdlog::level::info);

    try {
        if (ingest->parsed()) return cmd_ingest(opts, ingest_csv, ingest_out);
        if (build->parsed()) return cmd_build_index(opts, build_out);
        if (serve->parsed()) return cmd_serve(opts, listen);
        if (ask->parsed()) return cmd_ask(opts, message, server_url, session, raw_json);
        if (bench->parsed()) return cmd_bench(opts, queries_path, reps, bench_k, format, csv_path);
    } catch (const ramo::Error& e) {
        std::cerr << "ramo: " << e.what() << '\n';
        return e.kind() == ramo::ErrorKind::InvalidConfig ? kExitUsage : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "ramo: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
