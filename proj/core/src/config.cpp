// SPDX-License-Identifier: Apache-2.0
#include "ramo/config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "ramo/error.hpp"
#include "ramo/recommender.hpp"
#include "ramo/remote_embedder.hpp"
#include "ramo/remote_generator.hpp"
#include "ramo/text.hpp"
#include "ramo/vecindex.hpp"

namespace ramo {
namespace {

std::size_t to_size(std::string_view key, std::string_view v) {
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw Error(ErrorKind::InvalidConfig, std::string(key) + ": expected a non-negative integer");
    }
    return n;
}

double to_double(std::string_view key, std::string_view v) {
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw Error(ErrorKind::InvalidConfig, std::string(key) + ": expected a number");
    }
    return d;
}

std::vector<std::string> to_list(std::string_view v) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        auto end = v.find(',', start);
        if (end == std::string_view::npos) end = v.size();
        auto item = trim(v.substr(start, end - start));
        if (!item.empty()) out.emplace_back(item);
        start = end + 1;
    }
    return out;
}

using Setter = void (*)(ServiceConfig&, std::string_view key, std::string_view value);

struct KeyEntry {
    std::string_view key;
    Setter set;
};

const KeyEntry kKeys[] = {
    {"server.listen_address", [](ServiceConfig& c, auto, auto v) { c.listen_address = v; }},
    {"server.cors_allowed_origins", [](ServiceConfig& c, auto, auto v) { c.cors_allowed_origins = to_list(v); }},
    {"server.session_ttl_minutes", [](ServiceConfig& c, auto k, auto v) { c.session_ttl_minutes = to_size(k, v); }},
    {"server.threads", [](ServiceConfig& c, auto k, auto v) { c.http_threads = to_size(k, v); }},
    {"data.catalog_path", [](ServiceConfig& c, auto, auto v) { c.catalog_path = v; }},
    {"data.index_path", [](ServiceConfig& c, auto, auto v) { c.index_path = v; }},
    {"data.template_dir", [](ServiceConfig& c, auto, auto v) { c.template_dir = v; }},
    {"data.template_id", [](ServiceConfig& c, auto, auto v) { c.template_id = v; }},
    {"catalog.name_column", [](ServiceConfig& c, auto, auto v) { c.headers.name = v; }},
    {"catalog.university_column", [](ServiceConfig& c, auto, auto v) { c.headers.university = v; }},
    {"catalog.difficulty_column", [](ServiceConfig& c, auto, auto v) { c.headers.difficulty = v; }},
    {"catalog.rating_column", [](ServiceConfig& c, auto, auto v) { c.headers.rating = v; }},
    {"catalog.url_column", [](ServiceConfig& c, auto, auto v) { c.headers.url = v; }},
    {"catalog.description_column", [](ServiceConfig& c, auto, auto v) { c.headers.description = v; }},
    {"catalog.skills_column", [](ServiceConfig& c, auto, auto v) { c.headers.skills = v; }},
    {"embedder.kind",
     [](ServiceConfig& c, auto k, auto v) {
         const auto s = ascii_lower(v);
         if (s == "deterministic") c.embedder_kind = EmbedderKind::Deterministic;
         else if (s == "remote") c.embedder_kind = EmbedderKind::Remote;
         else throw Error(ErrorKind::InvalidConfig, std::string(k) + ": deterministic or remote");
     }},
    {"embedder.endpoint", [](ServiceConfig& c, auto, auto v) { c.embed_endpoint = v; }},
    {"embedder.model", [](ServiceConfig& c, auto, auto v) { c.embed_model = v; }},
    {"embedder.dim", [](ServiceConfig& c, auto k, auto v) { c.embed_dim = to_size(k, v); }},
    {"embedder.concurrency", [](ServiceConfig& c, auto k, auto v) { c.embed_concurrency = to_size(k, v); }},
    {"generator.kind",
     [](ServiceConfig& c, auto k, auto v) {
         const auto s = ascii_lower(v);
         if (s == "scripted") c.generator_kind = GeneratorKind::Scripted;
         else if (s == "remote") c.generator_kind = GeneratorKind::Remote;
         else throw Error(ErrorKind::InvalidConfig, std::string(k) + ": scripted or remote");
     }},
    {"generator.endpoint", [](ServiceConfig& c, auto, auto v) { c.gen_endpoint = v; }},
    {"generator.model", [](ServiceConfig& c, auto, auto v) { c.gen_model = v; }},
    {"generator.temperature", [](ServiceConfig& c, auto k, auto v) { c.temperature = to_double(k, v); }},
    {"generator.max_reply_tokens",
     [](ServiceConfig& c, auto k, auto v) { c.max_reply_tokens = static_cast<int>(to_size(k, v)); }},
    {"recommender.top_k", [](ServiceConfig& c, auto k, auto v) { c.top_k = to_size(k, v); }},
    {"recommender.token_budget", [](ServiceConfig& c, auto k, auto v) { c.token_budget = to_size(k, v); }},
    {"recommender.prompt_order",
     [](ServiceConfig& c, auto k, auto v) {
         auto order = parse_prompt_order(v);
         if (!order) {
             throw Error(ErrorKind::InvalidConfig,
                         std::string(k) + ": template_context_question or question_template_context");
         }
         c.prompt_order = *order;
     }},
    {"recommender.history_turns", [](ServiceConfig& c, auto k, auto v) { c.history_turns = to_size(k, v); }},
};

}  // namespace

void ServiceConfig::set(std::string_view key, std::string_view value) {
    for (const auto& entry : kKeys) {
        if (entry.key == key) {
            entry.set(*this, key, trim(value));
            return;
        }
    }
    throw Error(ErrorKind::InvalidConfig, "unknown config key '" + std::string(key) + "'");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& e : kKeys) out.emplace_back(e.key);
        return out;
    }();
    return keys;
}

void ServiceConfig::validate() const {
    if (token_budget < 1024) throw Error(ErrorKind::InvalidConfig, "token_budget must be >= 1024");
    if (top_k < 1) throw Error(ErrorKind::InvalidConfig, "top_k must be >= 1");
    if (embed_dim < 8 && embedder_kind == EmbedderKind::Deterministic) {
        throw Error(ErrorKind::InvalidConfig, "embedder.dim must be >= 8");
    }
    if (temperature < 0.0) throw Error(ErrorKind::InvalidConfig, "temperature must be >= 0");
    if (max_reply_tokens < 1) throw Error(ErrorKind::InvalidConfig, "max_reply_tokens must be >= 1");
    if (catalog_path.empty()) throw Error(ErrorKind::InvalidConfig, "data.catalog_path is required");
    if (!template_id.empty() && template_dir.empty()) {
        throw Error(ErrorKind::InvalidConfig, "data.template_id needs data.template_dir");
    }
    if (http_threads < 1) throw Error(ErrorKind::InvalidConfig, "server.threads must be >= 1");
    if (session_ttl_minutes < 1) throw Error(ErrorKind::InvalidConfig, "session_ttl_minutes must be >= 1");
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
    std::map<std::string, std::string> out;
    std::string section;
    std::size_t lineno = 0;
    for (const auto& raw : split_lines(text)) {
        ++lineno;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + ": bad section");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + ": expected key = value");
        }
        auto key = std::string(trim(line.substr(0, eq)));
        auto value = trim(line.substr(eq + 1));
        if (!value.empty() && value.front() == '"') {
            const auto close = value.find('"', 1);
            if (close == std::string_view::npos) {
                throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(lineno) + ": unterminated string");
            }
            value = value.substr(1, close - 1);
        } else {
            const auto hash = value.find(" #");
            if (hash != std::string_view::npos) value = trim(value.substr(0, hash));
        }
        out[section.empty() ? key : section + "." + key] = std::string(value);
    }
    return out;
}

EnvLookup process_env() {
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    };
}

std::string env_name_for(std::string_view key) {
    std::string out = "RAMO_";
    for (char c : key) {
        if (c == '.') out.push_back('_');
        else if (c >= 'a' && c <= 'z') out.push_back(static_cast<char>(c - 'a' + 'A'));
        else out.push_back(c);
    }
    return out;
}

ServiceConfig load_config(const std::optional<std::string>& path, const EnvLookup& env,
                          const std::map<std::string, std::string>& overrides) {
    ServiceConfig cfg;
    if (path) {
        std::ifstream in(*path, std::ios::binary);
        if (!in) throw Error(ErrorKind::Io, "cannot open config " + *path);
        std::ostringstream ss;
        ss << in.rdbuf();
        // Relative data paths in a file are relative to that file.
        const auto base = std::filesystem::path(*path).parent_path();
        for (const auto& [k, v] : parse_config_text(ss.str())) {
            const bool is_path = k == "data.catalog_path" || k == "data.index_path" || k == "data.template_dir";
            if (is_path && !v.empty() && std::filesystem::path(v).is_relative()) {
                cfg.set(k, (base / v).lexically_normal().string());
            } else {
                cfg.set(k, v);
            }
        }
    }
    for (const auto& key : config_keys()) {
        if (auto v = env(env_name_for(key))) cfg.set(key, *v);
    }
    for (const auto& [k, v] : overrides) cfg.set(k, v);
    if (auto v = env("EMBED_API_KEY")) cfg.embed_api_key = *v;
    if (auto v = env("GEN_API_KEY")) cfg.gen_api_key = *v;
    cfg.validate();
    return cfg;
}

std::shared_ptr<Embedder> make_embedder(const ServiceConfig& config) {
    if (config.embedder_kind == EmbedderKind::Deterministic) {
        return std::make_shared<DeterministicEmbedder>(config.embed_dim);
    }
    RemoteEmbedderConfig rc;
    rc.endpoint.url = config.embed_endpoint;
    rc.endpoint.model = config.embed_model;
    rc.endpoint.api_key = config.embed_api_key;
    rc.max_in_flight = config.embed_concurrency;
    return std::make_shared<RemoteEmbedder>(rc);
}

std::shared_ptr<Recommender> build_recommender(const ServiceConfig& config) {
    config.validate();
    auto catalog = std::make_shared<const Catalog>(load_catalog_file(config.catalog_path, config.headers));

    auto embedder = make_embedder(config);
    auto* remote_embedder = dynamic_cast<RemoteEmbedder*>(embedder.get());

    std::shared_ptr<const VectorIndex> index;
    std::error_code ec;
    if (!config.index_path.empty() && std::filesystem::exists(config.index_path, ec)) {
        auto loaded = load_index_file(config.index_path);
        if (loaded.catalog_fingerprint() != catalog->fingerprint()) {
            throw Error(ErrorKind::InvalidConfig,
                        config.index_path + " was built from a different catalog; rerun build-index");
        }
        if (loaded.embedder_name() != embedder->name()) {
            throw Error(ErrorKind::InvalidConfig, config.index_path + " was built with embedder '" +
                                                      loaded.embedder_name() + "', configured '" +
                                                      embedder->name() + "'");
        }
        if (remote_embedder) remote_embedder->expect_dim(loaded.dim());
        index = std::make_shared<const VectorIndex>(std::move(loaded));
    } else {
        spdlog::info("building index for {} courses with {}", catalog->size(), embedder->name());
        auto built = build_index(*catalog, *embedder);
        if (!config.index_path.empty()) save_index_file(built, config.index_path);
        index = std::make_shared<const VectorIndex>(std::move(built));
    }

    PromptTemplate tmpl = default_template();
    if (!config.template_dir.empty()) {
        auto templates = load_template_dir(config.template_dir);
        if (!config.template_id.empty()) {
            auto it = templates.find(config.template_id);
            if (it == templates.end()) {
                throw Error(ErrorKind::InvalidConfig, "no template '" + config.template_id + "' in " +
                                                          config.template_dir);
            }
            tmpl = it->second;
        }
    }

    std::shared_ptr<const Generator> generator;
    if (config.generator_kind == GeneratorKind::Scripted) {
        generator = std::make_shared<ScriptedGenerator>();
    } else {
        RemoteGeneratorConfig gc;
        gc.endpoint.url = config.gen_endpoint;
        gc.endpoint.model = config.gen_model;
        gc.endpoint.api_key = config.gen_api_key;
        gc.params.temperature = config.temperature;
        gc.params.max_reply_tokens = config.max_reply_tokens;
        generator = std::make_shared<RemoteGenerator>(gc);
    }

    RecommenderConfig rc;
    rc.top_k = config.top_k;
    rc.token_budget = config.token_budget;
    rc.prompt_order = config.prompt_order;
    rc.history_turns = config.history_turns;
    return std::make_shared<Recommender>(std::move(catalog), std::move(index), std::move(embedder),
                                         std::move(generator), std::move(tmpl), rc);
}

}  // namespace ramo
