// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ramo/catalog.hpp"
#include "ramo/prompting.hpp"

namespace ramo {

class Recommender;

enum class EmbedderKind { Deterministic, Remote };
enum class GeneratorKind { Scripted, Remote };

struct ServiceConfig {
    // [server]
    std::string listen_address = "127.0.0.1:8080";
    std::vector<std::string> cors_allowed_origins;
    std::size_t session_ttl_minutes = 60;
    std::size_t http_threads = 16;

    // [data]
    std::string catalog_path = "fixtures/mini_catalog.csv";
    std::string index_path;  // empty: build in memory at startup
    std::string template_dir;
    std::string template_id;  // empty: the built-in template
    HeaderMap headers;

    // [embedder]
    EmbedderKind embedder_kind = EmbedderKind::Deterministic;
    std::string embed_endpoint = "https://api.openai.com/v1/embeddings";
    std::string embed_model = "text-embedding-ada-002";
    std::size_t embed_dim = 256;
    std::size_t embed_concurrency = 4;

    // [generator]
    GeneratorKind generator_kind = GeneratorKind::Scripted;
    std::string gen_endpoint = "https://api.openai.com/v1/chat/completions";
    std::string gen_model = "gpt-3.5-turbo";
    double temperature = 0.0;
    int max_reply_tokens = 512;

    // [recommender]
    std::size_t top_k = 8;
    std::size_t token_budget = kDefaultTokenBudget;
    PromptOrder prompt_order = PromptOrder::TemplateContextQuestion;
    std::size_t history_turns = 0;

    // Credentials come from the environment only.
    std::string embed_api_key;
    std::string gen_api_key;

    /// Throws InvalidConfig (token_budget >= 1024, top_k >= 1, ...).
    void validate() const;

    /// Applies one "section.key" setting. Throws InvalidConfig on an unknown
    /// key or an unparsable value.
    void set(std::string_view key, std::string_view value);
};

/// "[section]" headers and "key = value" lines; '#' and ';' start comments;
/// values may be double-quoted. Keys come back as "section.key".
std::map<std::string, std::string> parse_config_text(std::string_view text);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

/// "data.catalog_path" -> "RAMO_DATA_CATALOG_PATH".
std::string env_name_for(std::string_view key);

/// Layers, lowest precedence first: defaults, config file, RAMO_* variables,
/// then `overrides` (command-line flags). Relative data.* paths in the file
/// resolve against the file's directory. EMBED_API_KEY and GEN_API_KEY are
/// read from the environment.
ServiceConfig load_config(const std::optional<std::string>& path, const EnvLookup& env,
                          const std::map<std::string, std::string>& overrides = {});

/// Every key ServiceConfig::set accepts.
const std::vector<std::string>& config_keys();

class Embedder;

/// The embedder named by the [embedder] section.
std::shared_ptr<Embedder> make_embedder(const ServiceConfig& config);

/// Loads catalog, index, template and providers described by the config.
/// A saved index is used when index_path exists and matches the catalog
/// fingerprint and embedder; otherwise the index is built in memory.
std::shared_ptr<Recommender> build_recommender(const ServiceConfig& config);

}  // namespace ramo
