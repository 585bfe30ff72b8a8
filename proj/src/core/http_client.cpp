#include <applan/agent.hpp>

#include <httplib.h>
#include <json.hpp>

#include <cstdlib>

namespace applan {

using nlohmann::json;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

struct Url {
    std::string base;  // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& url) {
    const std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint must be an absolute http(s) URL: " + url);
    const std::size_t slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

HttpClientConfig HttpClientConfig::from_env() {
    HttpClientConfig c;
    c.endpoint = env_or("APPLAN_LLM_ENDPOINT", "");
    c.model = env_or("APPLAN_LLM_MODEL", "");
    c.api_key = env_or("APPLAN_LLM_API_KEY", "");
    return c;
}

HttpChatClient::HttpChatClient(HttpClientConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.endpoint.empty()) throw ConfigError("no chat endpoint configured (APPLAN_LLM_ENDPOINT)");
    if (cfg_.model.empty()) throw ConfigError("no model configured (APPLAN_LLM_MODEL)");
    if (!(cfg_.timeout_s > 0.0)) throw ConfigError("timeout must be positive");
    split_url(cfg_.endpoint);
}

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages) {
    const Url url = split_url(cfg_.endpoint);
    json body = {{"model", cfg_.model}, {"temperature", cfg_.temperature}, {"messages", json::array()}};
    for (const ChatMessage& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    const std::string payload = body.dump();

    httplib::Client cli(url.base);
    const auto secs = static_cast<time_t>(cfg_.timeout_s);
    const auto usecs = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
    if (log_) log_(redact("POST " + cfg_.endpoint + "\n" + payload, cfg_.api_key));

    auto res = cli.Post(url.path, headers, payload, "application/json");
    if (!res) throw TransportError("request failed: " + httplib::to_string(res.error()));
    if (log_) log_(redact("HTTP " + std::to_string(res->status) + "\n" + res->body, cfg_.api_key));
    if (res->status < 200 || res->status >= 300)
        throw TransportError("HTTP status " + std::to_string(res->status));
    try {
        const json doc = json::parse(res->body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw TransportError(std::string("unexpected response body: ") + e.what());
    }
}

}  // namespace applan
