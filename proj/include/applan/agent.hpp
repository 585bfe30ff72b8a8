#pragma once

#include <applan/metrics.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace applan {

struct ChatMessage {
    std::string role;
    std::string content;
};

class TransportError : public Error {
public:
    using Error::Error;
};

class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
    virtual std::string model() const = 0;
};

// Plays back a scripted sequence; the last entry repeats once the script is
// exhausted. An entry with an error message raises TransportError instead.
class MockChatClient : public ChatClient {
public:
    struct Entry {
        std::string text;
        std::optional<std::string> error;
    };

    explicit MockChatClient(std::vector<Entry> script, std::string model = "mock");
    // {"model": "...", "responses": ["text", {"error": "..."}, ...]}
    static MockChatClient from_json(const std::string& text);
    static MockChatClient from_file(const std::string& path);

    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string model() const override { return model_; }
    std::size_t calls() const { return next_; }

private:
    std::vector<Entry> script_;
    std::string model_;
    std::size_t next_ = 0;
};

struct HttpClientConfig {
    std::string endpoint;  // full URL of an OpenAI-style chat/completions route
    std::string model;
    std::string api_key;
    double timeout_s = 60.0;
    double temperature = 0.0;

    // APPLAN_LLM_ENDPOINT, APPLAN_LLM_MODEL, APPLAN_LLM_API_KEY
    static HttpClientConfig from_env();
};

class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(HttpClientConfig cfg);
    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string model() const override { return cfg_.model; }
    // Receives request and response bodies with the key redacted.
    void set_logger(std::function<void(const std::string&)> log) { log_ = std::move(log); }

private:
    HttpClientConfig cfg_;
    std::function<void(const std::string&)> log_;
};

std::string redact(std::string text, const std::string& secret);

struct AgentConfig {
    std::size_t max_iters = 10;
    bool stop_on_target = true;
    std::size_t max_parse_failures = 3;
    std::size_t map_summary_max = 40;
    RadioConfig radio;
    std::string transcript_path;  // JSON lines; empty keeps it in memory only

    void validate() const;
};

struct HistoryEntry {
    std::size_t iteration = 0;
    Deployment proposed;
    Deployment deployment;  // after repair
    bool repaired = false;
    EvalResult eval;
    std::string feedback;
};

class DeploymentHistory {
public:
    void append(HistoryEntry e);
    const std::vector<HistoryEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    // Highest-coverage entry among those with no separation or boundary
    // violation (any entry if none qualifies); earliest wins ties.
    std::optional<std::size_t> best_index() const { return best_; }
    const HistoryEntry& best() const;

private:
    std::vector<HistoryEntry> entries_;
    std::optional<std::size_t> best_;
};

std::string grid_codes(const FloorPlan& fp);
std::string build_init_prompt(const FloorPlan& fp, const TaskSpec& task, const AgentConfig& cfg);
std::string constraint_summary(const EvalResult& r, const TaskSpec& task);
// Downsampled coverage grid: 4 not covered, 5 covered, 1/2/3 for blocks without free space.
std::string coverage_map_summary(const FloorPlan& fp, const RadioMap& map, std::size_t max_dim = 40);
std::string build_refine_prompt(const DeploymentHistory& history, const std::string& map_summary,
                                const TaskSpec& task);

// First [[...], ...] block in the text; exactly n triples of finite numbers.
Deployment parse_deployment(const std::string& text, std::size_t n);

// Clamp z into bounds and move infeasible APs to the nearest free cell center.
Deployment repair_deployment(const FloorPlan& fp, const Deployment& p, bool* changed = nullptr);

struct AgentResult {
    Deployment best;
    DeploymentHistory history;
    std::vector<std::string> transcript;
    std::size_t iterations = 0;
    bool reached_target = false;
};

class AgentAborted : public Error {
public:
    AgentAborted(const std::string& what, AgentResult partial) : Error(what), partial_(std::move(partial)) {}
    const AgentResult& partial() const { return partial_; }

private:
    AgentResult partial_;
};

AgentResult run_agent_loop(ChatClient& client, const FloorPlan& fp, const TaskSpec& task, const AgentConfig& cfg);

}  // namespace applan
