#pragma once

#include "evoplan/genome.h"

#include <json.hpp>

#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace evoplan {

class DiffError : public std::runtime_error {
public:
    // block is 1-based; 0 when the response has no blocks at all.
    DiffError(int block, const std::string &what);
    int block() const { return block_; }

private:
    int block_;
};

struct DiffBlock {
    std::string search;
    std::string replace;
};

// Extracts "<<<<<<< SEARCH / ======= / >>>>>>> REPLACE" blocks. Text outside
// blocks (including code fences) is ignored. Throws DiffError on an
// unterminated block.
std::vector<DiffBlock> parse_search_replace_blocks(const std::string &response);

// Applies blocks in order, each against the result of the previous one.
// Each SEARCH text must occur exactly once. Throws DiffError.
std::string apply_search_replace_diff(const std::string &source, const std::string &response);

class PromptError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Replaces every "{name}" with values.at(name) in a single pass. Inserted
// values are not rescanned. Throws PromptError for placeholders without a
// value.
std::string fill_template(const std::string &tmpl, const std::map<std::string, std::string> &values);

// Placeholder names "{identifier}" still present in text.
std::vector<std::string> find_placeholders(const std::string &text);

struct PromptTemplates {
    std::string system;
    std::string diff_user;
    std::string history;
    std::string repair;

    // Reads system.txt, diff_user.txt, history.txt and repair.txt from dir.
    // Throws PromptError naming the missing file.
    static PromptTemplates load(const std::string &dir);
};

struct PromptBundle {
    std::string system;
    std::string user;
};

PromptBundle assemble_generation_prompt(const Individual &parent,
                                        const std::vector<Individual> &inspirations,
                                        const PromptTemplates &templates);

PromptBundle assemble_repair_prompt(const Genome &broken, const std::string &diagnostic,
                                    const PromptTemplates &templates);

struct Endpoint {
    std::string base_url;
    std::string model;
    // Name of the environment variable holding the API key; empty for none.
    std::string api_key_env;
    double timeout_s = 120;
};

struct ModelPool {
    std::vector<Endpoint> generation;
    std::vector<Endpoint> repair;

    // Throws std::invalid_argument listing every problem.
    static ModelPool from_json(const nlohmann::json &j);
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Verifies every referenced credential variable is set and nonempty.
void check_credentials(const ModelPool &pool);

// Replaces every occurrence of each nonempty secret with "[REDACTED]".
std::string redact(std::string text, const std::vector<std::string> &secrets);

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    // Returns the assistant message text. Throws TransportError.
    virtual std::string complete(const Endpoint &endpoint, const PromptBundle &prompt) = 0;
};

// Chat-completions request body: model plus system and user messages.
nlohmann::json chat_request_body(const Endpoint &endpoint, const PromptBundle &prompt);
// Reads choices[0].message.content; throws TransportError otherwise.
std::string chat_response_content(const std::string &body);

// POST {base_url}/chat/completions with a bearer token read from the
// endpoint's environment variable at call time.
class HttpChatTransport : public ChatTransport {
public:
    std::string complete(const Endpoint &endpoint, const PromptBundle &prompt) override;
};

// Replays queued responses in order and records every call. Thread safe.
class StubChatTransport : public ChatTransport {
public:
    struct Call {
        Endpoint endpoint;
        PromptBundle prompt;
    };

    void push_response(std::string text);
    // The next call throws TransportError(message).
    void push_failure(std::string message);
    // Used once the queue is empty; without it an empty queue is a failure.
    void set_default_response(std::string text);

    std::string complete(const Endpoint &endpoint, const PromptBundle &prompt) override;
    std::vector<Call> calls() const;
    std::size_t num_calls() const;

private:
    struct Reply {
        bool failure;
        std::string text;
    };
    mutable std::mutex mutex_;
    std::deque<Reply> queue_;
    std::optional<std::string> default_;
    std::vector<Call> calls_;
};

struct LlmMutatorOptions {
    // Extra attempts after a transport failure, per propose/repair call.
    int transport_retries = 2;
    // Raw response text kept in failure diagnostics.
    std::size_t max_diagnostic_chars = 2000;
};

// Mutator over source genomes. propose() sends the generation prompt to a
// uniformly drawn generation endpoint and applies the returned diff to the
// parent. repair() sends the repair prompt to a repair endpoint; a diff in
// the reply is applied to the broken source, otherwise the last fenced code
// block is taken as the whole program. Diagnostics never contain
// credential values.
class LlmMutator : public Mutator {
public:
    LlmMutator(ModelPool pool, PromptTemplates templates, ChatTransport &transport,
               std::uint64_t seed, LlmMutatorOptions options = {});

    std::string name() const override { return "llm"; }
    Genome propose(const Individual &parent,
                   const std::vector<Individual> &inspirations) override;
    Genome repair(const Genome &broken, const std::string &diagnostic) override;

private:
    std::string call(const std::vector<Endpoint> &pool, const PromptBundle &prompt);
    std::string clip(const std::string &text) const;

    ModelPool pool_;
    PromptTemplates templates_;
    ChatTransport &transport_;
    std::mt19937_64 rng_;
    LlmMutatorOptions options_;
    std::vector<std::string> secrets_;
};

}  // namespace evoplan
