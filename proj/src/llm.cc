#include "evoplan/llm.h"

#include <httplib.h>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

using namespace std;
using json = nlohmann::json;

namespace evoplan {
static const string SEARCH_MARK = "<<<<<<< SEARCH";
static const string DIVIDER_MARK = "=======";
static const string REPLACE_MARK = ">>>>>>> REPLACE";

DiffError::DiffError(int block, const string &what)
    : runtime_error(block > 0 ? "diff block " + to_string(block) + ": " + what : what),
      block_(block) {
}

static string rstrip(string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
        s.pop_back();
    return s;
}

vector<DiffBlock> parse_search_replace_blocks(const string &response) {
    enum class Mode { Outside, Search, Replace } mode = Mode::Outside;
    vector<DiffBlock> blocks;
    DiffBlock current;
    vector<string> lines;
    istringstream in(response);
    string line;
    auto join = [](const vector<string> &parts) {
        string out;
        for (size_t i = 0; i < parts.size(); ++i)
            out += (i ? "\n" : "") + parts[i];
        return out;
    };
    while (getline(in, line)) {
        string marker = rstrip(line);
        switch (mode) {
        case Mode::Outside:
            if (marker == SEARCH_MARK) {
                mode = Mode::Search;
                lines.clear();
            }
            break;
        case Mode::Search:
            if (marker == DIVIDER_MARK) {
                current.search = join(lines);
                lines.clear();
                mode = Mode::Replace;
            } else {
                lines.push_back(line);
            }
            break;
        case Mode::Replace:
            if (marker == REPLACE_MARK) {
                current.replace = join(lines);
                blocks.push_back(current);
                mode = Mode::Outside;
            } else {
                lines.push_back(line);
            }
            break;
        }
    }
    if (mode != Mode::Outside)
        throw DiffError(static_cast<int>(blocks.size()) + 1, "unterminated block");
    return blocks;
}

string apply_search_replace_diff(const string &source, const string &response) {
    vector<DiffBlock> blocks = parse_search_replace_blocks(response);
    if (blocks.empty())
        throw DiffError(0, "response contains no SEARCH/REPLACE blocks");
    string text = source;
    for (size_t i = 0; i < blocks.size(); ++i) {
        int index = static_cast<int>(i) + 1;
        const DiffBlock &block = blocks[i];
        if (block.search.empty())
            throw DiffError(index, "empty SEARCH section");
        size_t pos = text.find(block.search);
        if (pos == string::npos)
            throw DiffError(index, "SEARCH text not found in the current program");
        if (text.find(block.search, pos + 1) != string::npos)
            throw DiffError(index, "SEARCH text matches more than once");
        text.replace(pos, block.search.size(), block.replace);
    }
    return text;
}

static bool is_identifier(const string &s) {
    if (s.empty() || !(isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (char c : s) {
        if (!(isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    }
    return true;
}

string fill_template(const string &tmpl, const map<string, string> &values) {
    string out;
    size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            size_t close = tmpl.find('}', i + 1);
            if (close != string::npos) {
                string name = tmpl.substr(i + 1, close - i - 1);
                if (is_identifier(name)) {
                    auto it = values.find(name);
                    if (it == values.end())
                        throw PromptError("no value for template placeholder {" + name + "}");
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

vector<string> find_placeholders(const string &text) {
    vector<string> names;
    size_t i = 0;
    while ((i = text.find('{', i)) != string::npos) {
        size_t close = text.find('}', i + 1);
        if (close == string::npos)
            break;
        string name = text.substr(i + 1, close - i - 1);
        if (is_identifier(name))
            names.push_back(name);
        i = i + 1;
    }
    return names;
}

static string read_text(const string &path) {
    ifstream in(path);
    if (!in)
        throw PromptError("missing prompt template '" + path + "'");
    stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

PromptTemplates PromptTemplates::load(const string &dir) {
    PromptTemplates t;
    t.system = read_text(dir + "/system.txt");
    t.diff_user = read_text(dir + "/diff_user.txt");
    t.history = read_text(dir + "/history.txt");
    t.repair = read_text(dir + "/repair.txt");
    return t;
}

static const char *LANGUAGE = "expr";

static string fmt(double v) {
    ostringstream out;
    out << setprecision(6) << v;
    return out.str();
}

static string coords(const Individual &ind) {
    if (!ind.features)
        return "not evaluated";
    return "evals=" + fmt((*ind.features)[0]) + ", speed=" + fmt((*ind.features)[1]);
}

static string program_text(const Genome &genome) {
    return genome.kind == Genome::Kind::Source ? genome.source : genome.describe();
}

static string improvement_areas(const Individual &parent) {
    vector<string> notes;
    if (!parent.score || *parent.score < 1.0)
        notes.push_back("- Solve more training tasks, and solve them sooner.");
    if (parent.features && (*parent.features)[0] > 1.0)
        notes.push_back("- The program needs more state evaluations than FF; make it more "
                        "informative.");
    if (parent.features && (*parent.features)[1] > 0)
        notes.push_back("- Cheaper features raise evaluations per second.");
    if (notes.empty())
        notes.push_back("- Keep the score while exploring different feature combinations.");
    string out;
    for (const auto &n : notes)
        out += n + "\n";
    return out;
}

PromptBundle assemble_generation_prompt(const Individual &parent,
                                        const vector<Individual> &inspirations,
                                        const PromptTemplates &templates) {
    string entries;
    for (size_t i = 0; i < inspirations.size(); ++i) {
        const Individual &ind = inspirations[i];
        entries += "### Program " + to_string(i + 1) + " (score " +
                   (ind.score ? fmt(*ind.score) : string("n/a")) + "; " + coords(ind) + ")\n```" +
                   LANGUAGE + "\n" + program_text(ind.genome) + "\n```\n\n";
    }
    string history = fill_template(templates.history, {{"top_programs", entries}});
    map<string, string> values = {
        {"fitness_score", parent.score ? fmt(*parent.score) : string("n/a")},
        {"feature_coords", coords(parent)},
        {"feature_dimensions", "evals (lower is better), speed (higher is better)"},
        {"improvement_areas", improvement_areas(parent)},
        {"artifacts", "None"},
        {"evolution_history", history},
        {"language", LANGUAGE},
        {"current_program", program_text(parent.genome)},
    };
    PromptBundle bundle;
    bundle.system = fill_template(templates.system, {});
    bundle.user = fill_template(templates.diff_user, values);
    return bundle;
}

PromptBundle assemble_repair_prompt(const Genome &broken, const string &diagnostic,
                                    const PromptTemplates &templates) {
    map<string, string> values = {
        {"error_message", diagnostic},
        {"repair_context",
         "The program failed its smoke check: it is built and evaluated on a one-variable "
         "task before any benchmark run."},
        {"broken_code", program_text(broken)},
        {"language", LANGUAGE},
    };
    PromptBundle bundle;
    bundle.system = fill_template(templates.system, {});
    bundle.user = fill_template(templates.repair, values);
    return bundle;
}

static vector<Endpoint> parse_endpoints(const json &list, const string &role,
                                        vector<string> &problems) {
    vector<Endpoint> endpoints;
    if (!list.is_array() || list.empty()) {
        problems.push_back(role + " pool must be a nonempty list");
        return endpoints;
    }
    for (size_t i = 0; i < list.size(); ++i) {
        const json &e = list[i];
        string where = role + "[" + to_string(i) + "]";
        if (!e.is_object()) {
            problems.push_back(where + " must be an object");
            continue;
        }
        Endpoint ep;
        if (!e.contains("base_url") || !e["base_url"].is_string())
            problems.push_back(where + ".base_url is required");
        else
            ep.base_url = e["base_url"];
        if (!e.contains("model") || !e["model"].is_string())
            problems.push_back(where + ".model is required");
        else
            ep.model = e["model"];
        if (e.contains("api_key_env")) {
            if (!e["api_key_env"].is_string())
                problems.push_back(where + ".api_key_env must be a string");
            else
                ep.api_key_env = e["api_key_env"];
        }
        if (e.contains("api_key"))
            problems.push_back(where + ".api_key is not accepted; use api_key_env");
        if (e.contains("timeout_s")) {
            if (!e["timeout_s"].is_number() || e["timeout_s"].get<double>() <= 0)
                problems.push_back(where + ".timeout_s must be a positive number");
            else
                ep.timeout_s = e["timeout_s"];
        }
        endpoints.push_back(ep);
    }
    return endpoints;
}

ModelPool ModelPool::from_json(const json &j) {
    vector<string> problems;
    ModelPool pool;
    if (!j.is_object()) {
        throw invalid_argument("model pool must be an object");
    }
    pool.generation = parse_endpoints(j.value("generation", json()), "generation", problems);
    pool.repair = parse_endpoints(j.value("repair", json()), "repair", problems);
    if (!problems.empty()) {
        string msg = "invalid model pool:";
        for (const auto &p : problems)
            msg += "\n  " + p;
        throw invalid_argument(msg);
    }
    return pool;
}

void check_credentials(const ModelPool &pool) {
    for (const auto *list : {&pool.generation, &pool.repair}) {
        for (const auto &ep : *list) {
            if (ep.api_key_env.empty())
                continue;
            const char *value = getenv(ep.api_key_env.c_str());
            if (!value || !*value)
                throw ConfigError("credential environment variable '" + ep.api_key_env +
                                  "' is not set");
        }
    }
}

string redact(string text, const vector<string> &secrets) {
    static const string MASK = "[REDACTED]";
    for (const auto &secret : secrets) {
        if (secret.empty())
            continue;
        size_t pos = 0;
        while ((pos = text.find(secret, pos)) != string::npos) {
            text.replace(pos, secret.size(), MASK);
            pos += MASK.size();
        }
    }
    return text;
}

json chat_request_body(const Endpoint &endpoint, const PromptBundle &prompt) {
    return json{{"model", endpoint.model},
                {"messages",
                 json::array({{{"role", "system"}, {"content", prompt.system}},
                              {{"role", "user"}, {"content", prompt.user}}})}};
}

string chat_response_content(const string &body) {
    try {
        json j = json::parse(body);
        const json &content = j.at("choices").at(0).at("message").at("content");
        if (!content.is_string())
            throw TransportError("response content is not text");
        return content.get<string>();
    } catch (const json::exception &e) {
        throw TransportError(string("malformed chat response: ") + e.what());
    }
}

string HttpChatTransport::complete(const Endpoint &endpoint, const PromptBundle &prompt) {
    string url = endpoint.base_url;
    size_t scheme_end = url.find("://");
    size_t path_start = url.find('/', scheme_end == string::npos ? 0 : scheme_end + 3);
    string origin = path_start == string::npos ? url : url.substr(0, path_start);
    string path = path_start == string::npos ? "" : url.substr(path_start);
    while (!path.empty() && path.back() == '/')
        path.pop_back();
    path += "/chat/completions";

    httplib::Client client(origin);
    if (!client.is_valid())
        throw TransportError("invalid endpoint URL '" + endpoint.base_url + "'");
    auto seconds = static_cast<time_t>(endpoint.timeout_s);
    auto micros = static_cast<time_t>((endpoint.timeout_s - seconds) * 1e6);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    httplib::Headers headers;
    if (!endpoint.api_key_env.empty()) {
        const char *key = getenv(endpoint.api_key_env.c_str());
        if (!key || !*key)
            throw TransportError("credential environment variable '" + endpoint.api_key_env +
                                 "' is not set");
        headers.emplace("Authorization", string("Bearer ") + key);
    }
    auto res = client.Post(path, headers, chat_request_body(endpoint, prompt).dump(),
                           "application/json");
    if (!res)
        throw TransportError("request to " + origin + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200)
        throw TransportError("endpoint returned HTTP " + to_string(res->status));
    return chat_response_content(res->body);
}

void StubChatTransport::push_response(string text) {
    lock_guard<mutex> lock(mutex_);
    queue_.push_back({false, move(text)});
}

void StubChatTransport::push_failure(string message) {
    lock_guard<mutex> lock(mutex_);
    queue_.push_back({true, move(message)});
}

void StubChatTransport::set_default_response(string text) {
    lock_guard<mutex> lock(mutex_);
    default_ = move(text);
}

string StubChatTransport::complete(const Endpoint &endpoint, const PromptBundle &prompt) {
    lock_guard<mutex> lock(mutex_);
    calls_.push_back({endpoint, prompt});
    if (queue_.empty()) {
        if (default_)
            return *default_;
        throw TransportError("stub transport has no recorded response");
    }
    Reply reply = move(queue_.front());
    queue_.pop_front();
    if (reply.failure)
        throw TransportError(reply.text);
    return reply.text;
}

vector<StubChatTransport::Call> StubChatTransport::calls() const {
    lock_guard<mutex> lock(mutex_);
    return calls_;
}

size_t StubChatTransport::num_calls() const {
    lock_guard<mutex> lock(mutex_);
    return calls_.size();
}

LlmMutator::LlmMutator(ModelPool pool, PromptTemplates templates, ChatTransport &transport,
                       uint64_t seed, LlmMutatorOptions options)
    : pool_(move(pool)), templates_(move(templates)), transport_(transport), rng_(seed),
      options_(options) {
    if (pool_.generation.empty() || pool_.repair.empty())
        throw ConfigError("generation and repair pools must be nonempty");
    check_credentials(pool_);
    for (const auto *list : {&pool_.generation, &pool_.repair}) {
        for (const auto &ep : *list) {
            if (!ep.api_key_env.empty())
                secrets_.push_back(getenv(ep.api_key_env.c_str()));
        }
    }
}

string LlmMutator::clip(const string &text) const {
    string out = redact(text, secrets_);
    if (out.size() > options_.max_diagnostic_chars)
        out = out.substr(0, options_.max_diagnostic_chars) + "...";
    return out;
}

string LlmMutator::call(const vector<Endpoint> &pool, const PromptBundle &prompt) {
    string last_error;
    for (int attempt = 0; attempt <= options_.transport_retries; ++attempt) {
        uniform_int_distribution<size_t> pick(0, pool.size() - 1);
        const Endpoint &endpoint = pool[pick(rng_)];
        try {
            return transport_.complete(endpoint, prompt);
        } catch (const TransportError &e) {
            last_error = e.what();
        }
    }
    throw MutatorError("transport failed after " + to_string(options_.transport_retries + 1) +
                       " attempts: " + clip(last_error));
}

Genome LlmMutator::propose(const Individual &parent, const vector<Individual> &inspirations) {
    if (parent.genome.kind != Genome::Kind::Source)
        throw MutatorError("LLM mutator needs a source genome");
    PromptBundle prompt = assemble_generation_prompt(parent, inspirations, templates_);
    string reply = call(pool_.generation, prompt);
    try {
        return Genome::from_source(apply_search_replace_diff(parent.genome.source, reply));
    } catch (const DiffError &e) {
        throw MutatorError(clip(string(e.what()) + "\nresponse:\n" + reply));
    }
}

// Contents of the last ``` fenced block, or nullopt.
static optional<string> last_code_block(const string &text) {
    optional<string> result;
    size_t pos = 0;
    while (true) {
        size_t open = text.find("```", pos);
        if (open == string::npos)
            break;
        size_t body = text.find('\n', open);
        if (body == string::npos)
            break;
        size_t close = text.find("```", body + 1);
        if (close == string::npos)
            break;
        string code = text.substr(body + 1, close - body - 1);
        while (!code.empty() && code.back() == '\n')
            code.pop_back();
        result = code;
        pos = close + 3;
    }
    return result;
}

Genome LlmMutator::repair(const Genome &broken, const string &diagnostic) {
    if (broken.kind != Genome::Kind::Source)
        throw MutatorError("LLM mutator needs a source genome");
    PromptBundle prompt = assemble_repair_prompt(broken, redact(diagnostic, secrets_), templates_);
    string reply = call(pool_.repair, prompt);
    try {
        if (!parse_search_replace_blocks(reply).empty())
            return Genome::from_source(apply_search_replace_diff(broken.source, reply));
    } catch (const DiffError &e) {
        throw MutatorError(clip(string(e.what()) + "\nresponse:\n" + reply));
    }
    if (auto code = last_code_block(reply))
        return Genome::from_source(*code);
    throw MutatorError(clip("response contains neither a diff nor a code block\nresponse:\n" +
                            reply));
}
}  // namespace evoplan
