#pragma once

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "toolchain/errors.hpp"
#include "toolchain/proposer.hpp"
#include "toolchain/task.hpp"

namespace toolchain {

/// Live chat-completions backend configuration. Endpoint, model, and key come
/// from the environment so credentials never land in config files.
/// Plain http works out of the box; https requires building with
/// CPPHTTPLIB_OPENSSL_SUPPORT.
struct HttpBackendConfig {
    std::string base_url;  // e.g. "http://localhost:8080" or an https endpoint
    std::string model;
    std::string api_key;
    std::string path = "/v1/chat/completions";
    double temperature = 1.0;
    int max_retries = 3;              // additional attempts after the first
    double backoff_base_seconds = 0.5;
    int timeout_seconds = 60;
    std::uint64_t call_budget = 0;  // 0 = unlimited
    std::string tool_docs;
    std::string demonstrations;

    static constexpr const char* kUrlVar = "TOOLCHAIN_LLM_URL";
    static constexpr const char* kModelVar = "TOOLCHAIN_LLM_MODEL";
    static constexpr const char* kKeyVar = "TOOLCHAIN_LLM_KEY";

    static HttpBackendConfig from_env() {
        HttpBackendConfig cfg;
        const char* url = std::getenv(kUrlVar);
        const char* model = std::getenv(kModelVar);
        const char* key = std::getenv(kKeyVar);
        if (!url || !*url)
            throw BackendUnavailable(std::string(kUrlVar) + " is not set");
        if (!model || !*model)
            throw BackendUnavailable(std::string(kModelVar) + " is not set");
        cfg.base_url = url;
        cfg.model = model;
        if (key) cfg.api_key = key;
        return cfg;
    }
};

/// OpenAI-style chat-completions client. One request carries n completions,
/// so one expansion or one imagination costs exactly one call against the
/// budget regardless of k.
class HttpBackend final : public ProposerBackend {
public:
    HttpBackend(HttpBackendConfig cfg, ProposerConfig prop)
        : cfg_(std::move(cfg)), prop_(std::move(prop)) {}

    std::vector<std::string> sample_next(const TaskSpec& task,
                                         const std::vector<ActionRecord>& history,
                                         int k) override {
        auto out = complete(render_prompt(task, history), k);
        out.resize(static_cast<std::size_t>(k));  // short responses pad to parse failures
        return out;
    }

    std::vector<std::string> imagine(const TaskSpec& task,
                                     const std::vector<ActionRecord>& history) override {
        const std::string prompt =
            render_prompt(task, history) +
            "\nList the remaining actions, one per line, ending with " + prop_.finish_token +
            "(...).";
        const auto completions = complete(prompt, 1);
        std::vector<std::string> steps;
        if (completions.empty()) return steps;
        for (std::string line : split_lines(completions.front())) {
            strip_enumeration(line);
            if (!line.empty()) steps.push_back(line);
        }
        return steps;
    }

    std::uint64_t calls() const override { return calls_; }

private:
    std::string render_prompt(const TaskSpec& task,
                              const std::vector<ActionRecord>& history) const {
        std::string history_text;
        for (const ActionRecord& a : history) {
            history_text += a.raw_text;
            history_text.push_back('\n');
        }
        std::string prompt = prop_.prompt_template;
        replace_all(prompt, "{tool_docs}", cfg_.tool_docs);
        replace_all(prompt, "{demonstrations}", cfg_.demonstrations);
        replace_all(prompt, "{task}", task.description);
        replace_all(prompt, "{history}", history_text);
        return prompt;
    }

    std::vector<std::string> complete(const std::string& prompt, int n) {
        if (cfg_.call_budget && calls_ >= cfg_.call_budget)
            throw BudgetExceeded("backend call budget of " + std::to_string(cfg_.call_budget) +
                                 " exhausted");

        nlohmann::ordered_json body;
        body["model"] = cfg_.model;
        body["messages"] = nlohmann::ordered_json::array(
            {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}});
        body["temperature"] = cfg_.temperature;
        body["n"] = n;
        const std::string payload = body.dump();

        httplib::Client client(cfg_.base_url);
        client.set_connection_timeout(cfg_.timeout_seconds);
        client.set_read_timeout(cfg_.timeout_seconds);
        httplib::Headers headers;
        if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

        int last_status = 0;
        std::string last_body;
        for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
            if (attempt > 0) {
                const double delay = cfg_.backoff_base_seconds * std::pow(2.0, attempt - 1);
                std::this_thread::sleep_for(std::chrono::duration<double>(delay));
            }
            auto res = client.Post(cfg_.path, headers, payload, "application/json");
            if (!res) {
                last_status = 0;
                continue;  // transport failure, retry
            }
            last_status = res->status;
            last_body = res->body;
            if (res->status == 429 || res->status >= 500) continue;  // retryable
            if (res->status != 200)
                throw HttpStatusError(res->status, excerpt(res->body));
            ++calls_;
            return parse_choices(res->body);
        }
        if (last_status != 0) throw HttpStatusError(last_status, excerpt(last_body));
        throw BackendUnavailable("cannot reach " + cfg_.base_url + cfg_.path + " after " +
                                 std::to_string(cfg_.max_retries + 1) + " attempts");
    }

    static std::vector<std::string> parse_choices(const std::string& body) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& ex) {
            throw BackendUnavailable(std::string("malformed completion response: ") + ex.what());
        }
        std::vector<std::string> out;
        for (const auto& choice : j.at("choices"))
            out.push_back(choice.at("message").at("content").get<std::string>());
        return out;
    }

    static void replace_all(std::string& text, std::string_view slot, std::string_view value) {
        std::size_t pos = 0;
        while ((pos = text.find(slot, pos)) != std::string::npos) {
            text.replace(pos, slot.size(), value);
            pos += value.size();
        }
    }

    static std::vector<std::string> split_lines(const std::string& text) {
        std::vector<std::string> lines;
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else if (c != '\r') {
                cur.push_back(c);
            }
        }
        lines.push_back(cur);
        return lines;
    }

    /// Drop "3. " / "2) " style list markers from imagined steps.
    static void strip_enumeration(std::string& line) {
        std::size_t i = line.find_first_not_of(" \t");
        if (i == std::string::npos) {
            line.clear();
            return;
        }
        std::size_t j = i;
        while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i && j < line.size() && (line[j] == '.' || line[j] == ')')) ++j;
        while (j < line.size() && line[j] == ' ') ++j;
        line = line.substr(j > i ? j : i);
        const std::size_t end = line.find_last_not_of(" \t");
        line = end == std::string::npos ? "" : line.substr(0, end + 1);
    }

    static std::string excerpt(const std::string& body) {
        return body.size() <= 200 ? body : body.substr(0, 200) + "...";
    }

    HttpBackendConfig cfg_;
    ProposerConfig prop_;
    std::uint64_t calls_ = 0;
};

}  // namespace toolchain
