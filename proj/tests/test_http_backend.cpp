#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "toolchain/http_backend.hpp"

using namespace toolchain;

namespace {

/// Local chat-completions stub. Each request returns n echo completions;
/// configurable failure budget for retry tests.
class StubServer {
public:
    StubServer() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
            ++requests_;
            if (fail_first_ > 0) {
                --fail_first_;
                res.status = fail_status_;
                res.set_content("overloaded", "text/plain");
                return;
            }
            const auto body = nlohmann::json::parse(req.body);
            last_model_ = body.at("model").get<std::string>();
            last_n_ = body.value("n", 1);
            last_temperature_ = body.value("temperature", 0.0);
            nlohmann::json out;
            auto& choices = out["choices"] = nlohmann::json::array();
            for (int i = 0; i < last_n_; ++i) {
                choices.push_back(
                    {{"message",
                      {{"role", "assistant"}, {"content", "act_" + std::to_string(i) + "()"}}}});
            }
            res.set_content(out.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this]() { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~StubServer() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    void fail_next(int count, int status) {
        fail_first_ = count;
        fail_status_ = status;
    }
    int requests() const { return requests_; }
    int last_n() const { return last_n_; }
    std::string last_model() const { return last_model_; }
    double last_temperature() const { return last_temperature_; }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> requests_{0};
    std::atomic<int> fail_first_{0};
    std::atomic<int> fail_status_{429};
    std::string last_model_;
    int last_n_ = 0;
    double last_temperature_ = 0.0;
};

HttpBackendConfig config_for(const StubServer& server) {
    HttpBackendConfig cfg;
    cfg.base_url = server.url();
    cfg.model = "test-model";
    cfg.api_key = "sk-test";
    cfg.max_retries = 2;
    cfg.backoff_base_seconds = 0.01;
    return cfg;
}

}  // namespace

TEST_CASE("one request carries all k completions and counts one call") {
    StubServer server;
    HttpBackend backend(config_for(server), ProposerConfig{});
    const auto samples = backend.sample_next(TaskSpec{}, {}, 10);
    REQUIRE(samples.size() == 10);
    CHECK(samples[0] == "act_0()");
    CHECK(backend.calls() == 1);
    CHECK(server.requests() == 1);
    CHECK(server.last_n() == 10);
    CHECK(server.last_model() == "test-model");
    CHECK(server.last_temperature() == doctest::Approx(1.0));
}

TEST_CASE("429 responses are retried with backoff until they clear") {
    StubServer server;
    server.fail_next(2, 429);
    HttpBackend backend(config_for(server), ProposerConfig{});
    const auto samples = backend.sample_next(TaskSpec{}, {}, 3);
    CHECK(samples.size() == 3);
    CHECK(server.requests() == 3);  // two failures plus the success
    CHECK(backend.calls() == 1);    // only the served completion is billed
}

TEST_CASE("persistent 429 surfaces as an http status error") {
    StubServer server;
    server.fail_next(100, 429);
    HttpBackend backend(config_for(server), ProposerConfig{});
    CHECK_THROWS_AS(backend.sample_next(TaskSpec{}, {}, 3), HttpStatusError);
    CHECK(server.requests() == 3);  // initial attempt plus max_retries
}

TEST_CASE("client errors other than 429 fail immediately") {
    StubServer server;
    server.fail_next(1, 401);
    HttpBackend backend(config_for(server), ProposerConfig{});
    try {
        backend.sample_next(TaskSpec{}, {}, 2);
        FAIL("expected HttpStatusError");
    } catch (const HttpStatusError& e) {
        CHECK(e.status() == 401);
    }
    CHECK(server.requests() == 1);
}

TEST_CASE("an unreachable endpoint is BackendUnavailable") {
    HttpBackendConfig cfg;
    cfg.base_url = "http://127.0.0.1:1";  // nothing listens there
    cfg.model = "m";
    cfg.max_retries = 1;
    cfg.backoff_base_seconds = 0.01;
    cfg.timeout_seconds = 1;
    HttpBackend backend(cfg, ProposerConfig{});
    CHECK_THROWS_AS(backend.sample_next(TaskSpec{}, {}, 1), BackendUnavailable);
}

TEST_CASE("the call budget cuts off the run") {
    StubServer server;
    auto cfg = config_for(server);
    cfg.call_budget = 2;
    HttpBackend backend(cfg, ProposerConfig{});
    backend.sample_next(TaskSpec{}, {}, 1);
    backend.sample_next(TaskSpec{}, {}, 1);
    CHECK_THROWS_AS(backend.sample_next(TaskSpec{}, {}, 1), BudgetExceeded);
    CHECK(backend.calls() == 2);
}

TEST_CASE("imagination splits lines and strips list markers") {
    StubServer server;
    // Custom handler variant: reuse the echo but feed through imagine().
    HttpBackend backend(config_for(server), ProposerConfig{});
    const auto steps = backend.imagine(TaskSpec{}, {});
    REQUIRE(steps.size() == 1);  // the stub returns a single-line completion
    CHECK(steps[0] == "act_0()");
    CHECK(backend.calls() == 1);
}

TEST_CASE("prompt template slots are filled") {
    StubServer server;
    ProposerConfig prop;
    prop.prompt_template = "DOCS={tool_docs} DEMO={demonstrations} TASK={task} HIST={history}";
    auto cfg = config_for(server);
    cfg.tool_docs = "d1";
    cfg.demonstrations = "ex";
    HttpBackend backend(cfg, prop);
    TaskSpec task;
    task.description = "find homes";
    const std::vector<ActionRecord> history = {canonicalize_action("set_location('P')")};
    CHECK_NOTHROW(backend.sample_next(task, history, 1));
}

TEST_CASE("missing environment variables are reported") {
    ::unsetenv(HttpBackendConfig::kUrlVar);
    ::unsetenv(HttpBackendConfig::kModelVar);
    CHECK_THROWS_AS(HttpBackendConfig::from_env(), BackendUnavailable);
    ::setenv(HttpBackendConfig::kUrlVar, "http://127.0.0.1:9", 1);
    CHECK_THROWS_AS(HttpBackendConfig::from_env(), BackendUnavailable);
    ::setenv(HttpBackendConfig::kModelVar, "m", 1);
    const auto cfg = HttpBackendConfig::from_env();
    CHECK(cfg.base_url == "http://127.0.0.1:9");
    CHECK(cfg.model == "m");
    ::unsetenv(HttpBackendConfig::kUrlVar);
    ::unsetenv(HttpBackendConfig::kModelVar);
}
