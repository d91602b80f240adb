#include "hetq/error.hpp"
#include "hetq/gateway.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <semaphore>
#include <thread>

using json = nlohmann::json;

namespace hetq {

namespace {

struct Endpoint {
    std::string origin; // scheme://host[:port]
    std::string prefix; // path prefix without trailing slash, may be empty
};

Endpoint parse_endpoint(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw BackendError("endpoint url must include a scheme: " + url);
    }
    if (url.compare(0, scheme_end, "http") != 0) {
        throw BackendError("only http endpoints are supported: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    Endpoint ep;
    if (path_start == std::string::npos) {
        ep.origin = url;
    } else {
        ep.origin = url.substr(0, path_start);
        ep.prefix = url.substr(path_start);
    }
    while (!ep.prefix.empty() && ep.prefix.back() == '/') {
        ep.prefix.pop_back();
    }
    return ep;
}

class HttpGateway final : public ModelGateway {
public:
    explicit HttpGateway(BackendConfig cfg)
        : cfg_(std::move(cfg)),
          endpoint_(parse_endpoint(cfg_.endpoint_url)),
          slots_(cfg_.max_in_flight) {
        const char* key = std::getenv(cfg_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw BackendError("api key environment variable is not set: " + cfg_.api_key_env);
        }
        api_key_ = key;
    }

    Completion complete(const PromptRequest& req) override {
        json body{
            {"model", cfg_.model},
            {"messages", json::array({json{{"role", "user"}, {"content", render_template(req)}}})},
            {"temperature", req.params.temperature},
            {"seed", req.params.seed},
        };
        const auto start = std::chrono::steady_clock::now();
        json reply = post_json("/chat/completions", body);
        const auto elapsed = std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start);

        if (!reply.contains("choices") || !reply["choices"].is_array() ||
            reply["choices"].empty()) {
            throw BackendError("backend response has no choices");
        }
        const json& msg = reply["choices"][0].value("message", json::object());
        if (!msg.contains("content") || !msg["content"].is_string()) {
            throw BackendError("backend response has no message content");
        }
        std::string text = msg["content"].get<std::string>();
        if (text.size() > req.params.max_output_chars) {
            text.resize(req.params.max_output_chars);
        }
        return {std::move(text), BackendKind::http, elapsed.count()};
    }

    EmbeddingVector embed(std::string_view text) override {
        json body{{"model", cfg_.model}, {"input", json::array({std::string(text)})}};
        json reply = post_json("/embeddings", body);
        if (!reply.contains("data") || !reply["data"].is_array() || reply["data"].empty() ||
            !reply["data"][0].contains("embedding") || !reply["data"][0]["embedding"].is_array()) {
            throw BackendError("backend response has no embedding");
        }
        std::vector<double> values;
        for (const auto& v : reply["data"][0]["embedding"]) {
            if (!v.is_number()) {
                throw BackendError("backend embedding contains a non-numeric entry");
            }
            values.push_back(v.get<double>());
        }
        return {fit_and_normalize(std::move(values), cfg_.embedding_dim)};
    }

    std::vector<Completion> sample_answers(const PromptRequest& req, int n) override {
        if (n < 1) {
            throw Error("sample_answers requires n >= 1");
        }
        std::vector<Completion> out;
        std::string last_error;
        for (int i = 0; i < n; ++i) {
            PromptRequest sample = req;
            if (req.params.temperature > 0) {
                sample.params.seed = req.params.seed + static_cast<std::uint64_t>(i);
            }
            try {
                out.push_back(complete(sample));
            } catch (const BackendError& e) {
                last_error = e.what();
            }
        }
        if (out.empty()) {
            throw BackendError("all " + std::to_string(n) + " samples failed; last error: " +
                               last_error);
        }
        return out;
    }

    BackendKind kind() const override { return BackendKind::http; }

    int max_observed_in_flight() const override { return peak_in_flight_.load(); }

private:
    json post_json(const std::string& route, const json& body) {
        const std::string path = endpoint_.prefix + route;
        const std::string payload = body.dump();
        const httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};

        const int attempts_allowed = 1 + cfg_.max_retries;
        int status = 0;
        std::string detail;
        for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
            if (attempt > 1) {
                const auto backoff = std::chrono::milliseconds(250) * (1 << (attempt - 2));
                std::this_thread::sleep_for(backoff);
            }

            slots_.acquire();
            const int now = in_flight_.fetch_add(1) + 1;
            int peak = peak_in_flight_.load();
            while (now > peak && !peak_in_flight_.compare_exchange_weak(peak, now)) {
            }
            httplib::Result res = [&] {
                httplib::Client client(endpoint_.origin);
                client.set_connection_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
                client.set_read_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
                client.set_write_timeout(std::chrono::milliseconds(cfg_.timeout_ms));
                return client.Post(path, headers, payload, "application/json");
            }();
            in_flight_.fetch_sub(1);
            slots_.release();

            if (!res) {
                status = 0;
                detail = httplib::to_string(res.error());
                continue; // transport error: retry
            }
            status = res->status;
            if (status >= 200 && status < 300) {
                json parsed = json::parse(res->body, nullptr, false);
                if (parsed.is_discarded()) {
                    throw BackendError("backend returned unparseable JSON", attempt, status);
                }
                return parsed;
            }
            detail = res->body.substr(0, 200);
            if (status == 429 || status >= 500) {
                continue; // transient: retry
            }
            throw BackendError("backend request failed with status " + std::to_string(status) +
                                   ": " + detail,
                               attempt, status);
        }
        throw BackendError("backend request failed after " + std::to_string(attempts_allowed) +
                               " attempts (last status " + std::to_string(status) + "): " + detail,
                           attempts_allowed, status);
    }

    BackendConfig cfg_;
    Endpoint endpoint_;
    std::string api_key_;
    std::counting_semaphore<> slots_;
    std::atomic<int> in_flight_{0};
    std::atomic<int> peak_in_flight_{0};
};

} // namespace

std::shared_ptr<ModelGateway> make_http_gateway(const BackendConfig& cfg) {
    BackendConfig local = cfg;
    local.mode = BackendKind::http;
    local.validate();
    return std::make_shared<HttpGateway>(local);
}

} // namespace hetq
