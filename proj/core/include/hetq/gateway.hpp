#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace hetq {

enum class TemplateId { ner, relation, table_extract, plan_synthesis, answer, paraphrase };

std::string_view template_name(TemplateId id);

struct PromptParams {
    double temperature = 0.0;
    std::size_t max_output_chars = 8192;
    std::uint64_t seed = 0;
};

struct PromptRequest {
    TemplateId template_id = TemplateId::answer;
    std::map<std::string, std::string> variables;
    PromptParams params;
};

// Fills the template's {placeholders} from request variables.
// Throws Error when a placeholder is unbound.
std::string render_template(const PromptRequest& req);

enum class BackendKind { mock, http };

struct Completion {
    std::string text;
    BackendKind backend = BackendKind::mock;
    double latency_ms = 0.0;
};

// L2-normalized, or all-zero for blank input.
struct EmbeddingVector {
    std::vector<double> values;
};

double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

struct BackendConfig {
    BackendKind mode = BackendKind::mock;
    std::string endpoint_url;                    // base URL, e.g. http://host:8080/v1
    std::string api_key_env = "MODEL_API_KEY";   // name of the env var holding the key
    std::string model = "default";
    int timeout_ms = 10000;
    int max_retries = 2;
    int max_in_flight = 4;
    std::size_t embedding_dim = 256;

    // Throws Error on an invalid combination (http mode without URL,
    // non-positive limits).
    void validate() const;
};

class ModelGateway {
public:
    virtual ~ModelGateway() = default;

    virtual Completion complete(const PromptRequest& req) = 0;
    virtual EmbeddingVector embed(std::string_view text) = 0;

    // n completions. Mock: deterministic rotation keyed by seed+i when
    // temperature > 0. Http: n independent requests; fails only when
    // every sample fails.
    virtual std::vector<Completion> sample_answers(const PromptRequest& req, int n) = 0;

    virtual BackendKind kind() const = 0;

    // Peak concurrent backend requests observed (http admission probe;
    // mock reports 0).
    virtual int max_observed_in_flight() const { return 0; }
};

std::shared_ptr<ModelGateway> make_mock_gateway(const BackendConfig& cfg = {});
std::shared_ptr<ModelGateway> make_http_gateway(const BackendConfig& cfg);

// Dispatches on cfg.mode.
std::shared_ptr<ModelGateway> make_gateway(const BackendConfig& cfg);

// Shared embedding plumbing: resize to `dim` (truncate or zero-pad)
// then L2-normalize; all-zero stays all-zero.
std::vector<double> fit_and_normalize(std::vector<double> values, std::size_t dim);

} // namespace hetq
