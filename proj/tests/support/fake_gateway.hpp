#pragma once

// Scriptable gateway for failure injection: hand it the replies to
// return, in order, per template. Empty script for a template falls
// back to `fallback`, or throws when none is set.

#include "hetq/error.hpp"
#include "hetq/gateway.hpp"

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace testsupport {

class FakeGateway : public hetq::ModelGateway {
public:
    std::map<hetq::TemplateId, std::deque<std::string>> scripts;
    std::optional<std::string> fallback;
    std::vector<hetq::PromptRequest> seen; // every complete() call, in order
    std::size_t embed_calls = 0;

    hetq::Completion complete(const hetq::PromptRequest& req) override {
        seen.push_back(req);
        auto it = scripts.find(req.template_id);
        if (it != scripts.end() && !it->second.empty()) {
            hetq::Completion c{it->second.front(), hetq::BackendKind::mock, 0.0};
            it->second.pop_front();
            return c;
        }
        if (fallback) return {*fallback, hetq::BackendKind::mock, 0.0};
        throw hetq::Error("fake gateway has no scripted reply for template " +
                          std::string(hetq::template_name(req.template_id)));
    }

    hetq::EmbeddingVector embed(std::string_view text) override {
        ++embed_calls;
        constexpr std::size_t dim = 8;
        std::vector<double> v(dim, 0.0);
        for (std::size_t i = 0; i < text.size(); ++i) {
            v[i % dim] += static_cast<unsigned char>(text[i]);
        }
        return {hetq::fit_and_normalize(std::move(v), dim)};
    }

    std::vector<hetq::Completion> sample_answers(const hetq::PromptRequest& req, int n) override {
        std::vector<hetq::Completion> out;
        for (int i = 0; i < n; ++i) out.push_back(complete(req));
        return out;
    }

    hetq::BackendKind kind() const override { return hetq::BackendKind::mock; }
};

} // namespace testsupport
