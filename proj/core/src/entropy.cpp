#include "hetq/entropy.hpp"

#include "hetq/error.hpp"
#include "hetq/text.hpp"

#include <nlohmann/json.hpp>

#include <cmath>

namespace hetq {

std::string_view equivalence_mode_name(EquivalenceMode mode) {
    return mode == EquivalenceMode::exact_normalized ? "exact_normalized" : "embedding_cosine";
}

std::optional<EquivalenceMode> equivalence_mode_from_name(std::string_view name) {
    if (name == "exact_normalized") return EquivalenceMode::exact_normalized;
    if (name == "embedding_cosine") return EquivalenceMode::embedding_cosine;
    return std::nullopt;
}

std::vector<SemanticCluster> cluster_answers(const std::vector<AnswerSample>& samples,
                                             const EquivalenceOracle& oracle,
                                             ModelGateway& gateway) {
    if (samples.empty()) {
        throw Error("cluster_answers requires at least one sample");
    }

    std::vector<std::string> normalized;
    std::vector<EmbeddingVector> embedded;
    if (oracle.mode == EquivalenceMode::exact_normalized) {
        normalized.reserve(samples.size());
        for (const AnswerSample& s : samples) {
            normalized.push_back(normalize_for_equality(s.text));
        }
    } else {
        embedded.reserve(samples.size());
        for (const AnswerSample& s : samples) {
            embedded.push_back(gateway.embed(s.text));
        }
    }

    auto equivalent = [&](std::size_t a, std::size_t rep) {
        if (oracle.mode == EquivalenceMode::exact_normalized) {
            return normalized[a] == normalized[rep];
        }
        return cosine(embedded[a], embedded[rep]) >= oracle.tau;
    };

    std::vector<SemanticCluster> clusters;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        bool placed = false;
        for (SemanticCluster& cluster : clusters) {
            if (equivalent(i, cluster.representative)) {
                cluster.members.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) {
            clusters.push_back({i, {i}});
        }
    }
    return clusters;
}

double semantic_entropy(const std::vector<SemanticCluster>& clusters) {
    std::size_t n = 0;
    for (const SemanticCluster& c : clusters) {
        n += c.members.size();
    }
    if (n == 0) {
        throw Error("semantic_entropy requires a nonempty sample set");
    }
    double bits = 0.0;
    for (const SemanticCluster& c : clusters) {
        if (c.members.empty()) continue; // 0 log 0 = 0
        const double p = static_cast<double>(c.members.size()) / static_cast<double>(n);
        bits -= p * std::log2(p);
    }
    return bits;
}

EntropyReport uncertainty_report(const std::string& question, const std::string& context,
                                 const SamplingParams& sampling, const EquivalenceOracle& oracle,
                                 ModelGateway& gateway, double threshold_bits) {
    if (sampling.n < 2) {
        throw Error("uncertainty_report requires n >= 2 samples");
    }

    PromptRequest req;
    req.template_id = TemplateId::answer;
    req.variables["question"] = question;
    req.variables["context"] = context;
    req.params.temperature = sampling.temperature;
    req.params.seed = sampling.seed;

    EntropyReport report;
    report.question = question;
    report.threshold_bits = threshold_bits;

    const auto completions = gateway.sample_answers(req, sampling.n);
    for (std::size_t i = 0; i < completions.size(); ++i) {
        report.samples.push_back({i, completions[i].text});
    }

    report.clusters = cluster_answers(report.samples, oracle, gateway);
    report.entropy_bits = semantic_entropy(report.clusters);
    for (const SemanticCluster& c : report.clusters) {
        report.probabilities.push_back(static_cast<double>(c.members.size()) /
                                       static_cast<double>(report.samples.size()));
    }
    report.flag = report.entropy_bits > threshold_bits ? ReviewFlag::review : ReviewFlag::ok;

    // clusters are created in ascending representative order, so the
    // first maximum also has the lowest representative index
    std::size_t best = 0;
    for (std::size_t i = 1; i < report.clusters.size(); ++i) {
        if (report.clusters[i].members.size() > report.clusters[best].members.size()) {
            best = i;
        }
    }
    report.best_answer = report.samples[report.clusters[best].representative].text;
    return report;
}

std::string entropy_report_to_json(const EntropyReport& report) {
    nlohmann::ordered_json clusters = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < report.clusters.size(); ++i) {
        const SemanticCluster& c = report.clusters[i];
        nlohmann::ordered_json members = nlohmann::ordered_json::array();
        for (std::size_t m : c.members) {
            members.push_back(m);
        }
        clusters.push_back({{"representative", c.representative},
                            {"representative_text", report.samples[c.representative].text},
                            {"members", std::move(members)},
                            {"probability", report.probabilities[i]}});
    }
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (const AnswerSample& s : report.samples) {
        samples.push_back({{"index", s.index}, {"text", s.text}});
    }
    nlohmann::ordered_json j{{"question", report.question},
                             {"samples", std::move(samples)},
                             {"clusters", std::move(clusters)},
                             {"entropy_bits", report.entropy_bits},
                             {"threshold_bits", report.threshold_bits},
                             {"flag", report.flag == ReviewFlag::review ? "review" : "ok"},
                             {"best_answer", report.best_answer}};
    return j.dump(2);
}

} // namespace hetq
