#pragma once

#include "hetq/gateway.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hetq {

struct AnswerSample {
    std::size_t index = 0;
    std::string text;
};

enum class EquivalenceMode { exact_normalized, embedding_cosine };

std::string_view equivalence_mode_name(EquivalenceMode mode);
std::optional<EquivalenceMode> equivalence_mode_from_name(std::string_view name);

struct EquivalenceOracle {
    EquivalenceMode mode = EquivalenceMode::exact_normalized;
    double tau = 0.8; // cosine threshold, embedding mode only
};

struct SemanticCluster {
    std::size_t representative = 0;   // sample index anchoring the cluster
    std::vector<std::size_t> members; // ascending, contains representative
};

// Greedy sequential clustering: each sample joins the first cluster
// whose representative it matches (exact mode: case-fold, strip
// punctuation, collapse whitespace; embedding mode: cosine >= tau),
// else opens a new cluster. Deterministic given sample order.
std::vector<SemanticCluster> cluster_answers(const std::vector<AnswerSample>& samples,
                                             const EquivalenceOracle& oracle,
                                             ModelGateway& gateway);

// Discrete Shannon entropy over cluster mass: H = -sum p_c log2 p_c,
// p_c = |c| / n.
double semantic_entropy(const std::vector<SemanticCluster>& clusters);

enum class ReviewFlag { ok, review };

struct EntropyReport {
    std::string question;
    std::vector<AnswerSample> samples;
    std::vector<SemanticCluster> clusters;
    std::vector<double> probabilities; // parallel to clusters
    double entropy_bits = 0.0;
    double threshold_bits = 1.0;
    ReviewFlag flag = ReviewFlag::ok; // review iff entropy_bits > threshold_bits
    std::string best_answer; // representative of the largest cluster (tie: lowest index)
};

struct SamplingParams {
    int n = 5;
    double temperature = 1.0;
    std::uint64_t seed = 0;
};

// Samples n answers to (question, context), clusters them, computes
// entropy, and flags the report for review when it crosses the
// threshold. Requires n >= 2: one sample carries no signal.
EntropyReport uncertainty_report(const std::string& question, const std::string& context,
                                 const SamplingParams& sampling, const EquivalenceOracle& oracle,
                                 ModelGateway& gateway, double threshold_bits);

std::string entropy_report_to_json(const EntropyReport& report);

} // namespace hetq
