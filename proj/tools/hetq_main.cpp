// hetq: index a mixed corpus into a heterogeneous graph, answer
// questions over it (graph walk or table plan), and score answer
// stability via semantic entropy.
//
// Exit codes: 0 ok, 1 fatal, 2 no anchor entities, 3 plan validation
// failed, 4 answer flagged for review, 64 usage.

#include "hetq/entropy.hpp"
#include "hetq/error.hpp"
#include "hetq/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using hetq::CliConfig;
using hetq::QueryMode;
using ordered_json = nlohmann::ordered_json;

constexpr int kOk = 0;
constexpr int kFatal = 1;
constexpr int kNoAnchors = 2;
constexpr int kValidation = 3;
constexpr int kReview = 4;
constexpr int kUsage = 64;

constexpr const char* kNoAnchorMessage = "no anchor entities; try --mode table or refine query";

std::string format_double(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string format_cell(const hetq::Value& v, bool percent) {
    if (std::holds_alternative<std::monostate>(v)) return "null";
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (const auto* d = std::get_if<double>(&v)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", *d);
        return percent ? std::string(buf) + "%" : std::string(buf);
    }
    return std::get<std::string>(v);
}

void print_result_table(std::ostream& os, const hetq::ResultTable& t) {
    const std::size_t ncols = t.schema.columns.size();
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> width(ncols, 0);
    for (std::size_t c = 0; c < ncols; ++c) width[c] = t.schema.columns[c].name.size();
    for (const auto& row : t.rows) {
        std::vector<std::string> line;
        for (std::size_t c = 0; c < ncols; ++c) {
            line.push_back(format_cell(row[c], t.schema.columns[c].unit == hetq::Unit::percent));
            width[c] = std::max(width[c], line.back().size());
        }
        cells.push_back(std::move(line));
    }
    auto pad = [&](const std::string& s, std::size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    for (std::size_t c = 0; c < ncols; ++c) {
        os << (c ? "  " : "") << pad(t.schema.columns[c].name, width[c]);
    }
    os << '\n';
    for (std::size_t c = 0; c < ncols; ++c) {
        os << (c ? "  " : "") << std::string(width[c], '-');
    }
    os << '\n';
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < ncols; ++c) os << (c ? "  " : "") << pad(line[c], width[c]);
        os << '\n';
    }
    os << "(" << t.rows.size() << (t.rows.size() == 1 ? " row)" : " rows)") << '\n';
}

std::string anchor_display(const hetq::HetGraph& graph, const std::string& entity_id) {
    const std::size_t node = graph.index_of_entity(entity_id);
    if (node == hetq::knpos) return entity_id;
    return graph.entity_at(node).canonical_name;
}

ordered_json context_json(const hetq::ContextBundle& bundle) {
    ordered_json chunks = ordered_json::array();
    for (const auto& cc : bundle.chunks) {
        chunks.push_back({{"chunk_id", cc.chunk_id}, {"score", cc.score}});
    }
    return ordered_json{{"total_chars", bundle.total_chars}, {"chunks", std::move(chunks)}};
}

ordered_json anchors_json(const hetq::HetGraph& graph, const hetq::AnchorSet& anchors) {
    ordered_json arr = ordered_json::array();
    for (const auto& id : anchors.anchors) {
        arr.push_back({{"entity_id", id}, {"name", anchor_display(graph, id)}});
    }
    return arr;
}

ordered_json result_table_json(const hetq::ResultTable& t) {
    ordered_json cols = ordered_json::array();
    for (const auto& c : t.schema.columns) {
        cols.push_back({{"name", c.name},
                        {"type", std::string(hetq::column_type_name(c.type))},
                        {"percent", c.unit == hetq::Unit::percent}});
    }
    ordered_json rows = ordered_json::array();
    for (const auto& row : t.rows) {
        ordered_json r = ordered_json::array();
        for (const auto& cell : row) {
            if (std::holds_alternative<std::monostate>(cell)) r.push_back(nullptr);
            else if (const auto* d = std::get_if<double>(&cell)) r.push_back(*d);
            else if (const auto* b = std::get_if<bool>(&cell)) r.push_back(*b);
            else r.push_back(std::get<std::string>(cell));
        }
        rows.push_back(std::move(r));
    }
    ordered_json prov = ordered_json::array();
    for (const auto& row_prov : t.provenance) {
        ordered_json refs = ordered_json::array();
        for (const auto& ref : row_prov) {
            refs.push_back({{"table", ref.table}, {"row", ref.row}});
        }
        prov.push_back(std::move(refs));
    }
    return ordered_json{{"columns", std::move(cols)}, {"rows", std::move(rows)},
                        {"provenance", std::move(prov)}};
}

// Shared by cmd_query and the repl. Prints the human or JSON record
// and returns the exit code for the one-shot command.
int emit_query_result(const std::string& question, const hetq::QueryResult& res,
                      const hetq::HetGraph& graph, bool as_json, std::ostream& os) {
    if (as_json) {
        ordered_json doc;
        switch (res.status) {
        case hetq::QueryResult::Status::ok: doc["status"] = "ok"; break;
        case hetq::QueryResult::Status::no_anchors: doc["status"] = "no_anchors"; break;
        case hetq::QueryResult::Status::invalid_plan: doc["status"] = "invalid_plan"; break;
        }
        doc["mode"] = std::string(hetq::query_mode_name(res.mode));
        doc["question"] = question;
        doc["anchors"] = anchors_json(graph, res.anchors);
        doc["unmatched_terms"] = res.anchors.unmatched_terms;
        doc["context"] = context_json(res.context);
        if (res.mode == QueryMode::graph) {
            if (res.status == hetq::QueryResult::Status::ok) doc["answer"] = res.answer;
        } else {
            doc["plan"] = res.plan_text;
            doc["plan_retried"] = res.plan_retried;
            doc["violations"] = res.violations;
            if (res.table) doc["table"] = result_table_json(*res.table);
        }
        doc["warnings"] = res.warnings;
        os << doc.dump(2) << '\n';
    } else {
        os << "mode: " << hetq::query_mode_name(res.mode) << '\n';
        if (!res.anchors.anchors.empty()) {
            os << "anchors:";
            for (std::size_t i = 0; i < res.anchors.anchors.size(); ++i) {
                os << (i ? ", " : " ") << anchor_display(graph, res.anchors.anchors[i]);
            }
            os << '\n';
        }
        if (res.status != hetq::QueryResult::Status::no_anchors) {
            os << "context: " << res.context.chunks.size()
               << (res.context.chunks.size() == 1 ? " chunk, " : " chunks, ")
               << res.context.total_chars << " chars\n";
            for (const auto& cc : res.context.chunks) {
                os << "  " << cc.chunk_id << "  score=" << format_double(cc.score) << '\n';
            }
        }
        for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
        if (res.mode == QueryMode::graph) {
            if (res.status == hetq::QueryResult::Status::ok) {
                os << "answer: " << res.answer << '\n';
            }
        } else {
            os << "plan: " << res.plan_text << '\n';
            if (res.table) print_result_table(os, *res.table);
        }
    }
    if (res.status == hetq::QueryResult::Status::no_anchors) {
        std::cerr << kNoAnchorMessage << '\n';
        return kNoAnchors;
    }
    if (res.status == hetq::QueryResult::Status::invalid_plan) {
        std::cerr << "plan failed validation:\n";
        for (const auto& v : res.violations) std::cerr << "  - " << v << '\n';
        return kValidation;
    }
    return kOk;
}

void print_ask_report(const hetq::AskResult& ask, std::ostream& os) {
    const auto& rep = ask.report;
    os << "best answer: " << rep.best_answer << '\n';
    os << "entropy_bits: " << format_double(rep.entropy_bits) << '\n';
    os << "threshold_bits: " << format_double(rep.threshold_bits) << '\n';
    os << "clusters (" << rep.clusters.size() << "):\n";
    for (std::size_t i = 0; i < rep.clusters.size(); ++i) {
        const auto& cluster = rep.clusters[i];
        os << "  #" << i << " p=" << format_double(rep.probabilities[i], 2) << " n="
           << cluster.members.size() << " \"" << rep.samples[cluster.representative].text
           << "\"\n";
    }
    if (rep.flag == hetq::ReviewFlag::review) {
        os << "REVIEW: semantic entropy exceeds the threshold; answers disagree in meaning\n";
    }
}

struct CommonArgs {
    std::string config_path;
    std::string graph_path;
};

CliConfig load_effective_config(const std::string& config_path) {
    CliConfig base = hetq::env_defaults();
    if (!config_path.empty()) return hetq::load_config_file(config_path, base);
    base.validate();
    return base;
}

int cmd_index(const std::string& corpus, const std::string& out, const std::string& config_path) {
    CliConfig cfg = load_effective_config(config_path);
    auto gateway = hetq::make_gateway(cfg.backend);
    hetq::BuiltIndex built = hetq::index_corpus(corpus, cfg, *gateway);
    hetq::save_index(out, built.graph, built.tables);
    const auto& s = built.stats;
    std::cout << "indexed " << s.documents << (s.documents == 1 ? " document" : " documents")
              << " (" << s.chunks << " chunks, " << s.tables << " tables, " << s.skipped
              << " skipped)\n";
    std::cout << "graph: " << s.chunk_nodes << " chunk nodes, " << s.entity_nodes
              << " entity nodes, " << s.mention_edges << " mention edges, " << s.relation_edges
              << " relation edges\n";
    if (s.dropped_mentions > 0 || s.dropped_relations > 0) {
        std::cout << "dropped: " << s.dropped_mentions << " mentions, " << s.dropped_relations
                  << " relations\n";
    }
    std::cout << "wrote " << out << " and " << hetq::tables_sidecar_path(out).string() << '\n';
    for (const auto& w : built.warnings) std::cerr << "warning: " << w << '\n';
    return kOk;
}

int cmd_query(const std::string& question, const CommonArgs& common, const std::string& mode_name,
              bool as_json) {
    CliConfig cfg = load_effective_config(common.config_path);
    auto gateway = hetq::make_gateway(cfg.backend);
    hetq::LoadedIndex index = hetq::load_index(common.graph_path);
    const QueryMode mode = *hetq::query_mode_from_name(mode_name);
    hetq::QueryResult res =
        hetq::run_query(question, index.graph, index.tables, cfg, *gateway, mode);
    return emit_query_result(question, res, index.graph, as_json, std::cout);
}

int cmd_ask(const std::string& question, const CommonArgs& common, std::optional<int> samples,
            std::optional<double> threshold, bool as_json) {
    CliConfig cfg = load_effective_config(common.config_path);
    if (samples) cfg.entropy.samples = *samples;
    if (threshold) cfg.entropy.threshold_bits = *threshold;
    auto gateway = hetq::make_gateway(cfg.backend);
    hetq::LoadedIndex index = hetq::load_index(common.graph_path);
    hetq::AskResult ask = hetq::run_ask(question, index.graph, cfg, *gateway);
    if (as_json) {
        std::cout << hetq::entropy_report_to_json(ask.report) << '\n';
    } else {
        print_ask_report(ask, std::cout);
    }
    return ask.report.flag == hetq::ReviewFlag::review ? kReview : kOk;
}

int cmd_repl(const CommonArgs& common) {
    CliConfig cfg = load_effective_config(common.config_path);
    auto gateway = hetq::make_gateway(cfg.backend);
    hetq::LoadedIndex index = hetq::load_index(common.graph_path);
    std::string line;
    while (true) {
        std::cout << "hetq> " << std::flush;
        if (!std::getline(std::cin, line)) break;
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line == ":quit") break;
        try {
            if (line == ":config") {
                std::cout << hetq::config_to_json(cfg);
            } else if (line.rfind(":ask", 0) == 0) {
                std::string question = line.size() > 4 ? line.substr(5) : "";
                if (question.empty()) {
                    std::cout << "usage: :ask <question>\n";
                    continue;
                }
                hetq::AskResult ask = hetq::run_ask(question, index.graph, cfg, *gateway);
                print_ask_report(ask, std::cout);
            } else if (line.front() == ':') {
                std::cout << "unknown command: " << line
                          << " (expected :ask <question>, :config, or :quit)\n";
            } else {
                hetq::QueryResult res = hetq::run_query(line, index.graph, index.tables, cfg,
                                                        *gateway, QueryMode::automatic);
                emit_query_result(line, res, index.graph, false, std::cout);
            }
        } catch (const std::exception& e) {
            std::cout << "error: " << e.what() << '\n';
        }
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph and table question answering over a mixed text/CSV/JSON corpus"};
    app.require_subcommand(1);

    // index
    auto* index = app.add_subcommand("index", "build a graph index from a corpus directory");
    std::string corpus, out, index_config;
    index->add_option("--corpus", corpus, "corpus directory (.txt/.csv/.json files)")->required();
    index->add_option("--out", out, "output graph file")->required();
    index->add_option("--config", index_config, "JSON config file");

    // query
    auto* query = app.add_subcommand("query", "answer one question against a saved index");
    std::string question;
    CommonArgs query_common;
    std::string mode_name = "auto";
    bool query_json = false;
    query->add_option("question", question, "the question")->required();
    query->add_option("--graph", query_common.graph_path, "graph file from `index`")->required();
    query->add_option("--mode", mode_name, "auto, graph, or table")
        ->check(CLI::IsMember({"auto", "graph", "table"}));
    query->add_flag("--json", query_json, "emit one JSON document instead of text");
    query->add_option("--config", query_common.config_path, "JSON config file");

    // ask
    auto* ask = app.add_subcommand("ask", "sample the answer and report semantic entropy");
    std::string ask_question;
    CommonArgs ask_common;
    int ask_samples = 0;
    double ask_threshold = 0.0;
    bool ask_json = false;
    ask->add_option("question", ask_question, "the question")->required();
    ask->add_option("--graph", ask_common.graph_path, "graph file from `index`")->required();
    auto* samples_opt = ask->add_option("--samples", ask_samples, "answer samples (>= 2)");
    auto* threshold_opt =
        ask->add_option("--entropy-threshold", ask_threshold, "review threshold in bits");
    ask->add_flag("--json", ask_json, "emit the entropy report as JSON");
    ask->add_option("--config", ask_common.config_path, "JSON config file");

    // repl
    auto* repl = app.add_subcommand("repl", "interactive loop (:ask, :config, :quit)");
    CommonArgs repl_common;
    repl->add_option("--graph", repl_common.graph_path, "graph file from `index`")->required();
    repl->add_option("--config", repl_common.config_path, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*index) return cmd_index(corpus, out, index_config);
        if (*query) return cmd_query(question, query_common, mode_name, query_json);
        if (*ask) {
            std::optional<int> samples;
            std::optional<double> threshold;
            if (samples_opt->count() > 0) samples = ask_samples;
            if (threshold_opt->count() > 0) threshold = ask_threshold;
            if (samples && *samples < 2) {
                std::cerr << "ask requires --samples >= 2 (one sample carries no signal)\n";
                return kUsage;
            }
            return cmd_ask(ask_question, ask_common, samples, threshold, ask_json);
        }
        if (*repl) return cmd_repl(repl_common);
    } catch (const hetq::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFatal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFatal;
    }
    return kUsage;
}
