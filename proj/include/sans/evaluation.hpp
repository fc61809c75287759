#pragma once
// Filtered link-prediction ranking.
//
// For every triple of a split and each corruption side, all |E| candidate
// completions are scored; candidates that complete another observed triple
// are masked out, and the true entity's rank is the mean rank of its tied
// block. Reports MRR and Hits@{1,3,10} overall and per side.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>

#include "sans/graph.hpp"
#include "sans/model.hpp"
#include "sans/types.hpp"

namespace sans {

struct RankMetrics {
    double mrr = 0.0;
    std::map<int, double> hits;  // N -> fraction with rank <= N, N in {1,3,10}
    uint64_t num_queries = 0;
};

struct EvalReport {
    RankMetrics all;   // both sides pooled
    RankMetrics head;  // head-corruption queries
    RankMetrics tail;  // tail-corruption queries
};

struct EvalOptions {
    int threads = 1;
    bool filtered = true;  // raw setting kept as a debug escape hatch
};

// Fills out[c] = d_r of the completion that replaces the corrupted side with
// candidate c. Must be pure; called concurrently from ranking workers.
using CandidateScorer =
    std::function<void(Side side, const Triple& query, std::span<double> out)>;

// Ranking driver over an arbitrary scorer (the model-independent core; the
// property tests feed transformed scorers through this).
EvalReport evaluate_ranking(const CandidateScorer& scorer, const TripleStore& store,
                            Split split, const EvalOptions& options = {});

EvalReport evaluate(const EmbeddingModel& model, const TripleStore& store, Split split,
                    const EvalOptions& options = {});

// Plain-text table.
std::string format_report(const EvalReport& report, Split split);

// Line-oriented `key=value` dump for scripting.
std::string report_key_values(const EvalReport& report, Split split);

}  // namespace sans
