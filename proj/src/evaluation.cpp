#include "sans/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

#include "sans/errors.hpp"
#include "sans/parallel.hpp"

namespace sans {

namespace {

struct Tally {
    double reciprocal_sum = 0.0;
    uint64_t hits1 = 0, hits3 = 0, hits10 = 0;
    uint64_t queries = 0;

    void add_rank(double rank) {
        reciprocal_sum += 1.0 / rank;
        if (rank <= 1.0) ++hits1;
        if (rank <= 3.0) ++hits3;
        if (rank <= 10.0) ++hits10;
        ++queries;
    }
    void merge(const Tally& o) {
        reciprocal_sum += o.reciprocal_sum;
        hits1 += o.hits1;
        hits3 += o.hits3;
        hits10 += o.hits10;
        queries += o.queries;
    }
    RankMetrics metrics() const {
        RankMetrics m;
        m.num_queries = queries;
        if (queries == 0) return m;
        double q = static_cast<double>(queries);
        m.mrr = reciprocal_sum / q;
        m.hits[1] = hits1 / q;
        m.hits[3] = hits3 / q;
        m.hits[10] = hits10 / q;
        return m;
    }
};

// Mean rank of the target's tied block among unmasked candidates:
// (# strictly better) + (# tied including the target + 1) / 2.
double filtered_rank(std::span<const double> scores, std::span<const EntityId> masked,
                     EntityId target) {
    double target_score = scores[target];
    uint64_t better = 0, tied = 0;
    size_t mask_idx = 0;
    for (size_t c = 0; c < scores.size(); ++c) {
        while (mask_idx < masked.size() && masked[mask_idx] < c) ++mask_idx;
        if (mask_idx < masked.size() && masked[mask_idx] == c && c != target) continue;
        if (scores[c] < target_score)
            ++better;
        else if (scores[c] == target_score)
            ++tied;
    }
    return static_cast<double>(better) + (static_cast<double>(tied) + 1.0) / 2.0;
}

}  // namespace

EvalReport evaluate_ranking(const CandidateScorer& scorer, const TripleStore& store,
                            Split split, const EvalOptions& options) {
    const std::vector<Triple>& queries = store.split(split);
    if (queries.empty())
        throw DataError(std::string("cannot evaluate empty split: ") + split_name(split));

    int threads = std::max(1, options.threads);
    std::vector<Tally> head_tallies(static_cast<size_t>(threads));
    std::vector<Tally> tail_tallies(static_cast<size_t>(threads));
    uint64_t num_entities = store.num_entities();

    parallel_for_chunks(queries.size(), threads, 16, [&](int worker, uint64_t begin, uint64_t end) {
        std::vector<double> scores(num_entities);
        static const std::span<const EntityId> no_mask;
        for (uint64_t q = begin; q < end; ++q) {
            const Triple& triple = queries[q];

            scorer(Side::Tail, triple, scores);
            auto tail_mask = options.filtered
                                 ? store.observed_tails(triple.head, triple.relation)
                                 : no_mask;
            tail_tallies[static_cast<size_t>(worker)].add_rank(
                filtered_rank(scores, tail_mask, triple.tail));

            scorer(Side::Head, triple, scores);
            auto head_mask = options.filtered
                                 ? store.observed_heads(triple.tail, triple.relation)
                                 : no_mask;
            head_tallies[static_cast<size_t>(worker)].add_rank(
                filtered_rank(scores, head_mask, triple.head));
        }
    });

    Tally head, tail, all;
    for (const auto& t : head_tallies) head.merge(t);
    for (const auto& t : tail_tallies) tail.merge(t);
    all.merge(head);
    all.merge(tail);

    EvalReport report;
    report.all = all.metrics();
    report.head = head.metrics();
    report.tail = tail.metrics();
    return report;
}

EvalReport evaluate(const EmbeddingModel& model, const TripleStore& store, Split split,
                    const EvalOptions& options) {
    if (model.num_entities != store.num_entities() || model.num_relations != store.num_relations())
        throw DataError("model and store vocabulary sizes disagree");
    CandidateScorer scorer = [&model](Side side, const Triple& query, std::span<double> out) {
        score_candidates(model, side, query, out);
    };
    return evaluate_ranking(scorer, store, split, options);
}

std::string format_report(const EvalReport& report, Split split) {
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-8s %10s %8s %8s %8s %10s\n", split_name(split), "MRR",
                  "H@1", "H@3", "H@10", "queries");
    out += buf;
    auto line = [&](const char* label, const RankMetrics& m) {
        std::snprintf(buf, sizeof(buf), "%-8s %10.4f %8.4f %8.4f %8.4f %10llu\n", label, m.mrr,
                      m.hits.count(1) ? m.hits.at(1) : 0.0, m.hits.count(3) ? m.hits.at(3) : 0.0,
                      m.hits.count(10) ? m.hits.at(10) : 0.0,
                      static_cast<unsigned long long>(m.num_queries));
        out += buf;
    };
    line("both", report.all);
    line("head", report.head);
    line("tail", report.tail);
    return out;
}

std::string report_key_values(const EvalReport& report, Split split) {
    char buf[256];
    std::string out;
    auto emit = [&](const char* side, const RankMetrics& m) {
        std::snprintf(buf, sizeof(buf), "%s.%s.mrr=%.6f\n", split_name(split), side, m.mrr);
        out += buf;
        for (const auto& [n, frac] : m.hits) {
            std::snprintf(buf, sizeof(buf), "%s.%s.hits%d=%.6f\n", split_name(split), side, n, frac);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), "%s.%s.queries=%llu\n", split_name(split), side,
                      static_cast<unsigned long long>(m.num_queries));
        out += buf;
    };
    emit("both", report.all);
    emit("head", report.head);
    emit("tail", report.tail);
    return out;
}

}  // namespace sans
