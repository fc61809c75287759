#pragma once
// Margin loss optimization with sparse Adam.
//
// Per positive and corruption side the loss is
//   -log sigmoid(gamma - d_pos) - sum_i w_i log sigmoid(d_neg_i - gamma)
// with w_i = 1/n, or detached softmax weights for self-adversarial variants.
// Gradients are averaged over the positives of a batch and summed over the
// two corruption sides; only touched embedding rows advance their Adam state.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sans/graph.hpp"
#include "sans/model.hpp"
#include "sans/neighborhood.hpp"
#include "sans/sampling.hpp"
#include "sans/types.hpp"

namespace sans {

struct LossBreakdown {
    double positive_term = 0.0;
    double negative_term = 0.0;
    double total = 0.0;
};

struct TrainConfig {
    uint64_t batch_size = 1000;
    uint64_t steps = 1000;
    double learning_rate = 5e-5;
    SamplerConfig sampler;
    uint64_t eval_every = 0;  // 0 = evaluate on valid only after the last step
    uint64_t seed = 1;        // epoch shuffling
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int threads = 1;  // used by validation ranking
};

// One line per step `step<TAB>loss<TAB>pos<TAB>neg`, plus
// `eval<TAB>step<TAB>mrr<TAB>h1<TAB>h3<TAB>h10` lines.
using LogSink = std::function<void(const std::string& line)>;

struct TrainResult {
    EmbeddingModel best_model;  // checkpoint with the best validation MRR
    uint64_t best_step = 0;
    double best_valid_mrr = 0.0;
    uint64_t steps_run = 0;
    LossBreakdown final_loss;
};

// Margin loss for one positive and its negative candidate row. Weights
// must sum to 1; log sigmoid goes through the stable softplus identity.
LossBreakdown loss(const EmbeddingModel& model, const Triple& positive, Side side,
                   std::span<const EntityId> candidates, std::span<const double> weights);

// Bias-corrected Adam on one row; t is the row's 1-based update count.
void adam_step(std::span<double> params, std::span<const double> grad, std::span<double> m,
               std::span<double> v, uint64_t t, double lr, double beta1, double beta2,
               double eps);

// Row-indexed gradient accumulators for one batch. Slots live in a flat
// arena that is reused across steps, so clearing a batch frees nothing.
class SparseGrads {
public:
    SparseGrads(size_t entity_width, size_t relation_width)
        : entity_width_(entity_width), relation_width_(relation_width) {}

    void clear();
    std::span<double> entity_row(EntityId e);
    std::span<double> relation_row(RelationId r);

    const std::vector<EntityId>& touched_entities() const { return entity_rows_; }
    const std::vector<RelationId>& touched_relations() const { return relation_rows_; }

private:
    size_t entity_width_, relation_width_;
    std::unordered_map<uint32_t, size_t> entity_slot_, relation_slot_;
    std::vector<double> entity_arena_, relation_arena_;
    std::vector<EntityId> entity_rows_;
    std::vector<RelationId> relation_rows_;
};

// Adds scale * d(loss)/d(params) for one positive/side into grads and
// returns the loss breakdown. Weights are treated as constants.
LossBreakdown accumulate_loss_gradients(const EmbeddingModel& model, const Triple& positive,
                                        Side side, std::span<const EntityId> candidates,
                                        std::span<const double> weights, double scale,
                                        SparseGrads& grads);

// Optimizes the model in place for config.steps batches. neighborhood must
// be non-null iff the sampler is a SANS variant. Logs every step; runs a
// filtered validation ranking every eval_every steps and after the last
// step, keeping the parameters with the best validation MRR.
TrainResult train(const TripleStore& store, EmbeddingModel& model, const TrainConfig& config,
                  const KHopNeighborhood* neighborhood, const LogSink& log);

}  // namespace sans
