#include "sans/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "sans/errors.hpp"
#include "sans/evaluation.hpp"
#include "sans/rng.hpp"

namespace sans {

namespace {

// -log sigmoid(x) = softplus(-x), computed without overflow.
double neg_log_sigmoid(double x) {
    double z = -x;
    return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z)));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

std::string format_step_line(uint64_t step, const LossBreakdown& b) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%llu\t%.10g\t%.10g\t%.10g",
                  static_cast<unsigned long long>(step), b.total, b.positive_term,
                  b.negative_term);
    return buf;
}

std::string format_eval_line(uint64_t step, const RankMetrics& m) {
    char buf[200];
    std::snprintf(buf, sizeof(buf), "eval\t%llu\t%.6f\t%.6f\t%.6f\t%.6f",
                  static_cast<unsigned long long>(step), m.mrr, m.hits.at(1), m.hits.at(3),
                  m.hits.at(10));
    return buf;
}

}  // namespace

LossBreakdown loss(const EmbeddingModel& model, const Triple& positive, Side side,
                   std::span<const EntityId> candidates, std::span<const double> weights) {
    LossBreakdown b;
    b.positive_term =
        neg_log_sigmoid(model.gamma - model.score(positive.head, positive.relation, positive.tail));
    for (size_t i = 0; i < candidates.size(); ++i) {
        Triple neg = side == Side::Tail
                         ? Triple{positive.head, positive.relation, candidates[i]}
                         : Triple{candidates[i], positive.relation, positive.tail};
        b.negative_term +=
            weights[i] * neg_log_sigmoid(model.score(neg.head, neg.relation, neg.tail) - model.gamma);
    }
    b.total = b.positive_term + b.negative_term;
    if (!std::isfinite(b.total))
        throw NumericError("non-finite loss for positive (" + std::to_string(positive.head) + ", " +
                           std::to_string(positive.relation) + ", " +
                           std::to_string(positive.tail) + ")");
    return b;
}

void adam_step(std::span<double> params, std::span<const double> grad, std::span<double> m,
               std::span<double> v, uint64_t t, double lr, double beta1, double beta2,
               double eps) {
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
        double m_hat = m[i] / bc1;
        double v_hat = v[i] / bc2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

void SparseGrads::clear() {
    entity_slot_.clear();
    relation_slot_.clear();
    entity_rows_.clear();
    relation_rows_.clear();
}

std::span<double> SparseGrads::entity_row(EntityId e) {
    auto [it, fresh] = entity_slot_.try_emplace(e, entity_rows_.size());
    if (fresh) {
        entity_rows_.push_back(e);
        size_t needed = entity_rows_.size() * entity_width_;
        if (entity_arena_.size() < needed) entity_arena_.resize(needed);
        std::fill_n(entity_arena_.begin() + it->second * entity_width_, entity_width_, 0.0);
    }
    return {entity_arena_.data() + it->second * entity_width_, entity_width_};
}

std::span<double> SparseGrads::relation_row(RelationId r) {
    auto [it, fresh] = relation_slot_.try_emplace(r, relation_rows_.size());
    if (fresh) {
        relation_rows_.push_back(r);
        size_t needed = relation_rows_.size() * relation_width_;
        if (relation_arena_.size() < needed) relation_arena_.resize(needed);
        std::fill_n(relation_arena_.begin() + it->second * relation_width_, relation_width_, 0.0);
    }
    return {relation_arena_.data() + it->second * relation_width_, relation_width_};
}

LossBreakdown accumulate_loss_gradients(const EmbeddingModel& model, const Triple& positive,
                                        Side side, std::span<const EntityId> candidates,
                                        std::span<const double> weights, double scale,
                                        SparseGrads& grads) {
    size_t ew = model.entity_width();
    size_t rw = model.relation_width();
    thread_local std::vector<double> gh, gr, gt, acc_entity, acc_relation;
    gh.resize(ew);  // fully overwritten by score_gradients
    gr.resize(rw);
    gt.resize(ew);
    // The anchor entity and the relation appear in every term of this row;
    // accumulate them locally and scatter into the arena once at the end.
    acc_entity.assign(ew, 0.0);
    acc_relation.assign(rw, 0.0);

    auto axpy = [](std::span<double> y, double a, std::span<const double> x) {
        for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
    };

    // One fused score+gradient pass per triple. The corrupted-side row
    // differs per term and scatters immediately; scatter order relative to
    // the final anchor flush does not matter for sums.
    auto add_term = [&](const Triple& t, auto&& coeff_of) {
        double dist = score_gradients(model, t.head, t.relation, t.tail, gh, gr, gt);
        double coeff = coeff_of(dist);
        if (side == Side::Tail) {
            axpy(acc_entity, coeff, gh);
            axpy(grads.entity_row(t.tail), coeff, gt);
        } else {
            axpy(acc_entity, coeff, gt);
            axpy(grads.entity_row(t.head), coeff, gh);
        }
        axpy(acc_relation, coeff, gr);
        return dist;
    };

    LossBreakdown b;
    // Positive: d/d(d_pos) of softplus(d_pos - gamma) = sigmoid(d_pos - gamma).
    double d_pos =
        add_term(positive, [&](double d) { return scale * sigmoid(d - model.gamma); });
    b.positive_term = neg_log_sigmoid(model.gamma - d_pos);

    // Negatives: d/d(d_i) of w_i softplus(gamma - d_i) = -w_i sigmoid(gamma - d_i).
    for (size_t i = 0; i < candidates.size(); ++i) {
        Triple neg = side == Side::Tail
                         ? Triple{positive.head, positive.relation, candidates[i]}
                         : Triple{candidates[i], positive.relation, positive.tail};
        double d_neg = add_term(
            neg, [&](double d) { return -scale * weights[i] * sigmoid(model.gamma - d); });
        b.negative_term += weights[i] * neg_log_sigmoid(d_neg - model.gamma);
    }

    EntityId anchor = side == Side::Tail ? positive.head : positive.tail;
    axpy(grads.entity_row(anchor), 1.0, acc_entity);
    axpy(grads.relation_row(positive.relation), 1.0, acc_relation);

    b.total = b.positive_term + b.negative_term;
    return b;
}

namespace {

struct AdamTable {
    std::vector<double> m, v;
    std::vector<uint64_t> steps;  // per-row update counts

    void init(size_t rows, size_t width) {
        m.assign(rows * width, 0.0);
        v.assign(rows * width, 0.0);
        steps.assign(rows, 0);
    }
};

// Applies the adversarial reweighting in place for every non-skipped row.
void apply_adversarial_weights(const EmbeddingModel& model, std::span<const Triple> positives,
                               NegativeBatch& batch, double temperature) {
    std::vector<double> plausibilities(batch.n);
    for (uint64_t i = 0; i < batch.batch; ++i) {
        if (batch.skipped[i]) continue;
        const Triple& pos = positives[i];
        auto row = batch.row(i);
        for (uint32_t j = 0; j < batch.n; ++j) {
            Triple neg = batch.side == Side::Tail ? Triple{pos.head, pos.relation, row[j]}
                                                  : Triple{row[j], pos.relation, pos.tail};
            plausibilities[j] = model.plausibility(neg.head, neg.relation, neg.tail);
        }
        auto w = adversarial_weights(plausibilities, temperature);
        std::copy(w.begin(), w.end(), batch.weight_row(i).begin());
    }
}

}  // namespace

TrainResult train(const TripleStore& store, EmbeddingModel& model, const TrainConfig& config,
                  const KHopNeighborhood* neighborhood, const LogSink& log) {
    if (config.batch_size == 0) throw ContractError("train: batch_size must be >= 1");
    if (config.learning_rate < 0.0) throw ContractError("train: learning_rate must be >= 0");
    if (config.sampler.needs_neighborhood() != (neighborhood != nullptr))
        throw ContractError("train: neighborhood must be supplied iff the sampler is a SANS variant");
    if (store.train.empty()) throw DataError("train split is empty");

    const SamplerConfig& sampler = config.sampler;
    Rng shuffle_rng(config.seed);
    Rng sample_rng(sampler.seed);

    std::vector<uint64_t> order(store.train.size());
    for (uint64_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle_rng.shuffle(order);
    uint64_t cursor = 0;

    AdamTable entity_state, relation_state;
    entity_state.init(model.num_entities, model.entity_width());
    relation_state.init(model.num_relations, model.relation_width());

    TrainResult result;
    result.best_model = model;
    bool have_valid = !store.valid.empty();

    SparseGrads grads(model.entity_width(), model.relation_width());
    std::vector<Triple> batch;
    batch.reserve(config.batch_size);

    auto run_eval = [&](uint64_t step) {
        EvalOptions opts;
        opts.threads = config.threads;
        EvalReport report = evaluate(model, store, Split::Valid, opts);
        if (log) log(format_eval_line(step, report.all));
        if (report.all.mrr > result.best_valid_mrr || result.best_step == 0) {
            result.best_valid_mrr = report.all.mrr;
            result.best_step = step;
            result.best_model = model;
        }
    };

    for (uint64_t step = 1; step <= config.steps; ++step) {
        batch.clear();
        uint64_t take = std::min<uint64_t>(config.batch_size, order.size() - cursor);
        for (uint64_t i = 0; i < take; ++i) batch.push_back(store.train[order[cursor + i]]);
        cursor += take;
        if (cursor >= order.size()) {  // epoch boundary
            shuffle_rng.shuffle(order);
            cursor = 0;
        }

        grads.clear();
        LossBreakdown step_loss;
        for (Side side : {Side::Head, Side::Tail}) {
            NegativeBatch negatives =
                sampler.variant == SamplerVariant::Uniform
                    ? sample_uniform(store, batch, side, sampler.n, sample_rng, sampler.filter)
                    : sample_sans(store, *neighborhood, batch, side, sampler.n, sampler,
                                  sample_rng);
            if (sampler.adversarial)
                apply_adversarial_weights(model, batch, negatives, sampler.adv_temperature);

            uint64_t contributing = 0;
            for (uint64_t i = 0; i < negatives.batch; ++i)
                if (!negatives.skipped[i]) ++contributing;
            if (contributing == 0) continue;
            double scale = 1.0 / static_cast<double>(contributing);

            for (uint64_t i = 0; i < negatives.batch; ++i) {
                if (negatives.skipped[i]) continue;
                LossBreakdown b = accumulate_loss_gradients(model, batch[i], side,
                                                            negatives.row(i),
                                                            negatives.weight_row(i), scale, grads);
                step_loss.positive_term += scale * b.positive_term;
                step_loss.negative_term += scale * b.negative_term;
            }
        }
        step_loss.total = step_loss.positive_term + step_loss.negative_term;
        if (!std::isfinite(step_loss.total))
            throw NumericError("non-finite loss at step " + std::to_string(step));

        size_t ew = model.entity_width();
        for (EntityId row : grads.touched_entities()) {
            uint64_t t = ++entity_state.steps[row];
            adam_step(model.entity_row(row), grads.entity_row(row),
                      {entity_state.m.data() + row * ew, ew},
                      {entity_state.v.data() + row * ew, ew}, t, config.learning_rate,
                      config.adam_beta1, config.adam_beta2, config.adam_epsilon);
        }
        size_t rw = model.relation_width();
        for (RelationId row : grads.touched_relations()) {
            uint64_t t = ++relation_state.steps[row];
            adam_step(model.relation_row(row), grads.relation_row(row),
                      {relation_state.m.data() + row * rw, rw},
                      {relation_state.v.data() + row * rw, rw}, t, config.learning_rate,
                      config.adam_beta1, config.adam_beta2, config.adam_epsilon);
        }

        if (log) log(format_step_line(step, step_loss));
        result.final_loss = step_loss;
        result.steps_run = step;

        bool last = step == config.steps;
        if (have_valid && ((config.eval_every > 0 && step % config.eval_every == 0) || last))
            run_eval(step);
    }

    if (!have_valid) result.best_model = model;
    return result;
}

}  // namespace sans
