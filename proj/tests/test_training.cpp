#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "sans/training.hpp"
#include "testutil.hpp"

using namespace sans;

namespace {

// Definition-level reference for the margin loss, sharing nothing with the
// library path: plain sigmoid + log.
double oracle_loss(const EmbeddingModel& m, const Triple& pos, Side side,
                   std::span<const EntityId> cands, std::span<const double> weights) {
    auto sigma = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
    double total = -std::log(sigma(m.gamma - m.score(pos.head, pos.relation, pos.tail)));
    for (size_t i = 0; i < cands.size(); ++i) {
        Triple neg = side == Side::Tail ? Triple{pos.head, pos.relation, cands[i]}
                                        : Triple{cands[i], pos.relation, pos.tail};
        total -= weights[i] * std::log(sigma(m.score(neg.head, neg.relation, neg.tail) - m.gamma));
    }
    return total;
}

EmbeddingModel tiny_model(ModelKind kind, uint32_t dim, uint64_t seed, double gamma = 2.0) {
    return init_model(kind, 6, 2, dim, gamma, seed);
}

// Batch loss with frozen weights: mean over positives, sum over both sides'
// candidate rows (used as the target function for finite differences).
double batch_loss(const EmbeddingModel& m, std::span<const Triple> positives,
                  const std::vector<std::vector<EntityId>>& cands_per_side,
                  const std::vector<std::vector<double>>& weights_per_side, uint32_t n) {
    double total = 0.0;
    for (int side_idx = 0; side_idx < 2; ++side_idx) {
        Side side = side_idx == 0 ? Side::Head : Side::Tail;
        for (size_t i = 0; i < positives.size(); ++i) {
            std::span<const EntityId> c(cands_per_side[side_idx].data() + i * n, n);
            std::span<const double> w(weights_per_side[side_idx].data() + i * n, n);
            total += loss(m, positives[i], side, c, w).total / positives.size();
        }
    }
    return total;
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("loss at the all-margin point is exactly 2 log 2") {
    // d_pos = gamma and every d_neg = gamma: both terms are -log sigma(0).
    EmbeddingModel m = tiny_model(ModelKind::TransE, 4, 1);
    // Zero all embeddings, gamma = 0: every distance is 0 = gamma.
    std::fill(m.entity_params.begin(), m.entity_params.end(), 0.0);
    std::fill(m.relation_params.begin(), m.relation_params.end(), 0.0);
    m.gamma = 0.0;

    std::vector<EntityId> cands{1, 2, 3};
    std::vector<double> weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
    LossBreakdown b = loss(m, {0, 0, 1}, Side::Tail, cands, weights);
    CHECK(std::fabs(b.positive_term - std::log(2.0)) <= 1e-12);
    CHECK(std::fabs(b.negative_term - std::log(2.0)) <= 1e-12);
    CHECK(std::fabs(b.total - 2.0 * std::log(2.0)) <= 1e-12);
    CHECK(std::fabs(b.total - (b.positive_term + b.negative_term)) <= 1e-9);
}

TEST_CASE("perfect model drives the loss toward zero") {
    EmbeddingModel m = tiny_model(ModelKind::TransE, 4, 2, /*gamma=*/20.0);
    auto h = m.entity_row(0);
    auto r = m.relation_row(0);
    auto t = m.entity_row(1);
    for (uint32_t i = 0; i < m.dim; ++i) t[i] = h[i] + r[i];  // d_pos = 0
    // Push one negative far away: d_neg >> gamma.
    auto far = m.entity_row(5);
    for (uint32_t i = 0; i < m.dim; ++i) far[i] = 50.0;

    std::vector<EntityId> cands{5};
    std::vector<double> weights{1.0};
    LossBreakdown b = loss(m, {0, 0, 1}, Side::Tail, cands, weights);
    CHECK(b.total < 1e-6);
    CHECK(b.total >= 0.0);
}

TEST_CASE("loss matches the definition-level oracle on random models") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        ModelKind kind = static_cast<ModelKind>(trial % 3);
        EmbeddingModel m = tiny_model(kind, 4, rng.next_u64());
        Triple pos{rng.uniform_u32(6), rng.uniform_u32(2), rng.uniform_u32(6)};
        std::vector<EntityId> cands(5);
        for (auto& c : cands) c = rng.uniform_u32(6);
        std::vector<double> weights(5, 0.2);
        Side side = trial % 2 == 0 ? Side::Head : Side::Tail;
        LossBreakdown b = loss(m, pos, side, cands, weights);
        CHECK(b.total == doctest::Approx(oracle_loss(m, pos, side, cands, weights)).epsilon(1e-10));
        CHECK(b.total >= 0.0);  // each term is -log of a probability
    }
}

TEST_CASE("adam matches a scalar reference trajectory to 1e-12") {
    // Minimize f(x) = (x - 3)^2 / 2, gradient x - 3.
    double x = 0.0, m1 = 0.0, v1 = 0.0;
    const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;

    // Independent textbook implementation.
    double ox = 0.0, om = 0.0, ov = 0.0;
    for (uint64_t t = 1; t <= 10; ++t) {
        double g = ox - 3.0;
        om = b1 * om + (1 - b1) * g;
        ov = b2 * ov + (1 - b2) * g * g;
        double mhat = om / (1 - std::pow(b1, static_cast<double>(t)));
        double vhat = ov / (1 - std::pow(b2, static_cast<double>(t)));
        ox -= lr * mhat / (std::sqrt(vhat) + eps);
    }

    for (uint64_t t = 1; t <= 10; ++t) {
        double g = x - 3.0;
        adam_step({&x, 1}, {&g, 1}, {&m1, 1}, {&v1, 1}, t, lr, b1, b2, eps);
    }
    CHECK(std::fabs(x - ox) <= 1e-12);
}

TEST_CASE("first adam step from zero state moves by about -lr * sign(g)") {
    std::vector<double> params{1.0, -2.0};
    std::vector<double> grad{0.5, -3.0};
    std::vector<double> m(2, 0.0), v(2, 0.0);
    adam_step(params, grad, m, v, 1, 0.01, 0.9, 0.999, 1e-8);
    CHECK(params[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
    CHECK(params[1] == doctest::Approx(-2.0 + 0.01).epsilon(1e-6));
}

TEST_CASE("batch gradients match finite differences for all kinds and weightings") {
    Rng rng(5);
    const uint32_t n = 3;
    for (ModelKind kind : {ModelKind::TransE, ModelKind::DistMult, ModelKind::RotatE}) {
        for (bool adversarial : {false, true}) {
            for (int trial = 0; trial < 8; ++trial) {
                EmbeddingModel m = tiny_model(kind, 6, rng.next_u64());
                std::vector<Triple> positives{{0, 0, 1}, {2, 1, 3}};

                // Frozen candidate rows and (possibly adversarial) weights.
                std::vector<std::vector<EntityId>> cands(2);
                std::vector<std::vector<double>> weights(2);
                for (int side_idx = 0; side_idx < 2; ++side_idx) {
                    Side side = side_idx == 0 ? Side::Head : Side::Tail;
                    for (const Triple& pos : positives) {
                        std::vector<double> scores;
                        std::vector<EntityId> row;
                        for (uint32_t j = 0; j < n; ++j) {
                            EntityId c = rng.uniform_u32(6);
                            row.push_back(c);
                            Triple neg = side == Side::Tail
                                             ? Triple{pos.head, pos.relation, c}
                                             : Triple{c, pos.relation, pos.tail};
                            scores.push_back(m.plausibility(neg.head, neg.relation, neg.tail));
                        }
                        auto w = adversarial ? adversarial_weights(scores, 1.0)
                                             : std::vector<double>(n, 1.0 / n);
                        cands[side_idx].insert(cands[side_idx].end(), row.begin(), row.end());
                        weights[side_idx].insert(weights[side_idx].end(), w.begin(), w.end());
                    }
                }

                // Analytic: mean over positives, sum over sides.
                SparseGrads grads(m.entity_width(), m.relation_width());
                for (int side_idx = 0; side_idx < 2; ++side_idx) {
                    Side side = side_idx == 0 ? Side::Head : Side::Tail;
                    for (size_t i = 0; i < positives.size(); ++i)
                        accumulate_loss_gradients(
                            m, positives[i], side,
                            {cands[side_idx].data() + i * n, n},
                            {weights[side_idx].data() + i * n, n},
                            1.0 / positives.size(), grads);
                }

                const double step = 1e-5;
                auto fd_check = [&](double* p, double analytic) {
                    double saved = *p;
                    *p = saved + step;
                    double up = batch_loss(m, positives, cands, weights, n);
                    *p = saved - step;
                    double down = batch_loss(m, positives, cands, weights, n);
                    *p = saved;
                    double fd = (up - down) / (2.0 * step);
                    CHECK(std::fabs(fd - analytic) <=
                          1e-4 * std::max({1.0, std::fabs(fd), std::fabs(analytic)}));
                };
                for (EntityId row : grads.touched_entities()) {
                    auto g = grads.entity_row(row);
                    for (size_t i = 0; i < g.size(); ++i)
                        fd_check(&m.entity_params[row * m.entity_width() + i], g[i]);
                }
                for (RelationId row : grads.touched_relations()) {
                    auto g = grads.relation_row(row);
                    for (size_t i = 0; i < g.size(); ++i)
                        fd_check(&m.relation_params[row * m.relation_width() + i], g[i]);
                }
            }
        }
    }
}

TEST_CASE("adversarial weights receive no gradient") {
    // Perturbing the weight vector must not change the parameter gradients
    // computed at those weights... i.e. gradients treat weights as constants:
    // grads scale linearly in w, so compare against a manual recomputation.
    EmbeddingModel m = tiny_model(ModelKind::TransE, 4, 7);
    std::vector<EntityId> cands{2, 3};
    std::vector<double> w1{0.5, 0.5};
    std::vector<double> w2{0.9, 0.1};

    SparseGrads g1(m.entity_width(), m.relation_width());
    SparseGrads g2(m.entity_width(), m.relation_width());
    SparseGrads g2_manual(m.entity_width(), m.relation_width());
    accumulate_loss_gradients(m, {0, 0, 1}, Side::Tail, cands, w1, 1.0, g1);
    accumulate_loss_gradients(m, {0, 0, 1}, Side::Tail, cands, w2, 1.0, g2);

    // Same candidates, different constant weights: positive-term gradient
    // identical; negative contributions scale by w. Verify on the relation
    // row, which every term touches.
    auto r1 = g1.relation_row(0);
    auto r2 = g2.relation_row(0);
    bool any_difference = false;
    for (size_t i = 0; i < r1.size(); ++i)
        if (r1[i] != r2[i]) any_difference = true;
    CHECK(any_difference);  // weights matter as constants...

    // ...but no extra term appears: recompute g2 from scratch and match.
    accumulate_loss_gradients(m, {0, 0, 1}, Side::Tail, cands, w2, 1.0, g2_manual);
    for (size_t i = 0; i < r2.size(); ++i)
        CHECK(r2[i] == doctest::Approx(g2_manual.relation_row(0)[i]).epsilon(1e-12));
}

TEST_CASE("learning rate zero leaves parameters bit-identical") {
    TripleStore store = test::make_store_n(6, 2, {{0, 0, 1}, {1, 1, 2}, {2, 0, 3}}, {{3, 0, 4}});
    EmbeddingModel m = tiny_model(ModelKind::TransE, 4, 11);
    std::vector<double> before_e = m.entity_params;
    std::vector<double> before_r = m.relation_params;

    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.steps = 25;
    cfg.learning_rate = 0.0;
    cfg.sampler.variant = SamplerVariant::Uniform;
    cfg.sampler.n = 4;
    cfg.sampler.seed = 5;
    train(store, m, cfg, nullptr, nullptr);

    CHECK(m.entity_params == before_e);
    CHECK(m.relation_params == before_r);
}

TEST_CASE("single-triple KG: loss decreases and orders positive below negative") {
    TripleStore store = test::make_store_n(2, 1, {{0, 0, 1}});
    EmbeddingModel m = init_model(ModelKind::TransE, 2, 1, 2, 2.0, 13);

    std::vector<double> losses;
    LogSink sink = [&losses](const std::string& line) {
        if (line.rfind("eval\t", 0) == 0) return;
        double loss_value = std::stod(line.substr(line.find('\t') + 1));
        losses.push_back(loss_value);
    };

    TrainConfig cfg;
    cfg.batch_size = 1;
    cfg.steps = 500;
    cfg.learning_rate = 0.01;
    cfg.sampler.variant = SamplerVariant::Uniform;
    cfg.sampler.n = 1;
    cfg.sampler.seed = 17;
    train(store, m, cfg, nullptr, sink);

    REQUIRE(losses.size() == 500);
    CHECK(losses.back() < losses.front());
    // Adam jitters step to step; the trend after warmup must still be
    // non-increasing. Compare means over consecutive 100-step windows.
    for (size_t w = 2; w < 5; ++w) {
        double prev = std::accumulate(losses.begin() + (w - 1) * 100, losses.begin() + w * 100, 0.0);
        double cur = std::accumulate(losses.begin() + w * 100, losses.begin() + (w + 1) * 100, 0.0);
        CHECK(cur <= prev + 1e-9);
    }

    // d(positive) must end below the distance of the corrupting candidate.
    double d_pos = m.score(0, 0, 1);
    double d_neg = m.score(0, 0, 0);  // only possible tail corruption
    CHECK(d_pos < d_neg);
}

TEST_CASE("training is deterministic given seeds") {
    TripleStore store = test::make_store_n(
        8, 2, {{0, 0, 1}, {1, 0, 2}, {2, 1, 3}, {3, 0, 4}, {4, 1, 5}}, {{5, 0, 6}});
    KHopNeighborhood hood = build_exact_khop(store, 2);

    auto run = [&](uint64_t seed) {
        EmbeddingModel m = init_model(ModelKind::DistMult, 8, 2, 4, 2.0, seed);
        std::ostringstream log;
        LogSink sink = [&log](const std::string& line) { log << line << '\n'; };
        TrainConfig cfg;
        cfg.batch_size = 2;
        cfg.steps = 40;
        cfg.learning_rate = 0.01;
        cfg.eval_every = 10;
        cfg.seed = seed;
        cfg.sampler.variant = SamplerVariant::Sans;
        cfg.sampler.n = 4;
        cfg.sampler.seed = seed + 1;
        train(store, m, cfg, &hood, sink);
        return log.str();
    };

    CHECK(run(21) == run(21));
    CHECK(run(21) != run(22));
}

TEST_CASE("self-adversarial training runs and stays deterministic for every kind") {
    TripleStore store = test::make_store_n(
        10, 2, {{0, 0, 1}, {1, 0, 2}, {2, 1, 3}, {3, 0, 4}, {4, 1, 5}, {5, 0, 6}, {6, 0, 7}},
        {{7, 0, 8}});
    KHopNeighborhood hood = build_exact_khop(store, 2);

    for (ModelKind kind : {ModelKind::TransE, ModelKind::DistMult, ModelKind::RotatE}) {
        auto run = [&]() {
            EmbeddingModel m = init_model(kind, 10, 2, 4, 2.0, 77);
            std::ostringstream log;
            TrainConfig cfg;
            cfg.batch_size = 4;
            cfg.steps = 30;
            cfg.learning_rate = 0.01;
            cfg.eval_every = 10;
            cfg.seed = 77;
            cfg.sampler.variant = SamplerVariant::Sans;
            cfg.sampler.adversarial = true;
            cfg.sampler.adv_temperature = 0.8;
            cfg.sampler.n = 4;
            cfg.sampler.seed = 78;
            train(store, m, cfg, &hood, [&log](const std::string& l) { log << l << '\n'; });
            return log.str();
        };
        std::string first = run();
        CHECK(first == run());
        CHECK(first.find("eval\t") != std::string::npos);
    }
}

TEST_CASE("skip-positive fallback rows drop out of the loss without derailing a step") {
    // Star center 0 with all four (0, r, leaf) observed: tail corruption of
    // any train triple draws from row(0) = {leaves}, every candidate is
    // rejected, and SkipPositive marks the whole row. Head corruption still
    // contributes, so steps complete with a finite loss.
    TripleStore star = test::make_store_n(
        5, 1, {{0, 0, 1}, {0, 0, 2}, {0, 0, 3}, {0, 0, 4}}, {{1, 0, 0}});
    KHopNeighborhood hood = build_exact_khop(star, 1);
    EmbeddingModel m = init_model(ModelKind::TransE, 5, 1, 3, 2.0, 5);
    TrainConfig cfg;
    cfg.batch_size = 4;
    cfg.steps = 10;
    cfg.learning_rate = 0.01;
    cfg.sampler.variant = SamplerVariant::Sans;
    cfg.sampler.n = 3;
    cfg.sampler.fallback = FallbackPolicy::SkipPositive;
    cfg.sampler.seed = 6;
    TrainResult result = train(star, m, cfg, &hood, nullptr);
    CHECK(result.steps_run == 10);
    CHECK(std::isfinite(result.final_loss.total));
}

TEST_CASE("train requires a neighborhood exactly for SANS variants") {
    TripleStore store = test::make_store_n(4, 1, {{0, 0, 1}, {1, 0, 2}});
    KHopNeighborhood hood = build_exact_khop(store, 1);
    EmbeddingModel m = tiny_model(ModelKind::TransE, 2, 19);
    TrainConfig cfg;
    cfg.steps = 1;
    cfg.batch_size = 1;
    cfg.sampler.variant = SamplerVariant::Sans;
    CHECK_THROWS_AS(train(store, m, cfg, nullptr, nullptr), ContractError);
    cfg.sampler.variant = SamplerVariant::Uniform;
    CHECK_THROWS_AS(train(store, m, cfg, &hood, nullptr), ContractError);
}

TEST_CASE("metrics log lines have the documented shape") {
    TripleStore store = test::make_store_n(4, 1, {{0, 0, 1}, {1, 0, 2}}, {{2, 0, 3}});
    EmbeddingModel m = init_model(ModelKind::TransE, 4, 1, 2, 2.0, 23);
    std::vector<std::string> lines;
    TrainConfig cfg;
    cfg.batch_size = 2;
    cfg.steps = 4;
    cfg.eval_every = 2;
    cfg.learning_rate = 0.001;
    cfg.sampler.n = 2;
    train(store, m, cfg, nullptr, [&lines](const std::string& l) { lines.push_back(l); });

    int step_lines = 0, eval_lines = 0;
    for (const std::string& line : lines) {
        if (line.rfind("eval\t", 0) == 0) {
            ++eval_lines;
            int tabs = static_cast<int>(std::count(line.begin(), line.end(), '\t'));
            CHECK(tabs == 5);  // eval step mrr h1 h3 h10
        } else {
            ++step_lines;
            int tabs = static_cast<int>(std::count(line.begin(), line.end(), '\t'));
            CHECK(tabs == 3);  // step loss pos neg
        }
    }
    CHECK(step_lines == 4);
    CHECK(eval_lines == 2);  // steps 2 and 4 (final step coincides)
}

}  // TEST_SUITE
