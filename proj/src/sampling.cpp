#include "sans/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sans/errors.hpp"

namespace sans {

namespace {

Triple complete(const Triple& positive, Side side, EntityId candidate) {
    return side == Side::Tail ? Triple{positive.head, positive.relation, candidate}
                              : Triple{candidate, positive.relation, positive.tail};
}

std::string describe(const Triple& t) {
    return "(" + std::to_string(t.head) + ", " + std::to_string(t.relation) + ", " +
           std::to_string(t.tail) + ")";
}

// Fills dest with n uniform negatives for one positive. Budget counts
// rejections across the whole row.
void uniform_row(const TripleStore& store, const Triple& positive, Side side,
                 std::span<EntityId> dest, Rng& rng, ObservedFilter filter) {
    uint64_t num_entities = store.num_entities();
    uint64_t budget = 100ull * dest.size();
    for (size_t j = 0; j < dest.size(); ++j) {
        for (;;) {
            EntityId cand = static_cast<EntityId>(rng.uniform(num_entities));
            if (!store.is_observed(complete(positive, side, cand), filter)) {
                dest[j] = cand;
                break;
            }
            if (budget-- == 0)
                throw SamplingError("uniform sampling exhausted its rejection budget for positive " +
                                    describe(positive));
        }
    }
}

}  // namespace

const char* sampler_variant_name(SamplerVariant v) {
    switch (v) {
        case SamplerVariant::Uniform: return "uniform";
        case SamplerVariant::Sans: return "sans";
        default: return "rw-sans";
    }
}

NegativeBatch sample_uniform(const TripleStore& store, std::span<const Triple> positives,
                             Side side, uint32_t n, Rng& rng, ObservedFilter filter) {
    if (positives.empty()) throw ContractError("sample_uniform: positives must be nonempty");
    if (n == 0) throw ContractError("sample_uniform: n must be >= 1");

    NegativeBatch batch;
    batch.side = side;
    batch.n = n;
    batch.batch = positives.size();
    batch.candidates.resize(positives.size() * n);
    batch.weights.assign(positives.size() * n, 1.0 / n);
    batch.skipped.assign(positives.size(), 0);

    for (size_t i = 0; i < positives.size(); ++i) {
        std::span<EntityId> dest(batch.candidates.data() + i * n, n);
        uniform_row(store, positives[i], side, dest, rng, filter);
    }
    return batch;
}

NegativeBatch sample_sans(const TripleStore& store, const KHopNeighborhood& neighborhood,
                          std::span<const Triple> positives, Side side, uint32_t n,
                          const SamplerConfig& config, Rng& rng) {
    if (positives.empty()) throw ContractError("sample_sans: positives must be nonempty");
    if (n == 0) throw ContractError("sample_sans: n must be >= 1");
    if (neighborhood.num_entities != store.num_entities())
        throw ContractError("sample_sans: neighborhood was built over " +
                            std::to_string(neighborhood.num_entities) + " entities, store has " +
                            std::to_string(store.num_entities()));

    bool weighted = neighborhood.kind == NeighborhoodKind::Walks;

    NegativeBatch batch;
    batch.side = side;
    batch.n = n;
    batch.batch = positives.size();
    batch.candidates.resize(positives.size() * n, 0);
    batch.weights.assign(positives.size() * n, 1.0 / n);
    batch.skipped.assign(positives.size(), 0);

    for (size_t i = 0; i < positives.size(); ++i) {
        const Triple& positive = positives[i];
        EntityId anchor = side == Side::Tail ? positive.head : positive.tail;
        auto row = neighborhood.row(anchor);
        std::span<EntityId> dest(batch.candidates.data() + i * n, n);

        bool fell_back = row.empty();
        if (!fell_back) {
            auto cum = weighted ? neighborhood.row_count_cum(anchor) : std::span<const uint64_t>{};
            uint64_t total = weighted ? cum.back() : row.size();
            uint64_t budget = 100ull * n;
            for (size_t j = 0; j < n && !fell_back; ++j) {
                for (;;) {
                    uint64_t pick = rng.uniform(total);
                    EntityId cand;
                    if (weighted) {
                        size_t idx = static_cast<size_t>(
                            std::upper_bound(cum.begin(), cum.end(), pick) - cum.begin());
                        cand = row[idx];
                    } else {
                        cand = row[pick];
                    }
                    if (!store.is_observed(complete(positive, side, cand), config.filter)) {
                        dest[j] = cand;
                        break;
                    }
                    if (budget-- == 0) {
                        fell_back = true;
                        break;
                    }
                }
            }
        }

        if (fell_back) {
            if (config.fallback == FallbackPolicy::SkipPositive) {
                batch.skipped[i] = 1;
                std::fill(dest.begin(), dest.end(), EntityId{0});
            } else {
                uniform_row(store, positive, side, dest, rng, config.filter);
            }
        }
    }
    return batch;
}

std::vector<double> adversarial_weights(std::span<const double> scores, double temperature) {
    if (scores.empty()) throw ContractError("adversarial_weights: need at least one score");

    double max_term = -std::numeric_limits<double>::infinity();
    for (double s : scores) {
        if (!std::isfinite(s)) throw NumericError("adversarial_weights: non-finite score");
        max_term = std::max(max_term, temperature * s);
    }

    std::vector<double> w(scores.size());
    double total = 0.0;
    for (size_t i = 0; i < scores.size(); ++i) {
        w[i] = std::exp(temperature * scores[i] - max_term);
        total += w[i];
    }
    for (double& x : w) x /= total;
    return w;
}

}  // namespace sans
