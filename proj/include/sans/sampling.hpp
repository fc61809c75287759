#pragma once
// Negative triple generation.
//
// Uniform draws corrupt entities from all of E; SANS restricts candidates to
// the anchor entity's k-hop row (uniform over Exact members, proportional to
// visit counts for Walks rows). Candidates completing an observed triple are
// rejected and redrawn. Self-adversarial variants reuse these candidate sets
// and only reweight them, which is applied at training time.

#include <cstdint>
#include <span>
#include <vector>

#include "sans/graph.hpp"
#include "sans/neighborhood.hpp"
#include "sans/rng.hpp"
#include "sans/types.hpp"

namespace sans {

enum class SamplerVariant : uint8_t { Uniform, Sans, RwSans };

// What to do with a positive whose SANS row is empty or fully rejected.
enum class FallbackPolicy : uint8_t { UniformFallback, SkipPositive };

const char* sampler_variant_name(SamplerVariant v);

struct SamplerConfig {
    SamplerVariant variant = SamplerVariant::Uniform;
    bool adversarial = false;
    uint32_t n = 128;              // negatives per positive
    uint32_t k = 2;                // hop radius (SANS variants)
    double adv_temperature = 1.0;  // adversarial variants
    FallbackPolicy fallback = FallbackPolicy::UniformFallback;
    ObservedFilter filter = ObservedFilter::AllSplits;
    uint64_t seed = 0;

    bool needs_neighborhood() const { return variant != SamplerVariant::Uniform; }
};

struct NegativeBatch {
    Side side = Side::Tail;
    uint32_t n = 0;
    uint64_t batch = 0;
    std::vector<EntityId> candidates;  // batch x n, row-major
    std::vector<double> weights;       // batch x n, each row sums to 1
    std::vector<uint8_t> skipped;      // batch; 1 = excluded from the loss

    std::span<const EntityId> row(uint64_t i) const {
        return {candidates.data() + i * n, n};
    }
    std::span<double> weight_row(uint64_t i) {
        return {weights.data() + i * n, n};
    }
    std::span<const double> weight_row(uint64_t i) const {
        return {weights.data() + i * n, n};
    }
};

// Uniform corruption with rejection of observed completions; weights 1/n.
// Throws SamplingError when a positive exhausts 100*n rejections.
NegativeBatch sample_uniform(const TripleStore& store, std::span<const Triple> positives,
                             Side side, uint32_t n, Rng& rng,
                             ObservedFilter filter = ObservedFilter::AllSplits);

// SANS / RW-SANS corruption from the anchor entity's neighborhood row
// (anchor = head for tail corruption and vice versa). Rows that are empty or
// exhaust the rejection budget fall back per config.fallback.
NegativeBatch sample_sans(const TripleStore& store, const KHopNeighborhood& neighborhood,
                          std::span<const Triple> positives, Side side, uint32_t n,
                          const SamplerConfig& config, Rng& rng);

// Softmax of temperature * score with max-subtraction. Scores are
// plausibilities (higher = more plausible); weights are treated as constants
// by the loss. Non-finite scores raise NumericError.
std::vector<double> adversarial_weights(std::span<const double> scores, double temperature);

}  // namespace sans
