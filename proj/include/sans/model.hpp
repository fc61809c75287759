#pragma once
// Embedding parameter tables and score functions.
//
// All three kinds share one distance convention: score() returns d_r with
// lower = more plausible, so the margin loss applies verbatim. DistMult's
// trilinear product is negated to fit; RotatE relations are stored as phases,
// which keeps the complex coefficients on the unit circle structurally.
//
// Checkpoint layout (little-endian):
//   magic "SANSCKPT" | version u16 | kind u8 | d u32 | gamma f64
//   | |E| u64 | |R| u64 | entity rows f32 row-major | relation rows f32
// kind byte: 0 TransE (L1), 1 DistMult, 2 RotatE, 3 TransE with L2 norm.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sans/types.hpp"

namespace sans {

enum class ModelKind : uint8_t { TransE = 0, DistMult = 1, RotatE = 2 };

const char* model_kind_name(ModelKind kind);

struct EmbeddingModel {
    ModelKind kind = ModelKind::TransE;
    bool transe_l2 = false;  // TransE only: L2 norm instead of the default L1
    uint32_t dim = 0;
    double gamma = 0.0;
    uint64_t num_entities = 0;
    uint64_t num_relations = 0;

    // RotatE entity rows hold dim complex values as [re_0..re_{d-1},
    // im_0..im_{d-1}]; RotatE relation rows hold dim phases in radians.
    std::vector<double> entity_params;
    std::vector<double> relation_params;

    size_t entity_width() const { return kind == ModelKind::RotatE ? 2ull * dim : dim; }
    size_t relation_width() const { return dim; }

    std::span<double> entity_row(EntityId e) {
        return {entity_params.data() + e * entity_width(), entity_width()};
    }
    std::span<const double> entity_row(EntityId e) const {
        return {entity_params.data() + e * entity_width(), entity_width()};
    }
    std::span<double> relation_row(RelationId r) {
        return {relation_params.data() + r * relation_width(), relation_width()};
    }
    std::span<const double> relation_row(RelationId r) const {
        return {relation_params.data() + r * relation_width(), relation_width()};
    }

    // Distance d_r(h, t); lower = more plausible.
    double score(EntityId h, RelationId r, EntityId t) const;

    // Plausibility used by self-adversarial weighting: gamma - d_r.
    double plausibility(EntityId h, RelationId r, EntityId t) const {
        return gamma - score(h, r, t);
    }
};

// Parameters uniform in [-(gamma + 2)/d, +(gamma + 2)/d]; RotatE phases
// uniform in [-pi, pi). Deterministic given seed.
EmbeddingModel init_model(ModelKind kind, uint64_t num_entities, uint64_t num_relations,
                          uint32_t dim, double gamma, uint64_t seed, bool transe_l2 = false);

// Analytic partials of d_r w.r.t. the h, r, t rows. Output spans must match
// the row widths. The L1 subgradient at 0 is 0. Returns d_r.
double score_gradients(const EmbeddingModel& model, EntityId h, RelationId r, EntityId t,
                       std::span<double> grad_h, std::span<double> grad_r,
                       std::span<double> grad_t);

// Fills out[c] = d_r for every candidate completion c of the given triple's
// corrupted side. out.size() must equal num_entities.
void score_candidates(const EmbeddingModel& model, Side side, const Triple& triple,
                      std::span<double> out);

void save_checkpoint(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_checkpoint(const std::filesystem::path& path);

}  // namespace sans
