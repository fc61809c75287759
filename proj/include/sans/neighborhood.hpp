#pragma once
// k-hop candidate structure for negative sampling.
//
// Exact rows hold every entity with a walk of length k or k-1 from the
// source (sign of A^k + A^{k-1}, diagonal removed); Walks rows approximate
// that set with visit counts accumulated over omega random walks of length k
// per source. Rows are relation-agnostic and stored as one CSR block.
//
// Neighborhood file layout (all integers little-endian):
//   magic "SANSKHOP" | version u16 | kind u8 | k u32 | omega u32 (0 = Exact)
//   | seed u64 | entity count u64
//   then per row: length u32, then `length` entries of
//   entity id u32            (Exact)
//   entity id u32, count u32 (Walks)

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sans/graph.hpp"
#include "sans/types.hpp"

namespace sans {

enum class NeighborhoodKind : uint8_t { Exact = 0, Walks = 1 };

// Adjacency orientation used when expanding walks. Symmetric treats every
// train edge as bidirectional; Directed follows out-edges only.
enum class Directedness : uint8_t { Symmetric, Directed };

struct KHopNeighborhood {
    NeighborhoodKind kind = NeighborhoodKind::Exact;
    uint32_t k = 0;
    uint32_t omega = 0;           // walk count, 0 for Exact
    uint64_t construction_seed = 0;  // 0 for Exact
    uint64_t num_entities = 0;

    std::vector<uint64_t> row_offsets;  // num_entities + 1
    std::vector<EntityId> members;      // sorted within each row
    std::vector<uint32_t> counts;       // parallel to members, Walks only

    // Derived at build/load time, not serialized: per-row inclusive prefix
    // sums of counts, for O(log row) weighted draws.
    std::vector<uint64_t> count_cum;

    std::span<const EntityId> row(EntityId e) const {
        return {members.data() + row_offsets[e], row_offsets[e + 1] - row_offsets[e]};
    }
    std::span<const uint32_t> row_counts(EntityId e) const {
        return {counts.data() + row_offsets[e], row_offsets[e + 1] - row_offsets[e]};
    }
    std::span<const uint64_t> row_count_cum(EntityId e) const {
        return {count_cum.data() + row_offsets[e], row_offsets[e + 1] - row_offsets[e]};
    }

    bool contains(EntityId e, EntityId candidate) const {
        auto r = row(e);
        return std::binary_search(r.begin(), r.end(), candidate);
    }

    uint64_t total_entries() const { return members.size(); }

    // Rebuilds count_cum (no-op for Exact rows).
    void finalize();
};

struct FillReport {
    uint32_t k = 0;
    double filled_fraction = 0.0;  // nonzero (entity, entity) cells / |E|^2
};

struct ExactBuildOptions {
    Directedness direction = Directedness::Symmetric;
    uint64_t max_entries = 2'000'000'000;  // abort above this many stored cells
    int threads = 1;
};

// Membership equal to sign(A^k + A^{k-1}) with A^0 = I and the diagonal
// removed, computed row-by-row with boolean frontier expansion (the running
// pair of exact-walk-length sets). k = 0 is a contract violation.
KHopNeighborhood build_exact_khop(const TripleStore& store, uint32_t k,
                                  const ExactBuildOptions& options = {});

// omega independent walks of length k from every entity over the symmetrized
// train adjacency, choosing uniformly among incident edges at each step.
// Every non-source node visited at steps 1..k accumulates one count.
// Deterministic given seed; walk streams are per-entity, so rows built with
// omega = a are prefixes of rows built with omega = a + b.
KHopNeighborhood build_rw_khop(const TripleStore& store, uint32_t k, uint32_t omega,
                               uint64_t seed, int threads = 1);

FillReport fill_percentage(const KHopNeighborhood& n, uint64_t num_entities);

void save_neighborhood(const KHopNeighborhood& n, const std::filesystem::path& path);
KHopNeighborhood load_neighborhood(const std::filesystem::path& path);

}  // namespace sans
