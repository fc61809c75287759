#pragma once
// Dictionary-encoded knowledge graph storage.
//
// A TripleStore holds the three benchmark splits as dense-id triples, an
// observed-triple index over their union (with per-split membership bits),
// and a CSR adjacency over the train split (out-edges and in-edges kept
// separately so traversals can run directed or symmetrized).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sans/errors.hpp"
#include "sans/types.hpp"

namespace sans {

class Vocabulary {
public:
    // Returns the existing id or assigns the next dense one.
    uint32_t get_or_add(std::string_view name);

    std::optional<uint32_t> lookup(std::string_view name) const;

    const std::string& name(uint32_t id) const { return names_.at(id); }
    const std::vector<std::string>& names() const { return names_; }
    uint32_t size() const { return static_cast<uint32_t>(names_.size()); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, uint32_t> index_;
};

// Split membership bits stored in the observed index.
enum : uint8_t {
    kInTrain = 1,
    kInValid = 2,
    kInTest = 4,
};

// Which splits candidate rejection checks against during sampling.
enum class ObservedFilter : uint8_t { AllSplits, TrainOnly };

struct Edge {
    RelationId relation;
    EntityId neighbor;
};

class TripleStore {
public:
    Vocabulary entities;
    Vocabulary relations;
    std::vector<Triple> train;
    std::vector<Triple> valid;
    std::vector<Triple> test;

    uint32_t num_entities() const { return entities.size(); }
    uint32_t num_relations() const { return relations.size(); }

    const std::vector<Triple>& split(Split s) const {
        switch (s) {
            case Split::Train: return train;
            case Split::Valid: return valid;
            default: return test;
        }
    }

    // True iff t appears in train ∪ valid ∪ test. Out-of-range ids are a
    // contract violation.
    bool is_observed(const Triple& t) const;

    // Membership restricted by filter (AllSplits = any split, TrainOnly).
    bool is_observed(const Triple& t, ObservedFilter filter) const;

    // Train-split adjacency. Out-edges of e are (relation, tail) pairs of
    // train triples with head e; in-edges hold (relation, head) of triples
    // with tail e. Duplicated train lines contribute duplicate edges, so
    // the out-degree sum equals |train|.
    std::span<const Edge> out_edges(EntityId e) const {
        return {out_edges_.data() + out_offsets_[e], out_offsets_[e + 1] - out_offsets_[e]};
    }
    std::span<const Edge> in_edges(EntityId e) const {
        return {in_edges_.data() + in_offsets_[e], in_offsets_[e + 1] - in_offsets_[e]};
    }

    // Degree in the symmetrized multigraph (out + in incident edges).
    uint64_t degree(EntityId e) const {
        return (out_offsets_[e + 1] - out_offsets_[e]) + (in_offsets_[e + 1] - in_offsets_[e]);
    }

    // j-th incident edge of e in the symmetrized view, j < degree(e).
    EntityId neighbor(EntityId e, uint64_t j) const {
        uint64_t out_deg = out_offsets_[e + 1] - out_offsets_[e];
        return j < out_deg ? out_edges_[out_offsets_[e] + j].neighbor
                           : in_edges_[in_offsets_[e] + (j - out_deg)].neighbor;
    }

    // All tails t such that (h, r, t) is observed in any split, sorted.
    // Empty span when the (h, r) pair was never seen. Used by filtered
    // evaluation; the reverse map serves head corruption.
    std::span<const EntityId> observed_tails(EntityId h, RelationId r) const;
    std::span<const EntityId> observed_heads(EntityId t, RelationId r) const;

    uint64_t num_observed() const { return observed_.size(); }

    // Assembles indexes after the split vectors and vocabularies are filled.
    void build_indexes();

private:
    uint64_t pack(const Triple& t) const;
    void check_ids(const Triple& t) const;

    std::unordered_map<uint64_t, uint8_t> observed_;
    std::vector<uint64_t> out_offsets_, in_offsets_;
    std::vector<Edge> out_edges_, in_edges_;
    std::unordered_map<uint64_t, std::vector<EntityId>> tails_by_hr_;
    std::unordered_map<uint64_t, std::vector<EntityId>> heads_by_tr_;
};

// Builds a store from in-memory components; vocabularies must already cover
// every id referenced by the triples.
TripleStore make_store(Vocabulary entities, Vocabulary relations, std::vector<Triple> train,
                       std::vector<Triple> valid, std::vector<Triple> test);

// Loads train.txt / valid.txt / test.txt (UTF-8 TSV, `head<TAB>rel<TAB>tail`)
// from dir. Ids are assigned by first appearance, scanning train, then valid,
// then test in line order.
TripleStore load_dataset(const std::filesystem::path& dir);

// One `id<TAB>name` line per entry.
void write_dict(const Vocabulary& vocab, const std::filesystem::path& path);

}  // namespace sans
