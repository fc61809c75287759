#pragma once

#include <cstdint>

namespace sans {

using EntityId = uint32_t;
using RelationId = uint32_t;

// Dense ids stay below 2^21 so a whole triple packs into one uint64 key.
inline constexpr uint64_t kMaxVocabSize = uint64_t{1} << 21;

struct Triple {
    EntityId head;
    RelationId relation;
    EntityId tail;

    friend bool operator==(const Triple&, const Triple&) = default;
};

// Which entity of a positive triple gets corrupted / ranked.
enum class Side : uint8_t { Head, Tail };

enum class Split : uint8_t { Train, Valid, Test };

inline const char* side_name(Side s) { return s == Side::Head ? "head" : "tail"; }
inline const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        default: return "test";
    }
}

}  // namespace sans
