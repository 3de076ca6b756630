#pragma once

#include <cstdint>
#include <functional>

namespace rate {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

enum class Split { train, valid, test };

inline const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::valid: return "valid";
        case Split::test: return "test";
    }
    return "?";
}

struct Triple {
    EntityId head = 0;
    RelationId relation = 0;
    EntityId tail = 0;

    friend bool operator==(const Triple&, const Triple&) = default;
};

// Packed key layout: head(24) | relation(16) | tail(24). Covers graphs up to
// 2^24 entities and 2^16 relations; checked at store build time.
inline constexpr EntityId kMaxEntities = 1u << 24;
inline constexpr RelationId kMaxRelations = 1u << 16;

inline std::uint64_t pack_triple(EntityId h, RelationId r, EntityId t) {
    return (static_cast<std::uint64_t>(h) << 40) |
           (static_cast<std::uint64_t>(r) << 24) |
           static_cast<std::uint64_t>(t);
}

inline std::uint64_t pack_triple(const Triple& x) {
    return pack_triple(x.head, x.relation, x.tail);
}

inline std::uint64_t pack_pair(EntityId e, RelationId r) {
    return (static_cast<std::uint64_t>(e) << 16) | static_cast<std::uint64_t>(r);
}

enum class CorruptSide { head, tail };

inline const char* side_name(CorruptSide s) {
    return s == CorruptSide::head ? "head" : "tail";
}

}  // namespace rate
