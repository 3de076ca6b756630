#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "rate/errors.hpp"
#include "rate/types.hpp"
#include "rate/vocab.hpp"

namespace rate {

/// What to do with a valid/test triple whose entity or relation never
/// appeared while the vocabulary was mutable.
enum class UnknownPolicy { error, skip };

struct LoadOptions {
    Split split = Split::train;
    bool freeze_vocab = false;   // reject (or skip) surfaces not already mapped
    UnknownPolicy unknown = UnknownPolicy::error;
};

struct LoadStats {
    std::size_t lines = 0;
    std::size_t loaded = 0;
    std::size_t duplicates = 0;      // dropped, same split
    std::size_t skipped_unknown = 0; // dropped under UnknownPolicy::skip
};

/// One split of integer-encoded triples plus the vocabularies that encode it.
struct TripleStore {
    std::vector<Triple> triples;
    Vocabulary entities;
    Vocabulary relations;
    Split split = Split::train;
    LoadStats stats;

    std::size_t num_entities() const noexcept { return entities.size(); }
    std::size_t num_relations() const noexcept { return relations.size(); }
};

namespace detail {

inline bool split_tsv3(const std::string& line, std::string_view out[3]) {
    auto t1 = line.find('\t');
    if (t1 == std::string::npos) return false;
    auto t2 = line.find('\t', t1 + 1);
    if (t2 == std::string::npos) return false;
    if (line.find('\t', t2 + 1) != std::string::npos) return false;
    out[0] = std::string_view(line).substr(0, t1);
    out[1] = std::string_view(line).substr(t1 + 1, t2 - t1 - 1);
    out[2] = std::string_view(line).substr(t2 + 1);
    return true;
}

}  // namespace detail

/// Parse `head<TAB>relation<TAB>tail` lines. When `base` is given its
/// vocabularies carry over, so identical strings get identical ids across
/// splits; with freeze_vocab the maps are read-only.
inline TripleStore load_triples(std::istream& in, const LoadOptions& opts = {},
                                const TripleStore* base = nullptr) {
    TripleStore store;
    store.split = opts.split;
    if (base != nullptr) {
        store.entities = base->entities;
        store.relations = base->relations;
    }
    if (opts.freeze_vocab) {
        store.entities.freeze();
        store.relations.freeze();
    }

    std::unordered_set<std::uint64_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        store.stats.lines = line_no;
        std::string_view f[3];
        if (!detail::split_tsv3(line, f))
            throw ParseError("expected 3 tab-separated fields", line_no);
        if (opts.freeze_vocab) {
            bool known = store.entities.contains(f[0]) && store.relations.contains(f[1]) &&
                         store.entities.contains(f[2]);
            if (!known) {
                if (opts.unknown == UnknownPolicy::skip) {
                    ++store.stats.skipped_unknown;
                    continue;
                }
                throw ParseError("surface not in frozen vocabulary: " + std::string(line), line_no);
            }
        }
        Triple x;
        x.head = store.entities.add(f[0]);
        x.relation = store.relations.add(f[1]);
        x.tail = store.entities.add(f[2]);
        if (store.entities.size() > kMaxEntities || store.relations.size() > kMaxRelations)
            throw ParseError("vocabulary exceeds packed-key capacity", line_no);
        if (!seen.insert(pack_triple(x)).second) {
            ++store.stats.duplicates;
            continue;
        }
        store.triples.push_back(x);
        ++store.stats.loaded;
    }
    return store;
}

inline void dump_triples(const TripleStore& store, std::ostream& out) {
    for (const Triple& x : store.triples)
        out << store.entities.surface_of(x.head) << '\t'
            << store.relations.surface_of(x.relation) << '\t'
            << store.entities.surface_of(x.tail) << '\n';
}

}  // namespace rate
