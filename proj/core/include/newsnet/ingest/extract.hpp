#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newsnet/ingest/document.hpp"
#include "newsnet/types.hpp"

namespace newsnet::ingest {

struct FilterLimits {
    std::int64_t min_chars = 200;
    std::int64_t max_chars = 20000;
    std::size_t max_entities = 100;
};

enum class RejectReason { too_short, too_long, too_many_entities };

std::string_view to_string(RejectReason r);

/// Empty optional means the document is admitted.
std::optional<RejectReason> admit_document(const AnnotatedDocument& doc, const FilterLimits& limits = {});

/// Lowercases ASCII letters; other bytes are kept.
std::string lowercase(std::string_view token);

/// Term NodeRefs per sentence, in token order (repeats kept).
///
/// Tokens covered by a mention in the same sentence (case-insensitive match
/// against a label word) are skipped, as are punctuation-only tokens and
/// tokens shorter than four characters before stemming.
std::vector<std::vector<NodeRef>> extract_terms(const AnnotatedDocument& doc);

/// One document-level cooccurrence of two nodes. `v < w` in NodeRef order.
struct EdgeOccurrence {
    NodeRef v;
    NodeRef w;
    Day day;
    std::string outlet;
    std::string doc_id;
    std::uint32_t delta = 0;

    EdgeKind kind() const { return w.is_term() ? EdgeKind::entity_term : EdgeKind::entity_entity; }

    bool operator==(const EdgeOccurrence&) const = default;
};

inline constexpr std::uint32_t kDefaultEntityWindow = 5;

/// Entity pairs whose closest mentions are at most `entity_window` sentences apart,
/// and entity/term pairs sharing a sentence (delta 0). One occurrence per pair.
/// Output is sorted by (v, w).
std::vector<EdgeOccurrence> extract_cooccurrences(const AnnotatedDocument& doc,
                                                  std::uint32_t entity_window = kDefaultEntityWindow);

struct EntityInfo {
    EntityType etype = EntityType::actor;
    std::string label;
    std::optional<std::string> description;
};

/// Per-document node statistics: how often each node occurs in the document.
struct NodeOccurrence {
    NodeRef node;
    std::uint32_t count = 0;
    std::optional<EntityInfo> entity;
};

/// Entities (from mentions) and terms (from extract_terms), sorted by node.
std::vector<NodeOccurrence> node_occurrences(const AnnotatedDocument& doc);

}  // namespace newsnet::ingest
