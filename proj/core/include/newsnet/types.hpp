#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace newsnet {

/// Calendar day, stored as days since 1970-01-01.
class Day {
public:
    constexpr Day() = default;
    constexpr explicit Day(std::int32_t serial) : serial_(serial) {}

    /// Parses a strict ISO-8601 calendar date ("YYYY-MM-DD"). Throws ParseError on failure.
    static Day parse(std::string_view iso, std::string_view field = "date");
    static Day from_ymd(int year, unsigned month, unsigned day);

    constexpr std::int32_t serial() const { return serial_; }
    std::string iso() const;

    constexpr Day operator+(std::int32_t days) const { return Day(serial_ + days); }
    constexpr std::int32_t operator-(Day other) const { return serial_ - other.serial_; }

    constexpr auto operator<=>(const Day&) const = default;

private:
    std::int32_t serial_ = 0;
};

/// Inclusive range of days [start, end].
struct DateRange {
    Day start;
    Day end;

    /// Throws InvalidArgument if end precedes start.
    static DateRange of(Day start, Day end);

    constexpr std::int32_t length_days() const { return (end - start) + 1; }
    constexpr bool contains(Day d) const { return start <= d && d <= end; }

    constexpr auto operator<=>(const DateRange&) const = default;
};

enum class EntityType : std::uint8_t { actor, location, organization };

std::string_view to_string(EntityType t);
/// Throws ClassificationError for anything outside the three classes.
EntityType parse_entity_type(std::string_view s);

enum class NodeKind : std::uint8_t { entity = 0, term = 1 };

std::string_view to_string(NodeKind k);
NodeKind parse_node_kind(std::string_view s);

/// A network node: a linked entity (by knowledge-base id) or a stemmed term.
/// Ordering is (kind, id); entities sort before terms.
struct NodeRef {
    NodeKind kind = NodeKind::entity;
    std::string id;

    static NodeRef entity(std::string id) { return {NodeKind::entity, std::move(id)}; }
    static NodeRef term(std::string id) { return {NodeKind::term, std::move(id)}; }

    bool is_entity() const { return kind == NodeKind::entity; }
    bool is_term() const { return kind == NodeKind::term; }

    auto operator<=>(const NodeRef&) const = default;
    bool operator==(const NodeRef&) const = default;
};

/// "entity:Q76" / "term:vote"
std::string to_string(const NodeRef& n);

struct NodeRefHash {
    std::size_t operator()(const NodeRef& n) const noexcept {
        return std::hash<std::string>{}(n.id) * 31u + static_cast<std::size_t>(n.kind);
    }
};

enum class EdgeKind : std::uint8_t { entity_entity, entity_term };

enum class KindFilter : std::uint8_t { entity_entity, entity_term, all };

inline bool matches(KindFilter f, EdgeKind k) {
    switch (f) {
        case KindFilter::entity_entity: return k == EdgeKind::entity_entity;
        case KindFilter::entity_term: return k == EdgeKind::entity_term;
        case KindFilter::all: return true;
    }
    return false;
}

std::string_view to_string(EdgeKind k);

}  // namespace newsnet
