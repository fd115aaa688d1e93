#include "newsnet/types.hpp"

#include <charconv>
#include <cstdio>

#include "newsnet/errors.hpp"

namespace newsnet {

namespace {

bool parse_digits(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Day Day::parse(std::string_view iso, std::string_view field) {
    const std::string f(field);
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw ParseError(f, "expected YYYY-MM-DD, got '" + std::string(iso) + "'");
    }
    int y = 0, m = 0, d = 0;
    if (!parse_digits(iso.substr(0, 4), y) || !parse_digits(iso.substr(5, 2), m) ||
        !parse_digits(iso.substr(8, 2), d)) {
        throw ParseError(f, "expected YYYY-MM-DD, got '" + std::string(iso) + "'");
    }
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                    std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw ParseError(f, "not a calendar date: '" + std::string(iso) + "'");
    return Day(static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

Day Day::from_ymd(int year, unsigned month, unsigned day) {
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    if (!ymd.ok()) throw InvalidArgument("date", "not a calendar date");
    return Day(static_cast<std::int32_t>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

std::string Day::iso() const {
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{serial_}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

DateRange DateRange::of(Day start, Day end) {
    if (end < start) throw InvalidArgument("range", "end precedes start");
    return {start, end};
}

std::string_view to_string(EntityType t) {
    switch (t) {
        case EntityType::actor: return "actor";
        case EntityType::location: return "location";
        case EntityType::organization: return "organization";
    }
    return "?";
}

EntityType parse_entity_type(std::string_view s) {
    if (s == "actor") return EntityType::actor;
    if (s == "location") return EntityType::location;
    if (s == "organization") return EntityType::organization;
    throw ClassificationError("unknown entity type '" + std::string(s) + "'");
}

std::string_view to_string(NodeKind k) { return k == NodeKind::entity ? "entity" : "term"; }

NodeKind parse_node_kind(std::string_view s) {
    if (s == "entity") return NodeKind::entity;
    if (s == "term") return NodeKind::term;
    throw ParseError("kind", "expected 'entity' or 'term', got '" + std::string(s) + "'");
}

std::string to_string(const NodeRef& n) {
    std::string out(to_string(n.kind));
    out += ':';
    out += n.id;
    return out;
}

std::string_view to_string(EdgeKind k) {
    return k == EdgeKind::entity_entity ? "entity-entity" : "entity-term";
}

}  // namespace newsnet
