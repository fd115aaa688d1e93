#include "newsnet/service/suggest.hpp"

#include <algorithm>
#include <unordered_set>

#include "newsnet/ingest/extract.hpp"

namespace newsnet::service {

namespace {

std::vector<std::string> words_of(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            if (!cur.empty()) out.push_back(ingest::lowercase(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(ingest::lowercase(cur));
    return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

}  // namespace

SuggestionIndex::SuggestionIndex(std::vector<SuggestionEntry> entries) : entries_(std::move(entries)) {
    entry_words_.reserve(entries_.size());
    for (std::uint32_t i = 0; i < entries_.size(); ++i) {
        auto ws = words_of(entries_[i].label);
        for (const auto& w : ws) words_.push_back(Word{w, i});
        entry_words_.push_back(std::move(ws));
    }
    std::sort(words_.begin(), words_.end(),
              [](const Word& l, const Word& r) { return std::tie(l.text, l.entry) < std::tie(r.text, r.entry); });
}

SuggestionIndex SuggestionIndex::from_store(const store::NetworkStore& store) {
    std::vector<SuggestionEntry> entries;
    for (store::NodeId id = 0; id < store.node_count(); ++id) {
        const auto& n = store.node(id);
        if (!n.ref.is_entity() || !n.entity) continue;
        entries.push_back(
            SuggestionEntry{n.ref.id, n.entity->label, n.entity->etype, n.entity->description, n.total_occurrences});
    }
    return SuggestionIndex(std::move(entries));
}

std::vector<EntitySuggestion> SuggestionIndex::suggest(std::string_view query, std::size_t limit) const {
    const auto q = words_of(query);
    if (q.empty() || limit == 0) return {};

    // candidates: entries with a word prefixed by the longest query word
    const auto& probe = *std::max_element(q.begin(), q.end(), [](const auto& l, const auto& r) { return l.size() < r.size(); });
    auto lo = std::lower_bound(words_.begin(), words_.end(), probe,
                               [](const Word& w, const std::string& p) { return w.text < p; });
    std::unordered_set<std::uint32_t> seen;
    std::vector<EntitySuggestion> out;
    std::size_t matched_chars = 0;
    for (const auto& w : q) matched_chars += w.size();

    for (auto it = lo; it != words_.end() && starts_with(it->text, probe); ++it) {
        if (!seen.insert(it->entry).second) continue;
        const auto& words = entry_words_[it->entry];
        const bool all = std::all_of(q.begin(), q.end(), [&](const std::string& qw) {
            return std::any_of(words.begin(), words.end(), [&](const std::string& lw) { return starts_with(lw, qw); });
        });
        if (!all) continue;
        const auto& e = entries_[it->entry];
        const double len = static_cast<double>(std::max<std::size_t>(e.label.size(), 1));
        const double score = std::clamp(static_cast<double>(matched_chars) / len, 0.0, 1.0);
        out.push_back(EntitySuggestion{e.entity_id, e.label, e.etype, e.description, score, e.occurrence_count});
    }
    std::sort(out.begin(), out.end(), [](const EntitySuggestion& l, const EntitySuggestion& r) {
        if (l.match_score != r.match_score) return l.match_score > r.match_score;
        if (l.occurrence_count != r.occurrence_count) return l.occurrence_count > r.occurrence_count;
        return l.entity_id < r.entity_id;
    });
    if (out.size() > limit) out.resize(limit);
    return out;
}

}  // namespace newsnet::service
