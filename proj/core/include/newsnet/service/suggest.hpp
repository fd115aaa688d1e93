#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newsnet/store/network_store.hpp"

namespace newsnet::service {

struct EntitySuggestion {
    std::string entity_id;
    std::string label;
    EntityType etype = EntityType::actor;
    std::optional<std::string> description;
    double match_score = 0.0;
    std::uint64_t occurrence_count = 0;
};

struct SuggestionEntry {
    std::string entity_id;
    std::string label;
    EntityType etype = EntityType::actor;
    std::optional<std::string> description;
    std::uint64_t occurrence_count = 0;
};

/// Token-prefix index over canonical entity labels.
///
/// Every whitespace-separated query word must be a prefix of some label word
/// (case-insensitive). The match score is the number of matched query
/// characters divided by the label length, clamped to [0, 1]. Results are
/// ordered by (score desc, occurrences desc, entity id asc).
class SuggestionIndex {
public:
    SuggestionIndex() = default;
    explicit SuggestionIndex(std::vector<SuggestionEntry> entries);
    static SuggestionIndex from_store(const store::NetworkStore& store);

    std::vector<EntitySuggestion> suggest(std::string_view query, std::size_t limit) const;

private:
    struct Word {
        std::string text;
        std::uint32_t entry;
    };

    std::vector<SuggestionEntry> entries_;
    std::vector<std::vector<std::string>> entry_words_;
    std::vector<Word> words_;  // sorted by text
};

}  // namespace newsnet::service
