#include <gtest/gtest.h>

#include "newsnet/service/suggest.hpp"

using namespace newsnet;
using namespace newsnet::service;

namespace {

SuggestionIndex index() {
    return SuggestionIndex({
        {"Q76", "Barack Obama", EntityType::actor, "president", 50},
        {"Q13133", "Michelle Obama", EntityType::actor, std::nullopt, 20},
        {"Q1", "Obama Foundation", EntityType::organization, std::nullopt, 5},
        {"Q2", "Bar", EntityType::location, std::nullopt, 1},
        {"Q3", "Ob", EntityType::location, std::nullopt, 1},
    });
}

std::vector<std::string> ids(const std::vector<EntitySuggestion>& s) {
    std::vector<std::string> out;
    for (const auto& e : s) out.push_back(e.entity_id);
    return out;
}

}  // namespace

TEST(Suggest, MatchesWordPrefixesCaseInsensitively) {
    const auto r = index().suggest("OBA", 10);
    EXPECT_EQ(ids(r), (std::vector<std::string>{"Q76", "Q13133", "Q1"}));
    // Scores are matched characters over label length.
    EXPECT_DOUBLE_EQ(r[0].match_score, 3.0 / 12.0);
    EXPECT_DOUBLE_EQ(r[1].match_score, 3.0 / 14.0);
    EXPECT_DOUBLE_EQ(r[2].match_score, 3.0 / 16.0);
    EXPECT_EQ(r[0].description, "president");
}

TEST(Suggest, OrdersByScoreThenOccurrencesThenId) {
    const auto r = index().suggest("ob", 10);
    ASSERT_FALSE(r.empty());
    EXPECT_EQ(r[0].entity_id, "Q3");  // exact short label
    EXPECT_DOUBLE_EQ(r[0].match_score, 1.0);
    for (std::size_t i = 1; i < r.size(); ++i) {
        const auto& a = r[i - 1];
        const auto& b = r[i];
        EXPECT_TRUE(a.match_score > b.match_score ||
                    (a.match_score == b.match_score && (a.occurrence_count > b.occurrence_count ||
                                                        (a.occurrence_count == b.occurrence_count &&
                                                         a.entity_id < b.entity_id))));
    }
}

TEST(Suggest, EveryQueryWordMustMatch) {
    EXPECT_EQ(ids(index().suggest("barack ob", 10)), (std::vector<std::string>{"Q76"}));
    EXPECT_TRUE(index().suggest("barack michelle", 10).empty());
    EXPECT_TRUE(index().suggest("zzz", 10).empty());
    EXPECT_TRUE(index().suggest("   ", 10).empty());
    EXPECT_EQ(index().suggest("o", 2).size(), 2u);
}
