#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "newsnet/types.hpp"

namespace newsnet::ingest {

struct EntityMention {
    std::string entity_id;
    std::string label;
    EntityType etype = EntityType::actor;
    std::uint32_t sentence_index = 0;
    std::optional<std::string> description;

    NodeRef node() const { return NodeRef::entity(entity_id); }
};

struct Sentence {
    std::uint32_t index = 0;
    std::vector<std::string> tokens;
};

struct AnnotatedDocument {
    std::string doc_id;
    std::string outlet;
    Day date;
    std::vector<Sentence> sentences;
    std::vector<EntityMention> mentions;
    std::int64_t char_count = 0;

    std::size_t distinct_entity_count() const;
};

/// Parses one newline-delimited corpus record.
///
/// Record layout: `id`, `outlet`, `date` (YYYY-MM-DD), `char_count`,
/// `sentences` (array of token arrays, position = sentence index) and
/// `entities` (array of {sentence, entity_id, type, label, description?}).
/// Throws ParseError naming the field, or ClassificationError for an unknown type.
AnnotatedDocument parse_document(std::string_view line);

std::string serialize_document(const AnnotatedDocument& doc);

/// Calls `sink` for every non-blank line of `in`.
/// Parse failures are rethrown as ParseError prefixed with the line number.
void read_corpus(std::istream& in, const std::function<void(AnnotatedDocument&&)>& sink);

}  // namespace newsnet::ingest
