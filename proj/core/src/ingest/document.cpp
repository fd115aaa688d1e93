#include "newsnet/ingest/document.hpp"

#include <string>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "newsnet/errors.hpp"

namespace newsnet::ingest {

using json = nlohmann::json;

namespace {

const json& require(const json& obj, const char* field) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) throw ParseError(field, "missing");
    return *it;
}

std::string require_string(const json& obj, const char* field) {
    const json& v = require(obj, field);
    if (!v.is_string()) throw ParseError(field, "expected string");
    return v.get<std::string>();
}

std::int64_t require_integer(const json& obj, const char* field) {
    const json& v = require(obj, field);
    if (!v.is_number_integer()) throw ParseError(field, "expected integer");
    return v.get<std::int64_t>();
}

}  // namespace

std::size_t AnnotatedDocument::distinct_entity_count() const {
    std::unordered_set<std::string_view> ids;
    for (const auto& m : mentions) ids.insert(m.entity_id);
    return ids.size();
}

AnnotatedDocument parse_document(std::string_view line) {
    json rec;
    try {
        rec = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError("record", std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError("record", "expected JSON object");

    AnnotatedDocument doc;
    doc.doc_id = require_string(rec, "id");
    if (doc.doc_id.empty()) throw ParseError("id", "empty");
    doc.outlet = require_string(rec, "outlet");
    doc.date = Day::parse(require_string(rec, "date"), "date");
    doc.char_count = require_integer(rec, "char_count");
    if (doc.char_count < 0) throw ParseError("char_count", "negative");

    const json& sentences = require(rec, "sentences");
    if (!sentences.is_array()) throw ParseError("sentences", "expected array");
    doc.sentences.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const json& s = sentences[i];
        if (!s.is_array()) throw ParseError("sentences", "sentence " + std::to_string(i) + " is not an array");
        Sentence out;
        out.index = static_cast<std::uint32_t>(i);
        out.tokens.reserve(s.size());
        for (const json& tok : s) {
            if (!tok.is_string()) throw ParseError("sentences", "non-string token in sentence " + std::to_string(i));
            out.tokens.push_back(tok.get<std::string>());
        }
        doc.sentences.push_back(std::move(out));
    }

    const json& entities = require(rec, "entities");
    if (!entities.is_array()) throw ParseError("entities", "expected array");
    doc.mentions.reserve(entities.size());
    for (const json& e : entities) {
        if (!e.is_object()) throw ParseError("entities", "expected object");
        EntityMention m;
        const std::int64_t sentence = require_integer(e, "sentence");
        if (sentence < 0 || static_cast<std::size_t>(sentence) >= doc.sentences.size()) {
            throw ParseError("sentence", "mention sentence " + std::to_string(sentence) + " outside document with " +
                                             std::to_string(doc.sentences.size()) + " sentences");
        }
        m.sentence_index = static_cast<std::uint32_t>(sentence);
        m.entity_id = require_string(e, "entity_id");
        if (m.entity_id.empty()) throw ParseError("entity_id", "empty");
        m.etype = parse_entity_type(require_string(e, "type"));
        m.label = require_string(e, "label");
        if (auto it = e.find("description"); it != e.end() && !it->is_null()) {
            if (!it->is_string()) throw ParseError("description", "expected string");
            m.description = it->get<std::string>();
        }
        doc.mentions.push_back(std::move(m));
    }
    return doc;
}

std::string serialize_document(const AnnotatedDocument& doc) {
    json sentences = json::array();
    for (const auto& s : doc.sentences) sentences.push_back(s.tokens);
    json entities = json::array();
    for (const auto& m : doc.mentions) {
        json e = {{"sentence", m.sentence_index},
                  {"entity_id", m.entity_id},
                  {"type", to_string(m.etype)},
                  {"label", m.label}};
        if (m.description) e["description"] = *m.description;
        entities.push_back(std::move(e));
    }
    json rec = {{"id", doc.doc_id},
                {"outlet", doc.outlet},
                {"date", doc.date.iso()},
                {"char_count", doc.char_count},
                {"sentences", std::move(sentences)},
                {"entities", std::move(entities)}};
    return rec.dump();
}

void read_corpus(std::istream& in, const std::function<void(AnnotatedDocument&&)>& sink) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        AnnotatedDocument doc;
        try {
            doc = parse_document(line);
        } catch (const ParseError& e) {
            throw ParseError(e.field(), "line " + std::to_string(lineno) + ": " + e.what());
        }
        sink(std::move(doc));
    }
}

}  // namespace newsnet::ingest
