#include "newsnet/ingest/extract.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_set>

#include "newsnet/errors.hpp"
#include "newsnet/ingest/porter.hpp"

namespace newsnet::ingest {

std::string_view to_string(RejectReason r) {
    switch (r) {
        case RejectReason::too_short: return "too_short";
        case RejectReason::too_long: return "too_long";
        case RejectReason::too_many_entities: return "too_many_entities";
    }
    return "?";
}

std::optional<RejectReason> admit_document(const AnnotatedDocument& doc, const FilterLimits& limits) {
    if (doc.char_count < limits.min_chars) return RejectReason::too_short;
    if (doc.char_count > limits.max_chars) return RejectReason::too_long;
    if (doc.distinct_entity_count() > limits.max_entities) return RejectReason::too_many_entities;
    return std::nullopt;
}

std::string lowercase(std::string_view token) {
    std::string out(token);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

namespace {

// Code points, not bytes: continuation bytes are not counted.
std::size_t utf8_length(std::string_view s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

bool has_word_character(std::string_view s) {
    return std::any_of(s.begin(), s.end(), [](char c) {
        const auto u = static_cast<unsigned char>(c);
        return u >= 0x80 || std::isalnum(u);
    });
}

std::vector<std::string> label_words(std::string_view label) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : label) {
        if (c == ' ' || c == '\t') {
            if (!cur.empty()) words.push_back(lowercase(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) words.push_back(lowercase(cur));
    return words;
}

}  // namespace

std::vector<std::vector<NodeRef>> extract_terms(const AnnotatedDocument& doc) {
    std::vector<std::unordered_set<std::string>> covered(doc.sentences.size());
    for (const auto& m : doc.mentions) {
        if (m.sentence_index >= doc.sentences.size()) continue;
        for (auto& w : label_words(m.label)) covered[m.sentence_index].insert(std::move(w));
    }

    std::vector<std::vector<NodeRef>> terms(doc.sentences.size());
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        for (const auto& raw : doc.sentences[s].tokens) {
            std::string tok = lowercase(raw);
            if (!has_word_character(tok)) continue;
            if (covered[s].contains(tok)) continue;
            if (utf8_length(tok) < 4) continue;
            terms[s].push_back(NodeRef::term(porter_stem(tok)));
        }
    }
    return terms;
}

std::vector<EdgeOccurrence> extract_cooccurrences(const AnnotatedDocument& doc, std::uint32_t entity_window) {
    if (entity_window < 1) throw InvalidArgument("window", "must be >= 1");

    // entity -> sorted distinct sentence indices
    std::map<std::string, std::vector<std::uint32_t>> sentences_of;
    for (const auto& m : doc.mentions) sentences_of[m.entity_id].push_back(m.sentence_index);
    for (auto& [_, v] : sentences_of) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    std::vector<EdgeOccurrence> out;
    auto emit = [&](NodeRef v, NodeRef w, std::uint32_t delta) {
        out.push_back(EdgeOccurrence{std::move(v), std::move(w), doc.date, doc.outlet, doc.doc_id, delta});
    };

    for (auto a = sentences_of.begin(); a != sentences_of.end(); ++a) {
        for (auto b = std::next(a); b != sentences_of.end(); ++b) {
            // minimum |i - j| over two sorted lists
            const auto& x = a->second;
            const auto& y = b->second;
            std::uint32_t best = UINT32_MAX;
            std::size_t i = 0, j = 0;
            while (i < x.size() && j < y.size() && best > 0) {
                const std::uint32_t d = x[i] > y[j] ? x[i] - y[j] : y[j] - x[i];
                best = std::min(best, d);
                if (x[i] < y[j]) {
                    ++i;
                } else {
                    ++j;
                }
            }
            if (best <= entity_window) emit(NodeRef::entity(a->first), NodeRef::entity(b->first), best);
        }
    }

    const auto terms = extract_terms(doc);
    std::set<std::pair<std::string_view, std::string_view>> seen;
    for (const auto& m : doc.mentions) {
        for (const auto& t : terms[m.sentence_index]) {
            if (seen.emplace(m.entity_id, t.id).second) emit(NodeRef::entity(m.entity_id), t, 0);
        }
    }

    std::sort(out.begin(), out.end(),
              [](const EdgeOccurrence& l, const EdgeOccurrence& r) { return std::tie(l.v, l.w) < std::tie(r.v, r.w); });
    return out;
}

std::vector<NodeOccurrence> node_occurrences(const AnnotatedDocument& doc) {
    std::map<NodeRef, NodeOccurrence> nodes;
    for (const auto& m : doc.mentions) {
        auto& n = nodes[m.node()];
        if (n.count == 0) {
            n.node = m.node();
            n.entity = EntityInfo{m.etype, m.label, m.description};
        }
        ++n.count;
    }
    for (const auto& sentence : extract_terms(doc)) {
        for (const auto& t : sentence) {
            auto& n = nodes[t];
            if (n.count == 0) n.node = t;
            ++n.count;
        }
    }
    std::vector<NodeOccurrence> out;
    out.reserve(nodes.size());
    for (auto& [_, n] : nodes) out.push_back(std::move(n));
    return out;
}

}  // namespace newsnet::ingest
