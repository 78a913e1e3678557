#include "akmine/ontology.hpp"

#include "akmine/error.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace akmine {

namespace {

constexpr std::array<AkConcept, kAkConceptCount> kDefaultPrecedence = {
    AkConcept::Technology,    AkConcept::Pattern,
    AkConcept::QualityAttribute, AkConcept::Requirement,
    AkConcept::Component,     AkConcept::ConnectorData,
    AkConcept::Connector,
};

struct ConceptNames {
    AkConcept value;
    std::string_view tag_name;
    std::string_view file_stem;
};

constexpr std::array<ConceptNames, kAkConceptCount> kNames = {{
    {AkConcept::Technology, "Technology", "technology"},
    {AkConcept::Pattern, "Pattern", "pattern"},
    {AkConcept::QualityAttribute, "Quality_attribute", "quality_attribute"},
    {AkConcept::Requirement, "Requirement", "requirement"},
    {AkConcept::Component, "Component", "component"},
    {AkConcept::ConnectorData, "Connector_data", "connector_data"},
    {AkConcept::Connector, "Connector", "connector"},
}};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

// Tokenize + lemmatize a raw term entry; multi-word terms become
// space-joined lemmas. Empty result (e.g. a digits-only entry) is skipped
// by the callers.
std::string normalize_term(const std::string& raw, const LemmaDict& exceptions) {
    auto words = tokenize(raw);
    std::string joined;
    for (const auto& w : words) {
        if (!joined.empty()) joined.push_back(' ');
        joined += lemmatize(w, exceptions);
    }
    return joined;
}

}  // namespace

const std::array<AkConcept, kAkConceptCount>& all_concepts() {
    static const std::array<AkConcept, kAkConceptCount> order = kDefaultPrecedence;
    return order;
}

std::string_view concept_name(AkConcept c) {
    return kNames[static_cast<std::size_t>(c)].tag_name;
}

std::string_view concept_file_stem(AkConcept c) {
    return kNames[static_cast<std::size_t>(c)].file_stem;
}

std::optional<AkConcept> concept_from_name(std::string_view name) {
    std::string needle = lower(name);
    for (const auto& entry : kNames) {
        if (needle == lower(entry.tag_name) || needle == lower(entry.file_stem))
            return entry.value;
    }
    return std::nullopt;
}

Ontology::Ontology() : precedence(kDefaultPrecedence) {}

const std::set<std::string>& Ontology::terms(AkConcept c) const {
    return entries[static_cast<std::size_t>(c)];
}

bool Ontology::contains(const std::string& term) const {
    return std::any_of(entries.begin(), entries.end(), [&](const auto& set) {
        return set.count(term) != 0;
    });
}

std::size_t Ontology::term_count() const {
    std::size_t n = 0;
    for (const auto& set : entries) n += set.size();
    return n;
}

int Ontology::max_term_words() const {
    int max_words = 1;
    for (const auto& set : entries) {
        for (const auto& term : set) {
            int words = 1 + static_cast<int>(std::count(term.begin(), term.end(), ' '));
            max_words = std::max(max_words, words);
        }
    }
    return max_words;
}

Ontology load_ontology(const std::filesystem::path& dir,
                       const LemmaDict& lemma_exceptions) {
    Ontology o;
    for (AkConcept c : all_concepts()) {
        auto file = dir / (std::string(concept_file_stem(c)) + ".txt");
        if (!std::filesystem::exists(file)) {
            throw InputError("missing ontology term file for " +
                             std::string(concept_name(c)) + ": " + file.string());
        }
        for (const auto& raw : load_word_list(file)) {
            std::string term = normalize_term(raw, lemma_exceptions);
            if (!term.empty()) o.entries[static_cast<std::size_t>(c)].insert(term);
        }
    }
    if (o.term_count() == 0) {
        throw InputError("ontology in " + dir.string() + " is empty");
    }
    return o;
}

std::optional<AkConcept> resolve_concept(const std::string& term,
                                         const Ontology& o) {
    for (AkConcept c : o.precedence) {
        if (o.terms(c).count(term) != 0) return c;
    }
    return std::nullopt;
}

Ontology extend_ontology(const Ontology& o,
                         const std::map<AkConcept, std::vector<std::string>>& additions,
                         const LemmaDict& lemma_exceptions,
                         std::vector<std::string>* change_log) {
    Ontology out = o;
    auto log = [&](const std::string& line) {
        if (change_log) change_log->push_back(line);
    };
    for (const auto& [category, terms] : additions) {
        for (const auto& raw : terms) {
            std::string term = normalize_term(raw, lemma_exceptions);
            if (term.empty()) continue;
            auto& set = out.entries[static_cast<std::size_t>(category)];
            if (set.count(term) != 0) continue;  // idempotent
            auto owner = resolve_concept(term, out);
            set.insert(term);
            if (owner && *owner != category &&
                resolve_concept(term, out) == owner) {
                log("warning: '" + term + "' added to " +
                    std::string(concept_name(category)) +
                    " but still resolves to higher-precedence " +
                    std::string(concept_name(*owner)));
            } else {
                log("added '" + term + "' to " +
                    std::string(concept_name(category)));
            }
        }
    }
    return out;
}

}  // namespace akmine
