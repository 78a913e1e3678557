#pragma once

#include "akmine/text.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace akmine {

// Architectural-knowledge concept categories. Declaration order is the
// default resolution precedence, highest first: more specific concepts
// win over the generic connector verbs when a term is listed under
// several concepts.
enum class AkConcept {
    Technology,
    Pattern,
    QualityAttribute,
    Requirement,
    Component,
    ConnectorData,
    Connector,
};

inline constexpr int kAkConceptCount = 7;

// All concepts in declaration (default precedence) order.
const std::array<AkConcept, kAkConceptCount>& all_concepts();

// Tag-style name: "Technology", "Quality_attribute", "Connector_data", ...
std::string_view concept_name(AkConcept c);

// Term-file stem: "technology", "quality_attribute", "connector_data", ...
std::string_view concept_file_stem(AkConcept c);

// Accepts either naming style, case-insensitively.
std::optional<AkConcept> concept_from_name(std::string_view name);

// Concept -> term-set vocabulary. Terms are stored lowercase and
// lemmatized; multi-word terms are space-joined lemmas. Immutable in use:
// extension produces a new value.
struct Ontology {
    std::array<std::set<std::string>, kAkConceptCount> entries;
    // Resolution order, highest precedence first.
    std::array<AkConcept, kAkConceptCount> precedence;

    Ontology();

    const std::set<std::string>& terms(AkConcept c) const;
    bool contains(const std::string& term) const;
    std::size_t term_count() const;
    // Longest term length in words, over all concepts.
    int max_term_words() const;
};

// Loads one term file per concept from `dir` (technology.txt,
// pattern.txt, quality_attribute.txt, requirement.txt, component.txt,
// connector.txt, connector_data.txt). Terms are tokenized and lemmatized
// on load, so the files may contain surface forms. A missing file or an
// entirely empty ontology is an error.
Ontology load_ontology(const std::filesystem::path& dir,
                       const LemmaDict& lemma_exceptions);

// Maps a lemmatized term to its concept. A term listed under several
// concepts resolves to the highest-precedence one; an unknown term
// resolves to nullopt.
std::optional<AkConcept> resolve_concept(const std::string& term,
                                         const Ontology& o);

// Returns a new ontology with `additions` unioned in (terms are
// normalized like the loader does). Idempotent for already-present terms
// and monotone. Appends one line per effective or conflicting addition to
// `change_log` when given; a term already owned by a higher-precedence
// concept is added but logged as a resolution no-op.
Ontology extend_ontology(const Ontology& o,
                         const std::map<AkConcept, std::vector<std::string>>& additions,
                         const LemmaDict& lemma_exceptions,
                         std::vector<std::string>* change_log = nullptr);

}  // namespace akmine
