#pragma once

#include "akmine/corpus.hpp"
#include "akmine/ontology.hpp"
#include "akmine/text.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace akmine {

// A preprocessed token: either a plain word (lemma) or an indexed
// concept tag like <Technology_2>.
struct Token {
    enum class Kind { Word, Tag };

    Kind kind{Kind::Word};
    std::string term;                           // Word only
    AkConcept category{AkConcept::Technology};  // Tag only
    int index{0};                               // Tag only, >= 1

    static Token word(std::string t);
    static Token tag(AkConcept c, int index);

    bool is_tag() const { return kind == Kind::Tag; }
    // Vocabulary symbol: the term itself, or "<Concept_k>" for tags.
    std::string symbol() const;

    bool operator==(const Token&) const = default;
};

// Renders/parses the "<Concept_k>" symbol form.
std::string tag_symbol(AkConcept c, int index);
std::optional<std::pair<AkConcept, int>> parse_tag_symbol(std::string_view symbol);

struct TaggedDocument {
    std::string article_id;
    std::vector<Token> tokens;
    // (concept, index) -> the ontology term that was replaced. Indices
    // per concept are contiguous from 1, in first-occurrence order of
    // distinct terms.
    std::map<std::pair<AkConcept, int>, std::string> tag_map;

    bool operator==(const TaggedDocument&) const = default;
};

struct PipelineConfig {
    double df_low{0.05};
    double df_high{0.95};
    enum class FilterStage { AfterLemmatize, BeforeLemmatize };
    FilterStage filter_stage{FilterStage::AfterLemmatize};
};

struct WordLists {
    WordList stopwords;
    WordList generic_terms;
    WordList code_terms;
    LemmaDict lemma_exceptions;
};

// Token-count report across pipeline stages.
struct StageReport {
    std::string filter_stage;
    long long raw_tokens{0};
    long long removed_stopwords{0};
    long long removed_generic{0};
    long long removed_code{0};
    long long removed_df{0};
    long long tagged_tokens{0};
    long long output_tokens{0};
};

std::string stage_report_to_json(const StageReport& report);

// Drops tokens listed in any of the three lists. Attribution for the
// removal counters checks stopwords, then generic, then code terms.
std::vector<Token> remove_listed_terms(const std::vector<Token>& tokens,
                                       const WordLists& lists,
                                       StageReport* report = nullptr);

// Per-symbol fraction of documents containing it (presence counts once
// per document).
std::unordered_map<std::string, double> compute_document_frequency(
    const std::vector<std::vector<Token>>& docs);

// Removes word tokens whose document frequency is above df_high or below
// df_low (both thresholds strict, boundary values kept). Tag tokens are
// exempt.
std::vector<std::vector<Token>> apply_df_filter(
    const std::vector<std::vector<Token>>& docs,
    const std::unordered_map<std::string, double>& df,
    const PipelineConfig& config,
    StageReport* report = nullptr);

// Replaces ontology terms with indexed concept tags, longest match first
// over a window of up to 4 tokens. Each distinct matched term gets one
// index per (document, concept), assigned in first-occurrence order;
// repeated occurrences reuse the index.
TaggedDocument tag_ak_terms(std::string article_id,
                            const std::vector<Token>& tokens,
                            const Ontology& ontology);

// The whole pipeline: per document strip markup, tokenize, remove listed
// terms, lemmatize; then the corpus-wide document-frequency filter (stage
// per config); finally concept tagging. Deterministic for fixed inputs.
std::vector<TaggedDocument> preprocess_corpus(const Corpus& corpus,
                                              const Ontology& ontology,
                                              const WordLists& lists,
                                              const PipelineConfig& config,
                                              StageReport* report = nullptr);

// Dump format: one line per document, article_id followed by
// space-separated token symbols; the tag map goes to a second file as
// "article_id<TAB>Concept_k<TAB>term" lines.
void save_tagged_documents(const std::vector<TaggedDocument>& docs,
                           const std::filesystem::path& docs_file,
                           const std::filesystem::path& tag_map_file);

std::vector<TaggedDocument> load_tagged_documents(
    const std::filesystem::path& docs_file,
    const std::filesystem::path& tag_map_file);

}  // namespace akmine
