#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace akmine {

// Design steps of the stepwise architecture design process that the
// relevance ratings refer to.
enum class AddStep {
    IdentifyDesignConcepts,
    SelectDesignConcepts,
    InstantiateArchitectureElements,
};

enum class BlogType {
    Community,
    TechnologyVendor,
    Personal,
    ItService,
    MagazineNewspaper,
    Educational,
    Unlabeled,
};

// Article-purpose categories from the qualitative labeling.
enum class QualTopic {
    ElaborateEvaluateSolution,
    ListRelatedSolutions,
    CompareSolutions,
    HowToDesign,
    HowToImplement,
    Unlabeled,
};

std::string_view to_string(AddStep s);
std::string_view to_string(BlogType t);
std::string_view to_string(QualTopic t);
std::optional<AddStep> add_step_from_string(std::string_view s);
std::optional<BlogType> blog_type_from_string(std::string_view s);
std::optional<QualTopic> qual_topic_from_string(std::string_view s);
const std::array<AddStep, 3>& all_add_steps();

// One practitioner rating of an article's relevance to a task, on the
// 1..5 scale where 1 means no relevance.
struct RelevanceRating {
    std::string task_id;
    AddStep add_step{AddStep::IdentifyDesignConcepts};
    int rating{1};
    std::string rater_id;  // empty = not recorded

    bool operator==(const RelevanceRating&) const = default;
};

struct Article {
    std::string id;
    std::string url;
    std::optional<std::string> raw_html;
    std::optional<std::string> plain_text;
    std::string language;  // two-letter code, empty = unlabeled
    BlogType blog_type{BlogType::Unlabeled};
    QualTopic qualitative_topic{QualTopic::Unlabeled};
    std::optional<int> lda_topic;
    bool is_tutorial{false};
    bool accessible{true};
    std::vector<RelevanceRating> ratings;

    bool operator==(const Article&) const = default;

    // The analysis text: plain_text when present, raw markup otherwise.
    const std::string& text_source() const;
};

struct Corpus {
    std::vector<Article> articles;
    std::string source_path;
    std::vector<std::string> filter_log;

    bool operator==(const Corpus& other) const {
        return articles == other.articles;
    }
};

struct FilterConfig {
    // When set, records without a language label are classified by the
    // ratio of English function words; otherwise they are kept.
    bool use_language_heuristic{false};
    double english_ratio_threshold{0.02};
};

// Exclusion rules, applied in this fixed order.
enum class FilterRule {
    NoRelevance,    // (a) every rating is level 1
    NonEnglish,     // (b) language other than "en"
    Inaccessible,   // (c) accessible flag is false
    Tutorial,       // (d) tutorial flag is set
    Duplicate,      // (e) same normalized URL or same text hash as an
                    //     earlier kept article
};

inline constexpr int kFilterRuleCount = 5;
std::string_view filter_rule_name(FilterRule r);

struct FilterReport {
    int input_count{0};
    int output_count{0};
    std::array<int, kFilterRuleCount> excluded_count{};
    std::array<std::vector<std::string>, kFilterRuleCount> excluded_ids{};
    // Articles that hit more than one of rules (a)-(d).
    std::vector<std::string> multi_rule_ids;
    // URLs normalize_url could not parse (kept verbatim for dedup).
    std::vector<std::string> unparseable_urls;

    int total_exclusions() const;
};

std::string filter_report_to_json(const FilterReport& report);

// Reads a line-delimited corpus file (one JSON record per line, see the
// input format in the README). In strict mode a malformed record aborts
// with its line number; otherwise it is skipped and logged to the corpus
// filter_log.
Corpus load_corpus(const std::filesystem::path& path, bool strict = false);

// Writes the corpus in the same line-delimited format; load_corpus of the
// result reproduces the corpus field for field.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// Applies the five exclusion rules. Rules (a)-(d) are evaluated
// independently per article so the report can flag multi-rule hits;
// dedup (e) runs over the survivors, keeping the first occurrence in
// input order. Filtering is total and idempotent.
std::pair<Corpus, FilterReport> filter_corpus(const Corpus& corpus,
                                              const FilterConfig& config);

// Canonical URL form: scheme unified to https, host lowercased, trailing
// slashes and fragment stripped, query preserved. An unparseable URL is
// returned verbatim and *parsed_ok (when given) is set to false.
std::string normalize_url(const std::string& url, bool* parsed_ok = nullptr);

// Returns an error message when the article violates a corpus invariant
// (empty/whitespace id, no text at all, rating outside 1..5, bad
// language code), empty string otherwise.
std::string validate_article(const Article& a);

}  // namespace akmine
