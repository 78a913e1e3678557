#include "akmine/corpus.hpp"

#include "akmine/error.hpp"
#include "akmine/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace akmine {

using ordered_json = nlohmann::ordered_json;

namespace {

struct EnumStrings {
    std::string_view add_steps[3] = {
        "identify_design_concepts",
        "select_design_concepts",
        "instantiate_architecture_elements",
    };
    std::string_view blog_types[7] = {
        "community",        "technology_vendor", "personal", "it_service",
        "magazine_newspaper", "educational",     "unlabeled",
    };
    std::string_view qual_topics[6] = {
        "elaborate_evaluate_solution", "list_related_solutions",
        "compare_solutions",           "how_to_design",
        "how_to_implement",            "unlabeled",
    };
};

const EnumStrings kEnum;

}  // namespace

std::string_view to_string(AddStep s) {
    return kEnum.add_steps[static_cast<int>(s)];
}
std::string_view to_string(BlogType t) {
    return kEnum.blog_types[static_cast<int>(t)];
}
std::string_view to_string(QualTopic t) {
    return kEnum.qual_topics[static_cast<int>(t)];
}

std::optional<AddStep> add_step_from_string(std::string_view s) {
    for (int i = 0; i < 3; ++i) {
        if (s == kEnum.add_steps[i]) return static_cast<AddStep>(i);
    }
    return std::nullopt;
}

std::optional<BlogType> blog_type_from_string(std::string_view s) {
    for (int i = 0; i < 7; ++i) {
        if (s == kEnum.blog_types[i]) return static_cast<BlogType>(i);
    }
    return std::nullopt;
}

std::optional<QualTopic> qual_topic_from_string(std::string_view s) {
    for (int i = 0; i < 6; ++i) {
        if (s == kEnum.qual_topics[i]) return static_cast<QualTopic>(i);
    }
    return std::nullopt;
}

const std::array<AddStep, 3>& all_add_steps() {
    static const std::array<AddStep, 3> steps = {
        AddStep::IdentifyDesignConcepts,
        AddStep::SelectDesignConcepts,
        AddStep::InstantiateArchitectureElements,
    };
    return steps;
}

const std::string& Article::text_source() const {
    static const std::string empty;
    if (plain_text) return *plain_text;
    if (raw_html) return *raw_html;
    return empty;
}

std::string_view filter_rule_name(FilterRule r) {
    switch (r) {
        case FilterRule::NoRelevance: return "no_relevance";
        case FilterRule::NonEnglish: return "non_english";
        case FilterRule::Inaccessible: return "inaccessible";
        case FilterRule::Tutorial: return "tutorial";
        case FilterRule::Duplicate: return "duplicate";
    }
    return "unknown";
}

int FilterReport::total_exclusions() const {
    int n = 0;
    for (int c : excluded_count) n += c;
    return n;
}

std::string validate_article(const Article& a) {
    if (a.id.empty()) return "article id is empty";
    if (a.id.find_first_of(" \t\r\n") != std::string::npos) {
        return "article id '" + a.id + "' contains whitespace";
    }
    if (!a.raw_html && !a.plain_text) {
        return "article '" + a.id + "' has neither raw_html nor plain_text";
    }
    if (!a.language.empty() && a.language.size() != 2) {
        return "article '" + a.id + "' has a non-two-letter language code '" +
               a.language + "'";
    }
    for (const auto& r : a.ratings) {
        if (r.rating < 1 || r.rating > 5) {
            return "article '" + a.id + "' has rating " +
                   std::to_string(r.rating) + " outside 1..5";
        }
    }
    return {};
}

namespace {

Article article_from_json(const ordered_json& j) {
    Article a;
    a.id = j.at("id").get<std::string>();
    a.url = j.at("url").get<std::string>();
    if (j.contains("raw_html") && !j["raw_html"].is_null()) {
        a.raw_html = j["raw_html"].get<std::string>();
    }
    if (j.contains("plain_text") && !j["plain_text"].is_null()) {
        a.plain_text = j["plain_text"].get<std::string>();
    }
    a.language = j.at("language").get<std::string>();
    {
        auto s = j.at("blog_type").get<std::string>();
        auto t = blog_type_from_string(s);
        if (!t) throw InputError("unknown blog_type '" + s + "'");
        a.blog_type = *t;
    }
    {
        auto s = j.at("qualitative_topic").get<std::string>();
        auto t = qual_topic_from_string(s);
        if (!t) throw InputError("unknown qualitative_topic '" + s + "'");
        a.qualitative_topic = *t;
    }
    if (j.contains("lda_topic") && !j["lda_topic"].is_null()) {
        a.lda_topic = j["lda_topic"].get<int>();
    }
    a.is_tutorial = j.at("is_tutorial").get<bool>();
    a.accessible = j.at("accessible").get<bool>();
    for (const auto& rj : j.at("ratings")) {
        RelevanceRating r;
        r.task_id = rj.at("task_id").get<std::string>();
        auto s = rj.at("add_step").get<std::string>();
        auto step = add_step_from_string(s);
        if (!step) throw InputError("unknown add_step '" + s + "'");
        r.add_step = *step;
        r.rating = rj.at("rating").get<int>();
        if (rj.contains("rater_id") && !rj["rater_id"].is_null()) {
            r.rater_id = rj["rater_id"].get<std::string>();
        }
        a.ratings.push_back(std::move(r));
    }
    std::string problem = validate_article(a);
    if (!problem.empty()) throw InputError(problem);
    return a;
}

ordered_json article_to_json(const Article& a) {
    ordered_json j;
    j["id"] = a.id;
    j["url"] = a.url;
    if (a.raw_html) j["raw_html"] = *a.raw_html;
    if (a.plain_text) j["plain_text"] = *a.plain_text;
    j["language"] = a.language;
    j["blog_type"] = std::string(to_string(a.blog_type));
    j["qualitative_topic"] = std::string(to_string(a.qualitative_topic));
    if (a.lda_topic) j["lda_topic"] = *a.lda_topic;
    j["is_tutorial"] = a.is_tutorial;
    j["accessible"] = a.accessible;
    j["ratings"] = ordered_json::array();
    for (const auto& r : a.ratings) {
        ordered_json rj;
        rj["task_id"] = r.task_id;
        rj["add_step"] = std::string(to_string(r.add_step));
        rj["rating"] = r.rating;
        if (!r.rater_id.empty()) rj["rater_id"] = r.rater_id;
        j["ratings"].push_back(std::move(rj));
    }
    return j;
}

std::uint64_t fnv1a_hash(std::string_view data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open corpus file: " + path.string());
    Corpus corpus;
    corpus.source_path = path.string();
    std::unordered_set<std::string> seen_ids;
    std::string line;
    int line_no = 0;
    int skipped = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            ordered_json j = ordered_json::parse(line);
            Article a = article_from_json(j);
            if (!seen_ids.insert(a.id).second) {
                throw InputError("duplicate article id '" + a.id + "'");
            }
            corpus.articles.push_back(std::move(a));
        } catch (const std::exception& e) {
            std::string msg = "line " + std::to_string(line_no) + ": " + e.what();
            if (strict) {
                throw InputError("malformed record at " + msg);
            }
            corpus.filter_log.push_back("skipped malformed record at " + msg);
            ++skipped;
        }
    }
    if (skipped > 0) {
        corpus.filter_log.push_back("skipped " + std::to_string(skipped) +
                                    " malformed record(s) in lenient mode");
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot open for write: " + path.string());
    for (const auto& a : corpus.articles) {
        out << article_to_json(a).dump() << '\n';
    }
    if (!out) throw RuntimeFailure("write failed: " + path.string());
}

std::string normalize_url(const std::string& url, bool* parsed_ok) {
    if (parsed_ok) *parsed_ok = true;
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos || scheme_end == 0) {
        if (parsed_ok) *parsed_ok = false;
        return url;
    }
    for (std::size_t i = 0; i < scheme_end; ++i) {
        unsigned char c = static_cast<unsigned char>(url[i]);
        bool ok = i == 0 ? std::isalpha(c)
                         : (std::isalnum(c) || c == '+' || c == '-' || c == '.');
        if (!ok) {
            if (parsed_ok) *parsed_ok = false;
            return url;
        }
    }
    std::size_t rest = scheme_end + 3;
    std::size_t host_end = url.find_first_of("/?#", rest);
    std::string host = url.substr(rest, host_end == std::string::npos
                                            ? std::string::npos
                                            : host_end - rest);
    if (host.empty()) {
        if (parsed_ok) *parsed_ok = false;
        return url;
    }
    std::transform(host.begin(), host.end(), host.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });

    std::string path, query;
    if (host_end != std::string::npos) {
        std::size_t i = host_end;
        if (url[i] == '/') {
            std::size_t path_end = url.find_first_of("?#", i);
            path = url.substr(i, path_end == std::string::npos ? std::string::npos
                                                               : path_end - i);
            i = path_end == std::string::npos ? url.size() : path_end;
        }
        if (i < url.size() && url[i] == '?') {
            std::size_t query_end = url.find('#', i);
            query = url.substr(i + 1, query_end == std::string::npos
                                          ? std::string::npos
                                          : query_end - i - 1);
        }
        // fragment dropped
    }
    while (!path.empty() && path.back() == '/') path.pop_back();

    std::string out = "https://" + host + path;
    if (!query.empty()) out += "?" + query;
    return out;
}

std::pair<Corpus, FilterReport> filter_corpus(const Corpus& corpus,
                                              const FilterConfig& config) {
    FilterReport report;
    report.input_count = static_cast<int>(corpus.articles.size());

    auto mark = [&report](FilterRule rule, const std::string& id) {
        auto i = static_cast<std::size_t>(rule);
        report.excluded_count[i] += 1;
        report.excluded_ids[i].push_back(id);
    };

    // rules (a)-(d), evaluated independently per article
    std::vector<bool> excluded(corpus.articles.size(), false);
    for (std::size_t i = 0; i < corpus.articles.size(); ++i) {
        const Article& a = corpus.articles[i];
        int hits = 0;
        bool all_level_one = !a.ratings.empty() &&
                             std::all_of(a.ratings.begin(), a.ratings.end(),
                                         [](const RelevanceRating& r) {
                                             return r.rating == 1;
                                         });
        if (all_level_one) {
            mark(FilterRule::NoRelevance, a.id);
            ++hits;
        }
        bool non_english = false;
        if (!a.language.empty()) {
            non_english = a.language != "en";
        } else if (config.use_language_heuristic) {
            non_english = english_function_word_ratio(a.text_source()) <
                          config.english_ratio_threshold;
        }
        if (non_english) {
            mark(FilterRule::NonEnglish, a.id);
            ++hits;
        }
        if (!a.accessible) {
            mark(FilterRule::Inaccessible, a.id);
            ++hits;
        }
        if (a.is_tutorial) {
            mark(FilterRule::Tutorial, a.id);
            ++hits;
        }
        if (hits > 0) excluded[i] = true;
        if (hits > 1) report.multi_rule_ids.push_back(a.id);
    }

    // rule (e): dedup over survivors, first occurrence kept in input order
    Corpus out;
    out.source_path = corpus.source_path;
    out.filter_log = corpus.filter_log;
    std::unordered_set<std::string> seen_urls;
    std::unordered_set<std::uint64_t> seen_hashes;
    for (std::size_t i = 0; i < corpus.articles.size(); ++i) {
        if (excluded[i]) continue;
        const Article& a = corpus.articles[i];
        bool ok = true;
        std::string norm = normalize_url(a.url, &ok);
        if (!ok) report.unparseable_urls.push_back(a.url);
        std::uint64_t text_hash = fnv1a_hash(a.text_source());
        if (!seen_urls.insert(norm).second ||
            !seen_hashes.insert(text_hash).second) {
            mark(FilterRule::Duplicate, a.id);
            continue;
        }
        out.articles.push_back(a);
    }
    report.output_count = static_cast<int>(out.articles.size());
    out.filter_log.push_back(
        "filtered " + std::to_string(report.input_count) + " -> " +
        std::to_string(report.output_count) + " articles");
    return {std::move(out), report};
}

std::string filter_report_to_json(const FilterReport& report) {
    ordered_json j;
    j["input_count"] = report.input_count;
    j["output_count"] = report.output_count;
    ordered_json rules;
    for (int i = 0; i < kFilterRuleCount; ++i) {
        ordered_json r;
        r["excluded"] = report.excluded_count[i];
        r["ids"] = report.excluded_ids[i];
        rules[std::string(filter_rule_name(static_cast<FilterRule>(i)))] = r;
    }
    j["rules"] = rules;
    j["multi_rule_ids"] = report.multi_rule_ids;
    j["unparseable_urls"] = report.unparseable_urls;
    return j.dump(2);
}

}  // namespace akmine
