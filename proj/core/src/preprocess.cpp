#include "akmine/preprocess.hpp"

#include "akmine/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace akmine {

Token Token::word(std::string t) {
    Token tok;
    tok.kind = Kind::Word;
    tok.term = std::move(t);
    return tok;
}

Token Token::tag(AkConcept c, int index) {
    Token tok;
    tok.kind = Kind::Tag;
    tok.category = c;
    tok.index = index;
    return tok;
}

std::string Token::symbol() const {
    return kind == Kind::Word ? term : tag_symbol(category, index);
}

std::string tag_symbol(AkConcept c, int index) {
    return "<" + std::string(concept_name(c)) + "_" + std::to_string(index) + ">";
}

std::optional<std::pair<AkConcept, int>> parse_tag_symbol(std::string_view symbol) {
    if (symbol.size() < 4 || symbol.front() != '<' || symbol.back() != '>') {
        return std::nullopt;
    }
    std::string_view body = symbol.substr(1, symbol.size() - 2);
    std::size_t underscore = body.rfind('_');
    if (underscore == std::string_view::npos || underscore + 1 >= body.size()) {
        return std::nullopt;
    }
    auto category = concept_from_name(body.substr(0, underscore));
    if (!category) return std::nullopt;
    int index = 0;
    auto digits = body.substr(underscore + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || index < 1) {
        return std::nullopt;
    }
    return std::make_pair(*category, index);
}

std::vector<Token> remove_listed_terms(const std::vector<Token>& tokens,
                                       const WordLists& lists,
                                       StageReport* report) {
    std::vector<Token> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
        if (tok.is_tag()) {
            out.push_back(tok);
            continue;
        }
        if (lists.stopwords.count(tok.term) != 0) {
            if (report) ++report->removed_stopwords;
        } else if (lists.generic_terms.count(tok.term) != 0) {
            if (report) ++report->removed_generic;
        } else if (lists.code_terms.count(tok.term) != 0) {
            if (report) ++report->removed_code;
        } else {
            out.push_back(tok);
        }
    }
    return out;
}

std::unordered_map<std::string, double> compute_document_frequency(
    const std::vector<std::vector<Token>>& docs) {
    if (docs.empty()) throw InputError("document frequency needs at least one document");
    std::unordered_map<std::string, double> counts;
    for (const auto& doc : docs) {
        std::unordered_set<std::string> seen;
        for (const auto& tok : doc) seen.insert(tok.symbol());
        for (const auto& sym : seen) counts[sym] += 1.0;
    }
    const double n = static_cast<double>(docs.size());
    for (auto& [sym, c] : counts) c /= n;
    return counts;
}

std::vector<std::vector<Token>> apply_df_filter(
    const std::vector<std::vector<Token>>& docs,
    const std::unordered_map<std::string, double>& df,
    const PipelineConfig& config,
    StageReport* report) {
    std::vector<std::vector<Token>> out;
    out.reserve(docs.size());
    for (const auto& doc : docs) {
        std::vector<Token> kept;
        kept.reserve(doc.size());
        for (const auto& tok : doc) {
            if (tok.is_tag()) {
                kept.push_back(tok);
                continue;
            }
            auto it = df.find(tok.term);
            double f = it == df.end() ? 0.0 : it->second;
            if (f < config.df_low || f > config.df_high) {
                if (report) ++report->removed_df;
            } else {
                kept.push_back(tok);
            }
        }
        out.push_back(std::move(kept));
    }
    return out;
}

TaggedDocument tag_ak_terms(std::string article_id,
                            const std::vector<Token>& tokens,
                            const Ontology& ontology) {
    TaggedDocument doc;
    doc.article_id = std::move(article_id);
    std::array<std::map<std::string, int>, kAkConceptCount> term_index;

    const int max_window =
        std::min(4, std::max(1, ontology.max_term_words()));
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (tokens[i].is_tag()) {
            doc.tokens.push_back(tokens[i]);
            ++i;
            continue;
        }
        bool matched = false;
        int window = std::min<std::size_t>(max_window, tokens.size() - i);
        for (int len = window; len >= 1 && !matched; --len) {
            bool all_words = true;
            std::string joined;
            for (int j = 0; j < len; ++j) {
                if (tokens[i + j].is_tag()) {
                    all_words = false;
                    break;
                }
                if (j > 0) joined.push_back(' ');
                joined += tokens[i + j].term;
            }
            if (!all_words) continue;
            auto category = resolve_concept(joined, ontology);
            if (!category) continue;
            auto& indices = term_index[static_cast<std::size_t>(*category)];
            auto [it, inserted] =
                indices.try_emplace(joined, static_cast<int>(indices.size()) + 1);
            if (inserted) {
                doc.tag_map[{*category, it->second}] = joined;
            }
            doc.tokens.push_back(Token::tag(*category, it->second));
            i += static_cast<std::size_t>(len);
            matched = true;
        }
        if (!matched) {
            doc.tokens.push_back(tokens[i]);
            ++i;
        }
    }
    return doc;
}

namespace {

// Deterministic per-index parallel map: results land in their slot
// regardless of scheduling.
template <typename Fn>
void parallel_for_index(std::size_t count, Fn&& fn) {
    unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(),
                                          static_cast<unsigned>(count));
    if (workers <= 1 || count < 16) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    std::size_t chunk = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk;
        std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&fn, begin, end] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace

std::vector<TaggedDocument> preprocess_corpus(const Corpus& corpus,
                                              const Ontology& ontology,
                                              const WordLists& lists,
                                              const PipelineConfig& config,
                                              StageReport* report) {
    if (config.df_low < 0.0 || config.df_high > 1.0 ||
        config.df_low >= config.df_high) {
        throw InputError("document-frequency thresholds must satisfy "
                         "0 <= df_low < df_high <= 1");
    }
    StageReport local;
    local.filter_stage =
        config.filter_stage == PipelineConfig::FilterStage::AfterLemmatize
            ? "after-lemmatize"
            : "before-lemmatize";

    const std::size_t n = corpus.articles.size();
    std::vector<std::vector<Token>> surface(n);
    std::vector<StageReport> doc_reports(n);

    parallel_for_index(n, [&](std::size_t i) {
        const Article& a = corpus.articles[i];
        std::string text = a.plain_text
                               ? *a.plain_text
                               : strip_html(a.raw_html ? *a.raw_html : "");
        std::vector<Token> tokens;
        for (auto& term : tokenize(text)) {
            tokens.push_back(Token::word(std::move(term)));
        }
        doc_reports[i].raw_tokens = static_cast<long long>(tokens.size());
        surface[i] = remove_listed_terms(tokens, lists, &doc_reports[i]);
    });
    for (const auto& r : doc_reports) {
        local.raw_tokens += r.raw_tokens;
        local.removed_stopwords += r.removed_stopwords;
        local.removed_generic += r.removed_generic;
        local.removed_code += r.removed_code;
    }

    auto lemmatize_docs = [&](std::vector<std::vector<Token>>& docs) {
        parallel_for_index(docs.size(), [&](std::size_t i) {
            for (auto& tok : docs[i]) {
                if (!tok.is_tag()) {
                    tok.term = lemmatize(tok.term, lists.lemma_exceptions);
                }
            }
        });
    };

    std::vector<std::vector<Token>> filtered;
    if (config.filter_stage == PipelineConfig::FilterStage::BeforeLemmatize) {
        auto df = compute_document_frequency(surface);
        filtered = apply_df_filter(surface, df, config, &local);
        lemmatize_docs(filtered);
    } else {
        lemmatize_docs(surface);
        auto df = compute_document_frequency(surface);
        filtered = apply_df_filter(surface, df, config, &local);
    }

    std::vector<TaggedDocument> out(n);
    parallel_for_index(n, [&](std::size_t i) {
        out[i] = tag_ak_terms(corpus.articles[i].id, filtered[i], ontology);
    });
    for (const auto& doc : out) {
        local.output_tokens += static_cast<long long>(doc.tokens.size());
        for (const auto& tok : doc.tokens) {
            if (tok.is_tag()) ++local.tagged_tokens;
        }
    }
    if (report) *report = local;
    return out;
}

std::string stage_report_to_json(const StageReport& report) {
    nlohmann::ordered_json j;
    j["filter_stage"] = report.filter_stage;
    j["raw_tokens"] = report.raw_tokens;
    j["removed_stopwords"] = report.removed_stopwords;
    j["removed_generic"] = report.removed_generic;
    j["removed_code"] = report.removed_code;
    j["removed_df"] = report.removed_df;
    j["tagged_tokens"] = report.tagged_tokens;
    j["output_tokens"] = report.output_tokens;
    return j.dump(2);
}

void save_tagged_documents(const std::vector<TaggedDocument>& docs,
                           const std::filesystem::path& docs_file,
                           const std::filesystem::path& tag_map_file) {
    std::ofstream out(docs_file);
    if (!out) throw RuntimeFailure("cannot open for write: " + docs_file.string());
    std::ofstream map_out(tag_map_file);
    if (!map_out) {
        throw RuntimeFailure("cannot open for write: " + tag_map_file.string());
    }
    for (const auto& doc : docs) {
        out << doc.article_id;
        for (const auto& tok : doc.tokens) out << ' ' << tok.symbol();
        out << '\n';
        for (const auto& [key, term] : doc.tag_map) {
            map_out << doc.article_id << '\t' << concept_name(key.first) << '_'
                    << key.second << '\t' << term << '\n';
        }
    }
    if (!out || !map_out) throw RuntimeFailure("write failed while dumping documents");
}

std::vector<TaggedDocument> load_tagged_documents(
    const std::filesystem::path& docs_file,
    const std::filesystem::path& tag_map_file) {
    std::ifstream in(docs_file);
    if (!in) throw InputError("cannot open tagged documents: " + docs_file.string());
    std::vector<TaggedDocument> docs;
    std::unordered_map<std::string, std::size_t> index_by_id;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        TaggedDocument doc;
        if (!(ss >> doc.article_id)) continue;
        std::string sym;
        while (ss >> sym) {
            if (auto tag = parse_tag_symbol(sym)) {
                doc.tokens.push_back(Token::tag(tag->first, tag->second));
            } else {
                doc.tokens.push_back(Token::word(sym));
            }
        }
        if (index_by_id.count(doc.article_id) != 0) {
            throw InputError("duplicate article id '" + doc.article_id +
                             "' at line " + std::to_string(line_no));
        }
        index_by_id[doc.article_id] = docs.size();
        docs.push_back(std::move(doc));
    }

    std::ifstream map_in(tag_map_file);
    if (!map_in) throw InputError("cannot open tag map: " + tag_map_file.string());
    line_no = 0;
    while (std::getline(map_in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::size_t tab1 = line.find('\t');
        std::size_t tab2 = tab1 == std::string::npos ? std::string::npos
                                                     : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) {
            throw InputError("malformed tag map line " + std::to_string(line_no));
        }
        std::string id = line.substr(0, tab1);
        std::string tag_name = line.substr(tab1 + 1, tab2 - tab1 - 1);
        std::string term = line.substr(tab2 + 1);
        auto it = index_by_id.find(id);
        if (it == index_by_id.end()) {
            throw InputError("tag map references unknown article '" + id + "'");
        }
        auto tag = parse_tag_symbol("<" + tag_name + ">");
        if (!tag) {
            throw InputError("malformed tag '" + tag_name + "' at tag map line " +
                             std::to_string(line_no));
        }
        docs[it->second].tag_map[{tag->first, tag->second}] = term;
    }
    return docs;
}

}  // namespace akmine
