#include "commands.hpp"

#include "akmine/corpus.hpp"
#include "akmine/error.hpp"
#include "akmine/lda.hpp"
#include "akmine/ontology.hpp"
#include "akmine/preprocess.hpp"
#include "akmine/stats.hpp"
#include "akmine/version.hpp"

#include <json.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace akmine::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Guards an output directory against concurrent writers.
class OutputDir {
public:
    explicit OutputDir(const std::string& path) : dir_(path) {
        fs::create_directories(dir_);
        lock_path_ = dir_ / ".akmine.lock";
        fd_ = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            throw RuntimeFailure("output directory is locked by another run: " +
                                 lock_path_.string());
        }
    }
    ~OutputDir() {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            fs::remove(lock_path_, ec);
        }
    }
    OutputDir(const OutputDir&) = delete;
    OutputDir& operator=(const OutputDir&) = delete;

    const fs::path& path() const { return dir_; }

private:
    fs::path dir_;
    fs::path lock_path_;
    int fd_{-1};
};

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const ordered_json& inputs, const ordered_json& config) {
    ordered_json manifest;
    manifest["command"] = command;
    manifest["tool_version"] = kVersion;
    manifest["inputs"] = inputs;
    manifest["config"] = config;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.dump())));
    manifest["config_hash"] = hash;

    auto path = out_dir / ("manifest_" + command + ".json");
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot write manifest: " + path.string());
    out << manifest.dump(2) << '\n';
}

void require_path(const std::string& value, const std::string& flag) {
    if (value.empty()) throw UsageError("missing required option --" + flag);
    if (!fs::exists(value)) {
        throw InputError("path given for --" + flag + " does not exist: " + value);
    }
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw RuntimeFailure("cannot write: " + path.string());
    return out;
}

WordLists load_word_lists(const RunConfig& cfg) {
    require_path(cfg.stopwords_path, "stopwords");
    require_path(cfg.generic_terms_path, "generic-terms");
    require_path(cfg.code_terms_path, "code-terms");
    require_path(cfg.lemma_exceptions_path, "lemma-exceptions");
    WordLists lists;
    lists.stopwords = load_word_list(cfg.stopwords_path);
    lists.generic_terms = load_word_list(cfg.generic_terms_path);
    lists.code_terms = load_word_list(cfg.code_terms_path);
    lists.lemma_exceptions = load_lemma_exceptions(cfg.lemma_exceptions_path);
    return lists;
}

LdaConfig lda_config(const RunConfig& cfg) {
    LdaConfig out;
    out.k = cfg.k;
    if (cfg.alpha > 0.0) out.alpha = cfg.alpha;
    out.beta = cfg.beta;
    out.iterations = cfg.iterations;
    out.burn_in = cfg.burn_in;
    out.seed = cfg.seed;
    return out;
}

std::vector<TaggedDocument> load_docs(const RunConfig& cfg) {
    require_path(cfg.tagged_docs_path, "tagged-docs");
    require_path(cfg.tag_map_path, "tag-map");
    return load_tagged_documents(cfg.tagged_docs_path, cfg.tag_map_path);
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Label maps over the corpus; articles without the label are left out.
std::map<std::string, std::string> blog_type_labels(const Corpus& corpus) {
    std::map<std::string, std::string> out;
    for (const auto& a : corpus.articles) {
        if (a.blog_type != BlogType::Unlabeled) {
            out[a.id] = std::string(to_string(a.blog_type));
        }
    }
    return out;
}

std::map<std::string, std::string> qual_topic_labels(const Corpus& corpus) {
    std::map<std::string, std::string> out;
    for (const auto& a : corpus.articles) {
        if (a.qualitative_topic != QualTopic::Unlabeled) {
            out[a.id] = std::string(to_string(a.qualitative_topic));
        }
    }
    return out;
}

std::map<std::string, std::string> lda_topic_labels(const RunConfig& cfg,
                                                    const Corpus& corpus) {
    std::map<std::string, std::string> out;
    if (!cfg.model_dir.empty()) {
        auto model = load_model(cfg.model_dir);
        auto topics = assign_all(model);
        for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
            out[model.doc_ids[d]] = "topic_" + std::to_string(topics[d]);
        }
    } else {
        for (const auto& a : corpus.articles) {
            if (a.lda_topic) out[a.id] = "topic_" + std::to_string(*a.lda_topic);
        }
    }
    return out;
}

// Restricts both maps to their common article ids.
std::pair<std::map<std::string, std::string>, std::map<std::string, std::string>>
intersect_labels(const std::map<std::string, std::string>& a,
                 const std::map<std::string, std::string>& b) {
    std::map<std::string, std::string> ra, rb;
    for (const auto& [id, value] : a) {
        auto it = b.find(id);
        if (it != b.end()) {
            ra[id] = value;
            rb[id] = it->second;
        }
    }
    return {std::move(ra), std::move(rb)};
}

std::map<std::string, std::string> read_label_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open labels file: " + path.string());
    std::map<std::string, std::string> labels;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 > line.size()) {
            throw InputError("malformed label line " + std::to_string(line_no) +
                             " in " + path.string() +
                             " (expected id<TAB>label)");
        }
        labels[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return labels;
}

ordered_json paths_json(std::initializer_list<std::pair<const char*, const std::string*>> items) {
    ordered_json j;
    for (const auto& [key, value] : items) j[key] = *value;
    return j;
}

}  // namespace

void cmd_filter(const RunConfig& cfg) {
    require_path(cfg.corpus_path, "corpus");
    OutputDir out(cfg.out_dir);

    Corpus corpus = load_corpus(cfg.corpus_path, cfg.strict);
    FilterConfig filter_cfg;
    filter_cfg.use_language_heuristic = cfg.language_heuristic;
    auto [filtered, report] = filter_corpus(corpus, filter_cfg);

    save_corpus(filtered, out.path() / "filtered.jsonl");
    open_out(out.path() / "filter_report.json") << filter_report_to_json(report)
                                                << '\n';

    ordered_json config;
    config["strict"] = cfg.strict;
    config["language_heuristic"] = cfg.language_heuristic;
    write_manifest(out.path(), "filter",
                   paths_json({{"corpus", &cfg.corpus_path}}), config);

    std::cout << "filter: " << report.input_count << " -> "
              << report.output_count << " articles";
    for (int i = 0; i < kFilterRuleCount; ++i) {
        std::cout << ", " << filter_rule_name(static_cast<FilterRule>(i)) << "="
                  << report.excluded_count[i];
    }
    std::cout << "\n";
}

void cmd_preprocess(const RunConfig& cfg) {
    require_path(cfg.corpus_path, "corpus");
    require_path(cfg.ontology_dir, "ontology-dir");
    auto lists = load_word_lists(cfg);
    OutputDir out(cfg.out_dir);

    Corpus corpus = load_corpus(cfg.corpus_path, cfg.strict);
    Ontology ontology = load_ontology(cfg.ontology_dir, lists.lemma_exceptions);

    PipelineConfig pipeline;
    pipeline.df_low = cfg.df_low;
    pipeline.df_high = cfg.df_high;
    if (cfg.filter_stage == "before-lemmatize") {
        pipeline.filter_stage = PipelineConfig::FilterStage::BeforeLemmatize;
    } else if (cfg.filter_stage != "after-lemmatize") {
        throw UsageError("unknown --filter-stage '" + cfg.filter_stage +
                         "' (use after-lemmatize or before-lemmatize)");
    }

    StageReport report;
    auto docs = preprocess_corpus(corpus, ontology, lists, pipeline, &report);
    save_tagged_documents(docs, out.path() / "tagged_docs.txt",
                          out.path() / "tag_map.tsv");
    open_out(out.path() / "stage_report.json") << stage_report_to_json(report)
                                               << '\n';

    ordered_json config;
    config["df_low"] = cfg.df_low;
    config["df_high"] = cfg.df_high;
    config["filter_stage"] = cfg.filter_stage;
    write_manifest(out.path(), "preprocess",
                   paths_json({{"corpus", &cfg.corpus_path},
                               {"ontology_dir", &cfg.ontology_dir},
                               {"stopwords", &cfg.stopwords_path},
                               {"generic_terms", &cfg.generic_terms_path},
                               {"code_terms", &cfg.code_terms_path},
                               {"lemma_exceptions", &cfg.lemma_exceptions_path}}),
                   config);

    std::cout << "preprocess: " << docs.size() << " documents, "
              << report.output_tokens << " tokens (" << report.tagged_tokens
              << " tagged)\n";
}

namespace {

ordered_json lda_config_json(const LdaConfig& lda, const RunConfig& cfg) {
    ordered_json config;
    config["k"] = lda.k;
    config["alpha"] = lda.resolved_alpha();
    config["alpha_derived"] = !lda.alpha.has_value();
    config["beta"] = lda.beta;
    config["iterations"] = lda.iterations;
    config["burn_in"] = lda.burn_in;
    config["seed"] = cfg.seed;
    return config;
}

}  // namespace

void cmd_fit(const RunConfig& cfg) {
    auto docs = load_docs(cfg);
    OutputDir out(cfg.out_dir);

    LdaConfig lda = lda_config(cfg);
    LdaModel model = fit(docs, lda);
    save_model(model, out.path() / "model");

    write_manifest(out.path(), "fit",
                   paths_json({{"tagged_docs", &cfg.tagged_docs_path},
                               {"tag_map", &cfg.tag_map_path}}),
                   lda_config_json(lda, cfg));
    std::cout << "fit: k=" << lda.k << " alpha=" << lda.resolved_alpha()
              << " beta=" << lda.beta << " docs=" << docs.size()
              << " vocab=" << model.vocab.size() << "\n";
}

void cmd_sweep_k(const RunConfig& cfg) {
    if (cfg.k_min < 2 || cfg.k_max < cfg.k_min) {
        throw UsageError("need 2 <= k-min <= k-max");
    }
    auto docs = load_docs(cfg);
    OutputDir out(cfg.out_dir);

    std::vector<int> ks;
    for (int k = cfg.k_min; k <= cfg.k_max; ++k) ks.push_back(k);
    LdaConfig tmpl = lda_config(cfg);
    if (cfg.alpha <= 0.0) tmpl.alpha.reset();  // re-derive 50/k per entry

    auto table = sweep_k(docs, ks, tmpl, std::max(2, cfg.coherence_terms));
    auto csv = open_out(out.path() / "sweep_k.csv");
    csv << "k_or_alpha,mean_coherence_or_density,seed\n";
    for (const auto& entry : table) {
        csv << csv_number(entry.x) << ',' << csv_number(entry.score) << ','
            << entry.seed << '\n';
    }

    ordered_json config = lda_config_json(tmpl, cfg);
    config["k_min"] = cfg.k_min;
    config["k_max"] = cfg.k_max;
    write_manifest(out.path(), "sweep-k",
                   paths_json({{"tagged_docs", &cfg.tagged_docs_path},
                               {"tag_map", &cfg.tag_map_path}}),
                   config);

    auto best = std::max_element(table.begin(), table.end(),
                                 [](const SweepEntry& a, const SweepEntry& b) {
                                     return a.score < b.score;
                                 });
    std::cout << "sweep-k: best k=" << static_cast<int>(best->x)
              << " (mean coherence " << best->score << ")\n";
}

void cmd_sweep_alpha(const RunConfig& cfg) {
    auto docs = load_docs(cfg);
    OutputDir out(cfg.out_dir);

    std::vector<double> alphas;
    std::stringstream ss(cfg.alpha_numerators);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            alphas.push_back(std::stod(item) / cfg.k);
        } catch (const std::exception&) {
            throw UsageError("bad numerator '" + item + "' in --alpha-numerators");
        }
    }
    if (alphas.empty()) throw UsageError("--alpha-numerators is empty");

    LdaConfig tmpl = lda_config(cfg);
    auto table = sweep_alpha(docs, alphas, tmpl);
    auto csv = open_out(out.path() / "sweep_alpha.csv");
    csv << "k_or_alpha,mean_coherence_or_density,seed\n";
    for (const auto& entry : table) {
        csv << csv_number(entry.x) << ',' << csv_number(entry.score) << ','
            << entry.seed << '\n';
    }

    ordered_json config = lda_config_json(tmpl, cfg);
    config["alpha_numerators"] = cfg.alpha_numerators;
    config["alphas"] = alphas;
    write_manifest(out.path(), "sweep-alpha",
                   paths_json({{"tagged_docs", &cfg.tagged_docs_path},
                               {"tag_map", &cfg.tag_map_path}}),
                   config);
    std::cout << "sweep-alpha: " << table.size() << " entries\n";
}

void cmd_assign(const RunConfig& cfg) {
    require_path(cfg.model_dir, "model-dir");
    OutputDir out(cfg.out_dir);

    auto model = load_model(cfg.model_dir);
    auto topics = assign_all(model);
    auto csv = open_out(out.path() / "assignments.csv");
    csv << "article_id,topic\n";
    for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
        csv << model.doc_ids[d] << ',' << topics[d] << '\n';
    }

    ordered_json config;
    config["k"] = model.config.k;
    write_manifest(out.path(), "assign",
                   paths_json({{"model_dir", &cfg.model_dir}}), config);
    std::cout << "assign: " << model.doc_ids.size() << " documents\n";
}

void cmd_report_topics(const RunConfig& cfg) {
    require_path(cfg.model_dir, "model-dir");
    auto docs = load_docs(cfg);
    OutputDir out(cfg.out_dir);

    auto model = load_model(cfg.model_dir);
    auto reports = topic_report(model, docs, cfg.n_terms);

    auto csv = open_out(out.path() / "topic_report.csv");
    csv << "topic,share,row,term,term_freq,ak_concept,concept_freq,"
           "terms_per_article_min,terms_per_article_max\n";
    for (const auto& r : reports) {
        std::size_t rows = std::max(r.top_terms.size(), r.top_concepts.size());
        for (std::size_t row = 0; row < rows; ++row) {
            csv << r.topic << ',' << csv_number(r.share) << ',' << row + 1 << ',';
            if (row < r.top_terms.size()) {
                csv << r.top_terms[row].first << ',' << r.top_terms[row].second;
            } else {
                csv << ',';
            }
            csv << ',';
            if (row < r.top_concepts.size()) {
                auto [ak, freq] = r.top_concepts[row];
                csv << concept_name(ak) << ',' << freq << ',';
                // tokens of a concept can land in a topic no assigned
                // article carries it in; the range is empty then
                auto range = r.terms_per_article.find(ak);
                if (range != r.terms_per_article.end()) {
                    csv << range->second.first << ',' << range->second.second;
                } else {
                    csv << ',';
                }
            } else {
                csv << ",,,";
            }
            csv << '\n';
        }
    }

    auto txt = open_out(out.path() / "topic_report.txt");
    for (const auto& r : reports) {
        txt << "topic " << r.topic << "  (share "
            << csv_number(r.share * 100.0) << "% of articles)\n";
        txt << "  terms:";
        for (const auto& [term, freq] : r.top_terms) {
            txt << ' ' << term << '(' << freq << ')';
        }
        txt << "\n  concepts:";
        for (const auto& [ak, freq] : r.top_concepts) {
            txt << ' ' << concept_name(ak) << '(' << freq;
            auto range = r.terms_per_article.find(ak);
            if (range != r.terms_per_article.end()) {
                txt << ", " << range->second.first << ".."
                    << range->second.second << " terms/article";
            }
            txt << ')';
        }
        txt << "\n";
    }

    ordered_json config;
    config["n_terms"] = cfg.n_terms;
    write_manifest(out.path(), "report-topics",
                   paths_json({{"model_dir", &cfg.model_dir},
                               {"tagged_docs", &cfg.tagged_docs_path},
                               {"tag_map", &cfg.tag_map_path}}),
                   config);
    std::cout << "report-topics: " << reports.size() << " topics\n";
}

void cmd_review_terms(const RunConfig& cfg) {
    require_path(cfg.model_dir, "model-dir");
    require_path(cfg.ontology_dir, "ontology-dir");
    auto docs = load_docs(cfg);
    auto lists = load_word_lists(cfg);
    OutputDir out(cfg.out_dir);

    auto model = load_model(cfg.model_dir);
    auto ontology = load_ontology(cfg.ontology_dir, lists.lemma_exceptions);
    auto reports = topic_report(model, docs, cfg.review_terms * 4);

    auto is_listed = [&](const std::string& term) {
        return lists.stopwords.count(term) != 0 ||
               lists.generic_terms.count(term) != 0 ||
               lists.code_terms.count(term) != 0 ||
               resolve_concept(term, ontology).has_value();
    };

    auto tsv = open_out(out.path() / "term_review.tsv");
    tsv << "# topic\tterm\tfrequency\tdisposition (generic | code | "
           "<concept name> | keep)\n";
    int listed_rows = 0;
    for (const auto& r : reports) {
        int emitted = 0;
        for (const auto& [term, freq] : r.top_terms) {
            if (emitted >= cfg.review_terms) break;
            if (is_listed(term)) continue;
            tsv << r.topic << '\t' << term << '\t' << freq << "\t\n";
            ++emitted;
        }
        listed_rows += emitted;
    }

    ordered_json config;
    config["review_terms"] = cfg.review_terms;
    write_manifest(out.path(), "review-terms",
                   paths_json({{"model_dir", &cfg.model_dir},
                               {"tagged_docs", &cfg.tagged_docs_path},
                               {"tag_map", &cfg.tag_map_path},
                               {"ontology_dir", &cfg.ontology_dir}}),
                   config);
    std::cout << "review-terms: " << listed_rows << " unlisted terms"
              << (listed_rows == 0 ? " (iteration converged)" : "") << "\n";
}

void cmd_apply_review(const RunConfig& cfg) {
    require_path(cfg.review_report_path, "report");
    require_path(cfg.ontology_dir, "ontology-dir");
    require_path(cfg.generic_terms_path, "generic-terms");
    require_path(cfg.code_terms_path, "code-terms");
    OutputDir out(cfg.out_dir);

    LemmaDict exceptions;
    if (!cfg.lemma_exceptions_path.empty()) {
        require_path(cfg.lemma_exceptions_path, "lemma-exceptions");
        exceptions = load_lemma_exceptions(cfg.lemma_exceptions_path);
    }

    std::ifstream in(cfg.review_report_path);
    if (!in) throw InputError("cannot open report: " + cfg.review_report_path);

    std::vector<std::string> to_generic, to_code;
    std::map<AkConcept, std::vector<std::string>> to_ontology;
    std::string line;
    int line_no = 0;
    int kept = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab == std::string::npos
                                                    ? std::string::npos
                                                    : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() < 3) {
            throw InputError("malformed review row at line " +
                             std::to_string(line_no));
        }
        const std::string& term = fields[1];
        std::string disposition = fields.size() >= 4 ? fields[3] : "";
        std::transform(disposition.begin(), disposition.end(),
                       disposition.begin(), [](unsigned char c) {
                           return static_cast<char>(std::tolower(c));
                       });
        if (disposition.empty() || disposition == "keep") {
            ++kept;
        } else if (disposition == "generic") {
            to_generic.push_back(term);
        } else if (disposition == "code") {
            to_code.push_back(term);
        } else if (auto ak = concept_from_name(disposition)) {
            to_ontology[*ak].push_back(term);
        } else {
            throw InputError("invalid disposition '" + fields[3] +
                             "' at line " + std::to_string(line_no) +
                             " (term '" + term + "')");
        }
    }

    auto change_log = open_out(out.path() / "review_changes.txt");
    auto append_unique = [&](const fs::path& path, std::vector<std::string> terms) {
        auto existing = load_word_list(path);
        std::vector<std::string> fresh;
        for (auto& t : terms) {
            if (existing.count(t) == 0 &&
                std::find(fresh.begin(), fresh.end(), t) == fresh.end()) {
                fresh.push_back(t);
            }
        }
        append_to_word_list(path, fresh);
        for (const auto& t : fresh) {
            change_log << t << " -> " << path.string() << '\n';
        }
        return fresh.size();
    };

    std::size_t changes = 0;
    changes += append_unique(cfg.generic_terms_path, to_generic);
    changes += append_unique(cfg.code_terms_path, to_code);
    for (const auto& [ak, terms] : to_ontology) {
        auto path = fs::path(cfg.ontology_dir) /
                    (std::string(concept_file_stem(ak)) + ".txt");
        // normalize the way the loader would, so the files stay canonical
        std::vector<std::string> lemmas;
        for (const auto& t : terms) lemmas.push_back(lemmatize(t, exceptions));
        changes += append_unique(path, lemmas);
    }

    ordered_json config;
    config["kept_rows"] = kept;
    config["changes"] = changes;
    write_manifest(out.path(), "apply-review",
                   paths_json({{"report", &cfg.review_report_path},
                               {"ontology_dir", &cfg.ontology_dir},
                               {"generic_terms", &cfg.generic_terms_path},
                               {"code_terms", &cfg.code_terms_path}}),
                   config);
    std::cout << "apply-review: " << changes << " terms appended, " << kept
              << " kept\n";
}

void cmd_cooccur(const RunConfig& cfg) {
    require_path(cfg.corpus_path, "corpus");
    OutputDir out(cfg.out_dir);

    Corpus corpus = load_corpus(cfg.corpus_path, cfg.strict);
    SignificanceThresholds thresholds{cfg.chi2_threshold, cfg.p_threshold};

    std::vector<LabelMap> label_sets;
    label_sets.push_back({"blog_type", blog_type_labels(corpus)});
    label_sets.push_back({"qualitative_topic", qual_topic_labels(corpus)});
    auto lda_labels = lda_topic_labels(cfg, corpus);
    if (!lda_labels.empty()) {
        label_sets.push_back({"lda_topic", std::move(lda_labels)});
    }

    std::vector<CooccurrenceEdge> edges;
    std::vector<std::string> skipped;
    for (std::size_t i = 0; i < label_sets.size(); ++i) {
        for (std::size_t j = i + 1; j < label_sets.size(); ++j) {
            auto [a, b] =
                intersect_labels(label_sets[i].labels, label_sets[j].labels);
            if (a.empty()) continue;
            auto pair_edges = significant_cooccurrences(
                {label_sets[i].set_name, a}, {label_sets[j].set_name, b},
                thresholds, &skipped);
            edges.insert(edges.end(), pair_edges.begin(), pair_edges.end());
        }
    }

    auto csv = open_out(out.path() / "edges.csv");
    csv << "label_set_a,value_a,label_set_b,value_b,chi2,p\n";
    for (const auto& e : edges) {
        csv << e.set_a << ',' << e.value_a << ',' << e.set_b << ','
            << e.value_b << ',' << csv_number(e.chi2) << ',' << csv_number(e.p)
            << '\n';
    }
    open_out(out.path() / "cooccurrence.dot") << render_cooccurrence_dot(edges);
    if (!skipped.empty()) {
        auto log = open_out(out.path() / "cooccur_skipped.txt");
        for (const auto& s : skipped) log << s << '\n';
    }

    ordered_json config;
    config["chi2_threshold"] = cfg.chi2_threshold;
    config["p_threshold"] = cfg.p_threshold;
    config["label_sets"] = ordered_json::array();
    for (const auto& set : label_sets) config["label_sets"].push_back(set.set_name);
    write_manifest(out.path(), "cooccur",
                   paths_json({{"corpus", &cfg.corpus_path},
                               {"model_dir", &cfg.model_dir}}),
                   config);
    std::cout << "cooccur: " << edges.size() << " significant edges, "
              << skipped.size() << " pairs skipped\n";
}

void cmd_relevance(const RunConfig& cfg) {
    require_path(cfg.corpus_path, "corpus");
    OutputDir out(cfg.out_dir);

    Corpus corpus = load_corpus(cfg.corpus_path, cfg.strict);
    std::map<std::string, std::string> labels;
    if (cfg.topics_source == "qual") {
        labels = qual_topic_labels(corpus);
    } else if (cfg.topics_source == "lda") {
        labels = lda_topic_labels(cfg, corpus);
    } else {
        throw UsageError("unknown --topics '" + cfg.topics_source +
                         "' (use qual or lda)");
    }
    if (labels.empty()) throw InputError("no topic labels available");

    auto table_csv = open_out(out.path() / "relevance.csv");
    table_csv << "step,topic,relevant_articles,mean_rating,median_rating\n";
    auto kruskal_csv = open_out(out.path() / "kruskal.csv");
    kruskal_csv << "step,h,df,p,groups\n";
    auto pairwise_csv = open_out(out.path() / "pairwise.csv");
    pairwise_csv << "step,topic_a,topic_b,h,p,significant\n";

    for (AddStep step : all_add_steps()) {
        auto rows = relevance_table(corpus, labels, step);
        for (const auto& row : rows) {
            table_csv << to_string(step) << ',' << row.topic << ','
                      << row.relevant_articles << ','
                      << csv_number(row.mean_rating) << ','
                      << csv_number(row.median_rating) << '\n';
        }

        // rating groups per topic for the significance tests
        std::vector<std::string> group_names;
        std::vector<std::vector<double>> groups;
        for (const auto& row : rows) {
            if (row.relevant_articles == 0) continue;
            std::vector<double> ratings;
            for (const auto& article : corpus.articles) {
                auto it = labels.find(article.id);
                if (it == labels.end() || it->second != row.topic) continue;
                for (const auto& r : article.ratings) {
                    if (r.add_step == step && r.rating >= 2) {
                        ratings.push_back(static_cast<double>(r.rating));
                    }
                }
            }
            if (!ratings.empty()) {
                group_names.push_back(row.topic);
                groups.push_back(std::move(ratings));
            }
        }
        if (groups.size() >= 2) {
            try {
                auto kw = kruskal_wallis(groups);
                kruskal_csv << to_string(step) << ',' << csv_number(kw.h) << ','
                            << kw.df << ',' << csv_number(kw.p) << ','
                            << groups.size() << '\n';
            } catch (const InputError&) {
                kruskal_csv << to_string(step) << ",,,," << groups.size() << '\n';
            }
            for (const auto& pair :
                 pairwise_group_tests(groups, cfg.p_threshold, cfg.holm)) {
                pairwise_csv << to_string(step) << ','
                             << group_names[pair.first] << ','
                             << group_names[pair.second] << ','
                             << csv_number(pair.h) << ',' << csv_number(pair.p)
                             << ',' << (pair.significant ? 1 : 0) << '\n';
            }
        } else {
            kruskal_csv << to_string(step) << ",,,," << groups.size() << '\n';
        }
    }

    ordered_json config;
    config["topics"] = cfg.topics_source;
    config["p_threshold"] = cfg.p_threshold;
    config["holm"] = cfg.holm;
    write_manifest(out.path(), "relevance",
                   paths_json({{"corpus", &cfg.corpus_path},
                               {"model_dir", &cfg.model_dir}}),
                   config);
    std::cout << "relevance: tables for " << 3 << " steps written\n";
}

void cmd_kappa(const RunConfig& cfg) {
    require_path(cfg.labels_a_path, "labels-a");
    require_path(cfg.labels_b_path, "labels-b");
    OutputDir out(cfg.out_dir);

    auto a = read_label_file(cfg.labels_a_path);
    auto b = read_label_file(cfg.labels_b_path);
    auto result = cohen_kappa(a, b);

    ordered_json j;
    j["kappa"] = result.kappa;
    j["observed_agreement"] = result.observed_agreement;
    j["expected_agreement"] = result.expected_agreement;
    j["items"] = a.size();
    open_out(out.path() / "kappa.json") << j.dump(2) << '\n';

    ordered_json config;
    write_manifest(out.path(), "kappa",
                   paths_json({{"labels_a", &cfg.labels_a_path},
                               {"labels_b", &cfg.labels_b_path}}),
                   config);
    std::cout << "kappa=" << result.kappa
              << " observed=" << result.observed_agreement
              << " expected=" << result.expected_agreement << "\n";
}

}  // namespace akmine::cli
