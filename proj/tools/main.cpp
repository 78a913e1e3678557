#include "commands.hpp"

#include "akmine/error.hpp"
#include "akmine/version.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace {

using akmine::cli::RunConfig;

// Binds config-file keys to the same fields the command-line flags write,
// so a flag of the same name always overrides the file.
class ConfigBinder {
public:
    void add(const std::string& key, std::string* field) {
        setters_[key] = [field](const std::string& v) { *field = v; };
    }
    void add(const std::string& key, double* field) {
        setters_[key] = [key, field](const std::string& v) {
            try {
                *field = std::stod(v);
            } catch (const std::exception&) {
                throw akmine::UsageError("config key '" + key +
                                         "' needs a number, got '" + v + "'");
            }
        };
    }
    void add(const std::string& key, int* field) {
        setters_[key] = [key, field](const std::string& v) {
            try {
                *field = std::stoi(v);
            } catch (const std::exception&) {
                throw akmine::UsageError("config key '" + key +
                                         "' needs an integer, got '" + v + "'");
            }
        };
    }
    void add(const std::string& key, std::uint64_t* field) {
        setters_[key] = [key, field](const std::string& v) {
            try {
                *field = std::stoull(v);
            } catch (const std::exception&) {
                throw akmine::UsageError("config key '" + key +
                                         "' needs an integer, got '" + v + "'");
            }
        };
    }
    void add(const std::string& key, bool* field) {
        setters_[key] = [key, field](const std::string& v) {
            if (v == "true" || v == "1" || v == "yes" || v == "on") {
                *field = true;
            } else if (v == "false" || v == "0" || v == "no" || v == "off") {
                *field = false;
            } else {
                throw akmine::UsageError("config key '" + key +
                                         "' needs a boolean, got '" + v + "'");
            }
        };
    }

    void apply_file(const std::string& path) const {
        std::ifstream in(path);
        if (!in) throw akmine::UsageError("cannot open config file: " + path);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            auto start = line.find_first_not_of(" \t");
            if (start == std::string::npos) continue;
            if (line[start] == '#') continue;
            auto eq = line.find('=', start);
            if (eq == std::string::npos) {
                throw akmine::UsageError("config line " + std::to_string(line_no) +
                                         " is not key=value: " + line);
            }
            auto trim = [](std::string s) {
                auto b = s.find_first_not_of(" \t");
                auto e = s.find_last_not_of(" \t");
                return b == std::string::npos ? std::string()
                                              : s.substr(b, e - b + 1);
            };
            std::string key = trim(line.substr(start, eq - start));
            std::string value = trim(line.substr(eq + 1));
            auto it = setters_.find(key);
            if (it == setters_.end()) {
                // config files are shared across subcommands; foreign keys
                // are reported, not fatal
                std::cerr << "note: ignoring unknown config key '" << key << "'\n";
                continue;
            }
            it->second(value);
        }
    }

private:
    std::map<std::string, std::function<void(const std::string&)>> setters_;
};

std::string find_config_argument(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    ConfigBinder binder;
    binder.add("seed", &cfg.seed);
    binder.add("out", &cfg.out_dir);
    binder.add("strict", &cfg.strict);
    binder.add("corpus", &cfg.corpus_path);
    binder.add("ontology-dir", &cfg.ontology_dir);
    binder.add("stopwords", &cfg.stopwords_path);
    binder.add("generic-terms", &cfg.generic_terms_path);
    binder.add("code-terms", &cfg.code_terms_path);
    binder.add("lemma-exceptions", &cfg.lemma_exceptions_path);
    binder.add("tagged-docs", &cfg.tagged_docs_path);
    binder.add("tag-map", &cfg.tag_map_path);
    binder.add("model-dir", &cfg.model_dir);
    binder.add("report", &cfg.review_report_path);
    binder.add("labels-a", &cfg.labels_a_path);
    binder.add("labels-b", &cfg.labels_b_path);
    binder.add("language-heuristic", &cfg.language_heuristic);
    binder.add("df-low", &cfg.df_low);
    binder.add("df-high", &cfg.df_high);
    binder.add("filter-stage", &cfg.filter_stage);
    binder.add("k", &cfg.k);
    binder.add("alpha", &cfg.alpha);
    binder.add("beta", &cfg.beta);
    binder.add("iterations", &cfg.iterations);
    binder.add("burn-in", &cfg.burn_in);
    binder.add("k-min", &cfg.k_min);
    binder.add("k-max", &cfg.k_max);
    binder.add("alpha-numerators", &cfg.alpha_numerators);
    binder.add("n-terms", &cfg.n_terms);
    binder.add("review-terms", &cfg.review_terms);
    binder.add("coherence-terms", &cfg.coherence_terms);
    binder.add("chi2-threshold", &cfg.chi2_threshold);
    binder.add("p-threshold", &cfg.p_threshold);
    binder.add("holm", &cfg.holm);
    binder.add("topics", &cfg.topics_source);

    try {
        std::string config_path = find_config_argument(argc, argv);
        if (!config_path.empty()) binder.apply_file(config_path);
    } catch (const akmine::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"architectural-knowledge topic mining over blog corpora"};
    app.set_version_flag("--version", akmine::kVersion);
    app.require_subcommand(1);
    std::string config_path_dummy;
    app.add_option("--config", config_path_dummy,
                   "flat key=value config file; flags override it");
    app.add_option("--seed", cfg.seed, "random seed recorded in manifests");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_flag("--strict", cfg.strict, "abort on malformed input records");

    auto add_corpus = [&](CLI::App* sub) {
        sub->add_option("--corpus", cfg.corpus_path, "line-delimited corpus file");
    };
    auto add_lists = [&](CLI::App* sub) {
        sub->add_option("--stopwords", cfg.stopwords_path, "stopword list file");
        sub->add_option("--generic-terms", cfg.generic_terms_path,
                        "generic term list file");
        sub->add_option("--code-terms", cfg.code_terms_path,
                        "source-code term list file");
        sub->add_option("--lemma-exceptions", cfg.lemma_exceptions_path,
                        "lemma exception dictionary");
    };
    auto add_docs = [&](CLI::App* sub) {
        sub->add_option("--tagged-docs", cfg.tagged_docs_path,
                        "tagged documents dump");
        sub->add_option("--tag-map", cfg.tag_map_path, "tag map dump");
    };
    auto add_lda = [&](CLI::App* sub) {
        sub->add_option("--k", cfg.k, "topic count");
        sub->add_option("--alpha", cfg.alpha,
                        "document-topic prior (0 derives 50/k)");
        sub->add_option("--beta", cfg.beta, "topic-term prior");
        sub->add_option("--iterations", cfg.iterations, "Gibbs sweeps");
        sub->add_option("--burn-in", cfg.burn_in, "sweeps before estimation");
    };

    auto* filter = app.add_subcommand("filter", "apply the corpus exclusion rules");
    add_corpus(filter);
    filter->add_flag("--language-heuristic", cfg.language_heuristic,
                     "classify unlabeled records by English function words");
    filter->callback([&] { akmine::cli::cmd_filter(cfg); });

    auto* preprocess =
        app.add_subcommand("preprocess", "tokenize, clean, lemmatize and tag");
    add_corpus(preprocess);
    preprocess->add_option("--ontology-dir", cfg.ontology_dir,
                           "directory of concept term files");
    add_lists(preprocess);
    preprocess->add_option("--df-low", cfg.df_low,
                           "drop terms below this document frequency");
    preprocess->add_option("--df-high", cfg.df_high,
                           "drop terms above this document frequency");
    preprocess->add_option("--filter-stage", cfg.filter_stage,
                           "after-lemmatize (default) or before-lemmatize");
    preprocess->callback([&] { akmine::cli::cmd_preprocess(cfg); });

    auto* fit = app.add_subcommand("fit", "fit the topic model by Gibbs sampling");
    add_docs(fit);
    add_lda(fit);
    fit->callback([&] { akmine::cli::cmd_fit(cfg); });

    auto* sweep_k = app.add_subcommand("sweep-k", "score topic counts by coherence");
    add_docs(sweep_k);
    add_lda(sweep_k);
    sweep_k->add_option("--k-min", cfg.k_min, "smallest k");
    sweep_k->add_option("--k-max", cfg.k_max, "largest k");
    sweep_k->add_option("--coherence-terms", cfg.coherence_terms,
                        "top terms per topic entering the coherence score");
    sweep_k->callback([&] { akmine::cli::cmd_sweep_k(cfg); });

    auto* sweep_alpha =
        app.add_subcommand("sweep-alpha", "score alpha values by topic density");
    add_docs(sweep_alpha);
    add_lda(sweep_alpha);
    sweep_alpha->add_option("--alpha-numerators", cfg.alpha_numerators,
                            "comma list; each alpha = numerator / k");
    sweep_alpha->callback([&] { akmine::cli::cmd_sweep_alpha(cfg); });

    auto* assign = app.add_subcommand("assign", "emit per-article topic assignments");
    assign->add_option("--model-dir", cfg.model_dir, "fitted model directory");
    assign->callback([&] { akmine::cli::cmd_assign(cfg); });

    auto* report =
        app.add_subcommand("report-topics", "describe topics by terms and concepts");
    report->add_option("--model-dir", cfg.model_dir, "fitted model directory");
    add_docs(report);
    report->add_option("--n-terms", cfg.n_terms, "top terms per topic");
    report->callback([&] { akmine::cli::cmd_report_topics(cfg); });

    auto* review =
        app.add_subcommand("review-terms", "list unlisted top terms for review");
    review->add_option("--model-dir", cfg.model_dir, "fitted model directory");
    add_docs(review);
    review->add_option("--ontology-dir", cfg.ontology_dir,
                       "directory of concept term files");
    add_lists(review);
    review->add_option("--review-terms", cfg.review_terms,
                       "terms listed per topic");
    review->callback([&] { akmine::cli::cmd_review_terms(cfg); });

    auto* apply =
        app.add_subcommand("apply-review", "route reviewed terms to their lists");
    apply->add_option("--report", cfg.review_report_path,
                      "filled-in review report");
    apply->add_option("--ontology-dir", cfg.ontology_dir,
                      "directory of concept term files");
    add_lists(apply);
    apply->callback([&] { akmine::cli::cmd_apply_review(cfg); });

    auto* cooccur =
        app.add_subcommand("cooccur", "significant label co-occurrences");
    add_corpus(cooccur);
    cooccur->add_option("--model-dir", cfg.model_dir,
                        "model directory for LDA topic labels");
    cooccur->add_option("--chi2-threshold", cfg.chi2_threshold,
                        "minimum chi-square statistic");
    cooccur->add_option("--p-threshold", cfg.p_threshold, "maximum p-value");
    cooccur->callback([&] { akmine::cli::cmd_cooccur(cfg); });

    auto* relevance =
        app.add_subcommand("relevance", "per-step relevance tables and tests");
    add_corpus(relevance);
    relevance->add_option("--model-dir", cfg.model_dir,
                          "model directory for LDA topic labels");
    relevance->add_option("--topics", cfg.topics_source,
                          "topic labels to use: qual or lda");
    relevance->add_option("--p-threshold", cfg.p_threshold,
                          "pairwise significance level");
    relevance->add_flag("--holm", cfg.holm, "Holm-adjust pairwise p-values");
    relevance->callback([&] { akmine::cli::cmd_relevance(cfg); });

    auto* kappa = app.add_subcommand("kappa", "inter-rater agreement");
    kappa->add_option("--labels-a", cfg.labels_a_path, "first labels file");
    kappa->add_option("--labels-b", cfg.labels_b_path, "second labels file");
    kappa->callback([&] { akmine::cli::cmd_kappa(cfg); });

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const akmine::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const akmine::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
