#pragma once

#include <cstdint>
#include <string>

namespace akmine::cli {

// Every option lives here; config-file keys and command-line flags share
// the same names and write to the same fields.
struct RunConfig {
    // global
    std::uint64_t seed{42};
    std::string out_dir{"out"};
    bool strict{false};

    // input paths
    std::string corpus_path;
    std::string ontology_dir;
    std::string stopwords_path;
    std::string generic_terms_path;
    std::string code_terms_path;
    std::string lemma_exceptions_path;
    std::string tagged_docs_path;
    std::string tag_map_path;
    std::string model_dir;
    std::string review_report_path;
    std::string labels_a_path;
    std::string labels_b_path;

    // filtering
    bool language_heuristic{false};

    // preprocessing
    double df_low{0.05};
    double df_high{0.95};
    std::string filter_stage{"after-lemmatize"};

    // topic modeling
    int k{6};
    double alpha{0.0};  // 0 derives the 50/k default
    double beta{0.01};
    int iterations{2000};
    int burn_in{500};
    int k_min{5};
    int k_max{20};
    std::string alpha_numerators{"50,20,10,5,2,1"};
    int n_terms{5};
    int review_terms{10};
    int coherence_terms{10};

    // statistics
    double chi2_threshold{10.0};
    double p_threshold{0.05};
    bool holm{false};
    std::string topics_source{"qual"};  // qual | lda
};

void cmd_filter(const RunConfig& cfg);
void cmd_preprocess(const RunConfig& cfg);
void cmd_fit(const RunConfig& cfg);
void cmd_sweep_k(const RunConfig& cfg);
void cmd_sweep_alpha(const RunConfig& cfg);
void cmd_assign(const RunConfig& cfg);
void cmd_report_topics(const RunConfig& cfg);
void cmd_review_terms(const RunConfig& cfg);
void cmd_apply_review(const RunConfig& cfg);
void cmd_cooccur(const RunConfig& cfg);
void cmd_relevance(const RunConfig& cfg);
void cmd_kappa(const RunConfig& cfg);

}  // namespace akmine::cli
