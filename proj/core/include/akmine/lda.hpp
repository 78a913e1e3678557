#pragma once

#include "akmine/ontology.hpp"
#include "akmine/preprocess.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace akmine {

struct LdaConfig {
    int k{6};
    // Document-topic prior; unset derives the common default 50/k.
    std::optional<double> alpha;
    double beta{0.01};
    int iterations{2000};
    int burn_in{500};
    std::uint64_t seed{42};
    // Check count conservation after every sweep (used by tests).
    bool validate_every_sweep{false};

    double resolved_alpha() const { return alpha ? *alpha : 50.0 / k; }
};

struct LdaModel {
    LdaConfig config;
    double alpha_used{0.0};
    std::vector<std::string> doc_ids;
    // index <-> symbol table; word terms and tag symbols share it.
    std::vector<std::string> vocab;
    // k x V, rows sum to 1.
    std::vector<std::vector<double>> phi;
    // D x k, rows sum to 1.
    std::vector<std::vector<double>> theta;
    // Per document, per token: sampled topic.
    std::vector<std::vector<int>> assignments;
    // Per document, per token: vocabulary index.
    std::vector<std::vector<int>> doc_tokens;

    int vocab_index(const std::string& symbol) const;
};

struct TopicReport {
    int topic{0};
    double share{0.0};
    // Word terms ranked by within-topic corpus frequency.
    std::vector<std::pair<std::string, long long>> top_terms;
    // Tag tokens aggregated per concept, ranked by frequency.
    std::vector<std::pair<AkConcept, long long>> top_concepts;
    // Per concept: min..max distinct tagged terms per assigned article,
    // over assigned articles that use the concept at all.
    std::map<AkConcept, std::pair<int, int>> terms_per_article;
};

struct SweepEntry {
    double x{0.0};       // k or alpha
    double score{0.0};   // mean coherence or density
    std::uint64_t seed{0};
};

// Fits LDA by collapsed Gibbs sampling: each token's topic is resampled
// with probability proportional to (n_dt + alpha) * (n_tw + beta) /
// (n_t + V*beta), with the token's own count excluded. Point estimates
// for phi/theta come from the final post-burn-in state, priors included.
// Deterministic for a fixed seed.
LdaModel fit(const std::vector<TaggedDocument>& docs, const LdaConfig& config);

// Argmax over the document's theta row; ties break toward the lowest
// topic index.
int assign_topic(const LdaModel& model, int doc_index);

std::vector<int> assign_all(const LdaModel& model);

// Top n vocabulary symbols of a topic by within-topic assigned frequency
// (ties break toward the lower vocabulary index). Always returns n
// symbols when the vocabulary allows, so starved topics surface their
// arbitrariness in the coherence score.
std::vector<std::string> top_symbols(const LdaModel& model, int topic, int n);

std::vector<TopicReport> topic_report(const LdaModel& model,
                                      const std::vector<TaggedDocument>& docs,
                                      int n_terms);

// Intrinsic co-document-frequency coherence over the topic's top n
// symbols: sum over ordered pairs i<j of
// log((codoc(w_j, w_i) + 1) / doc_freq(w_i)). Higher is better.
double coherence(const LdaModel& model,
                 const std::vector<TaggedDocument>& docs,
                 int topic,
                 int n_terms);

// Balance of article assignments over k topics: normalized entropy of
// the assignment histogram, 1.0 = perfectly even, 0.0 = single topic.
double topic_density(const std::vector<int>& doc_topics, int k);

// One fit per k (alpha derived as 50/k unless the template sets it, seed
// derived as template seed + k), scored by mean coherence across topics.
// Fits run in parallel.
std::vector<SweepEntry> sweep_k(const std::vector<TaggedDocument>& docs,
                                const std::vector<int>& ks,
                                const LdaConfig& config_template,
                                int n_terms = 10);

// One fit per alpha (seed derived as template seed + alpha index),
// scored by topic density of the document assignments.
std::vector<SweepEntry> sweep_alpha(const std::vector<TaggedDocument>& docs,
                                    const std::vector<double>& alphas,
                                    const LdaConfig& config_template);

// Model directory: vocab.tsv, phi.txt and theta.txt (row-major, 12
// significant digits), token_assignments.tsv, assignments.tsv
// (article_id, topic) and config.json. Assignments and config round-trip
// exactly.
void save_model(const LdaModel& model, const std::filesystem::path& dir);
LdaModel load_model(const std::filesystem::path& dir);

}  // namespace akmine
