#include "support/synthetic.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <string>

namespace akmine::testing {

PlantedCorpus make_planted_corpus(int n_topics, int n_docs, int vocab_size,
                                  int doc_len, std::uint64_t seed) {
    PlantedCorpus corpus;
    corpus.n_topics = n_topics;
    std::mt19937_64 rng(seed);

    const int block = vocab_size / n_topics;
    std::vector<std::string> terms(vocab_size);
    for (int v = 0; v < vocab_size; ++v) {
        terms[v] = "t" + std::to_string(v / 10) + std::to_string(v % 10);
    }

    for (int d = 0; d < n_docs; ++d) {
        int topic = d % n_topics;
        corpus.true_topic.push_back(topic);
        int lo = topic * block;
        int hi = topic == n_topics - 1 ? vocab_size : lo + block;

        // Zipf-like weights so each doc covers only part of its block
        std::vector<double> weights;
        for (int v = lo; v < hi; ++v) {
            weights.push_back(1.0 / (1.0 + (v - lo)));
        }
        std::discrete_distribution<int> pick(weights.begin(), weights.end());

        akmine::TaggedDocument doc;
        doc.article_id = "doc" + std::to_string(d);
        for (int i = 0; i < doc_len; ++i) {
            doc.tokens.push_back(akmine::Token::word(terms[lo + pick(rng)]));
        }
        corpus.docs.push_back(std::move(doc));
    }
    return corpus;
}

double purity(const std::vector<int>& cluster_of_doc,
              const std::vector<int>& true_topic) {
    std::map<int, std::map<int, int>> counts;
    for (std::size_t d = 0; d < cluster_of_doc.size(); ++d) {
        counts[cluster_of_doc[d]][true_topic[d]] += 1;
    }
    long long matched = 0;
    for (const auto& [cluster, labels] : counts) {
        int best = 0;
        for (const auto& [label, n] : labels) best = std::max(best, n);
        matched += best;
    }
    return cluster_of_doc.empty()
               ? 0.0
               : static_cast<double>(matched) /
                     static_cast<double>(cluster_of_doc.size());
}

}  // namespace akmine::testing
