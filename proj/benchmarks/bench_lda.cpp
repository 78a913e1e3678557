#include "akmine/lda.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

std::vector<akmine::TaggedDocument> synthetic_docs(int n_docs, int vocab,
                                                   int doc_len) {
    std::mt19937_64 rng(5);
    std::vector<akmine::TaggedDocument> docs;
    for (int d = 0; d < n_docs; ++d) {
        akmine::TaggedDocument doc;
        doc.article_id = "d" + std::to_string(d);
        for (int i = 0; i < doc_len; ++i) {
            doc.tokens.push_back(
                akmine::Token::word("w" + std::to_string(rng() % vocab)));
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

void BM_GibbsFit(benchmark::State& state) {
    auto docs = synthetic_docs(200, 400, 40);
    akmine::LdaConfig cfg;
    cfg.k = static_cast<int>(state.range(0));
    cfg.iterations = 50;
    cfg.burn_in = 10;
    cfg.seed = 9;
    for (auto _ : state) {
        auto model = akmine::fit(docs, cfg);
        benchmark::DoNotOptimize(model);
    }
    state.SetItemsProcessed(state.iterations() * 200 * 40 * 50);
}
BENCHMARK(BM_GibbsFit)->Arg(6)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
