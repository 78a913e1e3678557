#include "akmine/ontology.hpp"
#include "akmine/preprocess.hpp"

#include <benchmark/benchmark.h>

namespace {

akmine::Corpus synthetic_corpus(int docs) {
    akmine::Corpus corpus;
    for (int i = 0; i < docs; ++i) {
        akmine::Article a;
        a.id = "d" + std::to_string(i);
        a.url = "https://bench.example.org/" + a.id;
        a.language = "en";
        a.plain_text =
            "The Kafka brokers deliver messages to layered microservices "
            "while the front end renders dashboards for business customers "
            "and engineers keep deciding between publish subscribe patterns "
            "number " + std::to_string(i);
        corpus.articles.push_back(std::move(a));
    }
    return corpus;
}

akmine::Ontology bench_ontology() {
    std::map<akmine::AkConcept, std::vector<std::string>> additions;
    additions[akmine::AkConcept::Technology] = {"kafka", "sqs", "json"};
    additions[akmine::AkConcept::Pattern] = {"layer", "microservice",
                                             "publish subscribe"};
    additions[akmine::AkConcept::Component] = {"front end", "dashboard"};
    return akmine::extend_ontology(akmine::Ontology{}, additions, {});
}

void BM_PreprocessCorpus(benchmark::State& state) {
    auto corpus = synthetic_corpus(static_cast<int>(state.range(0)));
    auto ontology = bench_ontology();
    akmine::WordLists lists;
    lists.stopwords = {"the", "to", "for", "and", "while", "between"};
    for (auto _ : state) {
        auto docs = akmine::preprocess_corpus(corpus, ontology, lists, {});
        benchmark::DoNotOptimize(docs);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PreprocessCorpus)->Arg(100)->Arg(1000);

void BM_StripHtml(benchmark::State& state) {
    std::string html;
    for (int i = 0; i < 200; ++i) {
        html += "<div class='x'><p>Kafka &amp; friends</p><script>var i=" +
                std::to_string(i) + ";</script></div>";
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(akmine::strip_html(html));
    }
    state.SetBytesProcessed(state.iterations() * html.size());
}
BENCHMARK(BM_StripHtml);

}  // namespace
