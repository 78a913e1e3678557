#include "akmine/lda.hpp"

#include "akmine/error.hpp"
#include "support/oracles.hpp"
#include "support/process.hpp"
#include "support/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>

using namespace akmine;
namespace fs = std::filesystem;

namespace {

std::vector<Token> words(const std::vector<std::string>& terms) {
    std::vector<Token> out;
    for (const auto& t : terms) out.push_back(Token::word(t));
    return out;
}

TaggedDocument doc_of(const std::string& id, const std::vector<std::string>& terms) {
    TaggedDocument d;
    d.article_id = id;
    d.tokens = words(terms);
    return d;
}

LdaConfig quick_config(int k, std::uint64_t seed, int iterations = 200) {
    LdaConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    cfg.iterations = iterations;
    cfg.burn_in = iterations / 4;
    return cfg;
}

// relabels topics of a fitted model; used by the permutation property
LdaModel permute_topics(const LdaModel& m, const std::vector<int>& perm) {
    LdaModel out = m;
    for (int t = 0; t < m.config.k; ++t) out.phi[perm[t]] = m.phi[t];
    for (std::size_t d = 0; d < m.theta.size(); ++d) {
        for (int t = 0; t < m.config.k; ++t) {
            out.theta[d][perm[t]] = m.theta[d][t];
        }
        for (std::size_t i = 0; i < m.assignments[d].size(); ++i) {
            out.assignments[d][i] = perm[m.assignments[d][i]];
        }
    }
    return out;
}

}  // namespace

TEST_CASE("config validation") {
    std::vector<TaggedDocument> docs = {doc_of("a", {"x"}), doc_of("b", {"x"})};
    LdaConfig bad_k = quick_config(1, 1);
    CHECK_THROWS_AS(fit(docs, bad_k), InputError);
    LdaConfig bad_iter = quick_config(2, 1);
    bad_iter.burn_in = bad_iter.iterations;
    CHECK_THROWS_AS(fit(docs, bad_iter), InputError);
    LdaConfig bad_alpha = quick_config(2, 1);
    bad_alpha.alpha = -1.0;
    CHECK_THROWS_AS(fit(docs, bad_alpha), InputError);
    CHECK_THROWS_AS(fit({doc_of("a", {}), doc_of("b", {})}, quick_config(2, 1)),
                    InputError);
    CHECK(LdaConfig{.k = 10}.resolved_alpha() == doctest::Approx(5.0));
}

TEST_CASE("one shared token: phi rows coincide up to labels") {
    std::vector<TaggedDocument> docs;
    for (int i = 0; i < 6; ++i) {
        docs.push_back(doc_of("d" + std::to_string(i), {"shared"}));
    }
    auto m = fit(docs, quick_config(2, 3));
    REQUIRE(m.vocab.size() == 1);
    CHECK(m.phi[0][0] == doctest::Approx(1.0));
    CHECK(m.phi[1][0] == doctest::Approx(1.0));
}

TEST_CASE("rows of phi and theta are normalized") {
    auto corpus = testing::make_planted_corpus(3, 60, 30, 12, 7);
    auto m = fit(corpus.docs, quick_config(4, 7));
    for (const auto& row : m.phi) {
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) ==
              doctest::Approx(1.0).epsilon(1e-9));
        for (double v : row) CHECK(v >= 0.0);
    }
    for (const auto& row : m.theta) {
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
    for (const auto& doc : m.assignments) {
        for (int z : doc) {
            CHECK(z >= 0);
            CHECK(z < 4);
        }
    }
}

TEST_CASE("count conservation holds every sweep") {
    auto corpus = testing::make_planted_corpus(3, 50, 30, 10, 11);
    auto cfg = quick_config(3, 11, 120);
    cfg.validate_every_sweep = true;
    CHECK_NOTHROW(fit(corpus.docs, cfg));
}

TEST_CASE("planted topics are recovered with high purity") {
    auto corpus = testing::make_planted_corpus(3, 200, 50, 14, 101);
    auto m = fit(corpus.docs, quick_config(3, 17, 400));
    double p = testing::purity(assign_all(m), corpus.true_topic);
    CHECK(p >= 0.9);
}

TEST_CASE("identical seeds give identical models") {
    auto corpus = testing::make_planted_corpus(3, 80, 30, 10, 5);
    auto cfg = quick_config(3, 99, 150);
    auto m1 = fit(corpus.docs, cfg);
    auto m2 = fit(corpus.docs, cfg);
    CHECK(m1.assignments == m2.assignments);
    CHECK(m1.phi == m2.phi);
    CHECK(m1.theta == m2.theta);

    auto other = cfg;
    other.seed = 100;
    auto m3 = fit(corpus.docs, other);
    CHECK(m3.assignments != m1.assignments);
}

TEST_CASE("assign_topic takes the argmax with low-index ties") {
    LdaModel m;
    m.config.k = 3;
    m.theta = {{0.1, 0.7, 0.2}, {0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}};
    CHECK(assign_topic(m, 0) == 1);
    CHECK(assign_topic(m, 1) == 0);
    CHECK(assign_topic(m, 2) == 2);
    CHECK_THROWS_AS(assign_topic(m, 3), InputError);

    auto all = assign_all(m);
    CHECK(all == std::vector<int>{1, 0, 2});
}

TEST_CASE("label permutation leaves the partition and coherence alone") {
    auto corpus = testing::make_planted_corpus(3, 60, 30, 10, 13);
    auto m = fit(corpus.docs, quick_config(3, 13, 150));
    auto permuted = permute_topics(m, {2, 0, 1});

    auto base_assign = assign_all(m);
    auto perm_assign = assign_all(permuted);
    // same partition, up to renaming, over documents with a unique argmax
    // (an exact theta tie can land on a different topic after relabeling,
    // since ties break toward the lowest index)
    auto has_unique_max = [&](const std::vector<double>& row) {
        double best = *std::max_element(row.begin(), row.end());
        return std::count(row.begin(), row.end(), best) == 1;
    };
    std::map<int, int> mapping;
    for (std::size_t d = 0; d < base_assign.size(); ++d) {
        if (!has_unique_max(m.theta[d])) continue;
        auto [it, inserted] = mapping.insert({base_assign[d], perm_assign[d]});
        CHECK(it->second == perm_assign[d]);
    }

    std::multiset<double> base_scores, perm_scores;
    for (int t = 0; t < 3; ++t) {
        base_scores.insert(coherence(m, corpus.docs, t, 5));
        perm_scores.insert(coherence(permuted, corpus.docs, t, 5));
    }
    auto close = [](const std::multiset<double>& a, const std::multiset<double>& b) {
        if (a.size() != b.size()) return false;
        auto ia = a.begin();
        for (auto vb : b) {
            if (std::fabs(*ia++ - vb) > 1e-9) return false;
        }
        return true;
    };
    CHECK(close(base_scores, perm_scores));
}

TEST_CASE("coherence matches the hand-computed toy values") {
    // docs: {a a a b b c}, {a b}, {a}, {c}
    // doc freq: a=3, b=2, c=2; co-doc: (a,b)=2, (a,c)=1, (b,c)=1
    std::vector<TaggedDocument> docs = {
        doc_of("d0", {"a", "a", "a", "b", "b", "c"}),
        doc_of("d1", {"a", "b"}),
        doc_of("d2", {"a"}),
        doc_of("d3", {"c"}),
    };
    LdaModel m;
    m.config.k = 2;
    m.vocab = {"a", "b", "c"};
    m.doc_ids = {"d0", "d1", "d2", "d3"};
    m.doc_tokens = {{0, 0, 0, 1, 1, 2}, {0, 1}, {0}, {2}};
    m.assignments = {{0, 0, 0, 0, 0, 0}, {0, 0}, {0}, {0}};

    // ranked by within-topic frequency: a(5), b(3), c(2)
    CHECK(top_symbols(m, 0, 3) == std::vector<std::string>{"a", "b", "c"});
    // pairs: (a,b): log(3/3); (a,c): log(2/3); (b,c): log(2/2)
    CHECK(coherence(m, docs, 0, 3) ==
          doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-12));
    CHECK_THROWS_AS(coherence(m, docs, 0, 1), InputError);
}

TEST_CASE("coherence limit cases") {
    // two symbols present in exactly the same four documents
    std::vector<TaggedDocument> docs;
    for (int i = 0; i < 4; ++i) {
        docs.push_back(doc_of("d" + std::to_string(i), {"x", "y"}));
    }
    LdaModel m;
    m.config.k = 2;
    m.vocab = {"x", "y"};
    m.doc_ids = {"d0", "d1", "d2", "d3"};
    m.doc_tokens = {{0, 1}, {0, 1}, {0, 1}, {0, 1}};
    m.assignments = {{0, 0}, {0, 0}, {0, 0}, {0, 1}};
    CHECK(coherence(m, docs, 0, 2) == doctest::Approx(std::log(5.0 / 4.0)));

    // never co-occurring: x in 3 docs, y in the fourth
    std::vector<TaggedDocument> apart = {
        doc_of("d0", {"x"}), doc_of("d1", {"x"}),
        doc_of("d2", {"x"}), doc_of("d3", {"y"})};
    m.doc_tokens = {{0}, {0}, {0}, {1}};
    m.assignments = {{0}, {0}, {0}, {0}};
    CHECK(coherence(m, apart, 0, 2) == doctest::Approx(std::log(1.0 / 3.0)));
}

TEST_CASE("topic report aggregates terms, concepts and shares") {
    std::vector<TaggedDocument> docs;
    docs.push_back(doc_of("d0", {"alpha", "alpha", "beta"}));
    docs.push_back(doc_of("d1", {"alpha"}));
    {
        TaggedDocument d;
        d.article_id = "d2";
        d.tokens = {Token::tag(AkConcept::Technology, 1),
                    Token::tag(AkConcept::Technology, 2),
                    Token::tag(AkConcept::Technology, 3),
                    Token::word("beta")};
        d.tag_map[{AkConcept::Technology, 1}] = "kafka";
        d.tag_map[{AkConcept::Technology, 2}] = "sqs";
        d.tag_map[{AkConcept::Technology, 3}] = "json";
        docs.push_back(d);
    }
    {
        TaggedDocument d;
        d.article_id = "d3";
        d.tokens = {Token::tag(AkConcept::Pattern, 1), Token::word("beta")};
        d.tag_map[{AkConcept::Pattern, 1}] = "layer";
        docs.push_back(d);
    }
    docs.push_back(doc_of("d4", {"gamma", "gamma", "gamma"}));

    LdaModel m;
    m.config.k = 2;
    m.doc_ids = {"d0", "d1", "d2", "d3", "d4"};
    m.vocab = {"alpha", "beta", "<Technology_1>", "<Technology_2>",
               "<Technology_3>", "<Pattern_1>", "gamma"};
    m.doc_tokens = {{0, 0, 1}, {0}, {2, 3, 4, 1}, {5, 1}, {6, 6, 6}};
    // docs d0,d1 -> topic 0; d2,d3,d4 -> topic 1
    m.assignments = {{0, 0, 0}, {0}, {1, 1, 1, 1}, {1, 1}, {1, 1, 1}};
    m.theta = {{0.9, 0.1}, {0.8, 0.2}, {0.1, 0.9}, {0.2, 0.8}, {0.3, 0.7}};

    auto reports = topic_report(m, docs, 3);
    REQUIRE(reports.size() == 2);

    CHECK(reports[0].share == doctest::Approx(0.4));
    CHECK(reports[1].share == doctest::Approx(0.6));
    CHECK(reports[0].share + reports[1].share == doctest::Approx(1.0));

    // topic 0: plain words only, no concepts
    REQUIRE(reports[0].top_terms.size() == 2);
    CHECK(reports[0].top_terms[0] == std::pair<std::string, long long>{"alpha", 3});
    CHECK(reports[0].top_terms[1] == std::pair<std::string, long long>{"beta", 1});
    CHECK(reports[0].top_concepts.empty());

    // topic 1: gamma(3) then beta(2); Technology 3 tags, Pattern 1
    REQUIRE(reports[1].top_terms.size() == 2);
    CHECK(reports[1].top_terms[0] == std::pair<std::string, long long>{"gamma", 3});
    REQUIRE(reports[1].top_concepts.size() == 2);
    CHECK(reports[1].top_concepts[0] ==
          std::pair<AkConcept, long long>{AkConcept::Technology, 3});
    CHECK(reports[1].top_concepts[1] ==
          std::pair<AkConcept, long long>{AkConcept::Pattern, 1});

    // d2 is assigned to topic 1 and carries three distinct Technology terms
    auto tech_range = reports[1].terms_per_article.at(AkConcept::Technology);
    CHECK(tech_range.first == 3);
    CHECK(tech_range.second == 3);
    CHECK(reports[1].terms_per_article.at(AkConcept::Pattern) ==
          std::pair<int, int>{1, 1});
    CHECK(reports[0].terms_per_article.count(AkConcept::Technology) == 0);
}

TEST_CASE("topic density from the assignment histogram") {
    CHECK(topic_density({0, 0, 0, 0}, 4) == doctest::Approx(0.0));
    CHECK(topic_density({0, 1, 2, 3}, 4) == doctest::Approx(1.0));
    CHECK(topic_density({0, 0, 1, 2}, 3) ==
          doctest::Approx(testing::normalized_entropy({2, 1, 1})).epsilon(1e-12));
    // frozen value: entropy(1/2,1/4,1/4)/log 3
    CHECK(topic_density({0, 0, 1, 2}, 3) == doctest::Approx(0.946394630357186));
    CHECK_THROWS_AS(topic_density({}, 3), InputError);
    CHECK_THROWS_AS(topic_density({5}, 3), InputError);
}

TEST_CASE("sweep over k derives alpha and seeds per entry") {
    auto corpus = testing::make_planted_corpus(3, 60, 30, 10, 17);
    LdaConfig tmpl = quick_config(3, 1000, 100);
    auto table = sweep_k(corpus.docs, {2, 3, 4}, tmpl, 5);
    REQUIRE(table.size() == 3);
    CHECK(table[0].x == 2.0);
    CHECK(table[1].x == 3.0);
    CHECK(table[2].x == 4.0);
    CHECK(table[0].seed == 1002);
    CHECK(table[1].seed == 1003);

    // deterministic: the same sweep twice gives the same numbers
    auto again = sweep_k(corpus.docs, {2, 3, 4}, tmpl, 5);
    for (std::size_t i = 0; i < table.size(); ++i) {
        CHECK(table[i].score == again[i].score);
    }

    auto single = sweep_k(corpus.docs, {4}, tmpl, 5);
    CHECK(single.size() == 1);
}

TEST_CASE("merging separated topics hurts mean coherence") {
    auto corpus = testing::make_planted_corpus(3, 120, 48, 12, 23);
    LdaConfig tmpl = quick_config(3, 500, 250);
    int wins = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
        tmpl.seed = seed * 1000;
        auto table = sweep_k(corpus.docs, {2, 3}, tmpl, 8);
        if (table[1].score > table[0].score) ++wins;
    }
    CHECK(wins >= 2);
}

TEST_CASE("alpha sweep reports density per alpha") {
    auto corpus = testing::make_planted_corpus(3, 60, 30, 10, 29);
    LdaConfig tmpl = quick_config(3, 2000, 100);
    auto table = sweep_alpha(corpus.docs, {50.0 / 3.0, 1.0 / 3.0}, tmpl);
    REQUIRE(table.size() == 2);
    CHECK(table[0].x == doctest::Approx(50.0 / 3.0));
    CHECK(table[1].x == doctest::Approx(1.0 / 3.0));
    CHECK(table[0].seed == 2000);
    CHECK(table[1].seed == 2001);
    for (const auto& entry : table) {
        CHECK(entry.score >= 0.0);
        CHECK(entry.score <= 1.0);
    }
    CHECK_THROWS_AS(sweep_alpha(corpus.docs, {}, tmpl), InputError);
    CHECK_THROWS_AS(sweep_alpha(corpus.docs, {-0.5}, tmpl), InputError);
}

TEST_CASE("smoothing alpha keeps topics at least as balanced") {
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto corpus = testing::make_planted_corpus(3, 120, 30, 20, seed * 7);
        LdaConfig tmpl = quick_config(3, seed * 7919, 300);
        auto table = sweep_alpha(corpus.docs, {50.0 / 3.0, 1.0 / 3.0}, tmpl);
        if (table[0].score >= table[1].score) ++wins;
    }
    CHECK(wins >= 7);
}

TEST_CASE("model persistence round-trips") {
    auto corpus = testing::make_planted_corpus(3, 40, 30, 8, 37);
    corpus.docs[0].tokens.push_back(Token::tag(AkConcept::Technology, 1));
    corpus.docs[0].tag_map[{AkConcept::Technology, 1}] = "kafka";
    auto m = fit(corpus.docs, quick_config(3, 37, 100));

    auto dir = testing::make_temp_dir("lda_model");
    save_model(m, dir);
    auto loaded = load_model(dir);

    CHECK(loaded.vocab == m.vocab);
    CHECK(loaded.doc_ids == m.doc_ids);
    CHECK(loaded.assignments == m.assignments);
    CHECK(loaded.doc_tokens == m.doc_tokens);
    CHECK(loaded.config.k == m.config.k);
    CHECK(loaded.config.seed == m.config.seed);
    CHECK(loaded.config.iterations == m.config.iterations);
    CHECK(loaded.alpha_used == doctest::Approx(m.alpha_used).epsilon(1e-12));
    REQUIRE(loaded.phi.size() == m.phi.size());
    for (std::size_t t = 0; t < m.phi.size(); ++t) {
        for (std::size_t v = 0; v < m.phi[t].size(); ++v) {
            CHECK(loaded.phi[t][v] == doctest::Approx(m.phi[t][v]).epsilon(1e-11));
        }
    }

    // byte-exact determinism of the saved artifacts
    auto dir2 = testing::make_temp_dir("lda_model_redo");
    save_model(fit(corpus.docs, quick_config(3, 37, 100)), dir2);
    for (const char* file :
         {"vocab.tsv", "phi.txt", "theta.txt", "assignments.tsv",
          "token_assignments.tsv", "tokens.tsv", "config.json"}) {
        CHECK(testing::read_file(dir / file) == testing::read_file(dir2 / file));
    }
    fs::remove_all(dir);
    fs::remove_all(dir2);
}
