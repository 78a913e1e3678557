#include "akmine/corpus.hpp"

#include "akmine/error.hpp"
#include "support/oracles.hpp"
#include "support/process.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace akmine;
namespace fs = std::filesystem;

namespace {

Article make_article(const std::string& id, const std::string& url) {
    Article a;
    a.id = id;
    a.url = url;
    a.plain_text = "some text for " + id;
    a.language = "en";
    return a;
}

RelevanceRating rate(int value, AddStep step = AddStep::IdentifyDesignConcepts) {
    RelevanceRating r;
    r.task_id = "t1";
    r.add_step = step;
    r.rating = value;
    return r;
}

}  // namespace

TEST_CASE("normalize_url matches the hand-built oracle list") {
    for (const auto& [input, expected] : testing::url_oracle_pairs()) {
        bool ok = false;
        CHECK(normalize_url(input, &ok) == expected);
        CHECK(ok);
    }
}

TEST_CASE("normalize_url is idempotent") {
    for (const auto& [input, expected] : testing::url_oracle_pairs()) {
        auto once = normalize_url(input);
        CHECK(normalize_url(once) == once);
    }
}

TEST_CASE("normalize_url flags unparseable input and returns it verbatim") {
    for (const char* bad : {"not a url", "://missing", "http//x.com", ""}) {
        bool ok = true;
        CHECK(normalize_url(bad, &ok) == bad);
        CHECK(!ok);
    }
}

TEST_CASE("empty corpus file loads as empty corpus") {
    auto dir = testing::make_temp_dir("corpus_empty");
    std::ofstream(dir / "corpus.jsonl").close();
    auto corpus = load_corpus(dir / "corpus.jsonl");
    CHECK(corpus.articles.empty());
    fs::remove_all(dir);
}

TEST_CASE("well-formed records load with ids preserved") {
    auto dir = testing::make_temp_dir("corpus_load");
    {
        std::ofstream out(dir / "corpus.jsonl");
        out << R"({"id":"a1","url":"https://x.com/1","plain_text":"kafka","language":"en","blog_type":"community","qualitative_topic":"compare_solutions","is_tutorial":false,"accessible":true,"ratings":[]})" << "\n";
        out << R"({"id":"a2","url":"https://x.com/2","plain_text":"layer","language":"en","blog_type":"personal","qualitative_topic":"unlabeled","is_tutorial":false,"accessible":true,"ratings":[{"task_id":"t1","add_step":"select_design_concepts","rating":4,"rater_id":"r9"}]})" << "\n";
        out << R"({"id":"a3","url":"https://x.com/3","raw_html":"<p>x</p>","language":"en","blog_type":"unlabeled","qualitative_topic":"how_to_design","is_tutorial":true,"accessible":false,"ratings":[]})" << "\n";
    }
    auto corpus = load_corpus(dir / "corpus.jsonl");
    REQUIRE(corpus.articles.size() == 3);
    CHECK(corpus.articles[0].id == "a1");
    CHECK(corpus.articles[1].ratings[0].rater_id == "r9");
    CHECK(corpus.articles[1].ratings[0].add_step == AddStep::SelectDesignConcepts);
    CHECK(corpus.articles[2].is_tutorial);
    CHECK(!corpus.articles[2].accessible);
    fs::remove_all(dir);
}

TEST_CASE("record without any text errors naming the id") {
    auto dir = testing::make_temp_dir("corpus_notext");
    {
        std::ofstream out(dir / "corpus.jsonl");
        out << R"({"id":"ghost","url":"https://x.com/1","language":"en","blog_type":"community","qualitative_topic":"unlabeled","is_tutorial":false,"accessible":true,"ratings":[]})" << "\n";
    }
    CHECK_THROWS_WITH_AS(load_corpus(dir / "corpus.jsonl", /*strict=*/true),
                         doctest::Contains("ghost"), InputError);
    // lenient mode skips and logs
    auto corpus = load_corpus(dir / "corpus.jsonl", /*strict=*/false);
    CHECK(corpus.articles.empty());
    CHECK(!corpus.filter_log.empty());
    CHECK(corpus.filter_log[0].find("line 1") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("save and load round-trip field for field") {
    Corpus corpus;
    auto a = make_article("a1", "https://x.com/1");
    a.ratings = {rate(3), rate(5, AddStep::InstantiateArchitectureElements)};
    a.ratings[0].rater_id = "r1";
    a.blog_type = BlogType::TechnologyVendor;
    a.qualitative_topic = QualTopic::HowToImplement;
    a.lda_topic = 4;
    corpus.articles.push_back(a);
    auto b = make_article("a2", "https://x.com/2");
    b.plain_text.reset();
    b.raw_html = "<p>hi</p>";
    b.language = "";
    corpus.articles.push_back(b);
    corpus.articles.push_back(make_article("a3", "https://x.com/3"));

    auto dir = testing::make_temp_dir("corpus_roundtrip");
    save_corpus(corpus, dir / "c.jsonl");
    auto loaded = load_corpus(dir / "c.jsonl");
    CHECK(loaded == corpus);
    fs::remove_all(dir);
}

TEST_CASE("save to unwritable path fails") {
    Corpus corpus;
    corpus.articles.push_back(make_article("a1", "https://x.com/1"));
    CHECK_THROWS_AS(save_corpus(corpus, "/no/such/dir/corpus.jsonl"),
                    RuntimeFailure);
}

TEST_CASE("filter rule (a): all ratings at level one") {
    Corpus corpus;
    auto gone = make_article("gone", "https://x.com/1");
    gone.ratings = {rate(1), rate(1)};
    auto kept = make_article("kept", "https://x.com/2");
    kept.ratings = {rate(1), rate(3)};
    auto unrated = make_article("unrated", "https://x.com/3");
    corpus.articles = {gone, kept, unrated};

    auto [filtered, report] = filter_corpus(corpus, {});
    REQUIRE(filtered.articles.size() == 2);
    CHECK(filtered.articles[0].id == "kept");
    CHECK(filtered.articles[1].id == "unrated");
    CHECK(report.excluded_count[static_cast<int>(FilterRule::NoRelevance)] == 1);
    CHECK(report.excluded_ids[static_cast<int>(FilterRule::NoRelevance)] ==
          std::vector<std::string>{"gone"});
}

TEST_CASE("filter rules (b)-(d): language, accessibility, tutorials") {
    Corpus corpus;
    auto de = make_article("de", "https://x.com/1");
    de.language = "de";
    auto dead = make_article("dead", "https://x.com/2");
    dead.accessible = false;
    auto tut = make_article("tut", "https://x.com/3");
    tut.is_tutorial = true;
    auto ok = make_article("ok", "https://x.com/4");
    corpus.articles = {de, dead, tut, ok};

    auto [filtered, report] = filter_corpus(corpus, {});
    REQUIRE(filtered.articles.size() == 1);
    CHECK(filtered.articles[0].id == "ok");
    CHECK(report.excluded_count[static_cast<int>(FilterRule::NonEnglish)] == 1);
    CHECK(report.excluded_count[static_cast<int>(FilterRule::Inaccessible)] == 1);
    CHECK(report.excluded_count[static_cast<int>(FilterRule::Tutorial)] == 1);
}

TEST_CASE("unlabeled language: kept by default, heuristic behind a flag") {
    Corpus corpus;
    auto en = make_article("en-ish", "https://x.com/1");
    en.language = "";
    en.plain_text = "this is a long discussion of the broker and the queue";
    auto xx = make_article("xx", "https://x.com/2");
    xx.language = "";
    xx.plain_text = "kafka broker partition replikation nachricht warteschlange";
    corpus.articles = {en, xx};

    auto [kept_all, r1] = filter_corpus(corpus, {});
    CHECK(kept_all.articles.size() == 2);

    FilterConfig heuristic;
    heuristic.use_language_heuristic = true;
    auto [filtered, r2] = filter_corpus(corpus, heuristic);
    REQUIRE(filtered.articles.size() == 1);
    CHECK(filtered.articles[0].id == "en-ish");
}

TEST_CASE("filter rule (e): URL and text duplicates, first kept") {
    Corpus corpus;
    auto first = make_article("first", "HTTP://Example.com/a/");
    auto second = make_article("second", "https://example.com/a");
    second.plain_text = "different text";
    auto third = make_article("third", "https://other.example.com/b");
    third.plain_text = first.plain_text;  // same text, different URL
    corpus.articles = {first, second, third};

    auto [filtered, report] = filter_corpus(corpus, {});
    REQUIRE(filtered.articles.size() == 1);
    CHECK(filtered.articles[0].id == "first");
    CHECK(report.excluded_count[static_cast<int>(FilterRule::Duplicate)] == 2);
}

TEST_CASE("articles hit by several rules are flagged") {
    Corpus corpus;
    auto multi = make_article("multi", "https://x.com/1");
    multi.language = "fr";
    multi.is_tutorial = true;
    corpus.articles = {multi, make_article("ok", "https://x.com/2")};

    auto [filtered, report] = filter_corpus(corpus, {});
    CHECK(report.multi_rule_ids == std::vector<std::string>{"multi"});
    CHECK(report.total_exclusions() == 2);
    CHECK(report.input_count - report.output_count == 1);
}

TEST_CASE("filter is idempotent and shrinking") {
    Corpus corpus;
    for (int i = 0; i < 8; ++i) {
        auto a = make_article("a" + std::to_string(i),
                              "https://x.com/" + std::to_string(i % 6));
        if (i == 2) a.language = "de";
        if (i == 3) a.ratings = {rate(1)};
        corpus.articles.push_back(a);
    }
    auto [once, r1] = filter_corpus(corpus, {});
    CHECK(once.articles.size() <= corpus.articles.size());
    CHECK(r1.total_exclusions() >= r1.input_count - r1.output_count);

    auto [twice, r2] = filter_corpus(once, {});
    CHECK(twice.articles.size() == once.articles.size());
    CHECK(r2.total_exclusions() == 0);
}

TEST_CASE("filter report serializes with per-rule sections") {
    Corpus corpus;
    auto a = make_article("a", "https://x.com/1");
    a.ratings = {rate(1)};
    corpus.articles = {a};
    auto [filtered, report] = filter_corpus(corpus, {});
    auto json = filter_report_to_json(report);
    CHECK(json.find("no_relevance") != std::string::npos);
    CHECK(json.find("duplicate") != std::string::npos);
    CHECK(json.find("\"a\"") != std::string::npos);
}

TEST_CASE("article validation catches invariant violations") {
    Article a = make_article("ok", "https://x.com/1");
    CHECK(validate_article(a).empty());

    Article no_id = a;
    no_id.id = "";
    CHECK(!validate_article(no_id).empty());

    Article spaced = a;
    spaced.id = "has space";
    CHECK(!validate_article(spaced).empty());

    Article bad_rating = a;
    bad_rating.ratings = {rate(6)};
    CHECK(validate_article(bad_rating).find("6") != std::string::npos);

    Article bad_lang = a;
    bad_lang.language = "eng";
    CHECK(!validate_article(bad_lang).empty());
}

TEST_CASE("duplicate ids are rejected on load") {
    auto dir = testing::make_temp_dir("corpus_dupid");
    {
        std::ofstream out(dir / "corpus.jsonl");
        for (int i = 0; i < 2; ++i) {
            out << R"({"id":"same","url":"https://x.com/1","plain_text":"x","language":"en","blog_type":"community","qualitative_topic":"unlabeled","is_tutorial":false,"accessible":true,"ratings":[]})" << "\n";
        }
    }
    CHECK_THROWS_AS(load_corpus(dir / "corpus.jsonl", /*strict=*/true), InputError);
    auto lenient = load_corpus(dir / "corpus.jsonl", /*strict=*/false);
    CHECK(lenient.articles.size() == 1);
    fs::remove_all(dir);
}
