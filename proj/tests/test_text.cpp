#include "akmine/text.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace akmine;

TEST_CASE("strip_html removes tags and keeps visible text") {
    CHECK(strip_html("<p>Kafka <b>rocks</b></p>") == "Kafka rocks");
    CHECK(strip_html("<script>var x=1;</script>Hello") == "Hello");
    CHECK(strip_html("A&amp;B") == "A&B");
}

TEST_CASE("strip_html handles style, comments and entities") {
    CHECK(strip_html("<style>p{color:red}</style>text") == "text");
    CHECK(strip_html("a<!-- hidden -->b") == "a b");
    CHECK(strip_html("x&lt;y&gt;z") == "x<y>z");
    CHECK(strip_html("a&#65;b") == "aAb");
    CHECK(strip_html("a&nbsp;b") == "a b");
    CHECK(strip_html("5 &unknown; 6") == "5 &unknown; 6");
}

TEST_CASE("strip_html tolerates malformed markup") {
    CHECK(strip_html("<p unclosed") == "");
    CHECK(strip_html("<script>never closed") == "");
    CHECK(strip_html("text <b>bold") == "text bold");
    CHECK(strip_html("") == "");
}

TEST_CASE("strip_html collapses whitespace") {
    CHECK(strip_html("<div>\n  a\n\n  b\t c </div>") == "a b c");
}

TEST_CASE("tokenize splits, lowercases and drops noise") {
    CHECK(tokenize("Publish-Subscribe, done!") ==
          std::vector<std::string>{"publish", "subscribe", "done"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("RabbitMQ vs. Kafka") ==
          std::vector<std::string>{"rabbitmq", "vs", "kafka"});
}

TEST_CASE("tokenize keeps mixed alphanumerics, drops digit-only tokens") {
    CHECK(tokenize("activemq5 2021 v2") ==
          std::vector<std::string>{"activemq5", "v2"});
    CHECK(tokenize("#hash-tag") == std::vector<std::string>{"hash", "tag"});
}

TEST_CASE("lemmatize applies the documented examples") {
    LemmaDict exc;
    CHECK(lemmatize("deciding", exc) == "decide");
    CHECK(lemmatize("decided", exc) == "decide");
    CHECK(lemmatize("kafka", exc) == "kafka");

    exc["scalable"] = "scale";
    exc["scalability"] = "scale";
    CHECK(lemmatize("scalability", exc) == "scale");
    CHECK(lemmatize("scalable", exc) == "scale");
}

TEST_CASE("lemmatize suffix rules") {
    LemmaDict exc;
    CHECK(lemmatize("technologies", exc) == "technology");
    CHECK(lemmatize("processes", exc) == "process");
    CHECK(lemmatize("boxes", exc) == "box");
    CHECK(lemmatize("matches", exc) == "match");
    CHECK(lemmatize("patterns", exc) == "pattern");
    CHECK(lemmatize("services", exc) == "service");
    CHECK(lemmatize("planning", exc) == "plan");
    CHECK(lemmatize("called", exc) == "call");
    CHECK(lemmatize("updating", exc) == "update");
    CHECK(lemmatize("providing", exc) == "provide");
    CHECK(lemmatize("avoiding", exc) == "avoid");
    CHECK(lemmatize("loading", exc) == "load");
    CHECK(lemmatize("optimized", exc) == "optimize");
    CHECK(lemmatize("usability", exc) == "usable");
    // guards: short stems, vowelless stems and -eed/-eing stay put
    CHECK(lemmatize("need", exc) == "need");
    CHECK(lemmatize("speed", exc) == "speed");
    CHECK(lemmatize("string", exc) == "string");
    CHECK(lemmatize("using", exc) == "using");
    CHECK(lemmatize("class", exc) == "class");
    CHECK(lemmatize("previous", exc) == "previous");
    CHECK(lemmatize("analysis", exc) == "analysis");
}

TEST_CASE("lemmatize chains rules with the exception dictionary") {
    LemmaDict exc{{"scalable", "scale"}};
    // -ility rule produces "scalable", the dictionary finishes the job
    CHECK(lemmatize("scalability", exc) == "scale");
    // identity entries protect words from the rules
    LemmaDict protect{{"utility", "utility"}};
    CHECK(lemmatize("utility", protect) == "utility");
}

TEST_CASE("lemmatize is idempotent over a mixed vocabulary") {
    LemmaDict exc{{"scalable", "scale"}, {"scalability", "scale"},
                  {"creat", "create"}};
    const std::vector<std::string> vocab = {
        "deciding", "decided",  "scalability", "scalable",  "kafka",
        "layers",   "services", "creating",    "processes", "technologies",
        "planning", "running",  "updated",     "messages",  "queues",
        "business", "class",    "need",        "throughput", "microservices",
    };
    for (const auto& term : vocab) {
        auto once = lemmatize(term, exc);
        CHECK(lemmatize(once, exc) == once);
    }
}

TEST_CASE("word list and lemma dictionary loaders") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "akmine_text_test";
    fs::create_directories(dir);

    {
        std::ofstream out(dir / "words.txt");
        out << "# comment\nAlpha\n\n  beta  \nalpha\n";
    }
    auto list = load_word_list(dir / "words.txt");
    CHECK(list.size() == 2);
    CHECK(list.count("alpha") == 1);
    CHECK(list.count("beta") == 1);

    {
        std::ofstream out(dir / "lemmas.tsv");
        out << "# comment\nScalable\tscale\n";
    }
    auto dict = load_lemma_exceptions(dir / "lemmas.tsv");
    CHECK(dict.at("scalable") == "scale");

    CHECK_THROWS(load_word_list(dir / "missing.txt"));
    fs::remove_all(dir);
}

TEST_CASE("english function word ratio") {
    CHECK(english_function_word_ratio("the cat is on the mat") > 0.02);
    CHECK(english_function_word_ratio("kafka broker partition replikation") ==
          0.0);
    CHECK(english_function_word_ratio("") == 0.0);
}
