#include <cmath>
#include <random>

#include "doctest.h"

#include "crisisgt/corpus.hpp"
#include "crisisgt/error.hpp"
#include "crisisgt/term_index.hpp"
#include "support/temp_dir.hpp"

using namespace crisisgt;
using crisisgt::testing::TempDir;

namespace {

Dataset make_dataset(std::initializer_list<std::pair<const char*, const char*>> rows,
                     std::set<std::string> keywords = {}) {
    Dataset dataset;
    dataset.name = "fixture";
    dataset.disaster_keywords = std::move(keywords);
    for (const auto& [id, text] : rows) {
        Tweet tweet;
        tweet.id = id;
        tweet.raw_text = text;
        dataset.tweets.push_back(tweet);
    }
    return dataset;
}

std::string random_text(std::mt19937_64& rng) {
    static const std::vector<std::string> pieces = {
        "a", "an", "the", "flood", "Floods", "OH", "oh", "rt", "RT", "@user_1", "#Quake",
        "http://t.co/x", "https://ex.am/ple?q=1", "www.site.org", "&amp;", "&#39;", "!!", "?",
        "...", "350,000", "5.8", "don't", "it’s", "México", "\xF0\x9F\x98\xA2",
        "injured", "killing", "buildings", "x", "yz", "ab1", "--", "'", "'s", "runs", "ies",
        "sses", "bodies", "died", "need", "speed", "_", "12", "a1b2c3", "\xE2\x9D\xA4",
        "cafés", "\xFF", "rescued", "##", "@", "#", "e", "ee", "eed", "ing", "ed",
    };
    std::string text;
    const auto count = rng() % 12;
    for (std::size_t i = 0; i < count; ++i) {
        const std::string& piece = pieces[rng() % pieces.size()];
        const auto glue = rng() % 4;
        text += piece;
        text += glue == 0 ? "" : (glue == 1 ? "," : " ");
    }
    return text;
}

std::size_t codepoints(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
}

}  // namespace

TEST_SUITE("ingest") {
    TEST_CASE("three JSONL lines become three tweets") {
        TempDir dir;
        const auto file = dir.write("c.jsonl",
                                    "{\"id\": \"t1\", \"text\": \"flood in town\"}\n"
                                    "{\"id\": \"t2\", \"text\": \"bridge collapsed\", \"relevance_label\": \"high\", \"explanation\": \"bridge down\"}\n"
                                    "{\"id\": \"t3\", \"text\": \"rescue teams\"}\n");
        const auto result = ingest(file, CorpusFormat::Jsonl);
        REQUIRE(result.dataset.tweets.size() == 3);
        CHECK(result.dataset.tweets[0].id == "t1");
        CHECK(result.dataset.tweets[1].relevance_label == RelevanceLabel::High);
        CHECK(result.dataset.tweets[1].explanation == "bridge down");
        CHECK(result.dataset.tweets[2].tokens.empty());  // not normalized yet
        CHECK(result.dataset.name == "c");
        CHECK(result.dataset.summary_budget == 40);
        CHECK(result.malformed == 0);
    }

    TEST_CASE("empty file yields an empty dataset with a warning") {
        TempDir dir;
        const auto result = ingest(dir.write("empty.jsonl", ""), CorpusFormat::Jsonl);
        CHECK(result.dataset.tweets.empty());
        REQUIRE(result.warnings.size() == 1);
        CHECK(result.warnings[0].find("empty") != std::string::npos);
    }

    TEST_CASE("missing text is fatal in strict mode and names the line") {
        TempDir dir;
        const auto file = dir.write("bad.jsonl",
                                    "{\"id\": \"t1\", \"text\": \"ok\"}\n"
                                    "{\"id\": \"t2\"}\n"
                                    "{\"id\": \"t3\", \"text\": \"ok too\"}\n");
        IngestOptions strict;
        strict.strict = true;
        try {
            ingest(file, CorpusFormat::Jsonl, strict);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MalformedRecord);
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
            CHECK(std::string(e.what()).find("text") != std::string::npos);
        }

        const auto lenient = ingest(file, CorpusFormat::Jsonl);
        CHECK(lenient.dataset.tweets.size() == 2);
        CHECK(lenient.malformed == 1);
    }

    TEST_CASE("malformed JSON, duplicate ids and bad labels are skipped") {
        TempDir dir;
        const auto file = dir.write("mixed.jsonl",
                                    "{\"id\": \"t1\", \"text\": \"a\"}\n"
                                    "not json\n"
                                    "\n"
                                    "{\"id\": \"t1\", \"text\": \"again\"}\n"
                                    "{\"id\": 7, \"text\": \"numeric id\"}\n"
                                    "{\"id\": \"t8\", \"text\": \"x\", \"relevance_label\": \"urgent\"}\n");
        const auto result = ingest(file, CorpusFormat::Jsonl);
        CHECK(result.dataset.tweets.size() == 2);
        CHECK(result.dataset.tweets[1].id == "7");
        CHECK(result.malformed == 3);
    }

    TEST_CASE("CSV with header, quoting and embedded newlines") {
        TempDir dir;
        const auto file = dir.write("c.csv",
                                    "id,text,relevance_label,explanation\r\n"
                                    "t1,\"Flood, \"\"big\"\" one\",medium,water rising\r\n"
                                    "t2,\"two\nlines\",,\n"
                                    "t3,too,many,fields,here\n"
                                    "t4,last,low,\n");
        const auto result = ingest(file, CorpusFormat::Csv);
        REQUIRE(result.dataset.tweets.size() == 3);
        CHECK(result.dataset.tweets[0].raw_text == "Flood, \"big\" one");
        CHECK(result.dataset.tweets[0].relevance_label == RelevanceLabel::Medium);
        CHECK(result.dataset.tweets[1].raw_text == "two\nlines");
        CHECK_FALSE(result.dataset.tweets[1].relevance_label.has_value());
        CHECK(result.dataset.tweets[2].id == "t4");
        REQUIRE(result.malformed == 1);
        CHECK(result.warnings[0].find("line 5") != std::string::npos);
    }

    TEST_CASE("unreadable file") {
        CHECK_THROWS_AS(ingest("/nonexistent/corpus.jsonl", CorpusFormat::Jsonl), Error);
    }
}

TEST_SUITE("normalize") {
    TEST_CASE("markup, stopwords and the length rule") {
        const Normalizer normalizer(NormalizerConfig::defaults(), {"oh"});
        const auto tokens = normalizer.tokenize("RT @user Floods in OH!! http://t.co/x");
        CHECK(tokens == std::vector<std::string>{"flood", "oh"});
        CHECK(normalizer.is_retweet("RT @user Floods in OH!! http://t.co/x"));

        const Normalizer without_keyword(NormalizerConfig::defaults(), {});
        CHECK(without_keyword.tokenize("RT @user Floods in OH!! http://t.co/x") ==
              std::vector<std::string>{"flood"});
    }

    TEST_CASE("retweet policy") {
        const auto dataset = make_dataset({{"r1", "RT @user Floods in OH!! http://t.co/x"},
                                           {"t2", "bridge collapsed near river"}},
                                          {"oh"});
        NormalizeStats stats;
        const auto dropped = normalize(dataset, NormalizerConfig::defaults(), &stats);
        REQUIRE(dropped.tweets.size() == 1);
        CHECK(dropped.tweets[0].id == "t2");
        CHECK(stats.retweets == 1);

        auto config = NormalizerConfig::defaults();
        config.retweets = RetweetPolicy::StripMarker;
        const auto kept = normalize(dataset, config);
        REQUIRE(kept.tweets.size() == 2);
        CHECK(kept.tweets[0].tokens == std::vector<std::string>{"flood", "oh"});
        CHECK(kept.tweets[0].clean_text == "flood oh");
    }

    TEST_CASE("duplicates after cleaning keep the first occurrence") {
        const auto dataset = make_dataset({{"a", "Bridge collapsed!"},
                                           {"b", "bridge COLLAPSED http://x.y #bridge"},
                                           {"c", "@someone bridge   collapsed."}});
        NormalizeStats stats;
        const auto out = normalize(dataset, NormalizerConfig::defaults(), &stats);
        // "b" gains an extra "bridge" token from the hashtag, so it survives.
        REQUIRE(out.tweets.size() == 2);
        CHECK(out.tweets[0].id == "a");
        CHECK(out.tweets[1].id == "b");
        CHECK(stats.duplicates == 1);
    }

    TEST_CASE("all-stopword tweet is dropped") {
        NormalizeStats stats;
        const auto out = normalize(make_dataset({{"s", "a an the"}, {"k", "quake hits"}}),
                                   NormalizerConfig::defaults(), &stats);
        REQUIRE(out.tweets.size() == 1);
        CHECK(out.tweets[0].id == "k");
        CHECK(stats.empty == 1);
    }

    TEST_CASE("numbers, apostrophes, entities and accents") {
        const Normalizer normalizer(NormalizerConfig::defaults(), {});
        CHECK(normalizer.tokenize("350,000 people need help") ==
              std::vector<std::string>{"350000", "people", "need", "help"});
        CHECK(normalizer.tokenize("5.8 magnitude") == std::vector<std::string>{"5.8", "magnitud"});
        CHECK(normalizer.tokenize("medicines &amp; surgical") ==
              std::vector<std::string>{"medicin", "surgical"});
        CHECK(normalizer.tokenize("we're safe, don't worry") ==
              std::vector<std::string>{"safe", "worry"});
        CHECK(normalizer.tokenize("MÉXICO \xF0\x9F\x98\xA2 earthquake") ==
              std::vector<std::string>{"méxico", "earthquak"});
    }

    TEST_CASE("stemmer") {
        const Stemmer stemmer;
        CHECK(stemmer.stem("floods") == "flood");
        CHECK(stemmer.stem("flooding") == "flood");
        CHECK(stemmer.stem("flooded") == "flood");
        CHECK(stemmer.stem("casualties") == "casualty");
        CHECK(stemmer.stem("churches") == "church");
        CHECK(stemmer.stem("running") == "run");
        CHECK(stemmer.stem("buildings") == "build");
        CHECK(stemmer.stem("injured") == stemmer.stem("injure"));
        CHECK(stemmer.stem("need") == "need");
        CHECK(stemmer.stem("crisis") == "crisis");
        CHECK(stemmer.stem("children") == "child");
        CHECK(stemmer.stem("died") == "die");
        CHECK(stemmer.stem("sea") == "sea");
        for (const auto& [word, lemma] : Stemmer::default_exceptions()) {
            CHECK(stemmer.stem(lemma) == lemma);
        }
    }

    TEST_CASE("property: token invariants hold on random text") {
        std::mt19937_64 rng(20240601);
        const std::set<std::string> keywords = {"oh", "eq", "un"};
        const Normalizer normalizer(NormalizerConfig::defaults(), keywords);
        for (int trial = 0; trial < 3000; ++trial) {
            const std::string text = random_text(rng);
            for (const auto& token : normalizer.tokenize(text)) {
                INFO("text: " << text << " token: " << token);
                CHECK(!token.empty());
                CHECK((codepoints(token) >= 3 || keywords.count(token) == 1));
                CHECK_FALSE(normalizer.is_stopword(token));
                CHECK(token.find_first_of("@#:/&!?' _-,") == std::string::npos);
                CHECK(token.find("http") != 0);
                bool has_alnum = false;
                for (unsigned char c : token) has_alnum |= std::isalnum(c) != 0 || c >= 0x80;
                CHECK(has_alnum);
                // Re-tokenizing a token is stable.
                CHECK(normalizer.tokenize(token) == std::vector<std::string>{token});
            }
        }
    }

    TEST_CASE("property: normalize is idempotent and deduplicates") {
        std::mt19937_64 rng(77);
        for (int trial = 0; trial < 200; ++trial) {
            Dataset dataset;
            dataset.disaster_keywords = {"oh"};
            const auto n = 1 + rng() % 25;
            for (std::size_t i = 0; i < n; ++i) {
                dataset.tweets.push_back(Tweet{"t" + std::to_string(i), random_text(rng), "", {}, {}, {}, {}});
            }
            const auto once = normalize(dataset);
            const auto twice = normalize(once);
            REQUIRE(once.tweets.size() == twice.tweets.size());
            std::set<std::string> clean;
            const Normalizer normalizer(NormalizerConfig::defaults(), dataset.disaster_keywords);
            for (std::size_t i = 0; i < once.tweets.size(); ++i) {
                CHECK(once.tweets[i].tokens == twice.tweets[i].tokens);
                CHECK(normalizer.tokenize(once.tweets[i].clean_text) == once.tweets[i].tokens);
                CHECK(clean.insert(once.tweets[i].clean_text).second);
            }
        }
    }

    TEST_CASE("dataset interchange round trip") {
        TempDir dir;
        auto dataset = normalize(make_dataset({{"a", "Bridge collapsed!"}, {"b", "Flood waters rising"}}));
        dataset.tweets[0].relevance_label = RelevanceLabel::Low;
        dataset.tweets[1].topic = TopicLabel::Impact;
        const auto file = dir.path() / "d.jsonl";
        write_dataset(dataset, file);
        const auto back = read_dataset(file);
        REQUIRE(back.tweets.size() == 2);
        CHECK(back.tweets[0].tokens == dataset.tweets[0].tokens);
        CHECK(back.tweets[0].relevance_label == RelevanceLabel::Low);
        CHECK(back.tweets[1].topic == TopicLabel::Impact);
        CHECK(back.tweets[1].clean_text == dataset.tweets[1].clean_text);
    }

    TEST_CASE("term list parsing") {
        const auto terms = parse_term_list("# comment\nFlood\n\n  oh  # inline\nquake");
        CHECK(terms == std::set<std::string>{"flood", "oh", "quake"});
        CHECK(default_stopwords().count("the") == 1);
        CHECK(default_disaster_keywords().count("oh") == 1);
    }
}

TEST_SUITE("tfidf") {
    Dataset tokenized(std::vector<std::vector<std::string>> docs) {
        Dataset dataset;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            Tweet tweet;
            tweet.id = "t" + std::to_string(i);
            tweet.tokens = docs[i];
            dataset.tweets.push_back(tweet);
        }
        return dataset;
    }

    TEST_CASE("idf values") {
        const auto index = tfidf_index(tokenized({{"quake", "bridge"}, {"quake"}, {"quake", "help"}, {"quake"}}));
        CHECK(index.idf("quake").value() == 0.0);
        CHECK(index.idf("bridge").value() == doctest::Approx(std::log(4.0)).epsilon(1e-12));
        CHECK(index.idf("bridge").value() == doctest::Approx(1.3863).epsilon(1e-4));
        CHECK_FALSE(index.idf("absent").has_value());
        CHECK(index.size() == 4);
        CHECK(index.vocabulary_size() == 3);
    }

    TEST_CASE("tf counts and self cosine") {
        const auto index = tfidf_index(tokenized({{"flood", "flood", "river"}, {"rescue", "boat"}, {"flood", "boat"}}));
        const auto flood = index.term_id("flood").value();
        CHECK(index.counts(0).get(flood) == 2.0);
        CHECK(index.tfidf(0, flood) == doctest::Approx(2.0 * std::log(1.5)));
        for (std::size_t i = 0; i < index.size(); ++i) {
            CHECK(std::abs(index.cosine(i, i) - 1.0) <= 1e-9);
        }
        CHECK(index.cosine(0, 1) == 0.0);
        CHECK(index.cosine(0, 2) > 0.0);
        CHECK(index.cosine(0, 2) == doctest::Approx(index.scaled(2.0).cosine(0, 2)).epsilon(1e-12));
    }

    TEST_CASE("empty dataset is rejected") {
        CHECK_THROWS_AS(tfidf_index(Dataset{}), Error);
    }
}
