#include <doctest.h>

#include <algorithm>
#include <limits>

#include "error.hpp"
#include "lexicon.hpp"
#include "rng.hpp"
#include "test_util.hpp"

using namespace ocean;

namespace {

// The three dictionary rows published as the format example.
const char* kSampleTsv =
    "adjective\to\tc\te\ta\tn\n"
    "Active\t0.053194\t0.237406\t0.365915\t0.116700\t-0.058669\n"
    "Angry\t-0.004604\t-0.038453\t0.020755\t-0.294754\t0.590114\n"
    "Boring\t-0.069877\t-0.099754\t-0.478821\t-0.236462\t0.118821\n";

Lexicon sample_lexicon() {
    test_util::TempDir dir("lexicon");
    test_util::write_file(dir.path("ocean.tsv"), kSampleTsv);
    return Lexicon::load(dir.path("ocean.tsv"));
}

} // namespace

TEST_CASE("load_lexicon parses rows, lowercases keys and skips the header") {
    Lexicon lex = sample_lexicon();
    CHECK(lex.size() == 3);
    const TraitVector* active = lex.find("active");
    REQUIRE(active != nullptr);
    CHECK(active->o == doctest::Approx(0.053194).epsilon(1e-12));
    CHECK(active->c == doctest::Approx(0.237406).epsilon(1e-12));
    CHECK(active->e == doctest::Approx(0.365915).epsilon(1e-12));
    CHECK(active->a == doctest::Approx(0.116700).epsilon(1e-12));
    CHECK(active->n == doctest::Approx(-0.058669).epsilon(1e-12));
    CHECK(lex.find("Active") == nullptr); // keys are stored lowercase
}

TEST_CASE("load_lexicon accepts an empty file") {
    test_util::TempDir dir("lexicon-empty");
    test_util::write_file(dir.path("empty.tsv"), "");
    Lexicon lex = Lexicon::load(dir.path("empty.tsv"));
    CHECK(lex.size() == 0);
}

TEST_CASE("load_lexicon error paths") {
    test_util::TempDir dir("lexicon-err");

    CHECK_THROWS_AS(Lexicon::load(dir.path("nonexistent.tsv")), Error);

    test_util::write_file(dir.path("dup.tsv"),
                          "angry\t0\t0\t0\t0\t0\nAngry\t1\t1\t1\t1\t1\n");
    CHECK_THROWS_WITH_AS(Lexicon::load(dir.path("dup.tsv")),
                         doctest::Contains("duplicate adjective"), Error);

    test_util::write_file(dir.path("bad.tsv"), "fine\t0\t0\t0\t0\t0\nbroken\t0.1\tx\t0\t0\t0\n");
    try {
        Lexicon::load(dir.path("bad.tsv"));
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    test_util::write_file(dir.path("short.tsv"), "fine\t0\t0\t0\n");
    CHECK_THROWS_AS(Lexicon::load(dir.path("short.tsv")), Error);
}

TEST_CASE("match_and_label single match passes the row through") {
    Lexicon lex = sample_lexicon();
    std::vector<std::string> tokens{"the", "food", "was", "boring"};
    auto t = lex.match_and_label(tokens);
    REQUIRE(t.has_value());
    CHECK(t->o == doctest::Approx(-0.069877).epsilon(1e-12));
    CHECK(t->c == doctest::Approx(-0.099754).epsilon(1e-12));
    CHECK(t->e == doctest::Approx(-0.478821).epsilon(1e-12));
    CHECK(t->a == doctest::Approx(-0.236462).epsilon(1e-12));
    CHECK(t->n == doctest::Approx(0.118821).epsilon(1e-12));
}

TEST_CASE("match_and_label averages matched entries componentwise") {
    Lexicon lex = sample_lexicon();
    std::vector<std::string> tokens{"active", "and", "angry"};
    auto t = lex.match_and_label(tokens);
    REQUIRE(t.has_value());
    // Hand mean of the active and angry rows.
    CHECK(t->o == doctest::Approx(0.024295).epsilon(1e-12));
    CHECK(t->c == doctest::Approx(0.0994765).epsilon(1e-12));
    CHECK(t->e == doctest::Approx(0.193335).epsilon(1e-12));
    CHECK(t->a == doctest::Approx(-0.089027).epsilon(1e-12));
    CHECK(t->n == doctest::Approx(0.2657225).epsilon(1e-12));
}

TEST_CASE("match_and_label returns no label without adjectives") {
    Lexicon lex = sample_lexicon();
    std::vector<std::string> tokens{"great", "pizza"};
    CHECK_FALSE(lex.match_and_label(tokens).has_value());
    const std::vector<std::string> empty;
    CHECK_FALSE(lex.match_and_label(empty).has_value());
}

TEST_CASE("match_and_label counts repeated occurrences per occurrence") {
    Lexicon lex;
    lex.insert("hot", {1, 0, 0, 0, 0});
    lex.insert("cold", {0, 0, 0, 0, 0});
    std::vector<std::string> tokens{"hot", "hot", "cold"};
    auto t = lex.match_and_label(tokens);
    REQUIRE(t.has_value());
    CHECK(t->o == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("match_and_label properties: mean bounds, permutation invariance") {
    Lexicon lex = sample_lexicon();
    Rng rng(404);
    const std::vector<std::string> adjectives{"active", "angry", "boring"};
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<std::string> tokens;
        const std::size_t n = 1 + rng.below(6);
        for (std::size_t i = 0; i < n; ++i) {
            if (rng.below(2))
                tokens.push_back(adjectives[rng.below(adjectives.size())]);
            else
                tokens.push_back("filler" + std::to_string(rng.below(4)));
        }
        auto before = lex.match_and_label(tokens);
        std::vector<std::string> matched;
        for (const auto& t : tokens)
            if (lex.contains(t)) matched.push_back(t);
        if (matched.empty()) {
            CHECK_FALSE(before.has_value());
            continue;
        }
        REQUIRE(before.has_value());
        for (std::size_t c = 0; c < TraitVector::kSize; ++c) {
            double lo = 1e9, hi = -1e9;
            for (const auto& m : matched) {
                lo = std::min(lo, (*lex.find(m))[c]);
                hi = std::max(hi, (*lex.find(m))[c]);
            }
            CHECK((*before)[c] >= lo - 1e-12);
            CHECK((*before)[c] <= hi + 1e-12);
        }
        rng.shuffle(tokens);
        auto after = lex.match_and_label(tokens);
        REQUIRE(after.has_value());
        for (std::size_t c = 0; c < TraitVector::kSize; ++c)
            CHECK((*after)[c] == doctest::Approx((*before)[c]).epsilon(1e-12));
    }
}

TEST_CASE("binarize maps negatives to 0 and everything else to 1") {
    TraitVector boring{-0.069877, -0.099754, -0.478821, -0.236462, 0.118821};
    CHECK(binarize(boring) == BinaryLabels{{0, 0, 0, 0, 1}});
    CHECK(binarize({0, 0, 0, 0, 0}) == BinaryLabels{{1, 1, 1, 1, 1}});
    CHECK(binarize({1, -1, 1, -1, 1}) == BinaryLabels{{1, 0, 1, 0, 1}});

    TraitVector bad{0, 0, 0, 0, std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(binarize(bad), Error);
}

TEST_CASE("binarize of an already-binarized vector follows the strict <0 rule") {
    // Bits are 0 or 1, neither below zero, so a second application maps
    // everything to 1; only the set bits are fixed points. This pins the
    // "exact zero maps to 1" boundary.
    Rng rng(7);
    for (int iter = 0; iter < 32; ++iter) {
        TraitVector t;
        for (std::size_t i = 0; i < TraitVector::kSize; ++i)
            t[i] = rng.uniform(-1.0, 1.0);
        BinaryLabels once = binarize(t);
        TraitVector as_reals;
        for (std::size_t i = 0; i < TraitVector::kSize; ++i)
            as_reals[i] = static_cast<double>(once.bits[i]);
        BinaryLabels twice = binarize(as_reals);
        for (std::size_t i = 0; i < TraitVector::kSize; ++i) {
            CHECK(twice.bits[i] == 1);
            if (once.bits[i] == 1) CHECK(twice.bits[i] == once.bits[i]);
        }
    }
}
