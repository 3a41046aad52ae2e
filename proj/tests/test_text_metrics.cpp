#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "eiqa/errors.hpp"
#include "eiqa/text_metrics.hpp"
#include "text_oracles.hpp"

using namespace eiqa;
using namespace eiqa::text;
using text_oracles::oracle_bleu;
using text_oracles::oracle_cider;
using text_oracles::oracle_rouge;

namespace {

std::vector<Tokens> fixture_corpus() {
    std::vector<Tokens> corpus;
    for (const auto& [ref, _] : text_oracles::fixture_pairs()) corpus.push_back(tokenize(ref));
    return corpus;
}

} // namespace

TEST_CASE("tokenizer") {
    CHECK(tokenize("Pick the RED block!") == Tokens{"pick", "the", "red", "block"});
    CHECK(tokenize("  move, cup;left ") == Tokens{"move", "cup", "left"});
    CHECK(tokenize("") == Tokens{});
    CHECK(tokenize("...") == Tokens{});
}

TEST_CASE("bleu") {
    const Tokens ref = tokenize("pick the red block");
    SUBCASE("identity scores 1") { CHECK(bleu(ref, ref) == doctest::Approx(1.0)); }
    SUBCASE("empty candidate scores 0") { CHECK(bleu({}, ref) == doctest::Approx(0.0)); }
    SUBCASE("empty reference is an error") { CHECK_THROWS_AS(bleu(ref, {}), ValidationError); }
    SUBCASE("disjoint vocabularies score 0") {
        CHECK(bleu(tokenize("open that drawer now"), ref) == doctest::Approx(0.0));
    }
    SUBCASE("short exact match is not zeroed") {
        const Tokens two = tokenize("pick block");
        CHECK(bleu(two, two) == doctest::Approx(1.0));
    }
    SUBCASE("one-word substitution matches the frozen oracle value") {
        const double v = bleu(tokenize("pick the red block"), tokenize("pick the blue block"));
        CHECK(std::abs(v - 0.188030154654320) < 1e-9);
        CHECK(std::abs(v - oracle_bleu(tokenize("pick the red block"),
                                       tokenize("pick the blue block"))) < 1e-12);
    }
}

TEST_CASE("rouge_l") {
    SUBCASE("identity") {
        const Tokens t = tokenize("move the cup to the left");
        CHECK(rouge_l(t, t) == doctest::Approx(1.0));
    }
    SUBCASE("disjoint") {
        CHECK(rouge_l(tokenize("alpha beta"), tokenize("gamma delta")) == doctest::Approx(0.0));
    }
    SUBCASE("hand-computed LCS value") {
        const double v = rouge_l(tokenize("move cup left"), tokenize("move the cup to the left"));
        // LCS = 3, P = 1, R = 1/2, F1 = 2/3.
        CHECK(std::abs(v - 2.0 / 3.0) < 1e-9);
    }
    SUBCASE("empty candidate") {
        CHECK(rouge_l({}, tokenize("move")) == doctest::Approx(0.0));
    }
}

TEST_CASE("cider") {
    const std::vector<Tokens> corpus = {
        tokenize("pick the red block"),
        tokenize("move the cup onto the plate"),
        tokenize("press the red button now"),
    };
    const CiderScorer scorer(corpus);

    SUBCASE("identity with a unique reference scores 10") {
        CHECK(scorer.score(corpus[0], corpus[0]) == doctest::Approx(10.0));
    }
    SUBCASE("no shared n-grams scores 0") {
        CHECK(scorer.score(tokenize("open that drawer slowly"), corpus[0]) ==
              doctest::Approx(0.0));
    }
    SUBCASE("toy corpus case matches the frozen oracle value") {
        const double v = scorer.score(tokenize("pick the blue block"), corpus[0]);
        CHECK(std::abs(v - 2.962636538820773) < 1e-6);
        CHECK(std::abs(v - oracle_cider(tokenize("pick the blue block"), corpus[0], corpus)) <
              1e-12);
    }
    SUBCASE("empty candidate scores 0") {
        CHECK(scorer.score({}, corpus[0]) == doctest::Approx(0.0));
    }
    SUBCASE("single-sentence corpus stays defined") {
        const CiderScorer degenerate({tokenize("pick the red block")});
        const double v = degenerate.score(corpus[0], corpus[0]);
        CHECK(v >= 0.0);
        CHECK(v <= 10.0);
        CHECK(v == doctest::Approx(10.0)); // df floor 1, corpus floor 2
    }
}

TEST_CASE("all three metrics match the in-test oracles on the 20-pair fixture") {
    const std::vector<Tokens> corpus = fixture_corpus();
    const CiderScorer scorer(corpus);
    for (const auto& [ref_s, cand_s] : text_oracles::fixture_pairs()) {
        const Tokens ref = tokenize(ref_s);
        const Tokens cand = tokenize(cand_s);
        CAPTURE(ref_s);
        CAPTURE(cand_s);
        CHECK(std::abs(bleu(cand, ref) - oracle_bleu(cand, ref)) < 1e-6);
        CHECK(std::abs(rouge_l(cand, ref) - oracle_rouge(cand, ref)) < 1e-6);
        CHECK(std::abs(scorer.score(cand, ref) - oracle_cider(cand, ref, corpus)) < 1e-6);
        if (ref_s == cand_s) {
            CHECK(bleu(cand, ref) == doctest::Approx(1.0));
            CHECK(rouge_l(cand, ref) == doctest::Approx(1.0));
            CHECK(scorer.score(cand, ref) == doctest::Approx(10.0));
        }
    }
}

TEST_CASE("metrics are invariant under case folding") {
    const std::string a = "Pick The RED Block From the Table";
    const std::string b = "pick the red block from THE table";
    CHECK(bleu(tokenize(a), tokenize(b)) == doctest::Approx(1.0));
    CHECK(rouge_l(tokenize(a), tokenize(b)) == doctest::Approx(1.0));
}

TEST_CASE("cognition task score") {
    CHECK(cognition_task_score({1.0, 1.0, 10.0}) == doctest::Approx(1.0));
    CHECK(cognition_task_score({0.0, 0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(cognition_task_score({0.5, 0.5, 5.0}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(cognition_task_score({1.5, 0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(cognition_task_score({0.0, 0.0, 11.0}), ValidationError);

    SUBCASE("monotone in each dimension") {
        const CognitionDims base{0.4, 0.5, 3.0};
        const double b = cognition_task_score(base);
        CHECK(cognition_task_score({0.5, 0.5, 3.0}) > b);
        CHECK(cognition_task_score({0.4, 0.6, 3.0}) > b);
        CHECK(cognition_task_score({0.4, 0.5, 4.0}) > b);
    }
}

TEST_CASE("task specs") {
    TaskSpec ok{"pick", "pick the red block", 2};
    ok.validate();
    CHECK_THROWS_AS(TaskSpec({"grab", "grab the block", 2}).validate(), ValidationError);
    CHECK_THROWS_AS(TaskSpec({"pick", "pick it", 6}).validate(), ValidationError);
    CHECK_THROWS_AS(TaskSpec({"pick", "", 1}).validate(), ValidationError);

    SUBCASE("a task set carries each difficulty rank once") {
        std::vector<TaskSpec> tasks;
        const char* verbs[5] = {"cover", "move", "pour", "press", "twist"};
        for (int i = 0; i < 5; ++i)
            tasks.push_back({verbs[i], std::string(verbs[i]) + " the cup", i + 1});
        validate_task_set(tasks);

        tasks[4].difficulty = 2; // duplicate rank
        CHECK_THROWS_AS(validate_task_set(tasks), ValidationError);
        tasks.pop_back();
        CHECK_THROWS_AS(validate_task_set(tasks), ValidationError); // wrong count
    }
}

TEST_CASE("cognition image score") {
    const std::vector<double> perfect{1, 1, 1, 1, 1};
    const std::vector<double> zero{0, 0, 0, 0, 0};
    const std::vector<double> mixed{1.0, 0.8, 0.6, 0.4, 0.2};
    CHECK(cognition_image_score(perfect) == doctest::Approx(5.0));
    CHECK(cognition_image_score(zero) == doctest::Approx(0.0));
    CHECK(cognition_image_score(mixed) == doctest::Approx(3.0));
    CHECK_THROWS_AS(cognition_image_score(std::vector<double>{1, 1, 1}), ValidationError);

    SUBCASE("permutation invariance") {
        std::vector<double> shuffled{0.2, 1.0, 0.4, 0.8, 0.6};
        CHECK(cognition_image_score(shuffled) == doctest::Approx(cognition_image_score(mixed)));
    }
}
