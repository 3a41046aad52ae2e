#pragma once

#include <array>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace eiqa::text {

using Tokens = std::vector<std::string>;

// The closed manipulation-verb vocabulary tasks are drawn from.
extern const std::array<const char*, 10> kTaskVerbs;

// One of the five tasks attached to an image: a verb from the vocabulary,
// the instruction text, and a difficulty rank.
struct TaskSpec {
    std::string verb;
    std::string instruction;
    int difficulty = 0; // 1..5

    void validate() const;
};

// The five tasks of one image must carry difficulty ranks 1..5 exactly once.
void validate_task_set(std::span<const TaskSpec> tasks);

// Lowercase, split on whitespace and punctuation; alphanumeric runs only.
Tokens tokenize(const std::string& s);

// Sentence BLEU-4 with brevity penalty. Unigram precision is unsmoothed
// (no overlap scores 0); higher orders replace a zero match count with
// epsilon = 0.1; orders the candidate is too short for are skipped, so an
// exact short match still scores 1.
double bleu(const Tokens& candidate, const Tokens& reference);

// ROUGE-L F1 (balanced F-measure over the longest common subsequence).
double rouge_l(const Tokens& candidate, const Tokens& reference);

// TF-IDF n-gram cosine over n = 1..4, scaled by 10 and clipped to [0, 10].
// The IDF table is built once from the run's reference sentences; document
// frequency is floored at 1 and the corpus size at 2 so a single-sentence
// corpus stays defined.
class CiderScorer {
public:
    explicit CiderScorer(const std::vector<Tokens>& idf_corpus);

    double score(const Tokens& candidate, const Tokens& reference) const;

private:
    double idf(const std::string& key) const;

    std::unordered_map<std::string, double> df_;
    double log_n_ = 0.0;
};

struct CognitionDims {
    double precision = 0.0; // BLEU, [0,1]
    double recall = 0.0;    // ROUGE-L, [0,1]
    double semantic = 0.0;  // CIDEr, [0,10]
};

// (1*precision + 1*recall + 0.1*semantic) / 3: the weighted sum normalized
// by its maximum, so identity outputs score exactly 1.
double cognition_task_score(const CognitionDims& dims);

// Sum of the five per-task scores, range [0, 5].
double cognition_image_score(std::span<const double> task_scores);

} // namespace eiqa::text
