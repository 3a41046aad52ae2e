#include "eiqa/text_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "eiqa/errors.hpp"

namespace eiqa::text {

const std::array<const char*, 10> kTaskVerbs = {"cover", "insert", "move",  "pick",  "place",
                                                "pour",  "press",  "pull",  "push",  "twist"};

void TaskSpec::validate() const {
    bool known = false;
    for (const char* v : kTaskVerbs)
        if (verb == v) known = true;
    if (!known) throw ValidationError("task verb outside the vocabulary: " + verb);
    if (difficulty < 1 || difficulty > 5)
        throw ValidationError("task difficulty must be in [1,5]");
    if (instruction.empty()) throw ValidationError("empty task instruction");
}

void validate_task_set(std::span<const TaskSpec> tasks) {
    if (tasks.size() != 5) throw ValidationError("an image carries exactly 5 tasks");
    bool seen[5] = {false, false, false, false, false};
    for (const TaskSpec& t : tasks) {
        t.validate();
        if (seen[t.difficulty - 1])
            throw ValidationError("duplicate difficulty rank " + std::to_string(t.difficulty));
        seen[t.difficulty - 1] = true;
    }
}

namespace {

constexpr int kMaxOrder = 4;
constexpr double kBleuEpsilon = 0.1;

// N-grams flattened to a joinable key; '\x1f' cannot appear in tokens.
std::string ngram_key(const Tokens& t, std::size_t start, int n) {
    std::string key;
    for (int i = 0; i < n; ++i) {
        if (i) key.push_back('\x1f');
        key += t[start + static_cast<std::size_t>(i)];
    }
    return key;
}

std::unordered_map<std::string, int> ngram_counts(const Tokens& t, int n) {
    std::unordered_map<std::string, int> counts;
    if (static_cast<int>(t.size()) >= n)
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= t.size(); ++i)
            ++counts[ngram_key(t, i, n)];
    return counts;
}

} // namespace

Tokens tokenize(const std::string& s) {
    Tokens out;
    std::string cur;
    for (char ch : s) {
        const auto u = static_cast<unsigned char>(ch);
        if (std::isalnum(u)) {
            cur.push_back(static_cast<char>(std::tolower(u)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

double bleu(const Tokens& candidate, const Tokens& reference) {
    if (reference.empty()) throw ValidationError("bleu: empty reference");
    if (candidate.empty()) return 0.0;

    double log_sum = 0.0;
    int orders = 0;
    for (int n = 1; n <= kMaxOrder; ++n) {
        const auto total = static_cast<long>(candidate.size()) - n + 1;
        if (total <= 0) continue;
        const auto ref_counts = ngram_counts(reference, n);
        auto cand_counts = ngram_counts(candidate, n);
        long matched = 0;
        for (const auto& [key, count] : cand_counts) {
            const auto it = ref_counts.find(key);
            if (it != ref_counts.end()) matched += std::min(count, it->second);
        }
        if (n == 1 && matched == 0) return 0.0; // disjoint vocabularies
        const double p = (matched > 0 ? static_cast<double>(matched) : kBleuEpsilon) /
                         static_cast<double>(total);
        log_sum += std::log(p);
        ++orders;
    }
    if (orders == 0) return 0.0;

    const double c = static_cast<double>(candidate.size());
    const double r = static_cast<double>(reference.size());
    const double brevity = c >= r ? 1.0 : std::exp(1.0 - r / c);
    return brevity * std::exp(log_sum / orders);
}

double rouge_l(const Tokens& candidate, const Tokens& reference) {
    if (reference.empty()) throw ValidationError("rouge_l: empty reference");
    if (candidate.empty()) return 0.0;

    const std::size_t m = candidate.size(), n = reference.size();
    std::vector<std::size_t> prev(n + 1, 0), cur(n + 1, 0);
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            if (candidate[i - 1] == reference[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    const double lcs = static_cast<double>(prev[n]);
    if (lcs == 0.0) return 0.0;
    const double p = lcs / static_cast<double>(m);
    const double r = lcs / static_cast<double>(n);
    return 2.0 * p * r / (p + r);
}

CiderScorer::CiderScorer(const std::vector<Tokens>& idf_corpus) {
    if (idf_corpus.empty()) throw ValidationError("cider: empty idf corpus");
    for (const Tokens& sent : idf_corpus) {
        for (int n = 1; n <= kMaxOrder; ++n) {
            const auto counts = ngram_counts(sent, n);
            for (const auto& [key, _] : counts) df_[key] += 1.0;
        }
    }
    log_n_ = std::log(std::max<double>(2.0, static_cast<double>(idf_corpus.size())));
}

double CiderScorer::idf(const std::string& key) const {
    const auto it = df_.find(key);
    const double df = it == df_.end() ? 1.0 : std::max(1.0, it->second);
    return log_n_ - std::log(df);
}

double CiderScorer::score(const Tokens& candidate, const Tokens& reference) const {
    if (reference.empty()) throw ValidationError("cider: empty reference");
    if (candidate.empty()) return 0.0;

    double cos_sum = 0.0;
    int orders = 0;
    for (int n = 1; n <= kMaxOrder; ++n) {
        const auto cand = ngram_counts(candidate, n);
        const auto ref = ngram_counts(reference, n);
        if (cand.empty() && ref.empty()) continue; // both too short: skip order
        ++orders;
        if (cand.empty() || ref.empty()) continue; // one-sided: cosine 0

        double dot = 0.0, norm_c = 0.0, norm_r = 0.0;
        for (const auto& [key, count] : cand) {
            const double w = count * idf(key);
            norm_c += w * w;
            const auto it = ref.find(key);
            if (it != ref.end()) dot += w * (it->second * idf(key));
        }
        for (const auto& [key, count] : ref) {
            const double w = count * idf(key);
            norm_r += w * w;
        }
        if (norm_c > 0.0 && norm_r > 0.0)
            cos_sum += dot / (std::sqrt(norm_c) * std::sqrt(norm_r));
    }
    if (orders == 0) return 0.0;
    return std::clamp(10.0 * cos_sum / orders, 0.0, 10.0);
}

double cognition_task_score(const CognitionDims& dims) {
    const auto in = [](double v, double lo, double hi) {
        return std::isfinite(v) && v >= lo && v <= hi;
    };
    if (!in(dims.precision, 0.0, 1.0) || !in(dims.recall, 0.0, 1.0) ||
        !in(dims.semantic, 0.0, 10.0))
        throw ValidationError("cognition dims out of range");
    return (dims.precision + dims.recall + 0.1 * dims.semantic) / 3.0;
}

double cognition_image_score(std::span<const double> task_scores) {
    if (task_scores.size() != 5)
        throw ValidationError("cognition image score needs exactly 5 task scores");
    double sum = 0.0;
    for (double s : task_scores) {
        if (!std::isfinite(s) || s < 0.0 || s > 1.0)
            throw ValidationError("task score out of [0,1]");
        sum += s;
    }
    return sum;
}

} // namespace eiqa::text
