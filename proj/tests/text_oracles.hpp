#pragma once

// Independent text-metric oracles for the test suites: ordered-map n-gram
// bookkeeping and direct formula transcription, deliberately a different
// code path from the library implementation.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "eiqa/text_metrics.hpp"

namespace text_oracles {

using eiqa::text::Tokens;
using Gram = std::vector<std::string>;

inline std::map<Gram, int> oracle_ngrams(const Tokens& t, std::size_t n) {
    std::map<Gram, int> out;
    if (t.size() >= n)
        for (std::size_t i = 0; i + n <= t.size(); ++i)
            ++out[Gram(t.begin() + static_cast<std::ptrdiff_t>(i),
                       t.begin() + static_cast<std::ptrdiff_t>(i + n))];
    return out;
}

inline double oracle_bleu(const Tokens& cand, const Tokens& ref) {
    if (cand.empty()) return 0.0;
    std::vector<double> logs;
    for (std::size_t n = 1; n <= 4; ++n) {
        if (cand.size() < n) continue;
        const double total = static_cast<double>(cand.size() - n + 1);
        const auto c = oracle_ngrams(cand, n);
        const auto r = oracle_ngrams(ref, n);
        double matched = 0;
        for (const auto& [g, k] : c)
            if (r.count(g)) matched += std::min(k, r.at(g));
        if (n == 1 && matched == 0) return 0.0;
        logs.push_back(std::log((matched > 0 ? matched : 0.1) / total));
    }
    if (logs.empty()) return 0.0;
    double mean = 0;
    for (double l : logs) mean += l;
    mean /= static_cast<double>(logs.size());
    const double bp = cand.size() >= ref.size()
                          ? 1.0
                          : std::exp(1.0 - static_cast<double>(ref.size()) / cand.size());
    return bp * std::exp(mean);
}

inline double oracle_rouge(const Tokens& cand, const Tokens& ref) {
    if (cand.empty()) return 0.0;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    const std::function<std::size_t(std::size_t, std::size_t)> lcs =
        [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == cand.size() || j == ref.size()) return 0;
        const auto key = std::make_pair(i, j);
        const auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        std::size_t v;
        if (cand[i] == ref[j])
            v = 1 + lcs(i + 1, j + 1);
        else
            v = std::max(lcs(i + 1, j), lcs(i, j + 1));
        memo[key] = v;
        return v;
    };
    const double l = static_cast<double>(lcs(0, 0));
    if (l == 0.0) return 0.0;
    const double p = l / static_cast<double>(cand.size());
    const double r = l / static_cast<double>(ref.size());
    return 2.0 * p * r / (p + r);
}

inline double oracle_cider(const Tokens& cand, const Tokens& ref,
                           const std::vector<Tokens>& corpus) {
    if (cand.empty()) return 0.0;
    std::map<Gram, double> df;
    for (const Tokens& s : corpus)
        for (std::size_t n = 1; n <= 4; ++n) {
            std::set<Gram> seen;
            for (const auto& [g, _] : oracle_ngrams(s, n)) seen.insert(g);
            for (const Gram& g : seen) df[g] += 1.0;
        }
    const double log_n = std::log(std::max<double>(2.0, static_cast<double>(corpus.size())));
    const auto idf = [&](const Gram& g) {
        const auto it = df.find(g);
        return log_n - std::log(std::max(1.0, it == df.end() ? 1.0 : it->second));
    };
    double cos_sum = 0.0;
    int orders = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto c = oracle_ngrams(cand, n);
        const auto r = oracle_ngrams(ref, n);
        if (c.empty() && r.empty()) continue;
        ++orders;
        if (c.empty() || r.empty()) continue;
        double dot = 0, nc = 0, nr = 0;
        for (const auto& [g, k] : c) {
            const double w = k * idf(g);
            nc += w * w;
            if (r.count(g)) dot += w * (r.at(g) * idf(g));
        }
        for (const auto& [g, k] : r) {
            const double w = k * idf(g);
            nr += w * w;
        }
        if (nc > 0 && nr > 0) cos_sum += dot / (std::sqrt(nc) * std::sqrt(nr));
    }
    if (orders == 0) return 0.0;
    return std::clamp(10.0 * cos_sum / orders, 0.0, 10.0);
}

// Twenty reference/candidate pairs in the ~10-word register the scorers see.
inline const std::vector<std::pair<std::string, std::string>>& fixture_pairs() {
    static const std::vector<std::pair<std::string, std::string>> pairs = {
        {"pick up the red block on the table", "pick up the red block on the table"},
        {"pick up the red block on the table", "pick up the blue block on the table"},
        {"move the cup to the left side slowly", "move the cup to the right side slowly"},
        {"press the green button next to the lever", "press the green button near the lever"},
        {"pour water from the kettle into the mug", "pour the water into the mug"},
        {"push the drawer shut with the gripper", "pull the drawer open with the gripper"},
        {"place the spoon inside the empty bowl", "place the fork inside the empty bowl"},
        {"twist the jar lid counter clockwise twice", "twist the jar lid clockwise once"},
        {"cover the pan with the steel lid", "cover the pot with the glass lid"},
        {"insert the plug into the wall socket", "insert the key into the lock"},
        {"pick the apple from the wooden basket", "grab the apple from the basket"},
        {"move the robot arm above the conveyor belt", "move the arm over the conveyor"},
        {"press down firmly on the stamp pad", "press gently on the stamp pad"},
        {"pull the rope toward the loading dock", "pull the cable toward the dock"},
        {"place two batteries inside the remote control", "put two batteries in the remote"},
        {"pour the coffee beans into the grinder hopper", "pour beans into the grinder"},
        {"push the cart along the yellow line", "push the cart across the yellow line"},
        {"cover the sensor with the rubber cap", "remove the rubber cap from the sensor"},
        {"insert the card into the top slot", "slide the card into the top slot"},
        {"twist the valve handle a quarter turn", "turn the valve handle a quarter twist"},
    };
    return pairs;
}

} // namespace text_oracles
