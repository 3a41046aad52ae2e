#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "eiqa/image.hpp"

namespace eiqa::stats {

struct CorrelationReport {
    double srcc = 0.0;
    double krcc = 0.0;
    double plcc = 0.0;
    std::size_t n = 0;
};

// Fractional ranks, 1-based, ties get the average of their rank span.
std::vector<double> fractional_ranks(std::span<const double> x);

double pearson(std::span<const double> x, std::span<const double> y);

// Spearman: Pearson correlation of fractional ranks.
double srcc(std::span<const double> x, std::span<const double> y);

// Kendall tau-b, tie corrected.
double krcc(std::span<const double> x, std::span<const double> y);

// Pearson, optionally after a 4-parameter logistic regression of x onto y
// (the usual IQA convention for nonlinearity removal). A failed fit falls
// back to the raw value; fit_ok reports which route was taken.
double plcc(std::span<const double> x, std::span<const double> y, bool logistic_fit = false,
            bool* fit_ok = nullptr);

CorrelationReport correlation_report(std::span<const double> x, std::span<const double> y,
                                     bool logistic_fit = false);

struct SubjectCorrelation {
    std::size_t n_subjects = 0;
    std::vector<double> matrix; // row-major n x n, unit diagonal
    double mean_off_diagonal = 0.0;

    double at(std::size_t i, std::size_t j) const { return matrix[i * n_subjects + j]; }
};

// Pairwise SRCC between subjects keyed by sample id. Every subject must
// cover the same id set; missing ids are reported in the error.
SubjectCorrelation subject_correlation_matrix(
    const std::vector<std::map<std::string, double>>& subjects);

enum class JNDLabel { Mild, Medium, Severe };

// Tertile partition by score, higher score = milder degradation. Group
// sizes differ by at most one, with the remainder given to the front
// groups; boundary ties keep input order.
std::vector<JNDLabel> jnd_partition(std::span<const double> scores);

const char* jnd_label_name(JNDLabel label);

// 10*log10(255^2 / MSE) over all samples, capped at 100 dB.
double psnr(const ImageBuffer& ref, const ImageBuffer& dist);

// Mean local SSIM on luma, 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
// K2 = 0.03, valid-region windows only.
double ssim(const ImageBuffer& ref, const ImageBuffer& dist);

} // namespace eiqa::stats
