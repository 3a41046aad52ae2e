#include "eiqa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "eiqa/errors.hpp"
#include "eiqa/plane.hpp"

namespace eiqa::stats {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("sequence length mismatch");
    if (x.size() < 3) throw ValidationError("need at least 3 samples");
    for (double v : x)
        if (!std::isfinite(v)) throw ValidationError("non-finite value in x");
    for (double v : y)
        if (!std::isfinite(v)) throw ValidationError("non-finite value in y");
    const auto constant = [](std::span<const double> s) {
        for (double v : s)
            if (v != s[0]) return false;
        return true;
    };
    if (constant(x)) throw ValidationError("x is constant; rank correlation undefined");
    if (constant(y)) throw ValidationError("y is constant; rank correlation undefined");
}

// Strict inversions of v, counted by merge sort.
std::uint64_t count_inversions(std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> buf(n);
    std::uint64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    inversions += mid - i;
                    buf[k++] = v[j++];
                } else {
                    buf[k++] = v[i++];
                }
            }
            while (i < mid) buf[k++] = v[i++];
            while (j < hi) buf[k++] = v[j++];
            std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                      buf.begin() + static_cast<std::ptrdiff_t>(hi),
                      v.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return inversions;
}

std::uint64_t tie_pair_count(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::uint64_t pairs = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= v.size(); ++i) {
        if (i < v.size() && v[i] == v[i - 1]) {
            ++run;
        } else {
            pairs += static_cast<std::uint64_t>(run) * (run - 1) / 2;
            run = 1;
        }
    }
    return pairs;
}

} // namespace

std::vector<double> fractional_ranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ValidationError("constant sequence in pearson");
    return sxy / std::sqrt(sxx * syy);
}

double srcc(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const std::vector<double> rx = fractional_ranks(x);
    const std::vector<double> ry = fractional_ranks(y);
    return pearson(rx, ry);
}

double krcc(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];

    const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    const std::uint64_t n1 = tie_pair_count(std::vector<double>(x.begin(), x.end()));
    const std::uint64_t n2 = tie_pair_count(std::vector<double>(y.begin(), y.end()));

    // Joint ties.
    std::vector<std::pair<double, double>> xy(n);
    for (std::size_t i = 0; i < n; ++i) xy[i] = {x[i], y[i]};
    std::sort(xy.begin(), xy.end());
    std::uint64_t n3 = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i < n && xy[i] == xy[i - 1]) {
            ++run;
        } else {
            n3 += static_cast<std::uint64_t>(run) * (run - 1) / 2;
            run = 1;
        }
    }

    const std::uint64_t discordant = count_inversions(ys);
    const double s = static_cast<double>(n0 - n1 - n2 + n3) - 2.0 * static_cast<double>(discordant);
    const double denom = std::sqrt(static_cast<double>(n0 - n1)) *
                         std::sqrt(static_cast<double>(n0 - n2));
    if (denom == 0.0) throw ValidationError("constant sequence in krcc");
    return s / denom;
}

namespace {

struct Logistic4 {
    // b2 + (b1 - b2) / (1 + exp(-(x - b3) / b4))
    double b1, b2, b3, b4;
    double operator()(double x) const {
        return b2 + (b1 - b2) / (1.0 + std::exp(-(x - b3) / b4));
    }
};

double logistic_sse(const Logistic4& f, std::span<const double> x, std::span<const double> y) {
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = f(x[i]) - y[i];
        sse += e * e;
    }
    return sse;
}

// Nelder-Mead over the 4 logistic parameters.
bool fit_logistic4(std::span<const double> x, std::span<const double> y, Logistic4& out) {
    const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
    const double xspan = *xmax_it - *xmin_it;
    if (xspan <= 0.0) return false;
    double mx = 0.0;
    for (double v : x) mx += v;
    mx /= static_cast<double>(x.size());

    using P = std::array<double, 4>;
    const auto eval = [&](const P& p) {
        const double b4 = std::abs(p[3]) > 1e-12 * xspan ? p[3] : 1e-12 * xspan;
        return logistic_sse({p[0], p[1], p[2], b4}, x, y);
    };

    P start{*ymax_it, *ymin_it, mx, xspan / 4.0};
    std::array<P, 5> simplex;
    std::array<double, 5> f{};
    for (int v = 0; v < 5; ++v) {
        simplex[static_cast<std::size_t>(v)] = start;
        if (v > 0) {
            double& c = simplex[static_cast<std::size_t>(v)][static_cast<std::size_t>(v - 1)];
            c += (c != 0.0 ? 0.1 * std::abs(c) : 0.1 * xspan);
        }
        f[static_cast<std::size_t>(v)] = eval(simplex[static_cast<std::size_t>(v)]);
    }

    for (int iter = 0; iter < 2000; ++iter) {
        std::array<std::size_t, 5> idx{0, 1, 2, 3, 4};
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        if (f[idx[4]] - f[idx[0]] < 1e-12 * (1.0 + f[idx[0]])) break;

        P centroid{};
        for (int v = 0; v < 4; ++v)
            for (int d = 0; d < 4; ++d)
                centroid[static_cast<std::size_t>(d)] +=
                    simplex[idx[static_cast<std::size_t>(v)]][static_cast<std::size_t>(d)] / 4.0;

        const auto blend = [&](double t) {
            P p;
            for (int d = 0; d < 4; ++d)
                p[static_cast<std::size_t>(d)] =
                    centroid[static_cast<std::size_t>(d)] +
                    t * (centroid[static_cast<std::size_t>(d)] -
                         simplex[idx[4]][static_cast<std::size_t>(d)]);
            return p;
        };

        const P refl = blend(1.0);
        const double fr = eval(refl);
        if (fr < f[idx[0]]) {
            const P exp_ = blend(2.0);
            const double fe = eval(exp_);
            simplex[idx[4]] = fe < fr ? exp_ : refl;
            f[idx[4]] = std::min(fe, fr);
        } else if (fr < f[idx[3]]) {
            simplex[idx[4]] = refl;
            f[idx[4]] = fr;
        } else {
            const P contr = blend(-0.5);
            const double fc = eval(contr);
            if (fc < f[idx[4]]) {
                simplex[idx[4]] = contr;
                f[idx[4]] = fc;
            } else {
                for (int v = 1; v < 5; ++v) {
                    for (int d = 0; d < 4; ++d)
                        simplex[idx[static_cast<std::size_t>(v)]][static_cast<std::size_t>(d)] =
                            0.5 * (simplex[idx[static_cast<std::size_t>(v)]]
                                          [static_cast<std::size_t>(d)] +
                                   simplex[idx[0]][static_cast<std::size_t>(d)]);
                    f[idx[static_cast<std::size_t>(v)]] =
                        eval(simplex[idx[static_cast<std::size_t>(v)]]);
                }
            }
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
    const P& p = simplex[best];
    if (!std::isfinite(f[best])) return false;
    out = {p[0], p[1], p[2],
           std::abs(p[3]) > 1e-12 * xspan ? p[3] : 1e-12 * xspan};
    return true;
}

} // namespace

double plcc(std::span<const double> x, std::span<const double> y, bool logistic_fit,
            bool* fit_ok) {
    check_pair(x, y);
    if (fit_ok) *fit_ok = false;
    if (!logistic_fit) return pearson(x, y);

    Logistic4 f{};
    if (fit_logistic4(x, y, f)) {
        std::vector<double> mapped(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) mapped[i] = f(x[i]);
        bool constant = true;
        for (double v : mapped) {
            if (!std::isfinite(v)) return pearson(x, y);
            if (v != mapped[0]) constant = false;
        }
        if (!constant) {
            if (fit_ok) *fit_ok = true;
            return pearson(mapped, y);
        }
    }
    return pearson(x, y); // non-convergent fit: raw value
}

CorrelationReport correlation_report(std::span<const double> x, std::span<const double> y,
                                     bool logistic_fit) {
    CorrelationReport r;
    r.srcc = srcc(x, y);
    r.krcc = krcc(x, y);
    r.plcc = plcc(x, y, logistic_fit);
    r.n = x.size();
    return r;
}

SubjectCorrelation subject_correlation_matrix(
    const std::vector<std::map<std::string, double>>& subjects) {
    if (subjects.size() < 2) throw ValidationError("need at least 2 subjects");

    std::set<std::string> all_ids;
    for (const auto& s : subjects)
        for (const auto& [id, _] : s) all_ids.insert(id);

    std::ostringstream missing;
    for (std::size_t i = 0; i < subjects.size(); ++i)
        for (const std::string& id : all_ids)
            if (!subjects[i].count(id)) missing << " subject" << i << ":" << id;
    if (!missing.str().empty())
        throw ValidationError("misaligned sample ids, missing:" + missing.str());

    std::vector<std::vector<double>> aligned(subjects.size());
    for (std::size_t i = 0; i < subjects.size(); ++i)
        for (const std::string& id : all_ids) aligned[i].push_back(subjects[i].at(id));

    const std::size_t n = subjects.size();
    SubjectCorrelation out;
    out.n_subjects = n;
    out.matrix.assign(n * n, 1.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = srcc(aligned[i], aligned[j]);
            out.matrix[i * n + j] = r;
            out.matrix[j * n + i] = r;
            sum += r;
        }
    out.mean_off_diagonal = sum / (static_cast<double>(n) * (n - 1) / 2.0);
    return out;
}

std::vector<JNDLabel> jnd_partition(std::span<const double> scores) {
    const std::size_t n = scores.size();
    if (n < 3) throw ValidationError("jnd partition needs at least 3 samples");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Descending by score; stable keeps boundary ties in input order.
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    const std::size_t base = n / 3;
    const std::size_t rem = n % 3;
    const std::size_t mild_n = base + (rem > 0 ? 1 : 0);
    const std::size_t medium_n = base + (rem > 1 ? 1 : 0);

    std::vector<JNDLabel> labels(n, JNDLabel::Severe);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < mild_n)
            labels[order[i]] = JNDLabel::Mild;
        else if (i < mild_n + medium_n)
            labels[order[i]] = JNDLabel::Medium;
    }
    return labels;
}

const char* jnd_label_name(JNDLabel label) {
    switch (label) {
    case JNDLabel::Mild: return "Mild";
    case JNDLabel::Medium: return "Medium";
    case JNDLabel::Severe: return "Severe";
    }
    return "?";
}

double psnr(const ImageBuffer& ref, const ImageBuffer& dist) {
    if (!ref.same_shape(dist)) throw ValidationError("psnr: image dimensions differ");
    std::vector<double> row_sums(static_cast<std::size_t>(ref.height), 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < ref.height; ++y) {
        double s = 0.0;
        const std::size_t base = static_cast<std::size_t>(y) * ref.width * 3;
        for (std::size_t i = 0; i < static_cast<std::size_t>(ref.width) * 3; ++i) {
            const double d = static_cast<double>(ref.data[base + i]) - dist.data[base + i];
            s += d * d;
        }
        row_sums[static_cast<std::size_t>(y)] = s;
    }
    const double mse =
        std::accumulate(row_sums.begin(), row_sums.end(), 0.0) / static_cast<double>(ref.sample_count());
    if (mse == 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double ssim(const ImageBuffer& ref, const ImageBuffer& dist) {
    if (!ref.same_shape(dist)) throw ValidationError("ssim: image dimensions differ");
    if (ref.width < 11 || ref.height < 11)
        throw ValidationError("ssim: image smaller than the 11x11 window");

    // Fixed 11-tap window: Gaussian sigma 1.5 truncated at radius 5.
    std::vector<double> taps(11);
    double sum = 0.0;
    for (int i = -5; i <= 5; ++i) {
        const double w = std::exp(-0.5 * (i / 1.5) * (i / 1.5));
        taps[static_cast<std::size_t>(i + 5)] = w;
        sum += w;
    }
    for (double& w : taps) w /= sum;

    const img::Plane x = img::luma_plane(ref);
    const img::Plane y = img::luma_plane(dist);
    img::Plane xx(x.width, x.height), yy(x.width, x.height), xy(x.width, x.height);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < x.height; ++r)
        for (int c = 0; c < x.width; ++c) {
            const double a = x.at(c, r), b = y.at(c, r);
            xx.at(c, r) = a * a;
            yy.at(c, r) = b * b;
            xy.at(c, r) = a * b;
        }

    const img::Plane mu_x = img::convolve_valid(x, taps);
    const img::Plane mu_y = img::convolve_valid(y, taps);
    const img::Plane m_xx = img::convolve_valid(xx, taps);
    const img::Plane m_yy = img::convolve_valid(yy, taps);
    const img::Plane m_xy = img::convolve_valid(xy, taps);

    constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);

    std::vector<double> row_sums(static_cast<std::size_t>(mu_x.height), 0.0);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < mu_x.height; ++r) {
        double s = 0.0;
        for (int c = 0; c < mu_x.width; ++c) {
            const double mx = mu_x.at(c, r), my = mu_y.at(c, r);
            const double vx = m_xx.at(c, r) - mx * mx;
            const double vy = m_yy.at(c, r) - my * my;
            const double cxy = m_xy.at(c, r) - mx * my;
            s += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
                 ((mx * mx + my * my + c1) * (vx + vy + c2));
        }
        row_sums[static_cast<std::size_t>(r)] = s;
    }
    const double total = std::accumulate(row_sums.begin(), row_sums.end(), 0.0);
    return total / (static_cast<double>(mu_x.width) * mu_x.height);
}

} // namespace eiqa::stats
