#include "frameflow/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "frameflow/errors.hpp"

namespace frameflow {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

SlopeFit fit_line(const std::vector<double>& y, int first, int last) {
    if (first < 1 || last > static_cast<int>(y.size()) || last - first < 1) {
        throw std::invalid_argument("fit window is empty");
    }
    const int count = last - first + 1;
    double mx = 0.0, my = 0.0;
    for (int j = first; j <= last; ++j) {
        mx += j;
        my += y[j - 1];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0;
    for (int j = first; j <= last; ++j) {
        sxx += (j - mx) * (j - mx);
        sxy += (j - mx) * (y[j - 1] - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (int j = first; j <= last; ++j) {
        const double r = y[j - 1] - (fit.intercept + fit.slope * j);
        ss += r * r;
    }
    const double rms = std::sqrt(ss / count);
    const double scale = std::abs(fit.slope) * (last - first);
    fit.relative_residual = scale > 0.0 ? rms / scale : (rms > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    return fit;
}

GapRow gap_point(const TransferModel& model, const NormalizedWeights& weights, double b, int k, int n,
                 const std::vector<Complex>& h0) {
    if (n < 20) throw std::invalid_argument("gap fits need at least 20 iterations");
    const TransferMatrix m = assemble_normalized(model, weights, b, k);
    const std::vector<double> logs = iterate_log_norms(m, weights.nu_u, h0, n);
    const SlopeFit fit = fit_line(logs, n / 2, n);
    return GapRow{b, k, -fit.slope, fit.relative_residual, false};
}

GapReport gap_sweep(const TransferModel& model, const NormalizedWeights& weights, const SweepGrid& grid,
                    std::uint64_t seed, double threshold, int threads) {
    if (grid.b.empty() || grid.k.empty()) throw std::invalid_argument("sweep grid is empty");
    const std::vector<Complex> h0 = random_unit_vector(model.size(), weights.nu_u, seed);
    GapReport report;
    report.threshold = threshold;
    report.rows.resize(grid.b.size() * grid.k.size());
    parallel_for(report.rows.size(), threads, [&](std::size_t i) {
        const double b = grid.b[i / grid.k.size()];
        const int k = grid.k[i % grid.k.size()];
        report.rows[i] = gap_point(model, weights, b, k, grid.iterations, h0);
    });
    report.min_eta = std::numeric_limits<double>::infinity();
    for (auto& row : report.rows) {
        if (row.b == 0.0 && row.k == 0) continue;
        report.min_eta = std::min(report.min_eta, row.eta);
        row.flagged = row.eta < threshold;
    }
    return report;
}

StabilityReport small_a_stability(const TransferModel& model, double delta, const std::vector<double>& a_values,
                                  double b, int k, int n, std::uint64_t seed, int threads) {
    for (double a : a_values) {
        if (std::abs(a) > 0.2 * delta) {
            throw std::invalid_argument("stability offsets must satisfy |a| <= 0.2 delta");
        }
    }
    const NormalizedWeights base = normalize(model, delta, 0.0);
    const std::vector<Complex> h0 = random_unit_vector(model.size(), base.nu_u, seed);
    StabilityReport report;
    report.eta0 = gap_point(model, base, b, k, n, h0).eta;
    report.rows.resize(a_values.size());
    parallel_for(a_values.size(), threads, [&](std::size_t i) {
        const double a = a_values[i];
        const NormalizedWeights w = a == 0.0 ? base : normalize(model, delta, a);
        // Norms stay weighted by the a = 0 measure so that a = 0 reproduces
        // the sweep exactly.
        NormalizedWeights shared = w;
        shared.nu_u = base.nu_u;
        const GapRow row = gap_point(model, shared, b, k, n, h0);
        report.rows[i] = StabilityRow{a, row.eta, row.fit_residual};
    });
    for (const auto& row : report.rows) {
        report.max_relative_deviation =
            std::max(report.max_relative_deviation, std::abs(row.eta - report.eta0) / std::abs(report.eta0));
    }
    return report;
}

LnicResult lnic_probe(const SchottkyScheme& scheme, int m2, int samples, std::uint64_t seed,
                      std::vector<double> omegas) {
    if (m2 < 2) throw std::invalid_argument("lnic probe needs word length m2 >= 2");
    if (samples < 1) throw std::invalid_argument("lnic probe needs at least one base point");
    const Symbol e = 0;
    const WordIndex idx(scheme.alphabet_size(), m2);
    std::vector<Word> words;
    for (std::size_t i = 0; i < idx.count(); ++i) {
        Word w = idx.word(i);
        if (w[w.size() - 1] == e) words.push_back(std::move(w));
    }
    if (words.size() < 2) throw InsufficientWords("fewer than two words of length m2 end at a common symbol");

    if (omegas.empty()) {
        for (int i = 0; i < 16; ++i) omegas.push_back(std::numbers::pi * i / 16.0);
    }

    // Base points: limit points where every branch ending in e is admissible.
    std::vector<Complex> base;
    const auto pool = limit_points(scheme, static_cast<std::size_t>(samples) * 4 + 16, 40, seed);
    for (Complex u : pool) {
        if (static_cast<int>(base.size()) == samples) break;
        if (scheme.locate(u) != bar(e)) base.push_back(u);
    }
    if (base.empty()) throw InsufficientWords("no admissible base points for the lnic probe");

    std::vector<Complex> directions{Complex(1.0, 0.0)};
    if (!scheme.all_real()) directions.emplace_back(0.0, 1.0);

    // Derivative of the (tau, theta) word cocycle along direction z.
    auto derivative = [&](const Word& w, Complex u, Complex z) {
        const double h = 1e-6;
        const BranchCocycle plus = scheme.word_cocycle(w, u + h * z);
        const BranchCocycle minus = scheme.word_cocycle(w, u - h * z);
        return std::pair{(plus.tau - minus.tau) / (2.0 * h), wrap_angle(plus.theta - minus.theta) / (2.0 * h)};
    };

    LnicResult result;
    result.omegas = omegas;
    result.per_omega.assign(omegas.size(), std::numeric_limits<double>::infinity());
    for (Complex u : base) {
        // dBP_j(Z) for every j and basis direction Z; the maximum over unit
        // directions of a real-linear form is the norm over the basis.
        std::vector<std::vector<std::pair<double, double>>> dbp(words.size());
        std::vector<std::pair<double, double>> d0;
        for (Complex z : directions) d0.push_back(derivative(words[0], u, z));
        for (std::size_t j = 1; j < words.size(); ++j) {
            for (std::size_t zi = 0; zi < directions.size(); ++zi) {
                const auto dj = derivative(words[j], u, directions[zi]);
                dbp[j].emplace_back(d0[zi].first - dj.first, d0[zi].second - dj.second);
            }
        }
        for (std::size_t o = 0; o < omegas.size(); ++o) {
            const double c = std::cos(omegas[o]), s = std::sin(omegas[o]);
            double best = 0.0;
            for (std::size_t j = 1; j < words.size(); ++j) {
                double sq = 0.0;
                for (const auto& [dt, dth] : dbp[j]) sq += (c * dt + s * dth) * (c * dt + s * dth);
                best = std::max(best, std::sqrt(sq));
            }
            result.per_omega[o] = std::min(result.per_omega[o], best);
        }
    }
    result.value = *std::min_element(result.per_omega.begin(), result.per_omega.end());
    return result;
}

}  // namespace frameflow
