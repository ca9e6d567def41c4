#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "frameflow/transfer.hpp"

namespace frameflow {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// RMS residual divided by |slope| times the window span.
    double relative_residual = 0.0;
};

/// Least-squares line through (j, y[j - 1]) for j in [first, last] (1-based).
SlopeFit fit_line(const std::vector<double>& y, int first, int last);

struct SweepGrid {
    std::vector<double> b;
    std::vector<int> k;
    int iterations = 200;
};

struct GapRow {
    double b = 0.0;
    int k = 0;
    double eta = 0.0;
    double fit_residual = 0.0;
    bool flagged = false;
};

struct GapReport {
    std::vector<GapRow> rows;
    /// Minimum eta over the grid without (0, 0).
    double min_eta = 0.0;
    double threshold = 0.0;
};

/// eta = -slope of log ||M^j H0||_2 over j in [n/2, n].
GapRow gap_point(const TransferModel& model, const NormalizedWeights& weights, double b, int k, int n,
                 const std::vector<Complex>& h0);

/// Rows in grid order (b outer, k inner). Rows with eta < threshold are flagged.
GapReport gap_sweep(const TransferModel& model, const NormalizedWeights& weights, const SweepGrid& grid,
                    std::uint64_t seed, double threshold = 0.0, int threads = 1);

struct StabilityRow {
    double a = 0.0;
    double eta = 0.0;
    double fit_residual = 0.0;
};

struct StabilityReport {
    std::vector<StabilityRow> rows;
    double eta0 = 0.0;
    /// max |eta(a) - eta(0)| / |eta(0)| over the rows.
    double max_relative_deviation = 0.0;
};

/// eta(a; b, k) for the operator normalized at delta + a. Requires |a| <= 0.2 delta.
StabilityReport small_a_stability(const TransferModel& model, double delta, const std::vector<double>& a_values,
                                  double b, int k, int n, std::uint64_t seed, int threads = 1);

struct LnicResult {
    double value = 0.0;
    std::vector<double> omegas;
    std::vector<double> per_omega;
};

/// min over omega of the smallest (over base points) largest (over word
/// pairs and unit directions) |<dBP(Z), omega>|. omegas are angles of the
/// unit vector in R^2; the default is 16 angles in [0, pi).
LnicResult lnic_probe(const SchottkyScheme& scheme, int m2, int samples, std::uint64_t seed,
                      std::vector<double> omegas = {});

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace frameflow
