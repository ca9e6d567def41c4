#pragma once

// Independent reference computations used by the tests. None of these call
// into the code paths they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "frameflow/coding.hpp"
#include "frameflow/transfer.hpp"

namespace oracle {

using frameflow::Complex;

inline Eigen::MatrixXcd dense(const frameflow::TransferMatrix& m) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m.size), static_cast<Eigen::Index>(m.size));
    for (std::size_t r = 0; r < m.size; ++r) {
        for (int j = 0; j < m.branching; ++j) {
            const std::size_t slot = r * static_cast<std::size_t>(m.branching) + static_cast<std::size_t>(j);
            a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m.columns[slot])) += m.values[slot];
        }
    }
    return a;
}

/// Eigenvalue moduli in decreasing order.
inline std::vector<double> spectrum_moduli(const frameflow::TransferMatrix& m) {
    std::vector<double> out;
    if (m.is_real()) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(dense(m).real(), false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::abs(es.eigenvalues()[i]));
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(dense(m), false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::abs(es.eigenvalues()[i]));
    }
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

/// -log of the spectral radius.
inline double dense_eta(const frameflow::TransferMatrix& m) { return -std::log(spectrum_moduli(m).front()); }

/// Least-squares slope of log N(eps) against log(1/eps) for square boxes of
/// side 2^-j, j in [j_min, j_max].
inline double box_counting_dimension(const std::vector<Complex>& points, int j_min, int j_max) {
    std::vector<double> x, y;
    std::vector<std::pair<long long, long long>> keys(points.size());
    for (int j = j_min; j <= j_max; ++j) {
        const double eps = std::ldexp(1.0, -j);
        for (std::size_t i = 0; i < points.size(); ++i) {
            keys[i] = {static_cast<long long>(std::floor(points[i].real() / eps)),
                       static_cast<long long>(std::floor(points[i].imag() / eps))};
        }
        std::sort(keys.begin(), keys.end());
        const auto n = std::unique(keys.begin(), keys.end()) - keys.begin();
        x.push_back(-std::log(eps));
        y.push_back(std::log(static_cast<double>(n)));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

/// All symbol sequences of length n over the alphabet, admissible ones only,
/// by filtering the full product set.
inline std::vector<std::vector<int>> admissible_words(int alphabet, int n, bool cyclic) {
    std::vector<std::vector<int>> out;
    std::vector<int> w(static_cast<std::size_t>(n), 0);
    while (true) {
        bool ok = true;
        for (int i = 0; i + 1 < n; ++i) ok = ok && (w[static_cast<std::size_t>(i + 1)] != (w[static_cast<std::size_t>(i)] ^ 1));
        if (cyclic && n > 1) ok = ok && (w.front() != (w.back() ^ 1));
        if (ok) out.push_back(w);
        int i = n - 1;
        while (i >= 0 && ++w[static_cast<std::size_t>(i)] == alphabet) w[static_cast<std::size_t>(i--)] = 0;
        if (i < 0) break;
    }
    return out;
}

/// 2 log|mu| for the larger root of mu^2 - tr mu + 1 = 0 (matrix normalized
/// to determinant one by the caller's trace).
inline double translation_length_from_trace(Complex tr) {
    const Complex disc = std::sqrt(tr * tr - 4.0);
    Complex mu = 0.5 * (tr + disc);
    if (std::abs(mu) < 1.0) mu = 0.5 * (tr - disc);
    return 2.0 * std::log(std::abs(mu));
}

/// Raw 2x2 product of the generator matrices along a word, trace normalized
/// by the square root of the product of generator determinants.
inline Complex word_trace(const frameflow::SchottkyScheme& s, const std::vector<int>& w) {
    Complex a = 1, b = 0, c = 0, d = 1, det = 1;
    for (int x : w) {
        const auto& m = s.map(x);
        det *= m.a() * m.d() - m.b() * m.c();
        const Complex na = a * m.a() + b * m.c(), nb = a * m.b() + b * m.d();
        const Complex nc = c * m.a() + d * m.c(), nd = c * m.b() + d * m.d();
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
    return (a + d) / std::sqrt(det);
}

/// Central finite difference of a holomorphic function.
template <class F>
Complex numeric_derivative(F f, Complex z, double h = 1e-6) {
    return (f(z + h) - f(z - h)) / (2.0 * h);
}

}  // namespace oracle
