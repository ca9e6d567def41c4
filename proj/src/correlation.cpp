#include "frameflow/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "frameflow/errors.hpp"
#include "frameflow/spectral.hpp"

namespace frameflow {

namespace {

using Gauss = boost::math::quadrature::gauss<double, 32>;

std::vector<double> base_values(const Observable& obs, const TransferModel& model) {
    std::vector<double> out(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) out[i] = obs.base_on(model, i);
    return out;
}

// Pair_k = c_k conj(d_k) for the modes present in both observables.
std::map<int, Complex> mode_pairs(const Observable& phi, const Observable& psi) {
    std::map<int, Complex> pairs;
    for (const auto& [k, c] : phi.coefficients()) {
        const Complex p = c * std::conj(psi.coefficient(k));
        if (p != Complex(0.0)) pairs[k] = p;
    }
    return pairs;
}

}  // namespace

double profile_value(Profile p, double x) {
    switch (p) {
        case Profile::constant:
            return 1.0;
        case Profile::sine_squared: {
            const double s = std::sin(std::numbers::pi * x);
            return s * s;
        }
    }
    return 0.0;
}

Observable::Observable(int alphabet_size, int depth, std::vector<double> base, std::map<int, Complex> coefficients,
                       Profile profile)
    : alphabet_(alphabet_size),
      depth_(depth),
      base_(std::move(base)),
      coefficients_(std::move(coefficients)),
      profile_(profile) {
    if (base_.size() != cylinder_count(alphabet_, depth_)) {
        throw std::invalid_argument("observable base needs one value per depth-d cylinder");
    }
    for (const auto& [k, c] : coefficients_) {
        if (std::abs(coefficient(-k) - std::conj(c)) > 1e-14) {
            throw std::invalid_argument("observable is not real-valued: c_{-k} != conj(c_k) for k = " +
                                        std::to_string(k));
        }
    }
}

Observable Observable::uniform(int alphabet_size, std::map<int, Complex> coefficients, Profile profile) {
    return Observable(alphabet_size, 1, std::vector<double>(static_cast<std::size_t>(alphabet_size), 1.0),
                      std::move(coefficients), profile);
}

int Observable::max_k() const {
    int k = 0;
    for (const auto& [key, c] : coefficients_) {
        if (c != Complex(0.0)) k = std::max(k, std::abs(key));
    }
    return k;
}

Complex Observable::coefficient(int k) const {
    const auto it = coefficients_.find(k);
    return it == coefficients_.end() ? Complex(0.0) : it->second;
}

double Observable::base_on(const TransferModel& model, std::size_t cylinder) const {
    if (model.depth() < depth_ || model.table().alphabet_size != alphabet_) {
        throw std::invalid_argument("observable depth exceeds the transfer depth");
    }
    std::size_t div = 1;
    for (int i = depth_; i < model.depth(); ++i) div *= static_cast<std::size_t>(alphabet_ - 1);
    return base_[cylinder / div];
}

Observable Observable::combine(double a, const Observable& other, double b) const {
    if (other.depth_ != depth_ || other.profile_ != profile_ || other.alphabet_ != alphabet_) {
        throw std::invalid_argument("combined observables need equal depth and profile");
    }
    // A product of sums does not stay in the class, so only observables
    // sharing the base or sharing the coefficients can be combined.
    if (other.base_ == base_) {
        std::map<int, Complex> c = coefficients_;
        for (auto& [k, v] : c) v *= a;
        for (const auto& [k, v] : other.coefficients_) c[k] += b * v;
        return Observable(alphabet_, depth_, base_, std::move(c), profile_);
    }
    if (other.coefficients_ == coefficients_) {
        std::vector<double> base(base_.size());
        for (std::size_t i = 0; i < base.size(); ++i) base[i] = a * base_[i] + b * other.base_[i];
        return Observable(alphabet_, depth_, std::move(base), coefficients_, profile_);
    }
    throw std::invalid_argument("observables must share either the base or the coefficients");
}

Complex profile_transform(Profile p, double tau, Complex xi) {
    auto f = [&](double t) -> Complex { return profile_value(p, t / tau) * std::exp(-xi * t); };
    return Gauss::integrate(f, 0.0, tau);
}

Complex hat_phi(const Observable& obs, const TransferModel& model, Complex xi, int k_rep, std::size_t cylinder) {
    const double tau = model.table().tau.at(cylinder);
    return obs.coefficient(k_rep) * obs.base_on(model, cylinder) * profile_transform(obs.profile(), tau, xi);
}

CorrelationSeries upsilon(const TransferModel& model, const NormalizedWeights& weights, const Observable& phi,
                          const Observable& psi, const std::vector<double>& t, const UpsilonOptions& options) {
    const auto& table = model.table();
    const std::size_t n = model.size();
    const auto& tau = table.tau;
    const double tau_min = *std::min_element(tau.begin(), tau.end());
    const double tau_max = *std::max_element(tau.begin(), tau.end());
    const double h = options.grid_step;
    if (!(h > 0.0 && h < 0.5 * tau_min)) throw std::invalid_argument("sweep grid step must lie in (0, min tau / 2)");
    if (!std::is_sorted(t.begin(), t.end()) || (!t.empty() && t.front() < 0.0)) {
        throw std::invalid_argument("correlation times must be sorted and nonnegative");
    }
    const double horizon = options.horizon_factor * tau_min;
    if (!t.empty() && t.back() > horizon) {
        throw HorizonExceeded("t = " + std::to_string(t.back()) + " exceeds the horizon " + std::to_string(horizon));
    }

    CorrelationSeries out;
    out.t = t;
    out.upsilon.assign(t.size(), 0.0);
    out.upsilon0.assign(t.size(), 0.0);
    out.upsilon1.assign(t.size(), 0.0);
    const std::map<int, Complex> pairs = mode_pairs(phi, psi);
    if (pairs.empty() || t.empty()) return out;

    const std::vector<double> bphi = base_values(phi, model);
    const std::vector<double> bpsi = base_values(psi, model);
    const std::vector<double>& nu = weights.nu_u;

    // Haar pairing with no holonomy accumulated: sum of all Pair_k.
    double pair_sum = 0.0;
    for (const auto& [k, p] : pairs) pair_sum += p.real();

    // Same-cylinder part.
    for (std::size_t q = 0; q < t.size(); ++q) {
        double acc = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
            const double span = tau[b] - t[q];
            if (span <= 0.0 || bphi[b] == 0.0 || bpsi[b] == 0.0) continue;
            auto f = [&](double r) {
                return profile_value(psi.profile(), r / tau[b]) * profile_value(phi.profile(), (r + t[q]) / tau[b]);
            };
            acc += nu[b] * bpsi[b] * bphi[b] * Gauss::integrate(f, 0.0, span);
        }
        out.upsilon1[q] = pair_sum * acc;
    }

    // Gibbs Markov chain beta -> alpha = nu(alpha) L(alpha, beta) / nu(beta).
    const auto m = static_cast<std::size_t>(model.branching());
    const auto& cols = model.columns();
    std::vector<std::size_t> succ(n * m);
    std::vector<double> prob(n * m);
    std::vector<std::size_t> fill(n, 0);
    for (std::size_t row = 0; row < n; ++row) {
        for (std::size_t j = row * m; j < row * m + m; ++j) {
            const std::size_t beta = cols[j];
            const std::size_t slot = beta * m + fill[beta]++;
            succ[slot] = row;
            prob[slot] = nu[row] * std::exp(weights.f[j]) / nu[beta];
        }
    }

    const auto back = static_cast<long>(std::ceil(tau_max / h)) + 1;
    const auto last = static_cast<long>(std::floor(t.back() / h)) + 1;
    const auto ring_size = static_cast<std::size_t>(back + 3);

    // Time-ordered sweep over entry times T_j = j h. Mass entering a cylinder
    // is split linearly between the two neighbouring grid times.
    for (const auto& [k, pair] : pairs) {
        if (k < 0 && pairs.count(-k)) continue;  // folded into +|k| below
        const bool folded = k > 0 && pairs.count(-k);
        std::vector<Complex> phase(n);
        for (std::size_t b = 0; b < n; ++b) phase[b] = std::polar(1.0, -k * table.theta[b]);
        std::vector<Complex> ring(ring_size * n, Complex{});
        std::vector<Complex> acc(t.size(), Complex{});
        std::vector<Complex> mass(n);
        for (long j = -back; j <= last; ++j) {
            const double T = static_cast<double>(j) * h;
            Complex* slot = &ring[static_cast<std::size_t>((j % static_cast<long>(ring_size) + ring_size) % ring_size) * n];
            const auto first_out = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), T) - t.begin());
            for (std::size_t a = 0; a < n; ++a) {
                const Complex arrived = slot[a];
                slot[a] = Complex{};
                if (arrived != Complex{} && bphi[a] != 0.0) {
                    for (std::size_t q = first_out; q < t.size() && t[q] < T + tau[a]; ++q) {
                        acc[q] += arrived * bphi[a] * profile_value(phi.profile(), (t[q] - T) / tau[a]);
                    }
                }
                mass[a] = arrived;
                if (j <= 0 && T > -tau[a]) mass[a] += nu[a] * bpsi[a] * profile_value(psi.profile(), -T / tau[a]) * h;
            }
            for (std::size_t b = 0; b < n; ++b) {
                if (mass[b] == Complex{}) continue;
                const double x = (T + tau[b]) / h;
                const auto lo = static_cast<long>(std::floor(x));
                if (lo > last) continue;
                const double frac = x - static_cast<double>(lo);
                const Complex moved = mass[b] * phase[b];
                Complex* s0 = &ring[static_cast<std::size_t>(lo % static_cast<long>(ring_size)) * n];
                Complex* s1 = &ring[static_cast<std::size_t>((lo + 1) % static_cast<long>(ring_size)) * n];
                for (std::size_t i = b * m; i < b * m + m; ++i) {
                    const Complex w = moved * prob[i];
                    s0[succ[i]] += (1.0 - frac) * w;
                    s1[succ[i]] += frac * w;
                }
            }
        }
        for (std::size_t q = 0; q < t.size(); ++q) {
            out.upsilon0[q] += folded ? 2.0 * (pair * acc[q]).real() : (pair * acc[q]).real();
        }
    }
    for (std::size_t q = 0; q < t.size(); ++q) out.upsilon[q] = out.upsilon0[q] + out.upsilon1[q];
    return out;
}

LaplaceSeries laplace_series(const TransferModel& model, const NormalizedWeights& weights, const Observable& phi,
                             const Observable& psi, Complex xi, int k_terms) {
    if (!(xi.real() > 0.0)) throw std::invalid_argument("laplace series needs Re xi > 0");
    if (k_terms < 10) throw std::invalid_argument("laplace series needs at least 10 terms");
    const auto& table = model.table();
    const std::size_t n = model.size();
    const auto m = static_cast<std::size_t>(model.branching());
    const auto& cols = model.columns();
    const std::vector<double> bphi = base_values(phi, model);
    const std::vector<double> bpsi = base_values(psi, model);
    std::vector<Complex> iphi(n), ipsi(n);
    for (std::size_t i = 0; i < n; ++i) {
        iphi[i] = weights.nu_u[i] * bphi[i] * profile_transform(phi.profile(), table.tau[i], xi);
        ipsi[i] = bpsi[i] * profile_transform(psi.profile(), table.tau[i], -xi);
    }

    std::vector<Complex> terms(static_cast<std::size_t>(k_terms), Complex{});
    std::vector<Complex> v, next(n);
    for (const auto& [k, pair] : mode_pairs(phi, psi)) {
        // lambda_a M_{xi,k} has entries exp(f_0) e^{-xi tau_beta - i k theta_beta}.
        std::vector<Complex> col(n);
        for (std::size_t b = 0; b < n; ++b) col[b] = std::exp(-xi * table.tau[b] - Complex(0.0, k * table.theta[b]));
        std::vector<Complex> vals(cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) vals[j] = std::exp(weights.f[j]) * col[cols[j]];
        v = ipsi;
        for (int step = 0; step < k_terms; ++step) {
            for (std::size_t row = 0; row < n; ++row) {
                Complex acc{};
                for (std::size_t j = row * m; j < row * m + m; ++j) acc += vals[j] * v[cols[j]];
                next[row] = acc;
            }
            std::swap(v, next);
            Complex term{};
            for (std::size_t i = 0; i < n; ++i) term += iphi[i] * v[i];
            terms[static_cast<std::size_t>(step)] += pair * term;
        }
    }

    LaplaceSeries out;
    out.terms = k_terms;
    for (const Complex& c : terms) out.value += c;
    out.last_term = terms.back();
    const double last = std::abs(terms[terms.size() - 1]);
    const double prev = std::abs(terms[terms.size() - 2]);
    if (last > 0.0 && prev > 0.0) {
        const double r = last / prev;
        if (r >= 1.0) {
            throw Divergence("laplace series terms are not decreasing (ratio " + std::to_string(r) + ")");
        }
        out.tail_estimate = last * r / (1.0 - r);
    }
    return out;
}

Complex laplace_transform(const std::vector<double>& t, const std::vector<double>& f, Complex xi) {
    if (t.size() != f.size() || t.size() < 2) throw std::invalid_argument("laplace transform needs matching samples");
    Complex acc{};
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        acc += 0.5 * (t[i + 1] - t[i]) * (std::exp(-xi * t[i]) * f[i] + std::exp(-xi * t[i + 1]) * f[i + 1]);
    }
    return acc;
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& f, double t_min) {
    if (t.size() != f.size()) throw std::invalid_argument("decay fit needs matching samples");
    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] > t_min && std::abs(f[i]) > 1e-13) window.push_back(i);
    }
    if (window.size() < 10) {
        throw InsufficientDecayWindow("only " + std::to_string(window.size()) + " usable points beyond t = " +
                                      std::to_string(t_min));
    }
    bool sign_change = false;
    for (std::size_t i = 1; i < window.size(); ++i) {
        if ((f[window[i]] > 0.0) != (f[window[0]] > 0.0)) sign_change = true;
    }

    std::vector<double> xs, ys;
    if (!sign_change) {
        for (std::size_t i : window) {
            xs.push_back(t[i]);
            ys.push_back(std::log(std::abs(f[i])));
        }
    } else {
        // Local maxima of |f| inside the window, refined by the parabola
        // through the neighbouring samples.
        for (std::size_t w = 1; w + 1 < window.size(); ++w) {
            const std::size_t i = window[w];
            if (window[w - 1] != i - 1 || window[w + 1] != i + 1) continue;
            const double y0 = std::abs(f[i - 1]), y1 = std::abs(f[i]), y2 = std::abs(f[i + 1]);
            if (!(y1 >= y0 && y1 > y2)) continue;
            const double denom = y0 - 2.0 * y1 + y2;
            double shift = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
            shift = std::clamp(shift, -0.5, 0.5);
            const double step = 0.5 * (t[i + 1] - t[i - 1]);
            xs.push_back(t[i] + shift * step);
            ys.push_back(std::log(y1 - 0.25 * (y0 - y2) * shift));
        }
        if (xs.size() < 3) {
            throw InsufficientDecayWindow("fewer than three envelope peaks beyond t = " + std::to_string(t_min));
        }
    }

    const double count = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= count;
    my /= count;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - intercept - slope * xs[i];
        ss += r * r;
    }
    DecayFit fit;
    fit.eta_est = -slope;
    fit.amplitude = std::exp(intercept);
    const double span = xs.back() - xs.front();
    fit.fit_residual = std::sqrt(ss / count) / std::max(std::abs(slope) * span, 1e-300);
    fit.used_peaks = sign_change;
    fit.points = xs.size();
    return fit;
}

double li_exp(double y) {
    static const double offset = boost::math::expint(std::log(2.0));
    return boost::math::expint(y) - offset;
}

std::vector<EquidistributionRow> holonomy_equidistribution(const SchottkyScheme& scheme, double delta,
                                                           const std::vector<double>& T_values,
                                                           std::size_t max_classes) {
    if (T_values.empty()) return {};
    std::vector<double> Ts = T_values;
    std::sort(Ts.begin(), Ts.end());
    const std::vector<GeodesicClass> classes = closed_geodesics(scheme, Ts.back(), max_classes);
    std::vector<EquidistributionRow> rows;
    Complex s1{}, s2{}, s3{};
    std::size_t i = 0;
    for (double T : Ts) {
        while (i < classes.size() && classes[i].length <= T) {
            const double angle = classes[i].angle;
            s1 += std::polar(1.0, angle);
            s2 += std::polar(1.0, 2.0 * angle);
            s3 += std::polar(1.0, 3.0 * angle);
            ++i;
        }
        EquidistributionRow row;
        row.T = T;
        row.count = 2 * i;
        if (i > 0) {
            const double c = static_cast<double>(i);
            row.s1 = std::abs(s1) / c;
            row.s2 = std::abs(s2) / c;
            row.s3 = std::abs(s3) / c;
        }
        const double y = delta * T;
        row.li_ratio = y > std::log(2.0) ? static_cast<double>(row.count) / li_exp(y) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace frameflow
