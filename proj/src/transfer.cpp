#include "frameflow/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "frameflow/errors.hpp"

namespace frameflow {

namespace {

std::vector<std::size_t> build_columns(int alphabet, int depth) {
    const WordIndex idx(alphabet, depth);
    const auto m = static_cast<std::size_t>(alphabet - 1);
    std::vector<std::size_t> cols(idx.count() * m);
    for (std::size_t row = 0; row < idx.count(); ++row) idx.preimages(row, &cols[row * m]);
    return cols;
}

double max_abs(const std::vector<double>& v) {
    double best = 0.0;
    for (double x : v) best = std::max(best, std::abs(x));
    return best;
}

struct PowerResult {
    double lambda = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Power iteration with Collatz-Wielandt bounds; v is updated in place and
// ends normalized to unit sup norm.
template <typename Apply>
PowerResult power_iterate(Apply&& apply, std::vector<double>& v, double tol, int max_iter) {
    std::vector<double> w(v.size());
    PowerResult out;
    double scale = max_abs(v);
    for (double& x : v) x /= scale;
    for (int it = 1; it <= max_iter; ++it) {
        apply(v, w);
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double r = w[i] / v[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        scale = max_abs(w);
        if (!(scale > 0.0) || !std::isfinite(scale)) break;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w[i] / scale;
        out.lambda = 0.5 * (lo + hi);
        out.iterations = it;
        if (hi - lo <= tol * hi) {
            out.converged = true;
            break;
        }
    }
    return out;
}

double residual(const std::vector<double>& v, const std::vector<double>& mv, double lambda) {
    double r = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) r = std::max(r, std::abs(mv[i] - lambda * v[i]));
    return r / max_abs(v);
}

}  // namespace

void TransferMatrix::apply(const std::vector<Complex>& in, std::vector<Complex>& out) const {
    out.assign(size, Complex{});
    const auto m = static_cast<std::size_t>(branching);
    for (std::size_t row = 0; row < size; ++row) {
        Complex acc{};
        for (std::size_t j = row * m; j < row * m + m; ++j) acc += values[j] * in[columns[j]];
        out[row] = acc;
    }
}

void TransferMatrix::apply(const std::vector<double>& in, std::vector<double>& out) const {
    out.assign(size, 0.0);
    const auto m = static_cast<std::size_t>(branching);
    for (std::size_t row = 0; row < size; ++row) {
        double acc = 0.0;
        for (std::size_t j = row * m; j < row * m + m; ++j) acc += values[j].real() * in[columns[j]];
        out[row] = acc;
    }
}

void TransferMatrix::apply_transpose(const std::vector<double>& in, std::vector<double>& out) const {
    out.assign(size, 0.0);
    const auto m = static_cast<std::size_t>(branching);
    for (std::size_t row = 0; row < size; ++row) {
        for (std::size_t j = row * m; j < row * m + m; ++j) out[columns[j]] += values[j].real() * in[row];
    }
}

void TransferMatrix::apply_transpose(const std::vector<Complex>& in, std::vector<Complex>& out) const {
    out.assign(size, Complex{});
    const auto m = static_cast<std::size_t>(branching);
    for (std::size_t row = 0; row < size; ++row) {
        for (std::size_t j = row * m; j < row * m + m; ++j) out[columns[j]] += values[j] * in[row];
    }
}

bool TransferMatrix::is_real() const {
    return std::all_of(values.begin(), values.end(), [](Complex v) { return v.imag() == 0.0; });
}

TransferModel::TransferModel(const SchottkyScheme& scheme, int depth, std::size_t capacity)
    : TransferModel(cylinders(scheme, depth, capacity)) {}

TransferModel::TransferModel(CylinderTable table) : table_(std::move(table)) {
    if (table_.alphabet_size < 3) throw ValidationError("transfer operators need an alphabet of at least 3 symbols");
    columns_ = build_columns(table_.alphabet_size, table_.depth);
}

TransferModel TransferModel::regauged(const std::vector<double>& phi) const {
    const int depth = table_.depth;
    if (depth < 2) throw std::invalid_argument("regauging needs depth >= 2");
    const WordIndex coarse(table_.alphabet_size, depth - 1);
    if (phi.size() != coarse.count()) throw std::invalid_argument("regauge function has the wrong size");
    const auto m = static_cast<std::size_t>(branching());
    TransferModel out = *this;
    for (std::size_t i = 0; i < size(); ++i) {
        const auto& s = table_.symbols;
        std::vector<Symbol> tail(s.begin() + static_cast<std::ptrdiff_t>(i * depth + 1),
                                 s.begin() + static_cast<std::ptrdiff_t>((i + 1) * depth));
        const std::size_t shifted = coarse.index(Word(std::move(tail)));
        out.table_.theta[i] = wrap_angle(table_.theta[i] + phi[shifted] - phi[i / m]);
    }
    return out;
}

TransferMatrix assemble_raw(const TransferModel& model, double s, double b, int k_rep) {
    TransferMatrix mat;
    mat.depth = model.depth();
    mat.mode = MatrixMode::raw;
    mat.exponent = s;
    mat.params = {0.0, b, k_rep};
    mat.size = model.size();
    mat.branching = model.branching();
    mat.columns = model.columns();
    const auto& t = model.table();
    std::vector<Complex> weight(mat.size);
    for (std::size_t i = 0; i < mat.size; ++i) {
        const double mod = std::exp(-s * t.tau[i]);
        weight[i] = (b == 0.0 && k_rep == 0) ? Complex(mod, 0.0)
                                             : std::polar(mod, b * t.tau[i] - k_rep * t.theta[i]);
    }
    mat.values.resize(mat.columns.size());
    for (std::size_t j = 0; j < mat.columns.size(); ++j) mat.values[j] = weight[mat.columns[j]];
    return mat;
}

TransferMatrix assemble_normalized(const TransferModel& model, const NormalizedWeights& weights, double b,
                                   int k_rep) {
    if (weights.depth != model.depth() || weights.f.size() != model.columns().size()) {
        throw std::invalid_argument("normalized weights do not match the transfer model");
    }
    TransferMatrix mat;
    mat.depth = model.depth();
    mat.mode = MatrixMode::normalized;
    mat.exponent = weights.a;
    mat.params = {weights.a, b, k_rep};
    mat.size = model.size();
    mat.branching = model.branching();
    mat.columns = model.columns();
    const auto& t = model.table();
    mat.values.resize(mat.columns.size());
    for (std::size_t j = 0; j < mat.columns.size(); ++j) {
        const std::size_t beta = mat.columns[j];
        const double mod = std::exp(weights.f[j]);
        mat.values[j] = (b == 0.0 && k_rep == 0) ? Complex(mod, 0.0)
                                                 : std::polar(mod, b * t.tau[beta] - k_rep * t.theta[beta]);
    }
    return mat;
}

TransferMatrix assemble(const TransferModel& model, MatrixMode mode, double exponent, const TwistParams& params,
                        const NormalizedWeights* weights) {
    if (mode == MatrixMode::raw) return assemble_raw(model, exponent, params.b, params.k_rep);
    if (weights == nullptr) throw std::invalid_argument("normalized assembly needs normalized weights");
    return assemble_normalized(model, *weights, params.b, params.k_rep);
}

RPFData rpf(const TransferMatrix& m, const RPFOptions& options) {
    if (!m.is_real()) throw std::invalid_argument("rpf needs an untwisted (real) matrix");
    for (Complex v : m.values) {
        if (v.real() < 0.0) throw std::invalid_argument("rpf needs a nonnegative matrix");
    }
    RPFData out;
    out.h = options.initial_right ? *options.initial_right : std::vector<double>(m.size, 1.0);
    out.nu = options.initial_left ? *options.initial_left : std::vector<double>(m.size, 1.0);
    for (auto* v : {&out.h, &out.nu}) {
        if (v->size() != m.size) v->assign(m.size, 1.0);
        for (double& x : *v) x = std::max(x, 1e-300);
    }

    auto right = [&](const std::vector<double>& in, std::vector<double>& o) { m.apply(in, o); };
    auto left = [&](const std::vector<double>& in, std::vector<double>& o) { m.apply_transpose(in, o); };
    const PowerResult r = power_iterate(right, out.h, options.tolerance, options.max_iterations);
    const PowerResult l = power_iterate(left, out.nu, options.tolerance, options.max_iterations);

    std::vector<double> tmp;
    m.apply(out.h, tmp);
    out.residual_right = residual(out.h, tmp, r.lambda);
    m.apply_transpose(out.nu, tmp);
    out.residual_left = residual(out.nu, tmp, l.lambda);
    out.lambda = r.lambda;
    out.iterations = std::max(r.iterations, l.iterations);
    out.duality_gap = std::abs(r.lambda - l.lambda) / std::max(r.lambda, 1e-300);
    if (!r.converged || !l.converged) {
        throw NoConvergence("power iteration did not converge after " + std::to_string(out.iterations) +
                                " iterations",
                            out.residual_right, out.residual_left);
    }

    double mass = 0.0;
    for (double x : out.nu) mass += x;
    for (double& x : out.nu) x /= mass;
    double pairing = 0.0;
    for (std::size_t i = 0; i < m.size; ++i) pairing += out.nu[i] * out.h[i];
    for (double& x : out.h) x /= pairing;
    return out;
}

double second_eigenvalue_modulus(const TransferMatrix& m, const RPFData& leading, int iterations) {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(m.size), w;
    for (double& x : v) x = u(rng);
    auto project = [&](std::vector<double>& x) {
        double c = 0.0;
        for (std::size_t i = 0; i < m.size; ++i) c += leading.nu[i] * x[i];
        double norm = 0.0;
        for (std::size_t i = 0; i < m.size; ++i) {
            x[i] -= c * leading.h[i];
            norm += x[i] * x[i];
        }
        return std::sqrt(norm);
    };
    double n0 = project(v);
    for (double& x : v) x /= n0;
    const int burn = iterations / 2;
    double log_growth = 0.0;
    for (int it = 0; it < iterations; ++it) {
        m.apply(v, w);
        const double n = project(w);
        if (n == 0.0) return 0.0;
        if (it >= burn) log_growth += std::log(n);
        for (std::size_t i = 0; i < m.size; ++i) v[i] = w[i] / n;
    }
    return std::exp(log_growth / (iterations - burn));
}

double pressure(const TransferModel& model, double s) { return std::log(rpf(assemble_raw(model, s)).lambda); }

double pressure(const SchottkyScheme& scheme, int depth, double s) {
    scheme.require_valid();
    return pressure(TransferModel(scheme, depth), s);
}

double dimension(const TransferModel& model, double tol) {
    std::vector<double> h, nu;
    auto P = [&](double s) {
        RPFOptions opt;
        if (!h.empty()) {
            opt.initial_right = &h;
            opt.initial_left = &nu;
        }
        const RPFData d = rpf(assemble_raw(model, s), opt);
        h = d.h;
        nu = d.nu;
        return std::log(d.lambda);
    };
    double lo = 0.0, hi = 2.0;
    double plo = P(lo), phi = P(hi);
    if (!(plo > 0.0 && phi < 0.0)) {
        throw BracketFailure("pressure does not change sign on [0, 2]: P(0) = " + std::to_string(plo) +
                             ", P(2) = " + std::to_string(phi));
    }
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        const double pm = P(mid);
        if (pm == 0.0) return mid;
        (pm > 0.0 ? lo : hi) = mid;
        (pm > 0.0 ? plo : phi) = pm;
    }
    // Secant polish, falling back to bisection if a step leaves the bracket.
    double x0 = lo, f0 = plo, x1 = hi, f1 = phi;
    for (int it = 0; it < 100; ++it) {
        double x = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        const double fx = P(x);
        if (std::abs(fx) < tol) return x;
        (fx > 0.0 ? lo : hi) = x;
        x0 = x1;
        f0 = f1;
        x1 = x;
        f1 = fx;
        if (hi - lo < 1e-15) return x;
    }
    throw NoConvergence("dimension root-find did not reach the pressure tolerance", 0.0, 0.0);
}

double dimension(const SchottkyScheme& scheme, int depth, double tol) {
    scheme.require_valid();
    return dimension(TransferModel(scheme, depth), tol);
}

NormalizedWeights normalize(const TransferModel& model, double delta, double a) {
    const RPFData base = rpf(assemble_raw(model, delta));
    double lambda_a = base.lambda;
    if (a != 0.0) {
        RPFOptions opt;
        opt.initial_right = &base.h;
        opt.initial_left = &base.nu;
        lambda_a = rpf(assemble_raw(model, delta + a), opt).lambda;
    }
    NormalizedWeights w;
    w.depth = model.depth();
    w.delta = delta;
    w.a = a;
    w.lambda_a = lambda_a;
    w.h0 = base.h;
    w.nu_u.resize(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) w.nu_u[i] = base.nu[i] * base.h[i];
    const auto& cols = model.columns();
    const auto m = static_cast<std::size_t>(model.branching());
    const auto& tau = model.table().tau;
    w.f.resize(cols.size());
    const double log_lambda = std::log(lambda_a);
    for (std::size_t row = 0; row < model.size(); ++row) {
        const double log_row = std::log(base.h[row]);
        for (std::size_t j = row * m; j < row * m + m; ++j) {
            const std::size_t beta = cols[j];
            w.f[j] = -(a + delta) * tau[beta] + std::log(base.h[beta]) - log_row - log_lambda;
        }
    }
    return w;
}

double weighted_norm(const std::vector<Complex>& v, const std::vector<double>& nu) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += nu[i] * std::norm(v[i]);
    return std::sqrt(s);
}

std::vector<double> iterate_log_norms(const TransferMatrix& m, const std::vector<double>& nu,
                                      std::vector<Complex> h0, int n) {
    if (h0.size() != m.size) throw std::invalid_argument("initial vector has the wrong size");
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(std::max(n, 0)));
    std::vector<Complex> next;
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) {
        m.apply(h0, next);
        const double norm = weighted_norm(next, nu);
        if (norm == 0.0) {
            logs.resize(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
            return logs;
        }
        acc += std::log(norm);
        logs.push_back(acc);
        for (std::size_t i = 0; i < next.size(); ++i) h0[i] = next[i] / norm;
    }
    return logs;
}

std::vector<double> iterate_decay(const TransferModel& model, const NormalizedWeights& weights,
                                  const TwistParams& params, const std::vector<Complex>& h0, int n) {
    const TransferMatrix m = assemble_normalized(model, weights, params.b, params.k_rep);
    std::vector<double> out = iterate_log_norms(m, weights.nu_u, h0, n);
    for (double& x : out) x = std::exp(x);
    return out;
}

std::vector<Complex> random_unit_vector(std::size_t n, const std::vector<double>& nu, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> v(n);
    for (auto& x : v) {
        const double re = u(rng);
        x = Complex(re, u(rng));
    }
    const double norm = weighted_norm(v, nu);
    for (auto& x : v) x /= norm;
    return v;
}

double norm_rho_b(double b, int k_rep) { return std::max(std::abs(b), std::abs(static_cast<double>(k_rep))); }

double c1_norm(const TransferModel& model, const std::vector<Complex>& h, double b, int k_rep) {
    const auto m = static_cast<std::size_t>(model.branching());
    const auto& rep = model.table().representative;
    double sup = 0.0, lip = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) sup = std::max(sup, std::abs(h[i]));
    if (model.depth() >= 2) {
        for (std::size_t g = 0; g < h.size(); g += m) {
            for (std::size_t i = g; i < g + m; ++i) {
                for (std::size_t j = i + 1; j < g + m; ++j) {
                    const double dist = std::abs(rep[i] - rep[j]);
                    if (dist > 0.0) lip = std::max(lip, std::abs(h[i] - h[j]) / dist);
                }
            }
        }
    }
    return sup + lip / std::max(1.0, norm_rho_b(b, k_rep));
}

double log_regularity(const TransferModel& model, const std::vector<double>& h) {
    if (model.depth() < 2) return 0.0;
    const auto m = static_cast<std::size_t>(model.branching());
    double worst = 0.0;
    for (std::size_t g = 0; g < h.size(); g += m) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = g; i < g + m; ++i) {
            lo = std::min(lo, std::log(h[i]));
            hi = std::max(hi, std::log(h[i]));
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

CylinderTable mock_full_shift(int alphabet_size, int depth, double c) {
    const WordIndex idx(alphabet_size, depth);
    CylinderTable t;
    t.alphabet_size = alphabet_size;
    t.depth = depth;
    t.representative.resize(idx.count());
    t.tau.assign(idx.count(), c);
    t.theta.assign(idx.count(), 0.0);
    t.symbols.resize(idx.count() * static_cast<std::size_t>(depth));
    for (std::size_t i = 0; i < idx.count(); ++i) {
        const Word w = idx.word(i);
        for (int j = 0; j < depth; ++j) t.symbols[i * depth + j] = static_cast<std::uint8_t>(w[j]);
        t.representative[i] = Complex(static_cast<double>(i), 0.0);
    }
    return t;
}

}  // namespace frameflow
