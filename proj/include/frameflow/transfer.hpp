#pragma once

#include <cstddef>
#include <vector>

#include "frameflow/coding.hpp"

namespace frameflow {

/// xi = a + ib and the SO(2) character index; (b, k_rep) = (0, 0) is untwisted.
struct TwistParams {
    double a = 0.0;
    double b = 0.0;
    int k_rep = 0;
};

enum class MatrixMode { raw, normalized };

/// Sparse transfer matrix on depth-D cylinders. Row alpha holds the
/// 2r - 1 preimage cylinders (x, alpha_0 .. alpha_{D-2}) in increasing x;
/// rows and columns follow the lexicographic WordIndex order.
struct TransferMatrix {
    int depth = 0;
    MatrixMode mode = MatrixMode::raw;
    /// Exponent s for raw matrices; a for normalized ones.
    double exponent = 0.0;
    TwistParams params;
    std::size_t size = 0;
    int branching = 0;
    std::vector<std::size_t> columns;
    std::vector<Complex> values;

    /// out = M in
    void apply(const std::vector<Complex>& in, std::vector<Complex>& out) const;
    void apply(const std::vector<double>& in, std::vector<double>& out) const;
    /// out = M^T in (transpose, no conjugation)
    void apply_transpose(const std::vector<double>& in, std::vector<double>& out) const;
    void apply_transpose(const std::vector<Complex>& in, std::vector<Complex>& out) const;

    bool is_real() const;
};

struct RPFData {
    double lambda = 0.0;
    std::vector<double> h;
    std::vector<double> nu;
    double residual_right = 0.0;
    double residual_left = 0.0;
    /// Relative difference between the right and left eigenvalue estimates.
    double duality_gap = 0.0;
    int iterations = 0;
};

struct NormalizedWeights {
    int depth = 0;
    double delta = 0.0;
    double a = 0.0;
    double lambda_a = 1.0;
    /// Right eigenvector of the raw operator at s = delta, with sum(nu0 h0) = 1.
    std::vector<double> h0;
    /// Fixed measure of the normalized operator at a = 0: nu0 * h0.
    std::vector<double> nu_u;
    /// f(alpha, beta) per row slot, same layout as TransferMatrix::values.
    std::vector<double> f;
};

/// Cylinder data plus the symbolic structure needed to assemble transfer
/// matrices at any parameter. Immutable once built.
class TransferModel {
public:
    TransferModel(const SchottkyScheme& scheme, int depth, std::size_t capacity = kDefaultCapacity);
    /// Model over prescribed per-cylinder cocycles (mock systems).
    explicit TransferModel(CylinderTable table);

    const CylinderTable& table() const { return table_; }
    int depth() const { return table_.depth; }
    std::size_t size() const { return table_.size(); }
    int branching() const { return table_.alphabet_size - 1; }
    const std::vector<std::size_t>& columns() const { return columns_; }

    /// Copy whose holonomy angles carry the coboundary phi(prefix(sigma beta)) -
    /// phi(prefix(beta)), phi given on depth-(D-1) prefixes (depth-1 for D = 1).
    TransferModel regauged(const std::vector<double>& phi) const;

private:
    CylinderTable table_;
    std::vector<std::size_t> columns_;
};

/// Raw entry exp((-s + ib) tau_beta - i k theta_beta).
TransferMatrix assemble_raw(const TransferModel& model, double s, double b = 0.0, int k_rep = 0);

/// Normalized entry exp(f(alpha, beta) + i b tau_beta - i k theta_beta).
TransferMatrix assemble_normalized(const TransferModel& model, const NormalizedWeights& weights,
                                   double b = 0.0, int k_rep = 0);

TransferMatrix assemble(const TransferModel& model, MatrixMode mode, double exponent,
                        const TwistParams& params, const NormalizedWeights* weights = nullptr);

struct RPFOptions {
    double tolerance = 1e-13;
    int max_iterations = 100000;
    const std::vector<double>* initial_right = nullptr;
    const std::vector<double>* initial_left = nullptr;
};

/// Power iteration for the leading eigendata of a nonnegative real matrix.
/// Throws NoConvergence carrying the last residuals.
RPFData rpf(const TransferMatrix& m, const RPFOptions& options = {});

/// Modulus of the second eigenvalue by power iteration on the complement of
/// the leading eigenvector.
double second_eigenvalue_modulus(const TransferMatrix& m, const RPFData& leading, int iterations = 2000);

double pressure(const TransferModel& model, double s);
double pressure(const SchottkyScheme& scheme, int depth, double s);

/// Root of s -> P(s) on [0, 2]; throws BracketFailure if P(0) and P(2) do not
/// straddle zero.
double dimension(const TransferModel& model, double tol = 1e-12);
double dimension(const SchottkyScheme& scheme, int depth, double tol = 1e-12);

NormalizedWeights normalize(const TransferModel& model, double delta, double a = 0.0);

/// nu-weighted two-norm.
double weighted_norm(const std::vector<Complex>& v, const std::vector<double>& nu);

/// log ||M^j H0||_2 for j = 1..n, renormalizing at every step.
std::vector<double> iterate_log_norms(const TransferMatrix& m, const std::vector<double>& nu,
                                      std::vector<Complex> h0, int n);

/// ||M^j H0||_2 for j = 1..n with M the normalized operator at params.
std::vector<double> iterate_decay(const TransferModel& model, const NormalizedWeights& weights,
                                  const TwistParams& params, const std::vector<Complex>& h0, int n);

/// Seeded complex vector with unit nu-weighted norm.
std::vector<Complex> random_unit_vector(std::size_t n, const std::vector<double>& nu, std::uint64_t seed);

/// Surrogate for the representation norm: max(|b|, |k|).
double norm_rho_b(double b, int k_rep);

/// ||H||_inf + Lipschitz estimate over sibling cylinders / max(1, norm_rho_b).
double c1_norm(const TransferModel& model, const std::vector<Complex>& h, double b, int k_rep);

/// Largest |log h(alpha) - log h(alpha')| over cylinders sharing a parent.
double log_regularity(const TransferModel& model, const std::vector<double>& h);

/// Constant return time c and zero holonomy on every depth-k cylinder.
CylinderTable mock_full_shift(int alphabet_size, int depth, double c);

}  // namespace frameflow
