#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "frameflow/transfer.hpp"

namespace frameflow {

enum class Profile {
    constant,
    /// sin^2(pi x): smooth and vanishing at both ends of the roof interval.
    sine_squared,
};

double profile_value(Profile p, double x);

/// phi(u, m, t) = base(u) * sum_k c_k e^{ikm} * p(t / tau(u)), with base
/// constant on depth-d cylinders.
class Observable {
public:
    /// Throws std::invalid_argument unless c_{-k} = conj(c_k) for every k
    /// (within 1e-14) and the base has one value per depth-d cylinder.
    Observable(int alphabet_size, int depth, std::vector<double> base, std::map<int, Complex> coefficients,
               Profile profile = Profile::sine_squared);

    /// Base identically one on the depth-1 cylinders.
    static Observable uniform(int alphabet_size, std::map<int, Complex> coefficients,
                              Profile profile = Profile::sine_squared);

    int depth() const { return depth_; }
    int max_k() const;
    Profile profile() const { return profile_; }
    Complex coefficient(int k) const;
    const std::map<int, Complex>& coefficients() const { return coefficients_; }
    const std::vector<double>& base() const { return base_; }

    /// Base value on a cylinder of the model (which must be at least as deep).
    double base_on(const TransferModel& model, std::size_t cylinder) const;

    /// a * this + b * other (same base depth and profile).
    Observable combine(double a, const Observable& other, double b) const;

private:
    int alphabet_;
    int depth_;
    std::vector<double> base_;
    std::map<int, Complex> coefficients_;
    Profile profile_;
};

/// c_k * base * int_0^tau p(t / tau) e^{-xi t} dt by 32-point Gauss-Legendre.
Complex hat_phi(const Observable& obs, const TransferModel& model, Complex xi, int k_rep, std::size_t cylinder);

/// Same integral without c_k and base, for an explicit roof value.
Complex profile_transform(Profile p, double tau, Complex xi);

struct CorrelationSeries {
    std::vector<double> t;
    std::vector<double> upsilon;
    std::vector<double> upsilon0;
    std::vector<double> upsilon1;
};

struct UpsilonOptions {
    /// Entry-time grid spacing of the suspension sweep; must be below min tau.
    double grid_step = 0.01;
    /// Largest admissible t, as a multiple of min tau.
    double horizon_factor = 30.0;
};

/// Correlation of the suspension flow on the t grid, with nu_U on the base,
/// Haar measure on SO(2) and Lebesgue measure along the roof. upsilon1 is
/// the part where the flow stays in its starting cylinder; upsilon0 the rest.
CorrelationSeries upsilon(const TransferModel& model, const NormalizedWeights& weights, const Observable& phi,
                          const Observable& psi, const std::vector<double>& t, const UpsilonOptions& options = {});

struct LaplaceSeries {
    Complex value;
    Complex last_term;
    /// |last term| * r / (1 - r) with r the ratio of the last two terms.
    double tail_estimate = 0.0;
    int terms = 0;
};

/// sum_{n=1}^{K} sum_k c_k conj(d_k) <nu_U phi_hat_xi, (lambda_a M_{xi,k})^n psi_hat_{-xi}>,
/// the Laplace transform of upsilon0. Throws Divergence when terms grow.
LaplaceSeries laplace_series(const TransferModel& model, const NormalizedWeights& weights, const Observable& phi,
                             const Observable& psi, Complex xi, int k_terms);

/// Trapezoid rule for int e^{-xi t} f(t) dt over the sampled grid.
Complex laplace_transform(const std::vector<double>& t, const std::vector<double>& f, Complex xi);

struct DecayFit {
    double eta_est = 0.0;
    double amplitude = 0.0;
    double fit_residual = 0.0;
    bool used_peaks = false;
    std::size_t points = 0;
};

/// Slope of log|f| over t > t_min where |f| > 1e-13. Sign-changing input is
/// fitted through its local maxima of |f| (parabolic refinement).
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& f, double t_min);

/// li(e^y) = Ei(y) - Ei(log 2).
double li_exp(double y);

struct EquidistributionRow {
    double T = 0.0;
    /// Oriented primitive closed geodesics: two per unoriented class.
    std::size_t count = 0;
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    double li_ratio = 0.0;
};

std::vector<EquidistributionRow> holonomy_equidistribution(const SchottkyScheme& scheme, double delta,
                                                           const std::vector<double>& T_values,
                                                           std::size_t max_classes = kDefaultCapacity);

}  // namespace frameflow
