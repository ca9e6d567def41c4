#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "frameflow/coding.hpp"
#include "frameflow/correlation.hpp"
#include "frameflow/errors.hpp"

namespace frameflow {

/// Malformed or out-of-range configuration.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

struct ObservableSpec {
    /// Coefficients for k >= 0; negative modes follow by conjugation.
    std::map<int, Complex> coefficients{{0, Complex(1.0)}};
    int base_depth = 1;
    /// Empty means identically one.
    std::vector<double> base;
    Profile profile = Profile::sine_squared;
};

struct RunConfig {
    /// Fixture name or empty when generators are given explicitly.
    std::string fixture;
    std::vector<Generator> generators;

    int depth = 8;
    std::uint64_t seed = 1;
    int threads = 1;
    std::size_t capacity = kDefaultCapacity;
    double tolerance = 1e-12;
    std::filesystem::path output = "out";

    double pressure_s_min = 0.0;
    double pressure_s_max = 1.0;
    int pressure_points = 21;

    std::vector<double> gap_b{0, 1, -1, 5, -5, 20, -20};
    std::vector<int> gap_k{0, 1, -1, 3, -3};
    int gap_iterations = 200;
    double gap_threshold = 0.0;

    std::vector<double> stability_a{-0.05, -0.025, 0.0, 0.025, 0.05};
    double stability_b = 5.0;
    int stability_k = 1;

    int lnic_m2 = 3;
    int lnic_samples = 64;
    std::vector<double> lnic_omegas;

    std::size_t ncp_points = 200000;
    int ncp_word_length = 40;
    int ncp_centers = 16;
    std::vector<double> ncp_eps{0.05, 0.01};
    int ncp_directions = 8;

    int correlation_depth = 6;
    double correlation_t_max = 30.0;
    double correlation_t_step = 0.05;
    double correlation_grid_step = 0.01;
    double correlation_xi = 0.5;
    int correlation_terms = 60;
    std::optional<double> correlation_t_min;
    ObservableSpec phi;
    ObservableSpec psi;

    std::vector<double> geodesic_T{10, 20, 30, 40};
    std::size_t geodesic_max_classes = 1000000;

    SchottkyScheme scheme() const;
    nlohmann::json to_json() const;
};

/// Throws ConfigError on unknown keys, wrong types or non-finite numbers.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Command-line style overrides (empty optionals are left alone).
struct Overrides {
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> depth;
    std::optional<int> threads;
};
void apply_overrides(RunConfig& cfg, const Overrides& o);

/// FRAMEFLOW_CONFIG / _OUT / _SEED / _DEPTH / _THREADS; flags win over these.
Overrides environment_overrides();
std::optional<std::filesystem::path> environment_config();

const std::vector<std::string>& commands();

/// Exit code: 0 success, 2 validation or configuration failure, 3 numeric
/// non-convergence, 1 anything else. Diagnostics go to err.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& err);

/// Exit code for an exception escaping a command, with the same mapping.
int exit_code(const std::exception& e);

/// %.17g with "." separator regardless of locale.
std::string format_number(double x);

/// Writes to a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a(const std::string& bytes);

std::string version();

}  // namespace frameflow
