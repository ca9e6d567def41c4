#include "frameflow/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "frameflow/errors.hpp"
#include "frameflow/fixtures.hpp"
#include "frameflow/spectral.hpp"
#include "frameflow/transfer.hpp"

namespace frameflow {

using nlohmann::json;
namespace fs = std::filesystem;

std::string version() { return "1.0.0"; }

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw Error("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

// ---- config parsing ----

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw ConfigError("config " + where + ": " + what);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items()) {
        if (!ok.count(key)) bad(where, "unknown key '" + key + "'");
    }
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) bad(where, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) bad(where, "number is not finite");
    return x;
}

long long integer(const json& j, const std::string& where, long long lo, long long hi) {
    if (!j.is_number_integer()) bad(where, "expected an integer");
    const long long v = j.is_number_unsigned() && j.get<unsigned long long>() > static_cast<unsigned long long>(hi)
                            ? hi + 1
                            : j.get<long long>();
    if (v < lo || v > hi) bad(where, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

std::uint64_t unsigned_integer(const json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        bad(where, "expected a nonnegative integer");
    }
    return j.get<std::uint64_t>();
}

Complex complex_value(const json& j, const std::string& where) {
    if (j.is_number()) return {number(j, where), 0.0};
    if (!j.is_array() || j.size() != 2) bad(where, "expected a number or [re, im]");
    return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

std::vector<double> number_list(const json& j, const std::string& where) {
    if (!j.is_array()) bad(where, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

Disk disk_value(const json& j, const std::string& where) {
    check_keys(j, where, {"center", "radius"});
    if (!j.contains("center") || !j.contains("radius")) bad(where, "needs center and radius");
    const double r = number(j["radius"], where + ".radius");
    if (!(r > 0.0)) bad(where + ".radius", "must be positive");
    return Disk(complex_value(j["center"], where + ".center"), r);
}

Generator generator_value(const json& j, const std::string& where) {
    check_keys(j, where, {"source", "target", "radius", "matrix", "source_disk", "target_disk"});
    if (j.contains("matrix")) {
        if (j.contains("source") || j.contains("target") || j.contains("radius")) {
            bad(where, "give either pairing parameters or a matrix, not both");
        }
        if (!j.contains("source_disk") || !j.contains("target_disk")) {
            bad(where, "a matrix generator needs source_disk and target_disk");
        }
        const json& m = j["matrix"];
        if (!m.is_array() || m.size() != 2 || !m[0].is_array() || !m[1].is_array() || m[0].size() != 2 ||
            m[1].size() != 2) {
            bad(where + ".matrix", "expected [[a, b], [c, d]]");
        }
        try {
            const MoebiusMap map(complex_value(m[0][0], where + ".matrix"), complex_value(m[0][1], where + ".matrix"),
                                 complex_value(m[1][0], where + ".matrix"), complex_value(m[1][1], where + ".matrix"));
            return Generator{map, disk_value(j["source_disk"], where + ".source_disk"),
                             disk_value(j["target_disk"], where + ".target_disk")};
        } catch (const std::invalid_argument& e) {
            bad(where + ".matrix", e.what());
        }
    }
    if (j.contains("source_disk") || j.contains("target_disk")) bad(where, "disks are only used with a matrix");
    if (!j.contains("source") || !j.contains("target") || !j.contains("radius")) {
        bad(where, "a pairing needs source, target and radius");
    }
    const double r = number(j["radius"], where + ".radius");
    if (!(r > 0.0)) bad(where + ".radius", "must be positive");
    try {
        return pairing_generator(complex_value(j["source"], where + ".source"),
                                 complex_value(j["target"], where + ".target"), r);
    } catch (const std::invalid_argument& e) {
        bad(where, e.what());
    }
}

ObservableSpec observable_value(const json& j, const std::string& where) {
    check_keys(j, where, {"coefficients", "base", "base_depth", "profile"});
    ObservableSpec spec;
    if (j.contains("coefficients")) {
        const json& c = j["coefficients"];
        if (!c.is_object()) bad(where + ".coefficients", "expected an object keyed by k >= 0");
        spec.coefficients.clear();
        for (const auto& [key, value] : c.items()) {
            int k = 0;
            const auto res = std::from_chars(key.data(), key.data() + key.size(), k);
            if (res.ec != std::errc() || res.ptr != key.data() + key.size() || k < 0 || k > 64) {
                bad(where + ".coefficients", "key '" + key + "' is not an integer in [0, 64]");
            }
            const Complex v = complex_value(value, where + ".coefficients." + key);
            if (k == 0 && v.imag() != 0.0) bad(where + ".coefficients.0", "the k = 0 coefficient must be real");
            spec.coefficients[k] = v;
        }
    }
    if (j.contains("base_depth")) spec.base_depth = static_cast<int>(integer(j["base_depth"], where + ".base_depth", 1, 12));
    if (j.contains("base")) spec.base = number_list(j["base"], where + ".base");
    if (j.contains("profile")) {
        const json& p = j["profile"];
        if (p == "constant") {
            spec.profile = Profile::constant;
        } else if (p == "sine_squared") {
            spec.profile = Profile::sine_squared;
        } else {
            bad(where + ".profile", "expected \"constant\" or \"sine_squared\"");
        }
    }
    return spec;
}

json observable_json(const ObservableSpec& s) {
    json c = json::object();
    for (const auto& [k, v] : s.coefficients) c[std::to_string(k)] = json::array({v.real(), v.imag()});
    return {{"coefficients", c},
            {"base_depth", s.base_depth},
            {"base", s.base},
            {"profile", s.profile == Profile::constant ? "constant" : "sine_squared"}};
}

Observable build_observable(const ObservableSpec& s, int alphabet) {
    std::map<int, Complex> c;
    for (const auto& [k, v] : s.coefficients) {
        c[k] = v;
        if (k != 0) c[-k] = std::conj(v);
    }
    std::vector<double> base = s.base;
    const std::size_t count = cylinder_count(alphabet, s.base_depth);
    if (base.empty()) base.assign(count, 1.0);
    if (base.size() != count) {
        throw ConfigError("observable base needs " + std::to_string(count) + " values for depth " +
                          std::to_string(s.base_depth));
    }
    return Observable(alphabet, s.base_depth, std::move(base), std::move(c), s.profile);
}

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

template <class T>
T parse_env_number(const std::string& name, const std::string& text) {
    T v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ConfigError("environment variable " + name + " is not a valid integer: '" + text + "'");
    }
    return v;
}

// ---- output helpers ----

class Csv {
public:
    explicit Csv(std::initializer_list<const char*> header) {
        bool first = true;
        for (const char* h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << "\r\n";
    }
    Csv& field(const std::string& s) {
        sep();
        if (s.find_first_of(",\"\r\n") != std::string::npos) {
            out_ << '"';
            for (char c : s) out_ << (c == '"' ? std::string("\"\"") : std::string(1, c));
            out_ << '"';
        } else {
            out_ << s;
        }
        return *this;
    }
    Csv& num(double x) { return field(format_number(x)); }
    Csv& integer(long long x) { return field(std::to_string(x)); }
    void end() {
        out_ << "\r\n";
        fresh_ = true;
    }
    std::string str() const { return out_.str(); }

private:
    void sep() {
        if (!fresh_) out_ << ',';
        fresh_ = false;
    }
    std::ostringstream out_;
    bool fresh_ = true;
};

class Artifacts {
public:
    Artifacts(const RunConfig& cfg, std::string command) : cfg_(cfg), command_(std::move(command)) {
        fs::create_directories(cfg.output);
    }
    void write(const std::string& name, const std::string& content) {
        write_atomic(cfg_.output / name, content);
        files_.push_back(name);
    }
    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
    void finish() {
        const std::string canonical = cfg_.to_json().dump();
        char hash[17];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
        json manifest = {{"command", command_},
                         {"config_hash", std::string("fnv1a64:") + hash},
                         {"config", cfg_.to_json()},
                         {"seed", cfg_.seed},
                         {"depth", cfg_.depth},
                         {"files", files_},
                         {"versions",
                          {{"frameflow", version()},
                           {"compiler", __VERSION__},
                           {"cxx_standard", static_cast<long>(__cplusplus)}}}};
        write_atomic(cfg_.output / (command_ + ".manifest.json"), manifest.dump(2) + "\n");
    }

private:
    const RunConfig& cfg_;
    std::string command_;
    std::vector<std::string> files_;
};

json validation_json(const ValidationReport& r) {
    return {{"ok", r.ok},
            {"failures", r.failures},
            {"disjointness_margin", r.disjointness_margin},
            {"pairing_residuals", r.pairing_residuals},
            {"min_branch_derivative", r.min_branch_derivative},
            {"max_branch_derivative", r.max_branch_derivative},
            {"contraction_depth", r.contraction_depth}};
}

// ---- commands ----

int cmd_validate(const RunConfig& cfg, std::ostream& err) {
    Artifacts out(cfg, "validate");
    const ValidationReport report = cfg.scheme().validate();
    json j = validation_json(report);
    j["rank"] = cfg.scheme().rank();
    out.write_json("validation.json", j);
    out.finish();
    if (!report.ok) {
        for (const auto& f : report.failures) err << "validation: " << f << "\n";
        return 2;
    }
    return 0;
}

int cmd_dimension(const RunConfig& cfg, std::ostream&) {
    const SchottkyScheme scheme = cfg.scheme();
    scheme.require_valid();
    Artifacts out(cfg, "dimension");
    const TransferModel model(scheme, cfg.depth, cfg.capacity);
    const double delta = dimension(model, cfg.tolerance);
    const RPFData data = rpf(assemble_raw(model, delta));
    const NormalizedWeights w = normalize(model, delta);
    Csv csv({"cylinder_word", "h", "nu"});
    for (std::size_t i = 0; i < model.size(); ++i) {
        csv.field(model.table().word(i).to_string()).num(w.h0[i]).num(w.nu_u[i]);
        csv.end();
    }
    out.write("eigendata.csv", csv.str());
    out.write_json("dimension.json", {{"delta", delta},
                                      {"depth", cfg.depth},
                                      {"cylinders", model.size()},
                                      {"lambda", data.lambda},
                                      {"residual_right", data.residual_right},
                                      {"residual_left", data.residual_left},
                                      {"iterations", data.iterations}});
    out.finish();
    return 0;
}

int cmd_pressure_curve(const RunConfig& cfg, std::ostream&) {
    const SchottkyScheme scheme = cfg.scheme();
    scheme.require_valid();
    if (cfg.pressure_points < 2) throw ConfigError("pressure.points must be at least 2");
    Artifacts out(cfg, "pressure-curve");
    const TransferModel model(scheme, cfg.depth, cfg.capacity);
    std::vector<double> s(static_cast<std::size_t>(cfg.pressure_points)), p(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = cfg.pressure_s_min + (cfg.pressure_s_max - cfg.pressure_s_min) * static_cast<double>(i) /
                                        static_cast<double>(s.size() - 1);
    }
    parallel_for(s.size(), cfg.threads, [&](std::size_t i) { p[i] = pressure(model, s[i]); });
    Csv csv({"s", "P"});
    for (std::size_t i = 0; i < s.size(); ++i) {
        csv.num(s[i]).num(p[i]);
        csv.end();
    }
    out.write("pressure.csv", csv.str());
    out.finish();
    return 0;
}

struct Normalized {
    TransferModel model;
    double delta;
    NormalizedWeights weights;
};

Normalized normalized_model(const SchottkyScheme& scheme, int depth, const RunConfig& cfg) {
    scheme.require_valid();
    TransferModel model(scheme, depth, cfg.capacity);
    const double delta = dimension(model, cfg.tolerance);
    NormalizedWeights w = normalize(model, delta);
    return {std::move(model), delta, std::move(w)};
}

int cmd_gap_sweep(const RunConfig& cfg, std::ostream&) {
    const Normalized n = normalized_model(cfg.scheme(), cfg.depth, cfg);
    Artifacts out(cfg, "gap-sweep");
    const GapReport report = gap_sweep(n.model, n.weights, SweepGrid{cfg.gap_b, cfg.gap_k, cfg.gap_iterations},
                                       cfg.seed, cfg.gap_threshold, cfg.threads);
    Csv csv({"b", "k", "eta", "fit_residual", "flag"});
    for (const auto& r : report.rows) {
        csv.num(r.b).integer(r.k).num(r.eta).num(r.fit_residual).integer(r.flagged ? 1 : 0);
        csv.end();
    }
    out.write("gap.csv", csv.str());
    out.write_json("gap.json", {{"delta", n.delta}, {"min_eta", report.min_eta}, {"threshold", report.threshold}});
    out.finish();
    return 0;
}

int cmd_stability(const RunConfig& cfg, std::ostream&) {
    const SchottkyScheme scheme = cfg.scheme();
    scheme.require_valid();
    Artifacts out(cfg, "stability");
    const TransferModel model(scheme, cfg.depth, cfg.capacity);
    const double delta = dimension(model, cfg.tolerance);
    const StabilityReport report = small_a_stability(model, delta, cfg.stability_a, cfg.stability_b, cfg.stability_k,
                                                     cfg.gap_iterations, cfg.seed, cfg.threads);
    Csv csv({"a", "eta", "fit_residual"});
    for (const auto& r : report.rows) {
        csv.num(r.a).num(r.eta).num(r.fit_residual);
        csv.end();
    }
    out.write("stability.csv", csv.str());
    out.write_json("stability.json", {{"delta", delta},
                                      {"b", cfg.stability_b},
                                      {"k", cfg.stability_k},
                                      {"eta0", report.eta0},
                                      {"max_relative_deviation", report.max_relative_deviation}});
    out.finish();
    return 0;
}

int cmd_lnic(const RunConfig& cfg, std::ostream&) {
    const SchottkyScheme scheme = cfg.scheme();
    scheme.require_valid();
    Artifacts out(cfg, "lnic");
    const LnicResult r = lnic_probe(scheme, cfg.lnic_m2, cfg.lnic_samples, cfg.seed, cfg.lnic_omegas);
    Csv csv({"omega", "value"});
    for (std::size_t i = 0; i < r.omegas.size(); ++i) {
        csv.num(r.omegas[i]).num(r.per_omega[i]);
        csv.end();
    }
    out.write("lnic.csv", csv.str());
    out.write_json("lnic.json", {{"value", r.value}, {"m2", cfg.lnic_m2}, {"samples", cfg.lnic_samples}});
    out.finish();
    return 0;
}

int cmd_ncp(const RunConfig& cfg, std::ostream&) {
    const SchottkyScheme scheme = cfg.scheme();
    scheme.require_valid();
    if (cfg.ncp_centers < 1 || cfg.ncp_directions < 1) throw ConfigError("ncp needs centers and directions");
    Artifacts out(cfg, "ncp");
    const auto points = limit_points(scheme, cfg.ncp_points, cfg.ncp_word_length, cfg.seed);
    Csv csv({"x_re", "x_im", "eps", "direction", "spread"});
    double min_spread = std::numeric_limits<double>::infinity();
    std::size_t empty = 0;
    const auto centers = std::min<std::size_t>(static_cast<std::size_t>(cfg.ncp_centers), points.size());
    for (std::size_t c = 0; c < centers; ++c) {
        const Complex x = points[c * (points.size() / centers)];
        for (double eps : cfg.ncp_eps) {
            for (int d = 0; d < cfg.ncp_directions; ++d) {
                const double angle = std::numbers::pi * d / cfg.ncp_directions;
                double spread = std::numeric_limits<double>::quiet_NaN();
                try {
                    spread = ncp_spread(points, x, std::polar(1.0, angle), eps);
                    min_spread = std::min(min_spread, spread);
                } catch (const EmptyBall&) {
                    ++empty;
                }
                csv.num(x.real()).num(x.imag()).num(eps).num(angle).num(spread);
                csv.end();
            }
        }
    }
    out.write("ncp.csv", csv.str());
    out.write_json("ncp.json", {{"min_spread", std::isfinite(min_spread) ? json(min_spread) : json(nullptr)},
                                {"empty_balls", empty},
                                {"points", points.size()}});
    out.finish();
    return 0;
}

int cmd_correlation(const RunConfig& cfg, std::ostream& err) {
    const Normalized n = normalized_model(cfg.scheme(), cfg.correlation_depth, cfg);
    Artifacts out(cfg, "correlation");
    const int alphabet = n.model.table().alphabet_size;
    const Observable phi = build_observable(cfg.phi, alphabet);
    const Observable psi = build_observable(cfg.psi, alphabet);
    std::vector<double> t;
    for (int i = 0;; ++i) {
        const double x = i * cfg.correlation_t_step;
        if (x > cfg.correlation_t_max + 1e-12) break;
        t.push_back(x);
    }
    const CorrelationSeries u =
        upsilon(n.model, n.weights, phi, psi, t, UpsilonOptions{cfg.correlation_grid_step, 30.0});
    Csv csv({"t", "upsilon", "upsilon0", "upsilon1"});
    for (std::size_t i = 0; i < t.size(); ++i) {
        csv.num(u.t[i]).num(u.upsilon[i]).num(u.upsilon0[i]).num(u.upsilon1[i]);
        csv.end();
    }
    out.write("correlation.csv", csv.str());
    const LaplaceSeries series = laplace_series(n.model, n.weights, phi, psi, cfg.correlation_xi, cfg.correlation_terms);
    const Complex numeric = laplace_transform(u.t, u.upsilon0, cfg.correlation_xi);
    json summary = {{"delta", n.delta},
                    {"depth", cfg.correlation_depth},
                    {"xi", cfg.correlation_xi},
                    {"laplace_series", {series.value.real(), series.value.imag()}},
                    {"laplace_tail_estimate", series.tail_estimate},
                    {"laplace_numeric", {numeric.real(), numeric.imag()}}};
    const auto& tau = n.model.table().tau;
    const double t_min = cfg.correlation_t_min.value_or(*std::max_element(tau.begin(), tau.end()));
    try {
        const DecayFit fit = fit_decay(u.t, u.upsilon, t_min);
        summary["decay"] = {{"eta_est", fit.eta_est},
                            {"amplitude", fit.amplitude},
                            {"fit_residual", fit.fit_residual},
                            {"used_peaks", fit.used_peaks},
                            {"points", fit.points}};
    } catch (const InsufficientDecayWindow& e) {
        err << "correlation: no decay fit: " << e.what() << "\n";
        summary["decay"] = nullptr;
    }
    out.write_json("correlation.json", summary);
    out.finish();
    return 0;
}

int cmd_geodesics(const RunConfig& cfg, std::ostream&) {
    const SchottkyScheme scheme = cfg.scheme();
    scheme.require_valid();
    if (cfg.geodesic_T.empty()) throw ConfigError("geodesics.T must not be empty");
    Artifacts out(cfg, "geodesics");
    const double T = *std::max_element(cfg.geodesic_T.begin(), cfg.geodesic_T.end());
    const auto classes = closed_geodesics(scheme, T, cfg.geodesic_max_classes);
    Csv csv({"class_id", "length", "angle"});
    for (const auto& g : classes) {
        csv.integer(static_cast<long long>(g.class_id)).num(g.length).num(g.angle);
        csv.end();
    }
    out.write("geodesics.csv", csv.str());
    const double delta = dimension(scheme, cfg.depth, cfg.tolerance);
    Csv eq({"T", "count", "S1", "S2", "S3", "li_ratio"});
    for (const auto& r : holonomy_equidistribution(scheme, delta, cfg.geodesic_T, cfg.geodesic_max_classes)) {
        eq.num(r.T).integer(static_cast<long long>(r.count)).num(r.s1).num(r.s2).num(r.s3).num(r.li_ratio);
        eq.end();
    }
    out.write("equidistribution.csv", eq.str());
    out.finish();
    return 0;
}

}  // namespace

SchottkyScheme RunConfig::scheme() const {
    if (fixture == "FIX-A") return fixture_a();
    if (fixture == "FIX-B") return fixture_b();
    return SchottkyScheme(generators);
}

json RunConfig::to_json() const {
    json scheme_json;
    if (!fixture.empty()) {
        scheme_json = fixture;
    } else {
        json gens = json::array();
        for (const auto& g : generators) {
            auto c = [](Complex z) { return json::array({z.real(), z.imag()}); };
            gens.push_back({{"matrix", {{c(g.map.a()), c(g.map.b())}, {c(g.map.c()), c(g.map.d())}}},
                            {"source_disk", {{"center", c(g.source.center)}, {"radius", g.source.radius}}},
                            {"target_disk", {{"center", c(g.target.center)}, {"radius", g.target.radius}}}});
        }
        scheme_json = {{"generators", gens}};
    }
    return {{"scheme", scheme_json},
            {"depth", depth},
            {"seed", seed},
            {"threads", threads},
            {"capacity", capacity},
            {"tolerance", tolerance},
            {"output", output.string()},
            {"pressure", {{"s_min", pressure_s_min}, {"s_max", pressure_s_max}, {"points", pressure_points}}},
            {"gap", {{"b", gap_b}, {"k", gap_k}, {"iterations", gap_iterations}, {"threshold", gap_threshold}}},
            {"stability", {{"a", stability_a}, {"b", stability_b}, {"k", stability_k}}},
            {"lnic", {{"m2", lnic_m2}, {"samples", lnic_samples}, {"omegas", lnic_omegas}}},
            {"ncp",
             {{"points", ncp_points},
              {"word_length", ncp_word_length},
              {"centers", ncp_centers},
              {"eps", ncp_eps},
              {"directions", ncp_directions}}},
            {"correlation",
             {{"depth", correlation_depth},
              {"t_max", correlation_t_max},
              {"t_step", correlation_t_step},
              {"grid_step", correlation_grid_step},
              {"xi", correlation_xi},
              {"terms", correlation_terms},
              {"t_min", correlation_t_min ? json(*correlation_t_min) : json(nullptr)},
              {"phi", observable_json(phi)},
              {"psi", observable_json(psi)}}},
            {"geodesics", {{"T", geodesic_T}, {"max_classes", geodesic_max_classes}}}};
}

RunConfig parse_config(const json& j) {
    check_keys(j, "root", {"scheme", "depth", "seed", "threads", "capacity", "tolerance", "output", "pressure", "gap",
                           "stability", "lnic", "ncp", "correlation", "geodesics"});
    RunConfig cfg;
    if (!j.contains("scheme")) bad("root", "missing 'scheme'");
    const json& s = j["scheme"];
    if (s.is_string()) {
        const std::string name = s.get<std::string>();
        if (name != "FIX-A" && name != "FIX-B") bad("scheme", "unknown fixture '" + name + "'");
        cfg.fixture = name;
    } else {
        check_keys(s, "scheme", {"generators"});
        if (!s.contains("generators") || !s["generators"].is_array() || s["generators"].empty()) {
            bad("scheme", "needs a nonempty 'generators' array");
        }
        for (std::size_t i = 0; i < s["generators"].size(); ++i) {
            cfg.generators.push_back(generator_value(s["generators"][i], "scheme.generators[" + std::to_string(i) + "]"));
        }
        if (cfg.generators.size() < 2) bad("scheme.generators", "rank must be at least 2");
    }
    if (j.contains("depth")) cfg.depth = static_cast<int>(integer(j["depth"], "depth", 1, 16));
    if (j.contains("seed")) cfg.seed = unsigned_integer(j["seed"], "seed");
    if (j.contains("threads")) cfg.threads = static_cast<int>(integer(j["threads"], "threads", 0, 1024));
    if (j.contains("capacity")) cfg.capacity = unsigned_integer(j["capacity"], "capacity");
    if (j.contains("tolerance")) {
        cfg.tolerance = number(j["tolerance"], "tolerance");
        if (!(cfg.tolerance > 0.0)) bad("tolerance", "must be positive");
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) bad("output", "expected a path string");
        cfg.output = j["output"].get<std::string>();
    }
    if (j.contains("pressure")) {
        const json& p = j["pressure"];
        check_keys(p, "pressure", {"s_min", "s_max", "points"});
        if (p.contains("s_min")) cfg.pressure_s_min = number(p["s_min"], "pressure.s_min");
        if (p.contains("s_max")) cfg.pressure_s_max = number(p["s_max"], "pressure.s_max");
        if (p.contains("points")) cfg.pressure_points = static_cast<int>(integer(p["points"], "pressure.points", 2, 100000));
    }
    if (j.contains("gap")) {
        const json& g = j["gap"];
        check_keys(g, "gap", {"b", "k", "iterations", "threshold"});
        if (g.contains("b")) cfg.gap_b = number_list(g["b"], "gap.b");
        if (g.contains("k")) {
            if (!g["k"].is_array()) bad("gap.k", "expected an array");
            cfg.gap_k.clear();
            for (const auto& v : g["k"]) cfg.gap_k.push_back(static_cast<int>(integer(v, "gap.k", -1000, 1000)));
        }
        if (g.contains("iterations")) cfg.gap_iterations = static_cast<int>(integer(g["iterations"], "gap.iterations", 20, 100000));
        if (g.contains("threshold")) cfg.gap_threshold = number(g["threshold"], "gap.threshold");
    }
    if (j.contains("stability")) {
        const json& g = j["stability"];
        check_keys(g, "stability", {"a", "b", "k"});
        if (g.contains("a")) cfg.stability_a = number_list(g["a"], "stability.a");
        if (g.contains("b")) cfg.stability_b = number(g["b"], "stability.b");
        if (g.contains("k")) cfg.stability_k = static_cast<int>(integer(g["k"], "stability.k", -1000, 1000));
    }
    if (j.contains("lnic")) {
        const json& g = j["lnic"];
        check_keys(g, "lnic", {"m2", "samples", "omegas"});
        if (g.contains("m2")) cfg.lnic_m2 = static_cast<int>(integer(g["m2"], "lnic.m2", 2, 8));
        if (g.contains("samples")) cfg.lnic_samples = static_cast<int>(integer(g["samples"], "lnic.samples", 1, 100000));
        if (g.contains("omegas")) cfg.lnic_omegas = number_list(g["omegas"], "lnic.omegas");
    }
    if (j.contains("ncp")) {
        const json& g = j["ncp"];
        check_keys(g, "ncp", {"points", "word_length", "centers", "eps", "directions"});
        if (g.contains("points")) cfg.ncp_points = unsigned_integer(g["points"], "ncp.points");
        if (g.contains("word_length")) cfg.ncp_word_length = static_cast<int>(integer(g["word_length"], "ncp.word_length", 1, 200));
        if (g.contains("centers")) cfg.ncp_centers = static_cast<int>(integer(g["centers"], "ncp.centers", 1, 100000));
        if (g.contains("eps")) cfg.ncp_eps = number_list(g["eps"], "ncp.eps");
        if (g.contains("directions")) cfg.ncp_directions = static_cast<int>(integer(g["directions"], "ncp.directions", 1, 3600));
    }
    if (j.contains("correlation")) {
        const json& g = j["correlation"];
        check_keys(g, "correlation", {"depth", "t_max", "t_step", "grid_step", "xi", "terms", "t_min", "phi", "psi"});
        if (g.contains("depth")) cfg.correlation_depth = static_cast<int>(integer(g["depth"], "correlation.depth", 1, 12));
        if (g.contains("t_max")) cfg.correlation_t_max = number(g["t_max"], "correlation.t_max");
        if (g.contains("t_step")) cfg.correlation_t_step = number(g["t_step"], "correlation.t_step");
        if (g.contains("grid_step")) cfg.correlation_grid_step = number(g["grid_step"], "correlation.grid_step");
        if (g.contains("xi")) cfg.correlation_xi = number(g["xi"], "correlation.xi");
        if (g.contains("terms")) cfg.correlation_terms = static_cast<int>(integer(g["terms"], "correlation.terms", 10, 100000));
        if (g.contains("t_min") && !g["t_min"].is_null()) cfg.correlation_t_min = number(g["t_min"], "correlation.t_min");
        if (g.contains("phi")) cfg.phi = observable_value(g["phi"], "correlation.phi");
        if (g.contains("psi")) cfg.psi = observable_value(g["psi"], "correlation.psi");
        if (!(cfg.correlation_t_step > 0.0) || !(cfg.correlation_t_max > 0.0)) {
            bad("correlation", "t_step and t_max must be positive");
        }
    }
    if (j.contains("geodesics")) {
        const json& g = j["geodesics"];
        check_keys(g, "geodesics", {"T", "max_classes"});
        if (g.contains("T")) cfg.geodesic_T = number_list(g["T"], "geodesics.T");
        if (g.contains("max_classes")) cfg.geodesic_max_classes = unsigned_integer(g["max_classes"], "geodesics.max_classes");
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

void apply_overrides(RunConfig& cfg, const Overrides& o) {
    if (o.out) cfg.output = *o.out;
    if (o.seed) cfg.seed = *o.seed;
    if (o.depth) {
        if (*o.depth < 1 || *o.depth > 16) throw ConfigError("depth must lie in [1, 16]");
        cfg.depth = *o.depth;
    }
    if (o.threads) {
        if (*o.threads < 0) throw ConfigError("threads must be nonnegative");
        cfg.threads = *o.threads;
    }
}

Overrides environment_overrides() {
    Overrides o;
    if (auto v = env("FRAMEFLOW_OUT")) o.out = *v;
    if (auto v = env("FRAMEFLOW_SEED")) o.seed = parse_env_number<std::uint64_t>("FRAMEFLOW_SEED", *v);
    if (auto v = env("FRAMEFLOW_DEPTH")) o.depth = parse_env_number<int>("FRAMEFLOW_DEPTH", *v);
    if (auto v = env("FRAMEFLOW_THREADS")) o.threads = parse_env_number<int>("FRAMEFLOW_THREADS", *v);
    return o;
}

std::optional<fs::path> environment_config() {
    if (auto v = env("FRAMEFLOW_CONFIG")) return fs::path(*v);
    return std::nullopt;
}

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names{"validate", "dimension", "pressure-curve", "gap-sweep", "stability",
                                                "lnic",     "ncp",       "correlation",    "geodesics"};
    return names;
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& err) {
    try {
        if (command == "validate") return cmd_validate(cfg, err);
        if (command == "dimension") return cmd_dimension(cfg, err);
        if (command == "pressure-curve") return cmd_pressure_curve(cfg, err);
        if (command == "gap-sweep") return cmd_gap_sweep(cfg, err);
        if (command == "stability") return cmd_stability(cfg, err);
        if (command == "lnic") return cmd_lnic(cfg, err);
        if (command == "ncp") return cmd_ncp(cfg, err);
        if (command == "correlation") return cmd_correlation(cfg, err);
        if (command == "geodesics") return cmd_geodesics(cfg, err);
        err << "error: unknown command '" << command << "'\n";
        return 2;
    } catch (const std::exception& e) {
        const int code = exit_code(e);
        err << (code == 2 ? "validation error: " : code == 3 ? "numeric failure: " : "error: ") << e.what() << "\n";
        return code;
    }
}

int exit_code(const std::exception& e) {
    if (dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e)) return 2;
    if (dynamic_cast<const NumericError*>(&e)) return 3;
    return 1;
}

}  // namespace frameflow
