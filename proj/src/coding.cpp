#include "frameflow/coding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "frameflow/errors.hpp"

namespace frameflow {

Word::Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (symbols_[i] < 0) throw InadmissibleBranch("negative symbol in word");
        if (i > 0 && symbols_[i] == bar(symbols_[i - 1])) {
            throw InadmissibleBranch("inadmissible pair at position " + std::to_string(i) +
                                     " of word " + to_string());
        }
    }
}

bool Word::cyclically_reduced() const {
    return !symbols_.empty() && symbols_.front() != bar(symbols_.back());
}

Word Word::inverse() const {
    Word w;
    w.symbols_.reserve(symbols_.size());
    for (auto it = symbols_.rbegin(); it != symbols_.rend(); ++it) w.symbols_.push_back(bar(*it));
    return w;
}

Word Word::concat(const Word& tail) const {
    std::vector<Symbol> joined = symbols_;
    joined.insert(joined.end(), tail.symbols_.begin(), tail.symbols_.end());
    return Word(std::move(joined));
}

std::string Word::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (i) s += '.';
        s += std::to_string(symbols_[i]);
    }
    return s;
}

Generator pairing_generator(Complex source_center, Complex target_center, double radius) {
    const double r2 = radius * radius;
    MoebiusMap g(target_center, -r2 - target_center * source_center, 1.0, -source_center);
    return Generator{g, Disk(source_center, radius), Disk(target_center, radius)};
}

BranchCocycle map_cocycle(const MoebiusMap& m, Complex z) {
    const Complex d = m.derivative(z);
    return {-std::log(std::abs(d)), wrap_angle(-std::arg(d))};
}

SchottkyScheme::SchottkyScheme(std::vector<Generator> generators)
    : generators_(std::move(generators)) {
    all_real_ = true;
    for (const auto& g : generators_) {
        maps_.push_back(g.map);
        maps_.push_back(g.map.inverse());
        disks_.push_back(g.target);
        disks_.push_back(g.source);
        all_real_ = all_real_ && is_real(g.map);
    }
}

SchottkyScheme SchottkyScheme::from_pairings(
    const std::vector<std::tuple<Complex, Complex, double>>& pairings) {
    std::vector<Generator> gens;
    for (const auto& [source, target, radius] : pairings) {
        gens.push_back(pairing_generator(source, target, radius));
    }
    return SchottkyScheme(std::move(gens));
}

void SchottkyScheme::check_symbol(Symbol x) const {
    if (x < 0 || x >= alphabet_size()) {
        throw std::out_of_range("symbol " + std::to_string(x) + " outside the alphabet");
    }
}

const Disk& SchottkyScheme::disk(Symbol x) const {
    check_symbol(x);
    return disks_[static_cast<std::size_t>(x)];
}

const MoebiusMap& SchottkyScheme::map(Symbol x) const {
    check_symbol(x);
    return maps_[static_cast<std::size_t>(x)];
}

std::optional<Symbol> SchottkyScheme::locate(Complex z) const {
    for (std::size_t i = 0; i < disks_.size(); ++i) {
        if (disks_[i].contains(z)) return static_cast<Symbol>(i);
    }
    return std::nullopt;
}

Complex SchottkyScheme::branch(Symbol x, Complex z) const {
    check_symbol(x);
    const auto y = locate(z);
    if (!y) throw OutsideCoding("point lies in no coding disk");
    if (*y == bar(x)) {
        throw InadmissibleBranch("branch " + std::to_string(x) + " applied in the disk of its inverse");
    }
    return maps_[static_cast<std::size_t>(x)].apply(z);
}

BranchCocycle SchottkyScheme::cocycle(Symbol x, Complex z) const {
    check_symbol(x);
    const auto y = locate(z);
    if (!y) throw OutsideCoding("point lies in no coding disk");
    if (*y == bar(x)) {
        throw InadmissibleBranch("branch " + std::to_string(x) + " applied in the disk of its inverse");
    }
    return map_cocycle(maps_[static_cast<std::size_t>(x)], z);
}

Complex SchottkyScheme::apply(const Word& w, Complex z) const {
    for (std::size_t i = w.size(); i-- > 0;) z = branch(w[i], z);
    return z;
}

BranchCocycle SchottkyScheme::word_cocycle(const Word& w, Complex z) const {
    BranchCocycle sum;
    for (std::size_t i = w.size(); i-- > 0;) {
        const BranchCocycle c = cocycle(w[i], z);
        sum.tau += c.tau;
        sum.theta += c.theta;
        z = maps_[static_cast<std::size_t>(w[i])].apply(z);
    }
    sum.theta = wrap_angle(sum.theta);
    return sum;
}

MoebiusMap SchottkyScheme::element(const Word& w) const {
    MoebiusMap m = MoebiusMap::identity();
    for (std::size_t i = 0; i < w.size(); ++i) m = m * map(w[i]);
    return m;
}

Complex SchottkyScheme::periodic_point(const Word& w) const {
    if (!w.cyclically_reduced()) {
        throw InadmissibleBranch("periodic point needs a cyclically reduced word");
    }
    const MoebiusMap g = element(w);
    const Complex a = g.a(), b = g.b(), c = g.c(), d = g.d();
    Complex z;
    if (std::abs(c) < 1e-300) {
        z = b / (d - a);
    } else {
        const Complex root = std::sqrt((a - d) * (a - d) + 4.0 * b * c);
        const Complex z1 = (a - d + root) / (2.0 * c);
        const Complex z2 = (a - d - root) / (2.0 * c);
        z = std::abs(g.derivative(z1)) < std::abs(g.derivative(z2)) ? z1 : z2;
    }
    // A few contracting steps remove the rounding of the quadratic formula.
    for (int i = 0; i < 4; ++i) z = apply(w, z);
    return z;
}

ValidationReport SchottkyScheme::validate() const {
    ValidationReport report;
    auto fail = [&](const std::string& msg) {
        report.ok = false;
        report.failures.push_back(msg);
    };
    if (rank() < 2) fail("rank " + std::to_string(rank()) + " schemes are not supported (need r >= 2)");

    report.disjointness_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < disks_.size(); ++i) {
        for (std::size_t j = i + 1; j < disks_.size(); ++j) {
            const double margin = std::abs(disks_[i].center - disks_[j].center) -
                                  disks_[i].radius - disks_[j].radius;
            report.disjointness_margin = std::min(report.disjointness_margin, margin);
            if (margin < 1e-9) {
                fail("disks " + std::to_string(i) + " and " + std::to_string(j) +
                     " overlap (margin " + std::to_string(margin) + ")");
            }
        }
    }

    bool pairing_ok = true;
    for (std::size_t i = 0; i < generators_.size(); ++i) {
        const Generator& g = generators_[i];
        const std::string name = "generator " + std::to_string(i);
        if (!g.map.has_finite_pole()) {
            fail(name + " fixes infinity and cannot map the source exterior into a disk");
            report.pairing_residuals.push_back(std::numeric_limits<double>::infinity());
            pairing_ok = false;
            continue;
        }
        if (!g.source.contains(g.map.pole())) {
            fail(name + " has its pole outside the source disk");
            pairing_ok = false;
        }
        if (!g.target.contains(g.map.a() / g.map.c())) {
            fail(name + " sends infinity outside the target disk");
            pairing_ok = false;
        }
        double residual = 0.0;
        for (int s = 0; s < 64; ++s) {
            const Complex z = g.source.center +
                              g.source.radius * std::polar(1.0, 2.0 * std::numbers::pi * s / 64.0);
            try {
                const Complex w = g.map.apply(z);
                residual = std::max(residual, std::abs(std::abs(w - g.target.center) - g.target.radius));
            } catch (const PoleAt&) {
                residual = std::numeric_limits<double>::infinity();
            }
        }
        report.pairing_residuals.push_back(residual);
        if (!(residual <= 1e-9 * std::max(1.0, g.target.radius))) {
            fail(name + " does not pair its disks (residual " + std::to_string(residual) + ")");
            pairing_ok = false;
        }
    }

    if (report.ok && pairing_ok) {
        const CylinderTable depth2 = cylinders(*this, 2);
        report.min_branch_derivative = std::numeric_limits<double>::infinity();
        report.max_branch_derivative = 0.0;
        for (double t : depth2.tau) {
            report.min_branch_derivative = std::min(report.min_branch_derivative, std::exp(-t));
            report.max_branch_derivative = std::max(report.max_branch_derivative, std::exp(-t));
        }
        for (int k = 1; k <= 3 && report.contraction_depth == 0; ++k) {
            const WordIndex idx(alphabet_size(), k);
            double worst = 0.0;
            for (std::size_t i = 0; i < idx.count(); ++i) {
                const Word w = idx.word(i);
                const BranchCocycle c = word_cocycle(w, disk(w[w.size() - 1]).center);
                worst = std::max(worst, std::exp(-c.tau));
            }
            if (worst < 1.0) report.contraction_depth = k;
        }
        if (report.contraction_depth == 0) fail("branches are not eventually contracting by depth 3");
    }
    return report;
}

void SchottkyScheme::require_valid() const {
    const ValidationReport report = validate();
    if (report.ok) return;
    std::string msg = "invalid Schottky scheme:";
    for (const auto& f : report.failures) msg += "\n  " + f;
    throw ValidationError(msg);
}

std::size_t cylinder_count(int alphabet_size, int depth) {
    if (depth < 1 || alphabet_size < 2) throw std::invalid_argument("cylinder depth must be >= 1");
    double count = alphabet_size;
    std::size_t exact = static_cast<std::size_t>(alphabet_size);
    for (int d = 1; d < depth; ++d) {
        count *= alphabet_size - 1;
        if (count > 1e18) return std::numeric_limits<std::size_t>::max();
        exact *= static_cast<std::size_t>(alphabet_size - 1);
    }
    return exact;
}

WordIndex::WordIndex(int alphabet_size, int depth)
    : alphabet_(alphabet_size), depth_(depth), count_(cylinder_count(alphabet_size, depth)) {
    const auto m = static_cast<std::size_t>(alphabet_ - 1);
    powers_.assign(static_cast<std::size_t>(depth_) + 1, 1);
    for (std::size_t i = 1; i < powers_.size(); ++i) powers_[i] = powers_[i - 1] * m;
}

namespace {

// Rank of w among the successors of prev, and its inverse.
inline std::size_t successor_rank(Symbol prev, Symbol w) {
    return static_cast<std::size_t>(w < bar(prev) ? w : w - 1);
}
inline Symbol successor_symbol(Symbol prev, std::size_t rank) {
    const auto s = static_cast<Symbol>(rank);
    return s < bar(prev) ? s : s + 1;
}

}  // namespace

std::size_t WordIndex::index(const Word& w) const {
    if (static_cast<int>(w.size()) != depth_) throw std::invalid_argument("word length differs from index depth");
    std::size_t idx = static_cast<std::size_t>(w[0]) * powers_[depth_ - 1];
    for (int i = 1; i < depth_; ++i) {
        idx += successor_rank(w[i - 1], w[i]) * powers_[depth_ - 1 - i];
    }
    return idx;
}

Word WordIndex::word(std::size_t index) const {
    std::vector<Symbol> s(static_cast<std::size_t>(depth_));
    s[0] = static_cast<Symbol>(index / powers_[depth_ - 1]);
    std::size_t rem = index % powers_[depth_ - 1];
    for (int i = 1; i < depth_; ++i) {
        const std::size_t p = powers_[depth_ - 1 - i];
        s[i] = successor_symbol(s[i - 1], rem / p);
        rem %= p;
    }
    return Word(std::move(s));
}

Symbol WordIndex::first_symbol(std::size_t index) const {
    return static_cast<Symbol>(index / powers_[depth_ - 1]);
}

std::size_t WordIndex::prefix(std::size_t index, int d) const { return index / powers_[depth_ - d]; }

void WordIndex::preimages(std::size_t index, std::size_t* out) const {
    const Symbol w0 = first_symbol(index);
    if (depth_ == 1) {
        for (Symbol x = 0, k = 0; x < alphabet_; ++x) {
            if (x != bar(w0)) out[k++] = static_cast<std::size_t>(x);
        }
        return;
    }
    const std::size_t tail = (index % powers_[depth_ - 1]) / powers_[1];
    int k = 0;
    for (Symbol x = 0; x < alphabet_; ++x) {
        if (x == bar(w0)) continue;
        out[k++] = static_cast<std::size_t>(x) * powers_[depth_ - 1] +
                   successor_rank(x, w0) * powers_[depth_ - 2] + tail;
    }
}

Word CylinderTable::word(std::size_t i) const {
    std::vector<Symbol> s(static_cast<std::size_t>(depth));
    for (int j = 0; j < depth; ++j) s[j] = symbols[i * static_cast<std::size_t>(depth) + j];
    return Word(std::move(s));
}

CylinderTable cylinders(const SchottkyScheme& scheme, int depth, std::size_t capacity) {
    const int n = scheme.alphabet_size();
    if (depth < 1) throw std::invalid_argument("cylinder depth must be >= 1");
    const std::size_t total = cylinder_count(n, depth);
    if (total > capacity) {
        throw CapacityExceeded("depth " + std::to_string(depth) + " needs " + std::to_string(total) +
                               " cylinders, capacity is " + std::to_string(capacity));
    }
    const auto m = static_cast<std::size_t>(n - 1);

    // Level 1: representative of (x) is g_x(center of D_x); its image under
    // the shift is the center itself.
    std::vector<Complex> rep(static_cast<std::size_t>(n));
    std::vector<Complex> shifted(static_cast<std::size_t>(n));
    for (Symbol x = 0; x < n; ++x) {
        shifted[x] = scheme.disk(x).center;
        rep[x] = scheme.branch(x, shifted[x]);
    }
    for (int d = 2; d <= depth; ++d) {
        const std::size_t prev_count = rep.size();
        std::size_t block = 1;  // m^(d-2)
        for (int i = 0; i < d - 2; ++i) block *= m;
        std::vector<Complex> next(cylinder_count(n, d));
        std::vector<Complex> next_shifted(next.size());
        for (std::size_t s = 0; s < prev_count; ++s) {
            const Symbol w1 = static_cast<Symbol>(s / block);
            for (Symbol x = 0; x < n; ++x) {
                if (x == bar(w1)) continue;
                const std::size_t idx = static_cast<std::size_t>(x) * block * m +
                                        successor_rank(x, w1) * block + s % block;
                next_shifted[idx] = rep[s];
                next[idx] = scheme.branch(x, rep[s]);
            }
        }
        rep = std::move(next);
        shifted = std::move(next_shifted);
    }

    CylinderTable table;
    table.alphabet_size = n;
    table.depth = depth;
    table.representative = std::move(rep);
    table.tau.resize(total);
    table.theta.resize(total);
    table.symbols.resize(total * static_cast<std::size_t>(depth));
    const WordIndex idx(n, depth);
    for (std::size_t i = 0; i < total; ++i) {
        const Word w = idx.word(i);
        for (int j = 0; j < depth; ++j) table.symbols[i * depth + j] = static_cast<std::uint8_t>(w[j]);
        const BranchCocycle c = map_cocycle(scheme.map(w[0]), shifted[i]);
        table.tau[i] = c.tau;
        table.theta[i] = c.theta;
    }
    return table;
}

std::vector<Complex> limit_points(const SchottkyScheme& scheme, std::size_t n, int word_length,
                                  std::uint64_t seed) {
    if (word_length < 1) throw std::invalid_argument("word length must be positive");
    std::mt19937_64 rng(seed);
    const int alphabet = scheme.alphabet_size();
    std::uniform_int_distribution<int> first(0, alphabet - 1);
    std::uniform_int_distribution<int> next(0, alphabet - 2);
    std::vector<Complex> points;
    points.reserve(n);
    std::vector<Symbol> w(static_cast<std::size_t>(word_length));
    for (std::size_t p = 0; p < n; ++p) {
        w[0] = first(rng);
        for (int i = 1; i < word_length; ++i) w[i] = successor_symbol(w[i - 1], static_cast<std::size_t>(next(rng)));
        Complex z = scheme.disk(w.back()).center;
        for (int i = word_length; i-- > 0;) z = scheme.map(w[i]).apply(z);
        points.push_back(z);
    }
    return points;
}

double ncp_spread(const std::vector<Complex>& points, Complex x, Complex w, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("ncp radius must lie in (0, 1)");
    if (std::abs(w) == 0.0) throw std::invalid_argument("ncp direction must be nonzero");
    const Complex unit = w / std::abs(w);
    double best = 0.0;
    bool found = false;
    for (const Complex& y : points) {
        const double dist = std::abs(y - x);
        if (dist >= eps || dist == 0.0) continue;
        found = true;
        best = std::max(best, std::abs(((y - x) * std::conj(unit)).real()) / eps);
    }
    if (!found) throw EmptyBall("no sampled point within the ncp radius");
    return best;
}

namespace {

struct GeodesicSearch {
    const SchottkyScheme& scheme;
    double T;
    std::size_t max_classes;
    int alphabet;
    std::vector<double> low{};  // low[x * alphabet + y]: lower bound of tau for branch x on D_y
    double min_low = std::numeric_limits<double>::infinity();
    std::vector<Symbol> word{};
    std::vector<double> partial{};  // partial[j]: bound over the first j transitions
    std::vector<GeodesicClass> found{};

    double bound(Symbol x, Symbol y) const { return low[static_cast<std::size_t>(x * alphabet + y)]; }

    // w is the least rotation of itself and of its inverse, and primitive.
    bool canonical() const {
        const std::size_t n = word.size();
        std::vector<Symbol> inv(n);
        for (std::size_t i = 0; i < n; ++i) inv[i] = bar(word[n - 1 - i]);
        for (std::size_t r = 0; r < n; ++r) {
            for (const std::vector<Symbol>* v : std::array<const std::vector<Symbol>*, 2>{&word, &inv}) {
                if (v == &word && r == 0) continue;
                int cmp = 0;
                for (std::size_t i = 0; i < n && cmp == 0; ++i) {
                    const Symbol a = (*v)[(i + r) % n];
                    if (a != word[i]) cmp = a < word[i] ? -1 : 1;
                }
                if (cmp < 0) return false;
                if (cmp == 0 && v == &word) return false;  // proper power
            }
        }
        return true;
    }

    void close() {
        if (!canonical()) return;
        const Word w(word);
        const LoxodromicData data = loxodromic_data(scheme.element(w));
        if (data.translation_length > T) return;
        if (found.size() >= max_classes) {
            throw CapacityExceeded("closed geodesic count exceeds capacity " + std::to_string(max_classes));
        }
        found.push_back(GeodesicClass{0, w, data.translation_length, data.rotation_angle});
    }

    void extend() {
        const std::size_t j = word.size();
        const Symbol last = word.back();
        const Symbol head = word.front();
        if (last != bar(head) && partial[j - 1] + bound(last, head) <= T) close();
        for (Symbol y = head; y < alphabet; ++y) {
            if (y == bar(last) || bar(y) < head) continue;
            const double p = partial[j - 1] + bound(last, y);
            if (p + min_low > T) continue;
            word.push_back(y);
            partial.push_back(p);
            extend();
            word.pop_back();
            partial.pop_back();
        }
    }
};

}  // namespace

std::vector<GeodesicClass> closed_geodesics(const SchottkyScheme& scheme, double T,
                                            std::size_t max_classes) {
    if (!(T > 0.0)) throw std::invalid_argument("geodesic length bound must be positive");
    GeodesicSearch search{.scheme = scheme, .T = T, .max_classes = max_classes, .alphabet = scheme.alphabet_size()};
    const int n = search.alphabet;
    search.low.assign(static_cast<std::size_t>(n * n), std::numeric_limits<double>::infinity());
    for (Symbol x = 0; x < n; ++x) {
        const MoebiusMap& g = scheme.map(x);
        for (Symbol y = 0; y < n; ++y) {
            if (y == bar(x)) continue;
            const Disk& d = scheme.disk(y);
            double value;
            if (g.has_finite_pole()) {
                const double dist = std::abs(g.pole() - d.center) - d.radius;
                value = 2.0 * std::log(std::abs(g.c()) * dist);
            } else {
                value = 2.0 * std::log(std::abs(g.d()));
            }
            search.low[static_cast<std::size_t>(x * n + y)] = value;
            search.min_low = std::min(search.min_low, value);
        }
    }
    if (!(search.min_low > 0.0)) {
        throw ValidationError("branches are not uniformly contracting; geodesic enumeration would not terminate");
    }
    // Canonical words start with the least symbol among the word and its
    // inverse, which is always an even symbol.
    for (Symbol head = 0; head < n; head += 2) {
        search.word = {head};
        search.partial = {0.0};
        search.extend();
    }
    auto& classes = search.found;
    std::sort(classes.begin(), classes.end(), [](const GeodesicClass& a, const GeodesicClass& b) {
        if (a.length != b.length) return a.length < b.length;
        return a.word < b.word;
    });
    for (std::size_t i = 0; i < classes.size(); ++i) classes[i].class_id = i;
    return classes;
}

}  // namespace frameflow
