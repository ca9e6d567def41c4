#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "frameflow/geometry.hpp"

namespace frameflow {

/// Symbol 2i is the branch of g_i (target disk D_{i+}); symbol 2i+1 is the
/// branch of g_i^{-1} (target disk D_{i-}).
using Symbol = int;

inline Symbol bar(Symbol x) { return x ^ 1; }

/// Admissible symbol sequence: no x immediately followed by bar(x).
class Word {
public:
    Word() = default;
    /// Throws InadmissibleBranch on an inadmissible adjacent pair or a
    /// negative symbol.
    explicit Word(std::vector<Symbol> symbols);

    std::size_t size() const { return symbols_.size(); }
    bool empty() const { return symbols_.empty(); }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }
    const std::vector<Symbol>& symbols() const { return symbols_; }

    /// True when the word is admissible as a cyclic word (last -> first).
    bool cyclically_reduced() const;
    /// Reversed word with every symbol barred; names the inverse element.
    Word inverse() const;
    Word concat(const Word& tail) const;

    std::string to_string() const;

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;

private:
    std::vector<Symbol> symbols_;
};

struct BranchCocycle {
    double tau = 0.0;
    double theta = 0.0;
};

struct Generator {
    MoebiusMap map;
    Disk source;
    Disk target;
};

/// Generator g(z) = c+ - r^2 / (z - c-), which sends the circle |z - c-| = r
/// onto |w - c+| = r and the exterior of the source disk into the target.
Generator pairing_generator(Complex source_center, Complex target_center, double radius);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> failures;
    double disjointness_margin = 0.0;
    std::vector<double> pairing_residuals;
    double min_branch_derivative = 0.0;
    double max_branch_derivative = 0.0;
    /// Smallest depth at which every word derivative at cylinder
    /// representatives is below one; 0 if none up to depth 3.
    int contraction_depth = 0;
};

class SchottkyScheme {
public:
    explicit SchottkyScheme(std::vector<Generator> generators);

    static SchottkyScheme from_pairings(
        const std::vector<std::tuple<Complex, Complex, double>>& pairings);

    int rank() const { return static_cast<int>(generators_.size()); }
    int alphabet_size() const { return 2 * rank(); }
    const std::vector<Generator>& generators() const { return generators_; }

    const Disk& disk(Symbol x) const;
    const MoebiusMap& map(Symbol x) const;

    /// Symbol whose disk contains z, if any.
    std::optional<Symbol> locate(Complex z) const;

    /// True when every generator preserves the extended real line.
    bool all_real() const { return all_real_; }

    Complex branch(Symbol x, Complex z) const;
    BranchCocycle cocycle(Symbol x, Complex z) const;

    /// Applies the word's branches innermost first: w[0] o ... o w[n-1].
    Complex apply(const Word& w, Complex z) const;
    BranchCocycle word_cocycle(const Word& w, Complex z) const;

    /// Group element g_{w0} ... g_{w(n-1)}.
    MoebiusMap element(const Word& w) const;

    /// Attracting fixed point of element(w), inside the disk of w[0].
    Complex periodic_point(const Word& w) const;

    ValidationReport validate() const;
    /// Throws ValidationError listing every failure of validate().
    void require_valid() const;

private:
    void check_symbol(Symbol x) const;

    std::vector<Generator> generators_;
    std::vector<MoebiusMap> maps_;
    std::vector<Disk> disks_;
    bool all_real_ = false;
};

/// (-log|m'(z)|, -arg m'(z)) for an arbitrary map, so that mock branches can
/// be evaluated with the same convention as scheme branches.
BranchCocycle map_cocycle(const MoebiusMap& m, Complex z);

/// Lexicographic indexing of the admissible words of a fixed depth.
class WordIndex {
public:
    WordIndex(int alphabet_size, int depth);

    int alphabet_size() const { return alphabet_; }
    int depth() const { return depth_; }
    std::size_t count() const { return count_; }
    /// Number of admissible successors of any symbol.
    int branching() const { return alphabet_ - 1; }

    std::size_t index(const Word& w) const;
    Word word(std::size_t index) const;
    Symbol first_symbol(std::size_t index) const;
    /// Index of the length-d prefix within the depth-d indexing.
    std::size_t prefix(std::size_t index, int d) const;

    /// Columns of the row: the cylinders (x, w0..w(D-2)) with x != bar(w0),
    /// in increasing x.
    void preimages(std::size_t index, std::size_t* out) const;

private:
    int alphabet_;
    int depth_;
    std::size_t count_;
    std::vector<std::size_t> powers_;
};

std::size_t cylinder_count(int alphabet_size, int depth);

/// Depth-k cylinders in lexicographic order, with representative points and
/// the return-time / holonomy cocycle of the branch leading into each one.
struct CylinderTable {
    int alphabet_size = 0;
    int depth = 0;
    std::vector<std::uint8_t> symbols;
    std::vector<Complex> representative;
    std::vector<double> tau;
    std::vector<double> theta;

    std::size_t size() const { return representative.size(); }
    Word word(std::size_t i) const;
    WordIndex index() const { return WordIndex(alphabet_size, depth); }
};

inline constexpr std::size_t kDefaultCapacity = 10'000'000;

/// Representative of word w is w applied to the center of the disk of its
/// last symbol. Throws CapacityExceeded when the count exceeds capacity.
CylinderTable cylinders(const SchottkyScheme& scheme, int depth,
                        std::size_t capacity = kDefaultCapacity);

/// n images of disk centers under uniformly random admissible words.
std::vector<Complex> limit_points(const SchottkyScheme& scheme, std::size_t n, int word_length,
                                  std::uint64_t seed);

/// Largest |<y - x, w>| / eps over sampled points y within eps of x.
double ncp_spread(const std::vector<Complex>& points, Complex x, Complex w, double eps);

struct GeodesicClass {
    std::size_t class_id = 0;
    Word word;
    double length = 0.0;
    double angle = 0.0;
};

/// One entry per unoriented primitive closed geodesic with length <= T,
/// sorted by length. Canonical word is the least rotation of w or w^{-1}.
std::vector<GeodesicClass> closed_geodesics(const SchottkyScheme& scheme, double T,
                                            std::size_t max_classes = kDefaultCapacity);

}  // namespace frameflow
