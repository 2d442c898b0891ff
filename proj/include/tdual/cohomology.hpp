#pragma once

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdual/cell_complex.hpp"
#include "tdual/integer_matrix.hpp"

namespace tdual::topology {

class NotACocycle : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class NotAProduct : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class DegreeOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class LabelMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class NotAChainMap : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Z^free_rank + Z/t_1 + ... with t_i > 1 and t_i | t_{i+1}.
struct AbelianGroup {
    std::size_t free_rank = 0;
    std::vector<BigInt> torsion;

    static AbelianGroup zero() { return {}; }
    static AbelianGroup Z(std::size_t rank = 1) { return {rank, {}}; }
    static AbelianGroup Zn(const BigInt& n) { return {0, {n}}; }

    bool is_zero() const { return free_rank == 0 && torsion.empty(); }
    std::string to_string() const;
    friend bool operator==(const AbelianGroup&, const AbelianGroup&) = default;
};

/// A pair (space, sub) of subcomplexes of one ambient complex; cochains vanish on `sub`.
struct Pair {
    ComplexPtr ambient;
    CellSet space;
    CellSet sub;

    /// (X, empty).
    static Pair whole(ComplexPtr X);
    /// (labeled or whole, labeled or empty); "" means whole / empty.
    static Pair labeled(ComplexPtr X, const std::string& space_label, const std::string& sub_label);
    static Pair of(ComplexPtr X, CellSet space, CellSet sub);

    /// Cells of space - sub in the given degree, increasing.
    std::vector<std::size_t> relative_cells(int k) const;
};

/// Relative coboundary on space - sub: rows (k+1)-cells, columns k-cells.
algebra::IntMatrix coboundary_matrix(const Pair& P, int k);

/// H^k(P) with a fixed basis of generators.
class CohomologyGroup {
public:
    CohomologyGroup(Pair pair, int degree);

    const Pair& pair() const { return pair_; }
    int degree() const { return degree_; }
    const AbelianGroup& group() const { return group_; }
    /// Generator orders: torsion first, then 0 for free generators.
    const std::vector<BigInt>& moduli() const { return moduli_; }
    std::size_t generator_count() const { return moduli_.size(); }

    /// Full-length cochain (over all ambient k-cells) to coordinates; throws NotACocycle.
    algebra::IntVector coordinates(const algebra::IntVector& cochain) const;
    /// Coordinates to a full-length cocycle representative.
    algebra::IntVector representative(const algebra::IntVector& coords) const;
    algebra::IntVector reduce(algebra::IntVector coords) const;
    bool is_cocycle(const algebra::IntVector& cochain) const;
    /// Is this full-length cochain a relative coboundary?
    bool is_coboundary(const algebra::IntVector& cochain) const;

private:
    Pair pair_;
    int degree_;
    std::vector<std::size_t> cells_;   // relative k-cells
    algebra::IntMatrix delta_;         // outgoing coboundary
    algebra::IntMatrix incoming_;      // delta^{k-1}
    algebra::IntMatrix Z_;             // cocycle basis (columns, relative coordinates)
    algebra::IntMatrix U_, U_inv_;
    algebra::IntVector diag_;
    std::vector<std::size_t> kept_;
    std::vector<BigInt> moduli_;
    AbelianGroup group_;
};

AbelianGroup cohomology(const CellComplex& X, int k);
AbelianGroup relative_cohomology(const ComplexPtr& X, const CellSet& A, int k);
AbelianGroup homology(const CellComplex& X, int k);

/// A cohomology class: cocycle representative on a pair.
struct CohClass {
    Pair pair;
    int degree = 0;
    algebra::IntVector cochain;   // full length over ambient degree-k cells
};

CohClass class_from_coordinates(const CohomologyGroup& H, const algebra::IntVector& coords);
algebra::IntVector coordinates(const CohClass& c);
bool same_class(const CohClass& a, const CohClass& b);
CohClass add(const CohClass& a, const CohClass& b);
CohClass scale(const CohClass& a, const BigInt& k);
bool is_zero_class(const CohClass& c);

/// Induced homomorphism in generator coordinates: rows target gens, cols source gens.
algebra::IntMatrix induced_map(const CohomologyGroup& from, const CohomologyGroup& to,
                               const std::function<algebra::IntVector(const algebra::IntVector&)>& cochain_map);

/// Restriction along the inclusion of pairs (to.space ⊆ from.space, to.sub ⊆ from.sub).
algebra::IntVector restrict_cochain(const Pair& from, const Pair& to, int k, const algebra::IntVector& c);
/// Connecting map H^k(A) -> H^{k+1}(X, A) at cochain level: extend by zero, coboundary.
algebra::IntVector connecting_cochain(const Pair& XA, int k, const algebra::IntVector& c);

/// Exactness of G1 -f-> G2 -g-> G3 as subgroups of Z^n2 / moduli2.
bool exact_at(const algebra::IntMatrix& f, const algebra::IntMatrix& g, const std::vector<BigInt>& m2,
              const std::vector<BigInt>& m3);
/// Rank over Q and bijectivity of a group map.
std::size_t map_rank(const algebra::IntMatrix& f);
bool is_isomorphism(const algebra::IntMatrix& f, const std::vector<BigInt>& m_from, const std::vector<BigInt>& m_to);

struct SequenceNode {
    std::string name;   // "H^k(X,A)", "H^k(X)", "H^k(A)"
    int degree = 0;
    AbelianGroup group;
    std::vector<BigInt> moduli;
    bool exact = true;
};

struct LongExactSequence {
    std::vector<SequenceNode> nodes;
    std::vector<algebra::IntMatrix> maps;   // maps[i]: nodes[i] -> nodes[i+1]
    bool exact() const;
    nlohmann::json to_json() const;
};

/// ... -> H^k(X,A) -> H^k(X) -> H^k(A) -> H^{k+1}(X,A) -> ... for the pair (space, sub).
LongExactSequence long_exact_sequence(const Pair& XA);

/// Map between two pairs of one ambient complex, in generator coordinates, by restriction.
algebra::IntMatrix restriction_map(const CohomologyGroup& from, const CohomologyGroup& to);

// --- products with the circle ---------------------------------------------

/// (c x z)(s x e) = c(s), zero on s x v. `product` must be product_with_circle(c.pair.ambient).
CohClass cross_with_z(const CohClass& c, const ComplexPtr& product);
/// (Int c)(s) = c(s x e). Inverse of cross_with_z at cochain level.
CohClass fiber_integrate(const CohClass& c);
/// The pair (space x S1, sub x S1).
Pair product_pair(const Pair& P, const ComplexPtr& product);

// --- chain maps -----------------------------------------------------------

struct ChainMap {
    ComplexPtr source, target;
    std::vector<algebra::IntMatrix> degree;   // degree[k]: target k-chains x source k-chains
    /// Throws NotAChainMap unless d f = f d.
    void verify() const;
    /// f^*: H^k(target) -> H^k(source) in generator coordinates.
    algebra::IntMatrix induced(int k) const;
};

/// Collapses everything outside the cells labeled `region` (minus those labeled "boundary")
/// onto the basepoint of `thom`. Cells are matched by name.
ChainMap collapse_map(const ComplexPtr& btilde, const ComplexPtr& thom, const std::string& region = "N");

nlohmann::json to_json(const AbelianGroup& g);
nlohmann::json to_json(const CohClass& c);

}  // namespace tdual::topology
