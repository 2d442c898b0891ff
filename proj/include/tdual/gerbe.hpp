#pragma once

#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdual/cell_complex.hpp"
#include "tdual/cohomology.hpp"

namespace tdual::gerbe {

using topology::CellSet;
using topology::CohClass;
using topology::ComplexPtr;

class MalformedNerve : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class InvalidGerbe : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ModelMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Strictly increasing cover indices.
using Tuple = std::vector<int>;

/// Sorts `t` in place; returns the permutation sign, or 0 if an index repeats.
int normalize(Tuple& t);
std::string to_string(const Tuple& t);

/// A finite cover of a cell complex by subcomplexes, with nonemptiness flags per tuple.
class CoverNerve {
public:
    CoverNerve() = default;
    /// Flags are read off the intersections.
    CoverNerve(ComplexPtr space, std::vector<CellSet> sets);
    /// Explicit flags, keyed by tuples in any order; checked by validate().
    CoverNerve(ComplexPtr space, std::vector<CellSet> sets, const std::vector<std::pair<Tuple, bool>>& flags);

    /// Throws MalformedNerve on: non-subcomplex members, uncovered cells, flags that conflict
    /// under reordering, flags that are not downward closed, flags that disagree with intersections.
    void validate() const;

    const ComplexPtr& space() const { return space_; }
    int size() const { return static_cast<int>(sets_.size()); }
    const CellSet& set(int i) const { return sets_.at(i); }
    const std::vector<CellSet>& sets() const { return sets_; }
    CellSet intersection(const Tuple& t) const;
    bool nonempty(Tuple t) const;
    /// Nonempty sorted tuples of the given length, lexicographic.
    std::vector<Tuple> tuples(std::size_t length) const;
    /// Smallest index whose set contains the cell.
    int first_index(topology::CellId c) const;

    /// The cover {U_i x S1} of the product; `product` must be product_with_circle(space()).
    CoverNerve times_circle(const ComplexPtr& product) const;

private:
    ComplexPtr space_;
    std::vector<CellSet> sets_;
    std::map<Tuple, bool> flags_;
    std::vector<std::string> conflicts_;
};

/// Cochains of one bidegree: sorted tuple -> full-length cochain over ambient cells, supported on U_t.
using TupleCochains = std::map<Tuple, algebra::IntVector>;

/// A total cochain of the Čech-cellular double complex; parts[p] has cellular degree `degree - p`.
struct TotalCochain {
    int degree = 0;
    std::vector<TupleCochains> parts;
};

/// Value on a tuple in any order (with the permutation sign); zero if absent.
algebra::IntVector component(const CoverNerve& N, const TupleCochains& c, Tuple t, int q);
/// D = delta_Cech + (-1)^p delta_cell.
TotalCochain total_differential(const CoverNerve& N, const TotalCochain& x);
/// Class in H^degree(space) of a D-cocycle, by repeatedly removing the top Čech component.
CohClass zigzag_class(const CoverNerve& N, const TotalCochain& x);

/// Line-bundle classes p_ij (cellular 2-cochains), section data theta_ijk (1-cochains),
/// and integral lifts epsilon_ijkl (0-cochains) of the circle-valued identity "delta theta = 1".
struct TwoGerbe {
    CoverNerve nerve;
    TupleCochains p, theta, epsilon;

    TotalCochain total() const;
    static TwoGerbe from_total(const CoverNerve& N, const TotalCochain& x);
};

/// Classes A_ij (3-cochains), line bundles Gamma_ijk (2-cochains), eta_ijkl (1-cochains),
/// and integral lifts zeta_ijklm (0-cochains).
struct ThreeGerbe {
    CoverNerve nerve;
    TupleCochains A, Gamma, eta, zeta;

    TotalCochain total() const;
    static ThreeGerbe from_total(const CoverNerve& N, const TotalCochain& x);
};

struct ReportEntry {
    std::string condition;
    bool pass = true;
    std::optional<Tuple> witness;
    std::string detail;
};

struct GerbeReport {
    std::vector<ReportEntry> entries;
    std::optional<CohClass> characteristic_class;

    bool valid() const;
    const ReportEntry& entry(const std::string& condition) const;
    nlohmann::json to_json() const;
};

GerbeReport check_two_gerbe(const TwoGerbe& G);
GerbeReport check_three_gerbe(const ThreeGerbe& T);

/// Degree-3 class; throws InvalidGerbe unless the gerbe passes its checks.
CohClass characteristic_class(const TwoGerbe& G);
/// Degree-4 class on the product.
CohClass characteristic_class(const ThreeGerbe& T);

/// Every datum crossed with the fiber class z; the nerve becomes {U_i x S1}.
ThreeGerbe tdualize_two_gerbe(const TwoGerbe& G, const ComplexPtr& product = nullptr);

/// Componentwise sum (tensor product of gerbes on the same nerve).
TwoGerbe tensor(const TwoGerbe& a, const TwoGerbe& b);

/// Which datum a gauge transformation acts through.
enum class GaugeSlot { Pair, Triple, Global };
/// Adds D b for a random b concentrated in one slot: Pair shifts p by coboundaries (theta compensates),
/// Triple shifts theta (epsilon compensates), Global shifts p by the Čech coboundary of local cocycles.
TwoGerbe gauge_perturb(const TwoGerbe& G, GaugeSlot slot, std::mt19937_64& rng);

/// Random valid 2-gerbe on the boundary of the 4-simplex with a random cover of the given size
/// (2..6), built from a random global 3-cocycle whose class it carries.
struct RandomGerbe {
    TwoGerbe gerbe;
    CohClass klass;
};
RandomGerbe random_two_gerbe(std::mt19937_64& rng, int cover_size, long max_class = 5);

/// S3 as two discs N and S glued along their shell, with p_NS = n times the shell class.
TwoGerbe clutching_gerbe(long n);

/// Base B with the complement B - F modelled by the cells labeled `shell_label`.
struct CompactificationModel {
    ComplexPtr base;
    std::string shell_label = "shell";
};

struct SemifreeGerbe {
    ComplexPtr compactification;   // B+ = B with a cone on the shell
    CohClass relative;              // in H3(B, B - F)
    CohClass klass;                 // in H3(B+)
    TwoGerbe gerbe;                 // cover {B, cone}, overlap the shell
};
/// lambda in H2(B - F) pushed through H3(B, B-F) ~ H3(B+, B+ - F) -> H3(B+).
SemifreeGerbe semifree_class_to_two_gerbe(const CohClass& lambda, const CompactificationModel& model);

nlohmann::json to_json(const CoverNerve& N);
nlohmann::json to_json(const TwoGerbe& G);
nlohmann::json to_json(const ThreeGerbe& T);
/// {"space": builtin name or complex, "cover": [{"label"} | {"cells"}], "nerve"?: [{"tuple", "nonempty"}],
///  "p"/"theta"/"epsilon": [{"tuple", "cochain": {cell: coeff} | [coeffs]}]}
TwoGerbe two_gerbe_from_json(const nlohmann::json& j);

}  // namespace tdual::gerbe
