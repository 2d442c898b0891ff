#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdual/cell_complex.hpp"
#include "tdual/cohomology.hpp"
#include "tdual/symbolic.hpp"

namespace tdual::semifree {

using topology::AbelianGroup;
using topology::CellSet;
using topology::CohClass;
using topology::ComplexPtr;

class InvalidClass : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class DegreeMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
/// The source locus of a flux is not of the form F x S1.
class NotWrapped : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A semi-free circle space: base B, fixed locus F, and the free-orbit bundle class on a model of B - F.
struct SemifreeSpace {
    ComplexPtr base;
    CellSet fixed;
    CellSet complement;      // subcomplex modelling B - F up to homotopy
    CohClass lambda;         // canonical representative in H^2(complement)
    std::string name;

    algebra::IntVector coordinates() const;
    /// "trivial", "Taub-NUT", "charge-p monopole" or "semi-free".
    std::string kind() const;
    /// For complements with H^2 = Z: H^2 of the boundary circle bundle (lens space L(1,p)).
    std::optional<AbelianGroup> boundary_h2() const;
    nlohmann::json to_json() const;
};

/// Canonical record; throws InvalidClass unless F and the complement are disjoint subcomplexes
/// and lambda is a degree-2 cocycle on (complement, empty) of the same base.
SemifreeSpace classify(const ComplexPtr& base, const CellSet& fixed, const CellSet& complement, const CohClass& lambda,
                       const std::string& name = "");
/// Empty when the records agree; otherwise the first difference.
std::optional<std::string> distinguish(const SemifreeSpace& a, const SemifreeSpace& b);
bool operator==(const SemifreeSpace& a, const SemifreeSpace& b);

/// Cone on S2 with the cone point fixed and lambda = p times the Hopf class on the shell.
SemifreeSpace monopole_record(long p);
SemifreeSpace taub_nut_record();
/// D3 model, no fixed points, lambda = 0.
SemifreeSpace trivial_record();

struct ExtensionDescriptor {
    CohClass ideal_class;           // Dixmier-Douady class of the ideal over (B - F) x S1
    std::string ideal;               // description of the ideal
    std::string quotient;            // description of the quotient over F x S1
    std::vector<std::string> source_cells;
};

struct TDualRecord {
    ComplexPtr product;    // B x S1
    CellSet source;        // F x S1
    CellSet regular;       // complement x S1
    CohClass flux;         // lambda x z
    ExtensionDescriptor extension;
    bool round_trip = false;

    nlohmann::json to_json() const;
};

/// flux = lambda x z; throws InvalidClass if fiber integration does not return lambda.
TDualRecord tdualize(const SemifreeSpace& s, const ComplexPtr& product = nullptr);
/// Inverse direction: the source must be F x S1 (NotWrapped otherwise) and the flux a multiple of z.
SemifreeSpace classify_dual(const ComplexPtr& product, const CellSet& source, const CellSet& regular, const CohClass& flux);

struct HomotopyTable {
    std::size_t centers = 0;
    ComplexPtr model;                   // wedge of (p - 1) two-spheres
    std::vector<AbelianGroup> homology;   // H_0 .. H_3
};
HomotopyTable multi_center_homotopy(std::size_t centers);

/// Angles are stored as exact multiples of 2 pi.
using Turns = Rational;

struct OrbitAnalysis {
    std::string stabilizer;   // stabilizer in the dual line
    std::string dual_fiber;
    bool quotiented = false;
};
OrbitAnalysis analyze_orbit(bool fixed_point);

/// k1 and k2 (in units of 2 pi) cannot be separated by open sets iff k1 - k2 is an integer.
bool non_separable(const Turns& k1, const Turns& k2);

struct SpectrumModel {
    std::string space;                  // descriptor of the whole spectrum
    std::string regular_part;           // free-orbit region
    ComplexPtr regular_model;           // compact model of the free-orbit region
    CohClass flux;                      // on regular_model
    std::string fixed_fiber;            // fiber over the fixed locus
    std::optional<Turns> identification_step;   // glued line with x ~ x + step (non-Hausdorff)

    bool hausdorff() const { return !identification_step.has_value(); }
    /// Points over the fixed locus that cannot be separated from x (those with |l| <= range).
    std::vector<Turns> non_separable_family(const Turns& x, int range) const;
    nlohmann::json to_json() const;
};
bool operator==(const SpectrumModel& a, const SpectrumModel& b);

SpectrumModel test_example_spectrum();
/// Quotients the glued line by its identification, giving C0S2 x S1; Hausdorff models are returned unchanged.
SpectrumModel hausdorff_regularization(const SpectrumModel& m);
/// The regularized spectrum as a T-dual record over C0S2 x S1.
TDualRecord regularized_record(const SpectrumModel& m);

struct DyonicReport {
    bool action_invariant = false;     // alpha_1^* lambda = lambda
    algebra::IntMatrix induced;        // alpha_1^* on H^2
    CohClass lambda;
    CohClass dual_datum;               // lambda x z
    std::optional<BigInt> m;           // lambda = m * generator when H^2 = Z
    std::optional<Turns> beta;         // rotation parameter beta = 2 pi m, in turns

    nlohmann::json to_json() const;
};
/// `action` is the cellular model of the time-one map of the circle action (identity when cells are invariant).
DyonicReport dyonic_automorphism_check(const CohClass& lambda, const std::optional<topology::ChainMap>& action = std::nullopt);
/// Identity chain map, the time-one map for an action preserving every cell.
topology::ChainMap invariant_cell_action(const ComplexPtr& X);

}  // namespace tdual::semifree
