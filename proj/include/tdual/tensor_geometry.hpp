#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdual/symbolic.hpp"

namespace tdual::geometry {

class SingularG00 : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class SingularJacobian : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class DuplicateCenters : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class IndexOutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};
class InvalidChart : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Coordinate names used by the builtin geometries.
inline const std::string kKappa = "kappa";
inline const std::string kR = "r";
inline const std::string kTheta = "theta";
inline const std::string kPhi = "phi";
inline const std::string kCoupling = "g";
inline const std::string kBeta = "beta";

/// Ordered coordinates. Index 0 is always the dualized (fiber) direction.
struct Chart {
    std::vector<std::string> names;
    std::vector<bool> periodic;

    std::size_t dimension() const { return names.size(); }
    std::size_t index_of(const std::string& name) const;
    Expr coordinate(std::size_t i) const { return Expr::symbol(names.at(i)); }
    void validate() const;

    /// (kappa, r, theta, phi) with kappa and phi periodic.
    static Chart fibered_spherical();
    /// Moves `fiber` to index 0, keeping the relative order of the rest.
    static Chart with_fiber_first(const Chart& c, const std::string& fiber, std::vector<std::size_t>& permutation);

    friend bool operator==(const Chart&, const Chart&) = default;
};

/// Symmetric matrix stored once per unordered index pair.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(std::size_t n = 0) : n_(n), data_(n * (n + 1) / 2) {}
    std::size_t size() const { return n_; }
    const Expr& operator()(std::size_t i, std::size_t j) const { return data_[slot(i, j)]; }
    void set(std::size_t i, std::size_t j, Expr e) { data_[slot(i, j)] = std::move(e); }

private:
    std::size_t slot(std::size_t i, std::size_t j) const;
    std::size_t n_;
    std::vector<Expr> data_;
};

/// Antisymmetric matrix stored once per strictly ordered pair i < j.
class AntisymmetricMatrix {
public:
    explicit AntisymmetricMatrix(std::size_t n = 0) : n_(n), data_(n * (n > 0 ? n - 1 : 0) / 2) {}
    std::size_t size() const { return n_; }
    Expr operator()(std::size_t i, std::size_t j) const;
    void set(std::size_t i, std::size_t j, Expr e);

private:
    std::size_t slot(std::size_t i, std::size_t j) const;
    std::size_t n_;
    std::vector<Expr> data_;
};

struct MetricData {
    Chart chart;
    SymmetricMatrix g;
    AntisymmetricMatrix b;

    MetricData() = default;
    explicit MetricData(Chart c) : chart(std::move(c)), g(chart.dimension()), b(chart.dimension()) {}
};

/// Sparse differential form, keyed by strictly increasing index tuples.
class DiffForm {
public:
    DiffForm(Chart chart, int degree);

    const Chart& chart() const { return chart_; }
    int degree() const { return degree_; }
    /// Coefficient for any index tuple; reorders with the permutation sign.
    Expr component(std::vector<int> indices) const;
    void set(std::vector<int> indices, Expr coefficient);
    const std::map<std::vector<int>, Expr>& terms() const { return terms_; }

    DiffForm scaled(const Expr& factor) const;
    friend DiffForm operator+(const DiffForm& a, const DiffForm& b);
    friend DiffForm operator-(const DiffForm& a, const DiffForm& b);

private:
    Chart chart_;
    int degree_;
    std::map<std::vector<int>, Expr> terms_;
};

/// Smooth map chart -> chart given by one target expression per coordinate.
struct Diffeo {
    Chart chart;
    std::vector<Expr> targets;
    std::optional<std::vector<Expr>> inverse;

    static Diffeo identity(const Chart& c);
    /// x_i -> x_i + amount, all other coordinates fixed.
    static Diffeo shift(const Chart& c, std::size_t index, const Expr& amount);
};

/// The composite x -> outer(inner(x)).
Diffeo compose(const Diffeo& outer, const Diffeo& inner);
/// Round-trip substitution through the declared inverse is the identity.
bool check_invertible(const Diffeo& f, const NumericOptions& opts = {});

/// The opaque single-center potential H(r, g) = g^-2 + 1/(2r).
Expr taub_nut_potential(const Expr& coupling = Expr::symbol(kCoupling));

/// Flat metric dr^2 + r^2 dtheta^2 + r^2 sin^2(theta) dphi^2 on the base,
/// as a 3x3 matrix over (r, theta, phi).
SymmetricMatrix flat_base_metric();

/// Expands H dr.dr + H^-1 (dkappa + 1/2 omega.dr)^2 over (kappa, r, theta, phi).
/// `omega` holds the (r, theta, phi) components.
MetricData gibbons_hawking_metric(const Expr& H, const std::array<Expr, 3>& omega);

/// H ((dkappa)^2 + dr.dr): the conformally flat product metric.
MetricData smeared_h_monopole(const Expr& H);

/// Taub-NUT with omega_phi = 1 - cos(theta) and H = taub_nut_potential(coupling).
MetricData make_taub_nut(const Expr& coupling = Expr::symbol(kCoupling));

enum class HNormalization {
    CouplingHalf,  // g^-2 + sum 1/(2|r - r_i|)
    UnitSum,       // 1 + sum 1/|r - r_i|
};

using Point3 = std::array<Rational, 3>;

/// Explicit multi-center harmonic data in spherical coordinates.
struct MultiCenter {
    std::vector<Point3> centers;
    HNormalization normalization = HNormalization::CouplingHalf;
    Expr constant;                              // g^-2 or 1
    Rational weight;                            // 1/2 or 1
    Expr H;                                     // constant + sum of center terms
    std::vector<Expr> center_terms;             // weight / |r - r_i|
    std::vector<std::array<Expr, 3>> monopole_potentials;  // weight (1 - cos theta_i) dphi_i
    std::array<Expr, 3> omega;                  // 2 * sum of monopole potentials
};

MultiCenter multi_center(std::vector<Point3> centers, HNormalization norm,
                         const Expr& coupling = Expr::symbol(kCoupling));
MetricData make_multi_taub_nut(const MultiCenter& mc);

/// Buscher dualization along coordinate 0, metric and B-field halves.
MetricData buscher_transform(const MetricData& m, const NumericOptions& opts = {});

DiffForm exterior_derivative(const DiffForm& form);

/// -(1/(g^2 H)) (dkappa + (1 - cos theta)/2 dphi); its exterior derivative
/// times beta is the dyonic B-field.
DiffForm dyonic_potential(const Expr& coupling = Expr::symbol(kCoupling));
/// Closed-form components of beta * d(dyonic_potential).
DiffForm dyonic_b_field(const Expr& beta, const Expr& coupling = Expr::symbol(kCoupling));

/// (H_i/H)(dkappa + omega/2) - alpha_i, whose derivative gives B_i / beta.
DiffForm multi_center_potential(const MultiCenter& mc, std::size_t i);
/// (1 - H_i/H)(dkappa + omega/2), potential of the alternate basis.
DiffForm multi_center_dual_basis_potential(const MultiCenter& mc, std::size_t i);
DiffForm multi_center_b_field(const MultiCenter& mc, std::size_t i, const Expr& beta);
DiffForm multi_center_dual_basis_b_field(const MultiCenter& mc, std::size_t i, const Expr& beta);

/// Installs a 2-form as the B-field of a metric on the same chart.
MetricData with_b_field(MetricData m, const DiffForm& b);

MetricData pullback(const MetricData& m, const Diffeo& f, const NumericOptions& opts = {});

enum class ShiftVariant { Gamma, Lambda };

/// Gamma: kappa -> kappa + beta/(g^2 H); Lambda: the same minus beta.
Diffeo dyonic_shift(const Expr& beta, ShiftVariant variant, const Expr& coupling = Expr::symbol(kCoupling));
/// Gamma: kappa -> kappa + beta (1 - H_i/H); Lambda: kappa -> kappa - beta H_i/H.
Diffeo multi_center_shift(const MultiCenter& mc, std::size_t i, const Expr& beta, ShiftVariant variant);

struct ComponentMismatch {
    std::size_t i = 0;
    std::size_t j = 0;
    bool b_field = false;
    NumericCheck check;
};

struct MetricComparison {
    bool equal = true;
    std::optional<ComponentMismatch> mismatch;
};

/// Componentwise equal_numeric on g and (optionally) b.
MetricComparison compare_metrics(const MetricData& a, const MetricData& b, const NumericOptions& opts = {},
                                 bool include_b = true);

class NotConformal : public std::runtime_error {
public:
    NotConformal(const std::string& what, ComponentMismatch w) : std::runtime_error(what), witness(std::move(w)) {}
    ComponentMismatch witness;
};

/// f with m = f * reference componentwise (metric part), or NotConformal.
Expr conformal_factor(const MetricData& m, const MetricData& reference, const NumericOptions& opts = {});

nlohmann::json to_json(const MetricData& m);
/// Accepts any coordinate order; the `fiber` coordinate is moved to index 0.
MetricData metric_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DiffForm& f);

}  // namespace tdual::geometry
