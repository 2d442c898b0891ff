#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdual/integer_matrix.hpp"

namespace tdual::topology {

class InvalidComplex : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class NotASubcomplex : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class UnknownSpace : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};
class BoundaryNotLabeled : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CellId {
    int dim = 0;
    std::size_t index = 0;
    auto operator<=>(const CellId&) const = default;
};

struct Cell {
    std::string name;
    std::set<std::string> labels;
    /// (index among (dim-1)-cells, incidence number)
    std::vector<std::pair<std::size_t, long>> boundary;
    /// Attaching faces of any lower degree with zero incidence (e.g. the vertex of a circle).
    std::vector<CellId> extra_faces;
    /// Factor cells when the complex is a product.
    std::optional<std::pair<CellId, CellId>> factors;
};

/// Membership flags per degree, relative to one ambient complex.
class CellSet {
public:
    CellSet() = default;
    explicit CellSet(const std::vector<std::size_t>& counts, bool value = false);

    bool contains(CellId c) const { return in_.at(c.dim)[c.index] != 0; }
    void insert(CellId c) { in_.at(c.dim)[c.index] = 1; }
    void erase(CellId c) { in_.at(c.dim)[c.index] = 0; }
    std::size_t count(int dim) const;
    std::size_t size() const;
    bool empty() const { return size() == 0; }
    int levels() const { return static_cast<int>(in_.size()); }
    /// Indices of member cells of the given degree, increasing.
    std::vector<std::size_t> indices(int dim) const;

    CellSet operator|(const CellSet& o) const;
    CellSet operator&(const CellSet& o) const;
    CellSet operator-(const CellSet& o) const;
    bool subset_of(const CellSet& o) const;
    friend bool operator==(const CellSet&, const CellSet&) = default;

private:
    std::vector<std::vector<char>> in_;
};

class CellComplex;
using ComplexPtr = std::shared_ptr<const CellComplex>;

/// Finite CW complex given by cells and integer incidence numbers.
class CellComplex {
public:
    int dimension() const { return static_cast<int>(cells_.size()) - 1; }
    std::size_t count(int k) const;
    std::vector<std::size_t> counts() const;
    std::size_t total_cells() const;
    const std::vector<Cell>& cells(int k) const { return cells_.at(k); }
    const Cell& cell(CellId id) const { return cells_.at(id.dim).at(id.index); }

    /// Lower-dimensional cells must exist before they are referenced.
    CellId add_cell(int dim, const std::string& name, const std::vector<std::pair<std::string, long>>& boundary = {},
                    const std::set<std::string>& labels = {}, const std::vector<std::string>& extra_faces = {});
    void add_label(CellId id, const std::string& label);
    void add_label(const CellSet& cells, const std::string& label);

    std::optional<CellId> lookup(const std::string& name) const;
    CellId find(const std::string& name) const;

    /// Rows: (k-1)-cells, columns: k-cells.
    algebra::IntMatrix boundary_matrix(int k) const;
    /// Throws InvalidComplex unless d_{k-1} d_k = 0 for all k.
    void validate() const;

    CellSet none() const { return CellSet(counts(), false); }
    CellSet all() const { return CellSet(counts(), true); }
    /// Cells carrying the label; throws NotASubcomplex if not closed under faces.
    CellSet labeled(const std::string& label) const;
    bool has_label(const std::string& label) const;
    bool is_subcomplex(const CellSet& s) const;
    CellSet closure(const CellSet& s) const;
    /// Faces of a cell: nonzero incidences plus declared attaching faces.
    std::vector<CellId> faces(CellId id) const;

    /// Product provenance (set by `product`).
    const ComplexPtr& left_factor() const { return left_; }
    const ComplexPtr& right_factor() const { return right_; }
    std::optional<CellId> product_cell(CellId a, CellId b) const;

    friend bool operator==(const CellComplex& a, const CellComplex& b);

private:
    friend CellComplex product(const ComplexPtr&, const ComplexPtr&);
    std::vector<std::vector<Cell>> cells_;
    std::map<std::string, CellId> by_name_;
    ComplexPtr left_, right_;
    std::map<std::pair<CellId, CellId>, CellId> product_index_;
};

// --- constructions --------------------------------------------------------

CellComplex point();
/// Minimal model: one 0-cell and one n-cell (two points for n = 0).
CellComplex sphere(int n);
/// One vertex v and one loop e.
CellComplex circle();
/// Cone over the (n-1)-sphere; its base is labeled "boundary", the cone point "apex".
CellComplex disk(int n);
/// Cone over X: base cells keep their labels, new cells are labeled "cone".
CellComplex cone(const CellComplex& X, const std::string& tag = "c");
/// X with a cone attached along the subcomplex A; new cells and A are labeled `tag`.
CellComplex attach_cone(const CellComplex& X, const CellSet& A, const std::string& tag);
/// Cells sigma x tau with d(s x t) = ds x t + (-1)^|s| s x dt; labels are unioned.
CellComplex product(const ComplexPtr& X, const ComplexPtr& Y);
CellComplex product_with_circle(const ComplexPtr& X);
/// X/A: cells of X - A plus a basepoint "*".
CellComplex quotient(const CellComplex& X, const CellSet& A);
/// D(F)/S(F) with S(F) the cells labeled "boundary".
CellComplex thom_space(const CellComplex& disc_bundle);
/// F x D^k with the sphere bundle F x S^{k-1} labeled "boundary".
CellComplex trivial_disc_bundle(const ComplexPtr& F, int k);

CellComplex wedge_of_spheres(std::size_t count, int n);
CellComplex complex_projective_plane();
/// Circle bundle of Chern class p over S^2: one cell per degree 0..3, d e2 = p e1.
CellComplex lens_space(long p);
/// Boundary of the n-simplex (vertices 0..n), with simplicial orientation signs.
CellComplex boundary_of_simplex(int n);

/// D^3 with shell S^2 ("shell") and cone point ("F").
CellComplex cone_on_sphere2();
/// D^3 ("N") with a second cone ("S") on its shell: the two-disc model of S^3.
CellComplex sphere3_two_discs();

/// Names: point, S0..S4, S1, D3, coneS2, S3, S2xS1, S3xS1, CP2, L1p:<p>, wedge:<n>, dS4, C0S2xS1.
CellComplex builtin(const std::string& name);
std::vector<std::string> builtin_names();

nlohmann::json to_json(const CellComplex& X);
/// {"cells": [{"name", "dim", "boundary": [[name, coeff], ...], "labels": [...], "faces": [...]}]}
CellComplex complex_from_json(const nlohmann::json& j);

}  // namespace tdual::topology
