#include "tdual/cohomology.hpp"

#include <sstream>

namespace tdual::topology {

using algebra::IntMatrix;
using algebra::IntVector;

std::string AbelianGroup::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    if (free_rank > 0) {
        os << "Z";
        if (free_rank > 1) os << "^" << free_rank;
        first = false;
    }
    for (const auto& t : torsion) {
        os << (first ? "" : " + ") << "Z_" << t;
        first = false;
    }
    return os.str();
}

// --- pairs ----------------------------------------------------------------

Pair Pair::whole(ComplexPtr X) {
    CellSet all = X->all(), none = X->none();
    return Pair{std::move(X), std::move(all), std::move(none)};
}

Pair Pair::labeled(ComplexPtr X, const std::string& space_label, const std::string& sub_label) {
    CellSet space = space_label.empty() ? X->all() : X->labeled(space_label);
    CellSet sub = sub_label.empty() ? X->none() : X->labeled(sub_label);
    return of(std::move(X), std::move(space), std::move(sub));
}

Pair Pair::of(ComplexPtr X, CellSet space, CellSet sub) {
    if (!X->is_subcomplex(space)) throw NotASubcomplex("space is not a subcomplex");
    if (!X->is_subcomplex(sub)) throw NotASubcomplex("subspace is not a subcomplex");
    if (!sub.subset_of(space)) throw NotASubcomplex("subspace is not contained in the space");
    return Pair{std::move(X), std::move(space), std::move(sub)};
}

std::vector<std::size_t> Pair::relative_cells(int k) const {
    std::vector<std::size_t> out;
    if (k < 0 || k > ambient->dimension()) return out;
    for (std::size_t i : space.indices(k))
        if (!sub.contains({k, i})) out.push_back(i);
    return out;
}

IntMatrix coboundary_matrix(const Pair& P, int k) {
    const auto cols = P.relative_cells(k);
    const auto rows = P.relative_cells(k + 1);
    IntMatrix m(rows.size(), cols.size());
    if (cols.empty() || rows.empty()) return m;
    std::vector<long> position(P.ambient->count(k), -1);
    for (std::size_t j = 0; j < cols.size(); ++j) position[cols[j]] = static_cast<long>(j);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& [f, c] : P.ambient->cells(k + 1)[rows[i]].boundary)
            if (position[f] >= 0) m(i, static_cast<std::size_t>(position[f])) = c;
    return m;
}

// --- groups ---------------------------------------------------------------

namespace {

struct Quotient {
    IntMatrix Z, U, U_inv;
    IntVector diag;
    std::vector<std::size_t> kept;
    std::vector<BigInt> moduli;
    AbelianGroup group;
};

// ker(out) / im(in) for out: C -> C', in: C'' -> C.
Quotient quotient_group(const IntMatrix& out, const IntMatrix& in, std::size_t n) {
    Quotient q;
    q.Z = out.rows() == 0 ? IntMatrix::identity(n) : algebra::kernel_basis(out);
    const std::size_t z = q.Z.cols();
    IntMatrix M(z, in.cols());
    for (std::size_t j = 0; j < in.cols(); ++j) {
        auto w = algebra::solve(q.Z, in.column(j));
        if (!w) throw std::logic_error("image of the incoming differential is not inside the kernel");
        for (std::size_t i = 0; i < z; ++i) M(i, j) = (*w)[i];
    }
    algebra::SmithForm s = algebra::smith_normal_form(M);
    q.U = s.U;
    q.U_inv = s.U_inv;
    q.diag.assign(z, 0);
    for (std::size_t i = 0; i < s.diagonal.size(); ++i) q.diag[i] = s.diagonal[i];
    for (std::size_t i = 0; i < z; ++i) {
        if (q.diag[i] == 1) continue;
        q.kept.push_back(i);
        q.moduli.push_back(q.diag[i]);
        if (q.diag[i] == 0)
            ++q.group.free_rank;
        else
            q.group.torsion.push_back(q.diag[i]);
    }
    return q;
}

}  // namespace

CohomologyGroup::CohomologyGroup(Pair pair, int degree) : pair_(std::move(pair)), degree_(degree) {
    cells_ = pair_.relative_cells(degree_);
    delta_ = coboundary_matrix(pair_, degree_);
    incoming_ = degree_ > 0 ? coboundary_matrix(pair_, degree_ - 1) : IntMatrix(cells_.size(), 0);
    Quotient q = quotient_group(delta_, incoming_, cells_.size());
    Z_ = std::move(q.Z);
    U_ = std::move(q.U);
    U_inv_ = std::move(q.U_inv);
    diag_ = std::move(q.diag);
    kept_ = std::move(q.kept);
    moduli_ = std::move(q.moduli);
    group_ = std::move(q.group);
}

bool CohomologyGroup::is_cocycle(const IntVector& cochain) const {
    if (degree_ < 0 || cochain.size() != pair_.ambient->count(degree_)) return false;
    IntVector rel(cells_.size());
    std::vector<char> inside(cochain.size(), 0);
    for (std::size_t j = 0; j < cells_.size(); ++j) {
        rel[j] = cochain[cells_[j]];
        inside[cells_[j]] = 1;
    }
    for (std::size_t i = 0; i < cochain.size(); ++i)
        if (!inside[i] && cochain[i] != 0) return false;
    return algebra::is_zero(delta_ * rel);
}

IntVector CohomologyGroup::reduce(IntVector coords) const {
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (moduli_[i] != 0) {
            coords[i] %= moduli_[i];
            if (coords[i] < 0) coords[i] += moduli_[i];
        }
    return coords;
}

IntVector CohomologyGroup::coordinates(const IntVector& cochain) const {
    if (!is_cocycle(cochain)) throw NotACocycle("cochain is not a relative cocycle in degree " + std::to_string(degree_));
    IntVector rel(cells_.size());
    for (std::size_t j = 0; j < cells_.size(); ++j) rel[j] = cochain[cells_[j]];
    auto w = algebra::solve(Z_, rel);
    if (!w) throw std::logic_error("cocycle outside the kernel lattice");
    IntVector y = U_ * *w;
    IntVector coords;
    for (std::size_t i : kept_) coords.push_back(y[i]);
    return reduce(coords);
}

IntVector CohomologyGroup::representative(const IntVector& coords) const {
    if (coords.size() != kept_.size()) throw std::invalid_argument("coordinate vector has the wrong length");
    IntVector y(diag_.size());
    for (std::size_t i = 0; i < kept_.size(); ++i) y[kept_[i]] = coords[i];
    IntVector rel = Z_ * (U_inv_ * y);
    IntVector full(pair_.ambient->count(degree_));
    for (std::size_t j = 0; j < cells_.size(); ++j) full[cells_[j]] = rel[j];
    return full;
}

bool CohomologyGroup::is_coboundary(const IntVector& cochain) const {
    return is_cocycle(cochain) && algebra::is_zero(coordinates(cochain));
}

AbelianGroup cohomology(const CellComplex& X, int k) {
    return CohomologyGroup(Pair::whole(std::make_shared<const CellComplex>(X)), k).group();
}

AbelianGroup relative_cohomology(const ComplexPtr& X, const CellSet& A, int k) {
    return CohomologyGroup(Pair::of(X, X->all(), A), k).group();
}

AbelianGroup homology(const CellComplex& X, int k) {
    if (k < 0) return {};
    return quotient_group(X.boundary_matrix(k), X.boundary_matrix(k + 1), X.count(k)).group;
}

// --- classes --------------------------------------------------------------

CohClass class_from_coordinates(const CohomologyGroup& H, const IntVector& coords) {
    return CohClass{H.pair(), H.degree(), H.representative(coords)};
}

IntVector coordinates(const CohClass& c) { return CohomologyGroup(c.pair, c.degree).coordinates(c.cochain); }

namespace {
void require_same_home(const CohClass& a, const CohClass& b) {
    if (a.degree != b.degree || a.pair.ambient != b.pair.ambient || !(a.pair.space == b.pair.space) || !(a.pair.sub == b.pair.sub))
        throw std::invalid_argument("classes live in different groups");
}
}  // namespace

bool same_class(const CohClass& a, const CohClass& b) {
    require_same_home(a, b);
    CohomologyGroup H(a.pair, a.degree);
    return H.coordinates(a.cochain) == H.coordinates(b.cochain);
}

CohClass add(const CohClass& a, const CohClass& b) {
    require_same_home(a, b);
    return CohClass{a.pair, a.degree, algebra::add(a.cochain, b.cochain)};
}

CohClass scale(const CohClass& a, const BigInt& k) { return CohClass{a.pair, a.degree, algebra::scale(a.cochain, k)}; }

bool is_zero_class(const CohClass& c) { return algebra::is_zero(coordinates(c)); }

// --- maps -----------------------------------------------------------------

IntMatrix induced_map(const CohomologyGroup& from, const CohomologyGroup& to,
                      const std::function<IntVector(const IntVector&)>& cochain_map) {
    IntMatrix m(to.generator_count(), from.generator_count());
    for (std::size_t j = 0; j < from.generator_count(); ++j) {
        IntVector e(from.generator_count());
        e[j] = 1;
        IntVector image = to.coordinates(cochain_map(from.representative(e)));
        for (std::size_t i = 0; i < image.size(); ++i) m(i, j) = image[i];
    }
    return m;
}

IntVector restrict_cochain(const Pair& from, const Pair& to, int k, const IntVector& c) {
    if (from.ambient != to.ambient) throw std::invalid_argument("restriction across different complexes");
    if (!to.space.subset_of(from.space) || !to.sub.subset_of(from.sub))
        throw NotASubcomplex("target pair is not included in the source pair");
    IntVector out(c.size());
    for (std::size_t i : to.relative_cells(k)) out[i] = c[i];
    return out;
}

IntVector connecting_cochain(const Pair& XA, int k, const IntVector& c) {
    IntVector out(XA.ambient->count(k + 1));
    for (std::size_t s : XA.relative_cells(k + 1))
        for (const auto& [f, inc] : XA.ambient->cells(k + 1)[s].boundary) out[s] += inc * c[f];
    return out;
}

IntMatrix restriction_map(const CohomologyGroup& from, const CohomologyGroup& to) {
    const int k = from.degree();
    return induced_map(from, to, [&](const IntVector& c) { return restrict_cochain(from.pair(), to.pair(), k, c); });
}

namespace {
IntMatrix relation_columns(const std::vector<BigInt>& moduli) {
    std::vector<IntVector> cols;
    for (std::size_t i = 0; i < moduli.size(); ++i)
        if (moduli[i] != 0) {
            IntVector v(moduli.size());
            v[i] = moduli[i];
            cols.push_back(v);
        }
    return IntMatrix::from_columns(moduli.size(), cols);
}
}  // namespace

bool exact_at(const IntMatrix& f, const IntMatrix& g, const std::vector<BigInt>& m2, const std::vector<BigInt>& m3) {
    const std::size_t n2 = m2.size();
    if (f.rows() != n2 || g.cols() != n2 || g.rows() != m3.size()) throw std::invalid_argument("exactness check shape mismatch");
    if (n2 == 0) return true;
    IntMatrix L2 = relation_columns(m2), L3 = relation_columns(m3);
    IntMatrix image = f.hstack(L2);
    IntMatrix K = algebra::kernel_basis(g.hstack(L3));
    std::vector<std::size_t> top(n2);
    for (std::size_t i = 0; i < n2; ++i) top[i] = i;
    IntMatrix kernel = K.select_rows(top).hstack(L2);
    return algebra::lattice_equal(image, kernel);
}

std::size_t map_rank(const IntMatrix& f) { return algebra::smith_normal_form(f).rank; }

bool is_isomorphism(const IntMatrix& f, const std::vector<BigInt>& m_from, const std::vector<BigInt>& m_to) {
    IntMatrix into(m_from.size(), 0);
    IntMatrix out(0, m_to.size());
    return exact_at(into, f, m_from, m_to) && exact_at(f, out, m_to, {});
}

bool LongExactSequence::exact() const {
    for (const auto& n : nodes)
        if (!n.exact) return false;
    return true;
}

nlohmann::json LongExactSequence::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nlohmann::json n = {{"node", nodes[i].name}, {"group", nodes[i].group.to_string()}, {"exact", nodes[i].exact}};
        if (i < maps.size()) n["map_to_next"] = maps[i].to_string();
        j.push_back(n);
    }
    return j;
}

LongExactSequence long_exact_sequence(const Pair& XA) {
    const Pair X = Pair::of(XA.ambient, XA.space, XA.ambient->none());
    const Pair A = Pair::of(XA.ambient, XA.sub, XA.ambient->none());
    const int top = XA.ambient->dimension();

    std::vector<CohomologyGroup> groups;
    LongExactSequence seq;
    for (int k = 0; k <= top; ++k) {
        groups.emplace_back(XA, k);
        groups.emplace_back(X, k);
        groups.emplace_back(A, k);
        const std::string d = std::to_string(k);
        for (const char* fmt : {"H^%(X,A)", "H^%(X)", "H^%(A)"}) {
            std::string name = fmt;
            name.replace(name.find('%'), 1, d);
            const auto& g = groups[groups.size() - 3 + seq.nodes.size() % 3];
            seq.nodes.push_back({name, k, g.group(), g.moduli(), true});
        }
    }
    for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
        const auto& from = groups[i];
        const auto& to = groups[i + 1];
        if (i % 3 == 2) {
            const int k = from.degree();
            seq.maps.push_back(induced_map(from, to, [&](const IntVector& c) { return connecting_cochain(XA, k, c); }));
        } else {
            seq.maps.push_back(restriction_map(from, to));
        }
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const std::size_t n = groups[i].generator_count();
        IntMatrix in = i == 0 ? IntMatrix(n, 0) : seq.maps[i - 1];
        IntMatrix out = i + 1 < groups.size() ? seq.maps[i] : IntMatrix(0, n);
        std::vector<BigInt> next = i + 1 < groups.size() ? groups[i + 1].moduli() : std::vector<BigInt>{};
        seq.nodes[i].exact = exact_at(in, out, groups[i].moduli(), next);
    }
    return seq;
}

// --- products with the circle ---------------------------------------------

namespace {
bool is_circle(const ComplexPtr& c) {
    return c && c->dimension() == 1 && c->count(0) == 1 && c->count(1) == 1 && c->cells(1)[0].boundary.empty();
}

const CellComplex& circle_base(const CellComplex& P) {
    if (!P.left_factor() || !is_circle(P.right_factor())) throw NotAProduct("complex is not a product with the circle");
    return *P.left_factor();
}
}  // namespace

Pair product_pair(const Pair& P, const ComplexPtr& product) {
    const CellComplex& X = circle_base(*product);
    if (!(X == *P.ambient)) throw NotAProduct("product was built from a different complex");
    CellSet space = product->none(), sub = product->none();
    for (int d = 0; d <= X.dimension(); ++d)
        for (std::size_t i = 0; i < X.count(d); ++i)
            for (int t = 0; t <= 1; ++t) {
                CellId id = *product->product_cell({d, i}, {t, 0});
                if (P.space.contains({d, i})) space.insert(id);
                if (P.sub.contains({d, i})) sub.insert(id);
            }
    return Pair::of(product, std::move(space), std::move(sub));
}

CohClass cross_with_z(const CohClass& c, const ComplexPtr& product) {
    const CellComplex& X = circle_base(*product);
    if (c.degree < 0 || c.degree + 1 > product->dimension())
        throw DegreeOverflow("degree " + std::to_string(c.degree) + " has no cross product with z in this complex");
    CohClass out{product_pair(c.pair, product), c.degree + 1, IntVector(product->count(c.degree + 1))};
    for (std::size_t i = 0; i < X.count(c.degree); ++i) {
        CellId id = *product->product_cell({c.degree, i}, {1, 0});
        out.cochain[id.index] = c.cochain.at(i);
    }
    return out;
}

CohClass fiber_integrate(const CohClass& c) {
    const ComplexPtr& P = c.pair.ambient;
    const CellComplex& X = circle_base(*P);
    if (c.degree < 1) throw DegreeOverflow("fiber integration needs degree at least 1");
    CellSet space = X.none(), sub = X.none();
    for (int d = 0; d <= X.dimension(); ++d)
        for (std::size_t i = 0; i < X.count(d); ++i) {
            if (c.pair.space.contains(*P->product_cell({d, i}, {0, 0}))) space.insert({d, i});
            if (c.pair.sub.contains(*P->product_cell({d, i}, {0, 0}))) sub.insert({d, i});
        }
    Pair base = Pair::of(P->left_factor(), std::move(space), std::move(sub));
    if (!(product_pair(base, P).space == c.pair.space) || !(product_pair(base, P).sub == c.pair.sub))
        throw NotAProduct("pair is not a product of a base pair with the circle");
    CohClass out{base, c.degree - 1, IntVector(X.count(c.degree - 1))};
    for (std::size_t i = 0; i < X.count(c.degree - 1); ++i)
        out.cochain[i] = c.cochain.at(P->product_cell({c.degree - 1, i}, {1, 0})->index);
    return out;
}

// --- chain maps -----------------------------------------------------------

void ChainMap::verify() const {
    const int top = std::max(source->dimension(), target->dimension());
    for (int k = 0; k <= top; ++k) {
        const IntMatrix& f = degree.at(k);
        if (f.rows() != target->count(k) || f.cols() != source->count(k)) throw NotAChainMap("chain map has the wrong shape");
        if (k == 0) continue;
        if (!(target->boundary_matrix(k) * f == degree[k - 1] * source->boundary_matrix(k)))
            throw NotAChainMap("map does not commute with the boundary in degree " + std::to_string(k));
    }
}

IntMatrix ChainMap::induced(int k) const {
    CohomologyGroup Ht(Pair::whole(target), k), Hs(Pair::whole(source), k);
    const IntMatrix ft = degree.at(k).transpose();
    return induced_map(Ht, Hs, [&](const IntVector& c) { return ft * c; });
}

ChainMap collapse_map(const ComplexPtr& btilde, const ComplexPtr& thom, const std::string& region) {
    if (!btilde->has_label(region)) throw LabelMismatch("no cells labeled '" + region + "'");
    auto base = thom->lookup("*");
    if (!base || base->dim != 0) throw LabelMismatch("target has no basepoint");
    ChainMap f{btilde, thom, {}};
    const int top = std::max(btilde->dimension(), thom->dimension());
    std::set<std::string> hit;
    for (int k = 0; k <= top; ++k) {
        IntMatrix m(thom->count(k), btilde->count(k));
        for (std::size_t i = 0; i < btilde->count(k); ++i) {
            const Cell& c = btilde->cells(k)[i];
            if (c.labels.count(region) && !c.labels.count("boundary")) {
                auto t = thom->lookup(c.name);
                if (!t || t->dim != k) throw LabelMismatch("cell " + c.name + " has no counterpart in the Thom space");
                m(t->index, i) = 1;
                hit.insert(c.name);
            } else if (k == 0) {
                m(base->index, i) = 1;
            }
        }
        f.degree.push_back(std::move(m));
    }
    if (hit.size() + 1 != thom->total_cells()) throw LabelMismatch("Thom space has cells outside the labeled region");
    f.verify();
    return f;
}

nlohmann::json to_json(const AbelianGroup& g) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& x : g.torsion) t.push_back(x.str());
    return {{"free_rank", g.free_rank}, {"torsion", t}, {"text", g.to_string()}};
}

nlohmann::json to_json(const CohClass& c) {
    nlohmann::json coords = nlohmann::json::array();
    for (const auto& x : coordinates(c)) coords.push_back(x.str());
    nlohmann::json cochain = nlohmann::json::array();
    for (std::size_t i = 0; i < c.cochain.size(); ++i)
        if (c.cochain[i] != 0) cochain.push_back({c.pair.ambient->cells(c.degree)[i].name, c.cochain[i].str()});
    return {{"degree", c.degree}, {"coordinates", coords}, {"cochain", cochain}};
}

}  // namespace tdual::topology
