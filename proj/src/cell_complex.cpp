#include "tdual/cell_complex.hpp"

#include <algorithm>
#include <charconv>
#include <functional>

namespace tdual::topology {

using algebra::IntMatrix;

CellSet::CellSet(const std::vector<std::size_t>& counts, bool value) {
    for (std::size_t n : counts) in_.emplace_back(n, value ? 1 : 0);
}

std::size_t CellSet::count(int dim) const {
    if (dim < 0 || dim >= levels()) return 0;
    return static_cast<std::size_t>(std::count(in_[dim].begin(), in_[dim].end(), 1));
}

std::size_t CellSet::size() const {
    std::size_t n = 0;
    for (int d = 0; d < levels(); ++d) n += count(d);
    return n;
}

std::vector<std::size_t> CellSet::indices(int dim) const {
    std::vector<std::size_t> out;
    if (dim < 0 || dim >= levels()) return out;
    for (std::size_t i = 0; i < in_[dim].size(); ++i)
        if (in_[dim][i]) out.push_back(i);
    return out;
}

namespace {
template <class Op>
CellSet combine(const std::vector<std::vector<char>>& a, const std::vector<std::vector<char>>& b, Op op) {
    if (a.size() != b.size()) throw std::invalid_argument("cell sets from different complexes");
    std::vector<std::size_t> counts;
    for (const auto& level : a) counts.push_back(level.size());
    CellSet out(counts);
    for (std::size_t d = 0; d < a.size(); ++d) {
        if (a[d].size() != b[d].size()) throw std::invalid_argument("cell sets from different complexes");
        for (std::size_t i = 0; i < a[d].size(); ++i)
            if (op(a[d][i] != 0, b[d][i] != 0)) out.insert({static_cast<int>(d), i});
    }
    return out;
}
}  // namespace

CellSet CellSet::operator|(const CellSet& o) const { return combine(in_, o.in_, [](bool x, bool y) { return x || y; }); }
CellSet CellSet::operator&(const CellSet& o) const { return combine(in_, o.in_, [](bool x, bool y) { return x && y; }); }
CellSet CellSet::operator-(const CellSet& o) const { return combine(in_, o.in_, [](bool x, bool y) { return x && !y; }); }

bool CellSet::subset_of(const CellSet& o) const { return (*this - o).empty(); }

// ---------------------------------------------------------------------------

std::size_t CellComplex::count(int k) const {
    if (k < 0 || k > dimension()) return 0;
    return cells_[k].size();
}

std::vector<std::size_t> CellComplex::counts() const {
    std::vector<std::size_t> c;
    for (const auto& level : cells_) c.push_back(level.size());
    return c;
}

std::size_t CellComplex::total_cells() const {
    std::size_t n = 0;
    for (const auto& level : cells_) n += level.size();
    return n;
}

CellId CellComplex::add_cell(int dim, const std::string& name, const std::vector<std::pair<std::string, long>>& boundary,
                             const std::set<std::string>& labels, const std::vector<std::string>& extra_faces) {
    if (dim < 0) throw InvalidComplex("negative cell dimension");
    if (by_name_.count(name)) throw InvalidComplex("duplicate cell name " + name);
    if (dim == 0 && !boundary.empty()) throw InvalidComplex("0-cell " + name + " cannot have a boundary");
    Cell c;
    c.name = name;
    c.labels = labels;
    std::map<std::size_t, long> merged;
    auto resolve = [&](const std::string& face) {
        auto id = lookup(face);
        if (!id || id->dim != dim - 1) throw InvalidComplex("cell " + name + " refers to unknown face " + face);
        return id->index;
    };
    for (const auto& [face, coeff] : boundary) merged[resolve(face)] += coeff;
    for (const auto& [i, coeff] : merged)
        if (coeff != 0) c.boundary.emplace_back(i, coeff);
    for (const auto& f : extra_faces) {
        auto id = lookup(f);
        if (!id || id->dim >= dim) throw InvalidComplex("cell " + name + " refers to unknown face " + f);
        if (id->dim == dim - 1 && merged.count(id->index) && merged[id->index] != 0) continue;
        if (std::find(c.extra_faces.begin(), c.extra_faces.end(), *id) == c.extra_faces.end()) c.extra_faces.push_back(*id);
    }
    if (static_cast<int>(cells_.size()) <= dim) cells_.resize(dim + 1);
    CellId id{dim, cells_[dim].size()};
    cells_[dim].push_back(std::move(c));
    by_name_[name] = id;
    return id;
}

void CellComplex::add_label(CellId id, const std::string& label) { cells_.at(id.dim).at(id.index).labels.insert(label); }

void CellComplex::add_label(const CellSet& cells, const std::string& label) {
    for (int d = 0; d <= dimension(); ++d)
        for (std::size_t i : cells.indices(d)) add_label(CellId{d, i}, label);
}

std::optional<CellId> CellComplex::lookup(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

CellId CellComplex::find(const std::string& name) const {
    auto id = lookup(name);
    if (!id) throw std::invalid_argument("no cell named " + name);
    return *id;
}

IntMatrix CellComplex::boundary_matrix(int k) const {
    IntMatrix m(count(k - 1), count(k));
    if (k <= 0 || k > dimension()) return m;
    for (std::size_t j = 0; j < cells_[k].size(); ++j)
        for (const auto& [i, c] : cells_[k][j].boundary) m(i, j) = c;
    return m;
}

void CellComplex::validate() const {
    for (int k = 2; k <= dimension(); ++k)
        if (!(boundary_matrix(k - 1) * boundary_matrix(k)).is_zero())
            throw InvalidComplex("boundary of boundary is nonzero in degree " + std::to_string(k));
}

std::vector<CellId> CellComplex::faces(CellId id) const {
    const Cell& c = cell(id);
    std::vector<CellId> out;
    for (const auto& [i, coeff] : c.boundary) out.push_back({id.dim - 1, i});
    out.insert(out.end(), c.extra_faces.begin(), c.extra_faces.end());
    return out;
}

bool CellComplex::is_subcomplex(const CellSet& s) const {
    for (int d = 1; d <= dimension(); ++d)
        for (std::size_t i : s.indices(d))
            for (CellId f : faces({d, i}))
                if (!s.contains(f)) return false;
    return true;
}

CellSet CellComplex::closure(const CellSet& s) const {
    CellSet out = s;
    for (int d = dimension(); d >= 1; --d)
        for (std::size_t i : out.indices(d))
            for (CellId f : faces({d, i})) out.insert(f);
    return out;
}

bool CellComplex::has_label(const std::string& label) const {
    for (const auto& level : cells_)
        for (const auto& c : level)
            if (c.labels.count(label)) return true;
    return false;
}

CellSet CellComplex::labeled(const std::string& label) const {
    CellSet s = none();
    for (int d = 0; d <= dimension(); ++d)
        for (std::size_t i = 0; i < cells_[d].size(); ++i)
            if (cells_[d][i].labels.count(label)) s.insert({d, i});
    if (!is_subcomplex(s)) throw NotASubcomplex("cells labeled '" + label + "' are not closed under faces");
    return s;
}

std::optional<CellId> CellComplex::product_cell(CellId a, CellId b) const {
    auto it = product_index_.find({a, b});
    if (it == product_index_.end()) return std::nullopt;
    return it->second;
}

bool operator==(const CellComplex& a, const CellComplex& b) {
    if (a.counts() != b.counts()) return false;
    for (int d = 0; d <= a.dimension(); ++d)
        for (std::size_t i = 0; i < a.count(d); ++i) {
            const Cell& x = a.cells_[d][i];
            const Cell& y = b.cells_[d][i];
            if (x.name != y.name || x.labels != y.labels || x.boundary != y.boundary || x.extra_faces != y.extra_faces)
                return false;
        }
    return true;
}

// --- constructions --------------------------------------------------------

namespace {
std::vector<std::pair<std::string, long>> named_boundary(const CellComplex& X, CellId id,
                                                         const std::function<std::string(const std::string&)>& rename) {
    std::vector<std::pair<std::string, long>> out;
    for (const auto& [i, c] : X.cell(id).boundary) out.emplace_back(rename(X.cells(id.dim - 1)[i].name), c);
    return out;
}
std::vector<std::string> named_extra(const CellComplex& X, CellId id, const std::function<std::string(const std::string&)>& rename) {
    std::vector<std::string> out;
    for (CellId f : X.cell(id).extra_faces) out.push_back(rename(X.cell(f).name));
    return out;
}
std::string same(const std::string& s) { return s; }
}  // namespace

CellComplex point() {
    CellComplex X;
    X.add_cell(0, "p");
    return X;
}

CellComplex sphere(int n) {
    if (n < 0) throw std::invalid_argument("sphere dimension must be nonnegative");
    CellComplex X;
    X.add_cell(0, "p");
    if (n == 0)
        X.add_cell(0, "q");
    else
        X.add_cell(n, "s", {}, {}, {"p"});
    return X;
}

CellComplex circle() {
    CellComplex X;
    X.add_cell(0, "v");
    X.add_cell(1, "e", {}, {}, {"v"});
    return X;
}

CellComplex cone(const CellComplex& X, const std::string& tag) {
    CellComplex C;
    const std::string apex = tag + ":apex";
    auto coned = [&](const std::string& s) { return tag + "(" + s + ")"; };
    C.add_cell(0, apex, {}, {"apex", "cone"});
    for (int d = 0; d <= X.dimension(); ++d)
        for (std::size_t i = 0; i < X.count(d); ++i) {
            CellId id{d, i};
            C.add_cell(d, X.cell(id).name, named_boundary(X, id, same), X.cell(id).labels, named_extra(X, id, same));
        }
    for (int d = 0; d <= X.dimension(); ++d)
        for (std::size_t i = 0; i < X.count(d); ++i) {
            CellId id{d, i};
            const std::string& name = X.cell(id).name;
            std::vector<std::pair<std::string, long>> bd{{name, 1}};
            if (d == 0) {
                bd.emplace_back(apex, -1);
            } else {
                for (const auto& [f, c] : named_boundary(X, id, coned)) bd.emplace_back(f, -c);
            }
            std::vector<std::string> extra = named_extra(X, id, coned);
            if (d == 0) extra.push_back(apex);
            C.add_cell(d + 1, coned(name), bd, {"cone"}, extra);
        }
    C.validate();
    return C;
}

CellComplex attach_cone(const CellComplex& X, const CellSet& A, const std::string& tag) {
    if (!X.is_subcomplex(A)) throw NotASubcomplex("cone must be attached along a subcomplex");
    CellComplex Y;
    for (int d = 0; d <= X.dimension(); ++d)
        for (std::size_t i = 0; i < X.count(d); ++i) {
            CellId id{d, i};
            auto labels = X.cell(id).labels;
            if (A.contains(id)) labels.insert(tag);
            Y.add_cell(d, X.cell(id).name, named_boundary(X, id, same), labels, named_extra(X, id, same));
        }
    const std::string apex = tag + ":apex";
    auto coned = [&](const std::string& s) { return tag + "(" + s + ")"; };
    Y.add_cell(0, apex, {}, {tag});
    for (int d = 0; d <= X.dimension(); ++d)
        for (std::size_t i : A.indices(d)) {
            CellId id{d, i};
            const std::string& name = X.cell(id).name;
            std::vector<std::pair<std::string, long>> bd{{name, 1}};
            if (d == 0)
                bd.emplace_back(apex, -1);
            else
                for (const auto& [f, c] : named_boundary(X, id, coned)) bd.emplace_back(f, -c);
            std::vector<std::string> extra = named_extra(X, id, coned);
            if (d == 0) extra.push_back(apex);
            Y.add_cell(d + 1, coned(name), bd, {tag}, extra);
        }
    Y.validate();
    return Y;
}

CellComplex product(const ComplexPtr& X, const ComplexPtr& Y) {
    CellComplex P;
    auto name = [&](CellId a, CellId b) { return "(" + X->cell(a).name + "," + Y->cell(b).name + ")"; };
    const int top = X->dimension() + Y->dimension();
    for (int d = 0; d <= top; ++d)
        for (int i = std::max(0, d - Y->dimension()); i <= std::min(d, X->dimension()); ++i) {
            const int j = d - i;
            for (std::size_t a = 0; a < X->count(i); ++a)
                for (std::size_t b = 0; b < Y->count(j); ++b) {
                    CellId ca{i, a}, cb{j, b};
                    std::vector<std::pair<std::string, long>> bd;
                    std::vector<std::string> extra;
                    for (const auto& [f, c] : X->cell(ca).boundary) bd.emplace_back(name({i - 1, f}, cb), c);
                    const long sign = i % 2 == 0 ? 1 : -1;
                    for (const auto& [f, c] : Y->cell(cb).boundary) bd.emplace_back(name(ca, {j - 1, f}), sign * c);
                    for (CellId f : X->cell(ca).extra_faces) extra.push_back(name(f, cb));
                    for (CellId f : Y->cell(cb).extra_faces) extra.push_back(name(ca, f));
                    std::set<std::string> labels = X->cell(ca).labels;
                    labels.insert(Y->cell(cb).labels.begin(), Y->cell(cb).labels.end());
                    CellId id = P.add_cell(d, name(ca, cb), bd, labels, extra);
                    P.cells_[id.dim][id.index].factors = std::make_pair(ca, cb);
                    P.product_index_[{ca, cb}] = id;
                }
        }
    P.left_ = X;
    P.right_ = Y;
    P.validate();
    return P;
}

CellComplex product_with_circle(const ComplexPtr& X) { return product(X, std::make_shared<const CellComplex>(circle())); }

CellComplex quotient(const CellComplex& X, const CellSet& A) {
    if (!X.is_subcomplex(A)) throw NotASubcomplex("quotient by a non-subcomplex");
    CellComplex Q;
    Q.add_cell(0, "*", {}, {"basepoint"});
    auto rename = [&](int dim, std::size_t i) -> std::optional<std::string> {
        if (A.contains({dim, i})) {
            if (dim == 0) return std::string("*");
            return std::nullopt;
        }
        return X.cells(dim)[i].name;
    };
    for (int d = 0; d <= X.dimension(); ++d)
        for (std::size_t i = 0; i < X.count(d); ++i) {
            if (A.contains({d, i})) continue;
            const Cell& c = X.cells(d)[i];
            std::vector<std::pair<std::string, long>> bd;
            std::vector<std::string> extra;
            for (const auto& [f, k] : c.boundary)
                if (auto n = rename(d - 1, f)) bd.emplace_back(*n, k);
            bool touches = false;
            for (CellId f : X.faces({d, i})) {
                if (A.contains(f))
                    touches = true;
                else if (f.dim < d - 1 || std::none_of(c.boundary.begin(), c.boundary.end(), [&](const auto& b) { return b.first == f.index; }))
                    extra.push_back(X.cell(f).name);
            }
            // collapsed faces leave the basepoint as an attaching face
            if (touches) extra.push_back("*");
            Q.add_cell(d, c.name, bd, c.labels, extra);
        }
    Q.validate();
    return Q;
}

CellComplex thom_space(const CellComplex& disc_bundle) {
    if (!disc_bundle.has_label("boundary")) throw BoundaryNotLabeled("disc bundle has no cells labeled 'boundary'");
    CellSet S;
    try {
        S = disc_bundle.labeled("boundary");
    } catch (const NotASubcomplex&) {
        throw BoundaryNotLabeled("cells labeled 'boundary' do not form a subcomplex");
    }
    return quotient(disc_bundle, S);
}

CellComplex disk(int n) {
    if (n < 1) throw std::invalid_argument("disc dimension must be at least 1");
    CellComplex S = sphere(n - 1);
    S.add_label(S.all(), "boundary");
    return cone(S, "c");
}

CellComplex trivial_disc_bundle(const ComplexPtr& F, int k) {
    return product(F, std::make_shared<const CellComplex>(disk(k)));
}

CellComplex wedge_of_spheres(std::size_t count, int n) {
    if (n < 1) throw std::invalid_argument("wedge summands must have positive dimension");
    CellComplex X;
    X.add_cell(0, "p");
    for (std::size_t i = 1; i <= count; ++i) X.add_cell(n, "s" + std::to_string(i), {}, {}, {"p"});
    return X;
}

CellComplex complex_projective_plane() {
    CellComplex X;
    X.add_cell(0, "e0");
    X.add_cell(2, "e2", {}, {}, {"e0"});
    X.add_cell(4, "e4", {}, {}, {"e2"});
    return X;
}

CellComplex lens_space(long p) {
    if (p < 0) throw std::invalid_argument("lens space parameter must be nonnegative");
    CellComplex X;
    X.add_cell(0, "e0");
    X.add_cell(1, "e1", {}, {}, {"e0"});
    X.add_cell(2, "e2", {{"e1", p}}, {}, {"e1"});
    X.add_cell(3, "e3", {}, {}, {"e2"});
    X.validate();
    return X;
}

CellComplex boundary_of_simplex(int n) {
    if (n < 1) throw std::invalid_argument("simplex dimension must be positive");
    CellComplex X;
    auto label = [](const std::vector<int>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s + "]";
    };
    for (int size = 1; size <= n; ++size) {
        std::vector<bool> mask(n + 1, false);
        std::fill(mask.begin(), mask.begin() + size, true);
        std::vector<std::vector<int>> faces;
        do {
            std::vector<int> f;
            for (int i = 0; i <= n; ++i)
                if (mask[i]) f.push_back(i);
            faces.push_back(f);
        } while (std::prev_permutation(mask.begin(), mask.end()));
        std::sort(faces.begin(), faces.end());
        for (const auto& f : faces) {
            std::vector<std::pair<std::string, long>> bd;
            if (size > 1)
                for (std::size_t i = 0; i < f.size(); ++i) {
                    std::vector<int> g = f;
                    g.erase(g.begin() + static_cast<long>(i));
                    bd.emplace_back(label(g), i % 2 == 0 ? 1 : -1);
                }
            X.add_cell(size - 1, label(f), bd);
        }
    }
    X.validate();
    return X;
}

CellComplex cone_on_sphere2() {
    CellComplex S = sphere(2);
    S.add_label(S.all(), "shell");
    CellComplex D = cone(S, "c");
    D.add_label(D.find("c:apex"), "F");
    return D;
}

CellComplex sphere3_two_discs() {
    CellComplex D = cone_on_sphere2();
    D.add_label(D.all(), "N");
    return attach_cone(D, D.labeled("shell"), "S");
}

CellComplex builtin(const std::string& name) {
    auto shared = [](CellComplex c) { return std::make_shared<const CellComplex>(std::move(c)); };
    if (name == "point") return point();
    if (name == "S1") return circle();
    if (name == "S3") return sphere3_two_discs();
    if (name.size() == 2 && name[0] == 'S' && name[1] >= '0' && name[1] <= '9') return sphere(name[1] - '0');
    if (name == "D3" || name == "coneS2") return cone_on_sphere2();
    if (name == "S2xS1") return product_with_circle(shared(sphere(2)));
    if (name == "S3xS1") return product_with_circle(shared(sphere3_two_discs()));
    if (name == "C0S2xS1") return product_with_circle(shared(cone_on_sphere2()));
    if (name == "CP2") return complex_projective_plane();
    if (name == "dS4") return boundary_of_simplex(4);
    auto parse = [&](const std::string& prefix) -> std::optional<long> {
        if (name.rfind(prefix, 0) != 0) return std::nullopt;
        long v = 0;
        const char* b = name.data() + prefix.size();
        const char* e = name.data() + name.size();
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || ptr != e || b == e) throw UnknownSpace("malformed space name " + name);
        return v;
    };
    if (auto p = parse("L1p:")) return lens_space(*p);
    if (auto n = parse("wedge:")) {
        if (*n < 0) throw UnknownSpace("wedge count must be nonnegative");
        return wedge_of_spheres(static_cast<std::size_t>(*n), 2);
    }
    throw UnknownSpace("unknown space " + name);
}

std::vector<std::string> builtin_names() {
    return {"point", "S0", "S1", "S2", "S3", "S4", "D3", "coneS2", "S2xS1", "S3xS1", "C0S2xS1", "CP2", "L1p:<p>", "wedge:<n>", "dS4"};
}

nlohmann::json to_json(const CellComplex& X) {
    nlohmann::json cells = nlohmann::json::array();
    for (int d = 0; d <= X.dimension(); ++d)
        for (std::size_t i = 0; i < X.count(d); ++i) {
            const Cell& c = X.cells(d)[i];
            nlohmann::json bd = nlohmann::json::array();
            for (const auto& [f, k] : c.boundary) bd.push_back({X.cells(d - 1)[f].name, k});
            nlohmann::json faces = nlohmann::json::array();
            for (CellId f : c.extra_faces) faces.push_back(X.cell(f).name);
            nlohmann::json cj = {{"name", c.name}, {"dim", d}, {"boundary", bd}};
            if (!c.labels.empty()) cj["labels"] = c.labels;
            if (!faces.empty()) cj["faces"] = faces;
            cells.push_back(cj);
        }
    return {{"cells", cells}};
}

CellComplex complex_from_json(const nlohmann::json& j) {
    try {
        std::vector<nlohmann::json> cells = j.at("cells").get<std::vector<nlohmann::json>>();
        std::stable_sort(cells.begin(), cells.end(),
                         [](const auto& a, const auto& b) { return a.at("dim").template get<int>() < b.at("dim").template get<int>(); });
        CellComplex X;
        for (const auto& c : cells) {
            std::vector<std::pair<std::string, long>> bd;
            if (c.contains("boundary"))
                for (const auto& e : c.at("boundary")) bd.emplace_back(e.at(0).get<std::string>(), e.at(1).get<long>());
            std::set<std::string> labels;
            if (c.contains("labels")) labels = c.at("labels").get<std::set<std::string>>();
            std::vector<std::string> faces;
            if (c.contains("faces")) faces = c.at("faces").get<std::vector<std::string>>();
            X.add_cell(c.at("dim").get<int>(), c.at("name").get<std::string>(), bd, labels, faces);
        }
        X.validate();
        return X;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidComplex(std::string("malformed complex JSON: ") + e.what());
    }
}

}  // namespace tdual::topology
