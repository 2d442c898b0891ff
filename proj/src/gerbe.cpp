#include "tdual/gerbe.hpp"

#include <algorithm>
#include <sstream>

namespace tdual::gerbe {

using algebra::IntMatrix;
using algebra::IntVector;
using topology::CellId;
using topology::CohomologyGroup;
using topology::Pair;

int normalize(Tuple& t) {
    int sign = 1;
    for (std::size_t i = 1; i < t.size(); ++i)
        for (std::size_t j = i; j > 0 && t[j - 1] >= t[j]; --j) {
            if (t[j - 1] == t[j]) return 0;
            std::swap(t[j - 1], t[j]);
            sign = -sign;
        }
    return sign;
}

std::string to_string(const Tuple& t) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
    os << ')';
    return os.str();
}

// --- nerve ----------------------------------------------------------------

namespace {
void all_subsets(int n, const std::function<void(const Tuple&)>& f) {
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        Tuple t;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) t.push_back(i);
        f(t);
    }
}
}  // namespace

CoverNerve::CoverNerve(ComplexPtr space, std::vector<CellSet> sets) : space_(std::move(space)), sets_(std::move(sets)) {
    if (sets_.size() > 16) throw MalformedNerve("covers are limited to 16 members");
    all_subsets(size(), [&](const Tuple& t) { flags_[t] = !intersection(t).empty(); });
}

CoverNerve::CoverNerve(ComplexPtr space, std::vector<CellSet> sets, const std::vector<std::pair<Tuple, bool>>& flags)
    : CoverNerve(std::move(space), std::move(sets)) {
    std::map<Tuple, bool> given;
    for (auto [t, flag] : flags) {
        const Tuple raw = t;
        if (normalize(t) == 0 || t.empty() || t.front() < 0 || t.back() >= size()) {
            conflicts_.push_back("tuple " + to_string(raw) + " is not a set of cover indices");
            continue;
        }
        auto [it, fresh] = given.emplace(t, flag);
        if (!fresh && it->second != flag) conflicts_.push_back("tuple " + to_string(raw) + " has order-dependent flags");
    }
    for (const auto& [t, flag] : given) {
        if (flag)
            for (std::size_t k = 0; k < t.size() && t.size() > 1; ++k) {
                Tuple sub = t;
                sub.erase(sub.begin() + static_cast<long>(k));
                auto it = given.find(sub);
                if (it != given.end() && !it->second)
                    conflicts_.push_back("tuple " + to_string(t) + " is nonempty but its face " + to_string(sub) + " is empty");
            }
        if (flags_.at(t) != flag)
            conflicts_.push_back("tuple " + to_string(t) + " is flagged " + (flag ? "nonempty" : "empty") +
                                 " but the intersection disagrees");
    }
}

void CoverNerve::validate() const {
    if (!space_) throw MalformedNerve("nerve has no space");
    if (!conflicts_.empty()) throw MalformedNerve(conflicts_.front());
    CellSet covered = space_->none();
    for (int i = 0; i < size(); ++i) {
        if (sets_[i].levels() != space_->dimension() + 1 || !space_->is_subcomplex(sets_[i]))
            throw MalformedNerve("cover member " + std::to_string(i) + " is not a subcomplex");
        covered = covered | sets_[i];
    }
    if (!(covered == space_->all())) throw MalformedNerve("cover does not contain every cell");
}

CellSet CoverNerve::intersection(const Tuple& t) const {
    CellSet s = space_->all();
    for (int i : t) s = s & sets_.at(i);
    return s;
}

bool CoverNerve::nonempty(Tuple t) const {
    if (normalize(t) == 0) return false;
    auto it = flags_.find(t);
    return it != flags_.end() && it->second;
}

std::vector<Tuple> CoverNerve::tuples(std::size_t length) const {
    std::vector<Tuple> out;
    for (const auto& [t, flag] : flags_)
        if (flag && t.size() == length) out.push_back(t);
    std::sort(out.begin(), out.end());
    return out;
}

int CoverNerve::first_index(CellId c) const {
    for (int i = 0; i < size(); ++i)
        if (sets_[i].contains(c)) return i;
    throw MalformedNerve("cell " + space_->cell(c).name + " is not covered");
}

CoverNerve CoverNerve::times_circle(const ComplexPtr& product) const {
    const auto& P = *product;
    if (!P.left_factor() || !(*P.left_factor() == *space_)) throw ModelMismatch("product is not taken over the nerve's space");
    std::vector<CellSet> sets;
    for (const auto& U : sets_) {
        CellSet V = P.none();
        for (int d = 0; d <= P.dimension(); ++d)
            for (std::size_t i = 0; i < P.count(d); ++i)
                if (U.contains(P.cells(d)[i].factors->first)) V.insert({d, i});
        sets.push_back(std::move(V));
    }
    CoverNerve out(product, std::move(sets));
    out.conflicts_ = conflicts_;
    return out;
}

// --- double complex -------------------------------------------------------

namespace {
IntVector restrict_to(const topology::CellComplex& X, const CellSet& U, int q, IntVector v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!U.contains({q, i})) v[i] = 0;
    (void)X;
    return v;
}

IntVector cell_coboundary(const topology::CellComplex& X, const CellSet& U, int q, const IntVector& v) {
    if (q + 1 > X.dimension()) return {};
    IntVector out = X.boundary_matrix(q + 1).transpose() * v;
    return restrict_to(X, U, q + 1, std::move(out));
}

void accumulate(TupleCochains& into, const Tuple& t, const IntVector& v) {
    if (algebra::is_zero(v)) return;
    auto it = into.find(t);
    if (it == into.end())
        into.emplace(t, v);
    else
        it->second = algebra::add(it->second, v);
    auto jt = into.find(t);
    if (algebra::is_zero(jt->second)) into.erase(jt);
}
}  // namespace

IntVector component(const CoverNerve& N, const TupleCochains& c, Tuple t, int q) {
    const int sign = normalize(t);
    IntVector zero(N.space()->count(q));
    if (sign == 0) return zero;
    auto it = c.find(t);
    if (it == c.end()) return zero;
    return sign > 0 ? it->second : algebra::scale(it->second, -1);
}

TotalCochain total_differential(const CoverNerve& N, const TotalCochain& x) {
    const auto& X = *N.space();
    TotalCochain out{x.degree + 1, std::vector<TupleCochains>(x.degree + 2)};
    for (int p = 0; p <= x.degree + 1; ++p) {
        const int q = x.degree + 1 - p;
        for (const Tuple& T : N.tuples(static_cast<std::size_t>(p) + 1)) {
            const CellSet U = N.intersection(T);
            IntVector acc(X.count(q));
            if (p >= 1 && p - 1 < static_cast<int>(x.parts.size()))
                for (std::size_t j = 0; j < T.size(); ++j) {
                    Tuple face = T;
                    face.erase(face.begin() + static_cast<long>(j));
                    IntVector v = restrict_to(X, U, q, component(N, x.parts[p - 1], face, q));
                    acc = algebra::add(acc, j % 2 ? algebra::scale(v, -1) : v);
                }
            if (q >= 1 && p < static_cast<int>(x.parts.size())) {
                IntVector d = cell_coboundary(X, U, q - 1, component(N, x.parts[p], T, q - 1));
                if (!d.empty()) acc = algebra::add(acc, p % 2 ? algebra::scale(d, -1) : d);
            }
            accumulate(out.parts[p], T, acc);
        }
    }
    return out;
}

namespace {
TotalCochain subtract(TotalCochain x, const TotalCochain& y) {
    for (std::size_t p = 0; p < y.parts.size() && p < x.parts.size(); ++p)
        for (const auto& [t, v] : y.parts[p]) accumulate(x.parts[p], t, algebra::scale(v, -1));
    return x;
}

TotalCochain add_total(TotalCochain x, const TotalCochain& y) {
    for (std::size_t p = 0; p < y.parts.size() && p < x.parts.size(); ++p)
        for (const auto& [t, v] : y.parts[p]) accumulate(x.parts[p], t, v);
    return x;
}

/// h(c)_I(s) = c_{i(s) I}(s), lowering the Čech degree.
TupleCochains contract(const CoverNerve& N, const TupleCochains& c, std::size_t length, int q) {
    const auto& X = *N.space();
    TupleCochains out;
    for (const Tuple& I : N.tuples(length)) {
        const CellSet U = N.intersection(I);
        IntVector v(X.count(q));
        for (std::size_t s = 0; s < v.size(); ++s) {
            if (!U.contains({q, s})) continue;
            Tuple J{N.first_index({q, s})};
            J.insert(J.end(), I.begin(), I.end());
            v[s] = component(N, c, J, q)[s];
        }
        accumulate(out, I, v);
    }
    return out;
}
}  // namespace

CohClass zigzag_class(const CoverNerve& N, const TotalCochain& x0) {
    const auto& X = *N.space();
    const int n = x0.degree;
    TotalCochain x = x0;
    x.parts.resize(n + 1);
    for (int p = n; p >= 1; --p) {
        if (x.parts[p].empty()) continue;
        TotalCochain b{n - 1, std::vector<TupleCochains>(n)};
        b.parts[p - 1] = contract(N, x.parts[p], static_cast<std::size_t>(p), n - p);
        x = subtract(std::move(x), total_differential(N, b));
        if (!x.parts[p].empty()) throw InvalidGerbe("total cochain is not a cocycle at Čech degree " + std::to_string(p));
    }
    IntVector c(X.count(n));
    for (std::size_t s = 0; s < c.size(); ++s) c[s] = component(N, x.parts[0], {N.first_index({n, s})}, n)[s];
    return CohClass{Pair::whole(N.space()), n, std::move(c)};
}

// --- gerbes ---------------------------------------------------------------

TotalCochain TwoGerbe::total() const { return TotalCochain{3, {{}, p, theta, epsilon}}; }

TwoGerbe TwoGerbe::from_total(const CoverNerve& N, const TotalCochain& x) {
    if (x.degree != 3) throw InvalidGerbe("2-gerbe data has total degree 3");
    if (!x.parts.empty() && !x.parts[0].empty()) throw InvalidGerbe("2-gerbe data has no global component");
    TwoGerbe G{N, {}, {}, {}};
    auto part = [&](std::size_t p) { return p < x.parts.size() ? x.parts[p] : TupleCochains{}; };
    G.p = part(1);
    G.theta = part(2);
    G.epsilon = part(3);
    return G;
}

TotalCochain ThreeGerbe::total() const { return TotalCochain{4, {{}, A, Gamma, eta, zeta}}; }

ThreeGerbe ThreeGerbe::from_total(const CoverNerve& N, const TotalCochain& x) {
    if (x.degree != 4) throw InvalidGerbe("3-gerbe data has total degree 4");
    if (!x.parts.empty() && !x.parts[0].empty()) throw InvalidGerbe("3-gerbe data has no global component");
    ThreeGerbe T{N, {}, {}, {}, {}};
    auto part = [&](std::size_t p) { return p < x.parts.size() ? x.parts[p] : TupleCochains{}; };
    T.A = part(1);
    T.Gamma = part(2);
    T.eta = part(3);
    T.zeta = part(4);
    return T;
}

bool GerbeReport::valid() const {
    return std::all_of(entries.begin(), entries.end(), [](const ReportEntry& e) { return e.pass; });
}

const ReportEntry& GerbeReport::entry(const std::string& condition) const {
    for (const auto& e : entries)
        if (e.condition == condition) return e;
    throw std::out_of_range("no report entry " + condition);
}

nlohmann::json GerbeReport::to_json() const {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json j{{"condition", e.condition}, {"pass", e.pass}};
        if (e.witness) j["witness"] = *e.witness;
        if (!e.detail.empty()) j["detail"] = e.detail;
        checks.push_back(j);
    }
    nlohmann::json out{{"valid", valid()}, {"checks", checks}};
    if (characteristic_class) out["characteristic_class"] = topology::to_json(*characteristic_class);
    return out;
}

namespace {
/// Shape, support and nerve membership of the stored data.
ReportEntry check_support(const CoverNerve& N, const TotalCochain& x) {
    const auto& X = *N.space();
    for (std::size_t p = 1; p < x.parts.size(); ++p) {
        const int q = x.degree - static_cast<int>(p);
        for (const auto& [t, v] : x.parts[p]) {
            Tuple s = t;
            if (t.size() != p + 1 || normalize(s) != 1 || !N.nonempty(t))
                return {"support", false, t, "datum stored on a tuple that is not a nonempty sorted (" + std::to_string(p + 1) + ")-tuple"};
            if (v.size() != X.count(q)) return {"support", false, t, "datum has the wrong length"};
            const CellSet U = N.intersection(t);
            for (std::size_t i = 0; i < v.size(); ++i)
                if (v[i] != 0 && !U.contains({q, i}))
                    return {"support", false, t, "datum is nonzero on cell " + X.cells(q)[i].name + " outside the intersection"};
        }
    }
    return {"support", true, std::nullopt, ""};
}

GerbeReport check_total(const CoverNerve& N, const TotalCochain& x, const std::string& inversion,
                        const std::vector<std::string>& conditions) {
    N.validate();
    GerbeReport r;
    r.entries.push_back(check_support(N, x));
    r.entries.push_back({inversion, true, std::nullopt, "data stored once per sorted tuple; reversed tuples carry the sign"});
    if (!r.entries.front().pass) {
        for (const auto& c : conditions) r.entries.push_back({c, false, std::nullopt, "not evaluated: malformed data"});
        return r;
    }
    const TotalCochain d = total_differential(N, x);
    for (std::size_t p = 1; p < d.parts.size(); ++p) {
        ReportEntry e{conditions.at(p - 1), true, std::nullopt, ""};
        if (!d.parts[p].empty()) {
            e.pass = false;
            e.witness = d.parts[p].begin()->first;
            e.detail = "defect on " + std::to_string(d.parts[p].size()) + " tuple(s)";
        }
        r.entries.push_back(e);
    }
    if (r.valid()) r.characteristic_class = zigzag_class(N, x);
    return r;
}

const std::vector<std::string> kTwoConditions{"line_bundle_classes", "triple_triviality", "delta_theta", "epsilon_cocycle"};
const std::vector<std::string> kThreeConditions{"pair_classes", "triple_tensor", "quadruple_tensor", "delta_eta", "zeta_cocycle"};
}  // namespace

GerbeReport check_two_gerbe(const TwoGerbe& G) { return check_total(G.nerve, G.total(), "antisymmetry", kTwoConditions); }

GerbeReport check_three_gerbe(const ThreeGerbe& T) {
    return check_total(T.nerve, T.total(), "pair_inversion", kThreeConditions);
}

namespace {
std::string first_failure(const GerbeReport& r) {
    for (const auto& e : r.entries)
        if (!e.pass) return e.condition + (e.witness ? " at " + to_string(*e.witness) : std::string());
    return "";
}
}  // namespace

CohClass characteristic_class(const TwoGerbe& G) {
    GerbeReport r = check_two_gerbe(G);
    if (!r.valid()) throw InvalidGerbe("2-gerbe fails " + first_failure(r));
    return *r.characteristic_class;
}

CohClass characteristic_class(const ThreeGerbe& T) {
    GerbeReport r = check_three_gerbe(T);
    if (!r.valid()) throw InvalidGerbe("3-gerbe fails " + first_failure(r));
    return *r.characteristic_class;
}

namespace {
TupleCochains cross_all(const TupleCochains& c, const topology::CellComplex& P, int q) {
    TupleCochains out;
    for (const auto& [t, v] : c) {
        IntVector w(P.count(q + 1));
        for (std::size_t i = 0; i < v.size(); ++i) w[P.product_cell({q, i}, {1, 0})->index] = v[i];
        out.emplace(t, std::move(w));
    }
    return out;
}
}  // namespace

ThreeGerbe tdualize_two_gerbe(const TwoGerbe& G, const ComplexPtr& product) {
    GerbeReport r = check_two_gerbe(G);
    if (!r.valid()) throw InvalidGerbe("2-gerbe fails " + first_failure(r));
    ComplexPtr P = product ? product : std::make_shared<const topology::CellComplex>(topology::product_with_circle(G.nerve.space()));
    ThreeGerbe T{G.nerve.times_circle(P), {}, {}, {}, {}};
    T.A = cross_all(G.p, *P, 2);
    T.Gamma = cross_all(G.theta, *P, 1);
    T.eta = cross_all(G.epsilon, *P, 0);
    return T;
}

TwoGerbe tensor(const TwoGerbe& a, const TwoGerbe& b) {
    if (!(*a.nerve.space() == *b.nerve.space()) || a.nerve.sets() != b.nerve.sets())
        throw InvalidGerbe("tensor product needs a common nerve");
    return TwoGerbe::from_total(a.nerve, add_total(a.total(), b.total()));
}

// --- constructions --------------------------------------------------------

namespace {
IntVector random_on(const topology::CellComplex& X, const CellSet& U, int q, std::mt19937_64& rng, long bound = 3) {
    std::uniform_int_distribution<long> coeff(-bound, bound);
    IntVector v(X.count(q));
    for (std::size_t i = 0; i < v.size(); ++i)
        if (U.contains({q, i})) v[i] = coeff(rng);
    return v;
}

/// A random cocycle of degree q on U: random generator coordinates plus a random coboundary.
IntVector random_cocycle(const ComplexPtr& X, const CellSet& U, int q, std::mt19937_64& rng) {
    CohomologyGroup H(Pair::of(X, U, X->none()), q);
    std::uniform_int_distribution<long> coeff(-3, 3);
    IntVector coords(H.generator_count());
    for (auto& c : coords) c = coeff(rng);
    IntVector v = H.representative(coords);
    if (q >= 1) {
        IntVector d = cell_coboundary(*X, U, q - 1, random_on(*X, U, q - 1, rng));
        if (!d.empty()) v = algebra::add(v, d);
    }
    return v;
}
}  // namespace

TwoGerbe gauge_perturb(const TwoGerbe& G, GaugeSlot slot, std::mt19937_64& rng) {
    const CoverNerve& N = G.nerve;
    const auto& X = *N.space();
    TotalCochain b{2, std::vector<TupleCochains>(3)};
    switch (slot) {
        case GaugeSlot::Global:
            for (int i = 0; i < N.size(); ++i) accumulate(b.parts[0], {i}, random_cocycle(N.space(), N.set(i), 2, rng));
            break;
        case GaugeSlot::Pair:
            for (const Tuple& t : N.tuples(2)) accumulate(b.parts[1], t, random_on(X, N.intersection(t), 1, rng));
            break;
        case GaugeSlot::Triple:
            for (const Tuple& t : N.tuples(3)) accumulate(b.parts[2], t, random_on(X, N.intersection(t), 0, rng));
            break;
    }
    return TwoGerbe::from_total(N, add_total(G.total(), total_differential(N, b)));
}

RandomGerbe random_two_gerbe(std::mt19937_64& rng, int cover_size, long max_class) {
    if (cover_size < 2 || cover_size > 6) throw std::invalid_argument("random covers have 2 to 6 members");
    auto X = std::make_shared<const topology::CellComplex>(topology::boundary_of_simplex(4));
    const std::size_t tets = X->count(3);
    std::uniform_int_distribution<unsigned> pick(1, (1u << tets) - 1);
    std::vector<unsigned> removed(static_cast<std::size_t>(cover_size));
    for (;;) {
        unsigned common = (1u << tets) - 1;
        for (auto& m : removed) common &= (m = pick(rng));
        if (common == 0) break;
    }
    std::vector<CellSet> sets;
    for (unsigned m : removed) {
        CellSet U = X->all();
        for (std::size_t t = 0; t < tets; ++t)
            if (m & (1u << t)) U.erase({3, t});
        sets.push_back(std::move(U));
    }
    CoverNerve N(X, std::move(sets));

    CohomologyGroup H3(Pair::whole(X), 3);
    std::uniform_int_distribution<long> cls(-max_class, max_class);
    IntVector r = H3.representative({BigInt(cls(rng))});
    if (IntVector d = cell_coboundary(*X, X->all(), 2, random_on(*X, X->all(), 2, rng)); !d.empty()) r = algebra::add(r, d);

    // trivialize r on each member, leaving only pair data
    TotalCochain x{3, std::vector<TupleCochains>(4)};
    TotalCochain b{2, std::vector<TupleCochains>(3)};
    for (int i = 0; i < N.size(); ++i) {
        Pair P = Pair::of(X, N.set(i), X->none());
        const auto cells3 = P.relative_cells(3), cells2 = P.relative_cells(2);
        IntVector rhs;
        for (std::size_t c : cells3) rhs.push_back(r[c]);
        auto sol = algebra::solve(topology::coboundary_matrix(P, 2), rhs);
        if (!sol) throw InvalidGerbe("cover member has nonzero third cohomology");
        IntVector bi(X->count(2));
        for (std::size_t k = 0; k < cells2.size(); ++k) bi[cells2[k]] = (*sol)[k];
        accumulate(x.parts[0], {i}, restrict_to(*X, N.set(i), 3, r));
        accumulate(b.parts[0], {i}, bi);
    }
    x = subtract(std::move(x), total_differential(N, b));
    TwoGerbe G = TwoGerbe::from_total(N, x);
    for (GaugeSlot slot : {GaugeSlot::Global, GaugeSlot::Pair, GaugeSlot::Triple}) G = gauge_perturb(G, slot, rng);
    return {std::move(G), CohClass{Pair::whole(X), 3, r}};
}

TwoGerbe clutching_gerbe(long n) {
    auto X = std::make_shared<const topology::CellComplex>(topology::sphere3_two_discs());
    CoverNerve N(X, {X->labeled("N"), X->labeled("S")});
    TwoGerbe G{N, {}, {}, {}};
    IntVector p(X->count(2));
    p[X->find("s").index] = n;
    accumulate(G.p, {0, 1}, p);
    return G;
}

SemifreeGerbe semifree_class_to_two_gerbe(const CohClass& lambda, const CompactificationModel& model) {
    if (!model.base) throw ModelMismatch("no base model");
    const auto& B = *model.base;
    if (!B.has_label(model.shell_label)) throw ModelMismatch("base has no cells labeled '" + model.shell_label + "'");
    const CellSet S = B.labeled(model.shell_label);
    if (lambda.degree != 2) throw ModelMismatch("bundle class must have degree 2");
    if (!lambda.pair.ambient || !(*lambda.pair.ambient == B) || !(lambda.pair.space == S) || !lambda.pair.sub.empty())
        throw ModelMismatch("class does not live on the complement model of this base");
    if (!CohomologyGroup(lambda.pair, 2).is_cocycle(lambda.cochain)) throw ModelMismatch("bundle class is not a cocycle");

    const Pair BS = Pair::of(model.base, B.all(), S);
    CohClass relative{BS, 3, topology::connecting_cochain(BS, 2, lambda.cochain)};

    const std::string tag = "inf";
    auto Bp = std::make_shared<const topology::CellComplex>(topology::attach_cone(B, S, tag));
    const CellSet cone = Bp->labeled(tag);
    CellSet base_cells = Bp->none();
    for (int d = 0; d <= Bp->dimension(); ++d)
        for (std::size_t i = 0; i < Bp->count(d); ++i)
            if (B.lookup(Bp->cells(d)[i].name)) base_cells.insert({d, i});

    auto to_base = [&](int q, const IntVector& v) {
        IntVector w(B.count(q));
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = v[Bp->find(B.cells(q)[i].name).index];
        return w;
    };
    auto from_base = [&](int q, const IntVector& v) {
        IntVector w(Bp->count(q));
        for (std::size_t i = 0; i < v.size(); ++i) w[Bp->find(B.cells(q)[i].name).index] = v[i];
        return w;
    };

    // excision: restriction H3(B+, cone) -> H3(B, shell) is invertible
    CohomologyGroup Hplus(Pair::of(Bp, Bp->all(), cone), 3), Hrel(BS, 3);
    IntMatrix M = topology::induced_map(Hplus, Hrel, [&](const IntVector& v) { return to_base(3, v); });
    IntMatrix lattice = M;
    for (std::size_t k = 0; k < Hrel.moduli().size(); ++k)
        if (Hrel.moduli()[k] != 0) {
            IntMatrix col(M.rows(), 1);
            col(k, 0) = Hrel.moduli()[k];
            lattice = lattice.hstack(col);
        }
    auto sol = algebra::solve(lattice, Hrel.coordinates(relative.cochain));
    if (!sol) throw ModelMismatch("excision map is not onto for this model");
    IntVector coords(sol->begin(), sol->begin() + static_cast<long>(M.cols()));

    SemifreeGerbe out;
    out.compactification = Bp;
    out.relative = relative;
    out.klass = CohClass{Pair::whole(Bp), 3, Hplus.representative(coords)};
    CoverNerve N(Bp, {base_cells, cone});
    out.gerbe = TwoGerbe{N, {}, {}, {}};
    accumulate(out.gerbe.p, {0, 1}, from_base(2, lambda.cochain));
    return out;
}

// --- JSON -----------------------------------------------------------------

namespace {
nlohmann::json cochains_json(const topology::CellComplex& X, const TupleCochains& c, int q) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [t, v] : c) {
        nlohmann::json entries = nlohmann::json::object();
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] != 0) entries[X.cells(q)[i].name] = v[i].str();
        arr.push_back({{"tuple", t}, {"cochain", entries}});
    }
    return arr;
}

BigInt parse_coeff(const nlohmann::json& j) {
    if (j.is_number_integer()) return BigInt(j.get<long long>());
    if (j.is_string()) return BigInt(j.get<std::string>());
    throw std::invalid_argument("cochain coefficients are integers or integer strings");
}

TupleCochains cochains_from_json(const CoverNerve& N, const nlohmann::json& arr, int q, std::size_t length) {
    const auto& X = *N.space();
    TupleCochains out;
    std::map<Tuple, IntVector> seen;
    for (const auto& e : arr) {
        Tuple t = e.at("tuple").get<Tuple>();
        const Tuple raw = t;
        if (t.size() != length) throw std::invalid_argument("tuple " + to_string(raw) + " has the wrong length");
        const int sign = normalize(t);
        if (sign == 0) throw std::invalid_argument("tuple " + to_string(raw) + " repeats an index");
        IntVector v(X.count(q));
        const auto& c = e.at("cochain");
        if (c.is_array()) {
            if (c.size() != v.size()) throw std::invalid_argument("cochain on " + to_string(raw) + " has the wrong length");
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = parse_coeff(c[i]);
        } else {
            for (const auto& [name, coeff] : c.items()) {
                auto id = X.lookup(name);
                if (!id || id->dim != q) throw std::invalid_argument("cochain on " + to_string(raw) + " names unknown cell " + name);
                v[id->index] = parse_coeff(coeff);
            }
        }
        if (sign < 0) v = algebra::scale(v, -1);
        auto [it, fresh] = seen.emplace(t, v);
        if (!fresh && it->second != v)
            throw InvalidGerbe("antisymmetry violated: data on " + to_string(raw) + " is not the negative of its reversal");
        if (fresh) out.emplace(t, v);
    }
    return out;
}

nlohmann::json nerve_json(const CoverNerve& N) {
    nlohmann::json cover = nlohmann::json::array();
    const auto& X = *N.space();
    for (const auto& U : N.sets()) {
        nlohmann::json names = nlohmann::json::array();
        for (int d = 0; d <= X.dimension(); ++d)
            for (std::size_t i : U.indices(d)) names.push_back(X.cells(d)[i].name);
        cover.push_back({{"cells", names}});
    }
    nlohmann::json flags = nlohmann::json::array();
    for (std::size_t len = 1; len <= static_cast<std::size_t>(N.size()); ++len)
        for (const Tuple& t : N.tuples(len)) flags.push_back({{"tuple", t}, {"nonempty", true}});
    return {{"space", topology::to_json(X)}, {"cover", cover}, {"nerve", flags}};
}
}  // namespace

nlohmann::json to_json(const CoverNerve& N) { return nerve_json(N); }

nlohmann::json to_json(const TwoGerbe& G) {
    nlohmann::json j = nerve_json(G.nerve);
    const auto& X = *G.nerve.space();
    j["p"] = cochains_json(X, G.p, 2);
    j["theta"] = cochains_json(X, G.theta, 1);
    j["epsilon"] = cochains_json(X, G.epsilon, 0);
    return j;
}

nlohmann::json to_json(const ThreeGerbe& T) {
    nlohmann::json j = nerve_json(T.nerve);
    const auto& X = *T.nerve.space();
    j["A"] = cochains_json(X, T.A, 3);
    j["Gamma"] = cochains_json(X, T.Gamma, 2);
    j["eta"] = cochains_json(X, T.eta, 1);
    j["zeta"] = cochains_json(X, T.zeta, 0);
    return j;
}

TwoGerbe two_gerbe_from_json(const nlohmann::json& j) {
    const auto& sp = j.at("space");
    auto X = std::make_shared<const topology::CellComplex>(sp.is_string() ? topology::builtin(sp.get<std::string>())
                                                                          : topology::complex_from_json(sp));
    std::vector<CellSet> sets;
    for (const auto& m : j.at("cover")) {
        if (m.contains("label")) {
            try {
                sets.push_back(X->labeled(m.at("label").get<std::string>()));
            } catch (const topology::NotASubcomplex& e) {
                throw MalformedNerve(e.what());
            }
            continue;
        }
        CellSet U = X->none();
        for (const auto& name : m.at("cells")) U.insert(X->find(name.get<std::string>()));
        sets.push_back(std::move(U));
    }
    std::vector<std::pair<Tuple, bool>> flags;
    if (j.contains("nerve"))
        for (const auto& f : j.at("nerve")) flags.emplace_back(f.at("tuple").get<Tuple>(), f.at("nonempty").get<bool>());
    CoverNerve N(X, std::move(sets), flags);
    N.validate();
    TwoGerbe G{N, {}, {}, {}};
    auto get = [&](const char* key, int q, std::size_t len) {
        return j.contains(key) ? cochains_from_json(N, j.at(key), q, len) : TupleCochains{};
    };
    G.p = get("p", 2, 2);
    G.theta = get("theta", 1, 3);
    G.epsilon = get("epsilon", 0, 4);
    return G;
}

}  // namespace tdual::gerbe
