#include "tdual/semifree.hpp"

#include <algorithm>
#include <sstream>

namespace tdual::semifree {

using algebra::IntMatrix;
using algebra::IntVector;
using topology::CellComplex;
using topology::CohomologyGroup;
using topology::Pair;

namespace {
ComplexPtr share(CellComplex X) { return std::make_shared<const CellComplex>(std::move(X)); }

nlohmann::json cell_names(const CellComplex& X, const CellSet& s) {
    nlohmann::json out = nlohmann::json::array();
    for (int d = 0; d <= X.dimension(); ++d)
        for (std::size_t i : s.indices(d)) out.push_back(X.cells(d)[i].name);
    return out;
}

std::string turns_str(const Turns& t) {
    std::ostringstream os;
    os << t;
    return os.str();
}
}  // namespace

// --- records --------------------------------------------------------------

IntVector SemifreeSpace::coordinates() const { return topology::coordinates(lambda); }

std::string SemifreeSpace::kind() const {
    CohomologyGroup H(lambda.pair, 2);
    const IntVector c = H.coordinates(lambda.cochain);
    if (algebra::is_zero(c)) return fixed.empty() ? "trivial" : "trivial bundle with fixed points";
    if (H.group() == AbelianGroup::Z() && fixed.size() == 1 && fixed.count(0) == 1) {
        if (abs(c[0]) == 1) return "Taub-NUT";
        return "charge-" + BigInt(abs(c[0])).str() + " monopole";
    }
    return "semi-free";
}

std::optional<AbelianGroup> SemifreeSpace::boundary_h2() const {
    CohomologyGroup H(lambda.pair, 2);
    if (!(H.group() == AbelianGroup::Z())) return std::nullopt;
    const BigInt p = abs(H.coordinates(lambda.cochain)[0]);
    return topology::cohomology(topology::lens_space(static_cast<long>(p)), 2);
}

nlohmann::json SemifreeSpace::to_json() const {
    nlohmann::json j{{"name", name},
                     {"kind", kind()},
                     {"base", topology::to_json(*base)},
                     {"fixed", cell_names(*base, fixed)},
                     {"complement", cell_names(*base, complement)},
                     {"complement_h2", topology::to_json(CohomologyGroup(lambda.pair, 2).group())},
                     {"lambda", topology::to_json(lambda)}};
    if (auto b = boundary_h2()) j["boundary_h2"] = topology::to_json(*b);
    return j;
}

SemifreeSpace classify(const ComplexPtr& base, const CellSet& fixed, const CellSet& complement, const CohClass& lambda,
                       const std::string& name) {
    if (!base) throw InvalidClass("no base model");
    if (!base->is_subcomplex(fixed)) throw InvalidClass("fixed locus is not a subcomplex");
    if (!base->is_subcomplex(complement)) throw InvalidClass("complement model is not a subcomplex");
    if (!(fixed & complement).empty()) throw InvalidClass("complement model meets the fixed locus");
    if (lambda.degree != 2) throw InvalidClass("bundle class must have degree 2");
    if (!lambda.pair.ambient || !(*lambda.pair.ambient == *base) || !(lambda.pair.space == complement) || !lambda.pair.sub.empty())
        throw InvalidClass("bundle class does not live on the complement model");
    Pair P = Pair::of(base, complement, base->none());
    CohomologyGroup H(P, 2);
    if (!H.is_cocycle(lambda.cochain)) throw InvalidClass("bundle class is not a cocycle");
    return SemifreeSpace{base, fixed, complement, CohClass{P, 2, H.representative(H.coordinates(lambda.cochain))}, name};
}

std::optional<std::string> distinguish(const SemifreeSpace& a, const SemifreeSpace& b) {
    if (!(*a.base == *b.base)) return "base complexes differ";
    if (!(a.fixed == b.fixed)) return "fixed loci differ";
    if (!(a.complement == b.complement)) return "complement models differ";
    if (a.coordinates() != b.coordinates()) return "bundle classes differ";
    return std::nullopt;
}

bool operator==(const SemifreeSpace& a, const SemifreeSpace& b) { return !distinguish(a, b); }

SemifreeSpace monopole_record(long p) {
    auto B = share(topology::cone_on_sphere2());
    Pair P = Pair::labeled(B, "shell", "");
    CohomologyGroup H(P, 2);
    CohClass lambda{P, 2, H.representative({BigInt(p)})};
    return classify(B, B->labeled("F"), P.space, lambda, p == 1 ? "Taub-NUT" : "charge-" + std::to_string(p) + " monopole");
}

SemifreeSpace taub_nut_record() { return monopole_record(1); }

SemifreeSpace trivial_record() {
    auto B = share(topology::cone_on_sphere2());
    Pair P = Pair::whole(B);
    return classify(B, B->none(), B->all(), CohClass{P, 2, IntVector(B->count(2))}, "trivial");
}

// --- T-duality ------------------------------------------------------------

nlohmann::json TDualRecord::to_json() const {
    const CellComplex& P = *product;
    return {{"flux", topology::to_json(flux)},
            {"flux_group", topology::to_json(CohomologyGroup(flux.pair, 3).group())},
            {"source", cell_names(P, source)},
            {"extension",
             {{"ideal", extension.ideal},
              {"ideal_class", topology::to_json(extension.ideal_class)},
              {"quotient", extension.quotient},
              {"source_cells", extension.source_cells}}},
            {"round_trip", round_trip}};
}

TDualRecord tdualize(const SemifreeSpace& s, const ComplexPtr& product) {
    ComplexPtr P = product ? product : share(topology::product_with_circle(s.base));
    TDualRecord r;
    r.product = P;
    r.regular = topology::product_pair(Pair::of(s.base, s.complement, s.base->none()), P).space;
    r.source = topology::product_pair(Pair::of(s.base, s.fixed, s.base->none()), P).space;
    try {
        r.flux = topology::cross_with_z(s.lambda, P);
    } catch (const std::exception& e) {
        throw InvalidClass(std::string("cannot cross the bundle class with the fiber: ") + e.what());
    }
    CohClass back = topology::fiber_integrate(r.flux);
    r.round_trip = CohomologyGroup(back.pair, 2).coordinates(back.cochain) == s.coordinates();
    if (!r.round_trip) throw InvalidClass("fiber integration does not recover the bundle class");
    r.extension.ideal_class = r.flux;
    r.extension.ideal = "stable continuous-trace algebra over (B - F) x S1";
    r.extension.quotient = s.fixed.empty() ? "none (no fixed points)" : "C(F x S1) tensor compact operators";
    for (const auto& n : cell_names(*P, r.source)) r.extension.source_cells.push_back(n.get<std::string>());
    return r;
}

SemifreeSpace classify_dual(const ComplexPtr& product, const CellSet& source, const CellSet& regular, const CohClass& flux) {
    if (!product || !product->left_factor() || !product->right_factor() || !(*product->right_factor() == topology::circle()))
        throw NotWrapped("dual space is not a product with the circle");
    const ComplexPtr& B = product->left_factor();
    auto base_set = [&](const CellSet& s, const char* what) {
        CellSet out = B->none();
        for (int d = 0; d <= product->dimension(); ++d)
            for (std::size_t i : s.indices(d)) out.insert(product->cells(d)[i].factors->first);
        if (!B->is_subcomplex(out)) throw NotWrapped(std::string(what) + " does not project to a subcomplex");
        Pair probe = Pair::of(B, out, B->none());
        if (!(topology::product_pair(probe, product).space == s)) throw NotWrapped(std::string(what) + " is not wrapped on the circle orbits");
        return out;
    };
    const CellSet F = base_set(source, "source locus");
    const CellSet C = base_set(regular, "regular region");
    if (flux.degree != 3) throw InvalidClass("flux must have degree 3");
    if (!(flux.pair.space == regular) || !flux.pair.sub.empty()) throw InvalidClass("flux does not live on the regular region");
    CohClass lambda = topology::fiber_integrate(flux);
    CohClass again = topology::cross_with_z(lambda, product);
    if (!topology::same_class(again, flux)) throw InvalidClass("flux has a component without the fiber class");
    return classify(B, F, C, lambda);
}

// --- multi-center ---------------------------------------------------------

HomotopyTable multi_center_homotopy(std::size_t centers) {
    if (centers < 1) throw std::invalid_argument("at least one center");
    HomotopyTable t;
    t.centers = centers;
    t.model = share(centers == 1 ? topology::point() : topology::wedge_of_spheres(centers - 1, 2));
    for (int k = 0; k <= 3; ++k) t.homology.push_back(topology::homology(*t.model, k));
    return t;
}

// --- spectrum -------------------------------------------------------------

OrbitAnalysis analyze_orbit(bool fixed_point) {
    if (fixed_point) return {"R", "R^ (no quotienting)", false};
    return {"Z", "S1 = R^/Z", true};
}

bool non_separable(const Turns& k1, const Turns& k2) {
    return boost::multiprecision::denominator(Turns(k1 - k2)) == 1;
}

std::vector<Turns> SpectrumModel::non_separable_family(const Turns& x, int range) const {
    std::vector<Turns> out;
    if (!identification_step) return {x};
    for (int l = -range; l <= range; ++l) out.push_back(x + *identification_step * l);
    return out;
}

nlohmann::json SpectrumModel::to_json() const {
    nlohmann::json j{{"space", space},
                     {"regular_part", regular_part},
                     {"fixed_fiber", fixed_fiber},
                     {"hausdorff", hausdorff()},
                     {"flux", topology::to_json(flux)},
                     {"flux_group", topology::to_json(CohomologyGroup(flux.pair, 3).group())}};
    if (identification_step) j["identification_step_2pi"] = turns_str(*identification_step);
    return j;
}

bool operator==(const SpectrumModel& a, const SpectrumModel& b) {
    return a.space == b.space && a.regular_part == b.regular_part && a.fixed_fiber == b.fixed_fiber &&
           a.identification_step == b.identification_step && *a.regular_model == *b.regular_model &&
           topology::coordinates(a.flux) == topology::coordinates(b.flux);
}

SpectrumModel test_example_spectrum() {
    auto S2 = share(topology::sphere(2));
    auto reg = share(topology::product_with_circle(S2));
    CohomologyGroup H(Pair::whole(S2), 2);
    CohClass lambda{Pair::whole(S2), 2, H.representative({BigInt(1)})};
    SpectrumModel m;
    m.space = "(S2 x S1 x (0,inf)) with the line R^ glued on at 0";
    m.regular_part = "S2 x S1 x (0,inf)";
    m.regular_model = reg;
    m.flux = topology::cross_with_z(lambda, reg);
    m.fixed_fiber = "R^";
    m.identification_step = Turns(1);
    return m;
}

SpectrumModel hausdorff_regularization(const SpectrumModel& m) {
    if (m.hausdorff()) return m;
    SpectrumModel r = m;
    r.space = "C0S2xS1";
    r.fixed_fiber = "S1 = R^ / 2pi Z";
    r.identification_step.reset();
    return r;
}

TDualRecord regularized_record(const SpectrumModel& m) {
    if (!m.hausdorff()) throw std::invalid_argument("regularize the spectrum first");
    SemifreeSpace tn = taub_nut_record();
    TDualRecord r = tdualize(tn);
    // the shell x S1 of C0S2 x S1 carries the regular-part flux
    if (topology::coordinates(topology::fiber_integrate(r.flux)) != topology::coordinates(topology::fiber_integrate(m.flux)))
        throw InvalidClass("regular-part flux is not preserved");
    return r;
}

// --- dyonic ---------------------------------------------------------------

nlohmann::json DyonicReport::to_json() const {
    nlohmann::json j{{"action_invariant", action_invariant},
                     {"induced", induced.to_string()},
                     {"lambda", topology::to_json(lambda)},
                     {"dual_datum", topology::to_json(dual_datum)}};
    if (m) j["m"] = m->str();
    if (beta) j["beta_over_2pi"] = turns_str(*beta);
    return j;
}

topology::ChainMap invariant_cell_action(const ComplexPtr& X) {
    topology::ChainMap f{X, X, {}};
    for (int k = 0; k <= X->dimension(); ++k) f.degree.push_back(IntMatrix::identity(X->count(k)));
    return f;
}

DyonicReport dyonic_automorphism_check(const CohClass& lambda, const std::optional<topology::ChainMap>& action) {
    if (lambda.degree != 2) throw DegreeMismatch("dyonic data needs a degree-2 class, got degree " + std::to_string(lambda.degree));
    const ComplexPtr& X = lambda.pair.ambient;
    if (!(lambda.pair.space == X->all()) || !lambda.pair.sub.empty())
        throw DegreeMismatch("dyonic data needs an absolute class on the whole space");
    topology::ChainMap f = action ? *action : invariant_cell_action(X);
    if (!(*f.source == *X) || !(*f.target == *X)) throw DegreeMismatch("action does not act on the class's space");
    f.verify();
    DyonicReport r;
    r.lambda = lambda;
    r.induced = f.induced(2);
    CohomologyGroup H(lambda.pair, 2);
    const IntVector c = H.coordinates(lambda.cochain);
    r.action_invariant = H.reduce(r.induced * c) == H.reduce(c);
    auto P = share(topology::product_with_circle(X));
    r.dual_datum = topology::cross_with_z(lambda, P);
    if (H.group() == AbelianGroup::Z()) {
        r.m = c[0];
        r.beta = Turns(c[0]);
    }
    return r;
}

}  // namespace tdual::semifree
