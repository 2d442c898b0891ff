#include "tdual/verify.hpp"

#include <random>

#include "tdual/cohomology.hpp"
#include "tdual/gerbe.hpp"
#include "tdual/semifree.hpp"
#include "tdual/tensor_geometry.hpp"

namespace tdual::verify {

using namespace tdual::geometry;
using topology::AbelianGroup;
using topology::CellComplex;
using topology::CellSet;
using topology::ComplexPtr;
using topology::CohomologyGroup;
using topology::Pair;

namespace {

using Checks = std::vector<CheckResult>;

NumericOptions numeric(const SuiteOptions& o) {
    NumericOptions n;
    n.trials = o.trials;
    n.tol = o.tol;
    n.seed = o.seed;
    return n;
}

nlohmann::json witness(const NumericCheck& c) {
    nlohmann::json j{{"lhs", c.lhs}, {"rhs", c.rhs}, {"message", c.message}};
    if (c.witness) j["point"] = to_json(*c.witness);
    return j;
}

nlohmann::json witness(const MetricComparison& c) {
    if (!c.mismatch) return nlohmann::json::object();
    const auto& m = *c.mismatch;
    nlohmann::json j = witness(m.check);
    j["component"] = {m.i, m.j};
    j["b_field"] = m.b_field;
    return j;
}

void add(Checks& out, const std::string& suite, const std::string& name, bool pass, nlohmann::json detail = {}) {
    out.push_back({suite, name, pass, detail.is_null() ? nlohmann::json::object() : std::move(detail)});
}

Expr sym(const std::string& s) { return Expr::symbol(s); }

// --- metrics --------------------------------------------------------------

Checks metrics_suite(const SuiteOptions& o) {
    Checks out;
    const NumericOptions n = numeric(o);
    const Expr H = taub_nut_potential();
    const Expr r = sym(kR), th = sym(kTheta);

    auto c1 = compare_metrics(buscher_transform(make_taub_nut()), smeared_h_monopole(H), n, false);
    add(out, "metrics", "taub_nut_dual_is_g_H", c1.equal, witness(c1));

    // the intermediate step with omega_phi = 1 - cos(theta) and no angular factor
    MetricData lit = make_taub_nut();
    const Expr w = 1 - Expr::cos(th);
    lit.g.set(0, 3, inverse(H) * w);
    lit.g.set(3, 3, H * r * r + inverse(H) * w * w);
    auto c2 = equal_numeric(buscher_transform(lit).g(3, 3), H * r * r, n);
    add(out, "metrics", "g33_intermediate_identity", c2.equal, witness(c2));
    auto c2b = equal_numeric(buscher_transform(make_taub_nut()).g(3, 3), H * r * r * pow(Expr::sin(th), 2), n);
    add(out, "metrics", "g33_dual_component", c2b.equal, witness(c2b));

    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<int> c(-9, 9);
    for (int p : {2, 3, 5}) {
        std::vector<Point3> centers;
        for (int i = 0; i < p; ++i) centers.push_back({Rational(c(rng), 3), Rational(c(rng), 3), Rational(c(rng), 3) + 7 * i});
        MultiCenter mc = multi_center(centers, HNormalization::CouplingHalf);
        auto cmp = compare_metrics(buscher_transform(make_multi_taub_nut(mc)), smeared_h_monopole(mc.H), n, false);
        add(out, "metrics", "multi_center_dual_p" + std::to_string(p), cmp.equal, witness(cmp));
    }

    MetricData tn = with_b_field(make_taub_nut(), dyonic_b_field(sym(kBeta)));
    auto inv = compare_metrics(buscher_transform(buscher_transform(tn)), tn, n, true);
    add(out, "metrics", "buscher_involution", inv.equal, witness(inv));
    return out;
}

// --- dyonic ---------------------------------------------------------------

bool forms_equal(const DiffForm& a, const DiffForm& b, const NumericOptions& n, nlohmann::json& w) {
    std::set<std::vector<int>> keys;
    for (const auto& [k, v] : a.terms()) keys.insert(k);
    for (const auto& [k, v] : b.terms()) keys.insert(k);
    for (const auto& k : keys) {
        auto c = equal_numeric(a.component(k), b.component(k), n);
        if (!c.equal) {
            w = witness(c);
            w["component"] = k;
            return false;
        }
    }
    return true;
}

bool form_zero(const DiffForm& a, const NumericOptions& n, nlohmann::json& w) {
    return forms_equal(a, DiffForm(a.chart(), a.degree()), n, w);
}

Checks dyonic_suite(const SuiteOptions& o) {
    Checks out;
    const NumericOptions n = numeric(o);
    const Expr H = taub_nut_potential();
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<int> num(-64, 64);

    bool all = true;
    nlohmann::json w = nlohmann::json::object();
    for (int k = 0; k < 20 && all; ++k) {
        const Expr beta(Rational(num(rng), 32));
        MetricData dual = buscher_transform(with_b_field(make_taub_nut(), dyonic_b_field(beta)));
        MetricData expected = pullback(smeared_h_monopole(H), compose(Diffeo::shift(Chart::fibered_spherical(), 0, beta),
                                                                      dyonic_shift(beta, ShiftVariant::Lambda)));
        auto cmp = compare_metrics(dual, expected, n, false);
        if (!cmp.equal) {
            all = false;
            w = witness(cmp);
            w["beta"] = to_json(beta);
        }
    }
    add(out, "dyonic", "lambda_pullback_identity", all, w);

    // limits at g = 1
    const Expr kappa = sym(kKappa);
    auto registry = std::make_shared<const FunctionRegistry>(FunctionRegistry::with_presets());
    bool gamma_ok = true, lambda_ok = true;
    nlohmann::json lw = nlohmann::json::array();
    for (double b : {-2.0, -0.5, 0.75, 2.0}) {
        Diffeo gamma = dyonic_shift(sym(kBeta), ShiftVariant::Gamma, Expr(1));
        Diffeo lambda = dyonic_shift(sym(kBeta), ShiftVariant::Lambda, Expr(1));
        for (auto [R, tol] : {std::pair{1e3, 1e-3}, std::pair{1e6, 1e-6}}) {
            PointAssignment p;
            p.functions = registry;
            p.values = {{kKappa, 0.0}, {kR, R}, {kBeta, b}};
            const double gs = evaluate(gamma.targets[0] - kappa, p), ls = evaluate(lambda.targets[0] - kappa, p);
            if (std::abs(gs - b) > tol) gamma_ok = false;
            if (std::abs(ls) > tol) lambda_ok = false;
            lw.push_back({{"beta", b}, {"r", R}, {"gamma_shift", gs}, {"lambda_shift", ls}});
        }
    }
    add(out, "dyonic", "gamma_shift_tends_to_beta", gamma_ok, {{"samples", lw}});
    add(out, "dyonic", "lambda_shift_tends_to_zero", lambda_ok, {{"samples", lw}});

    const Expr beta = sym(kBeta);
    DiffForm B = dyonic_b_field(beta);
    nlohmann::json w1 = nlohmann::json::object(), w2 = nlohmann::json::object();
    add(out, "dyonic", "single_center_closed", form_zero(exterior_derivative(B), n, w1), w1);
    add(out, "dyonic", "single_center_exact", forms_equal(B, exterior_derivative(dyonic_potential()).scaled(beta), n, w2), w2);

    MultiCenter mc = multi_center({Point3{1, 0, 0}, Point3{0, -1, Rational(1, 2)}, Point3{0, 0, 2}}, HNormalization::CouplingHalf);
    bool closed = true, exact = true;
    nlohmann::json w3 = nlohmann::json::object(), w4 = nlohmann::json::object();
    for (std::size_t i = 0; i < mc.centers.size(); ++i) {
        DiffForm Bi = multi_center_b_field(mc, i, beta);
        closed = closed && form_zero(exterior_derivative(Bi), n, w3);
        exact = exact && forms_equal(Bi, exterior_derivative(multi_center_potential(mc, i)).scaled(beta), n, w4);
    }
    add(out, "dyonic", "multi_center_closed", closed, w3);
    add(out, "dyonic", "multi_center_exact", exact, w4);
    return out;
}

// --- cohomology -----------------------------------------------------------

ComplexPtr share(CellComplex X) { return std::make_shared<const CellComplex>(std::move(X)); }

algebra::IntVector unit(std::size_t n, std::size_t i) {
    algebra::IntVector v(n);
    v[i] = 1;
    return v;
}

Checks cohomology_suite(const SuiteOptions&) {
    Checks out;
    const std::vector<std::tuple<std::string, int, std::string>> table{
        {"S2xS1", 3, "Z"}, {"CP2", 2, "Z"}, {"S3", 3, "Z"}, {"L1p:2", 2, "Z_2"}, {"L1p:3", 2, "Z_3"}, {"L1p:7", 2, "Z_7"},
        {"S2", 2, "Z"},    {"S2xS1", 1, "Z"}, {"S2xS1", 2, "Z"}, {"CP2", 3, "0"}, {"CP2", 4, "Z"}, {"D3", 2, "0"}};
    for (const auto& [space, k, expected] : table) {
        const std::string got = topology::cohomology(topology::builtin(space), k).to_string();
        add(out, "cohomology", "H" + std::to_string(k) + "(" + space + ")", got == expected,
            {{"expected", expected}, {"got", got}});
    }

    for (const auto& [space, whole, sub] : std::vector<std::tuple<std::string, std::string, std::string>>{
             {"D3", "", "shell"}, {"S3", "", "S"}, {"S3", "N", "shell"}, {"C0S2xS1", "", "shell"}}) {
        auto seq = topology::long_exact_sequence(Pair::labeled(share(topology::builtin(space)), whole, sub));
        nlohmann::json w = nlohmann::json::object();
        for (const auto& n : seq.nodes)
            if (!n.exact) w = nlohmann::json{{"node", n.name}, {"degree", n.degree}};
        add(out, "cohomology", "les_exact(" + space + "," + (whole.empty() ? "all" : whole) + "," + sub + ")", seq.exact(), w);
    }

    // H3(S3, S) -> H3(N, shell) (excision) and H3(S3, S) -> H3(S3)
    {
        ComplexPtr S3 = share(topology::builtin("S3"));
        CohomologyGroup rel_disc(Pair::labeled(S3, "N", "shell"), 3), rel_sphere(Pair::labeled(S3, "", "S"), 3),
            sphere(Pair::whole(S3), 3);
        auto exc = topology::restriction_map(rel_sphere, rel_disc);
        auto j = topology::restriction_map(rel_sphere, sphere);
        const bool ok = topology::is_isomorphism(exc, rel_sphere.moduli(), rel_disc.moduli()) &&
                        topology::is_isomorphism(j, rel_sphere.moduli(), sphere.moduli()) && topology::map_rank(exc) == 1 &&
                        topology::map_rank(j) == 1;
        add(out, "cohomology", "excision_isomorphisms", ok, {{"rank_excision", topology::map_rank(exc)}, {"rank_j", topology::map_rank(j)}});
    }
    // Thom shift H^i(F) = H^{i+k}(Th)
    {
        bool ok = true;
        nlohmann::json w = nlohmann::json::object();
        for (const std::string name : {"point", "S2", "CP2"}) {
            ComplexPtr F = share(topology::builtin(name));
            for (int k = 1; k <= 3; ++k) {
                CellComplex T = topology::thom_space(topology::trivial_disc_bundle(F, k));
                for (int i = 0; i <= F->dimension(); ++i)
                    if (!(topology::cohomology(*F, i) == topology::cohomology(T, i + k))) {
                        ok = false;
                        w = nlohmann::json{{"space", name}, {"k", k}, {"i", i}};
                    }
            }
        }
        add(out, "cohomology", "thom_isomorphism", ok, w);
    }

    bool rt = true;
    nlohmann::json rw = nlohmann::json::object();
    for (const std::string name : {"point", "S1", "S2", "S3", "D3", "S2xS1", "S3xS1", "C0S2xS1", "CP2", "L1p:2", "L1p:5", "wedge:3"}) {
        ComplexPtr X = share(topology::builtin(name));
        ComplexPtr P = share(topology::product_with_circle(X));
        for (int k = 1; k <= 3; ++k) {
            CohomologyGroup Hk(Pair::whole(X), k);
            for (std::size_t g = 0; g < Hk.generator_count(); ++g) {
                auto c = topology::class_from_coordinates(Hk, unit(Hk.generator_count(), g));
                auto back = topology::fiber_integrate(topology::cross_with_z(c, P));
                if (!topology::same_class(back, c)) {
                    rt = false;
                    rw = nlohmann::json{{"space", name}, {"degree", k}, {"generator", g}};
                }
            }
        }
    }
    add(out, "cohomology", "cross_fiber_round_trip", rt, rw);
    return out;
}

// --- gerbes ---------------------------------------------------------------


BigInt pairing(const algebra::IntVector& a, const algebra::IntVector& b) {
    BigInt s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Checks gerbes_suite(const SuiteOptions& o) {
    Checks out;
    std::mt19937_64 rng(o.seed);

    bool thm = true;
    nlohmann::json tw = nlohmann::json::object();
    for (int k = 0; k < 50; ++k) {
        auto R = gerbe::random_two_gerbe(rng, 2 + k % 5);
        auto P = share(topology::product_with_circle(R.gerbe.nerve.space()));
        auto T = gerbe::tdualize_two_gerbe(R.gerbe, P);
        auto rep = gerbe::check_three_gerbe(T);
        const bool ok = rep.valid() && rep.characteristic_class &&
                        topology::same_class(*rep.characteristic_class, topology::cross_with_z(R.klass, P));
        if (!ok && thm) tw = {{"trial", k}, {"report", rep.to_json()}, {"gerbe", gerbe::to_json(R.gerbe)}};
        thm = thm && ok;
    }
    add(out, "gerbes", "dual_class_is_class_times_z", thm, tw);

    bool gauge = true;
    nlohmann::json gw = nlohmann::json::object();
    for (int k = 0; k < 100; ++k) {
        auto R = gerbe::random_two_gerbe(rng, 2 + k % 5);
        auto H = gerbe::gauge_perturb(R.gerbe, static_cast<gerbe::GaugeSlot>(k % 3), rng);
        auto rep = gerbe::check_two_gerbe(H);
        const bool ok = rep.valid() && topology::same_class(*rep.characteristic_class, R.klass);
        if (!ok && gauge) gw = {{"trial", k}, {"report", rep.to_json()}};
        gauge = gauge && ok;
    }
    add(out, "gerbes", "gauge_invariance", gauge, gw);

    bool clutch = true;
    nlohmann::json cw = nlohmann::json::object();
    const CellComplex Y = topology::sphere3_two_discs();
    algebra::IntVector z(Y.count(3));
    z[Y.find("c(s)").index] = 1;
    z[Y.find("S(s)").index] = -1;
    for (long n : {-3L, -1L, 0L, 1L, 2L, 7L}) {
        const BigInt v = pairing(gerbe::characteristic_class(gerbe::clutching_gerbe(n)).cochain, z);
        if (v != n) {
            clutch = false;
            cw = {{"n", n}, {"pairing", v.str()}};
        }
    }
    add(out, "gerbes", "clutching_class", clutch, cw);

    // corrupting epsilon on a 4-fold overlap must be reported there
    {
        std::mt19937_64 r2(o.seed + 1);
        auto R = gerbe::random_two_gerbe(r2, 5);
        gerbe::TwoGerbe G = R.gerbe;
        const gerbe::Tuple T{0, 2, 3, 4};
        algebra::IntVector bump(G.nerve.space()->count(0));
        bump[0] = 1;
        auto& e = G.epsilon[T];
        if (e.empty()) e = algebra::IntVector(bump.size());
        e = algebra::add(e, bump);
        auto rep = gerbe::check_two_gerbe(G);
        const auto& entry = rep.entry("delta_theta");
        add(out, "gerbes", "witness_detection", !rep.valid() && !entry.pass && entry.witness == T, rep.to_json());
    }
    return out;
}

// --- semifree -------------------------------------------------------------

Checks semifree_suite(const SuiteOptions&) {
    Checks out;
    using namespace tdual::semifree;

    auto round_trip = [&](const SemifreeSpace& s, long expected) {
        TDualRecord r = tdualize(s);
        const auto flux = topology::coordinates(r.flux);
        const BigInt units = flux.empty() ? BigInt(0) : BigInt(abs(flux[0]));
        bool ok = r.round_trip && units == expected && classify_dual(r.product, r.source, r.regular, r.flux) == s;
        add(out, "semifree", "round_trip(" + s.kind() + ")", ok, {{"flux_units", units.str()}, {"record", r.to_json()}});
    };
    round_trip(taub_nut_record(), 1);
    round_trip(trivial_record(), 0);
    for (long p = 2; p <= 7; ++p) round_trip(monopole_record(p), p);

    {
        bool lens = true;
        for (long p = 2; p <= 7; ++p) lens = lens && monopole_record(p).boundary_h2() == AbelianGroup::Zn(p);
        add(out, "semifree", "charge_p_boundary_is_L1p", lens);
    }

    {
        TDualRecord r = tdualize(taub_nut_record());
        CellSet point_source = r.product->none();
        point_source.insert(r.product->find("(c:apex,v)"));
        bool rejected = false;
        try {
            classify_dual(r.product, point_source, r.regular, r.flux);
        } catch (const NotWrapped&) {
            rejected = true;
        }
        add(out, "semifree", "unwrapped_source_rejected", rejected);
    }

    {
        bool ok = non_separable(Turns(1) / 3, Turns(7) / 3) && !non_separable(Turns(1) / 3, Turns(1) / 2) &&
                  non_separable(Turns(-5) / 2, Turns(1) / 2) && !non_separable(Turns(1) / 1000000007, Turns(0));
        SpectrumModel m = test_example_spectrum();
        auto fam = m.non_separable_family(Turns(1) / 4, 3);
        ok = ok && !m.hausdorff() && fam.size() == 7;
        add(out, "semifree", "separability", ok, m.to_json());
    }

    {
        SpectrumModel m = test_example_spectrum();
        SpectrumModel r = hausdorff_regularization(m);
        TDualRecord rec = regularized_record(r);
        const bool ok = r.hausdorff() && r.space == "C0S2xS1" && hausdorff_regularization(r) == r &&
                        topology::coordinates(rec.flux) == topology::coordinates(tdualize(taub_nut_record()).flux);
        add(out, "semifree", "regularization", ok, r.to_json());
    }

    {
        bool ok = true;
        nlohmann::json w = nlohmann::json::object();
        for (const char* F : {"point", "S2", "CP2"}) {
            auto Fp = share(topology::builtin(F));
            for (int k : {3, 4, 5}) {
                auto B = share(topology::trivial_disc_bundle(Fp, k));
                Pair shell = Pair::labeled(B, "boundary", "");
                CohomologyGroup H2(shell, 2);
                bool any_nonzero = false;
                for (std::size_t g = 0; g < H2.generator_count(); ++g) {
                    topology::CohClass lambda{shell, 2, H2.representative(unit(H2.generator_count(), g))};
                    auto s = gerbe::semifree_class_to_two_gerbe(lambda, {B, "boundary"});
                    const bool zero = topology::is_zero_class(s.klass);
                    any_nonzero = any_nonzero || !zero;
                    if (!topology::same_class(gerbe::characteristic_class(s.gerbe), s.klass) || (k > 3 && !zero)) {
                        ok = false;
                        w = {{"fixed", F}, {"codimension", k}, {"generator", g}};
                    }
                }
                if (k == 3 && !any_nonzero) {
                    ok = false;
                    w = {{"fixed", F}, {"codimension", 3}, {"reason", "no nonzero class"}};
                }
            }
        }
        add(out, "semifree", "codimension_vanishing", ok, w);
    }

    {
        bool ok = true;
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t p = 1; p <= 6; ++p) {
            auto t = multi_center_homotopy(p);
            ok = ok && t.homology[0] == AbelianGroup::Z() && t.homology[1].is_zero() && t.homology[2] == AbelianGroup::Z(p - 1) &&
                 t.homology[3].is_zero();
            rows.push_back({{"centers", p}, {"H2", t.homology[2].to_string()}});
        }
        add(out, "semifree", "multi_center_homotopy", ok, {{"table", rows}});
    }
    return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"metrics", "dyonic", "cohomology", "gerbes", "semifree"};
    return names;
}

std::vector<CheckResult> run_suite(const std::string& name, const SuiteOptions& opts) {
    if (name == "all") {
        std::vector<CheckResult> all;
        for (const auto& n : suite_names()) {
            auto r = run_suite(n, opts);
            all.insert(all.end(), r.begin(), r.end());
        }
        return all;
    }
    if (name == "metrics") return metrics_suite(opts);
    if (name == "dyonic") return dyonic_suite(opts);
    if (name == "cohomology") return cohomology_suite(opts);
    if (name == "gerbes") return gerbes_suite(opts);
    if (name == "semifree") return semifree_suite(opts);
    throw UnknownSuite("unknown suite '" + name + "'");
}

nlohmann::json to_json(const std::vector<CheckResult>& results) {
    nlohmann::json arr = nlohmann::json::array();
    bool pass = true;
    for (const auto& r : results) {
        pass = pass && r.pass;
        nlohmann::json j{{"suite", r.suite}, {"check", r.name}, {"pass", r.pass}};
        if (!r.pass) j["witness"] = r.detail;
        arr.push_back(j);
    }
    return {{"pass", pass}, {"checks", arr}};
}

}  // namespace tdual::verify
