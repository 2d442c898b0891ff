#include "tdual/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "tdual/cohomology.hpp"
#include "tdual/gerbe.hpp"
#include "tdual/semifree.hpp"
#include "tdual/tensor_geometry.hpp"
#include "tdual/verify.hpp"

namespace tdual::cli {

namespace {

using nlohmann::json;
using topology::CellComplex;
using topology::CellSet;
using topology::ComplexPtr;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ComplexPtr share(CellComplex X) { return std::make_shared<const CellComplex>(std::move(X)); }

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

long parse_long(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        long v = std::stol(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InputError("bad " + what + ": '" + s + "'");
}

Rational parse_rational(const std::string& s) {
    try {
        return Rational(s);
    } catch (const std::exception&) {
        throw InputError("bad rational: '" + s + "'");
    }
}

NumericOptions numeric(const CommandConfig& c) {
    NumericOptions n;
    n.seed = c.seed;
    n.trials = c.trials;
    n.tol = c.tol;
    return n;
}

ComplexPtr space_from(const json& j) {
    if (j.is_string()) return share(topology::builtin(j.get<std::string>()));
    return share(topology::complex_from_json(j));
}

/// A label name or a list of cell names.
CellSet cells_from(const CellComplex& X, const json& j) {
    if (j.is_string()) return X.labeled(j.get<std::string>());
    CellSet s = X.none();
    for (const auto& name : j) s.insert(X.find(name.get<std::string>()));
    return s;
}

algebra::IntVector coords_from(const json& j) {
    algebra::IntVector v;
    for (const auto& x : j) v.push_back(x.is_string() ? BigInt(x.get<std::string>()) : BigInt(x.get<long long>()));
    return v;
}

std::string coords_string(const algebra::IntVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].str();
    return s + ")";
}

// --- buscher --------------------------------------------------------------

struct BuscherArgs {
    std::string preset, input, beta = "1/2", verify;
    int centers = 2;
};

json mismatch_json(const geometry::MetricComparison& c) {
    if (!c.mismatch) return json::object();
    const auto& m = *c.mismatch;
    json j{{"component", {m.i, m.j}}, {"b_field", m.b_field}, {"lhs", m.check.lhs}, {"rhs", m.check.rhs}, {"message", m.check.message}};
    if (m.check.witness) j["point"] = to_json(*m.check.witness);
    return j;
}

int buscher(const CommandConfig& cfg, const BuscherArgs& a, std::ostream& o) {
    using namespace geometry;
    const NumericOptions n = numeric(cfg);
    MetricData m;
    MetricData expected;
    if (a.preset == "taub-nut") {
        m = make_taub_nut();
        expected = smeared_h_monopole(taub_nut_potential());
    } else if (a.preset == "multi-center") {
        if (a.centers < 1) throw InputError("--centers must be positive");
        std::mt19937_64 rng(cfg.seed);
        std::uniform_int_distribution<int> c(-9, 9);
        std::vector<Point3> pts;
        for (int i = 0; i < a.centers; ++i) pts.push_back({Rational(c(rng), 3), Rational(c(rng), 3), Rational(c(rng), 3) + 7 * i});
        MultiCenter mc = multi_center(pts, HNormalization::CouplingHalf);
        m = make_multi_taub_nut(mc);
        expected = smeared_h_monopole(mc.H);
    } else if (a.preset == "dyonic") {
        const Expr beta(parse_rational(a.beta));
        m = with_b_field(make_taub_nut(), dyonic_b_field(beta));
        expected = pullback(smeared_h_monopole(taub_nut_potential()),
                            compose(Diffeo::shift(Chart::fibered_spherical(), 0, beta), dyonic_shift(beta, ShiftVariant::Lambda)));
    } else if (!a.input.empty()) {
        try {
            m = metric_from_json(read_json(a.input));
        } catch (const InputError&) {
            throw;
        } catch (const std::exception& e) {
            throw InputError(a.input + ": " + e.what());
        }
        expected = smeared_h_monopole(inverse(m.g(0, 0)));
    } else {
        throw InputError("buscher needs --preset or --input");
    }

    MetricData dual = buscher_transform(m, n);
    json doc{{"input", to_json(m)}, {"dual", to_json(dual)}};
    bool pass = true;
    std::string message;
    if (a.verify == "g-h") {
        auto c = compare_metrics(dual, expected, n, false);
        pass = c.equal;
        message = pass ? "dual matches g_H" : "dual differs from g_H";
        doc["verification"] = {{"check", "g-h"}, {"pass", pass}, {"message", message}};
        if (!pass) doc["verification"]["witness"] = mismatch_json(c);
    } else if (a.verify == "involution") {
        auto c = compare_metrics(buscher_transform(dual, n), m, n, true);
        pass = c.equal;
        message = pass ? "double dual matches input" : "double dual differs from input";
        doc["verification"] = {{"check", "involution"}, {"pass", pass}, {"message", message}};
        if (!pass) doc["verification"]["witness"] = mismatch_json(c);
    }

    if (cfg.format == "json") {
        o << doc.dump(2) << "\n";
    } else {
        const auto& names = dual.chart.names;
        for (std::size_t i = 0; i < names.size(); ++i)
            for (std::size_t j = i; j < names.size(); ++j) {
                const Expr& e = dual.g(i, j);
                if (!e.is_zero()) o << "g~(" << names[i] << "," << names[j] << ") = " << e.to_string() << "\n";
            }
        for (std::size_t i = 0; i < names.size(); ++i)
            for (std::size_t j = i + 1; j < names.size(); ++j) {
                const Expr e = dual.b(i, j);
                if (!e.is_zero()) o << "b~(" << names[i] << "," << names[j] << ") = " << e.to_string() << "\n";
            }
        if (!message.empty()) o << message << "\n";
        if (!pass) o << doc["verification"]["witness"].dump() << "\n";
    }
    return pass ? kOk : kVerificationFailed;
}

// --- dualize-gerbe --------------------------------------------------------

int dualize_gerbe(const CommandConfig& cfg, const std::string& input, const std::string& preset, std::ostream& o) {
    gerbe::TwoGerbe G;
    if (!input.empty()) {
        try {
            G = gerbe::two_gerbe_from_json(read_json(input));
        } catch (const InputError&) {
            throw;
        } catch (const std::exception& e) {
            throw InputError(input + ": " + e.what());
        }
    } else if (preset.rfind("clutching:", 0) == 0) {
        G = gerbe::clutching_gerbe(parse_long(preset.substr(10), "clutching degree"));
    } else if (preset == "random") {
        std::mt19937_64 rng(cfg.seed);
        G = gerbe::random_two_gerbe(rng, 4).gerbe;
    } else {
        throw InputError("dualize-gerbe needs --input or --preset clutching:<n>|random");
    }

    gerbe::GerbeReport r2 = gerbe::check_two_gerbe(G);
    json doc{{"two_gerbe", gerbe::to_json(G)}, {"two_gerbe_report", r2.to_json()}};
    bool pass = r2.valid();
    std::optional<gerbe::GerbeReport> r3;
    if (pass) {
        auto P = share(topology::product_with_circle(G.nerve.space()));
        gerbe::ThreeGerbe T = gerbe::tdualize_two_gerbe(G, P);
        r3 = gerbe::check_three_gerbe(T);
        const bool crossed =
            r3->valid() && topology::same_class(*r3->characteristic_class, topology::cross_with_z(*r2.characteristic_class, P));
        doc["three_gerbe"] = gerbe::to_json(T);
        doc["three_gerbe_report"] = r3->to_json();
        doc["class_is_eta_times_z"] = crossed;
        pass = crossed;
    }

    if (cfg.format == "json") {
        o << doc.dump(2) << "\n";
    } else {
        auto table = [&](const char* title, const gerbe::GerbeReport& r) {
            o << title << (r.valid() ? " valid" : " INVALID") << "\n";
            for (const auto& e : r.entries) {
                o << "  " << (e.pass ? "ok   " : "FAIL ") << e.condition;
                if (!e.pass) o << (e.witness ? " at " + gerbe::to_string(*e.witness) : std::string()) << " " << e.detail;
                o << "\n";
            }
            if (r.characteristic_class) {
                topology::CohomologyGroup H(r.characteristic_class->pair, r.characteristic_class->degree);
                o << "  class " << coords_string(H.coordinates(r.characteristic_class->cochain)) << " in "
                  << H.group().to_string() << "\n";
            }
        };
        table("2-gerbe", r2);
        if (r3) {
            table("3-gerbe", *r3);
            o << "class(dual) = class x z: " << (pass ? "yes" : "no") << "\n";
        }
    }
    return pass ? kOk : kVerificationFailed;
}

// --- cohomology -----------------------------------------------------------

struct CohomologyArgs {
    std::string space, input, relative, within;
    std::optional<int> degree;
    bool homology = false, les = false;
};

int cohomology(const CommandConfig& cfg, const CohomologyArgs& a, std::ostream& o) {
    ComplexPtr X;
    if (!a.space.empty()) {
        X = share(topology::builtin(a.space));
    } else if (!a.input.empty()) {
        try {
            X = space_from(read_json(a.input));
        } catch (const InputError&) {
            throw;
        } catch (const std::exception& e) {
            throw InputError(a.input + ": " + e.what());
        }
    } else {
        throw InputError("cohomology needs --space or --input");
    }
    if (a.homology && (!a.relative.empty() || !a.within.empty() || a.les))
        throw InputError("--homology is only available for absolute groups");
    if (a.degree && *a.degree < 0) throw InputError("--degree must be nonnegative");

    const topology::Pair P = topology::Pair::labeled(X, a.within, a.relative);
    if (a.les) {
        auto seq = topology::long_exact_sequence(P);
        if (cfg.format == "json") {
            o << json{{"exact", seq.exact()}, {"sequence", seq.to_json()}}.dump(2) << "\n";
        } else {
            for (const auto& n : seq.nodes) o << n.name << " = " << n.group.to_string() << (n.exact ? "" : "  (not exact)") << "\n";
        }
        return seq.exact() ? kOk : kVerificationFailed;
    }

    const std::string tag = a.homology ? "H_" : "H^";
    auto group = [&](int k) {
        return a.homology ? topology::homology(*X, k) : topology::CohomologyGroup(P, k).group();
    };
    std::vector<int> degrees;
    if (a.degree) {
        degrees.push_back(*a.degree);
    } else {
        for (int k = 0; k <= X->dimension(); ++k) degrees.push_back(k);
    }
    if (cfg.format == "json") {
        json groups = json::object();
        for (int k : degrees) groups[std::to_string(k)] = topology::to_json(group(k));
        o << json{{"kind", a.homology ? "homology" : "cohomology"}, {"groups", groups}}.dump(2) << "\n";
    } else if (a.degree) {
        o << group(*a.degree).to_string() << "\n";
    } else {
        for (int k : degrees) o << tag << k << " = " << group(k).to_string() << "\n";
    }
    return kOk;
}

// --- semi-free records ----------------------------------------------------

semifree::SemifreeSpace record_from(const std::string& preset, const std::string& input) {
    if (preset == "taub-nut") return semifree::taub_nut_record();
    if (preset == "trivial") return semifree::trivial_record();
    if (preset.rfind("charge:", 0) == 0) return semifree::monopole_record(parse_long(preset.substr(7), "charge"));
    if (!preset.empty()) throw InputError("unknown preset '" + preset + "'");
    if (input.empty()) throw InputError("needs --preset or --input");
    try {
        const json j = read_json(input);
        ComplexPtr B = space_from(j.at("base"));
        CellSet fixed = j.contains("fixed") ? cells_from(*B, j.at("fixed")) : B->none();
        CellSet comp = cells_from(*B, j.at("complement"));
        if (!B->is_subcomplex(comp)) throw semifree::InvalidClass("complement model is not a subcomplex");
        topology::CohomologyGroup H(topology::Pair::of(B, comp, B->none()), 2);
        algebra::IntVector coords = coords_from(j.at("lambda"));
        if (coords.size() != H.generator_count())
            throw semifree::InvalidClass("lambda needs " + std::to_string(H.generator_count()) + " coordinates");
        topology::CohClass lambda = topology::class_from_coordinates(H, coords);
        return semifree::classify(B, fixed, comp, lambda, j.value("name", std::string()));
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(input + ": " + e.what());
    }
}

std::vector<std::string> names_of(const CellComplex& X, const CellSet& s) {
    std::vector<std::string> out;
    for (int d = 0; d < s.levels(); ++d)
        for (std::size_t i : s.indices(d)) out.push_back(X.cells(d)[i].name);
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i];
    return s.empty() ? "-" : s;
}

int classify(const CommandConfig& cfg, const std::string& preset, const std::string& input, std::ostream& o) {
    semifree::SemifreeSpace s = record_from(preset, input);
    if (cfg.format == "json") {
        o << s.to_json().dump(2) << "\n";
        return kOk;
    }
    o << "kind: " << s.kind() << "\n";
    o << "fixed locus: " << join(names_of(*s.base, s.fixed)) << "\n";
    o << "H^2(B - F) = " << topology::CohomologyGroup(s.lambda.pair, 2).group().to_string() << "\n";
    o << "lambda = " << coords_string(s.coordinates()) << "\n";
    if (auto b = s.boundary_h2()) o << "H^2(boundary) = " << b->to_string() << "\n";
    return kOk;
}

int tdualize(const CommandConfig& cfg, const std::string& preset, const std::string& input, std::ostream& o) {
    semifree::TDualRecord r = semifree::tdualize(record_from(preset, input));
    if (cfg.format == "json") {
        o << r.to_json().dump(2) << "\n";
    } else {
        topology::CohomologyGroup H(r.flux.pair, 3);
        o << "flux = " << coords_string(H.coordinates(r.flux.cochain)) << " in H^3 = " << H.group().to_string() << "\n";
        o << "source: " << join(r.extension.source_cells) << "\n";
        o << "ideal: " << r.extension.ideal << "\n";
        o << "quotient: " << r.extension.quotient << "\n";
        o << "round trip: " << (r.round_trip ? "yes" : "no") << "\n";
    }
    return r.round_trip ? kOk : kVerificationFailed;
}

int spectrum(const CommandConfig& cfg, std::ostream& o) {
    semifree::SpectrumModel m = semifree::test_example_spectrum();
    semifree::SpectrumModel r = semifree::hausdorff_regularization(m);
    semifree::TDualRecord rec = semifree::regularized_record(r);
    if (cfg.format == "json") {
        o << json{{"spectrum", m.to_json()}, {"regularized", r.to_json()}, {"regularized_record", rec.to_json()}}.dump(2) << "\n";
        return kOk;
    }
    auto show = [&](const char* title, const semifree::SpectrumModel& s) {
        o << title << ": " << s.space << "\n";
        o << "  free part: " << s.regular_part << "\n";
        o << "  fiber over fixed locus: " << s.fixed_fiber << "\n";
        o << "  hausdorff: " << (s.hausdorff() ? "yes" : "no") << "\n";
        if (s.identification_step) o << "  glued line step: " << s.identification_step->str() << " (x 2pi)\n";
    };
    show("spectrum", m);
    show("regularized", r);
    o << "regularized flux = " << coords_string(topology::coordinates(rec.flux)) << "\n";
    return kOk;
}

int homotopy(const CommandConfig& cfg, int centers, std::ostream& o) {
    if (centers < 1) throw InputError("--centers must be positive");
    auto t = semifree::multi_center_homotopy(static_cast<std::size_t>(centers));
    if (cfg.format == "json") {
        json h = json::array();
        for (const auto& g : t.homology) h.push_back(topology::to_json(g));
        o << json{{"centers", centers}, {"model", "wedge of " + std::to_string(centers - 1) + " two-spheres"}, {"homology", h}}.dump(2)
          << "\n";
    } else {
        o << "centers: " << centers << " (wedge of " << centers - 1 << " two-spheres)\n";
        for (std::size_t k = 0; k < t.homology.size(); ++k) o << "H_" << k << " = " << t.homology[k].to_string() << "\n";
    }
    return kOk;
}

int verify(const CommandConfig& cfg, const std::string& suite, std::ostream& o) {
    verify::SuiteOptions opts{cfg.seed, cfg.trials, cfg.tol};
    auto results = verify::run_suite(suite, opts);
    const bool pass = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
    if (cfg.format == "json") {
        o << verify::to_json(results).dump(2) << "\n";
    } else {
        for (const auto& r : results) {
            o << (r.pass ? "PASS " : "FAIL ") << r.suite << "/" << r.name << "\n";
            if (!r.pass) o << "  witness: " << r.detail.dump() << "\n";
        }
        o << (pass ? "all checks passed" : "verification failed") << "\n";
    }
    return pass ? kOk : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Topological T-duality toolkit", "tdual"};
    app.require_subcommand(1);
    app.fallthrough();

    CommandConfig cfg;
    app.add_option("--seed", cfg.seed, "random seed")->envname("TDUAL_SEED");
    app.add_option("--trials", cfg.trials, "sample points per numeric identity")->check(CLI::PositiveNumber);
    app.add_option("--tol", cfg.tol, "relative tolerance")->check(CLI::PositiveNumber);
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"json", "table"}));
    app.add_option("--output", cfg.output, "write output to this file");

    BuscherArgs ba;
    auto* bus = app.add_subcommand("buscher", "Buscher dual of a metric");
    auto* bp = bus->add_option("--preset", ba.preset)->check(CLI::IsMember({"taub-nut", "multi-center", "dyonic"}));
    auto* bi = bus->add_option("--input", ba.input, "MetricData JSON")->check(CLI::ExistingFile);
    bp->excludes(bi);
    bus->add_option("--centers", ba.centers, "number of centers (multi-center preset)");
    bus->add_option("--beta", ba.beta, "rational beta (dyonic preset)");
    bus->add_option("--verify", ba.verify)->check(CLI::IsMember({"g-h", "involution"}));

    std::string g_input, g_preset;
    auto* dg = app.add_subcommand("dualize-gerbe", "T-dualize a 2-gerbe into a 3-gerbe");
    auto* gi = dg->add_option("--input", g_input, "TwoGerbe JSON")->check(CLI::ExistingFile);
    dg->add_option("--preset", g_preset, "clutching:<n> or random")->excludes(gi);

    CohomologyArgs ca;
    auto* co = app.add_subcommand("cohomology", "cohomology tables");
    auto* cs = co->add_option("--space", ca.space, "builtin space name");
    co->add_option("--input", ca.input, "complex JSON")->check(CLI::ExistingFile)->excludes(cs);
    co->add_option("--degree", ca.degree);
    co->add_option("--relative", ca.relative, "label of the subcomplex A in H(X, A)");
    co->add_option("--within", ca.within, "label of the subcomplex X (default: whole space)");
    co->add_flag("--homology", ca.homology);
    co->add_flag("--les", ca.les, "long exact sequence of the pair");

    std::string s_preset, s_input;
    auto* cl = app.add_subcommand("classify", "classify a semi-free circle space");
    auto* tdu = app.add_subcommand("tdualize", "T-dual record of a semi-free circle space");
    for (auto* sc : {cl, tdu}) {
        auto* p = sc->add_option("--preset", s_preset, "taub-nut, trivial or charge:<p>");
        sc->add_option("--input", s_input, "record JSON")->check(CLI::ExistingFile)->excludes(p);
    }

    auto* sp = app.add_subcommand("spectrum", "test-example spectrum and its Hausdorff regularization");
    int centers = 0;
    auto* ho = app.add_subcommand("homotopy", "homotopy type of the multi-center space");
    ho->add_option("--centers", centers)->required();

    std::string suite;
    auto* ve = app.add_subcommand("verify", "run a verification suite");
    ve->add_option("suite", suite, "metrics, dyonic, cohomology, gerbes, semifree or all")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kInputError;
    }

    std::ostringstream body;
    int code = kOk;
    try {
        cfg.subcommand = app.get_subcommands().front()->get_name();
        if (cfg.subcommand == "buscher") code = buscher(cfg, ba, body);
        else if (cfg.subcommand == "dualize-gerbe") code = dualize_gerbe(cfg, g_input, g_preset, body);
        else if (cfg.subcommand == "cohomology") code = cohomology(cfg, ca, body);
        else if (cfg.subcommand == "classify") code = classify(cfg, s_preset, s_input, body);
        else if (cfg.subcommand == "tdualize") code = tdualize(cfg, s_preset, s_input, body);
        else if (cfg.subcommand == "spectrum") code = spectrum(cfg, body);
        else if (cfg.subcommand == "homotopy") code = homotopy(cfg, centers, body);
        else code = verify(cfg, suite, body);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
    (void)sp;

    if (cfg.output.empty()) {
        out << body.str();
    } else {
        std::ofstream f(cfg.output);
        if (!f) {
            err << "error: cannot write " << cfg.output << "\n";
            return kInputError;
        }
        f << body.str();
    }
    return code;
}

}  // namespace tdual::cli
