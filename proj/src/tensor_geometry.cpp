#include "tdual/tensor_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tdual::geometry {

namespace {

Expr sym(const std::string& s) { return Expr::symbol(s); }

// H'(r) as the first radial derivative of the opaque potential.
Expr taub_nut_potential_dr(const Expr& coupling) {
    return Expr::function("H", {sym(kR), coupling}, {1, 0});
}

double sampled_det(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
        if (a[pivot][c] == 0.0) return 0.0;
        if (pivot != c) {
            std::swap(a[pivot], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

}  // namespace

// ---------------------------------------------------------------------------

std::size_t Chart::index_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InvalidChart("no coordinate named " + name);
    return static_cast<std::size_t>(it - names.begin());
}

void Chart::validate() const {
    if (names.empty()) throw InvalidChart("chart has no coordinates");
    if (periodic.size() != names.size()) throw InvalidChart("periodicity flags do not match coordinates");
    std::set<std::string> seen(names.begin(), names.end());
    if (seen.size() != names.size()) throw InvalidChart("coordinate names must be unique");
    if (!periodic[0]) throw InvalidChart("the dualized coordinate " + names[0] + " must be periodic");
}

Chart Chart::fibered_spherical() { return Chart{{kKappa, kR, kTheta, kPhi}, {true, false, false, true}}; }

Chart Chart::with_fiber_first(const Chart& c, const std::string& fiber, std::vector<std::size_t>& permutation) {
    const std::size_t f = c.index_of(fiber);
    permutation.clear();
    permutation.push_back(f);
    for (std::size_t i = 0; i < c.dimension(); ++i)
        if (i != f) permutation.push_back(i);
    Chart out;
    for (std::size_t k : permutation) {
        out.names.push_back(c.names[k]);
        out.periodic.push_back(c.periodic[k]);
    }
    return out;
}

std::size_t SymmetricMatrix::slot(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw IndexOutOfRange("metric index out of range");
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i + 1) / 2 + j;
}

std::size_t AntisymmetricMatrix::slot(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw IndexOutOfRange("B-field index out of range");
    // i < j assumed
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

Expr AntisymmetricMatrix::operator()(std::size_t i, std::size_t j) const {
    if (i == j) {
        if (i >= n_) throw IndexOutOfRange("B-field index out of range");
        return Expr(0);
    }
    return i < j ? data_[slot(i, j)] : -data_[slot(j, i)];
}

void AntisymmetricMatrix::set(std::size_t i, std::size_t j, Expr e) {
    if (i == j) throw std::invalid_argument("diagonal of an antisymmetric matrix is zero");
    if (i < j)
        data_[slot(i, j)] = std::move(e);
    else
        data_[slot(j, i)] = -e;
}

// ---------------------------------------------------------------------------

DiffForm::DiffForm(Chart chart, int degree) : chart_(std::move(chart)), degree_(degree) {
    if (degree < 0 || static_cast<std::size_t>(degree) > chart_.dimension())
        throw std::invalid_argument("form degree exceeds chart dimension");
}

namespace {
// Sorts in place and returns the permutation sign, or 0 on a repeated index.
int sort_with_sign(std::vector<int>& idx) {
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j + 1 < idx.size() - i; ++j)
            if (idx[j] > idx[j + 1]) {
                std::swap(idx[j], idx[j + 1]);
                sign = -sign;
            }
    for (std::size_t i = 0; i + 1 < idx.size(); ++i)
        if (idx[i] == idx[i + 1]) return 0;
    return sign;
}
}  // namespace

Expr DiffForm::component(std::vector<int> indices) const {
    if (indices.size() != static_cast<std::size_t>(degree_)) throw std::invalid_argument("wrong number of form indices");
    const int sign = sort_with_sign(indices);
    if (sign == 0) return Expr(0);
    auto it = terms_.find(indices);
    if (it == terms_.end()) return Expr(0);
    return sign > 0 ? it->second : -it->second;
}

void DiffForm::set(std::vector<int> indices, Expr coefficient) {
    if (indices.size() != static_cast<std::size_t>(degree_)) throw std::invalid_argument("wrong number of form indices");
    for (int i : indices)
        if (i < 0 || static_cast<std::size_t>(i) >= chart_.dimension()) throw IndexOutOfRange("form index out of range");
    const int sign = sort_with_sign(indices);
    if (sign == 0) throw std::invalid_argument("repeated index in form component");
    Expr c = sign > 0 ? coefficient : -coefficient;
    if (c.is_zero())
        terms_.erase(indices);
    else
        terms_[indices] = std::move(c);
}

DiffForm DiffForm::scaled(const Expr& factor) const {
    DiffForm out(chart_, degree_);
    for (const auto& [k, v] : terms_) out.set(k, factor * v);
    return out;
}

DiffForm operator+(const DiffForm& a, const DiffForm& b) {
    if (a.degree() != b.degree()) throw std::invalid_argument("adding forms of different degree");
    DiffForm out = a;
    for (const auto& [k, v] : b.terms()) out.set(k, a.component(k) + v);
    return out;
}

DiffForm operator-(const DiffForm& a, const DiffForm& b) { return a + b.scaled(Expr(-1)); }

// ---------------------------------------------------------------------------

Diffeo Diffeo::identity(const Chart& c) {
    Diffeo d{c, {}, std::vector<Expr>{}};
    for (std::size_t i = 0; i < c.dimension(); ++i) {
        d.targets.push_back(c.coordinate(i));
        d.inverse->push_back(c.coordinate(i));
    }
    return d;
}

Diffeo Diffeo::shift(const Chart& c, std::size_t index, const Expr& amount) {
    Diffeo d = identity(c);
    d.targets.at(index) = d.targets[index] + amount;
    if (!amount.free_symbols().count(c.names[index])) (*d.inverse)[index] = (*d.inverse)[index] - amount;
    else d.inverse.reset();
    return d;
}

Diffeo compose(const Diffeo& outer, const Diffeo& inner) {
    if (!(outer.chart == inner.chart)) throw InvalidChart("composing maps on different charts");
    auto chain = [&](const std::vector<Expr>& first, const std::vector<Expr>& second) {
        std::map<std::string, Expr> bind;
        for (std::size_t i = 0; i < first.size(); ++i) bind[inner.chart.names[i]] = first[i];
        std::vector<Expr> out;
        for (const auto& t : second) out.push_back(substitute(t, bind));
        return out;
    };
    Diffeo d{outer.chart, chain(inner.targets, outer.targets), std::nullopt};
    if (outer.inverse && inner.inverse) d.inverse = chain(*outer.inverse, *inner.inverse);
    return d;
}

bool check_invertible(const Diffeo& f, const NumericOptions& opts) {
    if (!f.inverse) return false;
    Diffeo inv{f.chart, *f.inverse, f.targets};
    Diffeo round = compose(inv, f);
    for (std::size_t i = 0; i < f.chart.dimension(); ++i)
        if (!equal_numeric(round.targets[i], f.chart.coordinate(i), opts).equal) return false;
    return true;
}

// ---------------------------------------------------------------------------

Expr taub_nut_potential(const Expr& coupling) { return Expr::function("H", {sym(kR), coupling}); }

SymmetricMatrix flat_base_metric() {
    SymmetricMatrix m(3);
    const Expr r = sym(kR);
    m.set(0, 0, 1);
    m.set(1, 1, r * r);
    m.set(2, 2, r * r * pow(Expr::sin(sym(kTheta)), 2));
    return m;
}

MetricData gibbons_hawking_metric(const Expr& H, const std::array<Expr, 3>& omega) {
    MetricData m(Chart::fibered_spherical());
    const SymmetricMatrix flat = flat_base_metric();
    std::array<Expr, 4> v{Expr(1), omega[0] / 2, omega[1] / 2, omega[2] / 2};
    const Expr Hinv = inverse(H);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a; b < 4; ++b) {
            Expr base = (a > 0 && b > 0) ? H * flat(a - 1, b - 1) : Expr(0);
            m.g.set(a, b, base + Hinv * v[a] * v[b]);
        }
    return m;
}

MetricData smeared_h_monopole(const Expr& H) {
    MetricData m(Chart::fibered_spherical());
    const SymmetricMatrix flat = flat_base_metric();
    m.g.set(0, 0, H);
    for (std::size_t a = 1; a < 4; ++a)
        for (std::size_t b = a; b < 4; ++b) m.g.set(a, b, H * flat(a - 1, b - 1));
    return m;
}

MetricData make_taub_nut(const Expr& coupling) {
    if (coupling.is_zero()) throw std::invalid_argument("coupling must be nonzero");
    return gibbons_hawking_metric(taub_nut_potential(coupling), {Expr(0), Expr(0), 1 - Expr::cos(sym(kTheta))});
}

MultiCenter multi_center(std::vector<Point3> centers, HNormalization norm, const Expr& coupling) {
    if (centers.empty()) throw std::invalid_argument("at least one center is required");
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            if (centers[i] == centers[j]) throw DuplicateCenters("centers " + std::to_string(i) + " and " + std::to_string(j) + " coincide");

    MultiCenter mc;
    mc.centers = std::move(centers);
    mc.normalization = norm;
    mc.constant = norm == HNormalization::CouplingHalf ? pow(coupling, -2) : Expr(1);
    mc.weight = norm == HNormalization::CouplingHalf ? Rational(1, 2) : Rational(1);

    const Expr r = sym(kR), th = sym(kTheta), ph = sym(kPhi);
    const Expr X = r * Expr::sin(th) * Expr::cos(ph);
    const Expr Y = r * Expr::sin(th) * Expr::sin(ph);
    const Expr Z = r * Expr::cos(th);
    const std::array<std::string, 3> base{kR, kTheta, kPhi};

    std::vector<Expr> terms{mc.constant};
    mc.omega = {Expr(0), Expr(0), Expr(0)};
    for (const auto& c : mc.centers) {
        const Expr dx = X - Expr(c[0]), dy = Y - Expr(c[1]), dz = Z - Expr(c[2]);
        const Expr dist = sqrt(dx * dx + dy * dy + dz * dz);
        const Expr term = Expr(mc.weight) * inverse(dist);
        mc.center_terms.push_back(term);
        terms.push_back(term);

        // weight * (1 - cos theta_i) dphi_i, with dphi_i = (dx dY - dy dX)/(dx^2 + dy^2)
        const Expr cos_i = dz * inverse(dist);
        const Expr rho2 = dx * dx + dy * dy;
        std::array<Expr, 3> a;
        for (std::size_t q = 0; q < 3; ++q) {
            const Expr dphi = (dx * differentiate(Y, base[q]) - dy * differentiate(X, base[q])) * inverse(rho2);
            a[q] = Expr(mc.weight) * (1 - cos_i) * dphi;
            mc.omega[q] = mc.omega[q] + 2 * a[q];
        }
        mc.monopole_potentials.push_back(a);
    }
    mc.H = simplify_basic(Expr::sum(terms));
    return mc;
}

MetricData make_multi_taub_nut(const MultiCenter& mc) { return gibbons_hawking_metric(mc.H, mc.omega); }

// ---------------------------------------------------------------------------

MetricData buscher_transform(const MetricData& m, const NumericOptions& opts) {
    const std::size_t n = m.chart.dimension();
    const Expr& g00 = m.g(0, 0);
    bool singular = g00.is_zero();
    if (!singular) {
        Sampler sampler(opts.seed, opts.functions);
        for (const auto& [k, box] : opts.boxes) sampler.set_box(k, box);
        const auto symbols = g00.free_symbols();
        int nonzero = 0, evaluated = 0;
        for (int t = 0; t < 20 && evaluated < 10; ++t) {
            try {
                ++evaluated;
                if (evaluate(g00, sampler.draw(symbols)) != 0.0) ++nonzero;
            } catch (const DomainError&) {
                --evaluated;
            }
        }
        singular = nonzero == 0;
    }
    if (singular) throw SingularG00("g_00 vanishes on the sample domain");

    const Expr inv = inverse(g00);
    MetricData d(m.chart);
    d.g.set(0, 0, inv);
    for (std::size_t a = 1; a < n; ++a) {
        d.g.set(0, a, m.b(0, a) * inv);
        d.b.set(0, a, m.g(0, a) * inv);
    }
    for (std::size_t a = 1; a < n; ++a)
        for (std::size_t c = a; c < n; ++c) {
            d.g.set(a, c, m.g(a, c) - (m.g(0, a) * m.g(0, c) - m.b(0, a) * m.b(0, c)) * inv);
            if (c != a) d.b.set(a, c, m.b(a, c) - (m.g(0, a) * m.b(0, c) - m.b(0, a) * m.g(0, c)) * inv);
        }
    return d;
}

DiffForm exterior_derivative(const DiffForm& form) {
    const Chart& chart = form.chart();
    if (static_cast<std::size_t>(form.degree()) >= chart.dimension())
        throw std::invalid_argument("exterior derivative of a top-degree form");
    std::map<std::vector<int>, std::vector<Expr>> acc;
    for (const auto& [idx, coeff] : form.terms()) {
        for (std::size_t j = 0; j < chart.dimension(); ++j) {
            const int jj = static_cast<int>(j);
            if (std::find(idx.begin(), idx.end(), jj) != idx.end()) continue;
            Expr dc = differentiate(coeff, chart.names[j]);
            if (dc.is_zero()) continue;
            std::vector<int> out = idx;
            auto pos = std::lower_bound(out.begin(), out.end(), jj);
            const auto shift = pos - out.begin();
            out.insert(pos, jj);
            acc[out].push_back(shift % 2 == 0 ? dc : -dc);
        }
    }
    DiffForm result(chart, form.degree() + 1);
    for (auto& [idx, parts] : acc) result.set(idx, simplify_basic(Expr::sum(parts)));
    return result;
}

DiffForm dyonic_potential(const Expr& coupling) {
    const Expr f = inverse(coupling * coupling * taub_nut_potential(coupling));
    DiffForm p(Chart::fibered_spherical(), 1);
    p.set({0}, -f);
    p.set({3}, -(f * (1 - Expr::cos(sym(kTheta))) / 2));
    return p;
}

DiffForm dyonic_b_field(const Expr& beta, const Expr& coupling) {
    const Expr H = taub_nut_potential(coupling);
    const Expr dH = taub_nut_potential_dr(coupling);
    const Expr g2 = coupling * coupling;
    const Expr th = sym(kTheta);
    DiffForm b(Chart::fibered_spherical(), 2);
    b.set({0, 1}, -(beta * dH / (g2 * H * H)));
    b.set({1, 3}, beta * dH * (1 - Expr::cos(th)) / (2 * g2 * H * H));
    b.set({2, 3}, -(beta * Expr::sin(th) / (2 * g2 * H)));
    return b;
}

namespace {
void require_center(const MultiCenter& mc, std::size_t i) {
    if (i >= mc.centers.size())
        throw IndexOutOfRange("center index " + std::to_string(i) + " out of range for " + std::to_string(mc.centers.size()) + " centers");
}
}  // namespace

DiffForm multi_center_potential(const MultiCenter& mc, std::size_t i) {
    require_center(mc, i);
    const Expr ratio = mc.center_terms[i] / mc.H;
    DiffForm p(Chart::fibered_spherical(), 1);
    p.set({0}, ratio);
    for (int q = 0; q < 3; ++q) p.set({q + 1}, ratio * mc.omega[q] / 2 - mc.monopole_potentials[i][q]);
    return p;
}

DiffForm multi_center_dual_basis_potential(const MultiCenter& mc, std::size_t i) {
    require_center(mc, i);
    const Expr ratio = 1 - mc.center_terms[i] / mc.H;
    DiffForm p(Chart::fibered_spherical(), 1);
    p.set({0}, ratio);
    for (int q = 0; q < 3; ++q) p.set({q + 1}, ratio * mc.omega[q] / 2);
    return p;
}

DiffForm multi_center_b_field(const MultiCenter& mc, std::size_t i, const Expr& beta) {
    return exterior_derivative(multi_center_potential(mc, i)).scaled(beta);
}

DiffForm multi_center_dual_basis_b_field(const MultiCenter& mc, std::size_t i, const Expr& beta) {
    return exterior_derivative(multi_center_dual_basis_potential(mc, i)).scaled(beta);
}

MetricData with_b_field(MetricData m, const DiffForm& b) {
    if (b.degree() != 2 || !(b.chart() == m.chart)) throw InvalidChart("B-field must be a 2-form on the metric's chart");
    const std::size_t n = m.chart.dimension();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            m.b.set(i, j, b.component({static_cast<int>(i), static_cast<int>(j)}));
    return m;
}

MetricData pullback(const MetricData& m, const Diffeo& f, const NumericOptions& opts) {
    if (!(m.chart == f.chart)) throw InvalidChart("pullback across different charts");
    const std::size_t n = m.chart.dimension();
    std::vector<std::vector<Expr>> J(n, std::vector<Expr>(n));
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t a = 0; a < n; ++a) J[c][a] = differentiate(f.targets[c], m.chart.names[a]);

    {
        Sampler sampler(opts.seed, opts.functions);
        for (const auto& [k, box] : opts.boxes) sampler.set_box(k, box);
        std::set<std::string> symbols;
        for (const auto& row : J)
            for (const auto& e : row) symbols.merge(e.free_symbols());
        bool regular = false;
        for (int t = 0; t < 20 && !regular; ++t) {
            PointAssignment p = sampler.draw(symbols);
            try {
                std::vector<std::vector<double>> num(n, std::vector<double>(n));
                for (std::size_t c = 0; c < n; ++c)
                    for (std::size_t a = 0; a < n; ++a) num[c][a] = evaluate(J[c][a], p);
                regular = std::abs(sampled_det(num)) > 1e-12;
            } catch (const DomainError&) {
            }
        }
        if (!regular) throw SingularJacobian("Jacobian determinant vanishes at every sample point");
    }

    std::map<std::string, Expr> bind;
    for (std::size_t c = 0; c < n; ++c) bind[m.chart.names[c]] = f.targets[c];
    MetricData moved(m.chart);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = c; d < n; ++d) {
            moved.g.set(c, d, substitute(m.g(c, d), bind));
            if (d != c) moved.b.set(c, d, substitute(m.b(c, d), bind));
        }

    MetricData out(m.chart);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            std::vector<Expr> gs, bs;
            for (std::size_t c = 0; c < n; ++c) {
                if (J[c][a].is_zero()) continue;
                for (std::size_t d = 0; d < n; ++d) {
                    if (J[d][b].is_zero()) continue;
                    gs.push_back(J[c][a] * J[d][b] * moved.g(c, d));
                    if (c != d && b != a) bs.push_back(J[c][a] * J[d][b] * moved.b(c, d));
                }
            }
            out.g.set(a, b, simplify_basic(Expr::sum(gs)));
            if (b != a) out.b.set(a, b, simplify_basic(Expr::sum(bs)));
        }
    return out;
}

Diffeo dyonic_shift(const Expr& beta, ShiftVariant variant, const Expr& coupling) {
    Expr amount = beta / (coupling * coupling * taub_nut_potential(coupling));
    if (variant == ShiftVariant::Lambda) amount = amount - beta;
    return Diffeo::shift(Chart::fibered_spherical(), 0, amount);
}

Diffeo multi_center_shift(const MultiCenter& mc, std::size_t i, const Expr& beta, ShiftVariant variant) {
    require_center(mc, i);
    const Expr ratio = mc.center_terms[i] / mc.H;
    const Expr amount = variant == ShiftVariant::Gamma ? beta * (1 - ratio) : -(beta * ratio);
    return Diffeo::shift(Chart::fibered_spherical(), 0, amount);
}

MetricComparison compare_metrics(const MetricData& a, const MetricData& b, const NumericOptions& opts, bool include_b) {
    if (!(a.chart == b.chart)) throw InvalidChart("comparing metrics on different charts");
    const std::size_t n = a.chart.dimension();
    MetricComparison out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            for (int field = 0; field < (include_b && i != j ? 2 : 1); ++field) {
                const Expr lhs = field == 0 ? a.g(i, j) : a.b(i, j);
                const Expr rhs = field == 0 ? b.g(i, j) : b.b(i, j);
                NumericCheck c = equal_numeric(lhs, rhs, opts);
                if (!c.equal) {
                    out.equal = false;
                    out.mismatch = ComponentMismatch{i, j, field == 1, std::move(c)};
                    return out;
                }
            }
        }
    return out;
}

Expr conformal_factor(const MetricData& m, const MetricData& reference, const NumericOptions& opts) {
    if (!(m.chart == reference.chart)) throw InvalidChart("conformal comparison across different charts");
    const std::size_t n = m.chart.dimension();
    std::optional<Expr> factor;
    for (std::size_t i = 0; i < n && !factor; ++i)
        if (!equal_numeric(reference.g(i, i), Expr(0), opts).equal) factor = simplify_basic(m.g(i, i) / reference.g(i, i));
    if (!factor) throw NotConformal("reference metric has no nonzero diagonal", ComponentMismatch{});

    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) order.emplace_back(i, j);
    for (std::size_t i = 0; i < n; ++i) order.emplace_back(i, i);
    for (const auto& [i, j] : order) {
        NumericCheck c = equal_numeric(m.g(i, j), *factor * reference.g(i, j), opts);
        if (!c.equal)
            throw NotConformal("component (" + std::to_string(i) + "," + std::to_string(j) + ") is not proportional",
                               ComponentMismatch{i, j, false, std::move(c)});
    }
    return *factor;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const MetricData& m) {
    nlohmann::json j;
    j["chart"] = {{"coordinates", m.chart.names}, {"periodic", m.chart.periodic}, {"fiber", m.chart.names.at(0)}};
    j["g"] = nlohmann::json::array();
    j["b"] = nlohmann::json::array();
    const std::size_t n = m.chart.dimension();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = a; c < n; ++c) {
            if (!m.g(a, c).is_zero()) j["g"].push_back({{"i", a}, {"j", c}, {"expr", tdual::to_json(m.g(a, c))}});
            if (c != a && !m.b(a, c).is_zero()) j["b"].push_back({{"i", a}, {"j", c}, {"expr", tdual::to_json(m.b(a, c))}});
        }
    return j;
}

MetricData metric_from_json(const nlohmann::json& j) {
    const auto& cj = j.at("chart");
    Chart input;
    input.names = cj.at("coordinates").get<std::vector<std::string>>();
    input.periodic = cj.at("periodic").get<std::vector<bool>>();
    if (input.periodic.size() != input.names.size()) throw InvalidChart("periodicity flags do not match coordinates");
    const std::string fiber = cj.value("fiber", input.names.empty() ? std::string() : input.names.front());
    std::vector<std::size_t> perm;
    Chart chart = Chart::with_fiber_first(input, fiber, perm);
    chart.validate();
    std::vector<std::size_t> position(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) position[perm[k]] = k;

    const std::size_t n = chart.dimension();
    MetricData m(chart);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = a; c < n; ++c) m.g.set(a, c, Expr(0));
    auto read = [&](const char* key, bool strict) {
        if (!j.contains(key)) return;
        for (const auto& e : j.at(key)) {
            const auto i = e.at("i").get<std::size_t>();
            const auto k = e.at("j").get<std::size_t>();
            if (i >= n || k >= n) throw IndexOutOfRange(std::string(key) + " entry index out of range");
            if (strict ? i >= k : i > k) throw std::invalid_argument(std::string(key) + " entries must have i " + (strict ? "<" : "<=") + " j");
            Expr val = expr_from_json(e.at("expr"));
            if (strict)
                m.b.set(position[i], position[k], std::move(val));
            else
                m.g.set(position[i], position[k], std::move(val));
        }
    };
    read("g", false);
    read("b", true);
    return m;
}

nlohmann::json to_json(const DiffForm& f) {
    nlohmann::json j;
    j["degree"] = f.degree();
    j["coordinates"] = f.chart().names;
    j["terms"] = nlohmann::json::array();
    for (const auto& [idx, c] : f.terms()) j["terms"].push_back({{"indices", idx}, {"expr", tdual::to_json(c)}});
    return j;
}

}  // namespace tdual::geometry
