#include "tdual/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tdual {

namespace {

double to_double(const Rational& q) { return q.convert_to<double>(); }

bool is_integer(const Rational& q) { return boost::multiprecision::denominator(q) == 1; }

Rational rational_power(const Rational& base, long n) {
    Rational result = 1;
    const Rational b = n < 0 ? Rational(1) / base : base;
    for (long i = 0; i < std::labs(n); ++i) result *= b;
    return result;
}

std::shared_ptr<Node> make_node(Kind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
}

bool depends_on(const Expr& e, const std::string& x) {
    if (e.kind() == Kind::Symbol) return e.node().name == x;
    for (const auto& c : e.children())
        if (depends_on(c, x)) return true;
    return false;
}

void collect_symbols(const Expr& e, std::set<std::string>& out) {
    if (e.kind() == Kind::Symbol) out.insert(e.node().name);
    for (const auto& c : e.children()) collect_symbols(c, out);
}

// One-level rewrite assuming the children are already simplified.
Expr simplify_node(const Expr& e);

Expr simplify_sum(const std::vector<Expr>& in) {
    std::vector<Expr> terms;
    Rational constant = 0;
    auto push = [&](const Expr& t, auto&& self) -> void {
        if (t.kind() == Kind::Sum) {
            for (const auto& c : t.children()) self(c, self);
        } else if (t.is_constant()) {
            constant += t.node().value;
        } else {
            terms.push_back(t);
        }
    };
    for (const auto& t : in) push(t, push);
    if (constant != 0) terms.push_back(Expr::constant(constant));
    if (terms.empty()) return Expr(0);
    if (terms.size() == 1) return terms.front();
    return Expr::sum(std::move(terms));
}

Expr simplify_power(const Expr& base, const Rational& exponent);

Expr simplify_product(const std::vector<Expr>& in) {
    Rational coefficient = 1;
    std::vector<std::pair<Expr, Rational>> factors;
    auto add_factor = [&](const Expr& base, const Rational& exp) {
        for (auto& [b, e] : factors) {
            if (structurally_equal(b, base)) {
                e += exp;
                return;
            }
        }
        factors.emplace_back(base, exp);
    };
    auto push = [&](const Expr& f, auto&& self) -> void {
        if (f.kind() == Kind::Product) {
            for (const auto& c : f.children()) self(c, self);
        } else if (f.is_constant()) {
            coefficient *= f.node().value;
        } else if (f.kind() == Kind::Power) {
            add_factor(f.children().front(), f.node().value);
        } else {
            add_factor(f, 1);
        }
    };
    for (const auto& f : in) push(f, push);
    if (coefficient == 0) return Expr(0);

    std::vector<Expr> out;
    for (const auto& [b, e] : factors) {
        if (e == 0) continue;
        Expr p = simplify_power(b, e);
        if (p.is_constant()) {
            coefficient *= p.node().value;
        } else if (p.kind() == Kind::Product) {
            for (const auto& c : p.children()) {
                if (c.is_constant())
                    coefficient *= c.node().value;
                else
                    out.push_back(c);
            }
        } else {
            out.push_back(p);
        }
    }
    if (coefficient != 1 || out.empty()) out.insert(out.begin(), Expr::constant(coefficient));
    if (out.size() == 1) return out.front();
    return Expr::product(std::move(out));
}

Expr simplify_power(const Expr& base, const Rational& exponent) {
    if (exponent == 0) return Expr(1);
    if (exponent == 1) return base;
    if (base.is_constant()) {
        const Rational& b = base.node().value;
        if (b == 1) return Expr(1);
        if (is_integer(exponent) && !(b == 0 && exponent < 0)) {
            return Expr::constant(rational_power(b, boost::multiprecision::numerator(exponent).convert_to<long>()));
        }
        return Expr::power(base, exponent);
    }
    if (base.kind() == Kind::Power && is_integer(exponent)) {
        return simplify_power(base.children().front(), base.node().value * exponent);
    }
    if (base.kind() == Kind::Product && is_integer(exponent)) {
        std::vector<Expr> parts;
        for (const auto& c : base.children()) parts.push_back(simplify_power(c, exponent));
        return simplify_product(parts);
    }
    return Expr::power(base, exponent);
}

Expr simplify_node(const Expr& e) {
    switch (e.kind()) {
        case Kind::Sum: return simplify_sum(e.children());
        case Kind::Product: return simplify_product(e.children());
        case Kind::Power: return simplify_power(e.children().front(), e.node().value);
        case Kind::Sin:
            if (e.children().front().is_zero()) return Expr(0);
            return e;
        case Kind::Cos:
            if (e.children().front().is_zero()) return Expr(1);
            return e;
        default: return e;
    }
}

Expr rebuild(const Expr& e, std::vector<Expr> children) {
    switch (e.kind()) {
        case Kind::Function: return Expr::function(e.node().name, std::move(children), e.node().order);
        case Kind::Sum: return Expr::sum(std::move(children));
        case Kind::Product: return Expr::product(std::move(children));
        case Kind::Power: return Expr::power(children.front(), e.node().value);
        case Kind::Sin: return Expr::sin(children.front());
        case Kind::Cos: return Expr::cos(children.front());
        default: return e;
    }
}

Expr simplify_once(const Expr& e) {
    if (e.children().empty()) return e;
    std::vector<Expr> kids;
    kids.reserve(e.children().size());
    for (const auto& c : e.children()) kids.push_back(simplify_once(c));
    return simplify_node(rebuild(e, std::move(kids)));
}

std::string rational_string(const Rational& q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

Expr::Expr() : Expr(Rational(0)) {}
Expr::Expr(int v) : Expr(Rational(v)) {}
Expr::Expr(Rational v) {
    auto n = make_node(Kind::Constant);
    n->value = std::move(v);
    n->numeric = to_double(n->value);
    node_ = std::move(n);
}

Expr Expr::constant(Rational v) { return Expr(std::move(v)); }

Expr Expr::symbol(std::string name) {
    auto n = make_node(Kind::Symbol);
    n->name = std::move(name);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::function(std::string name, std::vector<Expr> args, std::vector<int> order) {
    auto n = make_node(Kind::Function);
    n->name = std::move(name);
    if (order.empty()) order.assign(args.size(), 0);
    if (order.size() != args.size()) throw std::invalid_argument("derivative multi-index arity mismatch");
    n->order = std::move(order);
    n->children = std::move(args);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::sum(std::vector<Expr> terms) {
    auto n = make_node(Kind::Sum);
    n->children = std::move(terms);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::product(std::vector<Expr> factors) {
    auto n = make_node(Kind::Product);
    n->children = std::move(factors);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::power(Expr base, Rational exponent) {
    auto n = make_node(Kind::Power);
    n->value = std::move(exponent);
    n->numeric = to_double(n->value);
    n->children = {std::move(base)};
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::sin(Expr arg) {
    auto n = make_node(Kind::Sin);
    n->children = {std::move(arg)};
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::cos(Expr arg) {
    auto n = make_node(Kind::Cos);
    n->children = {std::move(arg)};
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

std::set<std::string> Expr::free_symbols() const {
    std::set<std::string> out;
    collect_symbols(*this, out);
    return out;
}

std::string Expr::to_string() const {
    const Node& n = node();
    auto join = [&](const char* sep) {
        std::string s;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) s += sep;
            s += n.children[i].to_string();
        }
        return s;
    };
    switch (n.kind) {
        case Kind::Constant: return rational_string(n.value);
        case Kind::Symbol: return n.name;
        case Kind::Function: {
            std::string s = n.name;
            bool any = std::any_of(n.order.begin(), n.order.end(), [](int o) { return o != 0; });
            if (any) {
                s += "_[";
                for (std::size_t i = 0; i < n.order.size(); ++i) s += (i ? "," : "") + std::to_string(n.order[i]);
                s += "]";
            }
            return s + "(" + join(", ") + ")";
        }
        case Kind::Sum: return "(" + join(" + ") + ")";
        case Kind::Product: return join("*");
        case Kind::Power: return "(" + n.children.front().to_string() + ")^(" + rational_string(n.value) + ")";
        case Kind::Sin: return "sin(" + n.children.front().to_string() + ")";
        case Kind::Cos: return "cos(" + n.children.front().to_string() + ")";
    }
    return {};
}

int compare(const Expr& a, const Expr& b) {
    const Node& x = a.node();
    const Node& y = b.node();
    if (&x == &y) return 0;
    if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
    if (x.value != y.value) return x.value < y.value ? -1 : 1;
    if (x.name != y.name) return x.name < y.name ? -1 : 1;
    if (x.order != y.order) return x.order < y.order ? -1 : 1;
    if (x.children.size() != y.children.size()) return x.children.size() < y.children.size() ? -1 : 1;
    for (std::size_t i = 0; i < x.children.size(); ++i) {
        int c = compare(x.children[i], y.children[i]);
        if (c) return c;
    }
    return 0;
}

bool structurally_equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

Expr operator+(const Expr& a, const Expr& b) { return simplify_sum({a, b}); }
Expr operator-(const Expr& a) { return simplify_product({Expr(-1), a}); }
Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }
Expr operator*(const Expr& a, const Expr& b) { return simplify_product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return a * inverse(b); }
Expr pow(const Expr& base, Rational exponent) { return simplify_power(base, exponent); }
Expr sqrt(const Expr& e) { return pow(e, Rational(1, 2)); }
Expr inverse(const Expr& e) { return pow(e, -1); }

// ---------------------------------------------------------------------------

const FunctionClosure* FunctionRegistry::find(const std::string& name) const {
    auto it = table_.find(name);
    return it == table_.end() ? nullptr : &it->second;
}

FunctionRegistry FunctionRegistry::with_presets() {
    FunctionRegistry reg;
    reg.define("H", [](std::span<const double> args, std::span<const int> order) {
        if (args.size() != 2 || order.size() != 2) throw DomainError("H expects arguments (r, g)");
        const double r = args[0];
        const double g = args[1];
        const int dr = order[0];
        const int dg = order[1];
        double value = 0.0;
        if (dr == 0) {
            if (g == 0.0) throw DomainError("H: coupling g = 0");
            double c = 1.0;
            for (int i = 0; i < dg; ++i) c *= -2.0 - i;
            value += c * std::pow(g, -2.0 - dg);
        }
        if (dg == 0) {
            if (r == 0.0) throw DomainError("H: pole at r = 0");
            double c = 0.5;
            for (int i = 1; i <= dr; ++i) c *= -static_cast<double>(i);
            value += c * std::pow(r, -1.0 - dr);
        }
        return value;
    });
    return reg;
}

double PointAssignment::at(const std::string& symbol) const {
    auto it = values.find(symbol);
    if (it == values.end()) throw UnboundSymbol(symbol);
    return it->second;
}

Sampler::Sampler(std::uint64_t seed, std::shared_ptr<const FunctionRegistry> functions)
    : rng_(seed), functions_(std::move(functions)) {
    constexpr double pi = std::numbers::pi;
    boxes_["r"] = {kSingularMargin, 5.0};
    boxes_["theta"] = {kSingularMargin, pi - kSingularMargin};
    boxes_["phi"] = {0.0, 2.0 * pi};
    boxes_["kappa"] = {0.0, 2.0 * pi};
    boxes_["g"] = {0.5, 2.0};
    boxes_["beta"] = {-2.0, 2.0};
    if (!functions_) functions_ = std::make_shared<const FunctionRegistry>(FunctionRegistry::with_presets());
}

Interval Sampler::box(const std::string& symbol) const {
    auto it = boxes_.find(symbol);
    return it == boxes_.end() ? Interval{} : it->second;
}

PointAssignment Sampler::draw(const std::set<std::string>& symbols) {
    PointAssignment p;
    p.functions = functions_;
    for (const auto& s : symbols) {
        const Interval b = box(s);
        std::uniform_real_distribution<double> dist(b.lo, b.hi);
        p.values[s] = dist(rng_);
    }
    return p;
}

// ---------------------------------------------------------------------------

double evaluate(const Expr& e, const PointAssignment& p) {
    const Node& n = e.node();
    double result = 0.0;
    switch (n.kind) {
        case Kind::Constant: return n.numeric;
        case Kind::Symbol: return p.at(n.name);
        case Kind::Function: {
            const FunctionClosure* f = p.functions ? p.functions->find(n.name) : nullptr;
            if (!f) throw UnboundSymbol(n.name);
            std::vector<double> args;
            args.reserve(n.children.size());
            for (const auto& c : n.children) args.push_back(evaluate(c, p));
            result = (*f)(args, n.order);
            break;
        }
        case Kind::Sum:
            for (const auto& c : n.children) result += evaluate(c, p);
            break;
        case Kind::Product:
            result = 1.0;
            for (const auto& c : n.children) result *= evaluate(c, p);
            break;
        case Kind::Power: {
            const double b = evaluate(n.children.front(), p);
            const double x = n.numeric;
            if (b == 0.0 && x < 0.0) throw DomainError("division by zero");
            if (b < 0.0 && !is_integer(n.value)) throw DomainError("fractional power of a negative number");
            result = std::pow(b, x);
            break;
        }
        case Kind::Sin: result = std::sin(evaluate(n.children.front(), p)); break;
        case Kind::Cos: result = std::cos(evaluate(n.children.front(), p)); break;
    }
    if (!std::isfinite(result)) throw DomainError("non-finite value in " + e.to_string());
    return result;
}

Expr differentiate(const Expr& e, const std::string& x) {
    const Node& n = e.node();
    switch (n.kind) {
        case Kind::Constant: return Expr(0);
        case Kind::Symbol: return Expr(n.name == x ? 1 : 0);
        case Kind::Function: {
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                Expr inner = differentiate(n.children[i], x);
                if (inner.is_zero()) continue;
                std::vector<int> order = n.order;
                ++order[i];
                terms.push_back(Expr::function(n.name, n.children, order) * inner);
            }
            return simplify_sum(terms);
        }
        case Kind::Sum: {
            std::vector<Expr> terms;
            for (const auto& c : n.children) terms.push_back(differentiate(c, x));
            return simplify_sum(terms);
        }
        case Kind::Product: {
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < n.children.size(); ++i) {
                if (!depends_on(n.children[i], x)) continue;
                std::vector<Expr> factors;
                for (std::size_t j = 0; j < n.children.size(); ++j)
                    factors.push_back(j == i ? differentiate(n.children[j], x) : n.children[j]);
                terms.push_back(simplify_product(factors));
            }
            return simplify_sum(terms);
        }
        case Kind::Power: {
            const Expr& base = n.children.front();
            Expr inner = differentiate(base, x);
            if (inner.is_zero()) return Expr(0);
            return Expr::constant(n.value) * pow(base, n.value - 1) * inner;
        }
        case Kind::Sin: {
            const Expr& a = n.children.front();
            return Expr::cos(a) * differentiate(a, x);
        }
        case Kind::Cos: {
            const Expr& a = n.children.front();
            return -(Expr::sin(a) * differentiate(a, x));
        }
    }
    return Expr(0);
}

namespace {
Expr substitute_raw(const Expr& e, const std::map<std::string, Expr>& bindings) {
    if (e.kind() == Kind::Symbol) {
        auto it = bindings.find(e.node().name);
        return it == bindings.end() ? e : it->second;
    }
    if (e.children().empty()) return e;
    std::vector<Expr> kids;
    kids.reserve(e.children().size());
    for (const auto& c : e.children()) kids.push_back(substitute_raw(c, bindings));
    return rebuild(e, std::move(kids));
}
}  // namespace

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
    if (bindings.empty()) return e;
    return simplify_basic(substitute_raw(e, bindings));
}

Expr simplify_basic(const Expr& e) {
    Expr current = simplify_once(e);
    for (int i = 0; i < 16; ++i) {
        Expr next = simplify_once(current);
        if (structurally_equal(next, current)) return current;
        current = next;
    }
    return current;
}

// ---------------------------------------------------------------------------

NumericCheck equal_numeric(const Expr& a, const Expr& b, const NumericOptions& opts) {
    if (opts.trials < 1) throw std::invalid_argument("equal_numeric: trials must be >= 1");
    Sampler sampler(opts.seed, opts.functions);
    for (const auto& [name, box] : opts.boxes) sampler.set_box(name, box);

    std::set<std::string> symbols = a.free_symbols();
    symbols.merge(b.free_symbols());

    NumericCheck check;
    while (check.trials_run < opts.trials) {
        PointAssignment p = sampler.draw(symbols);
        double va = 0.0;
        double vb = 0.0;
        try {
            va = evaluate(a, p);
            vb = evaluate(b, p);
        } catch (const DomainError& err) {
            if (++check.domain_errors > opts.max_retries) {
                check.equal = false;
                check.witness = std::move(p);
                check.message = std::string("retry bound exceeded: ") + err.what();
                return check;
            }
            continue;
        }
        ++check.trials_run;
        const double scale = std::max({1.0, std::abs(va), std::abs(vb)});
        if (std::abs(va - vb) > opts.tol * scale) {
            check.equal = false;
            check.witness = std::move(p);
            check.lhs = va;
            check.rhs = vb;
            check.message = "values differ";
            return check;
        }
    }
    return check;
}

// ---------------------------------------------------------------------------

namespace {
nlohmann::json rational_json(const Rational& q) {
    return nlohmann::json::array({boost::multiprecision::numerator(q).str(), boost::multiprecision::denominator(q).str()});
}

Rational rational_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("rational must be [num, den]");
    auto part = [](const nlohmann::json& v) {
        return v.is_string() ? BigInt(v.get<std::string>()) : BigInt(v.get<long long>());
    };
    BigInt den = part(j[1]);
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rational(part(j[0]), den);
}

const char* kind_tag(Kind k) {
    switch (k) {
        case Kind::Constant: return "const";
        case Kind::Symbol: return "symbol";
        case Kind::Function: return "func";
        case Kind::Sum: return "sum";
        case Kind::Product: return "product";
        case Kind::Power: return "pow";
        case Kind::Sin: return "sin";
        case Kind::Cos: return "cos";
    }
    return "";
}
}  // namespace

nlohmann::json to_json(const Expr& e) {
    const Node& n = e.node();
    nlohmann::json j;
    j["kind"] = kind_tag(n.kind);
    if (n.kind == Kind::Constant) j["value"] = rational_json(n.value);
    if (n.kind == Kind::Power) j["exponent"] = rational_json(n.value);
    if (n.kind == Kind::Symbol || n.kind == Kind::Function) j["name"] = n.name;
    if (n.kind == Kind::Function) j["order"] = n.order;
    if (!n.children.empty()) {
        j["children"] = nlohmann::json::array();
        for (const auto& c : n.children) j["children"].push_back(to_json(c));
    }
    return j;
}

Expr expr_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Expr(Rational(j.get<long long>()));
    if (!j.is_object() || !j.contains("kind")) throw std::invalid_argument("expression node must be an object with a kind");
    const std::string kind = j.at("kind").get<std::string>();
    std::vector<Expr> kids;
    if (j.contains("children"))
        for (const auto& c : j.at("children")) kids.push_back(expr_from_json(c));
    auto need = [&](std::size_t count) {
        if (kids.size() != count) throw std::invalid_argument(kind + " expects " + std::to_string(count) + " children");
    };
    if (kind == "const") return Expr::constant(rational_from_json(j.at("value")));
    if (kind == "symbol") return Expr::symbol(j.at("name").get<std::string>());
    if (kind == "func") {
        std::vector<int> order = j.value("order", std::vector<int>{});
        return Expr::function(j.at("name").get<std::string>(), std::move(kids), std::move(order));
    }
    if (kind == "sum") return Expr::sum(std::move(kids));
    if (kind == "product") return Expr::product(std::move(kids));
    if (kind == "pow") {
        need(1);
        return Expr::power(kids.front(), rational_from_json(j.at("exponent")));
    }
    if (kind == "sin") {
        need(1);
        return Expr::sin(kids.front());
    }
    if (kind == "cos") {
        need(1);
        return Expr::cos(kids.front());
    }
    throw std::invalid_argument("unknown expression kind: " + kind);
}

nlohmann::json to_json(const PointAssignment& p) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : p.values) j[k] = v;
    return j;
}

}  // namespace tdual
