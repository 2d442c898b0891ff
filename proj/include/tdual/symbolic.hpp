#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

namespace tdual {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

class UnboundSymbol : public std::runtime_error {
public:
    explicit UnboundSymbol(const std::string& name)
        : std::runtime_error("unbound symbol: " + name), symbol(name) {}
    std::string symbol;
};

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Kind { Constant, Symbol, Function, Sum, Product, Power, Sin, Cos };

class Expr;

struct Node {
    Kind kind = Kind::Constant;
    Rational value;                // constant value, or exponent for Power
    std::string name;              // symbol or function name
    std::vector<int> order;        // derivative multi-index for Function
    std::vector<Expr> children;
    double numeric = 0.0;          // cached double of `value`
};

/// Immutable handle to a shared expression tree.
class Expr {
public:
    Expr();                        // the constant 0
    Expr(int v);                   // NOLINT(google-explicit-constructor)
    Expr(Rational v);              // NOLINT(google-explicit-constructor)

    static Expr constant(Rational v);
    static Expr symbol(std::string name);
    static Expr function(std::string name, std::vector<Expr> args, std::vector<int> order = {});
    static Expr sum(std::vector<Expr> terms);
    static Expr product(std::vector<Expr> factors);
    static Expr power(Expr base, Rational exponent);
    static Expr sin(Expr arg);
    static Expr cos(Expr arg);

    const Node& node() const { return *node_; }
    Kind kind() const { return node_->kind; }
    const std::vector<Expr>& children() const { return node_->children; }

    bool is_constant() const { return kind() == Kind::Constant; }
    bool is_zero() const { return is_constant() && node_->value == 0; }
    bool is_one() const { return is_constant() && node_->value == 1; }

    /// Symbol names appearing anywhere in the tree.
    std::set<std::string> free_symbols() const;

    std::string to_string() const;

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Structural total order; used for canonical collection of like factors.
int compare(const Expr& a, const Expr& b);
bool structurally_equal(const Expr& a, const Expr& b);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, Rational exponent);
Expr sqrt(const Expr& e);
Expr inverse(const Expr& e);

// Numeric closure for an opaque function: receives argument values and the
// derivative multi-index (one entry per argument, all zero for the function
// itself).
using FunctionClosure = std::function<double(std::span<const double>, std::span<const int>)>;

class FunctionRegistry {
public:
    void define(const std::string& name, FunctionClosure f) { table_[name] = std::move(f); }
    const FunctionClosure* find(const std::string& name) const;
    bool contains(const std::string& name) const { return table_.count(name) != 0; }

    /// H(r, g) = g^-2 + 1/(2r), with closed-form partial derivatives of any order.
    static FunctionRegistry with_presets();

private:
    std::map<std::string, FunctionClosure> table_;
};

struct Interval {
    double lo = -1.0;
    double hi = 1.0;
};

/// Values for every free symbol plus the closures resolving opaque functions.
struct PointAssignment {
    std::map<std::string, double> values;
    std::shared_ptr<const FunctionRegistry> functions;

    double at(const std::string& symbol) const;
};

/// Seeded generator of point assignments. Boxes default to a margin of 0.05
/// away from the singular loci r = 0 and theta in {0, pi}.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed, std::shared_ptr<const FunctionRegistry> functions = nullptr);

    void set_box(const std::string& symbol, Interval box) { boxes_[symbol] = box; }
    Interval box(const std::string& symbol) const;
    PointAssignment draw(const std::set<std::string>& symbols);

    static constexpr double kSingularMargin = 0.05;

private:
    std::mt19937_64 rng_;
    std::map<std::string, Interval> boxes_;
    std::shared_ptr<const FunctionRegistry> functions_;
};

double evaluate(const Expr& e, const PointAssignment& p);
Expr differentiate(const Expr& e, const std::string& x);
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);
Expr simplify_basic(const Expr& e);

struct NumericCheck {
    bool equal = true;
    int trials_run = 0;
    int domain_errors = 0;
    std::optional<PointAssignment> witness;
    double lhs = 0.0;
    double rhs = 0.0;
    std::string message;
};

struct NumericOptions {
    int trials = 100;
    double tol = 1e-9;
    std::uint64_t seed = 42;
    int max_retries = 1000;
    std::map<std::string, Interval> boxes;
    std::shared_ptr<const FunctionRegistry> functions;
};

/// Randomized equality: |a-b| <= tol * max(1, |a|, |b|) at every sampled point.
NumericCheck equal_numeric(const Expr& a, const Expr& b, const NumericOptions& opts = {});

nlohmann::json to_json(const Expr& e);
Expr expr_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PointAssignment& p);

}  // namespace tdual
