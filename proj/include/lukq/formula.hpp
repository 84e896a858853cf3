// Łukasiewicz formulas over column variables, and their [0,1] semantics.
//
// A Formula is an immutable, reference-counted tree.  Derived connectives
// (⊤, ∨, ∧, ↔, ⊕, ⊙, ⊖, kφ, φ^k) are first-class nodes evaluated by their
// closed-form truth functions; desugar() rewrites them into the primitive
// language {⊥, X, ¬, →} and serves as an independent check on eval().
//
// CrispCmp is an extension atom for traditional threshold queries such as
// `(0.875<=X11)`.  It is not a formula of the logic: desugar() rejects it.
#pragma once

#include "lukq/rational.hpp"

#include <cctype>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace lukq {

/// Base class of every error lukq reports.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(std::string name)
        : Error("unbound variable '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class NotDesugarable : public Error {
public:
    NotDesugarable() : Error("crisp comparison atoms have no Łukasiewicz desugaring") {}
};

// ── Degree ──────────────────────────────────────────────────────────────────

/// A truth value in [0,1], held exactly.
class Degree {
public:
    Degree() = default;
    explicit Degree(Rational v) : value_(std::move(v)) {
        if (value_ < 0 || value_ > 1)
            throw std::out_of_range("degree outside [0,1]: " + lukq::to_fraction(value_));
    }

    static Degree zero() { return Degree(); }
    static Degree one() { return Degree(Rational(1)); }

    const Rational& value() const noexcept { return value_; }
    bool is_one() const { return value_ == 1; }
    bool is_zero() const { return value_ == 0; }

    /// Three fractional digits, half-up: the `[0.793]` display form.
    std::string to_string(unsigned places = 3) const { return to_fixed(value_, places); }
    std::string to_fraction() const { return lukq::to_fraction(value_); }

    friend bool operator==(const Degree& a, const Degree& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Degree& a, const Degree& b) {
        if (a.value_ < b.value_) return std::strong_ordering::less;
        if (b.value_ < a.value_) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    Rational value_{0};
};

// ── Identifiers ─────────────────────────────────────────────────────────────

/// Keywords of the query language, compared case-insensitively.
inline bool is_keyword(std::string_view s) {
    auto eq = [&](std::string_view kw) {
        if (s.size() != kw.size()) return false;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (std::tolower(static_cast<unsigned char>(s[i])) != kw[i]) return false;
        return true;
    };
    return eq("and") || eq("or") || eq("ox");
}

/// `[A-Za-z_][A-Za-z0-9_]*`
inline bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    auto head = static_cast<unsigned char>(s.front());
    if (!(std::isalpha(head) || head == '_')) return false;
    for (char c : s) {
        auto u = static_cast<unsigned char>(c);
        if (!(std::isalnum(u) || u == '_')) return false;
    }
    return true;
}

/// Variable names: identifiers that are not query keywords.
inline bool is_variable_name(std::string_view s) { return is_identifier(s) && !is_keyword(s); }

// ── Assignment ──────────────────────────────────────────────────────────────

/// An atomic evaluation: column variable → degree.
class Assignment {
public:
    Assignment() = default;
    Assignment(std::initializer_list<std::pair<const std::string, Degree>> init) : values_(init) {}

    void set(std::string name, Degree value) { values_.insert_or_assign(std::move(name), std::move(value)); }

    const Degree* find(std::string_view name) const {
        auto it = values_.find(name);
        return it == values_.end() ? nullptr : &it->second;
    }
    const Degree& at(std::string_view name) const {
        if (auto* d = find(name)) return *d;
        throw UnboundVariable(std::string(name));
    }

    std::size_t size() const noexcept { return values_.size(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    std::map<std::string, Degree, std::less<>> values_;
};

// ── Formula ─────────────────────────────────────────────────────────────────

enum class BinaryOp : std::uint8_t { Impl, Or, And, Iff, Oplus, Odot, Ominus };
enum class IterOp : std::uint8_t { Sum, Prod };
enum class CmpDirection : std::uint8_t { Geq, Leq };

struct FormulaNode;

class Formula {
public:
    struct Var { std::string name; };
    struct Falsum {};
    struct Verum {};
    struct CrispCmp {
        CmpDirection direction;
        Rational threshold;
        std::string var;
    };

    /// Structural view of one node.  Children are returned as Formula handles.
    enum class Kind : std::uint8_t { Var, Falsum, Verum, Neg, Binary, Iterated, CrispCmp };

    Kind kind() const;
    const std::string& var_name() const;       // Var
    const Formula& child() const;              // Neg, Iterated
    BinaryOp binary_op() const;                // Binary
    const Formula& lhs() const;                // Binary
    const Formula& rhs() const;                // Binary
    IterOp iter_op() const;                    // Iterated
    std::uint32_t count() const;               // Iterated: k
    const CrispCmp& crisp() const;             // CrispCmp

    const FormulaNode& node() const { return *node_; }

    friend bool operator==(const Formula& a, const Formula& b);

private:
    friend struct FormulaFactory;
    explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const FormulaNode> node_;
};

struct NegNode { Formula arg; };
struct BinaryNode { BinaryOp op; Formula lhs, rhs; };
struct IteratedNode { IterOp op; std::uint32_t k; Formula arg; };

struct FormulaNode {
    std::variant<Formula::Var, Formula::Falsum, Formula::Verum, NegNode, BinaryNode, IteratedNode,
                 Formula::CrispCmp>
        value;
};

struct FormulaFactory {
    template <typename T>
    static Formula make(T&& value) {
        return Formula(std::make_shared<const FormulaNode>(FormulaNode{std::forward<T>(value)}));
    }
};

inline Formula::Kind Formula::kind() const { return static_cast<Kind>(node_->value.index()); }

inline const std::string& Formula::var_name() const { return std::get<Var>(node_->value).name; }

inline const Formula& Formula::child() const {
    if (auto* n = std::get_if<NegNode>(&node_->value)) return n->arg;
    return std::get<IteratedNode>(node_->value).arg;
}
inline BinaryOp Formula::binary_op() const { return std::get<BinaryNode>(node_->value).op; }
inline const Formula& Formula::lhs() const { return std::get<BinaryNode>(node_->value).lhs; }
inline const Formula& Formula::rhs() const { return std::get<BinaryNode>(node_->value).rhs; }
inline IterOp Formula::iter_op() const { return std::get<IteratedNode>(node_->value).op; }
inline std::uint32_t Formula::count() const { return std::get<IteratedNode>(node_->value).k; }
inline const Formula::CrispCmp& Formula::crisp() const { return std::get<CrispCmp>(node_->value); }

inline bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Formula::Kind::Var: return a.var_name() == b.var_name();
        case Formula::Kind::Falsum:
        case Formula::Kind::Verum: return true;
        case Formula::Kind::Neg: return a.child() == b.child();
        case Formula::Kind::Binary:
            return a.binary_op() == b.binary_op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
        case Formula::Kind::Iterated:
            return a.iter_op() == b.iter_op() && a.count() == b.count() && a.child() == b.child();
        case Formula::Kind::CrispCmp:
            return a.crisp().direction == b.crisp().direction &&
                   a.crisp().threshold == b.crisp().threshold && a.crisp().var == b.crisp().var;
    }
    return false;
}

// ── Constructors ────────────────────────────────────────────────────────────

inline Formula var(std::string name) {
    if (!is_variable_name(name)) throw std::invalid_argument("invalid variable name '" + name + "'");
    return FormulaFactory::make(Formula::Var{std::move(name)});
}
inline Formula falsum() { return FormulaFactory::make(Formula::Falsum{}); }
inline Formula verum() { return FormulaFactory::make(Formula::Verum{}); }
inline Formula neg(Formula a) { return FormulaFactory::make(NegNode{std::move(a)}); }

inline Formula binary(BinaryOp op, Formula a, Formula b) {
    return FormulaFactory::make(BinaryNode{op, std::move(a), std::move(b)});
}
inline Formula impl(Formula a, Formula b) { return binary(BinaryOp::Impl, std::move(a), std::move(b)); }
inline Formula lor(Formula a, Formula b) { return binary(BinaryOp::Or, std::move(a), std::move(b)); }
inline Formula land(Formula a, Formula b) { return binary(BinaryOp::And, std::move(a), std::move(b)); }
inline Formula iff(Formula a, Formula b) { return binary(BinaryOp::Iff, std::move(a), std::move(b)); }
inline Formula oplus(Formula a, Formula b) { return binary(BinaryOp::Oplus, std::move(a), std::move(b)); }
inline Formula odot(Formula a, Formula b) { return binary(BinaryOp::Odot, std::move(a), std::move(b)); }
inline Formula ominus(Formula a, Formula b) { return binary(BinaryOp::Ominus, std::move(a), std::move(b)); }

inline Formula iterated(IterOp op, std::uint32_t k, Formula a) {
    if (k < 1) throw std::invalid_argument("iteration count must be at least 1");
    return FormulaFactory::make(IteratedNode{op, k, std::move(a)});
}
/// kφ
inline Formula iter_sum(std::uint32_t k, Formula a) { return iterated(IterOp::Sum, k, std::move(a)); }
/// φ^k
inline Formula iter_prod(std::uint32_t k, Formula a) { return iterated(IterOp::Prod, k, std::move(a)); }

inline Formula crisp(CmpDirection dir, Rational threshold, std::string name) {
    if (threshold < 0 || threshold > 1) throw std::invalid_argument("comparison threshold outside [0,1]");
    if (!is_variable_name(name)) throw std::invalid_argument("invalid variable name '" + name + "'");
    return FormulaFactory::make(Formula::CrispCmp{dir, std::move(threshold), std::move(name)});
}
/// (c<=X)
inline Formula crisp_geq(Rational c, std::string name) { return crisp(CmpDirection::Geq, std::move(c), std::move(name)); }
/// (X<=c)
inline Formula crisp_leq(Rational c, std::string name) { return crisp(CmpDirection::Leq, std::move(c), std::move(name)); }

// ── Queries over the tree ───────────────────────────────────────────────────

namespace detail {
inline void collect_vars(const Formula& f, std::set<std::string>& out) {
    switch (f.kind()) {
        case Formula::Kind::Var: out.insert(f.var_name()); break;
        case Formula::Kind::CrispCmp: out.insert(f.crisp().var); break;
        case Formula::Kind::Neg:
        case Formula::Kind::Iterated: collect_vars(f.child(), out); break;
        case Formula::Kind::Binary:
            collect_vars(f.lhs(), out);
            collect_vars(f.rhs(), out);
            break;
        default: break;
    }
}
}  // namespace detail

inline std::set<std::string> free_vars(const Formula& f) {
    std::set<std::string> out;
    detail::collect_vars(f, out);
    return out;
}

/// Number of nodes; an iterated node counts once whatever its k.
inline std::size_t node_count(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Neg:
        case Formula::Kind::Iterated: return 1 + node_count(f.child());
        case Formula::Kind::Binary: return 1 + node_count(f.lhs()) + node_count(f.rhs());
        default: return 1;
    }
}

/// True when `f` contains a CrispCmp atom.
inline bool has_crisp(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::CrispCmp: return true;
        case Formula::Kind::Neg:
        case Formula::Kind::Iterated: return has_crisp(f.child());
        case Formula::Kind::Binary: return has_crisp(f.lhs()) || has_crisp(f.rhs());
        default: return false;
    }
}

// ── Semantics ───────────────────────────────────────────────────────────────

namespace detail {

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

inline Rational eval_binary(BinaryOp op, const Rational& a, const Rational& b) {
    switch (op) {
        case BinaryOp::Impl: return min(Rational(1), 1 - (a - b));
        case BinaryOp::Or: return max(a, b);
        case BinaryOp::And: return min(a, b);
        case BinaryOp::Iff: return 1 - (a > b ? a - b : b - a);
        case BinaryOp::Oplus: return min(Rational(1), a + b);
        case BinaryOp::Odot: return max(Rational(0), a + b - 1);
        case BinaryOp::Ominus: return max(Rational(0), a - b);
    }
    throw std::logic_error("unknown connective");
}

inline Rational eval_rational(const Formula& f, const Assignment& w) {
    switch (f.kind()) {
        case Formula::Kind::Var: return w.at(f.var_name()).value();
        case Formula::Kind::Falsum: return 0;
        case Formula::Kind::Verum: return 1;
        case Formula::Kind::Neg: return 1 - eval_rational(f.child(), w);
        case Formula::Kind::Binary:
            return eval_binary(f.binary_op(), eval_rational(f.lhs(), w), eval_rational(f.rhs(), w));
        case Formula::Kind::Iterated: {
            Rational x = eval_rational(f.child(), w);
            Rational k = f.count();
            if (f.iter_op() == IterOp::Sum) return min(Rational(1), k * x);
            return max(Rational(0), k * x - k + 1);
        }
        case Formula::Kind::CrispCmp: {
            const auto& c = f.crisp();
            const Rational& x = w.at(c.var).value();
            bool holds = c.direction == CmpDirection::Geq ? x >= c.threshold : x <= c.threshold;
            return holds ? 1 : 0;
        }
    }
    throw std::logic_error("unknown formula kind");
}

}  // namespace detail

/// w(φ).  Throws UnboundVariable when φ mentions a variable absent from w.
inline Degree eval(const Formula& f, const Assignment& w) { return Degree(detail::eval_rational(f, w)); }

// ── Desugaring ──────────────────────────────────────────────────────────────

namespace detail {

inline Formula core_or(const Formula& a, const Formula& b) { return impl(impl(a, b), b); }
inline Formula core_and(const Formula& a, const Formula& b) { return neg(core_or(neg(a), neg(b))); }
inline Formula core_oplus(const Formula& a, const Formula& b) { return impl(neg(a), b); }
inline Formula core_odot(const Formula& a, const Formula& b) { return neg(core_oplus(neg(a), neg(b))); }

}  // namespace detail

/// Rewrites φ over {⊥, X, ¬, →} only, following the defining equations of
/// each derived connective.  Subtrees are shared, not copied.
inline Formula desugar(const Formula& f) {
    using detail::core_and;
    using detail::core_odot;
    using detail::core_oplus;
    using detail::core_or;
    switch (f.kind()) {
        case Formula::Kind::Var:
        case Formula::Kind::Falsum: return f;
        case Formula::Kind::Verum: return neg(falsum());
        case Formula::Kind::Neg: return neg(desugar(f.child()));
        case Formula::Kind::Binary: {
            Formula a = desugar(f.lhs());
            Formula b = desugar(f.rhs());
            switch (f.binary_op()) {
                case BinaryOp::Impl: return impl(a, b);
                case BinaryOp::Or: return core_or(a, b);
                case BinaryOp::And: return core_and(a, b);
                case BinaryOp::Iff: return core_and(impl(a, b), impl(b, a));
                case BinaryOp::Oplus: return core_oplus(a, b);
                case BinaryOp::Odot: return core_odot(a, b);
                case BinaryOp::Ominus: return neg(impl(a, b));
            }
            break;
        }
        case Formula::Kind::Iterated: {
            Formula a = desugar(f.child());
            // 1φ = φ, (k+1)φ = φ ⊕ kφ;  φ^1 = φ, φ^(k+1) = φ ⊙ φ^k
            Formula acc = a;
            for (std::uint32_t i = 1; i < f.count(); ++i)
                acc = f.iter_op() == IterOp::Sum ? core_oplus(a, acc) : core_odot(a, acc);
            return acc;
        }
        case Formula::Kind::CrispCmp: throw NotDesugarable();
    }
    throw std::logic_error("unknown formula kind");
}

/// True when `f` uses only ⊥, variables, ¬ and →.
inline bool is_core(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Var:
        case Formula::Kind::Falsum: return true;
        case Formula::Kind::Neg: return is_core(f.child());
        case Formula::Kind::Binary:
            return f.binary_op() == BinaryOp::Impl && is_core(f.lhs()) && is_core(f.rhs());
        default: return false;
    }
}

}  // namespace lukq
