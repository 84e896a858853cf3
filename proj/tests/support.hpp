// Random formulas and worlds for property tests, plus an independent
// evaluator written straight from the truth tables (no shared code with
// lukq::eval beyond the AST accessors).
#pragma once

#include "lukq/lukq.hpp"

#include <random>
#include <string>
#include <vector>

namespace lukq::testing {

using Rng = std::mt19937_64;

struct GenOptions {
    std::vector<std::string> vars{"X0", "X1", "X2", "X3"};
    int max_depth = 5;
    bool crisp = false;
    bool constants = true;
    std::uint32_t max_k = 5;
};

inline Rational random_rational(Rng& rng, int max_den) {
    std::uniform_int_distribution<int> den_dist(1, max_den);
    int d = den_dist(rng);
    std::uniform_int_distribution<int> num_dist(0, d);
    return Rational(num_dist(rng), d);
}

inline Formula random_formula(Rng& rng, const GenOptions& opt, int depth = 0) {
    std::uniform_int_distribution<int> pick(0, 99);
    int r = pick(rng);
    bool leaf = depth >= opt.max_depth || (depth > 0 && r < 25);
    if (leaf) {
        int l = pick(rng);
        if (opt.constants && l < 6) return l < 3 ? falsum() : verum();
        if (opt.crisp && l < 16) {
            std::uniform_int_distribution<std::size_t> v(0, opt.vars.size() - 1);
            Rational c = random_rational(rng, 20);
            return l < 11 ? crisp_geq(c, opt.vars[v(rng)]) : crisp_leq(c, opt.vars[v(rng)]);
        }
        std::uniform_int_distribution<std::size_t> v(0, opt.vars.size() - 1);
        return var(opt.vars[v(rng)]);
    }
    std::uniform_int_distribution<int> shape(0, 9);
    int s = shape(rng);
    if (s == 0) return neg(random_formula(rng, opt, depth + 1));
    if (s == 1) {
        std::uniform_int_distribution<std::uint32_t> k(1, opt.max_k);
        bool sum = pick(rng) < 50;
        return iterated(sum ? IterOp::Sum : IterOp::Prod, k(rng), random_formula(rng, opt, depth + 1));
    }
    std::uniform_int_distribution<int> op(0, 6);
    return binary(static_cast<BinaryOp>(op(rng)), random_formula(rng, opt, depth + 1),
                  random_formula(rng, opt, depth + 1));
}

inline Assignment random_world(Rng& rng, const std::vector<std::string>& vars, int max_den = 24) {
    Assignment w;
    for (const auto& v : vars) w.set(v, Degree(random_rational(rng, max_den)));
    return w;
}

inline Rational clamp01(const Rational& x) {
    if (x < 0) return 0;
    if (x > 1) return 1;
    return x;
}

/// Oracle: every connective written as a clamp of its linear form.
inline Rational oracle_eval(const Formula& f, const Assignment& w) {
    using K = Formula::Kind;
    switch (f.kind()) {
        case K::Var: return w.at(f.var_name()).value();
        case K::Falsum: return 0;
        case K::Verum: return 1;
        case K::Neg: return 1 - oracle_eval(f.child(), w);
        case K::CrispCmp: {
            const auto& c = f.crisp();
            const Rational& x = w.at(c.var).value();
            bool holds = c.direction == CmpDirection::Geq ? x >= c.threshold : x <= c.threshold;
            return holds ? 1 : 0;
        }
        case K::Iterated: {
            // k-fold strong sum / product, unrolled
            Rational x = oracle_eval(f.child(), w);
            Rational acc = x;
            for (std::uint32_t i = 1; i < f.count(); ++i)
                acc = f.iter_op() == IterOp::Sum ? clamp01(acc + x) : clamp01(acc + x - 1);
            return acc;
        }
        case K::Binary: {
            Rational a = oracle_eval(f.lhs(), w);
            Rational b = oracle_eval(f.rhs(), w);
            Rational d = a - b;
            switch (f.binary_op()) {
                case BinaryOp::Impl: return clamp01(1 - a + b);
                case BinaryOp::Or: return a < b ? b : a;
                case BinaryOp::And: return a < b ? a : b;
                case BinaryOp::Iff: return 1 - (d < 0 ? Rational(-d) : d);
                case BinaryOp::Oplus: return clamp01(a + b);
                case BinaryOp::Odot: return clamp01(a + b - 1);
                case BinaryOp::Ominus: return clamp01(a - b);
            }
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace lukq::testing
