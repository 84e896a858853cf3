// Basic literals (chains of kφ and φ^k) and threshold synthesis.
//
// A basic literal acts on one formula as a linguistic hedge: 2φ is
// "somewhat φ", φ^2 is "very φ".  synthesize_threshold_literal() builds a
// literal whose truth function is 0 up to q1 and 1 from q2 on, which lets a
// pure formula reproduce the answer set of a numeric-threshold query.
#pragma once

#include "lukq/formula.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace lukq {

class InvalidInterval : public Error {
public:
    explicit InvalidInterval(const std::string& what) : Error("invalid interval: " + what) {}
};

struct HedgeStep {
    enum class Kind : std::uint8_t { Sum, Prod };
    Kind kind;
    std::uint32_t k;

    static HedgeStep sum(std::uint32_t k) { return {Kind::Sum, k}; }
    static HedgeStep prod(std::uint32_t k) { return {Kind::Prod, k}; }

    friend bool operator==(const HedgeStep&, const HedgeStep&) = default;
};

/// Ordered hedge steps, applied innermost-first.  Empty is the identity.
class BasicLiteral {
public:
    BasicLiteral() = default;
    explicit BasicLiteral(std::vector<HedgeStep> steps) : steps_(std::move(steps)) {
        for (const auto& s : steps_)
            if (s.k < 2) throw std::invalid_argument("hedge steps need k >= 2");
    }

    const std::vector<HedgeStep>& steps() const noexcept { return steps_; }
    bool is_identity() const noexcept { return steps_.empty(); }
    std::size_t size() const noexcept { return steps_.size(); }

    friend bool operator==(const BasicLiteral&, const BasicLiteral&) = default;

private:
    std::vector<HedgeStep> steps_;
};

/// Separation problem 0 <= q1 < q2 <= 1.
class ThresholdSpec {
public:
    ThresholdSpec(Rational q1, Rational q2) : q1_(std::move(q1)), q2_(std::move(q2)) {
        if (q1_ < 0 || q2_ > 1) throw InvalidInterval("bounds must lie in [0,1]");
        if (!(q1_ < q2_)) throw InvalidInterval("need q1 < q2, got " + to_literal(q1_) + " >= " + to_literal(q2_));
    }
    const Rational& q1() const noexcept { return q1_; }
    const Rational& q2() const noexcept { return q2_; }

private:
    Rational q1_;
    Rational q2_;
};

/// Wraps φ in one iterated node per step, first step innermost.
inline Formula apply(const BasicLiteral& literal, Formula f) {
    for (const auto& s : literal.steps())
        f = s.kind == HedgeStep::Kind::Sum ? iter_sum(s.k, std::move(f)) : iter_prod(s.k, std::move(f));
    return f;
}

/// The literal's truth function g(x) = w(ℓ(X)) at X ↦ x, computed directly.
inline Rational literal_value(const BasicLiteral& literal, Rational x) {
    for (const auto& s : literal.steps()) {
        Rational k = s.k;
        if (s.kind == HedgeStep::Kind::Sum)
            x = detail::min(Rational(1), k * x);
        else
            x = detail::max(Rational(0), k * x - k + 1);
    }
    return x;
}

namespace detail {
inline std::uint32_t ceil_count(const Rational& r) {
    Rational c = lukq::ceil(r);
    if (c > Rational(std::numeric_limits<std::uint32_t>::max())) throw InvalidInterval("interval too narrow");
    return numerator(c).convert_to<std::uint32_t>();
}
}  // namespace detail

/// Interval doubling.  While (q1,q2) lies on one side of 1/2 it is stretched
/// by 2x (Sum 2) or 2x-1 (Prod 2); once it reaches an end of [0,1] or
/// straddles 1/2 a single terminal step finishes the separation.
///
/// The result has at most ⌈log2(1/(q2-q1))⌉ + 2 steps, and its truth
/// function is nondecreasing, 0 on [0,q1] and 1 on [q2,1].
inline BasicLiteral synthesize_threshold_literal(const ThresholdSpec& spec) {
    std::vector<HedgeStep> steps;
    Rational q1 = spec.q1();
    Rational q2 = spec.q2();
    const Rational half(1, 2);
    auto push = [&](HedgeStep::Kind kind, std::uint32_t k) {
        if (k >= 2) steps.push_back({kind, k});
    };
    for (;;) {
        if (q2 <= half) {
            push(HedgeStep::Kind::Sum, 2);
            q1 *= 2;
            q2 *= 2;
        } else if (q1 >= half) {
            push(HedgeStep::Kind::Prod, 2);
            q1 = 2 * q1 - 1;
            q2 = 2 * q2 - 1;
        } else if (q1 == 0) {
            push(HedgeStep::Kind::Sum, detail::ceil_count(1 / q2));
            break;
        } else if (q2 == 1) {
            push(HedgeStep::Kind::Prod, detail::ceil_count(1 / (1 - q1)));
            break;
        } else {
            // q1 < 1/2 < q2: squaring sends q1 to 0, then a sum lifts 2q2-1 to 1
            push(HedgeStep::Kind::Prod, 2);
            push(HedgeStep::Kind::Sum, detail::ceil_count(1 / (2 * q2 - 1)));
            break;
        }
    }
    return BasicLiteral(std::move(steps));
}

/// Literal reproducing the crisp query `value >= delta` on a finite column:
/// degree 1 exactly on values >= delta and 0 on every other value present.
inline BasicLiteral simulate_geq(const Rational& delta, std::span<const Rational> column_values) {
    if (delta <= 0 || delta > 1) throw InvalidInterval("delta must lie in (0,1]");
    if (column_values.empty()) throw std::invalid_argument("simulate_geq needs at least one value");
    // With nothing below delta the literal still has to lift [delta,1] to 1,
    // so separate from 0 instead.
    Rational below = 0;
    for (const auto& v : column_values)
        if (v < delta && below < v) below = v;
    return synthesize_threshold_literal(ThresholdSpec(below, delta));
}

/// Dual of simulate_geq for `value <= delta`: the literal is meant for the
/// negated column, since x <= delta iff 1-x >= 1-delta.
inline BasicLiteral simulate_leq(const Rational& delta, std::span<const Rational> column_values) {
    if (delta < 0 || delta >= 1) throw InvalidInterval("delta must lie in [0,1)");
    std::vector<Rational> negated;
    negated.reserve(column_values.size());
    for (const auto& v : column_values) negated.push_back(1 - v);
    return simulate_geq(1 - delta, negated);
}

/// The formula ℓ(X) answering `X >= delta` on the given column.
inline Formula geq_query(const std::string& variable, const Rational& delta,
                         std::span<const Rational> column_values) {
    return apply(simulate_geq(delta, column_values), var(variable));
}

/// The formula ℓ(!X) answering `X <= delta` on the given column.
inline Formula leq_query(const std::string& variable, const Rational& delta,
                         std::span<const Rational> column_values) {
    return apply(simulate_leq(delta, column_values), neg(var(variable)));
}

inline std::string to_string(const HedgeStep& s) {
    return (s.kind == HedgeStep::Kind::Sum ? "Sum " : "Prod ") + std::to_string(s.k);
}

}  // namespace lukq
