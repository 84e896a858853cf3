// Exact rational numbers and their textual forms.
//
// Every truth degree in lukq is an exact rational; decimal text appears only
// at input/output boundaries (CSV cells, JSON, query rendering, SQL).
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace lukq {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Thrown when a numeric literal cannot be read as an exact rational.
class NumberFormatError : public std::invalid_argument {
public:
    explicit NumberFormatError(std::string_view text)
        : std::invalid_argument("not a number: '" + std::string(text) + "'") {}
};

namespace detail {

inline bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

// cpp_int reads a leading 0 as octal, so decimal digit strings go through here.
inline Integer decimal_integer(std::string_view digits) {
    auto nz = digits.find_first_not_of('0');
    if (nz == std::string_view::npos) return 0;
    return Integer(std::string(digits.substr(nz)));
}

inline Integer pow10(unsigned n) {
    Integer r = 1;
    for (unsigned i = 0; i < n; ++i) r *= 10;
    return r;
}

// Strips factors of 2 and 5; the result is 1 iff `d` has a finite decimal
// expansion as a denominator.
inline Integer strip_2_5(Integer d) {
    while (d % 2 == 0) d /= 2;
    while (d % 5 == 0) d /= 5;
    return d;
}

}  // namespace detail

/// Parses `[+-]digits[.digits][e[+-]digits]` or `[+-]p/q` exactly.
inline Rational parse_rational(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) throw NumberFormatError(text);

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        if (!detail::all_digits(num) || !detail::all_digits(den)) throw NumberFormatError(text);
        Integer d = detail::decimal_integer(den);
        if (d == 0) throw NumberFormatError(text);
        Rational r(detail::decimal_integer(num), d);
        return negative ? Rational(-r) : r;
    }

    int exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        auto exp_text = s.substr(e + 1);
        s = s.substr(0, e);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (!detail::all_digits(exp_text) || exp_text.size() > 4) throw NumberFormatError(text);
        std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (exp_negative) exponent = -exponent;
    }

    std::string_view int_part = s;
    std::string_view frac_part;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        int_part = s.substr(0, dot);
        frac_part = s.substr(dot + 1);
        if (!frac_part.empty() && !detail::all_digits(frac_part)) throw NumberFormatError(text);
    }
    if (int_part.empty() && frac_part.empty()) throw NumberFormatError(text);
    if (!int_part.empty() && !detail::all_digits(int_part)) throw NumberFormatError(text);

    std::string digits = std::string(int_part) + std::string(frac_part);
    Integer mantissa = detail::decimal_integer(digits);
    int scale = static_cast<int>(frac_part.size()) - exponent;
    Rational r = scale >= 0 ? Rational(mantissa, detail::pow10(static_cast<unsigned>(scale)))
                            : Rational(mantissa * detail::pow10(static_cast<unsigned>(-scale)));
    return negative ? Rational(-r) : r;
}

/// Converts a double through its shortest round-trip decimal spelling, so
/// that a JSON `12.8` becomes exactly 64/5.
inline Rational rational_from_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) throw NumberFormatError("<double>");
    return parse_rational(std::string_view(buf, static_cast<std::size_t>(end - buf)));
}

/// True when `r` is written exactly by a finite decimal.
inline bool has_finite_decimal(const Rational& r) {
    return detail::strip_2_5(boost::multiprecision::denominator(r)) == 1;
}

/// Exact decimal spelling with the fewest digits; requires has_finite_decimal.
inline std::string to_exact_decimal(const Rational& r) {
    if (!has_finite_decimal(r)) throw std::domain_error("no finite decimal expansion");
    Integer num = boost::multiprecision::numerator(r);
    Integer den = boost::multiprecision::denominator(r);
    bool negative = num < 0;
    if (negative) num = -num;
    unsigned scale = 0;
    while (den != 1) {
        // den = 2^a 5^b: multiplying by 10 and reducing removes one factor
        num *= 10;
        ++scale;
        Integer g = boost::multiprecision::gcd(num, den);
        num /= g;
        den /= g;
    }
    std::string digits = num.str();
    if (scale > 0) {
        if (digits.size() <= scale) digits.insert(0, scale - digits.size() + 1, '0');
        digits.insert(digits.size() - scale, 1, '.');
    }
    return negative ? "-" + digits : digits;
}

/// Decimal rendering with `places` fractional digits, rounding half away
/// from zero (half-up for the nonnegative degrees this is used for).
inline std::string to_fixed(const Rational& r, unsigned places = 3) {
    Integer num = boost::multiprecision::numerator(r);
    Integer den = boost::multiprecision::denominator(r);
    bool negative = num < 0;
    if (negative) num = -num;
    Integer scaled = num * detail::pow10(places);
    Integer q = scaled / den;
    Integer rem = scaled % den;
    if (rem * 2 >= den) q += 1;
    std::string digits = q.str();
    if (places > 0) {
        if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
        digits.insert(digits.size() - places, 1, '.');
    }
    return (negative && q != 0) ? "-" + digits : digits;
}

/// Always `p/q`, with q >= 1.
inline std::string to_fraction(const Rational& r) {
    return boost::multiprecision::numerator(r).str() + "/" +
           boost::multiprecision::denominator(r).str();
}

/// Decimal when exact, `p/q` otherwise.
inline std::string to_literal(const Rational& r) {
    return has_finite_decimal(r) ? to_exact_decimal(r) : to_fraction(r);
}

inline Rational ceil(const Rational& r) {
    Integer num = boost::multiprecision::numerator(r);
    Integer den = boost::multiprecision::denominator(r);
    Integer q = num / den;  // truncates toward zero
    if (q * den != num && num > 0) q += 1;
    return Rational(q);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace lukq
