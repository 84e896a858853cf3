// Text syntax for queries.
//
// Precedence, tightest first:
//
//   ^k            postfix iterated conjunction φ^k
//   !  k*  k      prefix negation, prefix iterated disjunction kφ
//   ox            ⊙, left-assoc
//   -             ⊖, left-assoc
//   +             ⊕, left-assoc
//   and           ∧, left-assoc
//   or            ∨, left-assoc
//   ->            →, right-assoc
//   <->           ↔, non-associative
//
// Atoms are variables, `0` (⊥), `1` (⊤), parenthesised formulas and the
// crisp comparisons `(c<=X)` / `(X<=c)`.  Keywords are case-insensitive.
// See docs/grammar.md for the EBNF.
#pragma once

#include "lukq/formula.hpp"

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lukq {

struct SourceSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class SyntaxError : public Error {
public:
    SyntaxError(SourceSpan span, std::string message)
        : Error(message + " at " + std::to_string(span.start) + ".." + std::to_string(span.end)),
          span_(span),
          message_(std::move(message)) {}

    const SourceSpan& span() const noexcept { return span_; }
    const std::string& message() const noexcept { return message_; }

private:
    SourceSpan span_;
    std::string message_;
};

namespace detail {

enum class Tok : std::uint8_t {
    Ident, Number, LParen, RParen, Bang, Arrow, Iff, Leq, Plus, Minus, Star, Caret, Slash,
    And, Or, Ox, End
};

struct Token {
    Tok kind;
    std::string_view text;
    SourceSpan span;
};

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto push = [&](Tok k, std::size_t len) {
        out.push_back({k, src.substr(i, len), {i, i + len}});
        i += len;
    };
    while (i < src.size()) {
        auto c = static_cast<unsigned char>(src[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (std::isalpha(c) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            std::string_view word = src.substr(i, j - i);
            Tok k = Tok::Ident;
            if (is_keyword(word)) {
                char first = static_cast<char>(std::tolower(static_cast<unsigned char>(word[0])));
                k = first == 'a' ? Tok::And : (word.size() == 2 && first == 'o' &&
                                               std::tolower(static_cast<unsigned char>(word[1])) == 'r')
                                                  ? Tok::Or
                                                  : Tok::Ox;
            }
            push(k, j - i);
            continue;
        }
        if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            push(Tok::Number, j - i);
            continue;
        }
        std::string_view rest = src.substr(i);
        if (rest.starts_with("<->")) { push(Tok::Iff, 3); continue; }
        if (rest.starts_with("->")) { push(Tok::Arrow, 2); continue; }
        if (rest.starts_with("<=")) { push(Tok::Leq, 2); continue; }
        switch (c) {
            case '(': push(Tok::LParen, 1); continue;
            case ')': push(Tok::RParen, 1); continue;
            case '!': push(Tok::Bang, 1); continue;
            case '+': push(Tok::Plus, 1); continue;
            case '-': push(Tok::Minus, 1); continue;
            case '*': push(Tok::Star, 1); continue;
            case '^': push(Tok::Caret, 1); continue;
            case '/': push(Tok::Slash, 1); continue;
            default: break;
        }
        throw SyntaxError({i, i + 1}, "unexpected character");
    }
    out.push_back({Tok::End, {}, {src.size(), src.size()}});
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src) : tokens_(lex(src)) {}

    Formula parse() {
        if (peek().kind == Tok::End) throw SyntaxError(peek().span, "empty query");
        Formula f = parse_iff();
        if (peek().kind != Tok::End) throw SyntaxError(peek().span, "unexpected token");
        return f;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }
    const Token& expect(Tok k, const char* what) {
        if (peek().kind != k) throw SyntaxError(peek().span, std::string("expected ") + what);
        return next();
    }

    Formula parse_iff() {
        Formula lhs = parse_impl();
        if (accept(Tok::Iff)) {
            Formula rhs = parse_impl();
            if (peek().kind == Tok::Iff)
                throw SyntaxError(peek().span, "'<->' is non-associative; add parentheses");
            return iff(std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Formula parse_impl() {
        Formula lhs = parse_or();
        if (accept(Tok::Arrow)) return impl(std::move(lhs), parse_impl());
        return lhs;
    }

    template <typename Next>
    Formula left_assoc(Tok tok, BinaryOp op, Next next_level) {
        Formula lhs = (this->*next_level)();
        while (accept(tok)) lhs = binary(op, std::move(lhs), (this->*next_level)());
        return lhs;
    }

    Formula parse_or() { return left_assoc(Tok::Or, BinaryOp::Or, &Parser::parse_and); }
    Formula parse_and() { return left_assoc(Tok::And, BinaryOp::And, &Parser::parse_oplus); }
    Formula parse_oplus() { return left_assoc(Tok::Plus, BinaryOp::Oplus, &Parser::parse_ominus); }
    Formula parse_ominus() { return left_assoc(Tok::Minus, BinaryOp::Ominus, &Parser::parse_odot); }
    Formula parse_odot() { return left_assoc(Tok::Ox, BinaryOp::Odot, &Parser::parse_unary); }

    static bool is_integer(std::string_view s) { return s.find('.') == std::string_view::npos; }

    std::uint32_t count_of(const Token& t) const {
        if (!is_integer(t.text)) throw SyntaxError(t.span, "expected a positive integer");
        std::string_view s = t.text;
        while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
        if (s.size() > 9) throw SyntaxError(t.span, "iteration count too large");
        std::uint32_t k = static_cast<std::uint32_t>(std::stoul(std::string(s)));
        if (k < 1) throw SyntaxError(t.span, "iteration count must be at least 1");
        return k;
    }

    Formula parse_unary() {
        if (accept(Tok::Bang)) return neg(parse_unary());
        const Token& t = peek();
        if (t.kind == Tok::Number && is_integer(t.text)) {
            Tok after = peek(1).kind;
            if (after == Tok::Star) {
                std::uint32_t k = count_of(t);
                pos_ += 2;
                return iter_sum(k, parse_unary());
            }
            if (after == Tok::LParen || after == Tok::Ident) {
                std::uint32_t k = count_of(t);
                ++pos_;
                return iter_sum(k, parse_unary());
            }
        }
        return parse_postfix();
    }

    Formula parse_postfix() {
        Formula f = parse_primary();
        while (accept(Tok::Caret)) {
            const Token& k = expect(Tok::Number, "exponent");
            f = iter_prod(count_of(k), std::move(f));
        }
        return f;
    }

    Rational threshold_at(std::size_t& i, SourceSpan& span) const {
        const Token& num = peek(i);
        span = num.span;
        std::string text(num.text);
        if (peek(i + 1).kind == Tok::Slash && peek(i + 2).kind == Tok::Number) {
            text += "/";
            text += peek(i + 2).text;
            span.end = peek(i + 2).span.end;
            i += 2;
        }
        ++i;
        Rational c;
        try {
            c = parse_rational(text);
        } catch (const NumberFormatError&) {
            throw SyntaxError(span, "malformed threshold");
        }
        if (c < 0 || c > 1) throw SyntaxError(span, "threshold outside [0,1]");
        return c;
    }

    std::optional<Formula> try_crisp() {
        // lookahead past '(' without consuming
        std::size_t i = 1;
        if (peek(i).kind == Tok::Number) {
            std::size_t j = i;
            if (peek(j + 1).kind == Tok::Slash) j += 2;
            if (peek(j + 1).kind != Tok::Leq) return std::nullopt;
            SourceSpan span;
            Rational c = threshold_at(i, span);
            ++i;  // <=
            const Token& id = peek(i);
            if (id.kind != Tok::Ident) throw SyntaxError(id.span, "expected variable in comparison");
            if (peek(i + 1).kind != Tok::RParen) throw SyntaxError(peek(i + 1).span, "expected ')'");
            pos_ += i + 2;
            return crisp_geq(std::move(c), std::string(id.text));
        }
        if (peek(i).kind == Tok::Ident && peek(i + 1).kind == Tok::Leq) {
            const Token& id = peek(i);
            i += 2;
            if (peek(i).kind != Tok::Number) throw SyntaxError(peek(i).span, "expected threshold");
            SourceSpan span;
            Rational c = threshold_at(i, span);
            if (peek(i).kind != Tok::RParen) throw SyntaxError(peek(i).span, "expected ')'");
            pos_ += i + 1;
            return crisp_leq(std::move(c), std::string(id.text));
        }
        return std::nullopt;
    }

    Formula parse_primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Ident: ++pos_; return var(std::string(t.text));
            case Tok::Number:
                if (t.text == "0") { ++pos_; return falsum(); }
                if (t.text == "1") { ++pos_; return verum(); }
                throw SyntaxError(t.span, "numerals other than 0 and 1 need a comparison or an operand");
            case Tok::LParen: {
                if (auto c = try_crisp()) return *c;
                ++pos_;
                Formula f = parse_iff();
                expect(Tok::RParen, "')'");
                return f;
            }
            case Tok::End: throw SyntaxError(t.span, "unexpected end of query");
            default: throw SyntaxError(t.span, "expected a formula");
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// Binding strength of a node when printed; higher binds tighter.
inline int precedence(const Formula& f) {
    switch (f.kind()) {
        case Formula::Kind::Binary:
            switch (f.binary_op()) {
                case BinaryOp::Iff: return 1;
                case BinaryOp::Impl: return 2;
                case BinaryOp::Or: return 3;
                case BinaryOp::And: return 4;
                case BinaryOp::Oplus: return 5;
                case BinaryOp::Ominus: return 6;
                case BinaryOp::Odot: return 7;
            }
            return 0;
        case Formula::Kind::Neg: return 8;
        case Formula::Kind::Iterated: return f.iter_op() == IterOp::Sum ? 8 : 9;
        default: return 10;
    }
}

inline const char* spelling(BinaryOp op) {
    switch (op) {
        case BinaryOp::Iff: return " <-> ";
        case BinaryOp::Impl: return " -> ";
        case BinaryOp::Or: return " or ";
        case BinaryOp::And: return " and ";
        case BinaryOp::Oplus: return " + ";
        case BinaryOp::Ominus: return " - ";
        case BinaryOp::Odot: return " ox ";
    }
    return "?";
}

inline void format_into(const Formula& f, std::string& out);

inline void format_operand(const Formula& f, int min_prec, std::string& out) {
    bool paren = precedence(f) < min_prec;
    if (paren) out += '(';
    format_into(f, out);
    if (paren) out += ')';
}

inline void format_into(const Formula& f, std::string& out) {
    switch (f.kind()) {
        case Formula::Kind::Var: out += f.var_name(); return;
        case Formula::Kind::Falsum: out += '0'; return;
        case Formula::Kind::Verum: out += '1'; return;
        case Formula::Kind::Neg:
            out += '!';
            format_operand(f.child(), 8, out);
            return;
        case Formula::Kind::Iterated:
            if (f.iter_op() == IterOp::Sum) {
                out += std::to_string(f.count());
                out += '*';
                format_operand(f.child(), 8, out);
            } else {
                format_operand(f.child(), 9, out);
                out += '^';
                out += std::to_string(f.count());
            }
            return;
        case Formula::Kind::Binary: {
            int p = precedence(f);
            BinaryOp op = f.binary_op();
            // left-assoc: rhs must bind tighter; '->' is right-assoc; '<->' neither
            int lhs_min = op == BinaryOp::Impl || op == BinaryOp::Iff ? p + 1 : p;
            int rhs_min = op == BinaryOp::Impl ? p : p + 1;
            format_operand(f.lhs(), lhs_min, out);
            out += spelling(op);
            format_operand(f.rhs(), rhs_min, out);
            return;
        }
        case Formula::Kind::CrispCmp: {
            const auto& c = f.crisp();
            out += '(';
            if (c.direction == CmpDirection::Geq) {
                out += to_literal(c.threshold);
                out += "<=";
                out += c.var;
            } else {
                out += c.var;
                out += "<=";
                out += to_literal(c.threshold);
            }
            out += ')';
            return;
        }
    }
}

}  // namespace detail

/// Parses query text.  Throws SyntaxError carrying the offending span.
inline Formula parse(std::string_view text) { return detail::Parser(text).parse(); }

/// Canonical text; parse(format(f)) == f.
inline std::string format(const Formula& f) {
    std::string out;
    detail::format_into(f, out);
    return out;
}

}  // namespace lukq
