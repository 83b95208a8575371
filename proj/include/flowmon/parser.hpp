#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "flowmon/ast.hpp"
#include "flowmon/diagnostic.hpp"
#include "flowmon/program.hpp"

namespace flowmon {

enum class Tok {
    Ident,
    Number,
    KwInt,
    KwIf,
    KwElse,
    KwWhile,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Assign,
    OrAssign,
    PlusAssign,
    PlusPlus,
    Plus,
    Minus,
    Star,
    Amp,
    Pipe,
    EqEq,
    Less,
    AnnotPublic,  // /*@ public */
    AnnotPrivate, // /*@ private */
    SpecLine,     // //@ (the rest of the line is lexed as tokens)
    End,
};

struct Token {
    Tok kind;
    std::string text;
    std::int64_t number = 0;
    SourcePos pos;
};

inline std::string describe(Tok t) {
    switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "integer";
    case Tok::KwInt: return "'int'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwWhile: return "'while'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Assign: return "'='";
    case Tok::OrAssign: return "'|='";
    case Tok::PlusAssign: return "'+='";
    case Tok::PlusPlus: return "'++'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Amp: return "'&'";
    case Tok::Pipe: return "'|'";
    case Tok::EqEq: return "'=='";
    case Tok::Less: return "'<'";
    case Tok::AnnotPublic: return "'/*@ public */'";
    case Tok::AnnotPrivate: return "'/*@ private */'";
    case Tok::SpecLine: return "'//@'";
    case Tok::End: return "end of input";
    }
    return "token";
}

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    int col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto starts = [&](std::string_view s) { return src.substr(i, s.size()) == s; };

    while (i < src.size()) {
        const char c = src[i];
        const SourcePos pos{line, col};
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (starts("//@")) {
            out.push_back({Tok::SpecLine, "//@", 0, pos});
            advance(3);
            continue;
        }
        if (starts("//")) {
            while (i < src.size() && src[i] != '\n') {
                advance(1);
            }
            continue;
        }
        if (starts("/*@")) {
            const auto close = src.find("*/", i + 3);
            if (close == std::string_view::npos) {
                throw SyntaxError(pos, "unterminated annotation");
            }
            std::string body(src.substr(i + 3, close - (i + 3)));
            const auto first = body.find_first_not_of(" \t\r\n");
            const auto last = body.find_last_not_of(" \t\r\n");
            body = first == std::string::npos ? "" : body.substr(first, last - first + 1);
            if (body == "public") {
                out.push_back({Tok::AnnotPublic, body, 0, pos});
            } else if (body == "private") {
                out.push_back({Tok::AnnotPrivate, body, 0, pos});
            } else {
                throw SyntaxError(pos, "unknown annotation '" + body + "' (expected public or private)");
            }
            advance(close + 2 - i);
            continue;
        }
        if (starts("/*")) {
            const auto close = src.find("*/", i + 2);
            if (close == std::string_view::npos) {
                throw SyntaxError(pos, "unterminated comment");
            }
            advance(close + 2 - i);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            std::string word(src.substr(i, j - i));
            Tok kind = Tok::Ident;
            if (word == "int") {
                kind = Tok::KwInt;
            } else if (word == "if") {
                kind = Tok::KwIf;
            } else if (word == "else") {
                kind = Tok::KwElse;
            } else if (word == "while") {
                kind = Tok::KwWhile;
            }
            out.push_back({kind, word, 0, pos});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                ++j;
            }
            std::int64_t v = 0;
            const auto [ptr, ec] = std::from_chars(src.data() + i, src.data() + j, v);
            if (ec != std::errc{}) {
                throw SyntaxError(pos, "integer literal out of range");
            }
            out.push_back({Tok::Number, std::string(src.substr(i, j - i)), v, pos});
            advance(j - i);
            continue;
        }
        struct Punct {
            std::string_view text;
            Tok kind;
        };
        static constexpr Punct puncts[] = {
            {"|=", Tok::OrAssign}, {"+=", Tok::PlusAssign}, {"++", Tok::PlusPlus}, {"==", Tok::EqEq},
            {"(", Tok::LParen},    {")", Tok::RParen},      {"{", Tok::LBrace},     {"}", Tok::RBrace},
            {"[", Tok::LBracket},  {"]", Tok::RBracket},    {";", Tok::Semi},       {",", Tok::Comma},
            {"=", Tok::Assign},    {"+", Tok::Plus},        {"-", Tok::Minus},      {"*", Tok::Star},
            {"&", Tok::Amp},       {"|", Tok::Pipe},        {"<", Tok::Less},
        };
        bool matched = false;
        for (const auto& p : puncts) {
            if (starts(p.text)) {
                out.push_back({p.kind, std::string(p.text), 0, pos});
                advance(p.text.size());
                matched = true;
                break;
            }
        }
        if (!matched) {
            throw SyntaxError(pos, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", 0, SourcePos{line, col}});
    return out;
}

namespace detail {

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    SourceProgram program() {
        SourceProgram p;
        std::set<std::string, std::less<>> seen;
        std::vector<InstrPtr> stmts;
        while (peek().kind == Tok::KwInt) {
            auto d = declaration();
            if (!seen.insert(d.name).second) {
                throw SyntaxError(d.pos, "duplicate declaration of '" + d.name + "'");
            }
            p.decls.push_back(std::move(d));
        }
        while (peek().kind != Tok::End) {
            if (peek().kind == Tok::KwInt) {
                throw SyntaxError(peek().pos, "declarations must precede statements");
            }
            stmts.push_back(statement());
        }
        p.body = make_seq(stmts);
        return p;
    }

    ExprPtr standalone_expression() {
        auto e = expr();
        expect(Tok::End);
        return e;
    }

  private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

    Token next() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) {
            ++pos_;
        }
        return t;
    }

    bool accept(Tok k) {
        if (peek().kind == k) {
            next();
            return true;
        }
        return false;
    }

    Token expect(Tok k, std::string_view context = {}) {
        if (peek().kind != k) {
            std::string msg = "expected " + describe(k);
            if (!context.empty()) {
                msg += " " + std::string(context);
            }
            msg += ", found " + (peek().kind == Tok::End ? describe(Tok::End) : "'" + peek().text + "'");
            throw SyntaxError(peek().pos, msg);
        }
        return next();
    }

    [[noreturn]] void unexpected(std::string_view expected) const {
        throw SyntaxError(peek().pos, "expected " + std::string(expected) + ", found " +
                                          (peek().kind == Tok::End ? describe(Tok::End) : "'" + peek().text + "'"));
    }

    void annotation(Declaration& d) {
        while (peek().kind == Tok::AnnotPublic || peek().kind == Tok::AnnotPrivate) {
            const Token t = next();
            if (d.annotation) {
                throw SyntaxError(t.pos, "duplicate security annotation on '" + d.name + "'");
            }
            d.annotation = t.kind == Tok::AnnotPrivate ? Label::private_level() : Label::public_level();
        }
    }

    Declaration declaration() {
        Declaration d;
        d.pos = expect(Tok::KwInt).pos;
        int stars = 0;
        while (accept(Tok::Star)) {
            ++stars;
        }
        d.name = expect(Tok::Ident, "in declaration").text;
        ObjType t = ObjType::int_type();
        for (int k = 0; k < stars; ++k) {
            t = ObjType::ptr_to(t);
        }
        if (accept(Tok::LBracket)) {
            const Token len = expect(Tok::Number, "as array length");
            if (len.number <= 0) {
                throw SyntaxError(len.pos, "array length must be positive");
            }
            expect(Tok::RBracket);
            if (peek().kind == Tok::LBracket) {
                throw SyntaxError(peek().pos, "multi-dimensional arrays are not supported");
            }
            t = ObjType::array_of(t, len.number);
        }
        d.type = t;
        annotation(d);
        if (accept(Tok::Assign)) {
            if (accept(Tok::LBrace)) {
                d.braced = true;
                d.init.push_back(expr());
                while (accept(Tok::Comma)) {
                    d.init.push_back(expr());
                }
                expect(Tok::RBrace, "to close initializer list");
            } else {
                d.init.push_back(expr());
            }
        }
        annotation(d);
        expect(Tok::Semi, "after declaration");
        annotation(d);
        return d;
    }

    InstrPtr statement() {
        const SourcePos pos = peek().pos;
        switch (peek().kind) {
        case Tok::Semi: next(); return skip(pos);
        case Tok::LBrace: {
            next();
            std::vector<InstrPtr> items;
            while (peek().kind != Tok::RBrace) {
                if (peek().kind == Tok::End) {
                    unexpected("'}'");
                }
                items.push_back(statement());
            }
            next();
            return make_seq(items);
        }
        case Tok::KwIf: {
            next();
            expect(Tok::LParen, "after 'if'");
            auto c = expr();
            expect(Tok::RParen, "after condition");
            auto t = statement();
            InstrPtr e = skip();
            if (accept(Tok::KwElse)) {
                e = statement();
            }
            return if_then_else(std::move(c), std::move(t), std::move(e), pos);
        }
        case Tok::KwWhile: {
            next();
            expect(Tok::LParen, "after 'while'");
            auto c = expr();
            expect(Tok::RParen, "after condition");
            return while_loop(std::move(c), statement(), pos);
        }
        case Tok::SpecLine: next(); return assertion(pos);
        default: break;
        }

        const auto target_expr = unary();
        const auto* rd = std::get_if<Expr::Read>(&target_expr->node);
        if (rd == nullptr) {
            throw SyntaxError(pos, "left-hand side of assignment is not an lvalue");
        }
        const Lval target = rd->lval;
        InstrPtr result;
        if (accept(Tok::Assign)) {
            result = assign(target, expr(), pos);
        } else if (accept(Tok::OrAssign)) {
            result = assign(target, binop(BinOpKind::BitOr, read(target, pos), expr(), pos), pos);
        } else if (accept(Tok::PlusAssign)) {
            result = assign(target, binop(BinOpKind::Add, read(target, pos), expr(), pos), pos);
        } else if (accept(Tok::PlusPlus)) {
            result = assign(target, binop(BinOpKind::Add, read(target, pos), constant(1, pos), pos), pos);
        } else {
            unexpected("'=', '|=', '+=' or '++'");
        }
        expect(Tok::Semi, "after assignment");
        return result;
    }

    Label level() {
        const Token t = next();
        if (t.kind == Tok::Ident && t.text == "public") {
            return Label::public_level();
        }
        if (t.kind == Tok::Ident && t.text == "private") {
            return Label::private_level();
        }
        if (t.kind == Tok::Number) {
            return Label{static_cast<std::uint64_t>(t.number)};
        }
        throw SyntaxError(t.pos, "expected 'public', 'private' or a label value");
    }

    // //@ assert security_status(x) == public;
    // //@ assert (x_status) == public;
    InstrPtr assertion(SourcePos pos) {
        const Token kw = expect(Tok::Ident, "after '//@'");
        if (kw.text != "assert") {
            throw SyntaxError(kw.pos, "unknown annotation '" + kw.text + "'");
        }
        InstrPtr result;
        if (peek().kind == Tok::Ident && peek().text == "security_status") {
            next();
            expect(Tok::LParen);
            const std::string v = expect(Tok::Ident, "in security_status").text;
            expect(Tok::RParen);
            expect(Tok::EqEq, "in assertion");
            result = assert_status(v, level(), pos);
        } else if (accept(Tok::LParen)) {
            auto e = expr();
            expect(Tok::RParen);
            expect(Tok::EqEq, "in assertion");
            result = assert_label(std::move(e), level(), pos);
        } else {
            unexpected("'security_status' or '('");
        }
        expect(Tok::Semi, "after assertion");
        return result;
    }

    // Precedence, loosest first: | & == < (+ -) * unary
    ExprPtr expr() { return bit_or(); }

    ExprPtr bit_or() {
        auto lhs = bit_and();
        while (peek().kind == Tok::Pipe) {
            const auto pos = next().pos;
            lhs = binop(BinOpKind::BitOr, lhs, bit_and(), pos);
        }
        return lhs;
    }

    ExprPtr bit_and() {
        auto lhs = equality();
        while (peek().kind == Tok::Amp) {
            const auto pos = next().pos;
            lhs = binop(BinOpKind::BitAnd, lhs, equality(), pos);
        }
        return lhs;
    }

    ExprPtr equality() {
        auto lhs = relational();
        while (peek().kind == Tok::EqEq) {
            const auto pos = next().pos;
            lhs = binop(BinOpKind::Eq, lhs, relational(), pos);
        }
        return lhs;
    }

    ExprPtr relational() {
        auto lhs = additive();
        while (peek().kind == Tok::Less) {
            const auto pos = next().pos;
            lhs = binop(BinOpKind::Lt, lhs, additive(), pos);
        }
        return lhs;
    }

    ExprPtr additive() {
        auto lhs = multiplicative();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const Token op = next();
            lhs = binop(op.kind == Tok::Plus ? BinOpKind::Add : BinOpKind::Sub, lhs, multiplicative(), op.pos);
        }
        return lhs;
    }

    ExprPtr multiplicative() {
        auto lhs = unary();
        while (peek().kind == Tok::Star) {
            const auto pos = next().pos;
            lhs = binop(BinOpKind::Mul, lhs, unary(), pos);
        }
        return lhs;
    }

    ExprPtr unary() {
        const SourcePos pos = peek().pos;
        if (accept(Tok::Star)) {
            return read(deref(unary(), pos), pos);
        }
        if (accept(Tok::Amp)) {
            auto operand = unary();
            const auto* rd = std::get_if<Expr::Read>(&operand->node);
            if (rd == nullptr) {
                throw SyntaxError(pos, "operand of '&' is not an lvalue");
            }
            return addr_of(rd->lval, pos);
        }
        if (accept(Tok::Minus)) {
            if (peek().kind == Tok::Number) {
                return constant(-next().number, pos);
            }
            return binop(BinOpKind::Sub, constant(0, pos), unary(), pos);
        }
        return primary();
    }

    ExprPtr primary() {
        const Token t = peek();
        switch (t.kind) {
        case Tok::Number: next(); return constant(t.number, t.pos);
        case Tok::Ident: {
            next();
            if (accept(Tok::LBracket)) {
                auto idx = expr();
                expect(Tok::RBracket, "after index");
                return read(elem(t.text, std::move(idx), t.pos), t.pos);
            }
            return read(var(t.text, t.pos), t.pos);
        }
        case Tok::LParen: {
            next();
            auto e = expr();
            expect(Tok::RParen);
            return e;
        }
        default: unexpected("expression");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses mini-C source text. Throws SyntaxError with the offending position.
inline SourceProgram parse(std::string_view source) {
    return detail::Parser(tokenize(source)).program();
}

/// Parses a single expression, e.g. one recorded in a witness file.
inline ExprPtr parse_expression(std::string_view source) {
    return detail::Parser(tokenize(source)).standalone_expression();
}

} // namespace flowmon
