#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "periomorph/formula.hpp"

namespace periomorph {

/// Optional symbol declarations for the formula parser. A declared 0-ary
/// function is a constant, so a bare identifier in term position resolves to
/// an application instead of a variable.
struct SymbolTable {
    std::map<std::string, int> relations; // name -> arity
    std::map<std::string, int> functions; // name -> arity (0 = constant)
};

namespace detail {

enum class Tok { Ident, Forall, Exists, False, LParen, RParen, Comma, Dot,
                 Eq, And, Or, Not, Implies, End };

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

// '#' starts a line comment unless it sits directly between an identifier
// character and a digit, in which case it is the reserved fresh-name suffix
// ("y#1"). Hand-written input is not expected to use that suffix; the
// alpha normalizer owns it and renumbers any it encounters.
class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return tok_; }

    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        skip_ws_and_comments();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= text_.size()) {
            tok_.kind = Tok::End;
            tok_.text.clear();
            return;
        }
        char c = text_[pos_];
        if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string ident;
            while (pos_ < text_.size()) {
                char d = text_[pos_];
                if (isalnum(static_cast<unsigned char>(d)) || d == '_') {
                    ident += d;
                    bump();
                } else if (d == '#' && pos_ + 1 < text_.size() &&
                           isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
                    ident += d;
                    bump();
                    while (pos_ < text_.size() && isdigit(static_cast<unsigned char>(text_[pos_]))) {
                        ident += text_[pos_];
                        bump();
                    }
                    break;
                } else {
                    break;
                }
            }
            if (ident == "forall") tok_.kind = Tok::Forall;
            else if (ident == "exists") tok_.kind = Tok::Exists;
            else if (ident == "false") tok_.kind = Tok::False;
            else tok_.kind = Tok::Ident;
            tok_.text = ident;
            return;
        }
        switch (c) {
            case '(': tok_.kind = Tok::LParen; break;
            case ')': tok_.kind = Tok::RParen; break;
            case ',': tok_.kind = Tok::Comma; break;
            case '.': tok_.kind = Tok::Dot; break;
            case '=': tok_.kind = Tok::Eq; break;
            case '&': tok_.kind = Tok::And; break;
            case '|': tok_.kind = Tok::Or; break;
            case '!': tok_.kind = Tok::Not; break;
            case '-':
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
                    bump();
                    tok_.kind = Tok::Implies;
                    break;
                }
                throw ParseError("unexpected character '-'", line_, col_);
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
        }
        tok_.text = c;
        bump();
        if (tok_.kind == Tok::Implies) tok_.text = "->";
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n' || c == ' ' || c == '\t' || c == '\r') {
                bump();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_{Tok::End, "", 1, 1};
};

class FormulaParser {
public:
    FormulaParser(const std::string& text, const SymbolTable* symbols)
        : lex_(text), symbols_(symbols) {
        if (symbols) {
            for (const auto& [name, arity] : symbols->relations) rel_arity_[name] = arity;
            for (const auto& [name, arity] : symbols->functions) fun_arity_[name] = arity;
        }
    }

    Formula parse() {
        Formula f = parse_implies();
        expect(Tok::End, "end of input");
        return alpha_normalize(f);
    }

private:
    Formula parse_implies() {
        Formula l = parse_or();
        if (lex_.peek().kind == Tok::Implies) {
            lex_.next();
            return Formula::implies(std::move(l), parse_implies());
        }
        return l;
    }

    Formula parse_or() {
        Formula f = parse_and();
        while (lex_.peek().kind == Tok::Or) {
            lex_.next();
            f = Formula::disj(std::move(f), parse_and());
        }
        return f;
    }

    Formula parse_and() {
        Formula f = parse_unary();
        while (lex_.peek().kind == Tok::And) {
            lex_.next();
            f = Formula::conj(std::move(f), parse_unary());
        }
        return f;
    }

    Formula parse_unary() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::Not) {
            lex_.next();
            return Formula::negation(parse_unary());
        }
        if (t.kind == Tok::Forall || t.kind == Tok::Exists) {
            Token q = lex_.next();
            Token v = expect(Tok::Ident, "variable");
            expect(Tok::Dot, "'.'");
            Formula body = parse_implies(); // quantifier scope extends maximally
            return q.kind == Tok::Forall ? Formula::forall(v.text, std::move(body))
                                         : Formula::exists(v.text, std::move(body));
        }
        return parse_primary();
    }

    Formula parse_primary() {
        const Token& t = lex_.peek();
        if (t.kind == Tok::False) {
            lex_.next();
            return Formula::bottom();
        }
        if (t.kind == Tok::LParen) {
            lex_.next();
            Formula f = parse_implies();
            expect(Tok::RParen, "')'");
            return f;
        }
        if (t.kind != Tok::Ident)
            throw ParseError("expected a formula, got '" + t.text + "'", t.line, t.col);

        Token head = lex_.next();
        if (lex_.peek().kind == Tok::LParen) {
            // relation atom or function application followed by '='
            std::vector<Term> args = parse_args();
            if (lex_.peek().kind == Tok::Eq) {
                lex_.next();
                Term l = finish_app(head, std::move(args));
                Term r = parse_term();
                return Formula::eq(std::move(l), std::move(r));
            }
            record_arity(rel_arity_, head, static_cast<int>(args.size()), "relation");
            if (fun_arity_.count(head.text))
                throw ParseError("symbol '" + head.text + "' used both as function and relation",
                                 head.line, head.col);
            return Formula::atom(head.text, std::move(args));
        }
        // bare identifier: must be the left side of an equality
        Term l = resolve_ident(head);
        if (lex_.peek().kind != Tok::Eq)
            throw ParseError("expected '=' or '(' after '" + head.text + "'", head.line, head.col);
        lex_.next();
        Term r = parse_term();
        return Formula::eq(std::move(l), std::move(r));
    }

    std::vector<Term> parse_args() {
        expect(Tok::LParen, "'('");
        std::vector<Term> args;
        if (lex_.peek().kind == Tok::RParen) {
            lex_.next();
            return args;
        }
        args.push_back(parse_term());
        while (lex_.peek().kind == Tok::Comma) {
            lex_.next();
            args.push_back(parse_term());
        }
        expect(Tok::RParen, "')'");
        return args;
    }

    Term parse_term() {
        Token head = expect(Tok::Ident, "term");
        if (lex_.peek().kind == Tok::LParen) {
            std::vector<Term> args = parse_args();
            return finish_app(head, std::move(args));
        }
        return resolve_ident(head);
    }

    Term finish_app(const Token& head, std::vector<Term> args) {
        record_arity(fun_arity_, head, static_cast<int>(args.size()), "function");
        if (rel_arity_.count(head.text) && !symbol_is_both_ok(head.text))
            throw ParseError("symbol '" + head.text + "' used both as relation and function",
                             head.line, head.col);
        return Term::app(head.text, std::move(args));
    }

    Term resolve_ident(const Token& tok) {
        auto it = fun_arity_.find(tok.text);
        if (it != fun_arity_.end() && it->second == 0) return Term::constant(tok.text);
        return Term::var(tok.text);
    }

    bool symbol_is_both_ok(const std::string& name) const {
        // only via an explicit (unusual) symbol table listing both
        return symbols_ && symbols_->relations.count(name) && symbols_->functions.count(name);
    }

    void record_arity(std::map<std::string, int>& table, const Token& tok, int arity,
                      const char* what) {
        auto [it, inserted] = table.emplace(tok.text, arity);
        if (!inserted && it->second != arity)
            throw ParseError(std::string(what) + " '" + tok.text + "' used with arity " +
                                 std::to_string(arity) + " but previously " +
                                 std::to_string(it->second),
                             tok.line, tok.col);
    }

    Token expect(Tok kind, const char* what) {
        const Token& t = lex_.peek();
        if (t.kind != kind)
            throw ParseError(std::string("expected ") + what + ", got '" +
                                 (t.kind == Tok::End ? "<end>" : t.text) + "'",
                             t.line, t.col);
        return lex_.next();
    }

    Lexer lex_;
    const SymbolTable* symbols_;
    std::map<std::string, int> rel_arity_;
    std::map<std::string, int> fun_arity_;
};

} // namespace detail

/// Parses the concrete formula syntax: atoms `R(x, y)`, `x = y`, `false`;
/// connectives `&`, `|`, `!`, `->`; quantifiers `forall x.`, `exists x.`;
/// parentheses; `#` line comments. The result is alpha-normalized.
inline Formula parse_formula(const std::string& text) {
    return detail::FormulaParser(text, nullptr).parse();
}

inline Formula parse_formula(const std::string& text, const SymbolTable& symbols) {
    return detail::FormulaParser(text, &symbols).parse();
}

} // namespace periomorph
