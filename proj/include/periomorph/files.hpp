#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "periomorph/classify.hpp"
#include "periomorph/eqrel.hpp"
#include "periomorph/finstruct.hpp"
#include "periomorph/parser.hpp"

namespace periomorph {

namespace detail {

// '#' line comments, with the same identifier-suffix carve-out as the
// formula lexer.
inline std::string strip_file_comments(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == '#') {
            bool suffix = i > 0 &&
                          (isalnum(static_cast<unsigned char>(text[i - 1])) || text[i - 1] == '_') &&
                          i + 1 < text.size() && isdigit(static_cast<unsigned char>(text[i + 1]));
            if (!suffix) {
                while (i < text.size() && text[i] != '\n') ++i;
                if (i < text.size()) out += '\n';
                continue;
            }
        }
        out += c;
    }
    return out;
}

struct FileScanner {
    std::string text;
    size_t pos = 0;

    explicit FileScanner(const std::string& raw) : text(strip_file_comments(raw)) {}

    void skip_ws() {
        while (pos < text.size() && isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    std::string word() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                text[pos] == '#'))
            ++pos;
        if (start == pos) throw Error("expected a name near: " + context());
        return text.substr(start, pos - start);
    }

    int number() {
        skip_ws();
        size_t start = pos;
        if (pos < text.size() && text[pos] == '-') ++pos;
        while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (start == pos) throw Error("expected a number near: " + context());
        return std::stoi(text.substr(start, pos - start));
    }

    bool try_consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void consume(char c) {
        if (!try_consume(c))
            throw Error(std::string("expected '") + c + "' near: " + context());
    }

    bool try_consume(const std::string& s) {
        skip_ws();
        if (text.compare(pos, s.size(), s) == 0) {
            pos += s.size();
            return true;
        }
        return false;
    }

    /// Text up to the next top-level ';'.
    std::string until_semicolon() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() && text[pos] != ';') ++pos;
        if (pos >= text.size()) throw Error("missing ';' near: " + context());
        std::string out = text.substr(start, pos - start);
        ++pos; // consume ';'
        return out;
    }

    std::string context() const {
        return text.substr(pos, std::min<size_t>(30, text.size() - pos));
    }
};

inline std::vector<std::string> canonical_vars(int arity) {
    std::vector<std::string> out;
    for (int i = 0; i < arity; ++i) out.push_back("x" + std::to_string(i));
    return out;
}

} // namespace detail

/// `template NAME { rel R/3 := <formula over x0..x2>; ... }` — relation
/// bodies are pure equality formulas (full connectives), compiled to pattern
/// sets at load time.
inline EqTemplate parse_template(const std::string& text) {
    detail::FileScanner in(text);
    if (in.word() != "template") throw Error("template file must start with 'template'");
    EqTemplate t;
    t.name = in.word();
    in.consume('{');
    while (!in.try_consume('}')) {
        std::string kw = in.word();
        if (kw != "rel") throw Error("template file: expected 'rel', got '" + kw + "'");
        std::string name = in.word();
        in.consume('/');
        int arity = in.number();
        if (arity < 1 || arity > kMaxPartitionSize)
            throw Error("relation '" + name + "': arity outside 1.." +
                        std::to_string(kMaxPartitionSize));
        if (!in.try_consume(":=")) throw Error("relation '" + name + "': expected ':='");
        std::string body = in.until_semicolon();
        Formula f = parse_formula(body);
        if (t.relations.count(name)) throw Error("duplicate relation '" + name + "'");
        t.relations[name] = compile(f, detail::canonical_vars(arity));
    }
    if (!in.eof()) throw Error("template file: trailing input");
    return t;
}

/// `structure NAME { universe 3; rel R = {(0,1),(1,2)}; fun f = [1,2,0];
/// con c = 0; }` — function arity is taken from `f/k` when given, otherwise
/// inferred from the table length.
inline FiniteStructure parse_structure(const std::string& text) {
    detail::FileScanner in(text);
    if (in.word() != "structure") throw Error("structure file must start with 'structure'");
    FiniteStructure s;
    s.name = in.word();
    in.consume('{');
    if (in.word() != "universe") throw Error("structure file: expected 'universe'");
    s.size = in.number();
    in.consume(';');
    while (!in.try_consume('}')) {
        std::string kw = in.word();
        if (kw == "rel") {
            std::string name = in.word();
            int arity = -1;
            if (in.try_consume('/')) arity = in.number();
            in.consume('=');
            in.consume('{');
            FiniteStructure::Relation rel;
            while (!in.try_consume('}')) {
                in.consume('(');
                std::vector<int> tup;
                if (!in.try_consume(')')) {
                    tup.push_back(in.number());
                    while (in.try_consume(',')) tup.push_back(in.number());
                    in.consume(')');
                }
                if (arity < 0) arity = static_cast<int>(tup.size());
                if (static_cast<int>(tup.size()) != arity)
                    throw Error("relation '" + name + "': mixed tuple arities");
                rel.tuples.insert(std::move(tup));
                in.try_consume(',');
            }
            if (arity < 0) throw Error("relation '" + name + "': empty set needs explicit /arity");
            rel.arity = arity;
            in.consume(';');
            if (s.relations.count(name)) throw Error("duplicate relation '" + name + "'");
            s.relations[name] = std::move(rel);
        } else if (kw == "fun") {
            std::string name = in.word();
            int arity = -1;
            if (in.try_consume('/')) arity = in.number();
            in.consume('=');
            in.consume('[');
            FiniteStructure::Function fn;
            if (!in.try_consume(']')) {
                fn.table.push_back(in.number());
                while (in.try_consume(',')) fn.table.push_back(in.number());
                in.consume(']');
            }
            in.consume(';');
            if (arity < 0) {
                long long want = 1;
                arity = 0;
                while (want < static_cast<long long>(fn.table.size()) && arity <= 20) {
                    want *= s.size;
                    ++arity;
                }
                if (arity == 0) arity = 1; // size-1 universe: [v] is the unary table
                if (want != static_cast<long long>(fn.table.size()) && s.size > 1)
                    throw Error("function '" + name + "': table length is not a power of " +
                                std::to_string(s.size));
            }
            fn.arity = arity;
            if (s.functions.count(name)) throw Error("duplicate function '" + name + "'");
            s.functions[name] = std::move(fn);
        } else if (kw == "con") {
            std::string name = in.word();
            in.consume('=');
            int v = in.number();
            in.consume(';');
            if (s.constants.count(name)) throw Error("duplicate constant '" + name + "'");
            s.constants[name] = v;
        } else {
            throw Error("structure file: expected rel/fun/con, got '" + kw + "'");
        }
    }
    if (!in.eof()) throw Error("structure file: trailing input");
    s.validate();
    return s;
}

/// `reduce-defs { rel Q/2 := <pH formula over x0,x1>; fun g/1 := <pH formula
/// over x0,x1>; con c := <pH formula over x0>; }` — a function definition of
/// arity m uses xm for the value slot.
inline ReductionDefs parse_reduction_defs(const std::string& text) {
    detail::FileScanner in(text);
    std::string head = in.word();
    if (head != "reduce" || !in.try_consume("-defs"))
        throw Error("defs file must start with 'reduce-defs'");
    ReductionDefs defs;
    in.consume('{');
    while (!in.try_consume('}')) {
        std::string kw = in.word();
        std::string name = in.word();
        int arity = 0;
        if (kw == "rel" || kw == "fun") {
            in.consume('/');
            arity = in.number();
        }
        if (!in.try_consume(":=")) throw Error("definition of '" + name + "': expected ':='");
        Formula psi = parse_formula(in.until_semicolon());
        ReductionDefs::Def def{arity, psi};
        if (kw == "rel") defs.relations[name] = def;
        else if (kw == "fun") defs.functions[name] = def;
        else if (kw == "con") defs.constants[name] = def;
        else throw Error("defs file: expected rel/fun/con, got '" + kw + "'");
    }
    if (!in.eof()) throw Error("defs file: trailing input");
    defs.validate();
    return defs;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace periomorph
