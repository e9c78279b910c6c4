#ifndef MAGSYM_PARSER_HPP
#define MAGSYM_PARSER_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "magsym/expr.hpp"
#include "magsym/normal.hpp"

namespace magsym {

struct SourceSpan {
    int line = 1;
    int col = 1;
    int length = 0;
};

struct SyntaxError : Error {
    SourceSpan span;
    SyntaxError(SourceSpan s, const std::string& what)
        : Error("syntax error at line " + std::to_string(s.line) + ", col " +
                std::to_string(s.col) + ": " + what),
          span(s) {}
};

struct UnknownIdentifier : Error {
    SourceSpan span;
    std::vector<std::string> suggestions;
    UnknownIdentifier(SourceSpan s, const std::string& name,
                      std::vector<std::string> sugg)
        : Error(build(s, name, sugg)), span(s), suggestions(std::move(sugg)) {}

  private:
    static std::string build(SourceSpan s, const std::string& name,
                             const std::vector<std::string>& sugg) {
        std::string m = "unknown identifier '" + name + "' at line " +
                        std::to_string(s.line) + ", col " +
                        std::to_string(s.col);
        if (!sugg.empty()) {
            m += "; did you mean ";
            for (size_t i = 0; i < sugg.size(); ++i)
                m += (i ? ", " : "") + ("'" + sugg[i] + "'");
            m += "?";
        }
        return m;
    }
};

/// Identifier environment for expression parsing.
struct ParseContext {
    std::map<std::string, VarId> idents;
    std::map<std::string, int> funcs; // declared uninterpreted functions
    bool allow_momenta = false;
    std::array<ExprPtr, 3> vector_potential{}; // expands pA1 pA2 pA3

    static ParseContext basic() {
        ParseContext c;
        auto& vt = vars();
        for (VarId v : {vt.x1, vt.x2, vt.x3, vt.r, vt.u, vt.Z, vt.hbar})
            c.idents[vt.name(v)] = v;
        return c;
    }

    ParseContext& param(const std::string& name, Reality re) {
        VarId v = vars().parameter(name, re);
        idents[name] = v;
        if (re == Reality::Complex) {
            VarId b = vars().conj_parameter(v);
            idents[vars().name(b)] = b;
        }
        return *this;
    }

    ParseContext& func(const std::string& name,
                       const std::vector<VarId>& args,
                       Reality re = Reality::Real) {
        funcs[name] = vars().declare_func(name, args, re);
        return *this;
    }
};

namespace detail {

inline int edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::vector<int>> d(a.size() + 1,
                                    std::vector<int>(b.size() + 1));
    for (size_t i = 0; i <= a.size(); ++i) d[i][0] = static_cast<int>(i);
    for (size_t j = 0; j <= b.size(); ++j) d[0][j] = static_cast<int>(j);
    for (size_t i = 1; i <= a.size(); ++i)
        for (size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                                d[i - 1][j - 1] +
                                    (a[i - 1] == b[j - 1] ? 0 : 1)});
    return d[a.size()][b.size()];
}

struct Token {
    enum Kind { Num, Ident, Op, End } kind = End;
    std::string text;
    SourceSpan span;
};

class Lexer {
  public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                src_[pos_] == '\r')) {
            bump(src_[pos_]);
        }
        tok_ = Token{};
        tok_.span = {line_, col_, 1};
        if (pos_ >= src_.size()) {
            tok_.kind = Token::End;
            return;
        }
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            tok_.kind = Token::Num;
            while (pos_ < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                tok_.text += src_[pos_];
                bump(src_[pos_]);
            }
            tok_.span.length = static_cast<int>(tok_.text.size());
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            tok_.kind = Token::Ident;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_')) {
                tok_.text += src_[pos_];
                bump(src_[pos_]);
            }
            // prime marks on function names: mu''(Z)
            while (pos_ < src_.size() && src_[pos_] == '\'') {
                tok_.text += '\'';
                bump(src_[pos_]);
            }
            tok_.span.length = static_cast<int>(tok_.text.size());
            return;
        }
        if (std::string("+-*/^(),").find(c) != std::string::npos) {
            tok_.kind = Token::Op;
            tok_.text = std::string(1, c);
            bump(c);
            return;
        }
        throw SyntaxError(tok_.span, std::string("unexpected character '") +
                                         c + "'");
    }

    void bump(char c) {
        ++pos_;
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

class ExprParser {
  public:
    ExprParser(const std::string& src, const ParseContext& ctx)
        : lex_(src), ctx_(ctx) {}

    ExprPtr parse() {
        ExprPtr e = sum();
        if (lex_.peek().kind != Token::End)
            throw SyntaxError(lex_.peek().span,
                              "unexpected '" + lex_.peek().text + "'");
        return e;
    }

  private:
    ExprPtr sum() {
        ExprPtr e = product();
        while (is_op("+") || is_op("-")) {
            bool plus = is_op("+");
            lex_.next();
            ExprPtr rhs = product();
            e = plus ? ex_add(e, rhs) : ex_sub(e, rhs);
        }
        return e;
    }

    ExprPtr product() {
        ExprPtr e = unary();
        while (is_op("*") || is_op("/")) {
            bool mul = is_op("*");
            Token t = lex_.next();
            ExprPtr rhs = unary();
            if (mul) {
                e = ex_mul(e, rhs);
            } else {
                if (is_zero(rhs))
                    throw SyntaxError(t.span, "division by zero");
                e = ex_div(e, rhs);
            }
        }
        return e;
    }

    ExprPtr unary() {
        if (is_op("-")) {
            lex_.next();
            return ex_neg(unary());
        }
        return power();
    }

    ExprPtr power() {
        ExprPtr base = atom();
        if (is_op("^")) {
            lex_.next();
            return ex_pow(base, exponent());
        }
        return base;
    }

    int exponent() {
        bool neg = false;
        bool paren = false;
        if (is_op("(")) {
            paren = true;
            lex_.next();
        }
        if (is_op("-")) {
            neg = true;
            lex_.next();
        }
        Token t = lex_.peek();
        if (t.kind != Token::Num)
            throw SyntaxError(t.span, "integer exponent expected");
        lex_.next();
        long v = std::stol(t.text);
        if (paren) {
            if (!is_op(")"))
                throw SyntaxError(lex_.peek().span, "')' expected");
            lex_.next();
        }
        return static_cast<int>(neg ? -v : v);
    }

    ExprPtr atom() {
        Token t = lex_.peek();
        if (t.kind == Token::Num) {
            lex_.next();
            return ex_scalar(CRat(Rat(t.text)));
        }
        if (is_op("(")) {
            lex_.next();
            ExprPtr e = sum();
            if (!is_op(")"))
                throw SyntaxError(lex_.peek().span, "')' expected");
            lex_.next();
            return e;
        }
        if (t.kind == Token::Ident) {
            lex_.next();
            return ident(t);
        }
        throw SyntaxError(t.span, t.kind == Token::End
                                      ? "unexpected end of input"
                                      : "unexpected '" + t.text + "'");
    }

    ExprPtr ident(const Token& t) {
        auto& vt = vars();
        std::string name = t.text;
        int primes = 0;
        while (!name.empty() && name.back() == '\'') {
            name.pop_back();
            ++primes;
        }
        if (primes == 0) {
            if (name == "I") return ex_i();
            if (name == "exp" || name == "ln" || name == "sin" ||
                name == "cos") {
                FuncKind fk = name == "exp"   ? FuncKind::Exp
                              : name == "ln"  ? FuncKind::Ln
                              : name == "sin" ? FuncKind::Sin
                                              : FuncKind::Cos;
                return ex_func(fk, call_single_arg(t));
            }
            if (ctx_.allow_momenta) {
                if (name == "p1") return ex_sym(vt.p1);
                if (name == "p2") return ex_sym(vt.p2);
                if (name == "p3" || name == "pZ") return ex_sym(vt.p3);
                if (name == "pphi") // p_phi = L3 = x1 p2 - x2 p1
                    return ex_sub(ex_mul(ex_sym(vt.x1), ex_sym(vt.p2)),
                                  ex_mul(ex_sym(vt.x2), ex_sym(vt.p1)));
                if (name == "pr")
                    throw NotConvertible(
                        "pr is not rational in Cartesian coordinates; "
                        "express the operator via p1, p2, pphi");
                if (name == "pA1" || name == "pA2" || name == "pA3") {
                    int j = name[2] - '1';
                    VarId pj = j == 0 ? vt.p1 : j == 1 ? vt.p2 : vt.p3;
                    if (!ctx_.vector_potential[j])
                        throw SyntaxError(t.span,
                                          "no vector potential in scope for " +
                                              name);
                    return ex_add(ex_sym(pj), ctx_.vector_potential[j]);
                }
            }
        }
        auto fit = ctx_.funcs.find(name);
        if (fit != ctx_.funcs.end()) {
            consume_declared_args(t, fit->second);
            const FuncInfo& f = vt.func(fit->second);
            std::vector<int> d(f.arg_coords.size(), 0);
            if (primes) {
                if (d.size() != 1)
                    throw SyntaxError(t.span,
                                      "prime notation needs a one-argument "
                                      "function");
                d[0] = primes;
            }
            return ex_ufunc(fit->second, d);
        }
        if (primes)
            throw SyntaxError(t.span, "prime marks on a non-function");
        auto iit = ctx_.idents.find(name);
        if (iit != ctx_.idents.end()) return ex_sym(iit->second);
        // unknown: suggest near matches
        std::vector<std::string> sugg;
        auto consider = [&](const std::string& cand) {
            if (edit_distance(name, cand) <= 2) sugg.push_back(cand);
        };
        for (const auto& [n, v] : ctx_.idents) consider(n);
        for (const auto& [n, v] : ctx_.funcs) consider(n);
        consider("I");
        consider("hbar");
        throw UnknownIdentifier(t.span, name, std::move(sugg));
    }

    ExprPtr call_single_arg(const Token& t) {
        if (!is_op("("))
            throw SyntaxError(lex_.peek().span,
                              "'(' expected after '" + t.text + "'");
        lex_.next();
        ExprPtr a = sum();
        if (!is_op(")"))
            throw SyntaxError(lex_.peek().span, "')' expected");
        lex_.next();
        return a;
    }

    void consume_declared_args(const Token&, int func_id) {
        const FuncInfo& f = vars().func(func_id);
        if (!is_op("("))
            throw SyntaxError(lex_.peek().span,
                              "'(' expected after function name");
        lex_.next();
        for (size_t i = 0; i < f.arg_coords.size(); ++i) {
            if (i) {
                if (!is_op(","))
                    throw SyntaxError(lex_.peek().span, "',' expected");
                lex_.next();
            }
            Token a = lex_.peek();
            if (a.kind != Token::Ident ||
                a.text != vars().name(f.arg_coords[i]))
                throw SyntaxError(
                    a.span, "argument " + std::to_string(i + 1) + " of '" +
                                f.name + "' must be '" +
                                vars().name(f.arg_coords[i]) + "'");
            lex_.next();
        }
        if (!is_op(")"))
            throw SyntaxError(lex_.peek().span, "')' expected");
        lex_.next();
    }

    bool is_op(const char* o) const {
        return lex_.peek().kind == Token::Op && lex_.peek().text == o;
    }

    Lexer lex_;
    const ParseContext& ctx_;
};

} // namespace detail

inline ExprPtr parse_expr(const std::string& text, const ParseContext& ctx) {
    detail::ExprParser p(text, ctx);
    return p.parse();
}

inline ExprPtr parse_expr(const std::string& text) {
    static const ParseContext ctx = ParseContext::basic();
    return parse_expr(text, ctx);
}

namespace detail {

// precedence: 1 sum, 2 product, 3 power operand
inline std::string render_prec(const ExprPtr& e, int prec);

inline std::string render_scalar(const CRat& c, int prec) {
    std::string s = c.str();
    bool composite = s.find(' ') != std::string::npos;
    bool product_like = s.find('*') != std::string::npos;
    bool negative = !s.empty() && s[0] == '-';
    bool fraction = s.find('/') != std::string::npos;
    if ((composite && prec >= 2) || (product_like && prec >= 3) ||
        ((negative || fraction) && prec >= 3))
        return "(" + s + ")";
    return s;
}

inline std::string render_prec(const ExprPtr& e, int prec) {
    switch (e->type) {
        case ExprType::Scalar:
            return render_scalar(e->scalar, prec);
        case ExprType::Sym:
            return vars().name(e->sym);
        case ExprType::Sum: {
            std::string s;
            for (const auto& k : e->kids) {
                std::string ks = render_prec(k, 1);
                if (s.empty()) {
                    s = ks;
                } else if (!ks.empty() && ks[0] == '-') {
                    s += " - " + ks.substr(1);
                } else {
                    s += " + " + ks;
                }
            }
            if (prec >= 2) return "(" + s + ")";
            return s;
        }
        case ExprType::Prod: {
            std::string s;
            for (const auto& k : e->kids) {
                if (!s.empty()) s += "*";
                s += render_prec(k, 2);
            }
            // pull a pure leading minus out: (-1)*x renders as -x
            if (e->kids.size() >= 2 && e->kids[0]->type == ExprType::Scalar) {
                const CRat& c = e->kids[0]->scalar;
                if (c == CRat(-1)) {
                    s.clear();
                    for (size_t i = 1; i < e->kids.size(); ++i) {
                        if (i > 1) s += "*";
                        s += render_prec(e->kids[i], 2);
                    }
                    s = "-" + s;
                    if (prec >= 2) return "(" + s + ")";
                    return s;
                }
            }
            if (prec >= 3) return "(" + s + ")";
            return s;
        }
        case ExprType::Pow: {
            std::string b = render_prec(e->kids[0], 3);
            std::string ex = std::to_string(e->ipow);
            if (e->ipow < 0) ex = "(" + ex + ")";
            return b + "^" + ex;
        }
        case ExprType::Func: {
            const char* n = e->fk == FuncKind::Exp   ? "exp"
                            : e->fk == FuncKind::Ln  ? "ln"
                            : e->fk == FuncKind::Sin ? "sin"
                                                     : "cos";
            return std::string(n) + "(" + render_prec(e->kids[0], 1) + ")";
        }
        case ExprType::UFunc: {
            const FuncInfo& f = vars().func(e->func_id);
            std::string s = f.name;
            if (f.arg_coords.size() == 1)
                for (int k = 0; k < e->deriv[0]; ++k) s += "'";
            s += "(";
            for (size_t i = 0; i < f.arg_coords.size(); ++i) {
                if (i) s += ",";
                s += vars().name(f.arg_coords[i]);
            }
            s += ")";
            return s;
        }
    }
    return "?";
}

} // namespace detail

/// Deterministic text form; parse_expr(render(e)) is equivalent to e.
inline std::string render(const ExprPtr& e) {
    return detail::render_prec(e, 0);
}

/// Canonical text of the normal form of an expression.
inline std::string render_canonical(const ExprPtr& e) {
    return nf_str(normalize(e));
}

} // namespace magsym

#endif
