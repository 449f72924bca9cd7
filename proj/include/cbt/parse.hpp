#pragma once

// Recursive-descent parser for .cbt modules. Precedence, tightest first:
// projections, application, prefix formers (inl/inr/refl/squash/IdP and
// Id/El/Trunc on the type side), *, +, -> (right-associative, Pi binders
// extend to the right). Parenthesized terms double as annotations: (t : T).

#include <memory>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "cbt/lex.hpp"

namespace cbt {

struct STm;
struct STy;
using STmPtr = std::shared_ptr<const STm>;
using STyPtr = std::shared_ptr<const STy>;

struct SName { std::string name; };
struct SStar {};
struct SPair { STmPtr fst, snd; };
struct SProj1 { STmPtr arg; };
struct SProj2 { STmPtr arg; };
struct SInl { STmPtr arg; };
struct SInr { STmPtr arg; };
struct SMatch {
  STmPtr scrut;
  STyPtr motive;
  std::string left_name;
  STmPtr left;
  std::string right_name;
  STmPtr right;
};
struct SFun { std::string name; STmPtr body; };
struct SApp { STmPtr fn, arg; };
struct SDFun { std::string name; STmPtr body; };
struct SRefl { STmPtr arg; };
struct SCode { STyPtr carrier; STmPtr uniq; };
struct STrue {};
struct SFalse {};
struct SIf { STmPtr cond; STyPtr motive; STmPtr then_tm, else_tm; };
struct SSquash { STmPtr arg; };
struct STruncElim { STmPtr tr, code, fn; };
struct SIdP { STyPtr carrier; STmPtr lhs, rhs; };
struct SAnnot { STmPtr tm; STyPtr ty; };

struct STm {
  std::variant<SName, SStar, SPair, SProj1, SProj2, SInl, SInr, SMatch, SFun, SApp,
               SDFun, SRefl, SCode, STrue, SFalse, SIf, SSquash, STruncElim, SIdP,
               SAnnot>
      node;
  Span span;
};

struct SUnit {};
struct SProp {};
struct SBool {};
struct SVoid {};
struct SProd { STyPtr left, right; };
struct SCoprod { STyPtr left, right; };
struct SArrow { STyPtr dom, cod; };
struct SId { STyPtr carrier; STmPtr lhs, rhs; };
struct SPi { std::string name; STyPtr dom, cod; };
struct SEl { STmPtr code; };
struct STrunc { STyPtr carrier; };

struct STy {
  std::variant<SUnit, SProp, SBool, SVoid, SProd, SCoprod, SArrow, SId, SPi, SEl, STrunc>
      node;
  Span span;
};

template <typename N>
STmPtr stm(N node, Span sp) {
  return std::make_shared<const STm>(STm{std::move(node), sp});
}
template <typename N>
STyPtr sty(N node, Span sp) {
  return std::make_shared<const STy>(STy{std::move(node), sp});
}

struct Param {
  std::string name;
  STyPtr ty;
  Span span;
};

struct DefDecl {
  std::string name;
  std::vector<Param> params;
  STyPtr ty;
  STmPtr body;
  Span name_span;
};
struct EqDecl {
  std::string name;
  STmPtr lhs, rhs;
  STyPtr ty;
  Span name_span;
};
struct AssumeDecl {
  std::string name;
  STyPtr ty;
  Span name_span;
};
using Decl = std::variant<DefDecl, EqDecl, AssumeDecl>;

struct ModuleFile {
  std::vector<Decl> decls;
};

namespace detail {

struct ParseError {
  Diagnostic diag;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ModuleFile module() {
    ModuleFile out;
    while (!at_eof()) out.decls.push_back(decl());
    return out;
  }

  STmPtr whole_term() {
    STmPtr out = term();
    expect_end();
    return out;
  }

  STyPtr whole_type() {
    STyPtr out = type();
    expect_end();
    return out;
  }

  /// "name : T" fragments, as the repl's assume command takes them.
  std::pair<std::string, STyPtr> whole_binding() {
    Token name = expect_ident("assumption");
    expect(":");
    STyPtr ty = type();
    expect_end();
    return {name.lexeme, ty};
  }

  /// "u = v : T" fragments, as the repl's eq command takes them.
  std::tuple<STmPtr, STmPtr, STyPtr> whole_equation() {
    STmPtr lhs = term();
    expect("=");
    STmPtr rhs = term();
    expect(":");
    STyPtr ty = type();
    expect_end();
    return {lhs, rhs, ty};
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  const Token& prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
  bool at_eof() const { return peek().kind == TokenKind::Eof; }

  bool at(std::string_view lexeme) const {
    return peek().kind != TokenKind::Eof && peek().lexeme == lexeme;
  }
  bool at_ident() const { return peek().kind == TokenKind::Ident; }

  Token advance() { return toks_[pos_++]; }

  bool eat(std::string_view lexeme) {
    if (!at(lexeme)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail(const std::string& expected_set) {
    std::string found = peek().kind == TokenKind::Eof ? "end of input"
                                                      : "'" + peek().lexeme + "'";
    throw ParseError{Diagnostic{Severity::Error,
                                "expected " + expected_set + " but found " + found,
                                peek().span}};
  }

  Token expect(std::string_view lexeme) {
    if (!at(lexeme)) fail("'" + std::string(lexeme) + "'");
    return advance();
  }

  void expect_end() {
    if (!at_eof()) fail("end of input");
  }

  Token expect_ident(const char* what) {
    if (!at_ident()) fail(std::string("a ") + what + " name");
    return advance();
  }

  // --- declarations ---

  Decl decl() {
    if (eat("def")) {
      Token name = expect_ident("definition");
      std::vector<Param> params;
      while (at("(")) {
        // lookahead: a parameter is "(" IDENT ":" ...; defs have no other "("
        Token open = advance();
        Token pn = expect_ident("parameter");
        expect(":");
        STyPtr pty = type();
        expect(")");
        params.push_back({pn.lexeme, pty, {open.span.begin, prev().span.end}});
      }
      expect(":");
      STyPtr ty = type();
      expect(":=");
      STmPtr body = term();
      return DefDecl{name.lexeme, std::move(params), ty, body, name.span};
    }
    if (eat("eq")) {
      Token name = expect_ident("equation");
      expect(":");
      STmPtr lhs = term();
      expect("=");
      STmPtr rhs = term();
      expect(":");
      STyPtr ty = type();
      return EqDecl{name.lexeme, lhs, rhs, ty, name.span};
    }
    if (eat("assume")) {
      Token name = expect_ident("assumption");
      expect(":");
      STyPtr ty = type();
      return AssumeDecl{name.lexeme, ty, name.span};
    }
    fail("a declaration ('def', 'eq', or 'assume')");
  }

  // --- types ---

  STyPtr type() { return arrow_ty(); }

  STyPtr arrow_ty() {
    std::size_t start = peek().span.begin;
    if (eat("Pi")) {
      expect("(");
      Token name = expect_ident("binder");
      expect(":");
      STyPtr dom = type();
      expect(")");
      STyPtr cod = arrow_ty();
      return sty(SPi{name.lexeme, dom, cod}, {start, prev().span.end});
    }
    STyPtr lhs = sum_ty();
    if (eat("->")) {
      STyPtr rhs = arrow_ty();
      return sty(SArrow{lhs, rhs}, {start, prev().span.end});
    }
    return lhs;
  }

  STyPtr sum_ty() {
    std::size_t start = peek().span.begin;
    STyPtr lhs = prod_ty();
    while (eat("+")) {
      STyPtr rhs = prod_ty();
      lhs = sty(SCoprod{lhs, rhs}, {start, prev().span.end});
    }
    return lhs;
  }

  STyPtr prod_ty() {
    std::size_t start = peek().span.begin;
    STyPtr lhs = prefix_ty();
    while (eat("*")) {
      STyPtr rhs = prefix_ty();
      lhs = sty(SProd{lhs, rhs}, {start, prev().span.end});
    }
    return lhs;
  }

  STyPtr prefix_ty() {
    std::size_t start = peek().span.begin;
    if (eat("Id")) {
      STyPtr carrier = atom_ty();
      STmPtr lhs = postfix_tm();
      STmPtr rhs = postfix_tm();
      return sty(SId{carrier, lhs, rhs}, {start, prev().span.end});
    }
    if (eat("El")) {
      STmPtr code = postfix_tm();
      return sty(SEl{code}, {start, prev().span.end});
    }
    if (eat("Trunc")) {
      STyPtr carrier = atom_ty();
      return sty(STrunc{carrier}, {start, prev().span.end});
    }
    return atom_ty();
  }

  STyPtr atom_ty() {
    std::size_t start = peek().span.begin;
    if (eat("Unit")) return sty(SUnit{}, {start, prev().span.end});
    if (eat("Prop")) return sty(SProp{}, {start, prev().span.end});
    if (eat("Bool")) return sty(SBool{}, {start, prev().span.end});
    if (eat("Void")) return sty(SVoid{}, {start, prev().span.end});
    if (eat("(")) {
      STyPtr inner = type();
      expect(")");
      return inner;
    }
    fail("a type (one of 'Unit', 'Prop', 'Bool', 'Void', 'Id', 'Pi', 'El', 'Trunc', '(')");
  }

  // --- terms ---

  STmPtr term() {
    std::size_t start = peek().span.begin;
    if (eat("fun")) {
      Token name = expect_ident("binder");
      expect("=>");
      STmPtr body = term();
      return stm(SFun{name.lexeme, body}, {start, prev().span.end});
    }
    if (eat("dfun")) {
      Token name = expect_ident("binder");
      expect("=>");
      STmPtr body = term();
      return stm(SDFun{name.lexeme, body}, {start, prev().span.end});
    }
    if (eat("match")) {
      STmPtr scrut = term();
      expect("as");
      STyPtr motive = type();
      expect("{");
      Token ln = expect_ident("branch binder");
      expect("=>");
      STmPtr left = term();
      expect(";");
      Token rn = expect_ident("branch binder");
      expect("=>");
      STmPtr right = term();
      expect("}");
      return stm(SMatch{scrut, motive, ln.lexeme, left, rn.lexeme, right},
                 {start, prev().span.end});
    }
    if (eat("if")) {
      STmPtr cond = term();
      expect("as");
      STyPtr motive = type();
      expect("then");
      STmPtr then_tm = term();
      expect("else");
      STmPtr else_tm = term();
      return stm(SIf{cond, motive, then_tm, else_tm}, {start, prev().span.end});
    }
    return app_tm();
  }

  STmPtr app_tm() {
    std::size_t start = peek().span.begin;
    if (eat("inl")) {
      STmPtr arg = postfix_tm();
      return stm(SInl{arg}, {start, prev().span.end});
    }
    if (eat("inr")) {
      STmPtr arg = postfix_tm();
      return stm(SInr{arg}, {start, prev().span.end});
    }
    if (eat("refl")) {
      STmPtr arg = postfix_tm();
      return stm(SRefl{arg}, {start, prev().span.end});
    }
    if (eat("squash")) {
      STmPtr arg = postfix_tm();
      return stm(SSquash{arg}, {start, prev().span.end});
    }
    if (eat("IdP")) {
      STyPtr carrier = atom_ty();
      STmPtr lhs = postfix_tm();
      STmPtr rhs = postfix_tm();
      return stm(SIdP{carrier, lhs, rhs}, {start, prev().span.end});
    }
    STmPtr fn = postfix_tm();
    while (starts_atom()) {
      STmPtr arg = postfix_tm();
      fn = stm(SApp{fn, arg}, {start, prev().span.end});
    }
    return fn;
  }

  bool starts_atom() const {
    if (at_ident()) return true;
    return at("star") || at("true") || at("false") || at("pair") || at("R") ||
           at("truncElim") || at("(");
  }

  STmPtr postfix_tm() {
    std::size_t start = peek().span.begin;
    STmPtr out = atom_tm();
    while (true) {
      if (eat(".1")) {
        out = stm(SProj1{out}, {start, prev().span.end});
      } else if (eat(".2")) {
        out = stm(SProj2{out}, {start, prev().span.end});
      } else {
        return out;
      }
    }
  }

  STmPtr atom_tm() {
    std::size_t start = peek().span.begin;
    if (at_ident()) {
      Token t = advance();
      return stm(SName{t.lexeme}, t.span);
    }
    if (eat("star")) return stm(SStar{}, {start, prev().span.end});
    if (eat("true")) return stm(STrue{}, {start, prev().span.end});
    if (eat("false")) return stm(SFalse{}, {start, prev().span.end});
    if (eat("pair")) {
      expect("(");
      STmPtr fst = term();
      expect(",");
      STmPtr snd = term();
      expect(")");
      return stm(SPair{fst, snd}, {start, prev().span.end});
    }
    if (eat("R")) {
      expect("(");
      STyPtr carrier = type();
      expect(",");
      STmPtr uniq = term();
      expect(")");
      return stm(SCode{carrier, uniq}, {start, prev().span.end});
    }
    if (eat("truncElim")) {
      expect("(");
      STmPtr tr = term();
      expect(",");
      STmPtr code = term();
      expect(",");
      STmPtr fn = term();
      expect(")");
      return stm(STruncElim{tr, code, fn}, {start, prev().span.end});
    }
    if (eat("(")) {
      STmPtr inner = term();
      if (eat(":")) {
        STyPtr ty = type();
        expect(")");
        return stm(SAnnot{inner, ty}, {start, prev().span.end});
      }
      expect(")");
      return inner;
    }
    fail("a term (a name or one of 'star', 'true', 'false', 'pair', 'inl', 'inr', "
         "'refl', 'squash', 'R', 'IdP', 'truncElim', 'fun', 'dfun', 'match', 'if', '(')");
  }
};

}  // namespace detail

/// Parses a whole module; the first syntax error is returned as a Diagnostic.
inline std::variant<ModuleFile, Diagnostic> parse_module(std::vector<Token> tokens) {
  try {
    return detail::Parser(std::move(tokens)).module();
  } catch (const detail::ParseError& e) {
    return e.diag;
  }
}

inline std::variant<STmPtr, Diagnostic> parse_term(std::vector<Token> tokens) {
  try {
    return detail::Parser(std::move(tokens)).whole_term();
  } catch (const detail::ParseError& e) {
    return e.diag;
  }
}

inline std::variant<STyPtr, Diagnostic> parse_type(std::vector<Token> tokens) {
  try {
    return detail::Parser(std::move(tokens)).whole_type();
  } catch (const detail::ParseError& e) {
    return e.diag;
  }
}

inline std::variant<std::pair<std::string, STyPtr>, Diagnostic> parse_binding(
    std::vector<Token> tokens) {
  try {
    return detail::Parser(std::move(tokens)).whole_binding();
  } catch (const detail::ParseError& e) {
    return e.diag;
  }
}

inline std::variant<std::tuple<STmPtr, STmPtr, STyPtr>, Diagnostic> parse_equation(
    std::vector<Token> tokens) {
  try {
    return detail::Parser(std::move(tokens)).whole_equation();
  } catch (const detail::ParseError& e) {
    return e.diag;
  }
}

}  // namespace cbt
