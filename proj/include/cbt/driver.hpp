#pragma once

// Batch checking, the interactive session, and definition evaluation: the
// machinery behind the `cbt` command. Everything writes to a caller-supplied
// stream and returns process exit codes (0 all accepted, 1 any rejection,
// 2 usage or IO trouble) so the pieces stay testable without a subprocess.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cbt/check.hpp"
#include "cbt/elaborate.hpp"
#include "cbt/equality.hpp"
#include "cbt/lex.hpp"
#include "cbt/parse.hpp"
#include "cbt/pretty.hpp"
#include "cbt/setmodel.hpp"
#include "cbt/syntax.hpp"

namespace cbt {

/// Built-in prelude text. A copy ships as lib/prelude.cbt and the two are
/// kept byte-identical; CBT_PRELUDE_PATH points the loader at a file instead.
inline const char* prelude_source() {
  return
      "-- Boolean helpers and canonical proposition codes, in scope for every\n"
      "-- module unless checking runs with --no-prelude.\n"
      "\n"
      "def idb (b : Bool) : Bool := b\n"
      "def notb (b : Bool) : Bool := if b as Bool then false else true\n"
      "def andb (a : Bool) (b : Bool) : Bool := if a as Bool then b else false\n"
      "def orb (a : Bool) (b : Bool) : Bool := if a as Bool then true else b\n"
      "\n"
      "def TruthP : Prop := R(Unit, dfun x => dfun y => refl x)\n"
      "def FalseP : Prop := R(Void, dfun x => dfun y => refl x)\n"
      "def IdUnitP : Prop := IdP Unit star star\n"
      "\n"
      "eq notb_true : notb true = false : Bool\n"
      "eq notb_notb : notb (notb true) = true : Bool\n"
      "eq andb_true : andb true true = true : Bool\n"
      "eq orb_false : orb false false = false : Bool\n";
}

namespace detail {

inline std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline std::string prelude_text() {
  if (const char* p = std::getenv("CBT_PRELUDE_PATH")) {
    if (auto text = detail::read_file(p)) return *text;
    throw std::runtime_error(std::string("cannot read prelude file '") + p + "'");
  }
  return prelude_source();
}

/// Parses and elaborates the prelude into `el`, bringing its names into
/// scope. The definitions are inlined (and therefore re-derived by the
/// kernel) at every use site, so their obligations are not checked here.
inline void load_surface_prelude(Elaborator& el) {
  std::string text = prelude_text();
  auto bad = [&](const Diagnostic& d) {
    throw std::runtime_error("prelude: " + d.one_line("<prelude>", text));
  };
  auto toks = tokenize(text);
  if (auto* d = std::get_if<Diagnostic>(&toks)) bad(*d);
  auto parsed = parse_module(std::get<std::vector<Token>>(std::move(toks)));
  if (auto* d = std::get_if<Diagnostic>(&parsed)) bad(*d);
  auto obs = elaborate(std::get<ModuleFile>(parsed), el);
  if (auto* d = std::get_if<Diagnostic>(&obs)) bad(*d);
}

// ---------------------------------------------------------------------------
// Batch checking

struct CheckFlags {
  bool oracle = false;     // cross-check accepted judgments in the set model
  bool dump_core = false;  // print elaborated core under each ok line
  bool no_prelude = false;
};

struct FileReport {
  std::string path;
  std::string text;
  int exit_code = 0;
};

namespace detail {

struct LoadedModule {
  std::string source;
  std::vector<Obligation> obligations;
};

/// Front half of checking: read, tokenize, parse, elaborate. Failures come
/// back as a finished report.
inline std::variant<LoadedModule, FileReport> load_module(const std::string& path,
                                                          bool no_prelude) {
  auto text = read_file(path);
  if (!text) return FileReport{path, "error: cannot open '" + path + "'\n", 2};
  auto fail = [&](const Diagnostic& d) {
    return FileReport{path, d.one_line(path, *text) + "\n", 1};
  };
  auto toks = tokenize(*text);
  if (auto* d = std::get_if<Diagnostic>(&toks)) return fail(*d);
  auto parsed = parse_module(std::get<std::vector<Token>>(std::move(toks)));
  if (auto* d = std::get_if<Diagnostic>(&parsed)) return fail(*d);
  Elaborator el;
  if (!no_prelude) {
    try {
      load_surface_prelude(el);
    } catch (const std::exception& e) {
      return FileReport{path, std::string("error: ") + e.what() + "\n", 2};
    }
  }
  auto obs = elaborate(std::get<ModuleFile>(parsed), el);
  if (auto* d = std::get_if<Diagnostic>(&obs)) return fail(*d);
  return LoadedModule{std::move(*text),
                      std::move(std::get<std::vector<Obligation>>(obs))};
}

inline Diagnostic diag_from(const TypeError& e, Span where) {
  Diagnostic d;
  d.message = std::string(to_string(e.kind)) + ": " + e.where;
  d.span = where;
  if (!e.expected.empty()) d.expected = e.expected;
  if (!e.actual.empty()) d.actual = e.actual;
  return d;
}

inline void kernel_check(Checker& ck, const Judgment& j) {
  std::visit(overloaded{
                 [&](const CtxWf& g) { ck.check_ctx(g.ctx); },
                 [&](const TyWf& g) { ck.check_ty(g.ctx, g.ty); },
                 [&](const TmHas& g) { ck.check_tm(g.ctx, g.tm, g.ty); },
                 [&](const TmEq& g) { ck.check_eq_tm(g.ctx, g.lhs, g.rhs, g.ty); },
                 [&](const SubstHas& g) { ck.check_subst(g.ctx, g.subst, g.target); },
             },
             j);
}

/// Set-model cross-check of a kernel-accepted judgment over every
/// environment of its context. Returns a mismatch description, or nothing.
inline std::optional<std::string> oracle_check(const Judgment& j) {
  SetModel sm;
  return std::visit(
      overloaded{
          [&](const TmHas& g) -> std::optional<std::string> {
            for (const auto& env : sm.enumerate_envs(g.ctx)) {
              SemPtr v = sm.interp_tm(g.ctx, g.tm, g.ty, env);
              if (!sm.interp_ty(g.ctx, g.ty, env).contains(v))
                return "value " + sem_show(v) + " lies outside the type's enumeration";
            }
            return std::nullopt;
          },
          [&](const TmEq& g) -> std::optional<std::string> {
            if (!sm.sem_eq_tm(g.ctx, g.lhs, g.rhs, g.ty))
              return std::string("sides denote different set-model values");
            return std::nullopt;
          },
          [&](const TyWf& g) -> std::optional<std::string> {
            for (const auto& env : sm.enumerate_envs(g.ctx)) sm.interp_ty(g.ctx, g.ty, env);
            return std::nullopt;
          },
          [&](const auto&) -> std::optional<std::string> { return std::nullopt; },
      },
      j);
}

}  // namespace detail

/// Checks one module and renders one line per declaration (`ok name` or a
/// diagnostic). Later declarations are still checked after a rejection.
inline FileReport check_file(const std::string& path, const CheckFlags& flags) {
  auto loaded = detail::load_module(path, flags.no_prelude);
  if (auto* rep = std::get_if<FileReport>(&loaded)) return *rep;
  const auto& mod = std::get<detail::LoadedModule>(loaded);

  std::ostringstream out;
  Checker ck;
  int code = 0;
  for (const auto& ob : mod.obligations) {
    try {
      detail::kernel_check(ck, ob.judgment);
    } catch (const TypeError& e) {
      out << detail::diag_from(e, ob.name_span).one_line(path, mod.source) << "\n";
      code = 1;
      continue;
    }
    std::string line = "ok " + ob.name;
    if (flags.oracle) {
      try {
        if (auto mismatch = detail::oracle_check(ob.judgment)) {
          out << path << ": oracle mismatch: " << ob.name << ": " << *mismatch << "\n";
          code = 1;
          continue;
        }
      } catch (const BudgetExceeded& e) {
        line += std::string(" (oracle skipped: ") + e.what() + ")";
      }
    }
    out << line << "\n";
    if (flags.dump_core) {
      switch (ob.kind) {
        case Obligation::Kind::Def:
          out << "  " << ob.name << " = " << pretty_tm(ob.core_tm, ob.scope_names)
              << " : " << pretty_ty(ob.core_ty, ob.scope_names) << "\n";
          break;
        case Obligation::Kind::Eq: {
          const auto& g = std::get<TmEq>(ob.judgment);
          out << "  " << ob.name << " : " << pretty_tm(g.lhs, ob.scope_names) << " = "
              << pretty_tm(g.rhs, ob.scope_names) << " : "
              << pretty_ty(g.ty, ob.scope_names) << "\n";
          break;
        }
        case Obligation::Kind::Assume:
          out << "  " << ob.name << " : " << pretty_ty(ob.core_ty, ob.scope_names) << "\n";
          break;
      }
    }
  }
  return FileReport{path, out.str(), code};
}

/// Checks every file (concurrently when there are several), printing the
/// reports in argument order. Exit code is the worst across files.
inline int run_check(const std::vector<std::string>& paths, const CheckFlags& flags,
                     std::ostream& os) {
  if (paths.empty()) {
    os << "error: no input files\n";
    return 2;
  }
  std::vector<FileReport> reports;
  if (paths.size() == 1) {
    reports.push_back(check_file(paths[0], flags));
  } else {
    std::vector<std::future<FileReport>> futs;
    futs.reserve(paths.size());
    for (const auto& p : paths)
      futs.push_back(std::async(std::launch::async,
                                [p, flags] { return check_file(p, flags); }));
    for (auto& f : futs) reports.push_back(f.get());
  }
  int code = 0;
  for (const auto& r : reports) {
    os << r.text;
    code = std::max(code, r.exit_code);
  }
  return code;
}

// ---------------------------------------------------------------------------
// Interactive session

/// Stateful line interpreter: `:assume` accumulates a context, every other
/// command (and every error) leaves the state untouched.
///
///   :t u        infer and print the type of u
///   :nf u       print the normal form of u
///   :eval u     print the set-model value of u (assumption-free sessions)
///   :assume x : T
///   :eq u = v : T
///   :q          quit
///
/// A bare expression behaves like `:t`.
class Repl {
 public:
  explicit Repl(bool with_prelude = true) {
    if (with_prelude) load_surface_prelude(el_);
  }

  bool done() const { return done_; }

  /// One input line in, printable output (without trailing newline) out.
  std::string step(const std::string& line) {
    std::string in = detail::trim(line);
    if (in.empty()) return "";
    try {
      if (in == ":q" || in == ":quit") {
        done_ = true;
        return "";
      }
      if (in.rfind(":t ", 0) == 0) return cmd_type(in.substr(3));
      if (in.rfind(":nf ", 0) == 0) return cmd_nf(in.substr(4));
      if (in.rfind(":eval ", 0) == 0) return cmd_eval(in.substr(6));
      if (in.rfind(":assume ", 0) == 0) return cmd_assume(in.substr(8));
      if (in.rfind(":eq ", 0) == 0) return cmd_eq(in.substr(4));
      if (in[0] == ':')
        return "error: unknown command '" + in.substr(0, in.find(' ')) + "'";
      return cmd_type(in);
    } catch (const ReplError& e) {
      return e.text;
    }
  }

 private:
  struct ReplError {
    std::string text;
  };

  [[noreturn]] static void fail(const Diagnostic& d, const std::string& src) {
    throw ReplError{d.one_line("<repl>", src)};
  }

  std::vector<Token> lex(const std::string& src) {
    auto toks = tokenize(src);
    if (auto* d = std::get_if<Diagnostic>(&toks)) fail(*d, src);
    return std::get<std::vector<Token>>(std::move(toks));
  }

  /// Parse + elaborate in inference mode; elaborator state is restored even
  /// when elaboration throws.
  std::pair<TermPtr, TypePtr> infer_input(const std::string& src) {
    auto parsed = parse_term(lex(src));
    if (auto* d = std::get_if<Diagnostic>(&parsed)) fail(*d, src);
    auto mark = el_.mark();
    try {
      auto tm_ty = el_.elab_infer(std::get<STmPtr>(parsed));
      el_.rollback(mark);
      return tm_ty;
    } catch (const ElabError& e) {
      el_.rollback(mark);
      fail(e.diag, src);
    }
  }

  template <class F>
  void kernel(F&& f) {
    try {
      f();
    } catch (const TypeError& e) {
      throw ReplError{std::string("error: ") + e.what()};
    }
  }

  std::string cmd_type(const std::string& src) {
    auto [tm, ty] = infer_input(src);
    kernel([&] { ck_.check_tm(el_.ctx(), tm, ty); });
    return pretty_ty(ty, el_.names());
  }

  std::string cmd_nf(const std::string& src) {
    auto [tm, ty] = infer_input(src);
    kernel([&] { ck_.check_tm(el_.ctx(), tm, ty); });
    return pretty_tm(normalize_tm(el_.ctx(), ty, tm).term, el_.names());
  }

  std::string cmd_eval(const std::string& src) {
    auto [tm, ty] = infer_input(src);
    kernel([&] { ck_.check_tm(el_.ctx(), tm, ty); });
    if (!el_.ctx().empty())
      throw ReplError{"error: :eval works in assumption-free sessions only"};
    try {
      SetModel sm;
      return sem_show(sm.interp_tm(Ctx{}, tm, ty, {}));
    } catch (const BudgetExceeded& e) {
      throw ReplError{std::string("error: ") + e.what()};
    }
  }

  std::string cmd_assume(const std::string& src) {
    auto parsed = parse_binding(lex(src));
    if (auto* d = std::get_if<Diagnostic>(&parsed)) fail(*d, src);
    const auto& [name, sty] = std::get<std::pair<std::string, STyPtr>>(parsed);
    if (el_.known(name)) throw ReplError{"error: '" + name + "' is already defined"};
    TypePtr ty;
    try {
      ty = el_.elab_type(sty);
    } catch (const ElabError& e) {
      fail(e.diag, src);
    }
    kernel([&] { ck_.check_ty(el_.ctx(), ty); });
    std::string shown = pretty_ty(ty, el_.names());
    el_.declare_assume(name, ty);
    return "assumed " + name + " : " + shown;
  }

  std::string cmd_eq(const std::string& src) {
    auto parsed = parse_equation(lex(src));
    if (auto* d = std::get_if<Diagnostic>(&parsed)) fail(*d, src);
    const auto& [slhs, srhs, sty] = std::get<std::tuple<STmPtr, STmPtr, STyPtr>>(parsed);
    auto mark = el_.mark();
    TypePtr ty;
    TermPtr lhs, rhs;
    try {
      ty = el_.elab_type(sty);
      lhs = el_.elab_check(slhs, ty);
      rhs = el_.elab_check(srhs, ty);
      el_.rollback(mark);
    } catch (const ElabError& e) {
      el_.rollback(mark);
      fail(e.diag, src);
    }
    kernel([&] { ck_.check_eq_tm(el_.ctx(), lhs, rhs, ty); });
    return "accepted";
  }

  Elaborator el_;
  Checker ck_;
  bool done_ = false;
};

/// Line loop for `cbt repl`.
inline int run_repl(std::istream& is, std::ostream& os) {
  std::optional<Repl> repl;
  try {
    repl.emplace();
  } catch (const std::exception& e) {
    os << "error: " << e.what() << "\n";
    return 2;
  }
  std::string line;
  while (!repl->done() && std::getline(is, line)) {
    std::string out = repl->step(line);
    if (!out.empty()) os << out << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Definition evaluation

/// Checks `path`, then prints the set-model value of the closed definition
/// `name`. Check failures reuse the batch report.
inline int eval_defn(const std::string& path, const std::string& name, std::ostream& os) {
  auto loaded = detail::load_module(path, /*no_prelude=*/false);
  if (auto* rep = std::get_if<FileReport>(&loaded)) {
    os << rep->text;
    return rep->exit_code;
  }
  const auto& mod = std::get<detail::LoadedModule>(loaded);

  Checker ck;
  for (const auto& ob : mod.obligations) {
    try {
      detail::kernel_check(ck, ob.judgment);
    } catch (const TypeError& e) {
      os << detail::diag_from(e, ob.name_span).one_line(path, mod.source) << "\n";
      return 1;
    }
  }
  for (const auto& ob : mod.obligations) {
    if (ob.name != name || ob.kind != Obligation::Kind::Def) continue;
    const auto& g = std::get<TmHas>(ob.judgment);
    if (!g.ctx.empty()) {
      os << "error: definition '" << name << "' depends on assumptions\n";
      return 2;
    }
    try {
      SetModel sm;
      os << sem_show(sm.interp_tm(Ctx{}, g.tm, g.ty, {})) << "\n";
      return 0;
    } catch (const BudgetExceeded& e) {
      os << "error: " << e.what() << "\n";
      return 1;
    }
  }
  os << "error: no definition named '" << name << "' in '" << path << "'\n";
  return 2;
}

}  // namespace cbt
