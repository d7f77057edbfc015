#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "catsq/presheaf.hpp"

namespace catsq {

/// A parse or validation error with a 1-based source position. `inner` is
/// the module-level error kind wrapped by ValidationFailed.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t line, std::size_t col, const std::string& message,
             std::optional<ErrorKind> inner = std::nullopt)
      : Error(kind, std::to_string(line) + ":" + std::to_string(col) + ": " + message),
        line_(line),
        col_(col),
        inner_(inner) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return col_; }
  std::optional<ErrorKind> inner() const { return inner_; }

 private:
  std::size_t line_;
  std::size_t col_;
  std::optional<ErrorKind> inner_;
};

/// Named definitions from one or more `.catsq` sources, in declaration order.
struct Workspace {
  enum class Kind { Category, Functor, Nat, Square, Presheaf };
  struct Entry {
    Kind kind;
    std::string name;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  struct FunctorDecl {
    std::string src, dst;
    friend bool operator==(const FunctorDecl&, const FunctorDecl&) = default;
  };
  struct NatDecl {
    std::string src, dst;  // functor expressions
    friend bool operator==(const NatDecl&, const NatDecl&) = default;
  };
  struct SquareDecl {
    std::string v, u, uprime, w, alpha;
    friend bool operator==(const SquareDecl&, const SquareDecl&) = default;
  };

  std::vector<Entry> order;
  std::map<std::string, CatRef> categories;
  std::map<std::string, Functor> functors;
  std::map<std::string, FunctorDecl> functor_decls;
  std::map<std::string, NatTrans> nats;
  std::map<std::string, NatDecl> nat_decls;
  std::map<std::string, TwoSquare> squares;
  std::map<std::string, SquareDecl> square_decls;
  std::map<std::string, Presheaf> presheaves;
  std::map<std::string, std::string> presheaf_bases;

  bool contains(const std::string& name) const {
    return categories.contains(name) || functors.contains(name) || nats.contains(name) || squares.contains(name) ||
           presheaves.contains(name);
  }

  const FinCat& category(const std::string& name) const { return *lookup(categories, name, "category"); }
  const CatRef& category_ref(const std::string& name) const { return lookup(categories, name, "category"); }
  const Functor& functor(const std::string& name) const { return lookup(functors, name, "functor"); }
  const NatTrans& nat(const std::string& name) const { return lookup(nats, name, "nat"); }
  const TwoSquare& square(const std::string& name) const { return lookup(squares, name, "square"); }
  const Presheaf& presheaf(const std::string& name) const { return lookup(presheaves, name, "presheaf"); }

  /// Names of the given kind in declaration order.
  std::vector<std::string> names(Kind k) const {
    std::vector<std::string> out;
    for (const auto& e : order)
      if (e.kind == k) out.push_back(e.name);
    return out;
  }

  friend bool operator==(const Workspace& x, const Workspace& y) {
    if (x.order != y.order || x.functor_decls != y.functor_decls || x.nat_decls != y.nat_decls ||
        x.square_decls != y.square_decls || x.presheaf_bases != y.presheaf_bases)
      return false;
    for (const auto& [n, c] : x.categories)
      if (!y.categories.contains(n) || !(*c == *y.categories.at(n))) return false;
    auto eq_map = [](const auto& m1, const auto& m2) {
      if (m1.size() != m2.size()) return false;
      for (const auto& [n, v] : m1)
        if (!m2.contains(n) || !(v == m2.at(n))) return false;
      return true;
    };
    return x.categories.size() == y.categories.size() && eq_map(x.functors, y.functors) && eq_map(x.nats, y.nats) &&
           eq_map(x.squares, y.squares) && eq_map(x.presheaves, y.presheaves);
  }

 private:
  template <class Map>
  static const typename Map::mapped_type& lookup(const Map& m, const std::string& name, const char* what) {
    auto it = m.find(name);
    if (it == m.end()) throw Error(ErrorKind::UnresolvedName, std::string("no ") + what + " named '" + name + "'");
    return it->second;
  }
};

namespace dsl {

struct Token {
  enum Type { Ident, Punct, End } type;
  std::string text;
  std::size_t line;
  std::size_t col;
};

inline bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '\'' || c >= 0x80; }

inline std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;  // count code points, not bytes
      }
      ++i;
    }
  };
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    std::size_t l = line, cl = col;
    if (c == '"') {
      std::string s;
      advance(1);
      while (i < src.size() && src[i] != '"') {
        if (src[i] == '\\' && i + 1 < src.size()) advance(1);
        if (src[i] == '\n') throw ParseError(ErrorKind::SyntaxError, l, cl, "unterminated quoted name");
        s += src[i];
        advance(1);
      }
      if (i >= src.size()) throw ParseError(ErrorKind::SyntaxError, l, cl, "unterminated quoted name");
      advance(1);
      out.push_back({Token::Ident, std::move(s), l, cl});
      continue;
    }
    if (ident_char(c)) {
      std::size_t start = i;
      while (i < src.size() && ident_char(static_cast<unsigned char>(src[i]))) advance(1);
      out.push_back({Token::Ident, src.substr(start, i - start), l, cl});
      continue;
    }
    for (const char* p : {"|->", "->", "=>", "<-"}) {
      std::string_view sv(p);
      if (src.compare(i, sv.size(), sv) == 0) {
        out.push_back({Token::Punct, std::string(sv), l, cl});
        advance(sv.size());
        goto next;
      }
    }
    if (std::string_view("{}:;,.=()").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({Token::Punct, std::string(1, static_cast<char>(c)), l, cl});
      advance(1);
      continue;
    }
    throw ParseError(ErrorKind::SyntaxError, l, cl, std::string("unexpected character '") + static_cast<char>(c) + "'");
  next:;
  }
  out.push_back({Token::End, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(const std::string& text, Workspace& ws, Limits limits) : toks_(tokenize(text)), ws_(ws), limits_(limits) {}

  void run() {
    while (peek().type != Token::End) {
      const Token& kw = expect_ident();
      if (kw.text == "category") parse_category();
      else if (kw.text == "functor") parse_functor();
      else if (kw.text == "nat") parse_nat();
      else if (kw.text == "square") parse_square();
      else if (kw.text == "presheaf") parse_presheaf();
      else fail(ErrorKind::SyntaxError, kw, "expected a block keyword, found '" + kw.text + "'");
    }
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Workspace& ws_;
  Limits limits_;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool at_punct(const char* p, std::size_t k = 0) const { return peek(k).type == Token::Punct && peek(k).text == p; }
  bool accept(const char* p) {
    if (!at_punct(p)) return false;
    next();
    return true;
  }

  [[noreturn]] static void fail(ErrorKind k, const Token& t, const std::string& msg,
                                std::optional<ErrorKind> inner = std::nullopt) {
    throw ParseError(k, t.line, t.col, msg, inner);
  }

  static std::string describe(const Token& t) {
    if (t.type == Token::End) return "end of input";
    return "'" + t.text + "'";
  }

  const Token& expect(const char* p) {
    if (!at_punct(p)) fail(ErrorKind::SyntaxError, peek(), std::string("expected '") + p + "', found " + describe(peek()));
    return next();
  }
  const Token& expect_ident() {
    if (peek().type != Token::Ident) fail(ErrorKind::SyntaxError, peek(), "expected a name, found " + describe(peek()));
    return next();
  }

  void skip_separators() {
    while (accept(";") || accept(",")) {
    }
  }

  const Token& declare(const Token& name) {
    if (ws_.contains(name.text)) fail(ErrorKind::ValidationFailed, name, "name '" + name.text + "' already defined",
                                      ErrorKind::DuplicateId);
    return name;
  }

  const CatRef& category_named(const Token& t) {
    auto it = ws_.categories.find(t.text);
    if (it == ws_.categories.end()) fail(ErrorKind::UnresolvedName, t, "unknown category '" + t.text + "'");
    return it->second;
  }

  void check_size(const Token& at, const FinCat& c) {
    if (c.object_count() > limits_.max_objects || c.arrow_count() > limits_.max_arrows)
      fail(ErrorKind::SizeGuardExceeded, at,
           "category '" + at.text + "' exceeds the size guard (" + std::to_string(c.object_count()) + " objects, " +
               std::to_string(c.arrow_count()) + " arrows)");
  }

  // category NAME { objects: …; arrows: f: a -> b, …; compose: g.f = h, …; identities: a = f, …; shape: … }
  void parse_category() {
    const Token name = declare(expect_ident());
    expect("{");
    RawCategory raw;
    std::vector<Token> ob_pos, ar_pos, id_pos, comp_pos;
    Token shape_pos = name;
    skip_separators();
    while (!at_punct("}")) {
      const Token sec = expect_ident();
      expect(":");
      if (sec.text == "objects") {
        while (peek().type == Token::Ident) {
          ob_pos.push_back(next());
          raw.objects.push_back(ob_pos.back().text);
          if (!accept(",")) break;
        }
      } else if (sec.text == "arrows") {
        while (peek().type == Token::Ident) {
          ar_pos.push_back(next());
          expect(":");
          std::string d = expect_ident().text;
          expect("->");
          std::string c = expect_ident().text;
          raw.arrows.push_back({ar_pos.back().text, d, c});
          if (!accept(",")) break;
        }
      } else if (sec.text == "compose") {
        while (peek().type == Token::Ident) {
          comp_pos.push_back(next());
          expect(".");
          std::string f = expect_ident().text;
          expect("=");
          std::string h = expect_ident().text;
          raw.composites.push_back({comp_pos.back().text, f, h});
          if (!accept(",")) break;
        }
      } else if (sec.text == "identities") {
        while (peek().type == Token::Ident) {
          id_pos.push_back(next());
          expect("=");
          raw.identities.emplace_back(id_pos.back().text, expect_ident().text);
          if (!accept(",")) break;
        }
      } else if (sec.text == "shape") {
        shape_pos = expect_ident();
        const std::string& s = shape_pos.text;
        if (s == "poset") raw.shape = Shape::Poset;
        else if (s == "discrete") raw.shape = Shape::Discrete;
        else if (s == "interval") raw.shape = Shape::Interval;
        else if (s == "parallel") raw.shape = Shape::Parallel;
        else fail(ErrorKind::SyntaxError, shape_pos, "unknown shape '" + s + "'");
      } else {
        fail(ErrorKind::SyntaxError, sec, "unknown category section '" + sec.text + "'");
      }
      if (!at_punct("}")) {
        if (!at_punct(";") && !at_punct(","))
          fail(ErrorKind::SyntaxError, peek(), "expected ';' or '}', found " + describe(peek()));
        skip_separators();
      }
    }
    expect("}");
    ValidationResult r = validate_category(raw);
    if (!r.ok()) {
      const Violation& v = r.violations.front();
      const Token* at = &shape_pos;
      auto pick = [&](const std::vector<Token>& ts) {
        if (v.index < ts.size()) at = &ts[v.index];
      };
      switch (v.section) {
        case 'o': pick(ob_pos); break;
        case 'a': pick(ar_pos); break;
        case 'i': pick(id_pos); break;
        case 'c': pick(comp_pos); break;
        default: break;
      }
      fail(ErrorKind::ValidationFailed, *at, "category '" + name.text + "': " + std::string(to_string(v.kind)) + ": " +
                                                  v.message,
           v.kind);
    }
    check_size(name, *r.category);
    ws_.categories.emplace(name.text, make_cat(std::move(*r.category)));
    ws_.order.push_back({Workspace::Kind::Category, name.text});
  }

  // functor NAME: A -> B { ob: a |-> p, …; ar: f |-> h, … }
  void parse_functor() {
    const Token name = declare(expect_ident());
    expect(":");
    const Token st = expect_ident();
    expect("->");
    const Token dt = expect_ident();
    const CatRef& src = category_named(st);
    const CatRef& dst = category_named(dt);
    expect("{");
    std::vector<std::optional<ObId>> ob(src->object_count());
    std::vector<ArId> ar(src->arrow_count(), kNoArrow);
    skip_separators();
    while (!at_punct("}")) {
      const Token sec = expect_ident();
      expect(":");
      bool objects = sec.text == "ob";
      if (!objects && sec.text != "ar") fail(ErrorKind::SyntaxError, sec, "expected 'ob' or 'ar'");
      while (peek().type == Token::Ident) {
        const Token& from = next();
        expect("|->");
        const Token& to = expect_ident();
        if (objects) {
          auto x = src->find_object(from.text);
          auto y = dst->find_object(to.text);
          if (!x) fail(ErrorKind::UnresolvedName, from, "unknown object '" + from.text + "' of " + st.text);
          if (!y) fail(ErrorKind::UnresolvedName, to, "unknown object '" + to.text + "' of " + dt.text);
          ob[*x] = *y;
        } else {
          auto f = src->find_arrow(from.text);
          auto h = dst->find_arrow(to.text);
          if (!f) fail(ErrorKind::UnresolvedName, from, "unknown arrow '" + from.text + "' of " + st.text);
          if (!h) fail(ErrorKind::UnresolvedName, to, "unknown arrow '" + to.text + "' of " + dt.text);
          ar[*f] = *h;
        }
        if (!accept(",")) break;
      }
      if (!at_punct("}")) {
        if (!at_punct(";")) fail(ErrorKind::SyntaxError, peek(), "expected ';' or '}', found " + describe(peek()));
        skip_separators();
      }
    }
    expect("}");
    std::vector<ObId> obm(ob.size());
    for (ObId x = 0; x < ob.size(); ++x) {
      if (!ob[x] && dst->object_count() == 1) ob[x] = 0;
      if (!ob[x]) fail(ErrorKind::UnresolvedName, name, "object '" + src->object_name(x) + "' is not mapped");
      obm[x] = *ob[x];
    }
    for (ArId f = 0; f < ar.size(); ++f) {
      if (ar[f] != kNoArrow) continue;
      if (src->is_identity(f)) {
        ar[f] = dst->identity(obm[src->dom(f)]);
        continue;
      }
      auto h = dst->hom(obm[src->dom(f)], obm[src->cod(f)]);
      if (h.size() != 1) fail(ErrorKind::UnresolvedName, name, "arrow '" + src->arrow_name(f) + "' is not mapped");
      ar[f] = h[0];
    }
    try {
      ws_.functors.emplace(name.text, Functor(src, dst, std::move(obm), std::move(ar)));
    } catch (const Error& e) {
      fail(ErrorKind::ValidationFailed, name, "functor '" + name.text + "': " + e.what(), e.kind());
    }
    ws_.functor_decls[name.text] = {st.text, dt.text};
    ws_.order.push_back({Workspace::Kind::Functor, name.text});
  }

  /// u.v.w or id_X; returns the functor and its source text.
  std::pair<Functor, std::string> parse_functor_expr() {
    std::vector<Token> parts{expect_ident()};
    while (accept(".")) parts.push_back(expect_ident());
    std::optional<Functor> acc;
    std::string text;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
      Functor f = resolve_functor(*it);
      if (acc) {
        if (!same_category(acc->dst(), f.src()))
          fail(ErrorKind::ValidationFailed, *it, "functors in composite do not match", ErrorKind::BoundaryMismatch);
        acc = compose(f, *acc);
      } else {
        acc = f;
      }
    }
    for (std::size_t i = 0; i < parts.size(); ++i) text += (i ? "." : "") + parts[i].text;
    return {*acc, text};
  }

  Functor resolve_functor(const Token& t) {
    if (auto it = ws_.functors.find(t.text); it != ws_.functors.end()) return it->second;
    if (t.text.rfind("id_", 0) == 0) {
      if (auto c = ws_.categories.find(t.text.substr(3)); c != ws_.categories.end()) return identity_functor(c->second);
    }
    fail(ErrorKind::UnresolvedName, t, "unknown functor '" + t.text + "'");
  }

  // nat NAME: F => G { a |-> h, … }
  void parse_nat() {
    const Token name = declare(expect_ident());
    expect(":");
    auto [f, ftext] = parse_functor_expr();
    expect("=>");
    auto [g, gtext] = parse_functor_expr();
    expect("{");
    if (!same_category(f.src(), g.src()) || !same_category(f.dst(), g.dst()))
      fail(ErrorKind::ValidationFailed, name, "nat '" + name.text + "': functors are not parallel",
           ErrorKind::BoundaryMismatch);
    const FinCat& a = f.src();
    const FinCat& c = f.dst();
    std::vector<ArId> comp(a.object_count(), kNoArrow);
    skip_separators();
    while (peek().type == Token::Ident) {
      const Token& x = next();
      expect("|->");
      const Token& h = expect_ident();
      auto xo = a.find_object(x.text);
      auto ha = c.find_arrow(h.text);
      if (!xo) fail(ErrorKind::UnresolvedName, x, "unknown object '" + x.text + "'");
      if (!ha) fail(ErrorKind::UnresolvedName, h, "unknown arrow '" + h.text + "'");
      comp[*xo] = *ha;
      if (!accept(",") && !accept(";")) break;
      skip_separators();
    }
    expect("}");
    for (ObId x = 0; x < comp.size(); ++x) {
      if (comp[x] != kNoArrow) continue;
      auto h = c.hom(f.ob(x), g.ob(x));
      if (h.size() != 1) fail(ErrorKind::UnresolvedName, name, "component at '" + a.object_name(x) + "' is missing");
      comp[x] = h[0];
    }
    try {
      ws_.nats.emplace(name.text, NatTrans(f, g, std::move(comp)));
    } catch (const Error& e) {
      fail(ErrorKind::ValidationFailed, name, "nat '" + name.text + "': " + e.what(), e.kind());
    }
    ws_.nat_decls[name.text] = {ftext, gtext};
    ws_.order.push_back({Workspace::Kind::Nat, name.text});
  }

  // square NAME { v: …, u: …, uprime: …, w: …, alpha: NAME|id }
  void parse_square() {
    const Token name = declare(expect_ident());
    expect("{");
    std::map<std::string, std::pair<Functor, std::string>> fs;
    std::optional<Token> alpha;
    skip_separators();
    while (!at_punct("}")) {
      const Token key = expect_ident();
      expect(":");
      if (key.text == "alpha") {
        alpha = expect_ident();
      } else if (key.text == "v" || key.text == "u" || key.text == "uprime" || key.text == "w") {
        fs.insert_or_assign(key.text, parse_functor_expr());
      } else {
        fail(ErrorKind::SyntaxError, key, "unknown square field '" + key.text + "'");
      }
      if (!at_punct("}")) {
        if (!at_punct(",") && !at_punct(";"))
          fail(ErrorKind::SyntaxError, peek(), "expected ',' or '}', found " + describe(peek()));
        skip_separators();
      }
    }
    expect("}");
    for (const char* k : {"v", "u", "uprime", "w"})
      if (!fs.contains(k)) fail(ErrorKind::SyntaxError, name, std::string("square '") + name.text + "' lacks '" + k + "'");
    if (!alpha) fail(ErrorKind::SyntaxError, name, "square '" + name.text + "' lacks 'alpha'");
    const Functor& v = fs.at("v").first;
    const Functor& u = fs.at("u").first;
    const Functor& up = fs.at("uprime").first;
    const Functor& w = fs.at("w").first;
    try {
      std::optional<NatTrans> cell;
      if (alpha->text == "id" && !ws_.nats.contains("id")) {
        Functor uv = compose(u, v);
        cell = NatTrans(uv, compose(w, up), identity_nat(uv).components());
      } else {
        auto it = ws_.nats.find(alpha->text);
        if (it == ws_.nats.end()) fail(ErrorKind::UnresolvedName, *alpha, "unknown nat '" + alpha->text + "'");
        cell = it->second;
      }
      ws_.squares.emplace(name.text, TwoSquare(v, u, up, w, *cell));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      fail(ErrorKind::ValidationFailed, name, "square '" + name.text + "': " + e.what(), e.kind());
    }
    ws_.square_decls[name.text] = {fs.at("v").second, fs.at("u").second, fs.at("uprime").second, fs.at("w").second,
                                   alpha->text};
    ws_.order.push_back({Workspace::Kind::Square, name.text});
  }

  // presheaf NAME on A { a: {x1,x2}; f: x1 <- y1, … }
  void parse_presheaf() {
    const Token name = declare(expect_ident());
    const Token on = expect_ident();
    if (on.text != "on") fail(ErrorKind::SyntaxError, on, "expected 'on'");
    const Token bt = expect_ident();
    const CatRef& base = category_named(bt);
    expect("{");
    std::vector<std::optional<std::vector<std::string>>> els(base->object_count());
    std::vector<std::vector<std::pair<Token, Token>>> acts(base->arrow_count());
    std::vector<std::optional<Token>> act_pos(base->arrow_count());
    skip_separators();
    while (!at_punct("}")) {
      const Token key = expect_ident();
      expect(":");
      if (at_punct("{")) {
        auto x = base->find_object(key.text);
        if (!x) fail(ErrorKind::UnresolvedName, key, "unknown object '" + key.text + "' of " + bt.text);
        next();
        std::vector<std::string> xs;
        std::set<std::string> seen;
        while (peek().type == Token::Ident) {
          const Token& e = next();
          if (!seen.insert(e.text).second)
            fail(ErrorKind::ValidationFailed, e, "element '" + e.text + "' listed twice", ErrorKind::DuplicateId);
          xs.push_back(e.text);
          if (!accept(",")) break;
        }
        expect("}");
        els[*x] = std::move(xs);
      } else {
        auto f = base->find_arrow(key.text);
        if (!f) fail(ErrorKind::UnresolvedName, key, "unknown arrow '" + key.text + "' of " + bt.text);
        act_pos[*f] = key;
        while (peek().type == Token::Ident) {
          Token to = next();
          expect("<-");
          Token from = expect_ident();
          acts[*f].emplace_back(std::move(to), std::move(from));
          if (!accept(",")) break;
        }
      }
      if (!at_punct("}")) {
        if (!at_punct(";")) fail(ErrorKind::SyntaxError, peek(), "expected ';' or '}', found " + describe(peek()));
        skip_separators();
      }
    }
    expect("}");
    std::vector<std::vector<std::string>> elements(base->object_count());
    for (ObId x = 0; x < els.size(); ++x) {
      if (!els[x]) fail(ErrorKind::UnresolvedName, name, "set at '" + base->object_name(x) + "' is missing");
      elements[x] = *els[x];
    }
    auto index_in = [&](ObId x, const Token& t) -> Elem {
      for (Elem i = 0; i < elements[x].size(); ++i)
        if (elements[x][i] == t.text) return i;
      fail(ErrorKind::UnresolvedName, t, "'" + t.text + "' is not an element at '" + base->object_name(x) + "'");
    };
    std::vector<FinMap> action(base->arrow_count());
    for (ArId f = 0; f < action.size(); ++f) {
      ObId d = base->dom(f), c = base->cod(f);
      const Token& at = act_pos[f] ? *act_pos[f] : name;
      std::vector<std::optional<Elem>> m(elements[c].size());
      for (const auto& [to, from] : acts[f]) {
        Elem y = index_in(c, from);
        Elem x = index_in(d, to);
        if (m[y] && *m[y] != x)
          fail(ErrorKind::ValidationFailed, from, "action of '" + base->arrow_name(f) + "' on '" + from.text +
                                                       "' given twice", ErrorKind::DuplicateId);
        m[y] = x;
      }
      for (Elem y = 0; y < m.size(); ++y) {
        if (!m[y]) {
          if (base->is_identity(f)) m[y] = y;
          else if (elements[d].size() == 1) m[y] = 0;
          else fail(ErrorKind::UnresolvedName, at, "action of '" + base->arrow_name(f) + "' on '" + elements[c][y] +
                                                       "' is missing");
        }
        action[f].push_back(*m[y]);
      }
    }
    try {
      ws_.presheaves.emplace(name.text, Presheaf(base, std::move(elements), std::move(action)));
    } catch (const Error& e) {
      fail(ErrorKind::ValidationFailed, name, "presheaf '" + name.text + "': " + e.what(), e.kind());
    }
    ws_.presheaf_bases[name.text] = bt.text;
    ws_.order.push_back({Workspace::Kind::Presheaf, name.text});
  }
};

}  // namespace dsl

/// Parses `text` into `ws`, adding to whatever it already holds.
inline void parse_into(Workspace& ws, const std::string& text, const Limits& limits = {}) {
  dsl::Parser(text, ws, limits).run();
}

inline Workspace parse_workspace(const std::string& text, const Limits& limits = {}) {
  Workspace ws;
  parse_into(ws, text, limits);
  return ws;
}

// ---------------------------------------------------------------------------
// Serialization

namespace dsl {

inline std::string quote(const std::string& name) {
  bool plain = !name.empty();
  for (unsigned char c : name) plain = plain && ident_char(c);
  if (plain) return name;
  std::string s = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') s += '\\';
    s += c;
  }
  return s + "\"";
}

template <class Range, class Fn>
std::string join(const Range& r, Fn&& fn, const char* sep = ", ") {
  std::string s;
  bool first = true;
  for (const auto& x : r) {
    if (!first) s += sep;
    first = false;
    s += fn(x);
  }
  return s;
}

}  // namespace dsl

inline std::string serialize_category(const std::string& name, const FinCat& c) {
  using dsl::quote;
  std::ostringstream out;
  // identities stay implicit only when they are exactly the arrows the parser
  // would create: `id_<object>` in object order, ahead of all other arrows
  bool implicit = true;
  for (ObId x = 0; x < c.object_count(); ++x)
    implicit = implicit && c.identity(x) == x && c.arrow_name(x) == "id_" + c.object_name(x);
  out << "category " << quote(name) << " {\n";
  std::vector<std::string> obs;
  for (ObId x = 0; x < c.object_count(); ++x) obs.push_back(quote(c.object_name(x)));
  out << "  objects: " << dsl::join(obs, [](const std::string& s) { return s; }) << ";\n";
  std::vector<std::string> ars;
  for (ArId f = 0; f < c.arrow_count(); ++f) {
    if (implicit && f < c.object_count()) continue;
    ars.push_back(quote(c.arrow_name(f)) + ": " + quote(c.object_name(c.dom(f))) + " -> " +
                  quote(c.object_name(c.cod(f))));
  }
  if (!ars.empty()) out << "  arrows: " << dsl::join(ars, [](const std::string& s) { return s; }) << ";\n";
  if (!implicit) {
    std::vector<std::string> ids;
    for (ObId x = 0; x < c.object_count(); ++x)
      ids.push_back(quote(c.object_name(x)) + " = " + quote(c.arrow_name(c.identity(x))));
    out << "  identities: " << dsl::join(ids, [](const std::string& s) { return s; }) << ";\n";
  }
  std::vector<std::string> comps;
  for (ArId f = 0; f < c.arrow_count(); ++f) {
    if (c.is_identity(f)) continue;
    for (ArId g : c.out_arrows(c.cod(f))) {
      if (c.is_identity(g)) continue;
      comps.push_back(quote(c.arrow_name(g)) + "." + quote(c.arrow_name(f)) + " = " +
                      quote(c.arrow_name(c.compose(g, f))));
    }
  }
  if (!comps.empty()) out << "  compose: " << dsl::join(comps, [](const std::string& s) { return s; }) << ";\n";
  out << "}\n";
  return out.str();
}

inline std::string serialize(const Workspace& ws) {
  using dsl::quote;
  std::ostringstream out;
  auto expr = [](const std::string& e) {
    // expressions are dot-separated names; quote each part that needs it
    std::string s;
    std::size_t start = 0;
    for (;;) {
      std::size_t dot = e.find('.', start);
      s += quote(e.substr(start, dot == std::string::npos ? std::string::npos : dot - start));
      if (dot == std::string::npos) break;
      s += ".";
      start = dot + 1;
    }
    return s;
  };
  bool first = true;
  for (const auto& [kind, name] : ws.order) {
    if (!first) out << "\n";
    first = false;
    switch (kind) {
      case Workspace::Kind::Category:
        out << serialize_category(name, *ws.categories.at(name));
        break;
      case Workspace::Kind::Functor: {
        const Functor& f = ws.functors.at(name);
        const auto& decl = ws.functor_decls.at(name);
        const FinCat& a = f.src();
        const FinCat& b = f.dst();
        out << "functor " << quote(name) << ": " << quote(decl.src) << " -> " << quote(decl.dst) << " {\n";
        std::vector<std::string> obs, ars;
        for (ObId x = 0; x < a.object_count(); ++x)
          obs.push_back(quote(a.object_name(x)) + " |-> " + quote(b.object_name(f.ob(x))));
        for (ArId k = 0; k < a.arrow_count(); ++k)
          if (!a.is_identity(k)) ars.push_back(quote(a.arrow_name(k)) + " |-> " + quote(b.arrow_name(f.ar(k))));
        if (!obs.empty()) out << "  ob: " << dsl::join(obs, [](const std::string& s) { return s; }) << ";\n";
        if (!ars.empty()) out << "  ar: " << dsl::join(ars, [](const std::string& s) { return s; }) << ";\n";
        out << "}\n";
        break;
      }
      case Workspace::Kind::Nat: {
        const NatTrans& n = ws.nats.at(name);
        const auto& decl = ws.nat_decls.at(name);
        const FinCat& a = n.src().src();
        const FinCat& c = n.src().dst();
        out << "nat " << quote(name) << ": " << expr(decl.src) << " => " << expr(decl.dst) << " {";
        std::vector<std::string> cs;
        for (ObId x = 0; x < a.object_count(); ++x)
          cs.push_back(quote(a.object_name(x)) + " |-> " + quote(c.arrow_name(n.at(x))));
        if (!cs.empty()) out << " " << dsl::join(cs, [](const std::string& s) { return s; }) << " ";
        out << "}\n";
        break;
      }
      case Workspace::Kind::Square: {
        const auto& d = ws.square_decls.at(name);
        out << "square " << quote(name) << " { v: " << expr(d.v) << ", u: " << expr(d.u) << ", uprime: "
            << expr(d.uprime) << ", w: " << expr(d.w) << ", alpha: " << quote(d.alpha) << " }\n";
        break;
      }
      case Workspace::Kind::Presheaf: {
        const Presheaf& p = ws.presheaves.at(name);
        const FinCat& a = p.base();
        out << "presheaf " << quote(name) << " on " << quote(ws.presheaf_bases.at(name)) << " {\n";
        for (ObId x = 0; x < a.object_count(); ++x)
          out << "  " << quote(a.object_name(x)) << ": {"
              << dsl::join(p.at(x), [](const std::string& s) { return quote(s); }, ",") << "};\n";
        for (ArId f = 0; f < a.arrow_count(); ++f) {
          if (a.is_identity(f) || p.size(a.cod(f)) == 0) continue;
          std::vector<std::string> items;
          for (Elem y = 0; y < p.size(a.cod(f)); ++y)
            items.push_back(quote(p.at(a.dom(f))[p.act(f, y)]) + " <- " + quote(p.at(a.cod(f))[y]));
          out << "  " << quote(a.arrow_name(f)) << ": " << dsl::join(items, [](const std::string& s) { return s; })
              << ";\n";
        }
        out << "}\n";
        break;
      }
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Registration helpers for programmatically built workspaces

inline void add_category(Workspace& ws, const std::string& name, CatRef c) {
  ws.categories.emplace(name, std::move(c));
  ws.order.push_back({Workspace::Kind::Category, name});
}

inline void add_functor(Workspace& ws, const std::string& name, const std::string& src, const std::string& dst,
                        Functor f) {
  ws.functors.emplace(name, std::move(f));
  ws.functor_decls[name] = {src, dst};
  ws.order.push_back({Workspace::Kind::Functor, name});
}

inline void add_nat(Workspace& ws, const std::string& name, const std::string& src_expr, const std::string& dst_expr,
                    NatTrans n) {
  ws.nats.emplace(name, std::move(n));
  ws.nat_decls[name] = {src_expr, dst_expr};
  ws.order.push_back({Workspace::Kind::Nat, name});
}

inline void add_square(Workspace& ws, const std::string& name, Workspace::SquareDecl decl, TwoSquare d) {
  ws.squares.emplace(name, std::move(d));
  ws.square_decls[name] = std::move(decl);
  ws.order.push_back({Workspace::Kind::Square, name});
}

inline void add_presheaf(Workspace& ws, const std::string& name, const std::string& base, Presheaf p) {
  ws.presheaves.emplace(name, std::move(p));
  ws.presheaf_bases[name] = base;
  ws.order.push_back({Workspace::Kind::Presheaf, name});
}

}  // namespace catsq
