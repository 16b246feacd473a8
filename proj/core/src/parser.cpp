#include "milnorlab/parser.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "milnorlab/report_io.hpp"

namespace milnorlab {

namespace {

enum class Tok { ident, number, str, punct, eof };

struct Token {
  Tok kind = Tok::eof;
  std::string text;      // ident name, punct spelling, string body
  double value = 0.0;    // number
  bool is_integer = false;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }
  Token next() {
    Token t = cur_;
    advance();
    return t;
  }

 private:
  void advance() {
    skip_ws();
    cur_ = Token{};
    cur_.line = line_;
    cur_.col = col_;
    if (pos_ >= src_.size()) return;  // eof
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      cur_.kind = Tok::ident;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        cur_.text += take();
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      cur_.kind = Tok::number;
      cur_.is_integer = true;
      std::string raw;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        raw += take();
      if (pos_ < src_.size() && src_[pos_] == '.') {
        cur_.is_integer = false;
        raw += take();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          raw += take();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        cur_.is_integer = false;
        raw += take();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) raw += take();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
          raw += take();
      }
      cur_.text = raw;
      cur_.value = std::stod(raw);
      return;
    }
    if (c == '"') {
      cur_.kind = Tok::str;
      take();
      while (pos_ < src_.size() && src_[pos_] != '"') cur_.text += take();
      if (pos_ >= src_.size())
        throw SyntaxError(cur_.line, cur_.col, "closing quote");
      take();
      return;
    }
    cur_.kind = Tok::punct;
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      cur_.text = "->";
      take();
      take();
      return;
    }
    if (c == '>' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
      cur_.text = ">=";
      take();
      take();
      return;
    }
    cur_.text = std::string(1, take());
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        take();
      } else {
        break;
      }
    }
  }

  char take() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token cur_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  MapGerm germ() {
    const Token& t = lex_.peek();
    MapGerm g = [&]() -> MapGerm {
      if (t.kind != Tok::ident)
        throw SyntaxError(t.line, t.col, "map, ldm, psi or catalog");
      if (t.text == "ldm") return ldm();
      if (t.text == "psi") return psi();
      if (t.text == "catalog") return catalog();
      if (t.text == "map") return map_block();
      throw SyntaxError(t.line, t.col, "map, ldm, psi or catalog");
    }();
    expect_eof();
    return g;
  }

  ConicHomeo homeo() {
    expect_ident("homeo");
    ConicHomeo h;
    h.tag = "user";
    h.k = expect_int("target dimension");
    if (h.k < 1) throw SyntaxError(last_.line, last_.col, "positive dimension");
    expect_punct("{");
    expect_ident("fwd");
    h.forward = component_block(h.k);
    expect_ident("inv");
    h.inverse = component_block(h.k);
    if (lex_.peek().kind == Tok::ident && lex_.peek().text == "eta") {
      lex_.next();
      expect_punct("=");
      h.eta = signed_number();
      if (h.eta <= 0.0) throw SyntaxError(last_.line, last_.col, "positive eta");
      expect_punct(";");
    }
    expect_punct("}");
    expect_eof();
    return h;
  }

 private:
  MapGerm ldm() {
    lex_.next();
    expect_punct("(");
    const int p = signed_int();
    expect_punct(",");
    const int q = signed_int();
    expect_punct(";");
    std::vector<std::pair<double, double>> lambda;
    for (;;) {
      expect_punct("(");
      const double a = signed_number();
      expect_punct(",");
      const double b = signed_number();
      expect_punct(")");
      lambda.emplace_back(a, b);
      if (!accept_punct(",")) break;
    }
    expect_punct(")");
    return builtin_ldm(p, q, lambda);
  }

  MapGerm psi() {
    lex_.next();
    expect_punct("(");
    const int n = expect_int("source dimension");
    expect_punct(")");
    return builtin_psi(n);
  }

  MapGerm catalog() {
    lex_.next();
    expect_punct("(");
    const Token t = lex_.next();
    if (t.kind != Tok::str) throw SyntaxError(t.line, t.col, "a quoted catalog name");
    expect_punct(")");
    return builtin_catalog(t.text);
  }

  MapGerm map_block() {
    lex_.next();
    const int n = expect_int("source dimension");
    expect_punct("->");
    const int k = expect_int("target dimension");
    if (n < 1 || k < 1) throw SyntaxError(last_.line, last_.col, "positive dimensions");
    expect_punct("{");
    std::vector<ExprPtr> comps;
    while (!accept_punct("}")) {
      const Token name = lex_.next();
      if (name.kind != Tok::ident)
        throw SyntaxError(name.line, name.col, "a component name");
      expect_punct("=");
      comps.push_back(expr(n));
      expect_punct(";");
    }
    if (static_cast<int>(comps.size()) != k)
      throw ArityError("map block declares target dimension " + std::to_string(k) +
                       " but defines " + std::to_string(comps.size()) + " components");
    Smoothness sm = Smoothness::analytic;
    for (const auto& c : comps)
      if (!analytic_tree(*c)) sm = Smoothness::smooth;
    return MapGerm(n, k, std::move(comps), sm);
  }

  std::vector<ExprPtr> component_block(int k) {
    expect_punct("{");
    std::vector<ExprPtr> comps;
    while (!accept_punct("}")) {
      const Token name = lex_.next();
      if (name.kind != Tok::ident)
        throw SyntaxError(name.line, name.col, "a component name");
      expect_punct("=");
      comps.push_back(expr(k));
      expect_punct(";");
    }
    if (static_cast<int>(comps.size()) != k)
      throw ArityError("homeo block declares dimension " + std::to_string(k) +
                       " but defines " + std::to_string(comps.size()) + " components");
    return comps;
  }

  static bool analytic_tree(const Expr& e) {
    switch (e.kind) {
      case ExprKind::guard:
      case ExprKind::abs_fn:
      case ExprKind::bump_fn:
      case ExprKind::root:
        return false;
      default:
        break;
    }
    for (const auto& k : e.kids)
      if (!analytic_tree(*k)) return false;
    return true;
  }

  // expr := term (('+'|'-') term)*
  ExprPtr expr(int n) {
    ExprPtr e = term(n);
    for (;;) {
      if (accept_punct("+"))
        e = make_add(std::move(e), term(n));
      else if (accept_punct("-"))
        e = make_sub(std::move(e), term(n));
      else
        return e;
    }
  }

  // term := unary (('*'|'/') unary)*
  ExprPtr term(int n) {
    ExprPtr e = unary(n);
    for (;;) {
      if (accept_punct("*"))
        e = make_mul(std::move(e), unary(n));
      else if (accept_punct("/"))
        e = make_div(std::move(e), unary(n));
      else
        return e;
    }
  }

  // unary := '-' unary | power;  '^' binds tighter than the minus.
  ExprPtr unary(int n) {
    if (accept_punct("-")) return make_neg(unary(n));
    return power(n);
  }

  ExprPtr power(int n) {
    ExprPtr e = atom(n);
    if (accept_punct("^")) {
      const Token t = lex_.next();
      if (t.kind != Tok::number || !t.is_integer || t.value < 0)
        throw SyntaxError(t.line, t.col, "a nonnegative integer exponent");
      e = make_ipow(std::move(e), static_cast<long long>(t.value));
    }
    return e;
  }

  ExprPtr atom(int n) {
    const Token t = lex_.next();
    last_ = t;
    if (t.kind == Tok::number) return make_const(t.value);
    if (t.kind == Tok::punct && t.text == "(") {
      ExprPtr e = expr(n);
      expect_punct(")");
      return e;
    }
    if (t.kind == Tok::ident) {
      if (t.text.size() >= 2 && t.text[0] == 'x') {
        bool digits = true;
        for (size_t i = 1; i < t.text.size(); ++i)
          if (!std::isdigit(static_cast<unsigned char>(t.text[i]))) digits = false;
        if (digits) {
          const int idx = std::stoi(t.text.substr(1));
          if (idx < 1 || idx > n)
            throw ArityError("variable " + t.text + " outside x1..x" + std::to_string(n));
          return make_var(idx - 1);
        }
      }
      if (t.text == "exp") return make_exp(call1(n));
      if (t.text == "log") return make_log(call1(n));
      if (t.text == "sqrt") return make_sqrt(call1(n));
      if (t.text == "cbrt") return make_cbrt(call1(n));
      if (t.text == "abs") return make_abs(call1(n));
      if (t.text == "bump") return make_bump(call1(n));
      if (t.text == "root") {
        expect_punct("(");
        ExprPtr a = expr(n);
        expect_punct(",");
        const Token q = lex_.next();
        if (q.kind != Tok::number || !q.is_integer || q.value < 2)
          throw SyntaxError(q.line, q.col, "an integer root order >= 2");
        expect_punct(")");
        return make_root(std::move(a), static_cast<int>(q.value));
      }
      if (t.text == "piecewise") {
        expect_punct("(");
        ExprPtr cond = expr(n);
        bool strict;
        const Token cmp = lex_.next();
        if (cmp.kind == Tok::punct && cmp.text == ">=")
          strict = false;
        else if (cmp.kind == Tok::punct && cmp.text == ">")
          strict = true;
        else
          throw SyntaxError(cmp.line, cmp.col, ">= or >");
        const Token zero = lex_.next();
        if (zero.kind != Tok::number || zero.value != 0.0)
          throw SyntaxError(zero.line, zero.col, "the literal 0");
        expect_punct("?");
        ExprPtr a = expr(n);
        expect_punct(":");
        ExprPtr b = expr(n);
        expect_punct(")");
        return make_guard(std::move(cond), strict, std::move(a), std::move(b));
      }
      throw SyntaxError(t.line, t.col, "a variable, function or number");
    }
    throw SyntaxError(t.line, t.col, "an expression");
  }

  ExprPtr call1(int n) {
    expect_punct("(");
    ExprPtr e = expr(n);
    expect_punct(")");
    return e;
  }

  int signed_int() {
    const bool neg = accept_punct("-");
    const int v = expect_int("an integer");
    return neg ? -v : v;
  }

  double signed_number() {
    const bool neg = accept_punct("-");
    const Token t = lex_.next();
    if (t.kind != Tok::number) throw SyntaxError(t.line, t.col, "a number");
    last_ = t;
    return neg ? -t.value : t.value;
  }

  int expect_int(const char* what) {
    const Token t = lex_.next();
    if (t.kind != Tok::number || !t.is_integer)
      throw SyntaxError(t.line, t.col, what);
    last_ = t;
    return static_cast<int>(t.value);
  }

  void expect_ident(const std::string& name) {
    const Token t = lex_.next();
    if (t.kind != Tok::ident || t.text != name)
      throw SyntaxError(t.line, t.col, "'" + name + "'");
    last_ = t;
  }

  void expect_punct(const std::string& p) {
    const Token t = lex_.next();
    if (t.kind != Tok::punct || t.text != p)
      throw SyntaxError(t.line, t.col, "'" + p + "'");
    last_ = t;
  }

  bool accept_punct(const std::string& p) {
    if (lex_.peek().kind == Tok::punct && lex_.peek().text == p) {
      last_ = lex_.next();
      return true;
    }
    return false;
  }

  void expect_eof() {
    const Token& t = lex_.peek();
    if (t.kind != Tok::eof) throw SyntaxError(t.line, t.col, "end of input");
  }

  Lexer lex_;
  Token last_;
};

// Precedence levels for printing: 0 additive, 1 multiplicative, 2 unary,
// 3 power base, 4 atom.
int print_level(const Expr& e) {
  switch (e.kind) {
    case ExprKind::add:
    case ExprKind::sub:
      if (e.kind == ExprKind::sub && e.kids[0]->kind == ExprKind::constant &&
          e.kids[0]->value == 0.0)
        return 2;  // printed as unary minus
      return 0;
    case ExprKind::mul:
    case ExprKind::div:
      return 1;
    case ExprKind::constant:
      return e.value < 0.0 ? 2 : 4;  // negative literals print a leading minus
    case ExprKind::ipow:
      return 3;
    default:
      return 4;
  }
}

void print_expr(const Expr& e, int min_level, std::string& out) {
  const int lv = print_level(e);
  const bool parens = lv < min_level;
  if (parens) out += '(';
  switch (e.kind) {
    case ExprKind::constant:
      out += format_shortest(e.value);
      break;
    case ExprKind::variable:
      out += 'x';
      out += std::to_string(e.var + 1);
      break;
    case ExprKind::add:
      print_expr(*e.kids[0], 0, out);
      out += " + ";
      print_expr(*e.kids[1], 1, out);
      break;
    case ExprKind::sub:
      if (e.kids[0]->kind == ExprKind::constant && e.kids[0]->value == 0.0) {
        out += '-';
        print_expr(*e.kids[1], 2, out);
        break;
      }
      print_expr(*e.kids[0], 0, out);
      out += " - ";
      print_expr(*e.kids[1], 1, out);
      break;
    case ExprKind::mul:
      print_expr(*e.kids[0], 1, out);
      out += '*';
      print_expr(*e.kids[1], 2, out);
      break;
    case ExprKind::div:
      print_expr(*e.kids[0], 1, out);
      out += '/';
      print_expr(*e.kids[1], 2, out);
      break;
    case ExprKind::ipow:
      print_expr(*e.kids[0], 4, out);
      out += '^';
      out += std::to_string(e.exponent);
      break;
    case ExprKind::exp_fn:
      out += "exp(";
      print_expr(*e.kids[0], 0, out);
      out += ')';
      break;
    case ExprKind::log_fn:
      out += "log(";
      print_expr(*e.kids[0], 0, out);
      out += ')';
      break;
    case ExprKind::root:
      if (e.order == 2) {
        out += "sqrt(";
      } else if (e.order == 3) {
        out += "cbrt(";
      } else {
        out += "root(";
        print_expr(*e.kids[0], 0, out);
        out += ", ";
        out += std::to_string(e.order);
        out += ')';
        break;
      }
      print_expr(*e.kids[0], 0, out);
      out += ')';
      break;
    case ExprKind::abs_fn:
      out += "abs(";
      print_expr(*e.kids[0], 0, out);
      out += ')';
      break;
    case ExprKind::bump_fn:
      out += "bump(";
      print_expr(*e.kids[0], 0, out);
      out += ')';
      break;
    case ExprKind::guard:
      out += "piecewise(";
      print_expr(*e.kids[0], 0, out);
      out += e.strict ? " > 0 ? " : " >= 0 ? ";
      print_expr(*e.kids[1], 0, out);
      out += " : ";
      print_expr(*e.kids[2], 0, out);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

std::string component_name(int i, int k) {
  if (k <= 3) {
    const char* names[] = {"u", "v", "w"};
    return names[i];
  }
  return "u" + std::to_string(i + 1);
}

std::string map_block_text(int n, int k, const std::vector<ExprPtr>& comps) {
  std::string out = "map " + std::to_string(n) + " -> " + std::to_string(k) + " {\n";
  for (int i = 0; i < k; ++i) {
    out += "  " + component_name(i, k) + " = ";
    print_expr(*comps[i], 0, out);
    out += ";\n";
  }
  out += "}";
  return out;
}

}  // namespace

MapGerm parse_germ(const std::string& source) { return Parser(source).germ(); }

ConicHomeo parse_homeo(const std::string& source) { return Parser(source).homeo(); }

std::string pretty(const MapGerm& g) {
  if (const auto* ldm = std::get_if<FamilyLdm>(&g.family())) {
    std::string out = "ldm(" + std::to_string(ldm->p) + "," + std::to_string(ldm->q) + "; ";
    for (size_t i = 0; i < ldm->lambda.size(); ++i) {
      if (i) out += ",";
      out += "(" + format_shortest(ldm->lambda[i].first) + "," +
             format_shortest(ldm->lambda[i].second) + ")";
    }
    out += ")";
    return out;
  }
  if (const auto* psi = std::get_if<FamilyPsi>(&g.family()))
    return "psi(" + std::to_string(psi->n) + ")";
  if (const auto* cat = std::get_if<FamilyCatalog>(&g.family()))
    return "catalog(\"" + cat->name + "\")";
  return map_block_text(g.source_dim(), g.target_dim(), g.components());
}

std::string pretty(const ConicHomeo& h) {
  std::string out = "homeo " + std::to_string(h.k) + " {\n  fwd {\n";
  for (int i = 0; i < h.k; ++i) {
    out += "    " + component_name(i, h.k) + " = ";
    print_expr(*h.forward[i], 0, out);
    out += ";\n";
  }
  out += "  }\n  inv {\n";
  for (int i = 0; i < h.k; ++i) {
    out += "    " + component_name(i, h.k) + " = ";
    print_expr(*h.inverse[i], 0, out);
    out += ";\n";
  }
  out += "  }\n  eta = " + format_shortest(h.eta) + ";\n}";
  return out;
}

std::string pretty_expr(const Expr& e) {
  std::string out;
  print_expr(e, 0, out);
  return out;
}

}  // namespace milnorlab
