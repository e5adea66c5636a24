#include "pin/parse.hpp"

#include <cctype>
#include <optional>
#include <sstream>
#include <vector>

namespace pin {

parse_error::parse_error(kind_t k, int line, int column, const std::string& what)
    : std::runtime_error("parse error at " + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + what),
      kind(k), line(line), column(column) {}

namespace {

enum class tok {
  name, zero, tau_kw, nu_kw, bang, query, lparen, rparen, dot, plus, bar,
  lbracket, rbracket, equals, end
};

struct token {
  tok kind;
  std::string text;
  int line, column;
};

struct lexer {
  const std::string& src;
  size_t pos = 0;
  int line = 1, column = 1;

  explicit lexer(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw parse_error(parse_error::kind_t::syntax, line, column, msg);
  }

  void advance() {
    if (src[pos] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++pos;
  }

  token next() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) advance();
    if (pos >= src.size()) return {tok::end, "", line, column};
    int l = line, c = column;
    char ch = src[pos];
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      std::string word;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
        word.push_back(src[pos]);
        advance();
      }
      if (word == "tau") return {tok::tau_kw, word, l, c};
      if (word == "nu") return {tok::nu_kw, word, l, c};
      return {tok::name, word, l, c};
    }
    advance();
    switch (ch) {
      case '0': return {tok::zero, "0", l, c};
      case '!': return {tok::bang, "!", l, c};
      case '?': return {tok::query, "?", l, c};
      case '(': return {tok::lparen, "(", l, c};
      case ')': return {tok::rparen, ")", l, c};
      case '.': return {tok::dot, ".", l, c};
      case '+': return {tok::plus, "+", l, c};
      case '|': return {tok::bar, "|", l, c};
      case '[': return {tok::lbracket, "[", l, c};
      case ']': return {tok::rbracket, "]", l, c};
      case '=': return {tok::equals, "=", l, c};
      default: {
        line = l;
        column = c;
        fail(std::string("unexpected character '") + ch + "'");
      }
    }
  }
};

struct parser {
  std::vector<token> toks;
  size_t at = 0;

  explicit parser(const std::string& text) {
    lexer lex(text);
    for (;;) {
      token t = lex.next();
      toks.push_back(t);
      if (t.kind == tok::end) break;
    }
  }

  const token& peek(size_t ahead = 0) const {
    size_t i = at + ahead;
    return i < toks.size() ? toks[i] : toks.back();
  }
  token take() { return toks[at == toks.size() - 1 ? at : at++]; }

  [[noreturn]] void fail(const token& t, const std::string& msg,
                         parse_error::kind_t k = parse_error::kind_t::syntax) const {
    throw parse_error(k, t.line, t.column, msg);
  }

  token expect(tok kind, const std::string& what) {
    if (peek().kind != kind) fail(peek(), "expected " + what);
    return take();
  }

  name parse_name() {
    token t = expect(tok::name, "a name");
    return name(t.text);
  }

  bool starts_prefix() const {
    return peek().kind == tok::name || peek().kind == tok::tau_kw || peek().kind == tok::lbracket;
  }

  prefix parse_prefix() {
    if (peek().kind == tok::lbracket) {
      take();
      name l = parse_name();
      expect(tok::equals, "'='");
      name r = parse_name();
      expect(tok::rbracket, "']'");
      prefix inner = parse_prefix();
      inner.guards.insert(inner.guards.begin(), match_guard{std::move(l), std::move(r)});
      return inner;
    }
    if (peek().kind == tok::tau_kw) {
      take();
      return prefix{{}, tau_core{}};
    }
    name channel = parse_name();
    if (peek().kind == tok::bang) {
      take();
      name datum = parse_name();
      return prefix{{}, output_core{std::move(channel), std::move(datum)}};
    }
    if (peek().kind == tok::query) {
      take();
      expect(tok::lparen, "'(' after '?'");
      name binder = parse_name();
      expect(tok::rparen, "')'");
      return prefix{{}, input_core{std::move(channel), std::move(binder)}};
    }
    fail(peek(), "expected '!' or '?(' after channel name");
  }

  proc parse_atom() {
    const token& t = peek();
    switch (t.kind) {
      case tok::zero:
        take();
        return make_nil();
      case tok::lparen: {
        if (peek(1).kind == tok::nu_kw) {
          take(); // (
          take(); // nu
          name binder = parse_name();
          expect(tok::rparen, "')' closing '(nu ...'");
          return make_nu(std::move(binder), parse_atom());
        }
        take();
        proc inner = parse_proc();
        expect(tok::rparen, "')'");
        return inner;
      }
      case tok::bang:
        take();
        return make_bang(parse_atom());
      default: {
        if (!starts_prefix()) fail(t, "expected a process");
        prefix pfx = parse_prefix();
        if (peek().kind == tok::dot) {
          take();
          return make_prefixed(std::move(pfx), parse_atom());
        }
        // Trailing .0 elided.
        return make_prefixed(std::move(pfx), make_nil());
      }
    }
  }

  proc parse_proc() {
    token first_tok = peek();
    proc first = parse_atom();
    if (peek().kind == tok::plus) {
      if (!is_summation(first))
        fail(first_tok, "sum operands must be 0 or prefix-guarded terms",
             parse_error::kind_t::sum_grammar);
      proc acc = first;
      while (peek().kind == tok::plus) {
        take();
        token operand_tok = peek();
        proc rhs = parse_atom();
        if (!is_summation(rhs))
          fail(operand_tok, "sum operands must be 0 or prefix-guarded terms",
               parse_error::kind_t::sum_grammar);
        acc = make_sum(std::move(acc), std::move(rhs));
      }
      if (peek().kind == tok::bar)
        fail(peek(), "'+' and '|' mix at the same level; parenthesize");
      return acc;
    }
    if (peek().kind == tok::bar) {
      proc acc = first;
      while (peek().kind == tok::bar) {
        take();
        acc = make_par(std::move(acc), parse_atom());
      }
      if (peek().kind == tok::plus)
        fail(peek(), "'+' and '|' mix at the same level; parenthesize");
      return acc;
    }
    return first;
  }
};

} // namespace

proc parse_process(const std::string& text) {
  parser p(text);
  proc result = p.parse_proc();
  if (p.peek().kind != tok::end) p.fail(p.peek(), "trailing input after process");
  return result;
}

} // namespace pin
