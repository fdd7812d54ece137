#include "pmd/dsl/parser.hpp"

#include <cctype>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace pmd::dsl {
namespace {

enum class TokenKind { kIdent, kVariable, kNumber, kPunct, kUnsupported, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
  SourceLocation where;
};

std::string describe(const Token& tok) {
  switch (tok.kind) {
    case TokenKind::kEnd: return "end of input";
    case TokenKind::kNumber: return "number '" + tok.text + "'";
    case TokenKind::kVariable: return "variable '" + tok.text + "'";
    case TokenKind::kIdent: return "identifier '" + tok.text + "'";
    default: return "'" + tok.text + "'";
  }
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space_and_comments();
      Token tok;
      tok.where = {line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back(tok);
        return out;
      }
      const char c = src_[pos_];
      if (std::islower(static_cast<unsigned char>(c))) {
        tok.kind = TokenKind::kIdent;
        tok.text = take_while(is_ident_char);
      } else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
        tok.kind = TokenKind::kVariable;
        tok.text = take_while(is_ident_char);
      } else if (is_digit(c)) {
        tok.kind = TokenKind::kNumber;
        tok.text = lex_number();
      } else {
        lex_punct(tok);
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  template <class Pred>
  std::string take_while(Pred pred) {
    std::string out;
    while (pos_ < src_.size() && pred(src_[pos_])) {
      out += src_[pos_];
      advance();
    }
    return out;
  }

  std::string take_digits() { return take_while(is_digit); }

  // digits [. digits] [/ digits [. digits]]; a '.' not followed by a digit
  // terminates the clause instead.
  std::string lex_number() {
    std::string out = take_digits();
    if (peek() == '.' && is_digit(peek(1))) {
      advance();
      out += '.' + take_digits();
    }
    if (peek() == '/' && is_digit(peek(1))) {
      advance();
      out += '/' + take_digits();
      if (peek() == '.' && is_digit(peek(1))) {
        advance();
        out += '.' + take_digits();
      }
    }
    return out;
  }

  void lex_punct(Token& tok) {
    static constexpr std::string_view kTwoChar[] = {":-", "::", "=<", ">=",
                                                    "\\+", "\\=", "->", "=="};
    static constexpr std::string_view kSupported = ":- :: =< >= \\+";
    for (auto op : kTwoChar) {
      if (src_.substr(pos_, 2) == op) {
        tok.text = std::string(op);
        tok.kind = kSupported.find(op) != std::string_view::npos
                       ? TokenKind::kPunct
                       : TokenKind::kUnsupported;
        advance();
        advance();
        return;
      }
    }
    const char c = src_[pos_];
    tok.text = std::string(1, c);
    switch (c) {
      case '<': case '>': case ',': case ';': case '.':
      case '(': case ')': case '~': case '-':
        tok.kind = TokenKind::kPunct;
        break;
      default:
        tok.kind = TokenKind::kUnsupported;
        break;
    }
    advance();
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::optional<CompareOp> compare_op(const Token& tok) {
  if (tok.kind != TokenKind::kPunct) return std::nullopt;
  if (tok.text == "<") return CompareOp::kLess;
  if (tok.text == "=<") return CompareOp::kLessEq;
  if (tok.text == ">") return CompareOp::kGreater;
  if (tok.text == ">=") return CompareOp::kGreaterEq;
  return std::nullopt;
}

// `5 < d` reads as `d > 5`.
CompareOp mirror(CompareOp op) {
  switch (op) {
    case CompareOp::kLess: return CompareOp::kGreater;
    case CompareOp::kLessEq: return CompareOp::kGreaterEq;
    case CompareOp::kGreater: return CompareOp::kLess;
    case CompareOp::kGreaterEq: return CompareOp::kLessEq;
  }
  return op;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Program run() {
    Program program;
    while (cur().kind != TokenKind::kEnd) {
      program.locations.push_back(cur().where);
      program.clauses.push_back(clause());
    }
    return program;
  }

  Atom single_atom() {
    Atom a = atom();
    if (at(".")) next();
    if (cur().kind != TokenKind::kEnd) fail({"end of input"});
    return a;
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t n) const {
    return toks_[std::min(pos_ + n, toks_.size() - 1)];
  }
  void next() {
    if (pos_ + 1 < toks_.size()) ++pos_;
  }

  bool at(std::string_view punct) const {
    return cur().kind == TokenKind::kPunct && cur().text == punct;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& tok = cur();
    std::ostringstream msg;
    msg << "line " << tok.where.line << ", column " << tok.where.column << ": ";
    if (tok.kind == TokenKind::kUnsupported) {
      msg << "unsupported syntax '" << tok.text << "'";
    } else {
      msg << "unexpected " << describe(tok);
    }
    msg << "; expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) msg << (i + 1 == expected.size() ? " or " : ", ");
      msg << expected[i];
    }
    throw SyntaxError(tok.where, std::move(expected), msg.str());
  }

  [[noreturn]] void fail_unsupported(const std::string& what) const {
    const Token& tok = cur();
    std::ostringstream msg;
    msg << "line " << tok.where.line << ", column " << tok.where.column
        << ": " << what << " is not supported";
    throw SyntaxError(tok.where, {}, msg.str());
  }

  void expect(std::string_view punct) {
    if (!at(punct)) fail({"'" + std::string(punct) + "'"});
    next();
  }

  Clause clause() {
    if (cur().kind == TokenKind::kNumber) return probabilistic_clause();
    Atom head = atom();
    if (at("~")) {
      next();
      DistributionalFact fact{std::move(head), distribution(), {}};
      if (at(":-")) {
        next();
        fact.body = body();
      }
      expect(".");
      return fact;
    }
    Rule rule{std::move(head), {}};
    if (at(":-")) {
      next();
      rule.body = body();
    } else if (!at(".")) {
      fail({"':-'", "'~'", "'.'"});
    }
    expect(".");
    return rule;
  }

  Clause probabilistic_clause() {
    std::vector<Alternative> alts;
    for (;;) {
      Rational p = number();
      expect("::");
      alts.push_back({p, atom()});
      if (!at(";")) break;
      next();
    }
    if (at(":-")) fail_unsupported("a probabilistic clause with a body");
    if (!at(".")) fail({"';'", "'.'"});
    next();
    if (alts.size() == 1) {
      return BernoulliFact{alts.front().probability, std::move(alts.front().head)};
    }
    return AnnotatedDisjunction{std::move(alts)};
  }

  Rational number() {
    bool negative = false;
    if (at("-")) {
      negative = true;
      next();
    }
    if (cur().kind != TokenKind::kNumber) fail({"number"});
    Rational value;
    try {
      value = Rational::parse(cur().text);
    } catch (const std::exception& e) {
      fail({std::string("number (") + e.what() + ")"});
    }
    next();
    return negative ? -value : value;
  }

  Atom atom() {
    if (cur().kind != TokenKind::kIdent) {
      if (at("!")) fail_unsupported("cut '!'");
      if (at("[")) fail_unsupported("list syntax");
      if (at("(")) fail_unsupported("a parenthesized body");
      fail({"atom"});
    }
    check_reserved();
    Atom a{cur().text, {}};
    next();
    if (at("(")) {
      next();
      for (;;) {
        a.args.push_back(term());
        if (at(")")) break;
        if (!at(",")) fail({"','", "')'"});
        next();
      }
      next();
    }
    return a;
  }

  void check_reserved() const {
    const std::string& name = cur().text;
    if (name == "is" || name == "findall" || name == "bagof" ||
        name == "setof" || name == "assert" || name == "retract") {
      fail_unsupported("built-in '" + name + "'");
    }
  }

  Term term() {
    switch (cur().kind) {
      case TokenKind::kVariable: {
        Variable v{cur().text};
        next();
        return v;
      }
      case TokenKind::kIdent: {
        Symbol s{cur().text};
        next();
        if (at("(")) fail_unsupported("compound term '" + s.name + "(...)'");
        return s;
      }
      case TokenKind::kNumber:
        return number();
      default:
        if (at("-") && ahead(1).kind == TokenKind::kNumber) return number();
        if (at("[")) fail_unsupported("list syntax");
        fail({"variable", "constant", "number"});
    }
  }

  Distribution distribution() {
    if (cur().kind != TokenKind::kIdent) fail({"distribution"});
    Distribution dist{cur().text, {}};
    next();
    expect("(");
    for (;;) {
      dist.params.push_back(number());
      if (at(")")) break;
      if (!at(",")) fail({"','", "')'"});
      next();
    }
    next();
    return dist;
  }

  Body body() {
    Body out;
    for (;;) {
      out.push_back(conjunction());
      if (!at(";")) break;
      next();
    }
    return out;
  }

  Conjunction conjunction() {
    Conjunction out;
    for (;;) {
      out.push_back(literal());
      if (!at(",")) break;
      next();
    }
    if (cur().kind == TokenKind::kUnsupported) {
      fail_unsupported("operator '" + cur().text + "'");
    }
    return out;
  }

  Literal literal() {
    if (at("\\+")) {
      next();
      return Literal::negative(atom());
    }
    if (cur().kind == TokenKind::kIdent && cur().text == "not" &&
        (ahead(1).kind == TokenKind::kIdent || (ahead(1).text == "(" &&
                                                ahead(1).kind == TokenKind::kPunct))) {
      next();
      if (at("(")) {
        next();
        Atom a = atom();
        expect(")");
        return Literal::negative(std::move(a));
      }
      return Literal::negative(atom());
    }
    if (cur().kind == TokenKind::kNumber || at("-")) {
      Rational threshold = number();
      auto op = compare_op(cur());
      if (!op) fail({"'<'", "'>'", "'=<'", "'>='"});
      next();
      return Literal::compare(atom(), mirror(*op), threshold);
    }
    Atom a = atom();
    if (auto op = compare_op(cur())) {
      next();
      return Literal::compare(std::move(a), *op, number());
    }
    return Literal::positive(std::move(a));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

SyntaxError::SyntaxError(SourceLocation where, std::vector<std::string> expected,
                         const std::string& message)
    : Error(ErrorCode::kSyntaxError, message),
      where_(where),
      expected_(std::move(expected)) {}

Program parse(std::string_view source) {
  return Parser(Lexer(source).run()).run();
}

Atom parse_atom(std::string_view source) {
  return Parser(Lexer(source).run()).single_atom();
}

}  // namespace pmd::dsl
