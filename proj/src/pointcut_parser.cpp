#include <cctype>

#include "aspectlab/error.hpp"
#include "aspectlab/pointcut.hpp"

namespace aspectlab {

namespace {

enum class Tok { kIdent, kDotDot, kDot, kPlus, kLParen, kRParen, kComma, kAnd, kOr, kNot, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int pos;
};

const char* describe(Tok t) {
  switch (t) {
    case Tok::kIdent: return "identifier";
    case Tok::kDotDot: return "'..'";
    case Tok::kDot: return "'.'";
    case Tok::kPlus: return "'+'";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
    case Tok::kComma: return "','";
    case Tok::kAnd: return "'&&'";
    case Tok::kOr: return "'||'";
    case Tok::kNot: return "'!'";
    case Tok::kEnd: return "end of input";
  }
  return "?";
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '*';
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    int pos = static_cast<int>(i);
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (ident_char(c)) {
      std::size_t start = i;
      while (i < text.size() && ident_char(text[i])) ++i;
      out.push_back({Tok::kIdent, std::string(text.substr(start, i - start)), pos});
    } else if (text.substr(i, 2) == "..") {
      out.push_back({Tok::kDotDot, "..", pos});
      i += 2;
    } else if (text.substr(i, 2) == "&&") {
      out.push_back({Tok::kAnd, "&&", pos});
      i += 2;
    } else if (text.substr(i, 2) == "||") {
      out.push_back({Tok::kOr, "||", pos});
      i += 2;
    } else {
      Tok kind;
      switch (c) {
        case '.': kind = Tok::kDot; break;
        case '+': kind = Tok::kPlus; break;
        case '(': kind = Tok::kLParen; break;
        case ')': kind = Tok::kRParen; break;
        case ',': kind = Tok::kComma; break;
        case '!': kind = Tok::kNot; break;
        default:
          throw Error(ErrorCode::kSyntax, std::string("unexpected character '") + c + "'", 0, pos);
      }
      out.push_back({kind, std::string(1, c), pos});
      ++i;
    }
  }
  out.push_back({Tok::kEnd, "", static_cast<int>(text.size())});
  return out;
}

bool is_primitive_keyword(std::string_view s) {
  return s == "call" || s == "execution" || s == "within" || s == "withincode" || s == "this" ||
         s == "target" || s == "cflow";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  PointcutExpr parse() {
    PointcutExpr e = parse_or();
    if (peek().kind != Tok::kEnd) fail({Tok::kAnd, Tok::kOr, Tok::kEnd});
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_ + 1 < tokens_.size() ? pos_++ : pos_]; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    advance();
    return true;
  }

  [[noreturn]] void fail(std::initializer_list<Tok> expected) const {
    std::string msg = "expected ";
    bool first = true;
    for (Tok t : expected) {
      msg += first ? "" : " or ";
      msg += describe(t);
      first = false;
    }
    msg += peek().kind == Tok::kEnd ? ", found end of input" : ", found '" + peek().text + "'";
    throw Error(ErrorCode::kSyntax, msg, 0, peek().pos);
  }

  void expect(Tok kind) {
    if (!accept(kind)) fail({kind});
  }

  PointcutExpr parse_or() {
    PointcutExpr left = parse_and();
    while (accept(Tok::kOr)) left = PointcutExpr::make_or(std::move(left), parse_and());
    return left;
  }

  PointcutExpr parse_and() {
    PointcutExpr left = parse_unary();
    while (accept(Tok::kAnd)) left = PointcutExpr::make_and(std::move(left), parse_unary());
    return left;
  }

  PointcutExpr parse_unary() {
    if (accept(Tok::kNot)) return PointcutExpr::make_not(parse_unary());
    return parse_primary();
  }

  PointcutExpr parse_primary() {
    if (accept(Tok::kLParen)) {
      PointcutExpr inner = parse_or();
      expect(Tok::kRParen);
      return inner;
    }
    if (peek().kind != Tok::kIdent) fail({Tok::kNot, Tok::kLParen, Tok::kIdent});
    Token head = advance();
    expect(Tok::kLParen);
    if (!is_primitive_keyword(head.text)) {
      if (head.text.find('*') != std::string::npos) {
        throw Error(ErrorCode::kSyntax, "pointcut name cannot contain '*'", 0, head.pos);
      }
      std::vector<std::string> args;
      if (!accept(Tok::kRParen)) {
        do {
          if (peek().kind != Tok::kIdent) fail({Tok::kIdent});
          args.push_back(advance().text);
        } while (accept(Tok::kComma));
        expect(Tok::kRParen);
      }
      return PointcutExpr::make_named(head.text, std::move(args));
    }
    PrimitivePointcut prim;
    if (head.text == "call" || head.text == "execution" || head.text == "withincode") {
      prim.kind = head.text == "call"        ? PrimKind::kCall
                  : head.text == "execution" ? PrimKind::kExecution
                                             : PrimKind::kWithincode;
      prim.method = parse_method_pattern();
    } else if (head.text == "cflow") {
      prim.kind = PrimKind::kCflow;
      prim.inner.push_back(parse_or());
    } else {
      prim.kind = head.text == "within" ? PrimKind::kWithin
                  : head.text == "this" ? PrimKind::kThis
                                        : PrimKind::kTarget;
      prim.type = parse_type_pattern();
    }
    expect(Tok::kRParen);
    return PointcutExpr::make_prim(std::move(prim));
  }

  TypePattern parse_type_pattern() {
    TypePattern p;
    if (peek().kind != Tok::kIdent) fail({Tok::kIdent});
    p.segments.push_back(advance().text);
    while (peek().kind == Tok::kDot || peek().kind == Tok::kDotDot) {
      if (advance().kind == Tok::kDotDot) p.segments.emplace_back(TypePattern::kAnyPackages);
      if (peek().kind != Tok::kIdent) fail({Tok::kIdent});
      p.segments.push_back(advance().text);
    }
    if (accept(Tok::kPlus)) p.subtypes = true;
    return p;
  }

  MethodPattern parse_method_pattern() {
    MethodPattern m;
    m.return_type = parse_type_pattern();
    // Declaring type and method name: segments separated by '.'/'..', an
    // optional '+' closing the declaring type, name after the final '.'.
    std::vector<std::string> segs;
    bool plus = false;
    if (peek().kind != Tok::kIdent) fail({Tok::kIdent});
    segs.push_back(advance().text);
    while (true) {
      if (!plus && peek().kind == Tok::kPlus) {
        advance();
        plus = true;
        if (peek().kind != Tok::kDot) fail({Tok::kDot});
        continue;
      }
      if (peek().kind == Tok::kDot || (!plus && peek().kind == Tok::kDotDot)) {
        bool dotdot = advance().kind == Tok::kDotDot;
        if (peek().kind != Tok::kIdent) fail({Tok::kIdent});
        if (dotdot) segs.emplace_back(TypePattern::kAnyPackages);
        segs.push_back(advance().text);
        if (plus) break;
        continue;
      }
      break;
    }
    if (segs.size() < 2 || segs[segs.size() - 2] == TypePattern::kAnyPackages) {
      fail({Tok::kDot});
    }
    m.name.text = segs.back();
    segs.pop_back();
    m.declaring_type.segments = std::move(segs);
    m.declaring_type.subtypes = plus;
    m.params = parse_params();
    return m;
  }

  // A missing parameter list, as in `call(* Class+.*)`, means any parameters.
  ParamPattern parse_params() {
    ParamPattern p;
    if (peek().kind != Tok::kLParen) return p;
    advance();
    if (accept(Tok::kRParen)) {
      p.kind = ParamPattern::Kind::kEmpty;
      return p;
    }
    if (accept(Tok::kDotDot)) {
      expect(Tok::kRParen);
      p.kind = ParamPattern::Kind::kAny;
      return p;
    }
    p.kind = ParamPattern::Kind::kArity;
    do {
      parse_type_pattern();
      ++p.arity;
    } while (accept(Tok::kComma));
    expect(Tok::kRParen);
    return p;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

PointcutExpr parse_pointcut(std::string_view text) { return Parser(lex(text)).parse(); }

}  // namespace aspectlab
