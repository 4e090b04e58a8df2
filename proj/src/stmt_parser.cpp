#include "stmt_parser.hpp"

#include <cctype>

namespace aspectlab::detail {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

int indent_of(std::string_view line) {
  int n = 0;
  for (char c : line) {
    if (c != ' ') break;
    ++n;
  }
  return n;
}

int brace_delta(std::string_view line) {
  int d = 0;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') quoted = !quoted;
    if (quoted) continue;
    if (c == '{') ++d;
    if (c == '}') --d;
  }
  return d;
}

namespace {

enum class Tok { kWord, kLBrace, kRBrace, kSemi, kLParen, kRParen, kComma, kNewline, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int line;
};

std::vector<Token> lex(std::string_view text, int first_line) {
  std::vector<Token> out;
  int line = first_line;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      out.push_back({Tok::kNewline, "\n", line});
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Tok single = Tok::kEnd;
    switch (c) {
      case '{': single = Tok::kLBrace; break;
      case '}': single = Tok::kRBrace; break;
      case ';': single = Tok::kSemi; break;
      case '(': single = Tok::kLParen; break;
      case ')': single = Tok::kRParen; break;
      case ',': single = Tok::kComma; break;
      default: break;
    }
    if (single != Tok::kEnd) {
      out.push_back({single, std::string(1, c), line});
      ++i;
      continue;
    }
    if (c == '"') {
      auto close = text.find('"', i + 1);
      if (close == std::string_view::npos) throw Error(ErrorCode::kSyntax, "unterminated string", line);
      out.push_back({Tok::kWord, std::string(text.substr(i + 1, close - i - 1)), line});
      i = close + 1;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) &&
           std::string_view("{};(),\"").find(text[i]) == std::string_view::npos) {
      ++i;
    }
    out.push_back({Tok::kWord, std::string(text.substr(start, i - start)), line});
  }
  out.push_back({Tok::kEnd, "", line});
  return out;
}

class StmtParser {
 public:
  StmtParser(std::vector<Token> tokens, const StmtParseOptions& options)
      : tokens_(std::move(tokens)), options_(options) {}

  Body parse_all() {
    Body body = parse_block(false);
    if (peek().kind != Tok::kEnd) fail("unexpected '" + peek().text + "'");
    return body;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::kSyntax, message, peek().line);
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what + ", found '" + peek().text + "'");
    next();
  }

  std::string word(const char* what) {
    if (peek().kind != Tok::kWord) fail(std::string("expected ") + what);
    return next().text;
  }

  void skip_separators() {
    while (peek().kind == Tok::kSemi || peek().kind == Tok::kNewline) next();
  }

  Body parse_block(bool braced) {
    Body body;
    skip_separators();
    while (peek().kind != Tok::kEnd && !(braced && peek().kind == Tok::kRBrace)) {
      body.push_back(parse_stmt());
      if (peek().kind == Tok::kSemi || peek().kind == Tok::kNewline) {
        skip_separators();
      } else if (peek().kind != Tok::kEnd && !(braced && peek().kind == Tok::kRBrace)) {
        fail("expected ';' or newline between statements, found '" + peek().text + "'");
      }
    }
    return body;
  }

  Body parse_braced() {
    expect(Tok::kLBrace, "'{'");
    Body body = parse_block(true);
    expect(Tok::kRBrace, "'}'");
    return body;
  }

  Stmt parse_stmt() {
    std::string kw = word("statement");
    if (kw == "emit") return Stmt::emit(word("emit label"));
    if (kw == "new") {
      std::string var = word("variable");
      return Stmt::make_new(var, word("class name"));
    }
    if (kw == "proceed") {
      if (!options_.allow_proceed) fail("proceed is only allowed in around advice");
      if (peek().kind == Tok::kLParen) {
        next();
        expect(Tok::kRParen, "')'");
      }
      return Stmt::proceed();
    }
    if (kw == "supercall") {
      if (!options_.allow_supercall) fail(options_.supercall_message);
      std::string name = word("method name");
      expect(Tok::kLParen, "'('");
      expect(Tok::kRParen, "')'");
      return Stmt::super_call(name);
    }
    if (kw == "call") {
      Receiver recv;
      std::string target = word("call target");
      if (target == "new") {
        recv.kind = Receiver::Kind::kNew;
        target = word("class.method");
      }
      auto dot = target.rfind('.');
      if (dot == std::string::npos || dot == 0 || dot + 1 == target.size()) {
        fail("expected <receiver>.<method> in call");
      }
      std::string head = target.substr(0, dot);
      std::string method = target.substr(dot + 1);
      if (recv.kind != Receiver::Kind::kNew) {
        recv.kind = head == "this" ? Receiver::Kind::kThis : Receiver::Kind::kVariable;
      }
      if (recv.kind != Receiver::Kind::kThis) recv.name = head;
      expect(Tok::kLParen, "'('");
      int count = 0;
      if (peek().kind == Tok::kWord) {
        const std::string& n = next().text;
        try {
          std::size_t used = 0;
          count = std::stoi(n, &used);
          if (used != n.size() || count < 0) throw std::invalid_argument(n);
        } catch (const std::exception&) {
          fail("argument count must be a nonnegative integer");
        }
      }
      expect(Tok::kRParen, "')'");
      return Stmt::call(recv, method, count);
    }
    if (kw == "if") {
      if (word("istype") != "istype") fail("expected istype(...) condition");
      expect(Tok::kLParen, "'('");
      std::string var = word("variable");
      expect(Tok::kComma, "','");
      std::string type = word("type name");
      expect(Tok::kRParen, "')'");
      Body then_body = parse_braced();
      Body else_body;
      std::size_t save = pos_;
      while (peek().kind == Tok::kNewline) next();
      if (peek().kind == Tok::kWord && peek().text == "else") {
        next();
        else_body = parse_braced();
      } else {
        pos_ = save;
      }
      return Stmt::if_type(var, type, std::move(then_body), std::move(else_body));
    }
    --pos_;
    fail("unknown statement '" + kw + "'");
  }

  std::vector<Token> tokens_;
  StmtParseOptions options_;
  std::size_t pos_ = 0;
};

}  // namespace

Body parse_statements(std::string_view text, int first_line, const StmtParseOptions& options) {
  StmtParser parser(lex(text, first_line), options);
  Body body = parser.parse_all();
  number_branches(body);
  return body;
}

}  // namespace aspectlab::detail
