#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "aspectlab/model.hpp"

namespace aspectlab::detail {

struct StmtParseOptions {
  bool allow_proceed = false;
  bool allow_supercall = true;
  // Message used when a supercall appears where it is not allowed.
  std::string supercall_message;
};

/// Parses statements separated by `;` or newlines. `first_line` is the
/// file line of the first character of `text`. Type names are left as written.
Body parse_statements(std::string_view text, int first_line, const StmtParseOptions& options = {});

/// Count of brace depth change in `line` (for gathering multi-line bodies).
int brace_delta(std::string_view line);

std::string_view trim(std::string_view s);
std::vector<std::string> split_words(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string strip_comment(std::string_view line);
int indent_of(std::string_view line);

/// Applies `fn` to every statement, depth first, including nested branches.
template <typename Fn>
void for_each_stmt(Body& body, Fn&& fn) {
  for (auto& s : body) {
    fn(s);
    for_each_stmt(s.then_body, fn);
    for_each_stmt(s.else_body, fn);
  }
}

template <typename Fn>
void for_each_stmt(const Body& body, Fn&& fn) {
  for (const auto& s : body) {
    fn(s);
    for_each_stmt(s.then_body, fn);
    for_each_stmt(s.else_body, fn);
  }
}

}  // namespace aspectlab::detail
