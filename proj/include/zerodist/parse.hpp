#pragma once

#include <filesystem>
#include <string_view>

#include "zerodist/basis.hpp"

namespace zerodist {

// Basis files hold one expression per line. Grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := factor (('*')? factor)*        juxtaposition multiplies
//   factor  := unary ('^' integer)?
//   unary   := '-' unary | primary
//   primary := number ['i'] | 'i' | 'z' | 'exp' '(' expr ')' | '(' expr ')'
//
// Blank lines and lines starting with '#' are skipped. Failures throw
// ErrorKind::parse_error with "line L, column C" in the message.
Expr parse_expression(std::string_view text, int line = 1);
BasisSystem parse_basis(std::string_view text);
BasisSystem load_basis(const std::filesystem::path& path);

}  // namespace zerodist
