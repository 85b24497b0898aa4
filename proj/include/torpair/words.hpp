#pragma once

// Minimal generator-word grammar for specifying unitaries and elements on
// the command line: identifiers, integer powers, products, adjoint suffix '.
//   word   := factor ( '*' factor )*
//   factor := ident postfix*
//   postfix:= '\'' | '^' integer
// "1" names the unit. Negative powers use the adjoint (generators in these
// models are unitaries).

#include <string>

#include "torpair/graded.hpp"

namespace torpair {

GradedElement parse_word(const ModelPtr& model, const std::string& src);

}  // namespace torpair
