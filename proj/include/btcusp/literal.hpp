#pragma once

// Text forms shared by the CLI and the JSON output.
//
//   series   "1+t+t^3", "p^-2+1", "[x+1]*t^2", "1+p+O(p^4)"
//   vertex   "(n; series)"
//   end      "up", "rat(p, s)", "trunc(series, N)"
//   matrix   "[[a,b],[c,d]]"
//
// t is the global coordinate 1/pi and p the uniformizer pi; both may appear
// in one literal. Integer coefficients are reduced mod the characteristic;
// bracketed coefficients are polynomials in the field generator x.

#include <string_view>

#include "btcusp/autom.hpp"
#include "btcusp/poly.hpp"

namespace btcusp {

Series parse_series(const FieldPtr& f, std::string_view text);
TPoly parse_tpoly(const FieldPtr& f, std::string_view text);
Vertex parse_vertex(const FieldPtr& f, std::string_view text);
End parse_end(const FieldPtr& f, std::string_view text);
TreeAutomorphism parse_matrix(const FieldPtr& f, std::string_view text);

}  // namespace btcusp
