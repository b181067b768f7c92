#pragma once

// Line-oriented text serialization of PolyMap and NormalFormResult.
// Coefficients are printed with %.17g, so the round trip is value-exact.

#include <iosfwd>
#include <string>

#include "fatou/normal_form.hpp"
#include "fatou/poly.hpp"

namespace fatou {

void write_polymap(std::ostream& os, const PolyMap& m, const std::string& name);
PolyMap read_polymap(std::istream& is, std::string* name_out = nullptr);

void write_normal_form(std::ostream& os, const NormalFormResult& nf);
NormalFormResult read_normal_form(std::istream& is);

std::string polymap_to_string(const PolyMap& m, const std::string& name);
PolyMap polymap_from_string(const std::string& text);

}  // namespace fatou
