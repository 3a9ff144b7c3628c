#pragma once

#include <string_view>

#include "enforcemint/combinators.hpp"
#include "enforcemint/property.hpp"

namespace enforcemint {

// Parses the property DSL. Combinator forms (BE, CND, BME, ...) are expanded
// on the fly and therefore need an environment; without one they are a
// syntax error. Throws ParseError with a line/column position, or SynthError
// (AlphabetMismatch) when a combinator names an event outside the environment.
Global parse_property(std::string_view text, const CombinatorEnv* env = nullptr);
Local parse_local(std::string_view text, const CombinatorEnv* env = nullptr);

}  // namespace enforcemint
