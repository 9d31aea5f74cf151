#pragma once

#include <string>

namespace dnls {

// Floating-point formatting for every emitted data file: 15 significant
// digits, shortest form, locale-independent. Keeping one formatter makes
// repeated runs byte-identical.
std::string g15(double value);

} // namespace dnls
