#pragma once

#include <string>

namespace nfbeam {

/// Shortest round-trip decimal form; infinities print as "inf" / "-inf".
std::string format_double(double value);

}  // namespace nfbeam
