#pragma once

#include <string>

namespace fokker {

/// Round-trip decimal rendering (17 significant digits) used by every
/// table and CSV writer, so reruns are byte-identical.
std::string fmt_real(double v);

}  // namespace fokker
