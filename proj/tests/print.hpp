#pragma once

#include <ostream>

#include "nahm/series.hpp"

namespace nahm {

// Readable gtest failure output.
inline void PrintTo(const QSeries& s, std::ostream* os) { *os << '\n' << dump(s); }

}  // namespace nahm
