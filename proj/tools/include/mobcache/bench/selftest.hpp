#pragma once

#include <iosfwd>

namespace mobcache::bench {

/// Compact oracle suites (enumeration, brute force, KKT projection checks)
/// printing one pass/fail line per suite. Returns the number of failing
/// suites.
int run_selftest(std::ostream& out);

}  // namespace mobcache::bench
