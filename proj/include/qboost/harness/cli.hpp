#pragma once

#include <iostream>

namespace qboost::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitCap = 3;

/// qboost {run|compare|hoeffding|povm-demo|validate-config} --config PATH
///        [--seed INT] [--out DIR] [--quiet]
int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
             std::ostream& err = std::cerr);

}  // namespace qboost::harness
