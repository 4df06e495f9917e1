#pragma once

// Basis orderings of the two decoherence-free subspaces. Every DFS-level
// matrix in the library (target Hamiltonians, counterdiabatic terms, dark
// states) uses these positions.

#include <cstddef>

#include "hqc/qcore.hpp"

namespace hqc {

namespace c1 {
// {|a1>, |0>_L, |1>_L, |a2>}
inline constexpr std::size_t a1 = 0;
inline constexpr std::size_t zero = 1;
inline constexpr std::size_t one = 2;
inline constexpr std::size_t a2 = 3;
inline constexpr std::size_t dim = 4;
}  // namespace c1

namespace c2 {
// {|a3>, |00>_L, |01>_L, |10>_L, |11>_L, |a4>}
inline constexpr std::size_t a3 = 0;
inline constexpr std::size_t l00 = 1;
inline constexpr std::size_t l01 = 2;
inline constexpr std::size_t l10 = 3;
inline constexpr std::size_t l11 = 4;
inline constexpr std::size_t a4 = 5;
inline constexpr std::size_t dim = 6;
}  // namespace c2

inline HilbertLayout c1_layout() { return HilbertLayout::single("C1", c1::dim); }
inline HilbertLayout c2_layout() { return HilbertLayout::single("C2", c2::dim); }

}  // namespace hqc
