#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

namespace slowfast {

/// Opaque, totally ordered label of a component space E_i.
struct Index {
  std::int64_t value = 0;

  constexpr Index() = default;
  constexpr explicit Index(std::int64_t v) : value(v) {}

  friend constexpr auto operator<=>(const Index&, const Index&) = default;
};

/// The cemetery index returned when projecting the absorbed state.
inline constexpr Index kCemeteryIndex{std::numeric_limits<std::int64_t>::min()};

inline std::ostream& operator<<(std::ostream& os, Index i) {
  if (i == kCemeteryIndex) return os << "cemetery";
  return os << i.value;
}

/// Position (i, x) of the full process. The point encoding is model-defined:
/// a finite-state label, a real vector or a tuple of such, flattened to doubles.
struct State {
  Index index;
  std::vector<double> point;

  State() = default;
  State(Index i, std::vector<double> x) : index(i), point(std::move(x)) {}

  static State absorbed() { return State{kCemeteryIndex, {}}; }
  bool is_absorbed() const { return index == kCemeteryIndex; }

  friend bool operator==(const State&, const State&) = default;
};

/// Total projection onto the index set; the absorbed state maps to the cemetery index.
inline Index project_index(const State& s) { return s.index; }

}  // namespace slowfast

template <>
struct std::hash<slowfast::Index> {
  std::size_t operator()(const slowfast::Index& i) const noexcept {
    return std::hash<std::int64_t>{}(i.value);
  }
};
