#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>

namespace normsim {

struct Position {
  int row = 0;
  int col = 0;
  auto operator<=>(const Position&) const = default;
};

enum class Heading : std::uint8_t { North, South, East, West };

constexpr std::array<Heading, 4> kAllHeadings = {Heading::North, Heading::South,
                                                Heading::East, Heading::West};

constexpr Position displacement(Heading h) {
  switch (h) {
    case Heading::North: return {-1, 0};
    case Heading::South: return {1, 0};
    case Heading::East: return {0, 1};
    case Heading::West: return {0, -1};
  }
  return {0, 0};
}

constexpr Position step_from(Position p, Heading h) {
  Position d = displacement(h);
  return {p.row + d.row, p.col + d.col};
}

constexpr Heading opposite(Heading h) {
  switch (h) {
    case Heading::North: return Heading::South;
    case Heading::South: return Heading::North;
    case Heading::East: return Heading::West;
    case Heading::West: return Heading::East;
  }
  return h;
}

// Direction to the observer's left / right when facing h.
constexpr Heading left_of(Heading h) {
  switch (h) {
    case Heading::North: return Heading::West;
    case Heading::South: return Heading::East;
    case Heading::East: return Heading::North;
    case Heading::West: return Heading::South;
  }
  return h;
}

constexpr Heading right_of(Heading h) { return opposite(left_of(h)); }

// Neighbour-cell content in the observing vehicle's reference frame.
enum class CellDescriptor : std::uint8_t {
  Empty,
  SameHeading,
  OppositeHeading,
  HeadingFromLeft,
  HeadingFromRight,
};

constexpr std::array<CellDescriptor, 5> kAllDescriptors = {
    CellDescriptor::Empty, CellDescriptor::SameHeading,
    CellDescriptor::OppositeHeading, CellDescriptor::HeadingFromLeft,
    CellDescriptor::HeadingFromRight};

constexpr CellDescriptor describe(Heading observer,
                                  std::optional<Heading> occupant) {
  if (!occupant) return CellDescriptor::Empty;
  if (*occupant == observer) return CellDescriptor::SameHeading;
  if (*occupant == opposite(observer)) return CellDescriptor::OppositeHeading;
  // A vehicle heading towards the observer's right travels "from the left".
  if (*occupant == right_of(observer)) return CellDescriptor::HeadingFromLeft;
  return CellDescriptor::HeadingFromRight;
}

// The three sensed cells are the row ahead of the vehicle: front-left
// diagonal, front, front-right diagonal, in the vehicle's own frame.
struct LocalView {
  CellDescriptor left = CellDescriptor::Empty;
  CellDescriptor front = CellDescriptor::Empty;
  CellDescriptor right = CellDescriptor::Empty;
  auto operator<=>(const LocalView&) const = default;
};

}  // namespace normsim
