#pragma once

#include <stdexcept>
#include <string>

#include "seagrasp/types.hpp"

namespace sg {

// Rigid planar objects the gripper interacts with. `size` is the diameter for
// circles and the side length for square boxes, in meters.
struct ObjectShape {
  enum class Kind { Circle, Box };

  Kind kind = Kind::Circle;
  double size = 0.067;

  double bounding_radius() const {
    return kind == Kind::Circle ? 0.5 * size : 0.5 * size * std::sqrt(2.0);
  }
  // Uniform density moment of inertia about the center, per unit mass times mass.
  double inertia(double mass) const {
    if (kind == Kind::Circle) {
      const double r = 0.5 * size;
      return 0.5 * mass * r * r;
    }
    return mass * size * size / 6.0;
  }
  void validate() const {
    if (!(size > 0.0)) throw std::invalid_argument("object size must be > 0");
  }
};

inline ObjectShape make_circle(double diameter) { return {ObjectShape::Kind::Circle, diameter}; }
inline ObjectShape make_box(double side) { return {ObjectShape::Kind::Box, side}; }

inline std::string shape_label(const ObjectShape& s) {
  const int mm = static_cast<int>(std::lround(s.size * 1000.0));
  return (s.kind == ObjectShape::Kind::Circle ? "circle" : "box") + std::to_string(mm);
}

}  // namespace sg
