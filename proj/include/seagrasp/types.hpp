#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sg {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
// z-component of the 3D cross product of planar vectors.
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm_sq(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline double norm(const Vec2& v) { return std::sqrt(norm_sq(v)); }
// 90 degree counterclockwise rotation.
inline Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }
inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  double span() const { return hi - lo; }
  bool valid() const { return lo < hi; }
};

// Canonical joint ordering used everywhere: (proximal1, distal1, proximal2, distal2).
// Holds angles (rad), velocities (rad/s) or torques (N*m) depending on context.
struct JointVector {
  std::array<double, 4> v{0.0, 0.0, 0.0, 0.0};

  double& operator[](int i) { return v[static_cast<size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<size_t>(i)]; }

  JointVector operator+(const JointVector& o) const {
    return {{v[0] + o.v[0], v[1] + o.v[1], v[2] + o.v[2], v[3] + o.v[3]}};
  }
  JointVector operator-(const JointVector& o) const {
    return {{v[0] - o.v[0], v[1] - o.v[1], v[2] - o.v[2], v[3] - o.v[3]}};
  }
  JointVector operator*(double s) const {
    return {{v[0] * s, v[1] * s, v[2] * s, v[3] * s}};
  }
  bool operator==(const JointVector& o) const { return v == o.v; }

  double norm() const {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
  }
  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  bool all_finite() const {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  }
};

inline constexpr int kProximal1 = 0;
inline constexpr int kDistal1 = 1;
inline constexpr int kProximal2 = 2;
inline constexpr int kDistal2 = 3;

inline constexpr bool is_proximal_joint(int joint) { return joint == 0 || joint == 2; }
inline constexpr int finger_of_joint(int joint) { return joint < 2 ? 0 : 1; }
inline constexpr int proximal_joint_of(int finger) { return finger == 0 ? 0 : 2; }
inline constexpr int distal_joint_of(int finger) { return finger == 0 ? 1 : 3; }

// Swap finger 1 <-> finger 2 entries; the canonical permutation for symmetry checks.
inline JointVector swap_fingers(const JointVector& j) {
  return {{j[2], j[3], j[0], j[1]}};
}

// Raised by the integrator and controllers when state stops being finite.
struct SimDivergence : std::runtime_error {
  explicit SimDivergence(const std::string& what) : std::runtime_error(what) {}
};

// FNV-1a accumulator, used to fingerprint trajectories for reproducibility checks.
struct Fnv1a {
  std::uint64_t state = 1469598103934665603ull;

  void add_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state ^= p[i];
      state *= 1099511628211ull;
    }
  }
  void add(double x) { add_bytes(&x, sizeof(x)); }
  void add(std::uint64_t x) { add_bytes(&x, sizeof(x)); }
  std::uint64_t value() const { return state; }
};

// Deterministic RNG for tests and optional sensor noise.
struct SplitMix64 {
  std::uint64_t state = 0x9e3779b97f4a7c15ull;

  explicit SplitMix64(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Box-Muller; one sample per call.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
};

}  // namespace sg
