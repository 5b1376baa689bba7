#pragma once

#include <array>

#include "seagrasp/shapes.hpp"
#include "seagrasp/types.hpp"

namespace sg {

struct Capsule {
  Vec2 a;          // segment start, world frame
  Vec2 b;          // segment end
  double radius = 0.0;
};

// One contact per link/object closest-feature pair. A flush box face against a
// link yields a two-point manifold (one entry per overlap end).
struct Contact {
  Vec2 point;             // on the object surface, world frame
  Vec2 normal;            // unit, pointing from the link into the object
  double depth = 0.0;     // interpenetration, m, > 0
  double weight = 1.0;    // force share; a face manifold splits one contact across two points
  int link_id = -1;       // 0..3 = (proximal1, distal1, proximal2, distal2)
  bool slipping = false;  // filled in by the force model
};

// Fixed-capacity contact list: at most two contacts per link.
struct ContactSet {
  std::array<Contact, 8> items{};
  int count = 0;

  void add(const Contact& c) { items[static_cast<size_t>(count++)] = c; }
  const Contact* begin() const { return items.data(); }
  const Contact* end() const { return items.data() + count; }
};

Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b);

// Closest points between two segments. Near-parallel overlapping segments resolve
// to the midpoint of the overlap so that flush face contacts act at their center.
void closest_segment_segment(const Vec2& p1, const Vec2& q1, const Vec2& p2, const Vec2& q2,
                             Vec2* c1, Vec2* c2);

// Narrow-phase tests; `link_id` is left untouched.
bool capsule_circle_contact(const Capsule& cap, const Vec2& center, double radius, Contact* out);

// Fills `out` with 0, 1, or 2 contacts and returns the count. Corner contacts
// give one point at full weight; a face overlapping the capsule core gives a
// half-weight point at each overlap end. The pressure centre then moves
// continuously as the pad tilts instead of jumping end to end through the
// parallel configuration, and because the half weights sum to one the total
// force is also continuous as the overlap shrinks onto a corner.
int capsule_box_contact(const Capsule& cap, const Vec2& center, double heading, double side,
                        Contact out[2]);

ContactSet detect_contacts(const std::array<Capsule, 4>& links, const ObjectShape& shape,
                           const Vec2& center, double heading);

struct MaterialPair {
  double mu = 0.4;  // Coulomb friction coefficient
};

struct PenaltyParams {
  double normal_stiffness = 100000.0;    // N/m, keeps quasi-static depth well under 2 mm at full grip
  double normal_damping = 12.0;         // N*s/m, applied only while approaching
  double slip_velocity_threshold = 1e-3;  // m/s, below this a contact counts as sticking
};

// Penalty normal force: stiffness times depth plus damping while approaching,
// clamped to zero so the contact never pulls. `rel_velocity` is object surface
// velocity minus link surface velocity at the contact point.
double contact_normal_force(const Contact& contact, const Vec2& rel_velocity,
                            const PenaltyParams& penalty);

// Penalty normal force plus Coulomb friction. Inside the cone the tangential
// force is the impulse that would cancel the relative tangential velocity over
// one step (tangential_mass * vt / dt); at the cone it saturates to mu * fn, so
// |ft| <= mu * fn holds exactly and the stick branch cannot blow up the
// integrator the way a fixed viscous regularization can.
// `rel_velocity` is the object surface velocity minus the link surface velocity
// at the contact point; `tangential_mass` is the effective mass of that relative
// tangential degree of freedom. Returns the force applied to the object; the
// link receives the negative. Outputs scalar normal/tangential magnitudes for
// monitoring and sets `contact->slipping`.
Vec2 contact_force(Contact* contact, const Vec2& rel_velocity, const MaterialPair& pair,
                   const PenaltyParams& penalty, double tangential_mass, double dt,
                   double* fn_out = nullptr, double* ft_out = nullptr);

}  // namespace sg
