#include "seagrasp/contact.hpp"

#include <algorithm>
#include <cmath>

namespace sg {

namespace {
constexpr double kDegenerate = 1e-12;

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }
}  // namespace

Vec2 closest_point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len_sq = norm_sq(ab);
  if (len_sq <= kDegenerate * kDegenerate) return a;
  const double t = clamp01(dot(p - a, ab) / len_sq);
  return a + ab * t;
}

void closest_segment_segment(const Vec2& p1, const Vec2& q1, const Vec2& p2, const Vec2& q2,
                             Vec2* c1, Vec2* c2) {
  const Vec2 d1 = q1 - p1;
  const Vec2 d2 = q2 - p2;
  const Vec2 r = p1 - p2;
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);

  double s = 0.0;
  double t = 0.0;
  if (a <= kDegenerate && e <= kDegenerate) {
    // both degenerate
  } else if (a <= kDegenerate) {
    t = clamp01(f / e);
  } else {
    const double c = dot(d1, r);
    if (e <= kDegenerate) {
      s = clamp01(-c / a);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      if (denom <= 1e-10 * a * e) {
        // Near-parallel: take the midpoint of the projected overlap so that a flush
        // face contact acts at the center of the shared span instead of an end.
        const double u0 = clamp01(-c / a);
        const double u1 = clamp01((b - c) / a);
        s = 0.5 * (u0 + u1);
        t = clamp01((f + s * b) / e);
      } else {
        s = clamp01((b * f - c * e) / denom);
        t = (b * s + f) / e;
        if (t < 0.0) {
          t = 0.0;
          s = clamp01(-c / a);
        } else if (t > 1.0) {
          t = 1.0;
          s = clamp01((b - c) / a);
        }
      }
    }
  }
  *c1 = p1 + d1 * s;
  *c2 = p2 + d2 * t;
}

bool capsule_circle_contact(const Capsule& cap, const Vec2& center, double radius, Contact* out) {
  const Vec2 cp = closest_point_on_segment(center, cap.a, cap.b);
  const Vec2 d = center - cp;
  const double dist = norm(d);
  const double depth = cap.radius + radius - dist;
  if (depth <= 0.0) return false;

  Vec2 n;
  if (dist > kDegenerate) {
    n = d * (1.0 / dist);
  } else {
    // Center on the segment core: push out sideways.
    const Vec2 axis = cap.b - cap.a;
    const double len = norm(axis);
    n = len > kDegenerate ? perp(axis * (1.0 / len)) : Vec2{0.0, 1.0};
  }
  out->normal = n;
  out->depth = depth;
  out->point = center - n * radius;
  return true;
}

int capsule_box_contact(const Capsule& cap, const Vec2& center, double heading, double side,
                        Contact out[2]) {
  // Work in the box frame: axis-aligned square of half-side h about the origin.
  const Vec2 a = rotate(cap.a - center, -heading);
  const Vec2 b = rotate(cap.b - center, -heading);
  const double h = 0.5 * side;

  const auto inside = [h](const Vec2& p) { return std::abs(p.x) <= h && std::abs(p.y) <= h; };

  if (!inside(a) && !inside(b)) {
    const Vec2 corners[5] = {{-h, -h}, {h, -h}, {h, h}, {-h, h}, {-h, -h}};
    double best_sq = std::numeric_limits<double>::infinity();
    int best_edge = 0;
    Vec2 on_seg, on_box;
    for (int i = 0; i < 4; ++i) {
      Vec2 s, e;
      closest_segment_segment(a, b, corners[i], corners[i + 1], &s, &e);
      const double d_sq = norm_sq(s - e);
      if (d_sq < best_sq) {
        best_sq = d_sq;
        best_edge = i;
        on_seg = s;
        on_box = e;
      }
    }
    const double dist = std::sqrt(best_sq);
    if (dist > kDegenerate) {
      // Face manifold: when the capsule core shadows a span of the winning
      // edge, sample the penetration at both span ends at half weight each.
      // Depth varies linearly along the span, so the force distribution tilts
      // smoothly with the pad; a lone closest point would jump between the
      // ends through parallel and the grasp would rock forever on that
      // discontinuity. The half weights make the total force match the single
      // full-weight point as the span shrinks onto a corner, so there is no
      // force step at the corner/face changeover either.
      const Vec2 e0 = corners[best_edge];
      const Vec2 u = (corners[best_edge + 1] - e0) * (1.0 / side);
      const double sa = dot(a - e0, u);
      const double sb = dot(b - e0, u);
      const double lo = std::max(std::min(sa, sb), 0.0);
      const double hi = std::min(std::max(sa, sb), side);
      if (hi > lo) {
        int n = 0;
        bool degenerate = false;
        for (const double t : {lo, hi}) {
          const Vec2 edge_pt = e0 + u * t;
          const Vec2 core_pt = closest_point_on_segment(edge_pt, a, b);
          const Vec2 d = edge_pt - core_pt;
          const double dd = norm(d);
          if (dd <= kDegenerate) {
            degenerate = true;
            break;
          }
          const double depth = cap.radius - dd;
          if (depth <= 0.0) continue;
          out[n].normal = rotate(d * (1.0 / dd), heading);
          out[n].depth = depth;
          out[n].weight = 0.5;
          out[n].point = rotate(edge_pt, heading) + center;
          ++n;
        }
        if (!degenerate && n > 0) return n;
      }
      // Corner or short graze: the closest boundary pair is exact.
      const double depth = cap.radius - dist;
      if (depth <= 0.0) return 0;
      const Vec2 n_box = (on_box - on_seg) * (1.0 / dist);
      out[0].normal = rotate(n_box, heading);
      out[0].depth = depth;
      out[0].point = rotate(on_box, heading) + center;
      return 1;
    }
    // dist == 0: the segment crosses the interior; fall through to the deep case.
  }

  // Deep case: part of the segment core is inside the box. Push out through the
  // nearest face of the deepest point. Unreachable at sane penalty stiffness but
  // kept total for robustness.
  Vec2 p = inside(a) ? a : (inside(b) ? b : (a + b) * 0.5);
  p = {std::clamp(p.x, -h, h), std::clamp(p.y, -h, h)};
  const double dx = h - std::abs(p.x);
  const double dy = h - std::abs(p.y);
  Vec2 n_box;
  Vec2 face_point;
  double core_depth;
  if (dx < dy) {
    n_box = {p.x >= 0.0 ? -1.0 : 1.0, 0.0};
    face_point = {p.x >= 0.0 ? h : -h, p.y};
    core_depth = dx;
  } else {
    n_box = {0.0, p.y >= 0.0 ? -1.0 : 1.0};
    face_point = {p.x, p.y >= 0.0 ? h : -h};
    core_depth = dy;
  }
  out[0].normal = rotate(n_box, heading);
  out[0].depth = cap.radius + core_depth;
  out[0].point = rotate(face_point, heading) + center;
  return 1;
}

ContactSet detect_contacts(const std::array<Capsule, 4>& links, const ObjectShape& shape,
                           const Vec2& center, double heading) {
  ContactSet set;
  for (int link = 0; link < 4; ++link) {
    if (shape.kind == ObjectShape::Kind::Circle) {
      Contact c;
      if (capsule_circle_contact(links[static_cast<size_t>(link)], center, 0.5 * shape.size, &c)) {
        c.link_id = link;
        set.add(c);
      }
    } else {
      Contact cs[2];
      const int n =
          capsule_box_contact(links[static_cast<size_t>(link)], center, heading, shape.size, cs);
      for (int k = 0; k < n; ++k) {
        cs[k].link_id = link;
        set.add(cs[k]);
      }
    }
  }
  return set;
}

double contact_normal_force(const Contact& contact, const Vec2& rel_velocity,
                            const PenaltyParams& penalty) {
  // Normal points from link into object, so the gap closes when rel_velocity
  // opposes it.
  const double approach = -dot(rel_velocity, contact.normal);
  double fn = penalty.normal_stiffness * contact.depth +
              penalty.normal_damping * std::max(0.0, approach);
  fn *= contact.weight;
  return fn < 0.0 ? 0.0 : fn;
}

Vec2 contact_force(Contact* contact, const Vec2& rel_velocity, const MaterialPair& pair,
                   const PenaltyParams& penalty, double tangential_mass, double dt,
                   double* fn_out, double* ft_out) {
  const double fn = contact_normal_force(*contact, rel_velocity, penalty);

  const Vec2 vt = rel_velocity - contact->normal * dot(rel_velocity, contact->normal);
  const double vt_mag = norm(vt);
  Vec2 ft{0.0, 0.0};
  double ft_mag = 0.0;
  bool at_cone = false;
  if (vt_mag > 1e-15) {
    const double stick = tangential_mass * vt_mag / dt;  // cancels vt in one step
    const double limit = pair.mu * fn;
    at_cone = stick >= limit;
    ft_mag = at_cone ? limit : stick;
    ft = vt * (-ft_mag / vt_mag);
  }
  contact->slipping = at_cone && vt_mag >= penalty.slip_velocity_threshold;

  if (fn_out) *fn_out = fn;
  if (ft_out) *ft_out = ft_mag;
  return contact->normal * fn + ft;
}

}  // namespace sg
