#include "mclab/domain.hpp"

#include <algorithm>
#include <cmath>

#include "mclab/errors.hpp"

namespace mclab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

}  // namespace

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Ball: return "ball";
    case DomainKind::Ellipse: return "ellipse";
    case DomainKind::ConcentricAnnulus: return "concentric_annulus";
    case DomainKind::EccentricAnnulus: return "eccentric_annulus";
    case DomainKind::ConvexRevolution: return "convex_revolution";
  }
  return "?";
}

std::string to_string(BoundaryLabel l) {
  switch (l) {
    case BoundaryLabel::Outer: return "outer";
    case BoundaryLabel::Inner: return "inner";
    case BoundaryLabel::Axis: return "axis";
  }
  return "?";
}

DomainSpec DomainSpec::ball(double R, int n) {
  require(R > 0, "ball radius must be positive");
  require(n >= 2, "dimension must be >= 2");
  DomainSpec s;
  s.kind = DomainKind::Ball;
  s.R = R;
  s.n = n;
  return s;
}

DomainSpec DomainSpec::ellipse(double a, double b) {
  require(a > 0 && b > 0, "ellipse semi-axes must be positive");
  DomainSpec s;
  s.kind = DomainKind::Ellipse;
  s.a = a;
  s.b = b;
  s.n = 2;
  return s;
}

DomainSpec DomainSpec::concentric_annulus(double R_I, double R_E, int n) {
  require(0 < R_I && R_I < R_E, "annulus requires 0 < R_I < R_E");
  require(n >= 2, "dimension must be >= 2");
  DomainSpec s;
  s.kind = DomainKind::ConcentricAnnulus;
  s.R_I = R_I;
  s.R_E = R_E;
  s.n = n;
  return s;
}

DomainSpec DomainSpec::eccentric_annulus(double R_I, double d, double R_E, int n) {
  require(0 < R_I && R_I < R_E, "annulus requires 0 < R_I < R_E");
  require(d != 0.0, "eccentric annulus requires a nonzero offset");
  require(std::abs(d) + R_I < R_E, "inner sphere must lie strictly inside the outer sphere");
  require(n >= 2, "dimension must be >= 2");
  DomainSpec s;
  s.kind = DomainKind::EccentricAnnulus;
  s.R_I = R_I;
  s.R_E = R_E;
  s.d = d;
  s.n = n;
  return s;
}

DomainSpec DomainSpec::convex_revolution(double a, double b, int n) {
  require(a > 0 && b > 0, "meridian semi-axes must be positive");
  require(n >= 3, "a body of revolution requires n >= 3");
  DomainSpec s;
  s.kind = DomainKind::ConvexRevolution;
  s.a = a;
  s.b = b;
  s.n = n;
  return s;
}

double DomainSpec::diameter() const {
  switch (kind) {
    case DomainKind::Ball: return 2 * R;
    case DomainKind::Ellipse: return 2 * std::max(a, b);
    case DomainKind::ConcentricAnnulus:
    case DomainKind::EccentricAnnulus: return 2 * R_E;
    case DomainKind::ConvexRevolution: return 2 * std::max(a, b);
  }
  return 0;
}

bool DomainSpec::convex() const {
  switch (kind) {
    case DomainKind::Ball:
    case DomainKind::Ellipse:
    case DomainKind::ConvexRevolution: return true;
    default: return false;
  }
}

bool contains(const DomainSpec& dom, Vec2 p) {
  if (!dom.planar())
    throw DimensionMismatch("2-D membership query on a " + std::to_string(dom.n) +
                            "-D domain; take the meridian first");
  if (dom.meridian && p.y <= 0.0) return false;
  switch (dom.kind) {
    case DomainKind::Ball:
      return norm2(p) < dom.R * dom.R;
    case DomainKind::Ellipse: {
      double q = (p.x / dom.a) * (p.x / dom.a) + (p.y / dom.b) * (p.y / dom.b);
      return q < 1.0;
    }
    case DomainKind::ConvexRevolution: {
      double q = (p.x / dom.a) * (p.x / dom.a) + (p.y / dom.b) * (p.y / dom.b);
      return q < 1.0;
    }
    case DomainKind::ConcentricAnnulus: {
      double r2 = norm2(p);
      return r2 > dom.R_I * dom.R_I && r2 < dom.R_E * dom.R_E;
    }
    case DomainKind::EccentricAnnulus: {
      double r2 = norm2(p);
      double ri2 = norm2(p - dom.inner_center());
      return r2 < dom.R_E * dom.R_E && ri2 > dom.R_I * dom.R_I;
    }
  }
  return false;
}

namespace {

double ellipse_boundary_distance(double a, double b, Vec2 p) {
  // Newton on the stationarity condition for the nearest boundary point.
  double t = std::atan2(a * p.y, b * p.x);
  for (int it = 0; it < 40; ++it) {
    double c = std::cos(t), s = std::sin(t);
    Vec2 q{a * c, b * s};
    Vec2 dq{-a * s, b * c};
    Vec2 ddq{-a * c, -b * s};
    double f = dot(p - q, dq);
    double df = dot(p - q, ddq) - dot(dq, dq);
    if (df == 0) break;
    double step = f / df;
    t -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return dist(p, {a * std::cos(t), b * std::sin(t)});
}

}  // namespace

double boundary_distance(const DomainSpec& dom, Vec2 p) {
  double d = std::numeric_limits<double>::infinity();
  switch (dom.kind) {
    case DomainKind::Ball:
      d = dom.R - norm(p);
      d = std::abs(d);
      break;
    case DomainKind::Ellipse:
    case DomainKind::ConvexRevolution:
      d = ellipse_boundary_distance(dom.a, dom.b, p);
      break;
    case DomainKind::ConcentricAnnulus:
      d = std::min(std::abs(dom.R_E - norm(p)), std::abs(norm(p) - dom.R_I));
      break;
    case DomainKind::EccentricAnnulus:
      d = std::min(std::abs(dom.R_E - norm(p)),
                   std::abs(dist(p, dom.inner_center()) - dom.R_I));
      break;
  }
  if (dom.meridian) d = std::min(d, std::abs(p.y));
  return d;
}

Vec2 BoundaryComponent::point_at_param(double t) const {
  switch (curve) {
    case Curve::CircleArc: return center + Vec2{radius * std::cos(t), radius * std::sin(t)};
    case Curve::EllipseArc: return {ea * std::cos(t), eb * std::sin(t)};
    case Curve::Segment: {
      double u = (t - t0) / (t1 - t0);
      return p0 + (p1 - p0) * u;
    }
  }
  return {};
}

double BoundaryComponent::param_at_arclength(double s) const {
  s = std::clamp(s, 0.0, length);
  switch (curve) {
    case Curve::CircleArc:
      return t0 + (t1 > t0 ? 1.0 : -1.0) * s / radius;
    case Curve::Segment:
      return t0 + (t1 - t0) * (s / length);
    case Curve::EllipseArc: {
      // invert the (t, s) table by binary search + linear interpolation
      auto it = std::lower_bound(lut_s_.begin(), lut_s_.end(), s);
      if (it == lut_s_.begin()) return lut_t_.front();
      if (it == lut_s_.end()) return lut_t_.back();
      size_t i = static_cast<size_t>(it - lut_s_.begin());
      double s1 = lut_s_[i - 1], s2 = lut_s_[i];
      double w = (s2 > s1) ? (s - s1) / (s2 - s1) : 0.0;
      return lut_t_[i - 1] + w * (lut_t_[i] - lut_t_[i - 1]);
    }
  }
  return t0;
}

Vec2 BoundaryComponent::point_at_arclength(double s) const {
  // exact endpoints so shared corners dedupe bitwise
  if (s <= 0) return point_at_param(t0);
  if (s >= length && !closed) return point_at_param(t1);
  Vec2 p = point_at_param(param_at_arclength(s));
  if (label == BoundaryLabel::Axis) p.y = 0.0;
  return p;
}

Vec2 BoundaryComponent::tangent_at_arclength(double s) const {
  double t = param_at_arclength(s);
  double dir = (t1 >= t0) ? 1.0 : -1.0;
  switch (curve) {
    case Curve::CircleArc:
      return normalized(Vec2{-std::sin(t), std::cos(t)} * dir);
    case Curve::EllipseArc:
      return normalized(Vec2{-ea * std::sin(t), eb * std::cos(t)} * dir);
    case Curve::Segment:
      return normalized(p1 - p0);
  }
  return {};
}

double BoundaryComponent::curvature_at_arclength(double s) const {
  if (label == BoundaryLabel::Axis)
    throw Error("CurvatureUndefined", "curvature is undefined on the symmetry axis");
  double t = param_at_arclength(s);
  double dir = (t1 >= t0) ? 1.0 : -1.0;
  switch (curve) {
    case Curve::CircleArc:
      return dir / radius;
    case Curve::EllipseArc: {
      double num = ea * eb;
      double den = ea * ea * std::sin(t) * std::sin(t) + eb * eb * std::cos(t) * std::cos(t);
      return dir * num / (den * std::sqrt(den));
    }
    case Curve::Segment:
      return 0.0;
  }
  return 0.0;
}

double BoundaryComponent::project_arclength(Vec2 p) const {
  switch (curve) {
    case Curve::CircleArc: {
      double ang = std::atan2(p.y - center.y, p.x - center.x);
      double lo = std::min(t0, t1), hi = std::max(t0, t1);
      // bring ang into [lo, lo + 2pi)
      while (ang < lo) ang += 2 * kPi;
      while (ang >= lo + 2 * kPi) ang -= 2 * kPi;
      if (ang > hi && !closed) {
        // off the arc: clamp to the nearer endpoint
        return dist(p, point_at_param(t0)) <= dist(p, point_at_param(t1)) ? 0.0 : length;
      }
      double t = std::min(ang, hi);
      double sgn = (t1 >= t0) ? 1.0 : -1.0;
      double s = sgn * (t - t0) * radius;
      if (s < 0) s += 2 * kPi * radius;  // clockwise arcs wrap the other way
      return std::clamp(s, 0.0, length);
    }
    case Curve::Segment: {
      double u = dot(p - p0, p1 - p0) / norm2(p1 - p0);
      return std::clamp(u, 0.0, 1.0) * length;
    }
    case Curve::EllipseArc: {
      double t = std::atan2(ea * p.y, eb * p.x);
      for (int it = 0; it < 40; ++it) {
        double c = std::cos(t), sn = std::sin(t);
        Vec2 q{ea * c, eb * sn};
        Vec2 dq{-ea * sn, eb * c};
        Vec2 ddq{-ea * c, -eb * sn};
        double f = dot(p - q, dq);
        double df = dot(p - q, ddq) - dot(dq, dq);
        if (df == 0) break;
        double step = f / df;
        t -= step;
        if (std::abs(step) < 1e-14) break;
      }
      // map param back to this arc's range, then to arc length via the table
      double lo = std::min(t0, t1);
      while (t < lo) t += 2 * kPi;
      while (t >= lo + 2 * kPi) t -= 2 * kPi;
      t = std::clamp(t, std::min(t0, t1), std::max(t0, t1));
      auto it2 = std::lower_bound(lut_t_.begin(), lut_t_.end(), std::min(t, lut_t_.back()));
      size_t i = std::min<size_t>(static_cast<size_t>(it2 - lut_t_.begin()), lut_t_.size() - 1);
      if (i == 0) return lut_s_.front();
      double ta = lut_t_[i - 1], tb = lut_t_[i];
      double w = (tb > ta) ? (t - ta) / (tb - ta) : 0.0;
      double s = lut_s_[i - 1] + w * (lut_s_[i] - lut_s_[i - 1]);
      double sgn = (t1 >= t0) ? 1.0 : -1.0;
      if (sgn < 0) s = length - s;
      return std::clamp(s, 0.0, length);
    }
  }
  return 0.0;
}

namespace {

double ellipse_arc_speed(double a, double b, double t) {
  double dx = -a * std::sin(t), dy = b * std::cos(t);
  return std::hypot(dx, dy);
}

BoundaryComponent make_circle(BoundaryLabel label, Vec2 center, double R, double t0, double t1) {
  BoundaryComponent c;
  c.label = label;
  c.curve = BoundaryComponent::Curve::CircleArc;
  c.center = center;
  c.radius = R;
  c.t0 = t0;
  c.t1 = t1;
  c.length = R * std::abs(t1 - t0);
  c.closed = std::abs(std::abs(t1 - t0) - 2 * kPi) < 1e-14;
  c.p0 = c.point_at_param(t0);
  c.p1 = c.point_at_param(t1);
  return c;
}

BoundaryComponent make_segment(BoundaryLabel label, Vec2 p0, Vec2 p1) {
  BoundaryComponent c;
  c.label = label;
  c.curve = BoundaryComponent::Curve::Segment;
  c.p0 = p0;
  c.p1 = p1;
  c.t0 = 0;
  c.t1 = 1;
  c.length = dist(p0, p1);
  c.closed = false;
  return c;
}

}  // namespace

std::vector<BoundaryComponent> boundary_components(const DomainSpec& dom, double resolution) {
  if (!dom.planar())
    throw DimensionMismatch("boundary components are planar; take the meridian first");
  if (!(resolution > 0)) throw ConfigError("resolution must be positive");

  std::vector<BoundaryComponent> comps;
  if (!dom.meridian) {
    switch (dom.kind) {
      case DomainKind::Ball:
        comps.push_back(make_circle(BoundaryLabel::Outer, {0, 0}, dom.R, 0, 2 * kPi));
        break;
      case DomainKind::Ellipse: {
        BoundaryComponent c;
        c.label = BoundaryLabel::Outer;
        c.curve = BoundaryComponent::Curve::EllipseArc;
        c.ea = dom.a;
        c.eb = dom.b;
        c.t0 = 0;
        c.t1 = 2 * kPi;
        c.closed = true;
        comps.push_back(std::move(c));
        break;
      }
      case DomainKind::ConcentricAnnulus:
        comps.push_back(make_circle(BoundaryLabel::Outer, {0, 0}, dom.R_E, 0, 2 * kPi));
        comps.push_back(make_circle(BoundaryLabel::Inner, {0, 0}, dom.R_I, 2 * kPi, 0));
        break;
      case DomainKind::EccentricAnnulus:
        comps.push_back(make_circle(BoundaryLabel::Outer, {0, 0}, dom.R_E, 0, 2 * kPi));
        comps.push_back(make_circle(BoundaryLabel::Inner, dom.inner_center(), dom.R_I, 2 * kPi, 0));
        break;
      case DomainKind::ConvexRevolution:
        throw DimensionMismatch("a body of revolution has no planar boundary; take the meridian");
    }
  } else {
    switch (dom.kind) {
      case DomainKind::Ball:
        comps.push_back(make_circle(BoundaryLabel::Outer, {0, 0}, dom.R, 0, kPi));
        comps.push_back(make_segment(BoundaryLabel::Axis, {-dom.R, 0}, {dom.R, 0}));
        break;
      case DomainKind::ConvexRevolution: {
        BoundaryComponent c;
        c.label = BoundaryLabel::Outer;
        c.curve = BoundaryComponent::Curve::EllipseArc;
        c.ea = dom.a;
        c.eb = dom.b;
        c.t0 = 0;
        c.t1 = kPi;
        c.closed = false;
        comps.push_back(std::move(c));
        comps.push_back(make_segment(BoundaryLabel::Axis, {-dom.a, 0}, {dom.a, 0}));
        break;
      }
      case DomainKind::ConcentricAnnulus:
        comps.push_back(make_circle(BoundaryLabel::Outer, {0, 0}, dom.R_E, 0, kPi));
        comps.push_back(make_segment(BoundaryLabel::Axis, {-dom.R_E, 0}, {-dom.R_I, 0}));
        comps.push_back(make_circle(BoundaryLabel::Inner, {0, 0}, dom.R_I, kPi, 0));
        comps.push_back(make_segment(BoundaryLabel::Axis, {dom.R_I, 0}, {dom.R_E, 0}));
        break;
      case DomainKind::EccentricAnnulus: {
        Vec2 ic = dom.inner_center();
        comps.push_back(make_circle(BoundaryLabel::Outer, {0, 0}, dom.R_E, 0, kPi));
        comps.push_back(make_segment(BoundaryLabel::Axis, {-dom.R_E, 0}, {ic.x - dom.R_I, 0}));
        comps.push_back(make_circle(BoundaryLabel::Inner, ic, dom.R_I, kPi, 0));
        comps.push_back(make_segment(BoundaryLabel::Axis, {ic.x + dom.R_I, 0}, {dom.R_E, 0}));
        break;
      }
      case DomainKind::Ellipse:
        throw DimensionMismatch("planar ellipse has no meridian boundary");
    }
  }

  // arc-length table for ellipse arcs, then uniform arc-length samples
  for (auto& c : comps) {
    if (c.curve == BoundaryComponent::Curve::EllipseArc) {
      const int N = 4096;
      c.lut_t_.resize(N + 1);
      c.lut_s_.resize(N + 1);
      double lo = std::min(c.t0, c.t1), hi = std::max(c.t0, c.t1);
      double s = 0;
      c.lut_t_[0] = lo;
      c.lut_s_[0] = 0;
      for (int i = 1; i <= N; ++i) {
        double ta = lo + (hi - lo) * (i - 1) / N;
        double tb = lo + (hi - lo) * i / N;
        double tm = 0.5 * (ta + tb);
        // Simpson on |gamma'|
        double seg = (tb - ta) / 6.0 *
                     (ellipse_arc_speed(c.ea, c.eb, ta) + 4 * ellipse_arc_speed(c.ea, c.eb, tm) +
                      ellipse_arc_speed(c.ea, c.eb, tb));
        s += seg;
        c.lut_t_[i] = tb;
        c.lut_s_[i] = s;
      }
      c.length = s;
      c.p0 = c.point_at_param(c.t0);
      c.p1 = c.point_at_param(c.t1);
    }
    int nseg = std::max(c.closed ? 12 : 4, static_cast<int>(std::ceil(c.length / resolution)));
    int npts = c.closed ? nseg : nseg + 1;
    c.samples.clear();
    c.sample_s.clear();
    for (int i = 0; i < npts; ++i) {
      double s = c.length * i / nseg;
      c.samples.push_back(c.point_at_arclength(s));
      c.sample_s.push_back(s);
    }
  }
  return comps;
}

double boundary_curvature(const DomainSpec& dom, const BoundaryComponent& component, double s) {
  (void)dom;
  if (s < -1e-12 || s > component.length + 1e-12)
    throw ConfigError("arc length outside the component range");
  return component.curvature_at_arclength(s);
}

MeridianDomain meridian_domain(const DomainSpec& dom) {
  if (dom.n < 3 || dom.meridian)
    throw DimensionMismatch("meridian reduction requires a rotationally symmetric domain, n >= 3");
  if (dom.kind == DomainKind::Ellipse)
    throw DimensionMismatch("planar ellipse has no meridian");
  MeridianDomain m;
  m.planar = dom;
  m.planar.meridian = true;
  m.weight_exponent = dom.n - 2;
  return m;
}

}  // namespace mclab
