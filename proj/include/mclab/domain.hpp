#pragma once

#include <string>
#include <vector>

#include "mclab/geom.hpp"

namespace mclab {

enum class DomainKind { Ball, Ellipse, ConcentricAnnulus, EccentricAnnulus, ConvexRevolution };
enum class BoundaryLabel { Outer, Inner, Axis };

std::string to_string(DomainKind k);
std::string to_string(BoundaryLabel l);

/// Analytic description of a computational domain. Planar domains live in
/// (x1, x2); meridian half-domains of a body of revolution live in
/// (x_n, r) with r = second coordinate >= 0 and the Axis on r = 0.
struct DomainSpec {
  DomainKind kind = DomainKind::Ball;
  int n = 2;              // ambient space dimension of the original problem
  bool meridian = false;  // true: this spec is the (x_n, r) half-domain

  double R = 0.0;                        // Ball
  double a = 0.0, b = 0.0;               // Ellipse / ConvexRevolution meridian semi-axes
  double R_I = 0.0, R_E = 0.0, d = 0.0;  // annuli; inner center at (d, 0)

  static DomainSpec ball(double R, int n = 2);
  static DomainSpec ellipse(double a, double b);
  static DomainSpec concentric_annulus(double R_I, double R_E, int n = 2);
  static DomainSpec eccentric_annulus(double R_I, double d, double R_E, int n = 2);
  static DomainSpec convex_revolution(double a, double b, int n = 3);

  /// True when 2-D membership/meshing queries are meaningful.
  bool planar() const { return n == 2 || meridian; }
  bool has_inner_boundary() const {
    return kind == DomainKind::ConcentricAnnulus || kind == DomainKind::EccentricAnnulus;
  }
  Vec2 inner_center() const { return {d, 0.0}; }
  double diameter() const;
  /// Convexity of the planar region this spec describes (half-domains of
  /// annuli are not convex; half-disks and half-ellipses are).
  bool convex() const;
};

/// One analytically parametrized piece of the domain boundary, traversed
/// with the domain on the left, together with arc-length samples.
struct BoundaryComponent {
  enum class Curve { CircleArc, EllipseArc, Segment };

  BoundaryLabel label = BoundaryLabel::Outer;
  Curve curve = Curve::Segment;

  Vec2 center;               // CircleArc
  double radius = 0.0;       // CircleArc
  double ea = 0.0, eb = 0.0; // EllipseArc semi-axes
  double t0 = 0.0, t1 = 0.0; // parameter range; t1 < t0 traverses clockwise
  Vec2 p0, p1;               // Segment endpoints

  bool closed = false;
  double length = 0.0;
  std::vector<Vec2> samples;    // uniform in arc length; open: both ends, closed: last omitted
  std::vector<double> sample_s; // arc length of each sample

  Vec2 point_at_param(double t) const;
  Vec2 point_at_arclength(double s) const;
  Vec2 tangent_at_arclength(double s) const;     // unit, in traversal direction
  double curvature_at_arclength(double s) const; // signed; throws on Axis
  /// Arc length of the point on the component nearest to p.
  double project_arclength(Vec2 p) const;

private:
  double param_at_arclength(double s) const;
  friend std::vector<BoundaryComponent> boundary_components(const DomainSpec&, double);
  std::vector<double> lut_t_, lut_s_;  // EllipseArc param <-> arc length table
};

/// True iff p lies in the open planar domain (boundary excluded).
bool contains(const DomainSpec& domain, Vec2 p);

/// Distance from p to the analytic boundary of the planar domain.
double boundary_distance(const DomainSpec& domain, Vec2 p);

/// Boundary pieces sampled at the given arc-length resolution.
std::vector<BoundaryComponent> boundary_components(const DomainSpec& domain, double resolution);

double boundary_curvature(const DomainSpec& domain, const BoundaryComponent& component, double s);

struct MeridianDomain {
  DomainSpec planar;     // half-domain in (x_n, r)
  int weight_exponent;   // n - 2
};

/// The (x_n, r) half-domain of a rotationally symmetric domain, n >= 3.
MeridianDomain meridian_domain(const DomainSpec& domain);

}  // namespace mclab
