#include "mclab/radial_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "mclab/errors.hpp"

namespace mclab {

namespace {

// u'/sqrt(1+u'^2) at radius r, i.e. the flux term divided by r^(n-1)
double flux_ratio(double r, int n, double H, double c) {
  return (H * std::pow(r, n) / n + c) / std::pow(r, n - 1);
}

// u'(r) from the first integral; |psi| must stay below 1 (graph condition)
double slope_from_ratio(double psi) {
  return psi / std::sqrt(1.0 - psi * psi);
}

}  // namespace

double RadialProfile::value(double r) const {
  auto cmp = [](const std::array<double, 3>& s, double x) { return s[0] < x; };
  auto it = std::lower_bound(samples.begin(), samples.end(), r, cmp);
  if (it == samples.begin()) return samples.front()[1];
  if (it == samples.end()) return samples.back()[1];
  auto& s1 = *(it - 1);
  auto& s2 = *it;
  double w = (s2[0] > s1[0]) ? (r - s1[0]) / (s2[0] - s1[0]) : 0.0;
  return s1[1] + w * (s2[1] - s1[1]);
}

double RadialProfile::derivative(double r) const {
  auto cmp = [](const std::array<double, 3>& s, double x) { return s[0] < x; };
  auto it = std::lower_bound(samples.begin(), samples.end(), r, cmp);
  if (it == samples.begin()) return samples.front()[2];
  if (it == samples.end()) return samples.back()[2];
  auto& s1 = *(it - 1);
  auto& s2 = *it;
  double w = (s2[0] > s1[0]) ? (r - s1[0]) / (s2[0] - s1[0]) : 0.0;
  return s1[2] + w * (s2[2] - s1[2]);
}

double RadialProfile::first_integral_residual() const {
  double worst = 0.0;
  for (auto& s : samples) {
    double r = s[0], du = s[2];
    if (r == 0.0) continue;  // the integral is trivially 0 = c there
    double lhs = std::pow(r, n - 1) * du / std::sqrt(1.0 + du * du);
    double rhs = H * std::pow(r, n) / n + c;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

RadialProfile radial_ball(double R, int n, double H) {
  if (!(R > 0) || n < 2) throw ConfigError("radial_ball: need R > 0, n >= 2");
  if (std::abs(H) * R / n >= 1.0)
    throw GraphConditionViolated("no graph solution: |H| R / n >= 1");

  RadialProfile p;
  p.n = n;
  p.R_I = 0.0;
  p.R_E = R;
  p.H = H;
  p.c = 0.0;
  p.r_star = 0.0;

  const int N = 4096;
  p.samples.reserve(N + 1);
  for (int i = 0; i <= N; ++i) {
    double r = R * i / N;
    double u, du;
    if (H == 0.0) {
      u = 0.0;
      du = 0.0;
    } else {
      double qr = 1.0 - (H * r / n) * (H * r / n);
      double qR = 1.0 - (H * R / n) * (H * R / n);
      u = (n / H) * (std::sqrt(qR) - std::sqrt(qr));
      du = slope_from_ratio(H * r / n);
    }
    p.samples.push_back({r, u, du});
  }
  if (H == 0.0) p.r_star.reset();  // u' vanishes identically; no isolated zero
  return p;
}

RadialProfile radial_annulus(double R_I, double R_E, int n, double H, double g_I, double g_E,
                             int steps) {
  if (!(0 < R_I && R_I < R_E) || n < 2) throw ConfigError("radial_annulus: need 0 < R_I < R_E");

  // integrate u' = slope(psi(r; c)) from R_I; the right-hand side does not
  // involve u, so RK4 reduces to a Simpson-type quadrature in r
  auto valid = [&](double c) {
    const int scan = 512;
    for (int i = 0; i <= scan; ++i) {
      double r = R_I + (R_E - R_I) * i / scan;
      if (std::abs(flux_ratio(r, n, H, c)) >= 1.0 - 1e-12) return false;
    }
    return true;
  };
  auto shoot = [&](double c, int nsteps, std::vector<std::array<double, 3>>* out) {
    double u = g_I;
    double dr = (R_E - R_I) / nsteps;
    if (out) {
      out->clear();
      out->push_back({R_I, u, slope_from_ratio(flux_ratio(R_I, n, H, c))});
    }
    for (int i = 0; i < nsteps; ++i) {
      double r = R_I + i * dr;
      double k1 = slope_from_ratio(flux_ratio(r, n, H, c));
      double km = slope_from_ratio(flux_ratio(r + 0.5 * dr, n, H, c));
      double k4 = slope_from_ratio(flux_ratio(r + dr, n, H, c));
      u += dr / 6.0 * (k1 + 4.0 * km + k4);
      if (out) out->push_back({r + dr, u, k4});
    }
    return u;
  };

  // H = 0 with equal data short-circuits to the flat solution
  if (H == 0.0 && g_I == g_E) {
    RadialProfile p;
    p.n = n;
    p.R_I = R_I;
    p.R_E = R_E;
    p.H = H;
    p.c = 0.0;
    shoot(0.0, steps, &p.samples);
    for (auto& s : p.samples) {
      s[1] = g_I;
      s[2] = 0.0;
    }
    p.r_star.reset();
    return p;
  }

  // scan for a bracket: the design interval covers the source flux; widen by
  // the graph-condition bound at R_I so nonzero boundary data stays reachable
  double c_src = std::abs(H) * std::pow(R_E, n) / n;
  double c_graph = std::pow(R_I, n - 1) + std::abs(H) * std::pow(R_I, n) / n;
  double c_max = std::max(c_src, c_graph);
  const int n_scan = 1024;
  double prev_c = 0, prev_f = 0;
  bool have_prev = false, found = false;
  double lo = 0, hi = 0;
  for (int i = 0; i <= n_scan; ++i) {
    double c = -c_max + 2.0 * c_max * i / n_scan;
    if (!valid(c)) {
      have_prev = false;
      continue;
    }
    double f = shoot(c, 512, nullptr) - g_E;
    if (have_prev && prev_f * f <= 0.0) {
      lo = prev_c;
      hi = c;
      found = true;
      break;
    }
    prev_c = c;
    prev_f = f;
    have_prev = true;
  }
  if (!found)
    throw OracleBracketFailure("no bracketing flux constant; likely no graph solution for this H");

  double f_lo = shoot(lo, steps, nullptr) - g_E;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double f = shoot(mid, steps, nullptr) - g_E;
    if (std::abs(f) <= 1e-13 && it > 8) {
      lo = hi = mid;
      break;
    }
    if (f_lo * f <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
      f_lo = f;
    }
    if (hi - lo < 1e-16 * std::max(1.0, std::abs(lo))) break;
  }
  double c = 0.5 * (lo + hi);
  double miss = std::abs(shoot(c, steps, nullptr) - g_E);
  if (miss > 1e-12)
    throw OracleBracketFailure("bisection stalled; end mismatch " + std::to_string(miss));

  RadialProfile p;
  p.n = n;
  p.R_I = R_I;
  p.R_E = R_E;
  p.H = H;
  p.c = c;
  shoot(c, steps, &p.samples);
  p.r_star = critical_radius(p);
  return p;
}

std::optional<double> critical_radius(const RadialProfile& p) {
  if (p.R_I == 0.0) return 0.0;  // ball: u'(0) = 0 at the center
  if (p.H == 0.0) return std::nullopt;
  double fi = p.H * std::pow(p.R_I, p.n) / p.n + p.c;
  double fe = p.H * std::pow(p.R_E, p.n) / p.n + p.c;
  if (fi * fe >= 0.0) return std::nullopt;  // flux term of constant sign
  double rs = std::pow(-p.n * p.c / p.H, 1.0 / p.n);
  // cross-check against the sampled sign change
  for (size_t i = 1; i < p.samples.size(); ++i) {
    double a = p.H * std::pow(p.samples[i - 1][0], p.n) / p.n + p.c;
    double b = p.H * std::pow(p.samples[i][0], p.n) / p.n + p.c;
    if (a * b <= 0.0) {
      double r0 = p.samples[i - 1][0], r1 = p.samples[i][0];
      for (int it = 0; it < 100; ++it) {
        double rm = 0.5 * (r0 + r1);
        double fm = p.H * std::pow(rm, p.n) / p.n + p.c;
        if (a * fm <= 0.0)
          r1 = rm;
        else
          r0 = rm;
      }
      double sampled = 0.5 * (r0 + r1);
      if (std::abs(sampled - rs) > 1e-10)
        throw Error("OracleInconsistent", "critical radius formulas disagree");
      break;
    }
  }
  return rs;
}

}  // namespace mclab
