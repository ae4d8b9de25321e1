#include "aqnn/cpwl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "aqnn/error.hpp"
#include "aqnn/quadrature.hpp"

namespace aqnn {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Characteristic width of the nonlinear zone.
double scale_of(const SmoothActivation& act) {
  return act.kind() == ActivationKind::Tanh ? 1.0 : act.gamma();
}

Affine1D asymptote(const SmoothActivation& act, int side) {
  return side > 0 ? act.asymptote_pos() : act.asymptote_neg();
}

// rho(y) minus the asymptote on `side`, accurate when y lies on that side.
double excess0(const SmoothActivation& act, int side, double y) {
  if (y * side < 0.0) return act.value(y) - asymptote(act, side)(y);
  const double g = act.gamma();
  const double ay = std::abs(y);
  switch (act.kind()) {
    case ActivationKind::Abse:
      return 0.5 * g * g / (std::hypot(g, y) + ay);
    case ActivationKind::LnCosh:
      return 0.5 * g * std::log1p(std::exp(-2.0 * ay / g));
    case ActivationKind::Erf: {
      const double t = ay / g;
      return 0.5 * (g / std::sqrt(std::numbers::pi) * std::exp(-t * t) - ay * std::erfc(t));
    }
    case ActivationKind::Tanh: {
      const double e = std::exp(-2.0 * ay);
      return -side * 2.0 * e / (1.0 + e);
    }
  }
  return 0.0;
}

// rho'(y) minus the asymptote slope on `side`.
double excess1(const SmoothActivation& act, int side, double y) {
  if (y * side < 0.0) return act.d1(y) - asymptote(act, side).slope;
  const double g = act.gamma();
  const double ay = std::abs(y);
  switch (act.kind()) {
    case ActivationKind::Abse: {
      const double s = std::hypot(g, y);
      return -side * 0.5 * g * g / (s * (s + ay));
    }
    case ActivationKind::LnCosh: {
      const double e = std::exp(-2.0 * ay / g);
      return -side * e / (1.0 + e);
    }
    case ActivationKind::Erf:
      return -side * 0.5 * std::erfc(ay / g);
    case ActivationKind::Tanh: {
      const double e = std::exp(-2.0 * ay);
      return 4.0 * e / ((1.0 + e) * (1.0 + e));
    }
  }
  return 0.0;
}

int side_of(double x) { return x < 0.0 ? -1 : 1; }

// A line stored relative to the asymptote of one side:
// line(y) = asymptote_side(y) + k * y + m.
struct RelLine {
  int side;
  double k;
  double m;
  // Anchor form, kept for accuracy far out in the tails:
  // line(y) = asymptote_side(y) + e0 + e1 * (y - anchor).
  double anchor;
  double e0;
  double e1;

  double excess_at(double y) const {
    return std::isfinite(anchor) ? e0 + e1 * (y - anchor) : 0.0;
  }
};

RelLine tangent_rel(const SmoothActivation& act, double s) {
  if (std::isinf(s)) return {side_of(s), 0.0, 0.0, s, 0.0, 0.0};
  const int side = side_of(s);
  const double e0 = excess0(act, side, s);
  const double e1 = excess1(act, side, s);
  return {side, e1, e0 - e1 * s, s, e0, e1};
}

RelLine affine_rel(const SmoothActivation& act, const Affine1D& line, int side) {
  const Affine1D asym = asymptote(act, side);
  const double k = line.slope - asym.slope;
  const double m = line.intercept - asym.intercept;
  return {side, k, m, 0.0, m, k};
}

Affine1D to_affine(const SmoothActivation& act, const RelLine& l) {
  const Affine1D asym = asymptote(act, l.side);
  return {asym.slope + l.k, asym.intercept + l.m};
}

// Intersection abscissa of two lines, or NaN when parallel.
double intersect(const SmoothActivation& act, const RelLine& a, const RelLine& b) {
  if (a.side == b.side) {
    const double dk = a.k - b.k;
    if (dk == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (b.m - a.m) / dk;
  }
  const Affine1D la = to_affine(act, a);
  const Affine1D lb = to_affine(act, b);
  const double dk = la.slope - lb.slope;
  if (dk == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (lb.intercept - la.intercept) / dk;
}

// rho(y) - line(y), or rho'(y) - line'(y).
double difference(const SmoothActivation& act, const RelLine& l, double y, DistanceNorm norm) {
  if (norm == DistanceNorm::Function) return excess0(act, l.side, y) - l.excess_at(y);
  return excess1(act, l.side, y) - (std::isfinite(l.anchor) ? l.e1 : 0.0);
}

bool same_compatible_interval(const SmoothActivation& act, double x, double y) {
  for (const double z : act.inflection_points()) {
    if (x < z && z < y) return false;
  }
  return true;
}

// Adaptive Gauss-Legendre on [a, b] for K simultaneous integrands.
template <std::size_t K, class F>
void gl_panel(const F& f, double a, double b, std::array<double, K>& out) {
  static const auto nodes = gauss_legendre(15);
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  out.fill(0.0);
  for (const auto& n : nodes) {
    const std::array<double, K> v = f(c + h * n.x);
    for (std::size_t i = 0; i < K; ++i) out[i] += n.w * h * v[i];
  }
}

template <std::size_t K, class F>
void adaptive(const F& f, double a, double b, const std::array<double, K>& whole,
              const std::array<double, K>& abs_tol, int depth, std::array<double, K>& acc) {
  const double mid = 0.5 * (a + b);
  std::array<double, K> left, right;
  gl_panel<K>(f, a, mid, left);
  gl_panel<K>(f, mid, b, right);
  bool done = depth >= 50;
  if (!done) {
    done = true;
    for (std::size_t i = 0; i < K; ++i) {
      const double sum = left[i] + right[i];
      const double err = std::abs(sum - whole[i]);
      if (err > std::max(1e-14 * std::abs(sum), abs_tol[i])) done = false;
    }
  }
  if (done) {
    for (std::size_t i = 0; i < K; ++i) acc[i] += left[i] + right[i];
    return;
  }
  adaptive<K>(f, a, mid, left, abs_tol, depth + 1, acc);
  adaptive<K>(f, mid, b, right, abs_tol, depth + 1, acc);
}

// Adaptive integration over consecutive panels, with an absolute tolerance
// relative to a first estimate of the total.
template <std::size_t K, class F>
std::array<double, K> integrate_panels(const F& f, const std::vector<double>& edges) {
  const std::size_t np = edges.size() - 1;
  std::vector<std::array<double, K>> wholes(np);
  std::array<double, K> tol{};
  for (std::size_t p = 0; p < np; ++p) {
    gl_panel<K>(f, edges[p], edges[p + 1], wholes[p]);
    for (std::size_t i = 0; i < K; ++i) tol[i] += std::abs(wholes[p][i]);
  }
  for (auto& t : tol) t = std::max(1e-15 * t, 1e-300);
  std::array<double, K> acc{};
  for (std::size_t p = 0; p < np; ++p) {
    adaptive<K>(f, edges[p], edges[p + 1], wholes[p], tol, 0, acc);
  }
  return acc;
}

template <std::size_t K, class F>
std::array<double, K> integrate_interval(const F& f, double a, double b, double scale) {
  std::array<double, K> acc{};
  if (!(b > a)) return acc;
  if (std::isfinite(a) && std::isfinite(b)) {
    std::vector<double> edges(9);
    for (int i = 0; i <= 8; ++i) edges[i] = a + (b - a) * i / 8.0;
    edges[8] = b;
    return integrate_panels<K>(f, edges);
  }
  if (std::isinf(a) && std::isinf(b)) {
    const auto l = integrate_interval<K>(f, -kInf, 0.0, scale);
    const auto r = integrate_interval<K>(f, 0.0, kInf, scale);
    for (std::size_t i = 0; i < K; ++i) acc[i] = l[i] + r[i];
    return acc;
  }
  // y = base + dir * L * t / (1 - t), t in [0, 1).
  const double base = std::isfinite(a) ? a : b;
  const double dir = std::isfinite(a) ? 1.0 : -1.0;
  const double len = std::max(std::abs(base), scale);
  auto mapped = [&](double t) {
    const double u = 1.0 - t;
    if (!(u > 0.0)) return std::array<double, K>{};
    const double y = base + dir * len * t / u;
    std::array<double, K> v = f(y);
    const double jac = len / (u * u);
    for (auto& x : v) x *= jac;
    return v;
  };
  // Panels graded towards t = 1 where the tail lives.
  std::vector<double> edges{0.0};
  for (int p = 1; p < 40; ++p) edges.push_back(1.0 - std::ldexp(1.0, -p));
  edges.push_back(1.0);
  return integrate_panels<K>(mapped, edges);
}

struct PieceSet {
  std::vector<RelLine> lines;
  std::vector<double> breakpoints;
};

PieceSet pieces_from_tangents(const SmoothActivation& act, std::span<const double> s) {
  PieceSet out;
  out.lines.reserve(s.size());
  for (const double x : s) out.lines.push_back(tangent_rel(act, x));
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const double c = intersect(act, out.lines[k], out.lines[k + 1]);
    if (std::isnan(c)) throw NoIntersection("tangents are parallel");
    out.breakpoints.push_back(c + 0.0);  // no negative zero
  }
  return out;
}

void validate_tangent_points(const SmoothActivation& act, std::span<const double> s) {
  if (s.size() < 2 || s.front() != -kInf || s.back() != kInf) {
    throw InvalidParameter("tangent points must start at -inf and end at +inf");
  }
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (!(s[i] < s[i + 1])) throw InvalidParameter("tangent points must be strictly increasing");
  }
  for (const double z : act.inflection_points()) {
    if (std::find(s.begin(), s.end(), z) == s.end()) {
      throw InvalidParameter("tangent points must include every inflection point");
    }
  }
}

// Per-piece integrals of diff^2 and diff * (y - S_k).
struct PieceIntegrals {
  double squared;
  double moment;
};

PieceIntegrals piece_integrals(const SmoothActivation& act, const RelLine& line, double lo,
                               double hi, DistanceNorm norm) {
  const double scale = scale_of(act);
  const bool finite_anchor = std::isfinite(line.anchor);
  const double anchor = finite_anchor ? line.anchor : 0.0;
  // Asymptote pieces have no moment (it diverges and is never needed).
  auto f = [&](double y) {
    const double d = difference(act, line, y, norm);
    return std::array<double, 2>{d * d, finite_anchor ? d * (y - anchor) : 0.0};
  };
  // Split at the anchor and at 0 so each panel sees a one-signed profile.
  std::vector<double> cuts{lo};
  for (const double c : {anchor, 0.0}) {
    if (c > lo && c < hi) cuts.push_back(c);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  PieceIntegrals out{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const auto v = integrate_interval<2>(f, cuts[i], cuts[i + 1], scale);
    out.squared += v[0];
    out.moment += v[1];
  }
  return out;
}

double squared_distance(const SmoothActivation& act, const PieceSet& p, DistanceNorm norm,
                        std::vector<double>* moments) {
  double total = 0.0;
  const std::size_t n = p.lines.size();
  if (moments) moments->assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = k == 0 ? -kInf : p.breakpoints[k - 1];
    const double hi = k + 1 == n ? kInf : p.breakpoints[k];
    const auto v = piece_integrals(act, p.lines[k], lo, hi, norm);
    total += v.squared;
    if (moments) (*moments)[k] = v.moment;
  }
  return total;
}

PieceSet pieces_of(const SmoothActivation& act, const CpwlFunction& f) {
  const auto ts = f.tangent_points();
  if (ts.size() == f.num_pieces()) {
    bool finite_interior = true;
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) finite_interior &= std::isfinite(ts[i]);
    if (finite_interior && std::isinf(ts.front()) && std::isinf(ts.back())) {
      PieceSet p = pieces_from_tangents(act, ts);
      p.breakpoints.assign(f.breakpoints().begin(), f.breakpoints().end());
      return p;
    }
  }
  PieceSet p;
  const auto bps = f.breakpoints();
  p.breakpoints.assign(bps.begin(), bps.end());
  for (std::size_t k = 0; k < f.num_pieces(); ++k) {
    double mid;
    if (bps.empty()) mid = 0.0;
    else if (k == 0) mid = bps.front() - 1.0;
    else if (k == f.num_pieces() - 1) mid = bps.back() + 1.0;
    else mid = 0.5 * (bps[k - 1] + bps[k]);
    p.lines.push_back(affine_rel(act, f.piece(k), side_of(mid)));
  }
  return p;
}

// ---- equidistribution ------------------------------------------------------

double density(const SmoothActivation& act, double x, double exponent) {
  return std::pow(std::abs(act.d2(x)), exponent);
}

// Mass of |rho''|^exponent on [X, inf) for |X| far beyond the nonlinear zone.
double far_tail_mass(const SmoothActivation& act, double x, double exponent) {
  if (act.kind() != ActivationKind::Abse) return 0.0;
  // rho'' ~ g^2 / (2 |x|^3)
  const double g = act.gamma();
  const double c = std::pow(0.5 * g * g, exponent);
  const double p = 3.0 * exponent - 1.0;
  if (p <= 0.0) return kInf;
  return c * std::pow(std::abs(x), -p) / p;
}

double far_tail_inverse(const SmoothActivation& act, double mass, double exponent) {
  const double g = act.gamma();
  const double c = std::pow(0.5 * g * g, exponent);
  const double p = 3.0 * exponent - 1.0;
  return std::pow(p * mass / c, -1.0 / p);
}

double gl_mass(const SmoothActivation& act, double a, double b, double exponent) {
  static const auto nodes = gauss_legendre(20);
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  double s = 0.0;
  for (const auto& n : nodes) s += n.w * density(act, c + h * n.x, exponent);
  return s * h;
}

std::vector<double> panel_edges(const SmoothActivation& act, double lo, double hi,
                                double window) {
  const double scale = scale_of(act);
  std::vector<double> r{0.0};
  for (int k = 40; k >= 1; --k) r.push_back(scale / 16.0 * std::ldexp(1.0, -k));
  for (int k = 1; k <= 32; ++k) r.push_back(scale * k / 16.0);
  while (r.back() < window) r.push_back(std::min(window, r.back() * 1.15));
  std::vector<double> edges;
  for (auto it = r.rbegin(); it != r.rend(); ++it) {
    if (*it > 0.0) edges.push_back(-*it);
  }
  edges.insert(edges.end(), r.begin(), r.end());
  std::vector<double> out;
  const double a = std::max(lo, -window);
  const double b = std::min(hi, window);
  out.push_back(a);
  for (const double e : edges) {
    if (e > a && e < b) out.push_back(e);
  }
  out.push_back(b);
  return out;
}

}  // namespace

// ---- CpwlFunction ------------------------------------------------------------

CpwlFunction::CpwlFunction(std::vector<double> breakpoints, std::vector<Affine1D> pieces,
                           std::vector<double> tangent_points)
    : breakpoints_(std::move(breakpoints)),
      pieces_(std::move(pieces)),
      tangent_points_(std::move(tangent_points)) {
  if (pieces_.size() != breakpoints_.size() + 1) {
    throw InvalidParameter("piece count must equal breakpoint count + 1");
  }
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    const double x = breakpoints_[j];
    if (!std::isfinite(x)) throw InvalidParameter("breakpoints must be finite");
    if (j > 0 && !(breakpoints_[j - 1] < x)) {
      throw InvalidParameter("breakpoints must be strictly increasing");
    }
    const double l = pieces_[j](x);
    const double r = pieces_[j + 1](x);
    if (std::abs(l - r) > 1e-10 * std::max({1.0, std::abs(l), std::abs(x)})) {
      throw InvalidParameter("pieces are discontinuous at breakpoint " + std::to_string(j));
    }
  }
}

std::size_t CpwlFunction::piece_index(double x) const {
  return static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
                                  breakpoints_.begin());
}

CpwlFunction::Evaluation CpwlFunction::eval(double x) const {
  const std::size_t j = piece_index(x);
  return {pieces_[j](x), j};
}

// ---- tangents ----------------------------------------------------------------

Affine1D tangent(const SmoothActivation& act, double x) {
  if (x == kInf) return act.asymptote_pos();
  if (x == -kInf) return act.asymptote_neg();
  return to_affine(act, tangent_rel(act, x));
}

double tangent_intersection(const SmoothActivation& act, double x, double y) {
  if (x > y) std::swap(x, y);
  if (tangent(act, x).slope == tangent(act, y).slope) throw NoIntersection("tangents are parallel");
  if (!same_compatible_interval(act, x, y)) {
    throw DomainError("tangent points lie on different sides of an inflection point");
  }
  const double c = intersect(act, tangent_rel(act, x), tangent_rel(act, y));
  if (std::isnan(c)) throw NoIntersection("tangents are parallel");
  return c;
}

CpwlFunction build_cpwl(const SmoothActivation& act, std::span<const double> tangent_points) {
  validate_tangent_points(act, tangent_points);
  const PieceSet p = pieces_from_tangents(act, tangent_points);
  std::vector<Affine1D> pieces;
  pieces.reserve(p.lines.size());
  for (const auto& l : p.lines) pieces.push_back(to_affine(act, l));
  return CpwlFunction(p.breakpoints, std::move(pieces),
                      std::vector<double>(tangent_points.begin(), tangent_points.end()));
}

// ---- distances ---------------------------------------------------------------

double l2_distance(const SmoothActivation& act, const CpwlFunction& f, DistanceNorm norm) {
  return std::sqrt(squared_distance(act, pieces_of(act, f), norm, nullptr));
}

double sup_distance(const SmoothActivation& act, const CpwlFunction& f) {
  double best = 0.0;
  for (const double x : f.breakpoints()) best = std::max(best, std::abs(act.value(x) - f(x)));
  double reach = 20.0 * scale_of(act);
  for (const double x : f.breakpoints()) reach = std::max(reach, 2.0 * std::abs(x));
  constexpr int kSamples = 20001;
  for (int i = 0; i < kSamples; ++i) {
    const double x = -reach + 2.0 * reach * i / (kSamples - 1);
    best = std::max(best, std::abs(act.value(x) - f(x)));
  }
  return best;
}

// ---- equidistribution ---------------------------------------------------------

std::vector<double> equidistribute_points(const SmoothActivation& act, Interval interval,
                                          int count, double exponent) {
  if (count < 0) throw InvalidParameter("count must be non-negative");
  if (!(exponent > 0.0 && exponent <= 1.0)) throw InvalidParameter("exponent must be in (0, 1]");
  if (!(interval.lo < interval.hi)) throw InvalidParameter("empty interval");
  if (count == 0) return {};

  const double scale = scale_of(act);
  const double window = act.kind() == ActivationKind::Abse ? 1e6 * scale : 80.0 * scale;
  const std::vector<double> edges = panel_edges(act, interval.lo, interval.hi, window);
  std::vector<double> cumulative{0.0};
  const double left_tail = interval.lo < -window ? far_tail_mass(act, -window, exponent) : 0.0;
  const double right_tail = interval.hi > window ? far_tail_mass(act, window, exponent) : 0.0;
  cumulative[0] = left_tail;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    cumulative.push_back(cumulative.back() + gl_mass(act, edges[i], edges[i + 1], exponent));
  }
  const double total = cumulative.back() + right_tail;
  if (!(total > 0.0)) throw DomainError("rho'' vanishes on the interval");

  std::vector<double> out;
  out.reserve(count);
  for (int k = 1; k <= count; ++k) {
    const double target = total * k / (count + 1);
    if (target < left_tail) {
      out.push_back(-far_tail_inverse(act, target, exponent));
      continue;
    }
    if (target > cumulative.back()) {
      out.push_back(far_tail_inverse(act, total - target, exponent));
      continue;
    }
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
    i = std::clamp<std::size_t>(i, 1, edges.size() - 1) - 1;
    const double need = target - cumulative[i];
    double a = edges[i], b = edges[i + 1];
    const double start = edges[i];
    for (int it2 = 0; it2 < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it2) {
      const double m = 0.5 * (a + b);
      if (gl_mass(act, start, m, exponent) < need) a = m;
      else b = m;
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

// ---- best fit -----------------------------------------------------------------

int minimal_pieces(const SmoothActivation& act) {
  return 2 + static_cast<int>(act.inflection_points().size());
}

namespace {

// Free tangent points grouped in chains: point k of a chain sits at
// sign * (exp(g_0) + ... + exp(g_k)); mirrored chains also place the
// reflected point.
struct Chain {
  int sign;
  int count;
  bool mirrored;
};

struct Layout {
  bool include_zero;
  std::vector<Chain> chains;

  int variables() const {
    int n = 0;
    for (const auto& c : chains) n += c.count;
    return n;
  }
};

struct Placement {
  std::vector<double> points;  // sorted, with +-inf sentinels
  // For every chain variable position: indices in `points` and signs of
  // d point / d position.
  std::vector<std::vector<std::pair<std::size_t, double>>> owners;
  std::vector<double> positions;
};

Placement place(const Layout& layout, const std::vector<double>& g) {
  struct Entry {
    double value;
    int var;
    double sign;
  };
  std::vector<Entry> entries;
  Placement out;
  int v = 0;
  for (const auto& c : layout.chains) {
    double pos = 0.0;
    for (int k = 0; k < c.count; ++k, ++v) {
      pos += std::exp(g[v]);
      out.positions.push_back(pos);
      entries.push_back({c.sign * pos, v, static_cast<double>(c.sign)});
      if (c.mirrored) entries.push_back({-c.sign * pos, v, static_cast<double>(-c.sign)});
    }
  }
  if (layout.include_zero) entries.push_back({0.0, -1, 0.0});
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.value < b.value; });
  out.owners.assign(v, {});
  out.points.push_back(-kInf);
  for (const auto& e : entries) {
    if (e.var >= 0) out.owners[e.var].push_back({out.points.size(), e.sign});
    out.points.push_back(e.value);
  }
  out.points.push_back(kInf);
  return out;
}

struct Objective {
  double value;
  std::vector<double> grad;
  bool ok;
};

Objective evaluate_fit(const SmoothActivation& act, const Layout& layout,
                       const std::vector<double>& g, bool with_grad) {
  Objective out{kInf, {}, false};
  const Placement pl = place(layout, g);
  for (std::size_t i = 0; i + 1 < pl.points.size(); ++i) {
    if (!(pl.points[i] < pl.points[i + 1])) return out;
  }
  PieceSet ps;
  try {
    ps = pieces_from_tangents(act, pl.points);
  } catch (const DomainError&) {
    return out;
  }
  for (std::size_t i = 0; i + 1 < ps.breakpoints.size(); ++i) {
    if (!(ps.breakpoints[i] < ps.breakpoints[i + 1])) return out;
  }
  std::vector<double> moments;
  out.value = squared_distance(act, ps, DistanceNorm::Function, with_grad ? &moments : nullptr);
  out.ok = std::isfinite(out.value);
  if (!with_grad) return out;

  // dJ/dS_k = -2 rho''(S_k) * int (rho - T_k)(y - S_k) over piece k.
  std::vector<double> d_point(pl.points.size(), 0.0);
  for (std::size_t k = 1; k + 1 < pl.points.size(); ++k) {
    d_point[k] = -2.0 * act.d2(pl.points[k]) * moments[k];
  }
  const int nv = layout.variables();
  std::vector<double> d_pos(nv, 0.0);
  for (int v = 0; v < nv; ++v) {
    for (const auto& [idx, sgn] : pl.owners[v]) d_pos[v] += sgn * d_point[idx];
  }
  // position_k = sum_{i <= k} exp(g_i) within each chain.
  out.grad.assign(nv, 0.0);
  int base = 0;
  for (const auto& c : layout.chains) {
    double suffix = 0.0;
    for (int k = c.count - 1; k >= 0; --k) {
      suffix += d_pos[base + k];
      out.grad[base + k] = std::exp(g[base + k]) * suffix;
    }
    base += c.count;
  }
  return out;
}

std::vector<double> initial_gaps(const SmoothActivation& act, const Layout& layout) {
  constexpr double kExponent = 2.0 / 5.0;
  std::vector<double> g;
  for (const auto& c : layout.chains) {
    std::vector<double> pts;
    if (c.mirrored && act.symmetry() == Symmetry::ReluLike) {
      // Equidistributed points are symmetric; take the positive half.
      const int total = 2 * c.count + (layout.include_zero ? 1 : 0);
      const auto all = equidistribute_points(act, {-kInf, kInf}, total, kExponent);
      pts.assign(all.end() - c.count, all.end());
    } else {
      const Interval iv = c.sign > 0 ? Interval{0.0, kInf} : Interval{-kInf, 0.0};
      pts = equidistribute_points(act, iv, c.count, kExponent);
      if (c.sign < 0) {
        for (auto& x : pts) x = -x;
        std::reverse(pts.begin(), pts.end());
      }
    }
    double prev = 0.0;
    for (const double x : pts) {
      g.push_back(std::log(std::max(x - prev, 1e-300)));
      prev = x;
    }
  }
  return g;
}

Layout make_layout(const SmoothActivation& act, int pieces) {
  Layout layout;
  if (act.symmetry() == Symmetry::Odd) {
    const int free = pieces - 3;
    layout.include_zero = true;  // mandatory inflection tangent
    if (free % 2 == 0) {
      if (free > 0) layout.chains.push_back({1, free / 2, true});
    } else {
      layout.chains.push_back({1, (free + 1) / 2, false});
      if (free > 1) layout.chains.push_back({-1, free / 2, false});
    }
  } else {
    const int free = pieces - 2;
    layout.include_zero = free % 2 == 1;
    if (free / 2 > 0) layout.chains.push_back({1, free / 2, true});
  }
  return layout;
}

}  // namespace

CpwlFit best_l2_fit(const SmoothActivation& act, int pieces, const FitOptions& options) {
  if (pieces < minimal_pieces(act)) {
    throw InvalidParameter("best_l2_fit: " + act.name() + " needs at least " +
                           std::to_string(minimal_pieces(act)) + " pieces");
  }
  const Layout layout = make_layout(act, pieces);
  const bool symmetric = std::all_of(layout.chains.begin(), layout.chains.end(),
                                     [](const Chain& c) { return c.mirrored; });

  std::vector<double> g = initial_gaps(act, layout);
  Objective cur = evaluate_fit(act, layout, g, true);
  if (!cur.ok) throw DomainError("best_l2_fit: invalid initial tangent set");

  int iter = 0;
  std::vector<double> prev_g, prev_grad;
  double step = 0.0;
  for (; iter < options.max_iterations && layout.variables() > 0; ++iter) {
    double gnorm2 = 0.0, gmax = 0.0;
    for (const double d : cur.grad) {
      gnorm2 += d * d;
      gmax = std::max(gmax, std::abs(d));
    }
    if (gmax == 0.0) break;
    if (!prev_g.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double s = g[i] - prev_g[i];
        const double y = cur.grad[i] - prev_grad[i];
        ss += s * s;
        sy += s * y;
      }
      step = sy > 0.0 ? ss / sy : 0.1 / gmax;
    } else {
      step = 0.1 / gmax;
    }
    step = std::min(step, 1.0 / gmax);

    std::vector<double> trial(g.size());
    Objective next{kInf, {}, false};
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t i = 0; i < g.size(); ++i) trial[i] = g[i] - step * cur.grad[i];
      next = evaluate_fit(act, layout, trial, true);
      if (next.ok && next.value <= cur.value - 1e-4 * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double change = cur.value - next.value;
    prev_g = g;
    prev_grad = cur.grad;
    g = trial;
    cur = std::move(next);
    if (change < options.tolerance * cur.value) {
      ++iter;
      break;
    }
  }

  Placement pl = place(layout, g);
  std::vector<std::string> warnings;
  std::vector<double> fused{pl.points.front()};
  for (std::size_t i = 1; i < pl.points.size(); ++i) {
    const double x = pl.points[i];
    const double prev = fused.back();
    if (std::isfinite(x) && std::isfinite(prev) &&
        x - prev < options.fuse_distance * std::max(1.0, std::abs(x))) {
      warnings.push_back("fused tangent points " + std::to_string(prev) + " and " +
                         std::to_string(x));
      continue;
    }
    fused.push_back(x);
  }
  CpwlFunction f = build_cpwl(act, fused);
  const std::size_t effective = f.num_pieces();
  const double dist = l2_distance(act, f);
  return CpwlFit{std::move(f), dist, iter, effective, symmetric, std::move(warnings)};
}

double convergence_slope(std::span<const int> pieces, std::span<const double> distances) {
  if (pieces.size() != distances.size() || pieces.size() < 2) {
    throw InvalidParameter("convergence_slope needs at least two matching samples");
  }
  const double n = static_cast<double>(pieces.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const double x = std::log(static_cast<double>(pieces[i])), y = std::log(distances[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace aqnn
