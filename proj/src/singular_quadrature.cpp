#include "rlw/singular_quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "rlw/errors.hpp"

namespace rlw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Gauss-Kronrod 7/15 nodes and weights.
constexpr std::array<double, 8> kXgk = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    f1[j] = f(c - x);
    f2[j] = f(c + x);
    resk += kWgk[j] * (f1[j] + f2[j]);
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  resasc *= std::abs(h);
  resabs *= std::abs(h);
  double err = std::abs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(err, 50.0 * kEps * resabs);
  return {a, b, resk * h, err};
}

double fd_derivative(const std::function<double(double)>& f, double t, double lo, double hi) {
  double h = 1e-6 * std::max(std::abs(t), 1e-6);
  h = std::min({h, 0.5 * (t - lo), 0.5 * (hi - t)});
  if (!(h > 0)) return 0.0;
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double flo) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

}  // namespace

std::string to_string(EndpointKind kind) {
  switch (kind) {
    case EndpointKind::SimpleRoot: return "SimpleRoot";
    case EndpointKind::DoubleRoot: return "DoubleRoot";
    case EndpointKind::AxisZero: return "AxisZero";
    case EndpointKind::SmoothCap: return "SmoothCap";
    case EndpointKind::Unbounded: return "Unbounded";
  }
  return "?";
}

bool DomainInterval::singular_lower() const {
  return lower_kind == EndpointKind::SimpleRoot || lower_kind == EndpointKind::DoubleRoot ||
         lower_kind == EndpointKind::AxisZero;
}

bool DomainInterval::singular_upper() const {
  return upper_kind == EndpointKind::SimpleRoot || upper_kind == EndpointKind::DoubleRoot ||
         upper_kind == EndpointKind::AxisZero;
}

std::vector<Root> bracket_roots(const std::function<double(double)>& f, double lower, double upper, int probes) {
  if (probes < 8) throw PreconditionError("bracket_roots needs at least 8 probes");
  if (!(lower < upper)) throw PreconditionError("bracket_roots needs lower < upper");
  const bool infinite = std::isinf(upper);
  const double L = std::max(1.0, std::abs(lower));
  std::vector<double> t(probes), v(probes);
  for (int i = 0; i < probes; ++i) {
    const double s = double(i + 1) / double(probes + 1);
    t[i] = infinite ? lower + L * s / (1.0 - s) : lower + (upper - lower) * s;
    v[i] = f(t[i]);
  }
  std::vector<double> mags;
  for (double x : v)
    if (std::isfinite(x) && x != 0.0) mags.push_back(std::abs(x));
  double scale = 1.0;
  if (!mags.empty()) {
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    scale = mags[mags.size() / 2];
  }
  const double hi_edge = infinite ? t.back() * 2.0 + 1.0 : upper;

  std::vector<Root> roots;
  auto classify_root = [&](double r) {
    Root root{r, 1, false};
    const double d = std::abs(fd_derivative(f, r, lower, hi_edge));
    if (d < 1e-8 * scale)
      root.multiplicity = 2;
    else if (d < 1e-4 * scale)
      root.ill_conditioned = true;
    roots.push_back(root);
  };

  for (int i = 0; i < probes; ++i) {
    if (!std::isfinite(v[i])) continue;
    if (v[i] == 0.0) {
      classify_root(t[i]);
      continue;
    }
    if (i + 1 < probes && std::isfinite(v[i + 1]) && v[i + 1] != 0.0 && (v[i] > 0) != (v[i + 1] > 0))
      classify_root(bisect(f, t[i], t[i + 1], v[i]));
  }

  // Interior minima of |f| without a sign change: tangencies or close root pairs.
  for (int i = 1; i + 1 < probes; ++i) {
    if (!std::isfinite(v[i - 1]) || !std::isfinite(v[i]) || !std::isfinite(v[i + 1])) continue;
    if (v[i] == 0.0 || (v[i - 1] > 0) != (v[i] > 0) || (v[i + 1] > 0) != (v[i] > 0)) continue;
    if (!(std::abs(v[i]) < std::abs(v[i - 1]) && std::abs(v[i]) <= std::abs(v[i + 1]))) continue;
    const double sigma = v[i] > 0 ? 1.0 : -1.0;
    auto dg = [&](double x) { return sigma * fd_derivative(f, x, lower, hi_edge); };
    double lo = t[i - 1], hi = t[i + 1];
    double star;
    if (dg(lo) < 0 && dg(hi) > 0) {
      star = bisect(dg, lo, hi, dg(lo));
    } else {
      // golden section on sigma*f
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = lo, b = hi;
      for (int it = 0; it < 200 && b - a > 4 * kEps * std::abs(b); ++it) {
        const double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        if (sigma * f(x1) < sigma * f(x2))
          b = x2;
        else
          a = x1;
      }
      star = 0.5 * (a + b);
    }
    const double fs = f(star);
    if (fs == 0.0 || std::abs(fs) < 1e-13 * scale) {
      roots.push_back({star, 2, false});
    } else if ((fs > 0) != (sigma > 0)) {
      classify_root(bisect(f, lo, star, v[i - 1]));
      classify_root(bisect(f, star, hi, fs));
    } else if (std::abs(fs) < 1e-8 * scale) {
      roots.push_back({star, 2, true});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.location < b.location; });
  return roots;
}

double SingularIntegrand::operator()(double t) const { return numerator(t) / std::pow(denominator(t), exponent); }

double SingularIntegrand::near(double root, double offset) const {
  if (!denominator_increment) return (*this)(root + offset);
  return numerator(root + offset) / std::pow(denominator_increment(root, offset), exponent);
}

Integral gauss_kronrod(const std::function<double(double)>& f, double a, double b, double abs_tol, double rel_tol,
                       int max_intervals) {
  if (a == b) return {0.0, 0.0};
  std::priority_queue<Panel> heap;
  Panel first = gk15(f, a, b);
  heap.push(first);
  double total = first.value, err = first.error;
  int count = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (count >= max_intervals)
      throw QuadratureError("quadrature tolerance not reached within interval budget", total, err);
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid == worst.a || mid == worst.b) {
      throw QuadratureError("quadrature subdivision exhausted floating point resolution", total, err);
    }
    heap.pop();
    Panel l = gk15(f, worst.a, mid), r = gk15(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++count;
    if (!std::isfinite(total)) throw QuadratureError("non-finite integrand value", total, err);
    if (count % 64 == 0) {
      // refresh the running sums to limit drift
      auto copy = heap;
      total = 0.0;
      err = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, err};
}

double estimate_decay_exponent(const std::function<double(double)>& f, double start) {
  start = std::max(start, 1.0);
  std::vector<double> slopes;
  for (int j = 1; j <= 7; ++j) {
    const double t = start * std::pow(10.0, 2.0 * j);
    const double f1 = std::abs(f(t)), f2 = std::abs(f(10.0 * t));
    if (!(f1 > 0) || !(f2 > 0) || !std::isfinite(f1) || !std::isfinite(f2)) break;
    slopes.push_back(-(std::log(f2) - std::log(f1)) / std::log(10.0));
  }
  if (slopes.empty()) return kInf;
  if (slopes.size() < 3) return slopes.back();
  const std::size_t n = slopes.size();
  const double s0 = slopes[n - 3], s1 = slopes[n - 2], s2 = slopes[n - 1];
  const double d1 = s2 - s1, d0 = s1 - s0;
  const double denom = d1 - d0;
  if (std::abs(denom) < 1e-300 || std::abs(d1) < 1e-15) return s2;
  return s2 - d1 * d1 / denom;
}

namespace {

// One half of a domain: endpoint E joined to the interior point M through s in [0, 1], s = 1 at M.
struct HalfMap {
  double E = 0.0, M = 0.0, L = 0.0;
  double sigma = 1.0;  // direction from E into the domain
  EndpointKind kind = EndpointKind::SmoothCap;
  double k = 1.0;          // power grading
  double kappa = 1.0;      // unbounded convergent map exponent
  double log_span = 0.0;   // unbounded divergent map
  bool divergent = false;

  double t(double s) const {
    switch (kind) {
      case EndpointKind::Unbounded:
        return divergent ? M * std::exp(log_span * (1.0 - s)) : M * std::pow(s, -kappa);
      default: return E + sigma * L * std::pow(s, k);
    }
  }
  double inverse(double t) const {
    switch (kind) {
      case EndpointKind::Unbounded:
        return divergent ? 1.0 - std::log(t / M) / log_span : std::pow(M / t, 1.0 / kappa);
      default: return std::pow(std::abs(t - E) / L, 1.0 / k);
    }
  }
  // Integrand in s, always for the orientation from s to 1, i.e. towards M.
  double g(const SingularIntegrand& f, double s) const {
    switch (kind) {
      case EndpointKind::Unbounded: {
        const double x = t(s);
        if (!std::isfinite(x)) return 0.0;
        const double jac = divergent ? log_span * x : kappa * x / s;
        const double val = f(x) * jac;
        return std::isfinite(val) ? val : 0.0;
      }
      case EndpointKind::SimpleRoot:
      case EndpointKind::DoubleRoot: {
        const double delta = L * std::pow(s, k);
        return f.near(E, sigma * delta) * L * k * std::pow(s, k - 1.0);
      }
      default: {
        const double x = t(s);
        return f(x) * L * k * std::pow(s, k - 1.0);
      }
    }
  }
  double value_at(const SingularIntegrand& f, double s) const {
    if (kind == EndpointKind::SimpleRoot || kind == EndpointKind::DoubleRoot) return f.near(E, sigma * L * std::pow(s, k));
    return f(t(s));
  }
};

double singular_k(double exponent, int multiplicity) {
  const double e = exponent * multiplicity;
  return e < 1.0 ? 1.0 / (1.0 - e) : 1.0 / (1.0 - exponent);
}

bool decay_converges(const SingularIntegrand& f, double start, double* q_out) {
  double q;
  double margin;
  if (f.decay_exponent) {
    q = *f.decay_exponent;
    margin = 1e-12;
  } else {
    q = estimate_decay_exponent([&](double t) { return f(t); }, start);
    margin = 1e-8;
  }
  if (q_out) *q_out = q;
  return q > 1.0 + margin;
}

HalfMap make_half(const SingularIntegrand& f, double E, EndpointKind kind, double M) {
  HalfMap h;
  h.E = E;
  h.M = M;
  h.kind = kind;
  if (kind == EndpointKind::Unbounded) {
    double q = 0.0;
    h.divergent = !decay_converges(f, M, &q);
    if (h.divergent)
      h.log_span = std::log(1e3);
    else
      h.kappa = std::clamp(1.0 / (q - 1.0), 1.0, 30.0);
    return h;
  }
  h.L = std::abs(M - E);
  h.sigma = M > E ? 1.0 : -1.0;
  switch (kind) {
    case EndpointKind::SimpleRoot: h.k = singular_k(f.exponent, 1); break;
    case EndpointKind::DoubleRoot:
      h.k = singular_k(f.exponent, 2);
      h.divergent = 2.0 * f.exponent >= 1.0;
      break;
    case EndpointKind::AxisZero: h.k = 2.0; break;
    default: h.k = 1.0;
  }
  return h;
}

double interior_point(double lower, double upper) {
  if (std::isinf(upper)) return lower + std::max(1.0, std::abs(lower));
  return 0.5 * (lower + upper);
}

int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

// Panel integral with a noise-floor fallback: accepts the best estimate at 1e-11 relative.
Integral panel_integral(const std::function<double(double)>& g, double a, double b, double abs_tol, double rel_tol) {
  try {
    return gauss_kronrod(g, a, b, abs_tol, rel_tol, 400);
  } catch (const QuadratureError& e) {
    if (e.error_estimate <= std::max(1e-11 * std::abs(e.best_estimate), 1e-15)) return {e.best_estimate, e.error_estimate};
    throw;
  }
}

}  // namespace

QuadratureResult integrate_singular(const SingularIntegrand& integrand, Endpoint from, Endpoint to, double tol) {
  double orient = 1.0;
  if (from.location > to.location) {
    std::swap(from, to);
    orient = -1.0;
  }
  if (from.location == to.location) return {};
  if (from.kind == EndpointKind::Unbounded) throw PreconditionError("unbounded endpoint must be the upper limit");
  if (std::isinf(to.location)) to.kind = EndpointKind::Unbounded;
  const double M = interior_point(from.location, to.location);
  HalfMap left = make_half(integrand, from.location, from.kind, M);
  HalfMap right = make_half(integrand, to.location, to.kind, M);
  for (const HalfMap* h : {&left, &right}) {
    if (h->divergent) {
      QuadratureResult r;
      r.status = QuadratureResult::Status::Divergent;
      r.divergence_sign = int(orient) * sign_of(h->value_at(integrand, 0.5));
      return r;
    }
  }
  const double abs_tol = 1e-3 * tol;
  Integral a = gauss_kronrod([&](double s) { return left.g(integrand, s); }, 0.0, 1.0, abs_tol, 0.5 * tol);
  Integral b = gauss_kronrod([&](double s) { return right.g(integrand, s); }, 0.0, 1.0, abs_tol, 0.5 * tol);
  QuadratureResult r;
  r.value = orient * (a.value + b.value);
  r.error_estimate = a.error + b.error;
  return r;
}

ProfileSamples profile_from_integral(const SingularIntegrand& integrand, const DomainInterval& domain, int sign,
                                     Anchor anchor, int samples, double tol) {
  if (samples < 2) throw PreconditionError("profile needs at least 2 samples");
  if (!(domain.lower < domain.upper)) throw PreconditionError("empty domain");
  if (sign != 1 && sign != -1) throw PreconditionError("branch sign must be +1 or -1");
  if (anchor.alpha < domain.lower || anchor.alpha > domain.upper)
    throw PreconditionError("anchor outside the domain closure");
  DomainInterval dom = domain;
  if (std::isinf(dom.upper)) dom.upper_kind = EndpointKind::Unbounded;
  const double M = interior_point(dom.lower, dom.upper);
  const HalfMap halves[2] = {make_half(integrand, dom.lower, dom.lower_kind, M),
                             make_half(integrand, dom.upper, dom.upper_kind, M)};
  const int n_left = samples / 2 + 1;
  const int n_half[2] = {n_left, samples - n_left + 1};
  const double panel_rel = std::min(1e-13, tol * 1e-3);
  const double panel_abs = 1e-17;

  struct HalfTable {
    std::vector<double> s, t, c, du;  // c: integral from M to t
    double c_end = 0.0;               // integral from M to E (or +-inf)
  } tab[2];
  double err_total = 0.0;

  for (int side = 0; side < 2; ++side) {
    const HalfMap& h = halves[side];
    const int n = std::max(n_half[side], 1);
    const double orient = side == 0 ? -1.0 : 1.0;  // integral from M towards E
    double s_min = 0.0;
    bool include_end = false;
    bool fixed_start = true;
    switch (h.kind) {
      case EndpointKind::SimpleRoot:
      case EndpointKind::SmoothCap: include_end = true; break;
      case EndpointKind::DoubleRoot: s_min = std::pow(1e-6, 1.0 / h.k); break;
      case EndpointKind::AxisZero: s_min = std::sqrt(std::min(1e-6, 1e-3 * h.L) / h.L); break;
      case EndpointKind::Unbounded: fixed_start = false; break;
    }
    std::vector<double>& s = tab[side].s;
    if (n == 1) {
      s = {1.0};
    } else if (!fixed_start) {
      for (int j = 0; j < n; ++j) s.push_back(double(j + 1) / double(n));
    } else {
      for (int j = 0; j < n; ++j) s.push_back(s_min + (1.0 - s_min) * double(j) / double(n - 1));
    }
    auto g = [&](double x) { return h.g(integrand, x); };
    // cumulative from s = 1 downward
    std::vector<double> P(s.size(), 0.0);
    for (int j = int(s.size()) - 2; j >= 0; --j) {
      Integral I = panel_integral(g, s[j], s[j + 1], panel_abs, panel_rel);
      P[j] = P[j + 1] + I.value;
      err_total += I.error;
    }
    double tail = 0.0;
    bool end_divergent = h.divergent;
    if (!end_divergent && s.front() > 0.0) {
      Integral I = panel_integral(g, 0.0, s.front(), panel_abs, panel_rel);
      tail = I.value;
      err_total += I.error;
    }
    const double P_end = P.front() + tail;
    for (std::size_t j = 0; j < s.size(); ++j) {
      double t;
      double du;
      if (j == s.size() - 1) {
        t = M;
        du = integrand(M);
      } else if (s[j] == 0.0 && include_end) {
        t = h.E;
        du = h.kind == EndpointKind::SimpleRoot ? sign_of(integrand.numerator(h.E)) * kInf : integrand(h.E);
      } else {
        t = h.t(s[j]);
        du = h.value_at(integrand, s[j]);
      }
      tab[side].t.push_back(t);
      tab[side].c.push_back(orient * P[j]);
      tab[side].du.push_back(du);
    }
    if (end_divergent) {
      const int sg = sign_of(h.value_at(integrand, s.front()));
      tab[side].c_end = orient * sg * kInf;
    } else {
      tab[side].c_end = orient * P_end;
    }
  }

  auto integral_from_M = [&](double t) -> double {
    if (t == dom.lower) return tab[0].c_end;
    if (t == dom.upper) return tab[1].c_end;
    if (t == M) return 0.0;
    const int side = t < M ? 0 : 1;
    const HalfMap& h = halves[side];
    const double s0 = h.inverse(t);
    Integral I = panel_integral([&](double x) { return h.g(integrand, x); }, std::min(s0, 1.0), std::max(s0, 1.0),
                                panel_abs, panel_rel);
    const double val = s0 <= 1.0 ? I.value : -I.value;
    return side == 0 ? -val : val;
  };
  const double c0 = integral_from_M(anchor.alpha);
  if (!std::isfinite(c0)) throw PreconditionError("anchor placed at a divergent endpoint");

  ProfileSamples out;
  const std::size_t total = tab[0].t.size() + tab[1].t.size() - 1;
  out.alpha.resize(total);
  out.u.resize(total);
  out.du.resize(total);
  std::size_t row = 0;
  for (std::size_t j = 0; j < tab[0].t.size(); ++j, ++row) {
    out.alpha(row) = tab[0].t[j];
    out.u(row) = anchor.u + sign * (tab[0].c[j] - c0);
    out.du(row) = sign * tab[0].du[j];
  }
  for (int j = int(tab[1].t.size()) - 2; j >= 0; --j, ++row) {
    out.alpha(row) = tab[1].t[j];
    out.u(row) = anchor.u + sign * (tab[1].c[j] - c0);
    out.du(row) = sign * tab[1].du[j];
  }
  out.u_lower = anchor.u + sign * (tab[0].c_end - c0);
  out.u_upper = anchor.u + sign * (tab[1].c_end - c0);
  out.error_estimate = err_total;
  return out;
}

}  // namespace rlw
