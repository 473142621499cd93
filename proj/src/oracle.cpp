#include <dnls/oracle.hpp>

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dnls {

namespace odeint = boost::numeric::odeint;

double GridProfile::peak() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

bool GridProfile::decayed(double tol) const {
  return std::fabs(values.back()) <= tol * peak();
}

double default_domain_length(double lambda) {
  if (lambda > 0.0) return std::max(50.0, 20.0 / std::sqrt(lambda));
  return 1e3;
}

GridProfile materialize(const BranchPoint& point, double L, int n) {
  if (!(L > 0.0) || n < 2) throw std::invalid_argument("grid needs L > 0 and n >= 2");
  GridProfile g{L, n, std::vector<double>(n + 1)};
  for (int i = 0; i <= n; ++i) g.values[i] = profile(point, g.x(i));
  return g;
}

GridProfile materialize(const BranchPoint& point, int n) {
  return materialize(point, default_domain_length(point.lambda), n);
}

namespace {

double trapezoid(const std::vector<double>& f, double h) {
  double s = 0.0;
  for (double v : f) s += v;
  return h * (s - 0.5 * (f.front() + f.back()));
}

void rescale_to_mass(GridProfile& g, double mu) {
  const double m = discrete_mass(g);
  if (!(m > 0.0)) throw std::invalid_argument("cannot rescale a zero profile");
  const double c = std::sqrt(mu / m);
  for (double& v : g.values) v *= c;
}

}  // namespace

GridProfile gaussian_profile(double mu, double width, double L, int n) {
  GridProfile g{L, n, std::vector<double>(n + 1)};
  for (int i = 0; i <= n; ++i) {
    const double z = g.x(i) / width;
    g.values[i] = std::exp(-z * z);
  }
  g.values[n] = 0.0;
  rescale_to_mass(g, mu);
  return g;
}

double tent_height(double mu, double k) { return std::sqrt(mu / (2.0 * (k * k + 1.0 / 3.0))); }

GridProfile tent_profile(double mu, double k, double L, int n) {
  if (L < k * k + 1.0) throw std::invalid_argument("tent does not fit on the grid");
  GridProfile g{L, n, std::vector<double>(n + 1)};
  const double c = tent_height(mu, k);
  for (int i = 0; i <= n; ++i) {
    const double x = g.x(i);
    g.values[i] = x <= k * k ? c : c * std::max(0.0, k * k + 1.0 - x);
  }
  rescale_to_mass(g, mu);
  return g;
}

double sup_distance(const GridProfile& a, const GridProfile& b) {
  if (a.n != b.n || a.L != b.L) throw std::invalid_argument("grids differ");
  double d = 0.0;
  for (int i = 0; i <= a.n; ++i) d = std::max(d, std::fabs(a.values[i] - b.values[i]));
  return d;
}

double sup_distance(const GridProfile& g, const BranchPoint& point) {
  double d = 0.0;
  for (int i = 0; i <= g.n; ++i) d = std::max(d, std::fabs(g.values[i] - profile(point, g.x(i))));
  return d;
}

void write_csv(std::ostream& os, const GridProfile& g) {
  char buf[80];
  os << "# GridProfile: even function sampled at x_i = i*L/n, i = 0..n, on [0, L]\n";
  std::snprintf(buf, sizeof buf, "# L=%.17g n=%d\n", g.L, g.n);
  os << buf << "x,u\n";
  for (int i = 0; i <= g.n; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", g.x(i), g.values[i]);
    os << buf;
  }
}

GridProfile read_csv(std::istream& is) {
  GridProfile g;
  g.values.clear();
  bool have_header = false;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      double L;
      int n;
      if (std::sscanf(line.c_str(), "# L=%lf n=%d", &L, &n) == 2) {
        g.L = L;
        g.n = n;
        have_header = true;
      }
      continue;
    }
    if (line == "x,u") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("malformed profile row: " + line);
    g.values.push_back(std::stod(line.substr(comma + 1)));
  }
  if (!have_header || static_cast<int>(g.values.size()) != g.n + 1) {
    throw std::runtime_error("profile CSV header and row count disagree");
  }
  return g;
}

const char* shot_outcome_name(ShotOutcome o) {
  switch (o) {
    case ShotOutcome::Decayed: return "decayed";
    case ShotOutcome::SignChange: return "sign-change";
    case ShotOutcome::TurnedBack: return "turned-back";
    case ShotOutcome::BlowUp: return "blow-up";
    case ShotOutcome::NotDecayed: return "not-decayed";
  }
  return "?";
}

namespace {

using State = std::array<double, 2>;
using Tail = std::array<double, 1>;

template <class Stepper, class Sys, class X>
void advance(Stepper& st, const Sys& sys, X& x, double& t, double t1, double& dt) {
  while (t < t1) {
    double trial = std::min(dt, t1 - t);
    const bool clipped = trial < dt;
    const double t_before = t;
    if (st.try_step(sys, x, t, trial) == odeint::success) {
      if (!clipped) dt = trial;
      if (t1 - t < 1e-14 * std::max(1.0, std::fabs(t1))) t = t1;
    } else {
      dt = trial;
    }
    if (t == t_before && dt < 1e-300) throw std::runtime_error("step size underflow in shooting");
  }
}

}  // namespace

ShootingResult shoot(const Params& params, double lambda, double u0, double L,
                     const ShootingOptions& opt) {
  if (!(u0 > 0.0) || !(L > 0.0)) throw std::invalid_argument("shoot needs u0 > 0 and L > 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("shoot needs lambda >= 0");
  const double p = params.p(), q = params.q();
  const int n = opt.n;
  const double h = L / n;

  ShootingResult res;
  res.u0 = u0;
  res.lambda = lambda;

  auto rhs = [=](const State& s, State& d, double) {
    d[0] = s[1];
    d[1] = lambda * s[0] + std::pow(std::fabs(s[0]), p - 2.0) * s[0];
  };
  auto first_integral = [=](double u, double v) {
    return v * v - lambda * u * u - 2.0 / p * std::pow(std::fabs(u), p);
  };
  // decay rate of the stable manifold of the origin at height u
  auto kappa = [=](double u) { return std::sqrt(lambda + 2.0 / p * std::pow(u, p - 2.0)); };

  State s{u0, -0.5 * std::pow(u0, q - 1.0)};
  const double c0 = first_integral(s[0], s[1]);
  const double scale = s[1] * s[1] + lambda * u0 * u0 + 2.0 / p * std::pow(u0, p);

  std::vector<double> vals;
  vals.reserve(n + 1);
  vals.push_back(u0);

  auto stepper = odeint::make_controlled(1e-3 * opt.rel_tol * std::max(u0, std::fabs(s[1])),
                                         opt.rel_tol,
                                         odeint::runge_kutta_fehlberg78<State>());
  double x = 0.0, dt = std::min(h, 1e-3 / std::max(1.0, std::fabs(s[1]) / u0));
  int i = 0;
  bool stopped = false;
  bool tail = false;
  while (i < n) {
    const double x1 = (i + 1) * h;
    // step by step so that events are caught at step resolution
    while (x < x1) {
      advance(stepper, rhs, s, x, std::min(x1, x + dt), dt);
      res.first_integral_drift =
          std::max(res.first_integral_drift, std::fabs(first_integral(s[0], s[1]) - c0) / scale);
      if (s[0] <= 0.0) {
        res.outcome = ShotOutcome::SignChange;
        res.side = 1;
        stopped = true;
      } else if (s[0] > opt.blowup_factor * u0) {
        res.outcome = ShotOutcome::BlowUp;
        res.side = -1;
        stopped = true;
      } else if (s[1] >= 0.0) {
        res.outcome = ShotOutcome::TurnedBack;
        res.side = -1;
        stopped = true;
      }
      if (stopped) break;
    }
    if (stopped) {
      res.x_stop = x;
      break;
    }
    vals.push_back(s[0]);
    ++i;
    if (lambda > 0.0 && s[0] <= opt.tail_switch * u0) {
      const double vs = -s[0] * kappa(s[0]);
      res.growing_mode_ratio = std::fabs(s[1] - vs) / std::fabs(vs);
      res.side = s[1] < vs ? 1 : -1;
      res.x_stop = x;
      tail = true;
      break;
    }
  }

  if (tail) {
    if (res.growing_mode_ratio <= opt.growing_mode_tol) {
      // follow u' = -u kappa(u) to L; this direction is stable
      Tail w{s[0]};
      auto tail_rhs = [&](const Tail& y, Tail& d, double) { d[0] = -y[0] * kappa(y[0]); };
      auto tstep = odeint::make_controlled(0.0, opt.rel_tol, odeint::runge_kutta_fehlberg78<Tail>());
      double xt = x, dtt = h;
      while (i < n) {
        advance(tstep, tail_rhs, w, xt, (i + 1) * h, dtt);
        vals.push_back(w[0]);
        ++i;
      }
      const double uL = w[0];
      const double decay = uL + uL * kappa(uL);
      res.outcome = decay <= opt.decay_tol * u0 ? ShotOutcome::Decayed : ShotOutcome::NotDecayed;
    } else {
      res.outcome = res.side > 0 ? ShotOutcome::SignChange : ShotOutcome::TurnedBack;
    }
  } else if (!stopped) {
    // lambda = 0 or a domain too short to reach the linear regime
    res.x_stop = L;
    if (lambda == 0.0 && s[0] > 0.0 && s[1] < 0.0) {
      res.outcome = ShotOutcome::Decayed;
    } else {
      res.outcome = ShotOutcome::NotDecayed;
    }
  }

  res.decay_ok = res.outcome == ShotOutcome::Decayed;
  const int nodes = static_cast<int>(vals.size()) - 1;
  res.profile = GridProfile{std::max(nodes, 1) * h, std::max(nodes, 1), vals};
  if (nodes < 1) res.profile.values.push_back(s[0]);
  if (nodes >= 2) res.mass = discrete_mass(res.profile);
  return res;
}

ShootingResult bisect_shoot(const Params& params, double lambda, double lo, double hi, double L,
                            const ShootingOptions& opt, double rel_tol) {
  ShootingResult a = shoot(params, lambda, lo, L, opt);
  ShootingResult b = shoot(params, lambda, hi, L, opt);
  if (a.side == 0 || b.side == 0 || a.side == b.side) {
    throw std::invalid_argument("shooting bracket does not straddle the decaying height");
  }
  ShootingResult mid = a;
  for (int it = 0; it < 200 && hi - lo > rel_tol * hi; ++it) {
    const double m = 0.5 * (lo + hi);
    if (!(m > lo && m < hi)) break;
    mid = shoot(params, lambda, m, L, opt);
    if (mid.side == 0) break;
    if (mid.side == a.side) {
      lo = m;
    } else {
      hi = m;
    }
  }
  return shoot(params, lambda, 0.5 * (lo + hi), L, opt);
}

FunctionalValues functional_eval(const Params& params, const GridProfile& g) {
  const int n = g.n;
  if (n < 2) throw std::invalid_argument("functional_eval needs n >= 2");
  const double h = g.h();
  const double p = params.p(), q = params.q();
  const auto& u = g.values;
  std::vector<double> u2(n + 1), du2(n + 1), up(n + 1);
  for (int i = 0; i <= n; ++i) {
    double d;
    if (i == 0) {
      d = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    } else if (i == n) {
      d = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * h);
    } else {
      d = (u[i + 1] - u[i - 1]) / (2.0 * h);
    }
    u2[i] = u[i] * u[i];
    du2[i] = d * d;
    up[i] = std::pow(std::fabs(u[i]), p);
  }
  FunctionalValues out;
  out.mass = 2.0 * trapezoid(u2, h);
  out.energy.kinetic = trapezoid(du2, h);
  out.energy.bulk = 2.0 / p * trapezoid(up, h);
  out.energy.point = std::pow(std::fabs(u[0]), q) / q;
  out.energy.total = out.energy.kinetic + out.energy.bulk - out.energy.point;
  return out;
}

namespace {

struct DiscreteParts {
  double kinetic, bulk, point;
  double total() const { return kinetic + bulk - point; }
  double scale() const { return kinetic + bulk + point; }
};

DiscreteParts discrete_parts(const Params& params, const std::vector<double>& u, double h) {
  const double p = params.p(), q = params.q();
  const std::size_t n = u.size() - 1;
  double kin = 0.0, bulk = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = u[i + 1] - u[i];
    kin += d * d;
  }
  for (std::size_t i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    bulk += w * std::pow(std::fabs(u[i]), p);
  }
  return {kin / h, 2.0 / p * h * bulk, std::pow(std::fabs(u[0]), q) / q};
}

double mass_of(const std::vector<double>& u, double h) {
  const std::size_t n = u.size() - 1;
  double s = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * u[i] * u[i];
  }
  return 2.0 * h * s;
}

void gradient_into(const Params& params, const std::vector<double>& u, double h,
                   std::vector<double>& g) {
  const double p = params.p(), q = params.q();
  const std::size_t n = u.size() - 1;
  g.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = 2.0 * (u[i + 1] - u[i]) / h;
    g[i] -= d;
    g[i + 1] += d;
  }
  for (std::size_t i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 * h : h;
    g[i] += 2.0 * w * std::pow(std::fabs(u[i]), p - 2.0) * u[i];
  }
  g[0] -= std::pow(std::fabs(u[0]), q - 2.0) * u[0];
}

// Solves (K + W + D) d = r on nodes 0..m-1 with K the Hessian of the kinetic
// term, W = diag(4 w_i) the Hessian of the mass and D >= 0 a diagonal shift
// carrying the size of the local nonlinear curvature; node m is pinned.
class SobolevSolver {
 public:
  SobolevSolver(std::size_t m, double h) : h_(h), diag_(m), off_(m, -2.0 / h), work_(m) {}

  void set_shift(const std::vector<double>& shift) {
    const std::size_t m = diag_.size();
    for (std::size_t i = 0; i < m; ++i) {
      const double w = i == 0 ? 0.5 * h_ : h_;
      const double links = i == 0 ? 1.0 : 2.0;
      diag_[i] = 2.0 * links / h_ + 4.0 * w + shift[i];
    }
  }

  void solve(const std::vector<double>& r, std::vector<double>& d) {
    const std::size_t m = diag_.size();
    d.assign(m + 1, 0.0);
    // Thomas algorithm; the matrix is symmetric and diagonally dominant
    work_[0] = off_[0] / diag_[0];
    d[0] = r[0] / diag_[0];
    for (std::size_t i = 1; i < m; ++i) {
      const double denom = diag_[i] - off_[i - 1] * work_[i - 1];
      work_[i] = off_[i] / denom;
      d[i] = (r[i] - off_[i - 1] * d[i - 1]) / denom;
    }
    for (std::size_t i = m - 1; i-- > 0;) d[i] -= work_[i] * d[i + 1];
  }

 private:
  double h_;
  std::vector<double> diag_, off_, work_;
};

}  // namespace

double discrete_energy(const Params& params, const GridProfile& g) {
  return discrete_parts(params, g.values, g.h()).total();
}

double discrete_mass(const GridProfile& g) { return mass_of(g.values, g.h()); }

std::vector<double> discrete_gradient(const Params& params, const GridProfile& g) {
  std::vector<double> out;
  gradient_into(params, g.values, g.h(), out);
  return out;
}

MinimizeResult constrained_minimize(const Params& params, double mu, const GridProfile& profile0,
                                    const MinimizeOptions& opt) {
  if (!(mu > 0.0)) throw std::invalid_argument("constrained_minimize needs mu > 0");
  MinimizeResult res;
  res.profile = profile0;
  auto& u = res.profile.values;
  const std::size_t n = u.size() - 1;
  const double h = res.profile.h();
  u[n] = 0.0;
  rescale_to_mass(res.profile, mu);

  SobolevSolver solver(n, h);
  std::vector<double> grad, dir, cgrad(n + 1), cdir, trial(n + 1);
  DiscreteParts parts = discrete_parts(params, u, h);
  double energy = parts.total();
  res.energy_trace.push_back(energy);
  double tau = 1e-3 * h * h;
  int stall = 0;

  std::vector<double> shift(n, 0.0);
  for (int it = 0; it < opt.max_iters; ++it) {
    gradient_into(params, u, h, grad);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = i == 0 ? 0.5 * h : h;
      shift[i] = 2.0 * w * (params.p() - 1.0) * std::pow(std::fabs(u[i]), params.p() - 2.0);
    }
    shift[0] += (params.q() - 1.0) * std::pow(std::fabs(u[0]), params.q() - 2.0);
    solver.set_shift(shift);
    for (std::size_t i = 0; i <= n; ++i) {
      const double w = (i == 0 || i == n) ? 0.5 * h : h;
      cgrad[i] = 4.0 * w * u[i];
    }
    solver.solve(grad, dir);
    solver.solve(cgrad, cdir);
    double cd = 0.0, cc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cd += cgrad[i] * dir[i];
      cc += cgrad[i] * cdir[i];
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] -= cd / cc * cdir[i];
      slope += grad[i] * dir[i];
    }
    if (!(slope > 0.0)) {
      res.converged = true;
      res.status = "stationary: no descent direction left";
      break;
    }

    bool accepted = false;
    bool halved = false;
    DiscreteParts tparts{};
    for (int halving = 0; halving < 80; ++halving) {
      for (std::size_t i = 0; i <= n; ++i) trial[i] = u[i] - tau * dir[i];
      trial[n] = 0.0;
      const double c = std::sqrt(mu / mass_of(trial, h));
      for (double& v : trial) v *= c;
      tparts = discrete_parts(params, trial, h);
      if (std::isfinite(tparts.total()) && tparts.total() <= energy - opt.armijo * tau * slope) {
        accepted = true;
        break;
      }
      tau *= 0.5;
      halved = true;
    }
    if (!accepted) {
      res.converged = true;
      res.status = "stalled: step halving found no decrease";
      break;
    }
    u.swap(trial);
    res.max_mass_drift = std::max(res.max_mass_drift, std::fabs(mass_of(u, h) - mu) / mu);
    const double previous = energy;
    parts = tparts;
    energy = parts.total();
    res.energy_trace.push_back(energy);
    res.iterations = it + 1;
    // a small change only counts as a stall once the step is landscape-limited
    const bool full_step = halved || tau >= 0.1;
    tau *= 1.5;

    if (energy < opt.probe_floor) {
      if (opt.probe) {
        res.probe_triggered = true;
        res.status = "probe: energy below floor";
      } else {
        res.failed = true;
        res.status = "diverged below the probe floor in a bounded run";
      }
      break;
    }
    if (full_step && std::fabs(previous - energy) <= opt.stall_rel * parts.scale()) {
      if (++stall >= opt.stall_window) {
        res.converged = true;
        res.status = "converged: relative energy stall";
        break;
      }
    } else {
      stall = 0;
    }
  }
  if (res.status.empty()) res.status = "max_iters reached";
  return res;
}

}  // namespace dnls
