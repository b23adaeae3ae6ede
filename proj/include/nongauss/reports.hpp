#pragma once

// Tables behind the command-line tool: single-state records, parameter
// sweeps and the figure datasets. Row order never depends on parallelism.

#include "nongauss/catalog.hpp"
#include "nongauss/channels.hpp"
#include "nongauss/io.hpp"
#include "nongauss/measure.hpp"
#include "nongauss/parallel.hpp"
#include "nongauss/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace nongauss {

inline std::string cutoffs_string(const ModeShape& shape) {
  std::string s;
  for (int k = 0; k < shape.modes(); ++k) s += (k ? "x" : "") + std::to_string(shape.cutoff(k));
  return s;
}

inline Report compute_report(const FockState& rho, const NonGaussianityResult& r) {
  Table t{"result", {"delta", "purity_rho", "purity_tau", "overlap", "modes", "cutoffs", "flags"}, {}};
  t.add_row({r.delta, r.purity_rho, r.purity_tau, r.overlap, static_cast<long long>(rho.modes()),
             cutoffs_string(rho.shape()), (r.flags | rho.flags()).to_string()});
  return {{}, {t}};
}

/// from, from + step, ... up to `to` (inclusive within 1e-9 steps); empty if to < from.
inline std::vector<double> parameter_range(double from, double to, double step) {
  if (!(step > 0.0) || !std::isfinite(from) || !std::isfinite(to)) {
    throw Error(ErrorKind::validation, "range needs finite bounds and a positive step");
  }
  std::vector<double> out;
  if (to < from) return out;
  const auto count = static_cast<long long>(std::floor((to - from) / step + 1e-9)) + 1;
  for (long long i = 0; i < count; ++i) out.push_back(from + static_cast<double>(i) * step);
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSpec {
  std::string family;  // a catalog family, "loss" (input |p>) or "ips" (input S(r)|0>)
  CatalogSpec base;
  double eta = 1.0;
  double transmissivity = 0.9;
  double efficiency = 0.8;
  std::string parameter;
  double from = 0.0, to = 0.0, step = 1.0;
  int samples = 1;  // random family: states per parameter value
  int parallelism = 1;
};

namespace detail {

struct SweepPoint {
  CatalogSpec state;
  double eta, transmissivity, efficiency;
};

inline void set_parameter(SweepPoint& pt, const std::string& name, double v) {
  auto as_int = [&](int& field) {
    if (v != std::round(v)) throw Error(ErrorKind::validation, "parameter '" + name + "' must be an integer");
    field = static_cast<int>(v);
  };
  if (name == "p") as_int(pt.state.p);
  else if (name == "n") as_int(pt.state.n);
  else if (name == "d") as_int(pt.state.d);
  else if (name == "alpha") pt.state.alpha = v;
  else if (name == "alpha-im") pt.state.alpha_im = v;
  else if (name == "phi") pt.state.phi = v;
  else if (name == "r") pt.state.r = v;
  else if (name == "n-t") pt.state.n_t = v;
  else if (name == "eta") pt.eta = v;
  else if (name == "transmissivity") pt.transmissivity = v;
  else if (name == "efficiency") pt.efficiency = v;
  else throw Error(ErrorKind::validation, "unknown sweep parameter '" + name + "'");
}

struct SweepRow {
  NonGaussianityResult result;
  double click_probability = 0.0;
};

}  // namespace detail

inline Report sweep(const SweepSpec& spec) {
  const bool loss = spec.family == "loss";
  const bool ips = spec.family == "ips";
  CatalogSpec base = spec.base;
  if (loss) base.family = Family::fock;
  else if (ips) base.family = Family::squeezed_vacuum;
  else base.family = parse_family(spec.family);
  const bool random = base.family == Family::random;
  if (spec.samples < 1) throw Error(ErrorKind::validation, "samples must be at least 1");

  const std::vector<double> values = parameter_range(spec.from, spec.to, spec.step);
  struct Job {
    double value;
    int sample;
  };
  std::vector<Job> jobs;
  for (double v : values)
    for (int s = 0; s < (random ? spec.samples : 1); ++s) jobs.push_back({v, s});

  // Validate the parameter name even for an empty range.
  {
    detail::SweepPoint probe{base, spec.eta, spec.transmissivity, spec.efficiency};
    detail::set_parameter(probe, spec.parameter, values.empty() ? 0.0 : values.front());
  }

  const auto rows = ordered_map(
      jobs.size(),
      [&](std::size_t i) {
        detail::SweepPoint pt{base, spec.eta, spec.transmissivity, spec.efficiency};
        detail::set_parameter(pt, spec.parameter, jobs[i].value);
        detail::SweepRow row;
        if (random) {
          validate(pt.state);
          RandomStream rng(pt.state.seed, "sweep", static_cast<std::uint64_t>(jobs[i].sample));
          row.result = non_gaussianity(random_state(pt.state.d, rng));
        } else if (ips) {
          const auto c = ips_state(pt.state.r, pt.transmissivity, pt.efficiency, pt.state.cutoff);
          row.result = non_gaussianity(c.state);
          row.click_probability = c.probability;
        } else {
          FockState rho = make_state(pt.state);
          if (loss) rho = loss_apply(rho, pt.eta);
          row.result = non_gaussianity(rho);
        }
        return row;
      },
      spec.parallelism);

  Table t{"sweep", {spec.parameter}, {}};
  if (random) t.columns.push_back("sample");
  for (const char* c : {"delta", "purity_rho", "purity_tau", "overlap"}) t.columns.push_back(c);
  if (ips) t.columns.push_back("click_probability");
  t.columns.push_back("flags");
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& r = rows[i].result;
    std::vector<Cell> row{jobs[i].value};
    if (random) row.push_back(static_cast<long long>(jobs[i].sample));
    for (double x : {r.delta, r.purity_rho, r.purity_tau, r.overlap}) row.push_back(x);
    if (ips) row.push_back(rows[i].click_probability);
    row.push_back(r.flags.to_string());
    t.add_row(std::move(row));
  }
  return {{{"family", spec.family}, {"parameter", spec.parameter}}, {t}};
}

// ---------------------------------------------------------------------------
// Figure datasets

struct FigureOptions {
  std::uint64_t seed = 0;
  int samples = 1000;  // f2, per d
  int parallelism = 1;
};

inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"f1-top", "f1-bottom", "f2", "f3-left", "f3-right", "f4"};
  return ids;
}

namespace detail {

/// n points evenly spaced over [a, b].
inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

inline constexpr int f1_max_photons = 100;
inline constexpr int f1_max_copies = 10;
inline constexpr int phi_points = 37;  // 5 degree steps over [-pi/2, pi/2]

inline Report figure_f1_top() {
  Table t{"f1-top", {"p", "delta_p", "delta_bar_p", "n_opt"}, {}};
  for (int p = 1; p <= f1_max_photons; ++p) {
    const int n = optimal_copies(p, f1_max_copies);
    t.add_row({static_cast<long long>(p), delta_fock_analytic(p), delta_fock_multimode(p, n), static_cast<long long>(n)});
  }
  return {{{"method", "closed-form"}, {"max_copies", std::to_string(f1_max_copies)}}, {t}};
}

inline Report figure_f1_bottom(int parallelism) {
  const auto phis = linspace(-std::numbers::pi / 2, std::numbers::pi / 2, phi_points);
  const auto rows = ordered_map(
      phis.size(),
      [&](std::size_t i) {
        const double phi = phis[i];
        return std::vector<double>{non_gaussianity(make_bell_like(BellKind::phi, phi)).delta,
                                   non_gaussianity(make_bell_like(BellKind::psi, phi)).delta,
                                   non_gaussianity(make_cat(0.5, phi)).delta, non_gaussianity(make_cat(5.0, phi)).delta};
      },
      parallelism);
  Table t{"f1-bottom", {"phi", "bell_phi", "bell_psi", "cat_alpha_0.5", "cat_alpha_5"}, {}};
  for (std::size_t i = 0; i < phis.size(); ++i) t.add_row({phis[i], rows[i][0], rows[i][1], rows[i][2], rows[i][3]});
  return {{}, {t}};
}

inline constexpr int f2_bins = 50;  // width 0.01 on [0, 0.5], plus an overflow bin

inline Report figure_f2(const FigureOptions& opt) {
  if (opt.samples < 2) throw Error(ErrorKind::validation, "f2 needs at least 2 samples per dimension");
  Table hist{"histogram", {"d", "bin_low", "bin_high", "count"}, {}};
  Table summary{"summary", {"d", "samples", "mean", "variance", "min", "max", "above_half"}, {}};
  for (int d : {2, 10, 20}) {
    const std::string stream = "f2-d" + std::to_string(d);
    const auto deltas = ordered_map(
        static_cast<std::size_t>(opt.samples),
        [&](std::size_t s) {
          RandomStream rng(opt.seed, stream, s);
          return non_gaussianity(random_state(d, rng)).delta;
        },
        opt.parallelism);
    std::vector<long long> counts(f2_bins + 1, 0);
    double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
    long long above = 0;
    for (double x : deltas) {
      const int b = std::min(f2_bins, static_cast<int>(std::floor(x / 0.01)));
      ++counts[std::max(0, b)];
      sum += x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      if (x > single_mode_delta_limit) ++above;
    }
    const double mean = sum / deltas.size();
    double ss = 0.0;
    for (double x : deltas) ss += (x - mean) * (x - mean);
    for (int b = 0; b <= f2_bins; ++b) {
      const double high = b == f2_bins ? std::numeric_limits<double>::infinity() : 0.01 * (b + 1);
      hist.add_row({static_cast<long long>(d), 0.01 * b, high, counts[b]});
    }
    summary.add_row({static_cast<long long>(d), static_cast<long long>(opt.samples), mean,
                     ss / (deltas.size() - 1), lo, hi, above});
  }
  return {{{"seed", std::to_string(opt.seed)}, {"samples_per_d", std::to_string(opt.samples)}}, {hist, summary}};
}

inline constexpr int f3_numeric_max_photons = 10;

inline Report figure_f3_left(int parallelism) {
  const auto losses = linspace(0.0, 1.0, 21);
  const std::vector<int> ps{1, 10, 100, 1000};
  struct Job {
    double one_minus_eta;
    int p;
  };
  std::vector<Job> jobs;
  for (int p : ps)
    for (double l : losses) jobs.push_back({l, p});
  const auto numeric = ordered_map(
      jobs.size(),
      [&](std::size_t i) {
        if (jobs[i].p > f3_numeric_max_photons) return std::numeric_limits<double>::quiet_NaN();
        return non_gaussianity(loss_apply(make_fock(jobs[i].p), 1.0 - jobs[i].one_minus_eta)).delta;
      },
      parallelism);
  Table t{"f3-left", {"one_minus_eta", "p", "delta", "delta_closed_form", "method"}, {}};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const double cf = delta_loss_analytic(jobs[i].p, 1.0 - jobs[i].one_minus_eta);
    const bool closed = jobs[i].p > f3_numeric_max_photons;
    t.add_row({jobs[i].one_minus_eta, static_cast<long long>(jobs[i].p), closed ? cf : numeric[i], cf,
               std::string(closed ? "closed-form-only" : "numeric")});
  }
  return {{{"closed_form_only", "p=100,1000"}}, {t}};
}

inline Report figure_f3_right(int parallelism) {
  const auto ts = linspace(0.05, 0.95, 19);
  const std::vector<double> effs{0.2, 0.4, 0.6, 0.8};
  struct Job {
    double t, eps;
  };
  std::vector<Job> jobs;
  for (double e : effs)
    for (double t : ts) jobs.push_back({t, e});
  const auto rows = ordered_map(
      jobs.size(),
      [&](std::size_t i) {
        const auto c = ips_state(0.5, jobs[i].t, jobs[i].eps);
        return std::pair<double, double>{non_gaussianity(c.state).delta, c.probability};
      },
      parallelism);
  Table t{"f3-right", {"transmissivity", "efficiency", "delta", "click_probability"}, {}};
  for (std::size_t i = 0; i < jobs.size(); ++i) t.add_row({jobs[i].t, jobs[i].eps, rows[i].first, rows[i].second});
  return {{{"r", "0.5"}}, {t}};
}

struct F4Row {
  double delta = 0.0, delta_prime = 0.0;
  cplx c;
  Flags flags;
};

/// delta and delta' for one cat state; a budget stop keeps the best iterate.
inline F4Row f4_point(double alpha, double phi) {
  const FockState cat = make_cat(alpha, phi);
  F4Row row;
  row.delta = non_gaussianity(cat).delta;
  try {
    const auto d = delta_prime(cat);
    row.delta_prime = d.delta_prime;
    row.c = d.c;
  } catch (const ConvergenceError& e) {
    row.delta_prime = e.best_value();
    row.c = cplx(e.best_point().at(0), e.best_point().at(1));
    row.flags.set(Flag::budget_exhausted);
  }
  return row;
}

inline Report figure_f4(int parallelism) {
  const auto phis = linspace(-std::numbers::pi / 2, std::numbers::pi / 2, phi_points);
  const std::vector<double> alphas{0.5, 5.0};
  struct Job {
    double alpha, phi;
  };
  std::vector<Job> jobs;
  for (double a : alphas)
    for (double p : phis) jobs.push_back({a, p});
  const auto rows =
      ordered_map(jobs.size(), [&](std::size_t i) { return f4_point(jobs[i].alpha, jobs[i].phi); }, parallelism);
  Table t{"f4", {"alpha", "phi", "delta", "delta_prime", "c_re", "c_im", "flags"}, {}};
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& r = rows[i];
    t.add_row({jobs[i].alpha, jobs[i].phi, r.delta, r.delta_prime, r.c.real(), r.c.imag(), r.flags.to_string()});
  }
  return {{}, {t}};
}

}  // namespace detail

inline Report figure(const std::string& id, const FigureOptions& opt = {}) {
  if (id == "f1-top") return detail::figure_f1_top();
  if (id == "f1-bottom") return detail::figure_f1_bottom(opt.parallelism);
  if (id == "f2") return detail::figure_f2(opt);
  if (id == "f3-left") return detail::figure_f3_left(opt.parallelism);
  if (id == "f3-right") return detail::figure_f3_right(opt.parallelism);
  if (id == "f4") return detail::figure_f4(opt.parallelism);
  throw Error(ErrorKind::validation, "unknown figure id '" + id + "'");
}

}  // namespace nongauss
