#include "fokker/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "fokker/action.hpp"
#include "fokker/errors.hpp"
#include "fokker/format.hpp"
#include "fokker/fresnel.hpp"
#include "fokker/propagator.hpp"
#include "fokker/solver.hpp"
#include "fokker/spinor.hpp"

namespace fokker {

namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Context {
  const Scenario& sc;
  fs::path dir;
  std::uint64_t seed;
  int jobs;
  ExperimentResult& result;

  std::ofstream open(const std::string& file) const {
    const fs::path p = dir / file;
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + p.string());
    result.files.push_back(p);
    return os;
  }
};

/// Evaluates f(0..n-1) on up to `jobs` workers; results keep index order.
template <class T>
std::vector<T> sweep(int jobs, std::size_t n, const std::function<T(std::size_t)>& f) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(jobs, 1))
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::string join(std::initializer_list<std::string> fields) {
  std::string s;
  for (const auto& f : fields) {
    if (!s.empty()) s += ',';
    s += f;
  }
  return s;
}

// Order of decay between consecutive rows; empty for the first row.
std::string order_field(double prev, double cur) {
  if (!(prev > 0.0) || !(cur > 0.0)) return "";
  return fmt_real(std::log2(prev / cur));
}

ActionOptions action_options(const Scenario& sc) {
  ActionOptions o;
  o.tol.root = sc.tol_root;
  return o;
}

// sum_{n=1..3} a_n sin(n pi tau) / 2^(n-1), a_n uniform in [-1, 1].
ShiftField random_shift(std::mt19937_64& rng, std::size_t nodes, double amp) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const double a1 = d(rng), a2 = d(rng), a3 = d(rng);
  std::vector<double> v(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(nodes - 1);
    v[k] = amp * (a1 * std::sin(pi * t) + 0.5 * a2 * std::sin(2 * pi * t) + 0.25 * a3 * std::sin(3 * pi * t));
  }
  return ShiftField(std::move(v));
}

// amp sin^2 on [lo, hi] in tau, zero elsewhere.
ShiftField bump_shift(std::size_t nodes, double amp, double lo, double hi) {
  std::vector<double> v(nodes, 0.0);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(nodes - 1);
    if (t > lo && t < hi) {
      const double s = std::sin(pi * (t - lo) / (hi - lo));
      v[k] = amp * s * s;
    }
  }
  return ShiftField(std::move(v));
}

void write_table(const Context& c, const std::string& file, const Worldline& w) {
  auto os = c.open(file);
  write_worldline_table(os, w);
}

double interaction(const ActionBreakdown& a) {
  return a.interaction_cross + a.interaction_self_1 + a.interaction_self_2;
}

Worldline lapse_shifted(const Worldline& w, const ShiftField& eps) {
  const auto d = eps.tau_derivative(w.step());
  auto n = w.lapse();
  for (std::size_t k = 0; k < n.size(); ++k) n[k] -= d[k];
  return w.with_lapse(std::move(n));
}

void action_eval(Context& c, const Worldline& w1, const Worldline& w2) {
  const auto a = fokker_action(w1, w2, action_options(c.sc));
  auto os = c.open("action.csv");
  os << action_csv_header() << '\n' << action_csv_row(a) << '\n';
  write_table(c, "worldline_1.dat", w1);
  write_table(c, "worldline_2.dat", w2);
  c.result.metric_name = "total";
  c.result.metric = a.total;
}

void invariance_sweep(Context& c, const Worldline& w1, const Worldline& w2) {
  const int shapes = c.sc.param("shapes", 3);
  const int levels = c.sc.param("levels", 3);
  const double amp = c.sc.param("amplitude", 0.2);
  const double min_order = c.sc.param("min_order", 1.8);
  if (shapes < 1 || levels < 2) throw ConfigError("params: need shapes >= 1 and levels >= 2");
  const auto opts = action_options(c.sc);

  std::mt19937_64 rng(c.seed);
  std::vector<std::pair<ShiftField, ShiftField>> draws;
  for (int s = 0; s < shapes; ++s) {
    auto e1 = random_shift(rng, w1.size(), 1.0);
    auto e2 = random_shift(rng, w2.size(), 1.0);
    draws.emplace_back(std::move(e1), std::move(e2));
  }
  const auto base = fokker_action(w1, w2, opts);

  struct Row {
    double amplitude, change, modification, mismatch;
  };
  const auto n = static_cast<std::size_t>(shapes * levels);
  const auto rows = sweep<Row>(c.jobs, n, [&](std::size_t i) {
    const auto& [s1, s2] = draws[i / static_cast<std::size_t>(levels)];
    const double a = amp * std::ldexp(1.0, -static_cast<int>(i % static_cast<std::size_t>(levels)));
    const auto e1 = s1.scaled(a), e2 = s2.scaled(a);
    const double change = fokker_action(reparametrize(w1, e1), reparametrize(w2, e2), opts).total - base.total;
    const auto shifted = fokker_action(lapse_shifted(w1, e1), lapse_shifted(w2, e2), opts);
    const double oracle = (shifted.kinetic_1 + shifted.kinetic_2 - base.kinetic_1 - base.kinetic_2) -
                          (interaction(shifted) - interaction(base));
    const double mod = modified_action(w1, w2, e1, e2, opts).modification;
    return Row{a, change, mod, mod - oracle};
  });

  auto os = c.open("invariance.csv");
  os << "shape,amplitude,action_change,change_order,modification,gateaux_mismatch,mismatch_order\n";
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const bool first = i % static_cast<std::size_t>(levels) == 0;
    const Row& r = rows[i];
    std::string co, mo;
    if (!first) {
      co = order_field(std::abs(rows[i - 1].change), std::abs(r.change));
      mo = order_field(std::abs(rows[i - 1].mismatch), std::abs(r.mismatch));
      for (const auto* o : {&co, &mo}) worst = std::min(worst, o->empty() ? 0.0 : std::stod(*o));
    }
    os << join({std::to_string(i / static_cast<std::size_t>(levels)), fmt_real(r.amplitude),
                fmt_real(r.change), co, fmt_real(r.modification), fmt_real(r.mismatch), mo})
       << '\n';
  }
  c.result.metric_name = "min_order";
  c.result.metric = worst;
  if (worst < min_order) c.result.status = "low-order";
}

Worldline perturbed(const Worldline& w, double amp) {
  if (amp == 0.0) return w;
  auto pts = w.points();
  for (std::size_t k = 1; k + 1 < pts.size(); ++k) {
    const double f = 1.0 + amp * std::sin(pi * w.tau(k));
    for (int mu = 1; mu < 4; ++mu) pts[k][mu] *= f;
  }
  return w.with_points(std::move(pts));
}

void classical_orbit(Context& c, const Worldline& w1, const Worldline& w2) {
  SolverOptions opts;
  opts.tol_grad = c.sc.tol_grad;
  opts.max_iterations = c.sc.max_iterations;
  opts.freeze1 = c.sc.particle1.frozen;
  opts.freeze2 = c.sc.particle2.frozen;
  opts.max_step = c.sc.param("max_step", opts.max_step);
  opts.jacobian_step = c.sc.param("jacobian_step", opts.jacobian_step);
  opts.action = action_options(c.sc);
  const double amp = c.sc.param("perturb", 0.0);
  const auto a = opts.freeze1 ? w1 : perturbed(w1, amp);
  const auto b = opts.freeze2 ? w2 : perturbed(w2, amp);
  const auto r = find_stationary(a, b, opts);
  auto os = c.open("report.csv");
  os << stationary_csv_header() << '\n' << stationary_csv_row(r) << '\n';
  write_table(c, "worldline_1.dat", r.w1);
  write_table(c, "worldline_2.dat", r.w2);
  c.result.metric_name = "gradient_norm";
  c.result.metric = r.gradient_norm;
  if (!r.converged) {
    c.result.status = "not-converged";
    c.result.numerical_failure = true;
  }
}

void free_propagator(Context& c) {
  const int samples = c.sc.param("samples", 20);
  auto steps_list = c.sc.param_list("steps", {1, 4, 64});
  const double tol = c.sc.param("tol", 1e-10);
  if (samples < 1 || steps_list.empty()) throw ConfigError("params: need samples >= 1 and steps");
  std::vector<int> steps;
  for (double s : steps_list) {
    if (s < 1 || s != std::floor(s)) throw ConfigError("params.steps: positive integers expected");
    steps.push_back(static_cast<int>(s));
  }
  const double hbar = c.sc.hbar;

  struct Draw {
    FourVector p;
    double m, S, S2;
  };
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Draw> draws;
  for (int i = 0; i < samples; ++i) {
    Draw d;
    d.p = {1.5 + u(rng), u(rng), u(rng), u(rng)};
    d.m = 1.0 + 0.5 * u(rng);
    d.S = 1.5 + u(rng);
    d.S2 = 1.5 + u(rng);
    draws.push_back(d);
  }

  struct Row {
    std::vector<double> lattice;
    double closed, semigroup;
  };
  const auto rows = sweep<Row>(c.jobs, draws.size(), [&](std::size_t i) {
    const Draw& d = draws[i];
    const auto exact = evolution_operator(d.p, d.m, d.S, hbar);
    Row r;
    for (int s : steps) r.lattice.push_back(max_abs_entry(free_propagator_lattice(d.m, d.p, d.S, s, hbar) - exact));
    r.closed = max_abs_entry(evolution_operator_closed_form(d.p, d.m, d.S, hbar) - exact);
    r.semigroup = max_abs_entry(evolution_operator(d.p, d.m, d.S, hbar) * evolution_operator(d.p, d.m, d.S2, hbar) -
                                evolution_operator(d.p, d.m, d.S + d.S2, hbar));
    return r;
  });

  auto os = c.open("free_propagator.csv");
  os << "sample,steps,m,S,p0,p1,p2,p3,lattice_error,closed_form_error,semigroup_error\n";
  double worst = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const Draw& d = draws[i];
    for (std::size_t j = 0; j < steps.size(); ++j) {
      os << join({std::to_string(i), std::to_string(steps[j]), fmt_real(d.m), fmt_real(d.S), fmt_real(d.p[0]),
                  fmt_real(d.p[1]), fmt_real(d.p[2]), fmt_real(d.p[3]), fmt_real(rows[i].lattice[j]),
                  fmt_real(rows[i].closed), fmt_real(rows[i].semigroup)})
         << '\n';
      worst = std::max({worst, rows[i].lattice[j], rows[i].closed, rows[i].semigroup});
    }
  }
  c.result.metric_name = "max_error";
  c.result.metric = worst;
  if (worst > tol) c.result.status = "above-tolerance";
}

void gaussian_check(Context& c) {
  const auto dims = c.sc.param_list("dims", {1, 2});
  const int samples = c.sc.param("samples", 2);
  const double tol = c.sc.param("tol", 1e-6);
  FresnelOptions fo;
  fo.eta0 = c.sc.param("eta0", fo.eta0);
  fo.levels = c.sc.param("levels", fo.levels);
  const double hbar = c.sc.hbar;

  struct Draw {
    Eigen::MatrixXd A;
    Eigen::VectorXd c;
  };
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Draw> draws;
  for (double dim : dims) {
    if (dim != 1 && dim != 2) throw ConfigError("params.dims: only 1 and 2 are supported");
    const int n = static_cast<int>(dim);
    for (int s = 0; s < samples; ++s) {
      Draw d{Eigen::MatrixXd(n, n), Eigen::VectorXd(n)};
      // Eigenvalues in [0.5, 1.5], random rotation.
      const double th = pi * u(rng);
      Eigen::MatrixXd Q(n, n), L = Eigen::MatrixXd::Zero(n, n);
      if (n == 1) {
        Q << 1.0;
      } else {
        Q << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
      }
      for (int j = 0; j < n; ++j) L(j, j) = 1.0 + 0.5 * u(rng);
      d.A = Q * L * Q.transpose();
      d.A = 0.5 * (d.A + d.A.transpose()).eval();
      for (int j = 0; j < n; ++j) d.c(j) = u(rng);
      draws.push_back(std::move(d));
    }
  }

  struct Row {
    Complex identity_value, quadrature;
    double error_estimate;
  };
  const auto rows = sweep<Row>(c.jobs, draws.size(), [&](std::size_t i) {
    const Draw& d = draws[i];
    std::vector<SpinOperator> gammas;
    for (Eigen::Index j = 0; j < d.c.size(); ++j) gammas.push_back(d.c(j) * identity(4));
    const auto g = gaussian_matrix_integral(d.A, gammas, hbar);
    const auto q = fresnel_extrapolated(d.A, d.c, hbar, fo);
    return Row{g(0, 0), q.value, q.error_estimate};
  });

  auto os = c.open("gaussian.csv");
  os << "n,sample,re_identity,im_identity,re_quadrature,im_quadrature,rel_error,error_estimate\n";
  double worst = 0.0;
  std::size_t i = 0;
  for (double dim : dims)
    for (int s = 0; s < samples; ++s, ++i) {
      const Row& r = rows[i];
      const double rel = std::abs(r.quadrature - r.identity_value) / std::abs(r.identity_value);
      worst = std::max(worst, rel);
      os << join({std::to_string(static_cast<int>(dim)), std::to_string(s), fmt_real(r.identity_value.real()),
                  fmt_real(r.identity_value.imag()), fmt_real(r.quadrature.real()),
                  fmt_real(r.quadrature.imag()), fmt_real(rel), fmt_real(r.error_estimate)})
         << '\n';
    }
  c.result.metric_name = "max_rel_error";
  c.result.metric = worst;
  if (worst > tol) c.result.status = "above-tolerance";
}

void perturbation_order(Context& c, const Worldline& w1, const Worldline& w2) {
  const int levels = c.sc.param("levels", 3);
  const double eps_amp = c.sc.param("eps_amp", 0.05);
  const FourVector p1 = c.sc.param_vector("p1", {1.1, 0.2, -0.1, 0.05});
  const FourVector p2 = c.sc.param_vector("p2", {1.3, -0.1, 0.3, 0.0});
  const double S1 = c.sc.param("S1", w1.total_proper_time());
  const double S2 = c.sc.param("S2", w2.total_proper_time());
  const double min_order = c.sc.param("min_order", 1.8);
  if (levels < 2) throw ConfigError("params.levels must be at least 2");
  FirstOrderOptions fo;
  fo.hbar = c.sc.hbar;
  fo.lambda1 = c.sc.param("lambda1", 0.0);
  fo.lambda2 = c.sc.param("lambda2", 0.0);
  fo.action = action_options(c.sc);

  std::mt19937_64 rng(c.seed);
  const auto e1 = random_shift(rng, w1.size(), eps_amp);
  const auto e2 = random_shift(rng, w2.size(), eps_amp);
  const auto zero = zeroth_order_propagator(w1.mass(), w2.mass(), p1, p2, S1, S2, c.sc.hbar).value;

  struct Row {
    double e1;
    SpinOperator first;
    double residual;
  };
  const auto rows = sweep<Row>(c.jobs, static_cast<std::size_t>(levels), [&](std::size_t j) {
    const double f = std::ldexp(1.0, -static_cast<int>(j));
    const auto a = w1.with_profile(w1.profile().scaled(f));
    const auto o1 = first_order_propagator(S1, S2, p1, p2, a, w2, e1, e2, fo).value;
    const auto full = interacting_propagator(S1, S2, p1, p2, a, w2, e1, e2, fo);
    return Row{a.profile().e_max, o1, max_abs_entry(full - zero - o1)};
  });

  auto os = c.open("perturbation.csv");
  os << "level,e1,first_order_norm,linearity_error,residual,residual_order\n";
  double worst_order = std::numeric_limits<double>::infinity();
  double max_first = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const Row& r = rows[j];
    const double norm = max_abs_entry(r.first);
    max_first = std::max(max_first, norm);
    std::string lin, ord;
    if (j > 0) {
      const double ref = max_abs_entry(rows[j - 1].first);
      lin = fmt_real(ref > 0.0 ? max_abs_entry(2.0 * r.first - rows[j - 1].first) / ref : 0.0);
      ord = order_field(rows[j - 1].residual, r.residual);
      if (!ord.empty()) worst_order = std::min(worst_order, std::stod(ord));
    }
    os << join({std::to_string(j), fmt_real(r.e1), fmt_real(norm), lin, fmt_real(r.residual), ord}) << '\n';
  }
  if (max_first == 0.0) {
    c.result.metric_name = "max_first_order";
    c.result.metric = 0.0;
    return;
  }
  c.result.metric_name = "min_residual_order";
  c.result.metric = worst_order;
  if (!(worst_order >= min_order)) c.result.status = "low-order";
}

ShellWindow window_param(const Scenario& sc, const std::string& key) {
  const auto v = sc.param_list(key, {});
  if (v.empty()) return {};
  if (v.size() != 2 || !(v[0] <= v[1])) throw ConfigError("params." + key + ": expected 'lo hi'");
  return {v[0], v[1]};
}

void proper_time_fix(Context& c, const Worldline& w1, const Worldline& w2) {
  ProperTimeFixingOptions po;
  po.tol_shell = c.sc.tol_shell;
  po.lambda3 = c.sc.param("lambda3", 0.0);
  po.lambda4 = c.sc.param("lambda4", 0.0);
  po.window1 = window_param(c.sc, "window1");
  po.window2 = window_param(c.sc, "window2");
  po.action = action_options(c.sc);
  const auto eps1 = bump_shift(w1.size(), c.sc.param("eps1_amp", 0.0), c.sc.param("eps1_lo", 0.2),
                               c.sc.param("eps1_hi", 0.8));
  const auto eps2 = bump_shift(w2.size(), c.sc.param("eps2_amp", 0.0), c.sc.param("eps2_lo", 0.2),
                               c.sc.param("eps2_hi", 0.8));
  const auto f = proper_time_fixing(w1, w2, eps1, eps2, po);

  int idx = 1;
  for (const ShellTrajectory* t : {&f.first, &f.second}) {
    auto os = c.open("trajectory_" + std::to_string(idx++) + ".csv");
    os << "s,P_eps,source\n";
    for (std::size_t k = 0; k < t->s.size(); ++k)
      os << join({fmt_real(t->s[k]), fmt_real(t->P_eps[k]), fmt_real(t->source[k])}) << '\n';
  }
  auto os = c.open("fixing.csv");
  os << "S1,S2,residual_1,residual_2,delta_P_1,delta_P_2,left_shell_1,left_shell_2\n";
  os << join({fmt_real(f.S1), fmt_real(f.S2), fmt_real(f.first.residual), fmt_real(f.second.residual),
              fmt_real(f.first.delta_P), fmt_real(f.second.delta_P), f.first.left_shell ? "1" : "0",
              f.second.left_shell ? "1" : "0"})
     << '\n';
  c.result.metric_name = "max_residual";
  c.result.metric = std::max(f.first.residual, f.second.residual);
}

std::string failure_tag(const NumericalError& e) {
  if (dynamic_cast<const GrazingRoot*>(&e)) return "grazing-root";
  if (dynamic_cast<const NoContraction*>(&e)) return "no-contraction";
  if (dynamic_cast<const NoShellReturn*>(&e)) return "no-shell-return";
  if (dynamic_cast<const FoldOver*>(&e)) return "fold-over";
  if (dynamic_cast<const SpacelikeMomentum*>(&e)) return "spacelike-momentum";
  if (dynamic_cast<const SingularA*>(&e)) return "singular-a";
  return "numerical-failure";
}

bool needs_worldlines(const std::string& name) {
  return name != "free-propagator" && name != "gaussian-check";
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> list{
      {"action-eval", "Fokker action breakdown of the two initial worldlines"},
      {"invariance-sweep", "action change and gauge-term mismatch under shift halving"},
      {"classical-orbit", "stationary worldlines from the initial guess"},
      {"free-propagator", "lattice and closed-form errors of the free evolution operator"},
      {"gaussian-check", "matrix Gaussian identity against damped quadrature"},
      {"perturbation-order", "first-order propagator and residual under charge halving"},
      {"proper-time-fix", "P_eps trajectories and shell-return proper times"},
  };
  return list;
}

void validate_scenario(const Scenario& sc) {
  const auto& cat = experiment_catalog();
  if (std::none_of(cat.begin(), cat.end(), [&](const auto& e) { return e.name == sc.experiment; }))
    throw ConfigError("unknown experiment '" + sc.experiment + "'");
  if (needs_worldlines(sc.experiment)) {
    build_worldline(sc.particle1, sc.nodes);
    build_worldline(sc.particle2, sc.nodes);
  }
}

ExperimentResult run_experiment(const Scenario& sc, const RunOptions& opts) {
  validate_scenario(sc);
  ExperimentResult result;
  result.scenario = sc.name;
  result.experiment = sc.experiment;
  result.status = "ok";
  Context c{sc, opts.out.value_or(sc.output) / sc.name, opts.seed.value_or(sc.seed), opts.jobs, result};
  fs::create_directories(c.dir);
  try {
    if (sc.experiment == "free-propagator") {
      free_propagator(c);
    } else if (sc.experiment == "gaussian-check") {
      gaussian_check(c);
    } else {
      const auto w1 = build_worldline(sc.particle1, sc.nodes);
      const auto w2 = build_worldline(sc.particle2, sc.nodes);
      if (sc.experiment == "action-eval") action_eval(c, w1, w2);
      else if (sc.experiment == "invariance-sweep") invariance_sweep(c, w1, w2);
      else if (sc.experiment == "classical-orbit") classical_orbit(c, w1, w2);
      else if (sc.experiment == "perturbation-order") perturbation_order(c, w1, w2);
      else proper_time_fix(c, w1, w2);
    }
  } catch (const NumericalError& e) {
    result.status = failure_tag(e);
    result.numerical_failure = true;
    result.metric_name = "error";
    result.metric = std::numeric_limits<double>::quiet_NaN();
    result.message = e.what();
  }
  return result;
}

std::string summary_header() { return "scenario,experiment,status,metric_name,metric"; }

std::string summary_line(const ExperimentResult& r) {
  return join({r.scenario, r.experiment, r.status, r.metric_name, fmt_real(r.metric)});
}

}  // namespace fokker
