#include "fokker/worldline.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fokker/errors.hpp"
#include "fokker/format.hpp"

namespace fokker {

namespace {

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }
double smoothstep_rate(double t) { return 6.0 * t * (1.0 - t); }

}  // namespace

// ---------------------------------------------------------------- profile

SwitchingProfile SwitchingProfile::always_on(double e) {
  SwitchingProfile p;
  p.e_max = e;
  return p;
}

SwitchingProfile SwitchingProfile::pulse(double e, double s_on, double s_off, double ramp) {
  if (!(s_on < s_off)) throw ConfigError("switching profile needs s_on < s_off");
  if (!(ramp > 0.0)) throw ConfigError("switching profile needs ramp > 0");
  if (std::isfinite(s_on) && std::isfinite(s_off) && 2.0 * ramp > s_off - s_on)
    throw ConfigError("switching ramps overlap: 2*ramp > s_off - s_on");
  return {e, s_on, s_off, ramp};
}

double SwitchingProfile::charge(double s) const {
  if (e_max == 0.0 || s <= s_on || s >= s_off) return 0.0;
  if (s < s_on + ramp) return e_max * smoothstep((s - s_on) / ramp);
  if (s > s_off - ramp) return e_max * smoothstep((s_off - s) / ramp);
  return e_max;
}

double SwitchingProfile::rate(double s) const {
  if (e_max == 0.0 || s <= s_on || s >= s_off) return 0.0;
  if (s < s_on + ramp) return e_max * smoothstep_rate((s - s_on) / ramp) / ramp;
  if (s > s_off - ramp) return -e_max * smoothstep_rate((s_off - s) / ramp) / ramp;
  return 0.0;
}

SwitchingProfile SwitchingProfile::scaled(double factor) const {
  SwitchingProfile p = *this;
  p.e_max *= factor;
  return p;
}

// -------------------------------------------------------------- worldline

Worldline::Worldline(std::vector<FourVector> points, std::vector<double> lapse, double mass,
                     SwitchingProfile profile)
    : points_(std::move(points)), lapse_(std::move(lapse)), mass_(mass), profile_(profile) {
  if (points_.size() < 3) throw ConfigError("worldline needs at least 3 nodes");
  if (lapse_.size() != points_.size()) throw ConfigError("lapse and point counts differ");
  if (!(mass_ > 0.0)) throw ConfigError("worldline mass must be positive");
  for (const auto& p : points_)
    if (!p.finite()) throw ConfigError("worldline point is not finite");
  for (double n : lapse_)
    if (!(n > 0.0) || !std::isfinite(n)) throw ConfigError("lapse samples must be positive");
  step_ = 1.0 / static_cast<double>(points_.size() - 1);
  node_s_.resize(points_.size());
  node_s_[0] = 0.0;
  for (std::size_t k = 0; k + 1 < points_.size(); ++k)
    node_s_[k + 1] = node_s_[k] + step_ * 0.5 * (lapse_[k] + lapse_[k + 1]);
}

Worldline Worldline::straight(const FourVector& start, const FourVector& end, std::size_t nodes,
                              double mass, SwitchingProfile profile) {
  if (nodes < 3) throw ConfigError("worldline needs at least 3 nodes");
  const double len2 = interval_sq(end, start);
  if (!(len2 > 0.0)) throw ConfigError("straight worldline must be timelike");
  std::vector<FourVector> pts(nodes);
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(nodes - 1);
    pts[k] = start + t * (end - start);
  }
  std::vector<double> lapse(nodes, std::sqrt(len2) / mass);
  return Worldline(std::move(pts), std::move(lapse), mass, profile);
}

CellPoint Worldline::locate(double tau) const {
  const std::size_t last = cells() - 1;
  if (tau <= 0.0) return {0, 0.0};
  if (tau >= 1.0) return {last, 1.0};
  const double x = tau / step_;
  std::size_t c = std::min(static_cast<std::size_t>(x), last);
  return {c, x - static_cast<double>(c)};
}

FourVector Worldline::at(CellPoint p) const {
  return points_[p.cell] + p.u * cell_delta(p.cell);
}

double Worldline::lapse_at(CellPoint p) const {
  return lapse_[p.cell] + p.u * (lapse_[p.cell + 1] - lapse_[p.cell]);
}

double Worldline::proper_time_at(CellPoint p) const {
  const double n0 = lapse_[p.cell];
  const double dn = lapse_[p.cell + 1] - n0;
  return node_s_[p.cell] + step_ * p.u * (n0 + 0.5 * p.u * dn);
}

Worldline Worldline::with_points(std::vector<FourVector> points) const {
  return Worldline(std::move(points), lapse_, mass_, profile_);
}

Worldline Worldline::with_lapse(std::vector<double> lapse) const {
  return Worldline(points_, std::move(lapse), mass_, profile_);
}

Worldline Worldline::with_profile(SwitchingProfile profile) const {
  return Worldline(points_, lapse_, mass_, profile);
}

double proper_time(const Worldline& w, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("proper_time: tau outside [0,1]");
  return w.proper_time_at(w.locate(tau));
}

FourVector velocity(const Worldline& w, std::size_t k) {
  const auto& x = w.points();
  const std::size_t n = x.size();
  const double h = w.step();
  if (k == 0) return (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h);
  if (k == n - 1) return (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * h);
  return (x[k + 1] - x[k - 1]) / (2.0 * h);
}

std::vector<FourVector> node_velocities(const Worldline& w) {
  std::vector<FourVector> v(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) v[k] = velocity(w, k);
  return v;
}

// ------------------------------------------------------------ shift field

ShiftField::ShiftField(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 3) throw ConfigError("shift field needs at least 3 samples");
  double scale = 0.0;
  for (double v : values_) {
    if (!std::isfinite(v)) throw ConfigError("shift field sample is not finite");
    scale = std::max(scale, std::abs(v));
  }
  // Analytic shapes like sin(pi tau) land on ~1e-16 at the ends.
  const double slack = 1e-12 * std::max(scale, 1.0);
  if (std::abs(values_.front()) > slack || std::abs(values_.back()) > slack)
    throw ConfigError("shift field must vanish at both endpoints");
  values_.front() = 0.0;
  values_.back() = 0.0;
}

ShiftField ShiftField::zero(std::size_t nodes) { return ShiftField(std::vector<double>(nodes, 0.0)); }

double ShiftField::at(CellPoint p) const {
  return values_[p.cell] + p.u * (values_[p.cell + 1] - values_[p.cell]);
}

double ShiftField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> ShiftField::tau_derivative(double step) const {
  const std::size_t n = values_.size();
  std::vector<double> d(n);
  d[0] = (values_[1] - values_[0]) / step;
  d[n - 1] = (values_[n - 1] - values_[n - 2]) / step;
  for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (values_[k + 1] - values_[k - 1]) / (2.0 * step);
  return d;
}

std::vector<double> ShiftField::proper_time_rate(const Worldline& w) const {
  if (w.size() != size()) throw ConfigError("shift field and worldline grids differ");
  auto d = tau_derivative(w.step());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] /= w.lapse_at(k);
  return d;
}

ShiftField ShiftField::scaled(double factor) const {
  std::vector<double> v = values_;
  for (double& x : v) x *= factor;
  return ShiftField(std::move(v));
}

// ------------------------------------------------------- reparametrization

Worldline reparametrize(const Worldline& w, const ShiftField& eps) {
  const std::size_t n = w.size();
  if (eps.size() != n) throw ConfigError("shift field and worldline grids differ");
  const double h = w.step();
  const auto deps = eps.tau_derivative(h);

  std::vector<double> lapse(n);
  for (std::size_t k = 0; k < n; ++k) {
    lapse[k] = w.lapse_at(k) - deps[k];
    if (!(lapse[k] > 0.0)) throw FoldOver("reparametrized lapse is not positive");
  }

  const auto vel = node_velocities(w);
  std::vector<FourVector> pts(n);
  double prev = -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = w.tau(k) - eps[k] / w.lapse_at(k);
    if (!(target > prev) || target < 0.0 || target > 1.0)
      throw FoldOver("reparametrized grid is not monotone");
    prev = target;
    const CellPoint p = w.locate(target);
    const double u = p.u;
    const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    const double h10 = u * (1.0 - u) * (1.0 - u);
    const double h01 = u * u * (3.0 - 2.0 * u);
    const double h11 = u * u * (u - 1.0);
    pts[k] = h00 * w.point(p.cell) + (h10 * h) * vel[p.cell] + h01 * w.point(p.cell + 1) +
             (h11 * h) * vel[p.cell + 1];
  }
  return Worldline(std::move(pts), std::move(lapse), w.mass(), w.profile());
}

// ------------------------------------------------------------------- I/O

void write_worldline_table(std::ostream& os, const Worldline& w) {
  os << "# tau x0 x1 x2 x3 N\n";
  for (std::size_t k = 0; k < w.size(); ++k) {
    const auto& p = w.point(k);
    os << fmt_real(w.tau(k)) << ' ' << fmt_real(p[0]) << ' ' << fmt_real(p[1]) << ' '
       << fmt_real(p[2]) << ' ' << fmt_real(p[3]) << ' ' << fmt_real(w.lapse_at(k)) << '\n';
  }
}

Worldline read_worldline_table(std::istream& is, double mass, SwitchingProfile profile) {
  std::vector<double> taus;
  std::vector<FourVector> pts;
  std::vector<double> lapse;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    double tau, t, x, y, z, n;
    if (!(row >> tau >> t >> x >> y >> z >> n))
      throw ConfigError("worldline table: malformed row " + std::to_string(lineno));
    taus.push_back(tau);
    pts.emplace_back(t, x, y, z);
    lapse.push_back(n);
  }
  if (pts.size() < 3) throw ConfigError("worldline table: fewer than 3 rows");
  const double h = 1.0 / static_cast<double>(pts.size() - 1);
  for (std::size_t k = 0; k < taus.size(); ++k)
    if (std::abs(taus[k] - static_cast<double>(k) * h) > 1e-9)
      throw ConfigError("worldline table: tau column is not the uniform grid on [0,1]");
  return Worldline(std::move(pts), std::move(lapse), mass, profile);
}

}  // namespace fokker
