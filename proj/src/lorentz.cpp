#include "landau/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "landau/fft_conv.hpp"

namespace landau {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_params(double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0))
    throw std::invalid_argument("lorentz_norm: requires p >= 1 and q >= 1");
}

// Sorted descending distinct |values| with integer multiplicities.
struct ValueCounts {
  std::vector<double> val;
  std::vector<std::int64_t> count;
};

ValueCounts value_counts(const ScalarField& f) {
  std::vector<double> a;
  a.reserve(f.v.size());
  for (double v : f.v) {
    const double m = std::abs(v);
    if (m > 0.0) a.push_back(m);
  }
  std::sort(a.begin(), a.end(), std::greater<double>());
  ValueCounts vc;
  for (std::size_t i = 0; i < a.size();) {
    std::size_t j = i;
    while (j < a.size() && a[j] == a[i]) ++j;
    vc.val.push_back(a[i]);
    vc.count.push_back(static_cast<std::int64_t>(j - i));
    i = j;
  }
  return vc;
}

}  // namespace

double StepFunction::value(double x) const {
  // first piece with x < t[k]
  const auto it = std::upper_bound(t.begin(), t.end(), x);
  if (it == t.end()) return 0.0;
  return y[static_cast<std::size_t>(it - t.begin())];
}

StepFunction rearrangement(const ScalarField& f) {
  const ValueCounts vc = value_counts(f);
  const double hd = f.grid.cell_volume();
  StepFunction s;
  s.t.reserve(vc.val.size());
  s.y = vc.val;
  std::int64_t cum = 0;
  for (std::size_t k = 0; k < vc.val.size(); ++k) {
    cum += vc.count[k];
    // product of the same integers everywhere keeps breakpoints bit-exact
    s.t.push_back(static_cast<double>(cum) * hd);
  }
  return s;
}

StepFunction distribution(const ScalarField& f) {
  const ValueCounts vc = value_counts(f);
  const double hd = f.grid.cell_volume();
  StepFunction s;
  // d_f drops at each distinct value: on [u_{j-1}, u_j) it equals
  // hd * #cells{|f| >= u_j}; ascending in s means reversing the sort.
  const std::size_t m = vc.val.size();
  s.t.resize(m);
  s.y.resize(m);
  std::int64_t cum = 0;
  // vc is descending; cumulative count from the top is #{|f| >= val[k]}
  std::vector<std::int64_t> ge(m);
  for (std::size_t k = 0; k < m; ++k) {
    cum += vc.count[k];
    ge[k] = cum;
  }
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t k = m - 1 - j;  // ascending values
    s.t[j] = vc.val[k];
    s.y[j] = static_cast<double>(ge[k]) * hd;
  }
  return s;
}

StepFunction distribution_of(const StepFunction& rearr) {
  StepFunction s;
  const std::size_t m = rearr.t.size();
  s.t.resize(m);
  s.y.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t k = m - 1 - j;
    s.t[j] = rearr.y[k];  // drop thresholds are the rearrangement heights
    s.y[j] = rearr.t[k];  // measure above that height
  }
  return s;
}

double lorentz_norm(const StepFunction& rearr, double p, double q) {
  check_params(p, q);
  if (rearr.empty()) return 0.0;
  if (p == kInf) {
    if (q == kInf) return rearr.y.front();
    return kInf;  // int_0 f*(t)^q dt/t diverges for f* bounded below near 0
  }
  if (q == kInf) {
    double best = 0.0;
    for (std::size_t k = 0; k < rearr.t.size(); ++k)
      best = std::max(best, rearr.y[k] * std::pow(rearr.t[k], 1.0 / p));
    return best;
  }
  const double qp = q / p;
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < rearr.t.size(); ++k) {
    const double cur = std::pow(rearr.t[k], qp);
    acc += std::pow(rearr.y[k], q) * (cur - prev);
    prev = cur;
  }
  return std::pow(acc * (p / q), 1.0 / q);
}

double lorentz_norm(const ScalarField& f, double p, double q) {
  return lorentz_norm(rearrangement(f), p, q);
}

double lorentz_norm_via_distribution(const ScalarField& f, double p, double q) {
  check_params(p, q);
  if (p == kInf)
    throw std::invalid_argument("lorentz_norm_via_distribution: finite p only");
  const StepFunction d = distribution(f);
  if (d.empty()) return 0.0;
  if (q == kInf) {
    double best = 0.0;
    for (std::size_t j = 0; j < d.t.size(); ++j)
      best = std::max(best, d.t[j] * std::pow(d.y[j], 1.0 / p));
    return best;
  }
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t j = 0; j < d.t.size(); ++j) {
    const double cur = std::pow(d.t[j], q);
    acc += std::pow(d.y[j], q / p) * (cur - prev);
    prev = cur;
  }
  return std::pow(acc * (p / q), 1.0 / q);
}

ScalarField riesz_potential(const ScalarField& g, double alpha) {
  const int d = g.grid.d;
  if (!(alpha > 0.0 && alpha < d))
    throw std::invalid_argument("riesz_potential: requires 0 < alpha < d");
  PaddedConv conv(g.grid);
  const double rho = equal_volume_ball_radius(g.grid);
  const double origin = (d / alpha) * std::pow(rho, alpha - d);
  KernelSpectrum spec = conv.kernel_spectrum([&](const std::array<double, 3>& z) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += z[a] * z[a];
    if (r2 == 0.0) return origin;
    return std::pow(r2, 0.5 * (alpha - d));
  });
  conv.load(g);
  return conv.apply(spec);
}

double holder_lorentz_ratio(const ScalarField& f, const ScalarField& g, double p, double q) {
  if (!(p > 1.0 && p < kInf)) throw std::invalid_argument("holder: requires 1 < p < inf");
  check_params(p, q);
  const double pp = p / (p - 1.0);
  const double qq = q == kInf ? 1.0 : (q == 1.0 ? kInf : q / (q - 1.0));
  const double lhs = std::abs(inner(f, g));
  const double rhs = lorentz_norm(f, p, q) * lorentz_norm(g, pp, qq);
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : kInf;
  return lhs / rhs;
}

double interpolation_ratio(const ScalarField& f, double p, double q, double p1, double p2) {
  if (!(p1 >= 1.0 && p1 < p && p < p2 && p2 < kInf))
    throw std::invalid_argument("interpolation_ratio: requires 1 <= p1 < p < p2 < inf");
  check_params(p, q);
  const double theta = (1.0 / p - 1.0 / p2) / (1.0 / p1 - 1.0 / p2);
  const double geo = std::pow(p1, theta) * std::pow(p2, 1.0 - theta);
  const double c = q == kInf ? 1.0 : std::pow(p / geo, 1.0 / q);
  const StepFunction r = rearrangement(f);
  const double rhs =
      c * std::pow(lorentz_norm(r, p1, q), theta) * std::pow(lorentz_norm(r, p2, q), 1.0 - theta);
  const double lhs = lorentz_norm(r, p, q);
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : kInf;
  return lhs / rhs;
}

double sobolev_lorentz_ratio(const ScalarField& f, double q) {
  const int d = f.grid.d;
  if (!(q >= 1.0 && q < d))
    throw std::invalid_argument("sobolev_lorentz_ratio: requires 1 <= q < d");
  const double qstar = q * d / (d - q);
  const VectorField grad = gradient(f);
  std::vector<double> terms(f.v.size());
  for (std::size_t id = 0; id < f.v.size(); ++id) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += grad.comp[a][id] * grad.comp[a][id];
    terms[id] = std::pow(s, 0.5 * q);
  }
  const double grad_q = std::pow(det_sum(terms) * f.grid.cell_volume(), 1.0 / q);
  if (grad_q == 0.0) return 0.0;
  return lorentz_norm(f, qstar, q) / grad_q;
}

}  // namespace landau
