#include "uwdm/quasi_newton.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

namespace uwdm {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void project(std::vector<double>& x, const std::vector<double>& lo,
             const std::vector<double>& hi) {
  for (size_t i = 0; i < x.size(); ++i)
    x[i] = std::clamp(x[i], lo[i], hi[i]);
}

// Gradient with the components that push out of the box zeroed; its norm is
// the first-order optimality measure on the feasible set.
std::vector<double> projected_gradient(const std::vector<double>& x,
                                       const std::vector<double>& g,
                                       const std::vector<double>& lo,
                                       const std::vector<double>& hi) {
  std::vector<double> pg(g);
  for (size_t i = 0; i < x.size(); ++i) {
    bool at_lo = x[i] <= lo[i] && g[i] > 0.0;
    bool at_hi = x[i] >= hi[i] && g[i] < 0.0;
    if (at_lo || at_hi) pg[i] = 0.0;
  }
  return pg;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

}  // namespace

QuasiNewtonReport minimize_box(const Objective& fn, std::vector<double> x0,
                               const std::vector<double>& lower,
                               const std::vector<double>& upper,
                               const QuasiNewtonOptions& options) {
  const size_t n = x0.size();
  if (lower.size() != n || upper.size() != n)
    throw std::invalid_argument("minimize_box: bound vectors do not match x");
  for (size_t i = 0; i < n; ++i)
    if (!(lower[i] <= upper[i]))
      throw std::invalid_argument("minimize_box: lower bound exceeds upper at "
                                  "index " +
                                  std::to_string(i));
  if (options.history < 1 || options.max_iterations < 1)
    throw std::invalid_argument("minimize_box: invalid options");

  project(x0, lower, upper);

  QuasiNewtonReport report;
  report.x = std::move(x0);

  std::vector<double> g(n), g_new(n);
  double f = fn(report.x, g);

  std::deque<Pair> history;
  double gamma = 1.0;  // initial inverse-Hessian scale

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    report.iterations = iter;
    auto pg = projected_gradient(report.x, g, lower, upper);
    if (inf_norm(pg) < options.gradient_tolerance) {
      report.converged = true;
      report.stop_reason = "projected gradient below tolerance";
      break;
    }

    // two-loop recursion on the projected gradient
    std::vector<double> d(pg);
    std::vector<double> alpha(history.size());
    for (size_t k = history.size(); k-- > 0;) {
      alpha[k] = history[k].rho * dot(history[k].s, d);
      for (size_t i = 0; i < n; ++i) d[i] -= alpha[k] * history[k].y[i];
    }
    for (size_t i = 0; i < n; ++i) d[i] *= gamma;
    for (size_t k = 0; k < history.size(); ++k) {
      double beta = history[k].rho * dot(history[k].y, d);
      for (size_t i = 0; i < n; ++i)
        d[i] += (alpha[k] - beta) * history[k].s[i];
    }
    for (double& v : d) v = -v;

    // zero direction components that would immediately leave the box, and
    // fall back to steepest descent if what is left is not a descent
    // direction
    for (size_t i = 0; i < n; ++i) {
      bool at_lo = report.x[i] <= lower[i] && d[i] < 0.0;
      bool at_hi = report.x[i] >= upper[i] && d[i] > 0.0;
      if (at_lo || at_hi) d[i] = 0.0;
    }
    bool steepest = false;
    if (dot(d, g) >= 0.0) {
      for (size_t i = 0; i < n; ++i) d[i] = -pg[i];
      steepest = true;
    }

    double step = 1.0;
    if (iter == 0) step = std::min(1.0, 1.0 / std::max(1.0, inf_norm(pg)));

    std::vector<double> x_new(n);
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      for (size_t i = 0; i < n; ++i) x_new[i] = report.x[i] + step * d[i];
      project(x_new, lower, upper);
      double pred = 0.0;  // g . (x_new - x), the projection-aware model drop
      for (size_t i = 0; i < n; ++i) pred += g[i] * (x_new[i] - report.x[i]);
      if (pred >= 0.0) {
        step *= 0.5;
        if (step < options.min_step) break;
        continue;
      }
      f_new = fn(x_new, g_new);
      if (f_new <= f + options.armijo_c * pred) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < options.min_step) break;
    }

    if (!accepted) {
      if (!steepest) {
        // retry this iteration along the projected gradient
        history.clear();
        gamma = 1.0;
        for (size_t i = 0; i < n; ++i) d[i] = -pg[i];
        step = std::min(1.0, 1.0 / std::max(1.0, inf_norm(pg)));
        for (int ls = 0; ls < 60 && !accepted; ++ls) {
          for (size_t i = 0; i < n; ++i) x_new[i] = report.x[i] + step * d[i];
          project(x_new, lower, upper);
          double pred = 0.0;
          for (size_t i = 0; i < n; ++i)
            pred += g[i] * (x_new[i] - report.x[i]);
          if (pred < 0.0) {
            f_new = fn(x_new, g_new);
            if (f_new <= f + options.armijo_c * pred) accepted = true;
          }
          if (!accepted) step *= 0.5;
          if (step < options.min_step) break;
        }
      }
      if (!accepted) {
        report.stop_reason = "line search could not make progress";
        break;
      }
    }

    // curvature-guarded limited-memory update
    Pair pair;
    pair.s.resize(n);
    pair.y.resize(n);
    for (size_t i = 0; i < n; ++i) {
      pair.s[i] = x_new[i] - report.x[i];
      pair.y[i] = g_new[i] - g[i];
    }
    double sy = dot(pair.s, pair.y);
    double ss = dot(pair.s, pair.s);
    double yy = dot(pair.y, pair.y);
    if (sy > 1e-10 * std::sqrt(ss * yy) && yy > 0.0) {
      pair.rho = 1.0 / sy;
      gamma = sy / yy;
      history.push_back(std::move(pair));
      while (static_cast<int>(history.size()) > options.history)
        history.pop_front();
    }

    double drop = f - f_new;
    report.x = x_new;
    f = f_new;
    g = g_new;
    report.iterations = iter + 1;

    if (options.value_tolerance > 0.0 &&
        drop <= options.value_tolerance * std::max(std::abs(f), 1.0)) {
      report.converged = true;
      report.stop_reason = "function decrease below tolerance";
      break;
    }
  }

  if (!report.converged && report.stop_reason.empty())
    report.stop_reason = "iteration limit reached";
  report.value = f;
  return report;
}

}  // namespace uwdm
