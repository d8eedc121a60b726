#pragma once

#include <functional>
#include <string>
#include <vector>

namespace uwdm {

// Objective callback: fills grad (same length as x) and returns the value.
using Objective =
    std::function<double(const std::vector<double>&, std::vector<double>&)>;

struct QuasiNewtonOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;  // infinity norm of the projected gradient
  // Relative function-decrease stop: an accepted step that lowers the value
  // by less than value_tolerance * max(|f|, 1) ends the iteration as
  // converged. Zero disables the test.
  double value_tolerance = 2.5e-9;
  int history = 8;  // limited-memory pairs kept
  double armijo_c = 1e-4;
  double min_step = 1e-14;
};

struct QuasiNewtonReport {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string stop_reason;
};

// Minimises fn over the box [lower, upper] with a projected limited-memory
// quasi-Newton iteration: two-loop BFGS direction restricted to the inactive
// set, projected backtracking line search, curvature-guarded updates.
QuasiNewtonReport minimize_box(const Objective& fn, std::vector<double> x0,
                               const std::vector<double>& lower,
                               const std::vector<double>& upper,
                               const QuasiNewtonOptions& options = {});

}  // namespace uwdm
