/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace aemos::emos::detail {

/// f(x, grad) returns the objective and writes the gradient.
using Objective = std::function<double(std::span<const double>, std::span<double>)>;

struct BfgsResult {
  std::vector<double> x;
  double f = 0.0;
  double initial_f = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

/// GSL vector_bfgs2 driven until the objective improves by less than
/// f_tol in one iteration, the gradient norm drops below g_tol, or the line
/// search reports no further progress.
BfgsResult minimize_bfgs(const Objective& f, std::vector<double> x0, int max_iterations,
                         double f_tol, double g_tol);

}  // namespace aemos::emos::detail
