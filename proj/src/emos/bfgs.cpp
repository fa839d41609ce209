/*
 * (C) Copyright 2026 The adaptive-emos authors.
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "bfgs.hpp"

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <memory>
#include <mutex>

namespace aemos::emos::detail {

namespace {

double f_only(const gsl_vector* x, void* params) {
  const auto& f = *static_cast<const Objective*>(params);
  return f(std::span<const double>(x->data, x->size), {});
}

void df_only(const gsl_vector* x, void* params, gsl_vector* g) {
  const auto& f = *static_cast<const Objective*>(params);
  f(std::span<const double>(x->data, x->size), std::span<double>(g->data, g->size));
}

void f_and_df(const gsl_vector* x, void* params, double* value, gsl_vector* g) {
  const auto& f = *static_cast<const Objective*>(params);
  *value = f(std::span<const double>(x->data, x->size), std::span<double>(g->data, g->size));
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fdfminimizer* m) const { gsl_multimin_fdfminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

}  // namespace

BfgsResult minimize_bfgs(const Objective& f, std::vector<double> x0, int max_iterations,
                         double f_tol, double g_tol) {
  static std::once_flag quiet;
  std::call_once(quiet, [] { gsl_set_error_handler_off(); });

  const std::size_t n = x0.size();
  std::unique_ptr<gsl_vector, VectorDeleter> start(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) gsl_vector_set(start.get(), i, x0[i]);

  gsl_multimin_function_fdf fdf;
  fdf.n = n;
  fdf.f = f_only;
  fdf.df = df_only;
  fdf.fdf = f_and_df;
  fdf.params = const_cast<Objective*>(&f);

  std::unique_ptr<gsl_multimin_fdfminimizer, MinimizerDeleter> m(
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n));
  gsl_multimin_fdfminimizer_set(m.get(), &fdf, start.get(), 0.1, 0.1);

  BfgsResult out;
  out.initial_f = m->f;
  double previous = m->f;
  if (gsl_blas_dnrm2(m->gradient) < g_tol) out.converged = true;
  while (!out.converged && out.iterations < max_iterations) {
    const int status = gsl_multimin_fdfminimizer_iterate(m.get());
    if (status == GSL_ENOPROG) {
      // The line search cannot lower f any further at working precision.
      out.converged = true;
      break;
    }
    if (status != GSL_SUCCESS) break;
    ++out.iterations;
    out.trace.push_back(m->f);
    if (previous - m->f < f_tol || gsl_blas_dnrm2(m->gradient) < g_tol) out.converged = true;
    previous = m->f;
  }

  out.f = m->f;
  out.x.assign(m->x->data, m->x->data + n);
  return out;
}

}  // namespace aemos::emos::detail
