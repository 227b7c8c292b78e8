#pragma once

namespace platsim {

/// Regularized incomplete beta function I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `df` degrees of freedom (df >= 1).
double student_t_cdf(double t, double df);

}  // namespace platsim
