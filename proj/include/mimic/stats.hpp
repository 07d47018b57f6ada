#pragma once

#include <cstddef>

namespace mimic {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in
/// [0, 1], evaluated with the Lentz continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-tailed Student-t p-value: p = I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_tailed_p(double t, std::size_t df);

}  // namespace mimic
