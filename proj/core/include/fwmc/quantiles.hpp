#pragma once

namespace fwmc {

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF (Wichura's AS 241, PPND16); |error| < 1e-15
// over the double range. Throws fwmc::Error for p outside (0,1).
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b). y must equal 1 - x; passing it
// separately keeps precision when x is close to 1.
double regularized_beta(double a, double b, double x, double y);

double student_t_cdf(double t, double df);

// Inverse Student t CDF. Closed forms for df = 1, 2; otherwise a
// safeguarded Newton iteration on the log tail probability, where the tail
// comes from the incomplete beta function. Relative error well below 1e-10.
double student_t_quantile(double df, double p);

}  // namespace fwmc
