#include "fwmc/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fwmc/error.hpp"

namespace fwmc {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("probability must lie in (0,1)");

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }

  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

namespace {

// Continued fraction for I_x(a,b) (modified Lentz); converges quickly for
// x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  constexpr int max_iter = 100000;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  return h;
}

}  // namespace

double regularized_beta(double a, double b, double x, double y) {
  if (!(a > 0.0 && b > 0.0)) throw Error("beta parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

namespace {

// P(T > t) for t >= 0.
double t_upper_tail(double t, double df) {
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  return 0.5 * regularized_beta(0.5 * df, 0.5, x, y);
}

double log_t_density(double t, double df) {
  return std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
         0.5 * std::log(df * std::numbers::pi) -
         0.5 * (df + 1.0) * std::log1p(t * t / df);
}

}  // namespace

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw Error("degrees of freedom must be positive");
  if (std::isnan(t)) return t;
  const double tail = t_upper_tail(std::abs(t), df);
  return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double df, double p) {
  if (!(df >= 1.0)) throw Error("degrees of freedom must be at least 1");
  if (!(p > 0.0 && p < 1.0)) throw Error("probability must lie in (0,1)");
  if (p == 0.5) return 0.0;

  const bool upper = p > 0.5;
  // Upper-tail mass to match; computed without cancellation.
  const double target = upper ? 1.0 - p : p;

  double t;
  if (df == 1.0) {
    t = std::tan(std::numbers::pi * (0.5 - target));
  } else if (df == 2.0) {
    const double u = 1.0 - 2.0 * target;
    t = u / std::sqrt(2.0 * target * (1.0 - target));
  } else {
    // Cornish-Fisher start, then Newton on log P(T > t) with a bisection
    // bracket to keep the iterate sane.
    const double z = -normal_quantile(target);
    t = z + (z * z * z + z) / (4.0 * df);
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    const double log_target = std::log(target);
    for (int iter = 0; iter < 200; ++iter) {
      const double tail = t_upper_tail(t, df);
      const double f = std::log(tail) - log_target;
      if (f > 0.0) {
        lo = t;
      } else {
        hi = t;
      }
      if (f == 0.0) break;
      const double slope = -std::exp(log_t_density(t, df)) / tail;
      double next = t - f / slope;
      if (!(next > lo && next < hi)) {
        next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * std::max(t, 1.0);
      }
      if (std::abs(next - t) <= 1e-15 * std::abs(next)) {
        t = next;
        break;
      }
      t = next;
    }
  }
  return upper ? t : -t;
}

}  // namespace fwmc
