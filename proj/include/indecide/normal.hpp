#pragma once

namespace indecide {

/// Standard normal density.
double normal_pdf(double x);

/// Upper tail P(xi >= t) of a standard normal xi.
///
/// Accurate to about one part in 1e15 (relative) for |t| <= 40. Beyond that the
/// upper bound exp(-t^2/2) / (sqrt(2 pi) t) of the Gaussian tail sandwich is
/// returned, which underflows to zero in double precision anyway; use
/// log_normal_tail() when the magnitude of such tails matters.
double normal_tail(double t);

/// Natural log of normal_tail(t), accurate far into the tail (t up to ~1e150).
double log_normal_tail(double t);

/// P(a <= xi < b). Stays accurate when the interval is narrow and sits far from
/// zero, where the difference of two tails would cancel.
double normal_interval(double a, double b);

/// Inverse of normal_tail: the x with P(xi >= x) = p. Throws DomainError
/// unless 0 < p < 1.
double normal_quantile(double p);

/// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

}  // namespace indecide
