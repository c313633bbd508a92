#pragma once

// Complete elliptic integral K, the Grötzsch module function mu, and Phi / Psi.

#include <cmath>
#include <string>

#include "ringmod/errors.hpp"
#include "ringmod/geometry.hpp"

namespace ringmod {

struct elliptic_value {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline elliptic_value agm_iterate(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw rejection("agm: arguments must be positive and finite");
  elliptic_value out;
  for (out.iterations = 0; out.iterations < 64; ++out.iterations) {
    if (std::abs(a - b) <= 1e-15 * std::max(a, b)) {
      out.converged = true;
      break;
    }
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  out.value = 0.5 * (a + b);
  return out;
}

inline double agm(double a, double b) { return agm_iterate(a, b).value; }

namespace detail {
// sqrt(1 - k^2) without cancellation near k = 1.
inline double complementary(double k) { return std::sqrt((1.0 - k) * (1.0 + k)); }
}  // namespace detail

inline double ellip_k(double k) {
  if (!(k >= 0.0) || !(k < 1.0)) throw rejection("ellip_k: modulus must lie in [0, 1)");
  return pi / (2.0 * agm(1.0, detail::complementary(k)));
}

/// mu(r) = (pi/2) K(r')/K(r), written through agm so that neither end loses precision.
inline double mu(double r) {
  if (!(r > 0.0) || !(r < 1.0)) throw rejection("mu: argument must lie in (0, 1)");
  return 0.5 * pi * agm(1.0, detail::complementary(r)) / agm(1.0, r);
}

/// log Phi(P) = mu(1/P).
inline double log_grotzsch_phi(double P) {
  if (!(P > 1.0) || !std::isfinite(P)) throw rejection("grotzsch_phi: P must exceed 1");
  return mu(1.0 / P);
}

inline double grotzsch_phi(double P) { return std::exp(log_grotzsch_phi(P)); }

/// log Psi(P) = 2 mu(1/sqrt(1+P)).
inline double log_teich_psi(double P) {
  if (!(P > 0.0) || !std::isfinite(P)) throw rejection("teich_psi: P must be positive");
  return 2.0 * mu(1.0 / std::sqrt(1.0 + P));
}

inline double teich_psi(double P) { return std::exp(log_teich_psi(P)); }

}  // namespace ringmod
