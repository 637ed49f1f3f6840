//   Copyright 2026 The QuSquare Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qusquare/common.hpp"

namespace qusquare {

// Principal branch of the Lambert W function (Halley iteration).
inline double lambert_w(double x) {
  const double branch = -1.0 / std::exp(1.0);
  if (x < branch - 1e-15) throw std::domain_error("lambert_w is undefined below -1/e");
  if (x <= branch) return -1.0;
  if (x == 0.0) return 0.0;
  double w;
  if (x < -0.25) {
    const double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    w = std::log1p(x) * (1.0 - std::log1p(std::log1p(x)) / (2.0 + std::log1p(x)));
  } else {
    const double l1 = std::log(x), l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  for (int it = 0; it < 100; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  return w;
}

// Bessel function of the first kind J_k(t) by Miller's downward recurrence,
// normalized with J_0 + 2 sum_m J_2m = 1.
inline double bessel_j(int k, double t) {
  if (k < 0) throw std::domain_error("bessel_j needs k >= 0");
  if (t == 0.0) return k == 0 ? 1.0 : 0.0;
  const double ax = std::abs(t);
  const double top = std::max(double(k), ax);
  int m = int(top + 30.0 + std::sqrt(60.0 * top));
  m += m & 1;
  double jp1 = 0.0, j = 1e-300, norm = 0.0, ans = 0.0;
  for (int n = m; n > 0; --n) {
    const double jm1 = 2.0 * n / ax * j - jp1;
    jp1 = j;
    j = jm1;
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp1 *= 1e-250;
      ans *= 1e-250;
      norm *= 1e-250;
    }
    // j now holds J_{n-1} up to scale
    if (n - 1 == k) ans = j;
    if (n - 1 > 0 && (n - 1) % 2 == 0) norm += 2.0 * j;
  }
  if (k == m) ans = 0.0;
  norm += j;
  double r = ans / norm;
  if (t < 0.0 && (k & 1)) r = -r;
  return r;
}

enum class Parity { Even = 0, Odd = 1 };

// Coefficients of T_{2k+p}, k = 0..size-1, already divided by (1 + eps0/4).
struct ChebyshevExpansion {
  Parity parity = Parity::Even;
  std::vector<double> coeffs;

  std::size_t degree() const { return coeffs.empty() ? 0 : 2 * (coeffs.size() - 1) + std::size_t(parity); }

  // Clenshaw evaluation at x in [-1, 1].
  double operator()(double x) const {
    const std::size_t n = degree();
    std::vector<double> a(n + 1, 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k) a[2 * k + std::size_t(parity)] = coeffs[k];
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t i = n; i >= 1; --i) {
      const double b = 2.0 * x * b1 - b2 + a[i];
      b2 = b1;
      b1 = b;
    }
    return x * b1 - b2 + a[0];
  }
};

// Jacobi-Anger expansions of cos(t x) (even, degree d) and sin(t x) (odd,
// degree d+1).
inline ChebyshevExpansion chebyshev_coeffs(double t, int d, Parity parity, double eps0) {
  if (d < 0 || d % 2) throw std::invalid_argument("truncation degree must be even and non-negative");
  ChebyshevExpansion e;
  e.parity = parity;
  const double scale = 1.0 / (1.0 + eps0 / 4.0);
  for (int k = 0; k <= d / 2; ++k) {
    const double sgn = (k % 2) ? -1.0 : 1.0;
    double c;
    if (parity == Parity::Even)
      c = k == 0 ? bessel_j(0, t) : 2.0 * sgn * bessel_j(2 * k, t);
    else
      c = 2.0 * sgn * bessel_j(2 * k + 1, t);
    e.coeffs.push_back(c * scale);
  }
  return e;
}

// Max over a uniform grid of |expansion - target/(1+eps0/4)|.
inline double expansion_error(const ChebyshevExpansion& e, double t, double eps0, std::size_t points = 10000) {
  const double scale = 1.0 / (1.0 + eps0 / 4.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = -1.0 + 2.0 * double(i) / double(points - 1);
    const double target = (e.parity == Parity::Even ? std::cos(t * x) : std::sin(t * x)) * scale;
    worst = std::max(worst, std::abs(e(x) - target));
  }
  return worst;
}

// Even degree from d = 2 floor(log(16/(5 eps0)) / (2 W(log(16/(5 eps0)) / |t|))),
// doubled until both truncated expansions meet eps0 on a 10^4-point grid.
inline int truncation_degree(double t, double eps0) {
  if (!(t > 0.0)) throw std::domain_error("truncation_degree needs t > 0");
  if (!(eps0 > 0.0)) throw std::domain_error("truncation_degree needs eps0 > 0");
  const double lg = std::log(16.0 / (5.0 * eps0));
  int d = 2 * int(std::floor(lg / (2.0 * lambert_w(lg / std::abs(t)))));
  d = std::max(d, 2);
  while (expansion_error(chebyshev_coeffs(t, d, Parity::Even, eps0), t, eps0) > eps0 ||
         expansion_error(chebyshev_coeffs(t, d, Parity::Odd, eps0), t, eps0) > eps0)
    d *= 2;
  return d;
}

// Unnormalized type-I DCT of a length 2l+1 vector:
// Y_k = y_0 + (-1)^k y_2l + 2 sum_{j=1}^{2l-1} y_j cos(pi j k / 2l).
inline std::vector<double> dct_type1(const std::vector<double>& y) {
  if (y.size() < 3 || y.size() % 2 == 0) throw std::invalid_argument("dct_type1 needs odd length >= 3");
  const std::size_t n = y.size() - 1;
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    double s = y[0] + ((k % 2) ? -y[n] : y[n]);
    for (std::size_t j = 1; j < n; ++j) s += 2.0 * y[j] * std::cos(PI * double(j * k % (2 * n)) / double(n));
    out[k] = s;
  }
  return out;
}

// Coefficient map F: reduced phases -> Chebyshev coefficients of the
// polynomial they realize, through node evaluation with 3x3 rotations,
// symmetric extension, DCT and parity selection.
inline std::vector<double> qsp_forward_map(const std::vector<double>& phi, Parity parity) {
  const std::size_t l = phi.size();
  if (l == 0) throw std::invalid_argument("empty phase vector");
  const int p = int(parity);
  std::vector<double> s(l + 1);
  for (std::size_t j = 0; j <= l; ++j) {
    const double th = PI * double(j) / double(2 * l);
    std::array<double, 3> v = p == 0 ? std::array<double, 3>{1.0, 0.0, 0.0}
                                     : std::array<double, 3>{std::cos(th), 0.0, std::sin(th)};
    const double c2 = std::cos(2 * th), s2 = std::sin(2 * th);
    for (std::size_t k = 0; k + 1 < l; ++k) {
      const double c = std::cos(2 * phi[k]), sn = std::sin(2 * phi[k]);
      const std::array<double, 3> r{c * v[0] - sn * v[1], sn * v[0] + c * v[1], v[2]};
      v = {c2 * r[0] - s2 * r[2], r[1], s2 * r[0] + c2 * r[2]};
    }
    s[j] = std::sin(2 * phi[l - 1]) * v[0] + std::cos(2 * phi[l - 1]) * v[1];
  }
  std::vector<double> y(2 * l + 1);
  for (std::size_t j = 0; j <= l; ++j) y[j] = s[j];
  for (std::size_t j = 1; j <= l; ++j) y[l + j] = (p ? -1.0 : 1.0) * s[l - j];
  auto big = dct_type1(y);
  const double n = double(2 * l);
  for (std::size_t k = 0; k < big.size(); ++k) big[k] /= (k == 0 || k + 1 == big.size()) ? 2.0 * n : n;
  std::vector<double> out(l);
  for (std::size_t k = 0; k < l; ++k) out[k] = big[2 * k + std::size_t(p)];
  return out;
}

struct PhaseSequence {
  Parity parity = Parity::Even;
  std::vector<double> reduced;  // phi_1 .. phi_l
  std::vector<double> full;
  int iterations = 0;
  double residual = 0.0;
};

// Symmetric extension with +pi/4 on both ends. Even parity has odd length
// 2l-1 and a doubled centre phase; odd parity repeats phi_1.
inline std::vector<double> full_phase_sequence(const std::vector<double>& reduced, Parity parity) {
  std::vector<double> r = reduced;
  const std::size_t l = r.size();
  r[l - 1] += PI / 4;
  std::vector<double> out;
  for (std::size_t k = l; k-- > 1;) out.push_back(r[k]);
  if (parity == Parity::Even) {
    out.push_back(2.0 * r[0]);
  } else {
    out.push_back(r[0]);
    out.push_back(r[0]);
  }
  for (std::size_t k = 1; k < l; ++k) out.push_back(r[k]);
  return out;
}

// Fixed-point iteration phi <- phi - (F(phi) - C)/2, stopping when the
// l1 residual drops below tol.
inline PhaseSequence solve_phases(const ChebyshevExpansion& c, double tol = 1e-10, int max_iter = 200000) {
  const std::size_t l = c.coeffs.size();
  if (l == 0) throw std::invalid_argument("empty coefficient vector");
  std::vector<double> phi(l, 0.0);
  std::vector<double> history;
  for (int it = 0; it <= max_iter; ++it) {
    const auto f = qsp_forward_map(phi, c.parity);
    double res = 0.0;
    for (std::size_t k = 0; k < l; ++k) res += std::abs(f[k] - c.coeffs[k]);
    history.push_back(res);
    if (!std::isfinite(res) || res > 1e6) throw SolverError("phase solver diverged", history);
    if (res < tol) {
      PhaseSequence out;
      out.parity = c.parity;
      out.reduced = phi;
      out.full = full_phase_sequence(phi, c.parity);
      out.iterations = it;
      out.residual = res;
      return out;
    }
    if (it == max_iter) break;
    for (std::size_t k = 0; k < l; ++k) phi[k] -= 0.5 * (f[k] - c.coeffs[k]);
  }
  throw SolverError("phase solver did not converge", history);
}

// Phases psi_0..psi_D for the reflection-type sequence
// e^{i psi_0 Z} R(x) e^{i psi_1 Z} ... R(x) e^{i psi_D Z}, R(x) = [[x, s], [s, -x]],
// whose top-left entry has real part equal to the polynomial encoded by
// `full`. This is the form realized by a Hermitian block encoding.
inline std::vector<double> reflection_phases(const std::vector<double>& full) {
  const std::size_t dd = full.size() - 1;
  std::vector<double> psi(full.size());
  if (dd == 0) {
    psi[0] = full[0] + PI;
    return psi;
  }
  const double beta = double(dd) * PI / 2 + ((dd % 2) ? 0.0 : PI);
  psi[0] = full[0] + PI / 4 + beta;
  for (std::size_t j = 1; j < dd; ++j) psi[j] = full[j] + PI / 2;
  psi[dd] = full[dd] + PI / 4;
  return psi;
}

// Top-left entry of the reflection-type sequence at scalar x.
inline std::complex<double> reflection_qsp_entry(const std::vector<double>& psi, double x) {
  using C = std::complex<double>;
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  // running row vector <0| M
  C a = std::polar(1.0, psi[0]), b = 0.0;
  for (std::size_t j = 1; j < psi.size(); ++j) {
    const C na = a * x + b * s, nb = a * s - b * x;
    a = na * std::polar(1.0, psi[j]);
    b = nb * std::polar(1.0, -psi[j]);
  }
  return a;
}

}  // namespace qusquare
