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

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "qusquare/qsp.hpp"

using namespace qusquare;

namespace {

// <0| e^{i a0 Z} W(x) e^{i a1 Z} ... W(x) e^{i ad Z} |0>, W(x) = [[x, i s], [i s, x]]
std::complex<double> wx_entry(const std::vector<double>& a, double x) {
  using M = Eigen::Matrix2cd;
  const double s = std::sqrt(1 - x * x);
  const std::complex<double> i(0, 1);
  auto ez = [&](double t) {
    M m;
    m << std::exp(i * t), 0, 0, std::exp(-i * t);
    return m;
  };
  M w;
  w << x, i * s, i * s, x;
  M u = ez(a[0]);
  for (std::size_t j = 1; j < a.size(); ++j) u = u * w * ez(a[j]);
  return u(0, 0);
}

std::complex<double> rx_entry(const std::vector<double>& a, double x) {
  using M = Eigen::Matrix2cd;
  const double s = std::sqrt(1 - x * x);
  const std::complex<double> i(0, 1);
  auto ez = [&](double t) {
    M m;
    m << std::exp(i * t), 0, 0, std::exp(-i * t);
    return m;
  };
  M r;
  r << x, s, s, -x;
  M u = ez(a[0]);
  for (std::size_t j = 1; j < a.size(); ++j) u = u * r * ez(a[j]);
  return u(0, 0);
}

}  // namespace

TEST(Qsp, LambertWGolden) {
  // scipy.special.lambertw
  EXPECT_NEAR(lambert_w(0.5), 0.35173371124919584, 1e-14);
  EXPECT_NEAR(lambert_w(1.0), 0.5671432904097838, 1e-14);
  EXPECT_NEAR(lambert_w(10.0), 1.7455280027406994, 1e-14);
  EXPECT_NEAR(lambert_w(100.0), 3.38563014029005, 1e-13);
  EXPECT_NEAR(lambert_w(-0.2), -0.2591711018190737, 1e-14);
  EXPECT_EQ(lambert_w(0.0), 0.0);
  for (double x : {0.01, 0.3, 2.0, 50.0, 1e4}) {
    const double w = lambert_w(x);
    EXPECT_NEAR(w * std::exp(w), x, 1e-12 * x);
  }
}

TEST(Qsp, BesselGolden) {
  // scipy.special.jv
  EXPECT_NEAR(bessel_j(0, 0.5), 0.938469807240813, 1e-14);
  EXPECT_NEAR(bessel_j(1, 1.0), 0.44005058574493355, 1e-14);
  EXPECT_NEAR(bessel_j(2, 3.7), 0.42832965620657576, 1e-14);
  EXPECT_NEAR(bessel_j(5, 0.1) / 2.603081790964442e-09, 1.0, 1e-12);
  EXPECT_NEAR(bessel_j(10, 2.0) / 2.5153862827167347e-07, 1.0, 1e-12);
  EXPECT_NEAR(bessel_j(0, 10.0), -0.24593576445134832, 1e-14);
  EXPECT_NEAR(bessel_j(3, 7.5), -0.2580609131934603, 1e-14);
  EXPECT_NEAR(bessel_j(20, 1.5) / 1.2689972189332553e-21, 1.0, 1e-11);
  EXPECT_EQ(bessel_j(0, 0.0), 1.0);
  EXPECT_EQ(bessel_j(3, 0.0), 0.0);
}

TEST(Qsp, ChebyshevMatchesTargetWithinEps0) {
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    const double tau = 2 / std::exp(1.0) * t;
    const int d = truncation_degree(tau, 7e-5);
    EXPECT_EQ(d % 2, 0);
    EXPECT_LE(expansion_error(chebyshev_coeffs(tau, d, Parity::Even, 7e-5), tau, 7e-5), 7e-5);
    EXPECT_LE(expansion_error(chebyshev_coeffs(tau, d, Parity::Odd, 7e-5), tau, 7e-5), 7e-5);
  }
  EXPECT_THROW(truncation_degree(0.0, 1e-3), std::domain_error);
  EXPECT_THROW(truncation_degree(1.0, 0.0), std::domain_error);
}

TEST(Qsp, ClenshawAgreesWithTrigDefinition) {
  ChebyshevExpansion e{Parity::Odd, {0.3, -0.2, 0.05}};
  for (double x : {-0.9, -0.1, 0.4, 1.0}) {
    const double th = std::acos(x);
    EXPECT_NEAR(e(x), 0.3 * std::cos(th) - 0.2 * std::cos(3 * th) + 0.05 * std::cos(5 * th), 1e-14);
  }
}

TEST(Qsp, Dct1MatchesDefinition) {
  std::vector<double> y{1.0, 2.0, 0.5, -1.0, 3.0};
  auto out = dct_type1(y);
  for (std::size_t k = 0; k < 5; ++k) {
    double s = y[0] + ((k % 2) ? -y[4] : y[4]);
    for (std::size_t j = 1; j < 4; ++j) s += 2 * y[j] * std::cos(PI * double(j * k) / 4);
    EXPECT_NEAR(out[k], s, 1e-13);
  }
  // constant input: only the zero frequency survives, Y_0 = 4l
  auto c = dct_type1({1, 1, 1, 1, 1});
  EXPECT_NEAR(c[0], 8.0, 1e-13);
  for (std::size_t k = 1; k < 5; ++k) EXPECT_NEAR(c[k], 0.0, 1e-13);
  EXPECT_THROW(dct_type1({1.0, 2.0}), std::invalid_argument);
}

TEST(Qsp, SolverGoldenPhases) {
  // reference solution from an independent numpy implementation
  const double tau = 2 / std::exp(1.0);
  auto even = solve_phases(chebyshev_coeffs(tau, 4, Parity::Even, 7e-5));
  ASSERT_EQ(even.reduced.size(), 3u);
  EXPECT_NEAR(even.reduced[0], 0.5976207158335587, 1e-9);
  EXPECT_NEAR(even.reduced[1], -0.18220029100396834, 1e-9);
  EXPECT_NEAR(even.reduced[2], 0.0020936516897003595, 1e-9);
  auto odd = solve_phases(chebyshev_coeffs(tau, 4, Parity::Odd, 7e-5));
  EXPECT_NEAR(odd.reduced[0], 0.37707797434645773, 1e-9);
  EXPECT_NEAR(odd.reduced[1], -0.009269724529850743, 1e-9);
  EXPECT_NEAR(odd.reduced[2], 6.35092645388336e-05, 1e-9);
  EXPECT_LT(even.residual, 1e-10);
  EXPECT_LT(odd.residual, 1e-10);
}

TEST(Qsp, FullSequenceRealizesPolynomial) {
  for (double t : {1.0, 2.0, 4.0}) {
    const double tau = 2 / std::exp(1.0) * t;
    const int d = truncation_degree(tau, 7e-5);
    for (Parity par : {Parity::Even, Parity::Odd}) {
      auto c = chebyshev_coeffs(tau, d, par, 7e-5);
      auto ps = solve_phases(c);
      ASSERT_EQ(ps.full.size(), c.degree() + 1);
      // Wx convention with the outer pi/4 removed gives Im <0|U|0> = P
      auto a = ps.full;
      a.front() -= PI / 4;
      a.back() -= PI / 4;
      auto psi = reflection_phases(ps.full);
      for (double x : {-0.97, -0.5, 0.0, 0.3, 0.8, 1.0}) {
        EXPECT_NEAR(wx_entry(a, x).imag(), c(x), 1e-9);
        EXPECT_NEAR(rx_entry(psi, x).real(), c(x), 1e-9);
        EXPECT_NEAR(std::abs(reflection_qsp_entry(psi, x) - rx_entry(psi, x)), 0.0, 1e-12);
      }
    }
  }
}

TEST(Qsp, ReflectionPhasesForAllLengths) {
  Rng rng(4);
  for (std::size_t len = 1; len <= 14; ++len) {
    std::vector<double> full(len);
    for (auto& v : full) v = rng.uniform() - 0.5;
    auto a = full;
    if (len > 1) {
      a.front() -= PI / 4;
      a.back() -= PI / 4;
    }
    auto psi = reflection_phases(full);
    for (double x : {-0.6, 0.2, 0.9}) {
      if (len == 1) {
        EXPECT_NEAR(rx_entry(psi, x).real(), -std::cos(full[0]), 1e-12);
      } else {
        EXPECT_NEAR(rx_entry(psi, x).real(), wx_entry(a, x).imag(), 1e-12) << len;
      }
    }
  }
}

TEST(Qsp, SolverRejectsUnreachableTarget) {
  ChebyshevExpansion bad{Parity::Even, {3.0, 2.0}};
  EXPECT_THROW(solve_phases(bad, 1e-10, 200), SolverError);
}
