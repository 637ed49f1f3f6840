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
#include "qusquare/clifford_bench.hpp"
#include "qusquare/statevector.hpp"

using namespace qusquare;

namespace {

CliffordRBConfig small_cfg(std::size_t n) {
  CliffordRBConfig c;
  c.N = n;
  c.depths = {1, 5};
  c.circuits = {20, 20};
  c.shots = 5000;
  return c;
}

}  // namespace

TEST(CliffordConfig, RulesEnforced) {
  auto c = small_cfg(2);
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.depths = {2};
  bad.circuits = {20};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.depths = {2, 4};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.depths = {5, 1};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.shots = 100;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.circuits = {0, 20};
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.mu = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(CliffordBench, MuLayerFullAndEmpty) {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    auto ml = make_mu_layer(3, 1.0, rng);
    EXPECT_EQ(ml.start, 0u);
    EXPECT_EQ(ml.layer, ml.source);
    PauliString p = PauliString::parse("XYZ");
    EXPECT_NO_THROW(conjugate_pauli(ml.layer, p));
  }
  Circuit one(1);
  one.append(gates::h(0));
  EXPECT_EQ(truncate_fraction(one, 0.5, 0).depth(), 0u);
}

TEST(CliffordBench, InstanceNoiselessAlwaysPlusOne) {
  Rng rng(2);
  StabilizerBackend stab;
  StatevectorBackend sv;
  for (std::size_t m : {0u, 1u, 3u}) {
    for (int trial = 0; trial < 10; ++trial) {
      auto inst = build_rb_instance(3, 0.6, m, rng);
      EXPECT_TRUE(inst.observable.is_diagonal());
      EXPECT_EQ(inst.circuit.layer_marks().size(), m);
      for (int v : stab.measure_pauli(inst.circuit, inst.observable, 50, rng)) EXPECT_EQ(v, 1);
      for (int v : sv.measure_pauli(inst.circuit, inst.observable, 50, rng)) EXPECT_EQ(v, 1);
      // independent oracle: the final state is a +1 eigenvector of the signed observable
      const oracle::Vec psi = oracle::state(inst.circuit);
      EXPECT_NEAR((psi.adjoint() * oracle::pauli(inst.observable) * psi)(0, 0).real(), 1.0, 1e-10);
    }
  }
}

TEST(CliffordBench, NegativeSignTracked) {
  // -Z eigenstate is |1>; the signed observable still reads +1
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    auto prep = stabilizer_product_state_prep(PauliString::parse("-Z"), rng);
    EXPECT_EQ(oracle::state(prep)(1), oracle::cplx(1, 0));
    StabilizerBackend be;
    EXPECT_EQ(be.measure_pauli(prep, PauliString::parse("-Z"), 1, rng)[0], 1);
  }
}

TEST(CliffordBench, NoiselessDecayIsFlat) {
  Rng rng(4);
  StabilizerBackend be;
  auto data = collect_decay(small_cfg(3), be, rng);
  for (auto& p : data.points) EXPECT_EQ(p.f, 1.0);
  auto fit = fit_decay(data.points);
  EXPECT_EQ(fit.p_rc, 1.0);
  EXPECT_NEAR(fit.A, 1.0, 1e-15);
  EXPECT_EQ(epsilon_mu(fit.p_rc, 3), 0.0);
  EXPECT_EQ(data.instances.size(), 40u);
  EXPECT_EQ(data.instances.back().sources.size(), 5u);
}

TEST(CliffordBench, GlobalDepolarizingDecayIsMonotone) {
  NoiseModel nm;
  nm.global_depolarizing = 0.05;
  StabilizerBackend be(nm);
  CliffordRBConfig c;
  c.N = 2;
  c.depths = {1, 4, 8, 12};
  c.circuits = {50, 50, 50, 50};
  c.shots = 2000;
  Rng rng(5);
  auto data = collect_decay(c, be, rng);
  for (std::size_t i = 1; i < data.points.size(); ++i) EXPECT_LT(data.points[i].f, data.points[i - 1].f);
}

TEST(CliffordBench, PerLayerNoiseRecoversPolarization) {
  for (double pstar : {0.97, 0.9}) {
    NoiseModel nm;
    nm.global_depolarizing = 1 - pstar;
    nm.global_per_layer = true;
    StabilizerBackend be(nm);
    CliffordRBConfig c;
    c.N = 2;
    c.depths = {2, 8};
    c.circuits = {100, 100};
    c.shots = 1000;
    Rng rng(6);
    auto data = collect_decay(c, be, rng);
    auto fit = fit_decay(data.points);
    EXPECT_NEAR(fit.p_rc, pstar, 3 * fit.p_rc_stderr + 1e-12) << "sigma " << fit.p_rc_stderr;
    EXPECT_GT(fit.p_rc_stderr, 0.0);
  }
}

TEST(CliffordBench, FitExactExponential) {
  std::vector<DecayPoint> pts{{1, 0.9, 0, {}}, {2, 0.81, 0, {}}, {4, 0.6561, 0, {}}};
  auto fit = fit_decay(pts);
  EXPECT_NEAR(fit.A, 1.0, 1e-12);
  EXPECT_NEAR(fit.p_rc, 0.9, 1e-12);
  std::vector<DecayPoint> ones{{2, 1.0, 0, {}}, {8, 1.0, 0, {}}};
  EXPECT_EQ(fit_decay(ones).p_rc, 1.0);
}

TEST(CliffordBench, FitMatchesNormalEquations) {
  Rng rng(7);
  std::vector<DecayPoint> pts;
  for (std::size_t m : {1u, 3u, 4u, 9u, 15u}) pts.push_back({m, 0.8 * std::pow(0.93, double(m)) * (1 + 0.05 * rng.normal()), 0, {}});
  pts.push_back({20, -0.01, 0, {}});
  auto fit = fit_decay(pts);
  EXPECT_EQ(fit.dropped, 1u);
  EXPECT_EQ(fit.used, 5u);
  Eigen::MatrixXd X(5, 2);
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) {
    X(i, 0) = 1;
    X(i, 1) = double(pts[i].m);
    y(i) = std::log(pts[i].f);
  }
  Eigen::VectorXd beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  EXPECT_NEAR(std::log(fit.A), beta(0), 1e-9);
  EXPECT_NEAR(fit.slope, beta(1), 1e-9);
  std::vector<DecayPoint> bad{{1, 0.5, 0, {}}, {5, 0.0, 0, {}}};
  EXPECT_THROW(fit_decay(bad), std::runtime_error);
}

TEST(CliffordBench, FitClampsGrowth) {
  std::vector<DecayPoint> pts{{1, 0.9, 0, {}}, {5, 0.95, 0, {}}};
  auto fit = fit_decay(pts);
  EXPECT_TRUE(fit.clamped);
  EXPECT_EQ(fit.p_rc, 1.0);
}

TEST(CliffordBench, EpsilonMu) {
  EXPECT_EQ(epsilon_mu(1.0, 3), 0.0);
  EXPECT_EQ(epsilon_mu(0.0, 1), 0.75);
  EXPECT_NEAR(epsilon_mu(0.9, 2), 15.0 / 16.0 * 0.1, 1e-15);
  EXPECT_NEAR(epsilon_mu(0.9, 2), 0.09375, 1e-15);
  double prev = 2;
  for (int i = 0; i <= 20; ++i) {
    const double e = epsilon_mu(i / 20.0, 4);
    EXPECT_LT(e, prev);
    prev = e;
  }
  EXPECT_THROW(epsilon_mu(1.1, 2), std::domain_error);
}

TEST(CliffordBench, MuStepDecisionTable) {
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double r = 0.2 * i / 19.0;
      const double mu = (j + 1) / 20.0;
      MuStep want;
      if (r > 0.1)
        want = MuStep::Decrease;
      else if (mu == 1.0)
        want = MuStep::Accept;
      else if (0.1 - r > 0.01)
        want = MuStep::Increase;
      else
        want = MuStep::Accept;
      EXPECT_EQ(mu_step(r, mu), want) << r << " " << mu;
    }
  EXPECT_EQ(mu_step(0.1, 0.5), MuStep::Accept);
  EXPECT_EQ(mu_step(0.095, 0.5), MuStep::Accept);
  EXPECT_EQ(mu_step(0.05, 0.5), MuStep::Increase);
}

TEST(CliffordBench, SearchNoiselessSingleIteration) {
  Rng rng(8);
  StabilizerBackend be;
  auto m = search_mu(small_cfg(2), be, rng);
  EXPECT_EQ(m.mu_max, 1.0);
  EXPECT_EQ(m.r_mu, 0.0);
  EXPECT_EQ(m.trace.size(), 1u);
}

TEST(CliffordBench, SearchBacksOffUnderNoise) {
  NoiseModel nm;
  nm.p1 = 0.03;
  StabilizerBackend be(nm);
  auto cfg = small_cfg(2);
  cfg.depths = {1, 4};
  Rng rng(9);
  auto m = search_mu(cfg, be, rng);
  ASSERT_GE(m.trace.size(), 2u);
  EXPECT_GT(m.trace.front().r, 0.1);
  EXPECT_LT(m.mu_max, 1.0);
  EXPECT_GT(m.mu_max, 0.0);
  EXPECT_LE(m.r_mu, 0.1);
  if (m.trace.back().step == MuStep::Accept) {
    EXPECT_GE(m.r_mu, 0.09);
  }
  // bisection: successive mu steps halve
  for (std::size_t i = 2; i < m.trace.size(); ++i)
    EXPECT_NEAR(std::abs(m.trace[i].mu - m.trace[i - 1].mu), 0.5 * std::abs(m.trace[i - 1].mu - m.trace[i - 2].mu),
                1e-12);
}

TEST(CliffordBench, SearchReportsNoBracket) {
  NoiseModel nm;
  nm.global_depolarizing = 0.5;
  nm.global_per_layer = true;
  StabilizerBackend be(nm);
  Rng rng(10);
  auto m = search_mu(small_cfg(2), be, rng);
  EXPECT_EQ(m.mu_max, 0.0);
  EXPECT_FALSE(m.diagnostic.empty());
}

TEST(CliffordBench, MkSingleQubitApproachesOneThird) {
  Rng rng(11);
  auto e = estimate_Mk(1, 1.0, 1, 1, 20000, rng);
  EXPECT_NEAR(e.value, 1.0 / 3.0, 5 * std::sqrt(2.0 / 9.0 / 20000));
  auto e2 = estimate_Mk(2, 0.5, 2, 1, 500, rng);
  EXPECT_GE(e2.value, 0.0);
  EXPECT_LE(e2.value, 1.0);
}

TEST(CliffordBench, MkDecreasesWithWeight) {
  Rng rng(12);
  double prev = 2;
  for (std::size_t w = 1; w <= 3; ++w) {
    double mean = 0;
    for (std::size_t k = 1; k <= 3; ++k) mean += estimate_Mk(6, 0.2, k, w, 200, rng).value / 3;
    EXPECT_LE(mean, prev + 3 * std::sqrt(0.25 / 200));
    prev = mean;
  }
}

TEST(CliffordBench, S2Bounds) {
  for (double eps : {0.0, 0.01, 0.1, 0.3})
    for (std::size_t d : {1u, 2u, 7u, 10u, 30u}) {
      std::vector<double> mk(d > 0 ? d - 1 : 0, 1.0 / 3);
      EXPECT_NEAR(s2_bound(eps, d, mk), worst_case_s2(eps, d), 1e-12);
    }
  EXPECT_EQ(worst_case_s2(0.3, 1), 0.0);
  EXPECT_EQ(worst_case_s2(0.0, 10), 0.0);
  // direct summation at eps = 0.1, d = 10
  double sum = 0;
  for (int k = 1; k < 10; ++k) sum += (10 - k) * std::pow(0.9, 9 - k);
  EXPECT_NEAR(worst_case_s2(0.1, 10), 0.01 * sum / 3, 1e-15);
  EXPECT_THROW(s2_bound(0.1, 5, {0.3}), std::invalid_argument);
}

TEST(CliffordBench, BiasCurve) {
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.001 * i);
  auto curve = predicted_bias_curve(grid, 10);
  EXPECT_NEAR(curve[0].eps_tilde, 0.0, 1e-15);
  for (auto& p : curve) {
    EXPECT_LE(p.eps_tilde, p.eps + 1e-15);
    EXPECT_LT(std::abs(p.eps_tilde - p.eps), 0.025);
  }
  // direct least squares on log F_k
  const double eps = 0.05;
  Eigen::MatrixXd X(10, 2);
  Eigen::VectorXd y(10);
  for (int k = 1; k <= 10; ++k) {
    X(k - 1, 0) = 1;
    X(k - 1, 1) = k;
    y(k - 1) = std::log(std::pow(1 - eps, k) + worst_case_s2(eps, std::size_t(k)));
  }
  Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  EXPECT_NEAR(predicted_bias_curve({eps}, 10)[0].eps_tilde, 1 - std::exp(beta(1)), 1e-12);
}
