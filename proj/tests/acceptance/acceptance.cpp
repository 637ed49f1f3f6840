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

// Runs acceptance criteria 1-11 and prints one PASS/FAIL line per criterion.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>

#include "../oracle.hpp"
#include "qusquare/clifford_bench.hpp"
#include "qusquare/ghz.hpp"
#include "qusquare/harness.hpp"
#include "qusquare/qnn.hpp"
#include "qusquare/qsp.hpp"
#include "qusquare/statevector.hpp"
#include "qusquare/tfim.hpp"

using namespace qusquare;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream why;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      why << "[fail] ";
    }
    why << what << "; ";
  }
};

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

oracle::Mat tfim_dense(std::size_t L) {
  const auto t = tfim_terms(L);
  const std::size_t dim = std::size_t(1) << L;
  oracle::Mat h = oracle::Mat::Zero(dim, dim);
  for (auto& u : t.unitaries) h += tfim_coupling(L) * oracle::pauli(u);
  return h;
}

// 1. noiseless Clifford pipeline
void c1(Outcome& o) {
  const StabilizerBackend be;
  for (std::size_t n = 2; n <= 6; ++n) {
    CliffordRBConfig cfg;
    cfg.N = n;
    cfg.depths = {2, 8};
    cfg.circuits = {100, 100};
    cfg.shots = 1000;
    cfg.mu_initial = 1.0;
    cfg.record_sources = false;
    Rng rng = Rng::stream(1, {n});
    const auto m = search_mu(cfg, be, rng);
    bool all_one = !m.trace.empty();
    for (auto& it : m.trace)
      for (auto& p : it.data.points) all_one = all_one && p.f == 1.0;
    o.check(all_one && m.r_mu <= 1e-6 && m.mu_max == 1.0,
            "N=" + std::to_string(n) + " r_mu=" + num(m.r_mu) + " mu_max=" + num(m.mu_max) +
                (all_one ? " f_i=1" : " some f_i!=1"));
  }
}

// 2. known per-layer depolarizing recovered by the fit
void c2(Outcome& o) {
  const std::size_t n = 3;
  for (double pstar : {0.99, 0.95}) {
    NoiseModel nm;
    nm.global_depolarizing = 1 - pstar;
    nm.global_per_layer = true;
    const StabilizerBackend be(nm);
    CliffordRBConfig cfg;
    cfg.N = n;
    cfg.depths = {1, 4, 8, 16};
    cfg.circuits = {100, 100, 100, 100};
    cfg.shots = 1000;
    cfg.record_sources = false;
    Rng rng = Rng::stream(2, {std::uint64_t(pstar * 100)});
    const auto data = collect_decay(cfg, be, rng);
    const auto fit = fit_decay(data.points);
    const double r = epsilon_mu(fit.p_rc, n);
    const double want_r = (std::pow(4.0, n) - 1) / std::pow(4.0, n) * (1 - pstar);
    o.check(std::abs(fit.p_rc - pstar) <= 3 * fit.p_rc_stderr,
            "p*=" + num(pstar) + " p_rc=" + num(fit.p_rc) + "±" + num(fit.p_rc_stderr));
    o.check(std::abs(r - want_r) <= 0.01, "r_mu=" + num(r) + " vs " + num(want_r));
  }
}

// 3. worst-case s2 identity and bias curve
void c3(Outcome& o) {
  double worst = 0;
  for (int i = 0; i <= 60; ++i)
    for (std::size_t d = 1; d <= 30; ++d) {
      const double eps = 0.3 * i / 60.0;
      const std::vector<double> mk(d - 1, 1.0 / 3.0);
      // closed form written out independently
      const double closed =
          d <= 1 ? 0.0 : (1 - std::pow(1 - eps, d) - d * eps * std::pow(1 - eps, double(d) - 1)) / 3.0;
      worst = std::max(worst, std::abs(s2_bound(eps, d, mk) - closed));
    }
  o.check(worst <= 1e-12, "max |s2 - closed form| = " + num(worst));
  std::vector<double> grid;
  for (int i = 0; i <= 100; ++i) grid.push_back(0.001 * i);
  double gap = 0;
  bool below = true;
  for (auto& p : predicted_bias_curve(grid, 10)) {
    below = below && p.eps_tilde <= p.eps;
    gap = std::max(gap, std::abs(p.eps_tilde - p.eps));
  }
  o.check(below, "eps_tilde <= eps on the grid");
  o.check(gap < 0.025, "max |eps_tilde - eps| = " + num(gap));
}

// 4. M_k ordered by weight
void c4(Outcome& o) {
  const std::size_t n = 10, trials = 500, kmax = 5;
  double mean[4] = {}, sig[4] = {};
  for (std::size_t w = 1; w <= 3; ++w) {
    double var = 0;
    for (std::size_t k = 1; k <= kmax; ++k) {
      Rng rng = Rng::stream(4, {w, k});
      const auto e = estimate_Mk(n, 0.2, k, w, trials, rng);
      mean[w] += e.value / kmax;
      var += e.value * (1 - e.value) / double(trials);
    }
    sig[w] = std::sqrt(var) / kmax;
    o.check(true, "w=" + std::to_string(w) + " mean M_k=" + num(mean[w]) + "±" + num(sig[w]));
  }
  for (std::size_t w = 1; w < 3; ++w) {
    const double s = std::sqrt(sig[w] * sig[w] + sig[w + 1] * sig[w + 1]);
    o.check(mean[w] - mean[w + 1] >= -s, "gap w" + std::to_string(w) + "-w" + std::to_string(w + 1) + " = " +
                                             num(mean[w] - mean[w + 1]) + " (sigma " + num(s) + ")");
  }
}

// 5. GHZ / DFE
void c5(Outcome& o) {
  const StabilizerBackend stab;
  const StatevectorBackend sv;
  const std::size_t ell = dfe_sample_count(0.05, 0.1);
  o.check(ell == 11805 && ell < 20000, "ell(0.05, 0.1) = " + std::to_string(ell));
  bool ones = true;
  for (std::size_t n = 2; n <= 10; ++n) {
    Rng rng = Rng::stream(5, {n});
    const auto c = ghz_circuit(n, GHZTopology::FanoutTree);
    const auto ps = sample_dfe_paulis(c, ell, rng);
    ones = ones && dfe_estimate(c, ps, stab, rng) == 1.0 && dfe_estimate(c, ps, sv, rng) == 1.0;
  }
  o.check(ones, "noiseless Y = 1 for N = 2..10 on both backends");
  // exhaustive enumeration of <00|P|00> over the three Bell stabilizers
  const auto bell = ghz_circuit(2, GHZTopology::LinearChain);
  double exact = 0;
  for (unsigned m = 1; m < 4; ++m) {
    PauliString z(2);
    z.set_z(0, m & 1);
    z.set_z(1, (m >> 1) & 1);
    exact += oracle::pauli(conjugate_pauli(bell, z))(0, 0).real() / 3.0;
  }
  Rng rng = Rng::stream(5, {99});
  const auto ps = sample_dfe_paulis(bell, ell, rng);
  const double y = dfe_estimate(Circuit(2), ps, stab, rng);
  const double sigma = std::sqrt((1 - exact * exact) / double(ell));
  o.check(std::abs(exact - 1.0 / 3.0) < 1e-12 && std::abs(y - exact) <= 3 * sigma,
          "impostor Y = " + num(y) + " vs " + num(exact) + " (sigma " + num(sigma) + ")");
}

// 6. block encoding
void c6(Outcome& o) {
  for (std::size_t L : {3, 4}) {
    const oracle::Mat u = oracle::unitary(block_encoding(L));
    const std::size_t sys = std::size_t(1) << L;
    const double dev = (u.topLeftCorner(sys, sys) - tfim_dense(L) / tfim_alpha()).cwiseAbs().maxCoeff();
    o.check(dev < 1e-9, "L=" + std::to_string(L) + " max-abs deviation " + num(dev));
  }
}

// 7. Jacobi-Anger truncation and phase solver
void c7(Outcome& o) {
  const double eps0 = 7e-5;
  for (double t : {1.0, 2.0, 4.0}) {
    const int d = truncation_degree(t, eps0);
    for (Parity par : {Parity::Even, Parity::Odd}) {
      // independent reconstruction with std::cyl_bessel_j and T_k(x) = cos(k acos x)
      double worst = 0;
      const int top = par == Parity::Even ? d : d + 1;
      for (int i = 0; i < 10000; ++i) {
        const double x = -1.0 + 2.0 * i / 9999.0;
        double s = par == Parity::Even ? std::cyl_bessel_j(0.0, t) : 0.0;
        for (int k = 1; k <= top; ++k) {
          if ((k % 2) != int(par)) continue;
          const double sgn = ((k / 2) % 2) ? -1.0 : 1.0;
          s += 2.0 * sgn * std::cyl_bessel_j(double(k), t) * std::cos(k * std::acos(x));
        }
        const double target = par == Parity::Even ? std::cos(t * x) : std::sin(t * x);
        worst = std::max(worst, std::abs(s / (1 + eps0 / 4) - target / (1 + eps0 / 4)));
      }
      const auto coeffs = chebyshev_coeffs(t, d, par, eps0);
      const auto ph = solve_phases(coeffs);
      const std::string tag = "t=" + num(t) + (par == Parity::Even ? " cos" : " sin") + " d=" + std::to_string(top);
      o.check(worst <= eps0, tag + " grid error " + num(worst));
      o.check(ph.residual < 1e-10, tag + " residual " + num(ph.residual));
    }
  }
}

// 8. end-to-end TFIM
void c8(Outcome& o) {
  const std::size_t L = 3;
  const double t = 1.0, eps0 = 7e-5, eps = 0.01, delta = 0.1;
  const auto q = assemble_qsp(L, t, eps0);
  const auto sv = simulate(q.circuit);
  const std::size_t sys = std::size_t(1) << L;
  oracle::Vec got(sys);
  for (std::size_t s = 0; s < sys; ++s) got(s) = sv[(std::size_t(1) << q.layout.qB) + s];
  const oracle::Vec want = (oracle::cplx(0, -t) * tfim_dense(L)).exp().col(0);
  const double overlap = std::abs(want.dot(got)) / (want.norm() * got.norm());
  o.check(overlap >= 1 - 2 * eps0, "1 - overlap = " + num(1 - overlap) + " (bound " + num(2 * eps0) + ")");

  TFIMConfig cfg;
  cfg.L = L;
  cfg.eps = eps;
  cfg.delta = delta;
  const StatevectorBackend be;
  Rng rng = Rng::stream(8, {});
  const auto rec = run_tfim(cfg, t, eps0, be, rng);
  o.check(rec.error.empty(), rec.error.empty() ? "estimation ran" : "error: " + rec.error);
  const std::size_t quota = hoeffding_shots(eps, delta);
  o.check(quota == 59915 && quota < 60000 && rec.accepted == quota, "|S_eff| = " + std::to_string(rec.accepted));
  const double mz = analytical_Mz(L, t);
  o.check(std::abs(rec.mu - mz) <= 2 * eps0 + eps, "mu=" + num(rec.mu) + " M_z=" + num(mz));
  const double floor_p = 0.25 * (1 - eps0) * (1 - eps0);
  const double sigma = std::sqrt(floor_p * (1 - floor_p) / double(rec.raw));
  o.check(rec.acceptance_rate >= floor_p - 3 * sigma,
          "acceptance " + num(rec.acceptance_rate) + " >= " + num(floor_p) + " - 3*" + num(sigma));
}

// 9. closed form vs dense propagator
void c9(Outcome& o) {
  double worst = 0;
  for (std::size_t L : {3, 4, 5}) {
    const oracle::Mat h = tfim_dense(L);
    for (double t : {0.0, 1.0, 2.0, 5.0, 10.0}) {
      const oracle::Vec psi = (oracle::cplx(0, -t) * h).exp().col(0);
      double m = 0;
      for (Eigen::Index i = 0; i < psi.size(); ++i) m += std::norm(psi(i)) * (L - 2.0 * __builtin_popcountll(i));
      worst = std::max(worst, std::abs(analytical_Mz(L, t) - m / double(L)));
    }
  }
  o.check(worst <= 1e-8, "max deviation " + num(worst));
}

// 10. QNN gradients, warm start and training
void c10(Outcome& o) {
  const ExactEstimator ex;
  Rng rng = Rng::stream(10, {});
  double worst = 0;
  for (int it = 0; it < 50; ++it) {
    QNNParams p(1 + it % 3, 1 + it % 3);
    for (std::size_t k = 0; k < p.count(); ++k) p.at(k) = -PI + 2 * PI * rng.uniform();
    std::vector<Sample> data(5);
    for (auto& s : data) {
      for (auto& v : s.x) v = -1 + 2 * rng.uniform();
      s.y = rng.below(2) ? 1 : -1;
    }
    const auto g = gradient(data, p, ex, rng);
    for (std::size_t k = 0; k < p.count(); ++k) {
      QNNParams a = p, b = p;
      a.at(k) += 1e-5;
      b.at(k) -= 1e-5;
      worst = std::max(worst, std::abs((cost(data, a, ex, rng) - cost(data, b, ex, rng)) / 2e-5 - g[k]));
    }
  }
  o.check(worst <= 1e-3, "max |shift - FD| over 50 instances = " + num(worst));

  const auto ds = generate_dataset(DatasetKind::Sphere, 300, 2024);
  Rng sr = Rng::stream(10, {1});
  const auto split = split_dataset(ds, sr);
  bool equal = true;
  for (std::size_t n : {1, 2, 3}) {
    QNNParams p(n, 3);
    for (std::size_t k = 0; k < p.count(); ++k) p.at(k) = -PI + 2 * PI * rng.uniform();
    equal = equal && cost(split.train.samples, p, ex, rng) == cost(split.train.samples, warm_start(p), ex, rng);
  }
  o.check(equal, "warm-start cost identical at N=1->2, 2->3, 3->4");

  QNNTrainConfig cfg;
  cfg.Lay = 3;
  Rng tr = Rng::stream(10, {2});
  const auto m = run_benchmark({split}, 2, cfg, ex, tr);
  const double a1 = m.acc[0][0], a2 = m.acc[1][0];
  o.check(a1 >= 0.8, "sphere n=300 Lay=3 test accuracy N=1: " + num(a1) + " (needs >= 0.8)");
  o.check(a2 >= a1, "N=2: " + num(a2) + " (needs >= N=1)");
}

// 11. determinism
void c11(Outcome& o) {
  const char* cfgs[] = {
      R"({"benchmark":"ghz","seed":42,"noise":{"p2":0.03},"ghz":{"topology":"linear-chain","n_limit":8}})",
      R"({"benchmark":"clifford","seed":42,"noise":{"p1":0.002,"p2":0.01},
          "clifford":{"N":3,"depths":[1,5],"circuits":[50,50],"shots":2000}})",
      R"({"benchmark":"tfim","seed":42,"tfim":{"t_start":0.5,"t_limit":0.5,"eps0_steps":1}})",
      R"({"benchmark":"qnn","seed":42,"qnn":{"Lay":2,"epochs":3,"restarts":2,"n_max":2,
          "datasets":[{"generator":"two-blobs","n":60,"seed":5}]}})"};
  for (const char* text : cfgs) {
    const auto cfg = parse_config(text);
    ::setenv("QUSQUARE_THREADS", "1", 1);
    const std::string a = strip_timestamp(run_suite(cfg)).dump();
    ::setenv("QUSQUARE_THREADS", "4", 1);
    const std::string b = strip_timestamp(run_suite(cfg)).dump();
    const std::string c = strip_timestamp(run_suite(cfg)).dump();
    ::unsetenv("QUSQUARE_THREADS");
    o.check(a == b && b == c, cfg.benchmark + (a == b && b == c ? " identical" : " differs"));
  }
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
      {"noiseless Clifford pipeline", c1},   {"calibrated-noise recovery", c2},
      {"worst-case s2 and bias curve", c3},  {"M_k weight ordering", c4},
      {"GHZ direct fidelity estimation", c5}, {"block encoding", c6},
      {"QSP truncation and phases", c7},     {"end-to-end TFIM", c8},
      {"analytical vs exact TFIM", c9},      {"QNN", c10},
      {"determinism", c11}};
  int failed = 0, idx = 0;
  for (auto& [name, fn] : criteria) {
    ++idx;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.why << "[fail] exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("criterion %2d %s: %s (%.1f s) %s\n", idx, o.pass ? "PASS" : "FAIL", name, secs, o.why.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of 11 criteria passed\n", 11 - failed);
  return failed ? 1 : 0;
}
