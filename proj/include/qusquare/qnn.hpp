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
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "qusquare/backend.hpp"
#include "qusquare/statevector.hpp"

namespace qusquare {

struct QNNParams {
  std::size_t N = 1, Lay = 1;
  std::vector<double> theta;  // [qubit][layer][3]
  std::vector<double> phi;    // [link][layer][3], link s joins control s+1 and target s

  QNNParams() = default;
  QNNParams(std::size_t n, std::size_t lay) : N(n), Lay(lay), theta(3 * n * lay, 0.0), phi(3 * (n - 1) * lay, 0.0) {
    if (n < 1 || lay < 1) throw std::invalid_argument("QNN needs N >= 1 and Lay >= 1");
  }

  std::size_t count() const { return theta.size() + phi.size(); }
  double& th(std::size_t q, std::size_t l, std::size_t j) { return theta[(q * Lay + l) * 3 + j]; }
  double th(std::size_t q, std::size_t l, std::size_t j) const { return theta[(q * Lay + l) * 3 + j]; }
  double& ph(std::size_t s, std::size_t l, std::size_t j) { return phi[(s * Lay + l) * 3 + j]; }
  double ph(std::size_t s, std::size_t l, std::size_t j) const { return phi[(s * Lay + l) * 3 + j]; }

  // flat view: theta first, then phi
  double& at(std::size_t k) { return k < theta.size() ? theta[k] : phi[k - theta.size()]; }
  double at(std::size_t k) const { return k < theta.size() ? theta[k] : phi[k - theta.size()]; }
  bool is_phi(std::size_t k) const { return k >= theta.size(); }

  void check() const {
    if (N < 1 || Lay < 1) throw std::invalid_argument("QNN needs N >= 1 and Lay >= 1");
    if (theta.size() != 3 * N * Lay || phi.size() != 3 * (N - 1) * Lay)
      throw std::invalid_argument("QNN parameter arrays do not match N and Lay");
  }
};

using Features = std::array<double, 3>;

struct Sample {
  Features x{};
  int y = 1;
};

struct LabeledDataset {
  std::vector<Sample> samples;
  std::string split = "all";
  std::string generator;
  std::uint64_t seed = 0;
};

// U(x) = Rz(pi x1) Ry(pi x2) Rz(pi x3), returned in time order.
inline std::array<Gate, 3> encode_unitary(const Features& x, unsigned q = 0) {
  for (double v : x)
    if (!(v >= -1.0 && v <= 1.0)) throw std::domain_error("features must lie in [-1, 1]");
  return {gates::rz(q, PI * x[2]), gates::ry(q, PI * x[1]), gates::rz(q, PI * x[0])};
}

// Flat gate list in time order: per layer the encoding on every qubit, the
// trainable rotations, then the CU ladder for s = 0..N-2.
inline std::vector<Gate> qnn_gates(const QNNParams& p, const Features& x) {
  p.check();
  std::vector<Gate> out;
  out.reserve(p.Lay * (6 * p.N + 3 * (p.N - 1)));
  for (std::size_t l = 0; l < p.Lay; ++l) {
    for (unsigned q = 0; q < p.N; ++q)
      for (auto& g : encode_unitary(x, q)) out.push_back(g);
    for (unsigned q = 0; q < p.N; ++q) {
      out.push_back(gates::rz(q, p.th(q, l, 2)));
      out.push_back(gates::ry(q, p.th(q, l, 1)));
      out.push_back(gates::rz(q, p.th(q, l, 0)));
    }
    // the CU target matrix equals Rz(phi3) Ry(phi2) Rz(phi1)
    for (unsigned s = 0; s + 1 < p.N; ++s) {
      const Control c{s + 1, true};
      out.push_back(gates::controlled(gates::rz(s, p.ph(s, l, 0)), {c}));
      out.push_back(gates::controlled(gates::ry(s, p.ph(s, l, 1)), {c}));
      out.push_back(gates::controlled(gates::rz(s, p.ph(s, l, 2)), {c}));
    }
  }
  return out;
}

inline Circuit build_qnn_circuit(const QNNParams& p, const Features& x) {
  Circuit c(p.N);
  for (auto& g : qnn_gates(p, x)) c.append(g);
  return c;
}

// Estimates <Z> on qubit 0 of the circuit given as a flat gate list.
class QNNEstimator {
 public:
  virtual ~QNNEstimator() = default;
  virtual double z0(const std::vector<Gate>& gates, std::size_t n, Rng& rng) const = 0;
  virtual bool exact() const { return false; }
};

// Noiseless <Z_0>. Gates that are exactly the identity are skipped and only
// the qubits connected to qubit 0 through multi-qubit gates are simulated,
// so adding an identity-initialized qubit leaves the result bit-identical.
class ExactEstimator : public QNNEstimator {
 public:
  static bool trivial(const Gate& g) {
    switch (g.kind) {
      case GateKind::Rx:
      case GateKind::Ry:
      case GateKind::Rz:
        return g.params[0] == 0.0;
      default:
        return false;
    }
  }

  double z0(const std::vector<Gate>& gates, std::size_t n, Rng&) const override {
    std::vector<unsigned> parent(n);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](unsigned a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    for (auto& g : gates) {
      if (trivial(g)) continue;
      const unsigned r = find(g.targets[0]);
      for (auto t : g.targets) parent[find(t)] = r;
      for (auto& c : g.controls) parent[find(c.qubit)] = find(r);
    }
    const unsigned root = find(0);
    std::vector<unsigned> map(n, ~0u);
    unsigned k = 0;
    for (unsigned q = 0; q < n; ++q)
      if (find(q) == root) map[q] = k++;
    StateVector s(k);
    for (Gate g : gates) {
      if (trivial(g) || map[g.targets[0]] == ~0u) continue;
      for (auto& t : g.targets) t = map[t];
      for (auto& c : g.controls) c.qubit = map[c.qubit];
      s.apply(g);
    }
    return s.z_expectation(0);
  }
  bool exact() const override { return true; }
};

// Mean of +-1 outcomes on qubit 0 over ceil((2/eps^2) ln(2/delta)) shots.
inline double estimate_Z(const Circuit& c, double eps, double delta, const Backend& backend, Rng& rng) {
  const std::size_t shots = hoeffding_shots(eps, delta);
  const NoiseModel& nm = backend.noise();
  if (backend.name() == "statevector" && !nm.has_gate_noise()) {
    // the qubit-0 outcome is Bernoulli with the exact marginal, so draw the count directly
    const double z = simulate(c).z_expectation(0);
    const double r = nm.readout(0);
    double p0 = std::clamp(0.5 * (1.0 + z), 0.0, 1.0);
    p0 = p0 * (1.0 - r) + (1.0 - p0) * r;
    Rng local = rng.fork(0xb1);
    rng();
    std::binomial_distribution<std::size_t> bin(shots, p0);
    const std::size_t plus = bin(local);
    return (2.0 * double(plus) - double(shots)) / double(shots);
  }
  const auto v = backend.measure_pauli(c, PauliString::single(c.qubit_count(), 0, 'Z'), shots, rng);
  double s = 0;
  for (int a : v) s += a;
  return s / double(shots);
}

class SampledEstimator : public QNNEstimator {
 public:
  SampledEstimator(const Backend& backend, double eps, double delta) : be_(backend), eps_(eps), delta_(delta) {}
  double z0(const std::vector<Gate>& gates, std::size_t n, Rng& rng) const override {
    Circuit c(n);
    for (auto& g : gates) c.append(g);
    return estimate_Z(c, eps_, delta_, be_, rng);
  }

 private:
  const Backend& be_;
  double eps_, delta_;
};

inline double fidelity(double mu, int y) { return 0.5 * (1.0 + double(y) * mu); }

// One <Z_0> value per sample, evaluated in parallel.
inline std::vector<double> predictions(const std::vector<Sample>& data, const QNNParams& p,
                                       const QNNEstimator& est, Rng& rng) {
  std::vector<double> mu(data.size());
  const Rng base = rng.fork(0x9e);
  rng();
  parallel_for(data.size(), [&](std::size_t i) {
    Rng r = base.fork(i);
    mu[i] = est.z0(qnn_gates(p, data[i].x), p.N, r);
  });
  return mu;
}

inline double cost_from(const std::vector<Sample>& data, const std::vector<double>& mu) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  double f = 0;
  for (std::size_t i = 0; i < data.size(); ++i) f += fidelity(mu[i], data[i].y);
  return 1.0 - f / double(data.size());
}

inline double cost(const std::vector<Sample>& data, const QNNParams& p, const QNNEstimator& est, Rng& rng) {
  return cost_from(data, predictions(data, p, est, rng));
}

enum class PhiShiftRule { FourTerm, TwoTerm };

// Parameter-shift gradient of the cost. Uncontrolled rotations use the
// +-pi/2 rule. Controlled rotations have generator spectrum {0, +-1/2}, which
// the four-term rule handles exactly; TwoTerm applies the +-pi/2 formula
// to them as well.
inline std::vector<double> gradient(const std::vector<Sample>& data, const QNNParams& p, const QNNEstimator& est,
                                    Rng& rng, PhiShiftRule rule = PhiShiftRule::FourTerm) {
  if (data.empty()) throw std::invalid_argument("empty dataset");
  const std::size_t np = p.count(), m = data.size();
  const Rng base = rng.fork(0x96);
  rng();
  constexpr double d1 = (std::numbers::sqrt2 + 1.0) / (4.0 * std::numbers::sqrt2);
  constexpr double d2 = (std::numbers::sqrt2 - 1.0) / (4.0 * std::numbers::sqrt2);
  std::vector<double> g(np, 0.0);
  std::vector<double> contrib(np * m, 0.0);
  parallel_for(np * m, [&](std::size_t job) {
    const std::size_t k = job / m, i = job % m;
    auto eval = [&](double shift, std::uint64_t tag) {
      QNNParams q = p;
      q.at(k) += shift;
      Rng r = base.fork(job).fork(tag);
      return est.z0(qnn_gates(q, data[i].x), p.N, r);
    };
    double dmu;
    if (p.is_phi(k) && rule == PhiShiftRule::FourTerm)
      dmu = d1 * (eval(PI / 2, 0) - eval(-PI / 2, 1)) - d2 * (eval(3 * PI / 2, 2) - eval(-3 * PI / 2, 3));
    else
      dmu = 0.5 * (eval(PI / 2, 0) - eval(-PI / 2, 1));
    contrib[job] = -0.5 * double(data[i].y) * dmu;
  });
  for (std::size_t k = 0; k < np; ++k) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += contrib[k * m + i];
    g[k] = s / double(m);
  }
  return g;
}

// Fraction of samples with F >= 0.5.
inline double accuracy_from(const std::vector<Sample>& test, const std::vector<double>& mu) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  std::size_t ok = 0;
  for (std::size_t i = 0; i < test.size(); ++i) ok += fidelity(mu[i], test[i].y) >= 0.5;
  return double(ok) / double(test.size());
}

inline double test_accuracy(const std::vector<Sample>& test, const QNNParams& p, const QNNEstimator& est, Rng& rng) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  return accuracy_from(test, predictions(test, p, est, rng));
}

struct QNNTrainConfig {
  std::size_t Lay = 3;
  double eta = 0.05;
  std::size_t epochs = 100;
  double grad_tol = 1e-3;
  std::size_t restarts = 3;
  PhiShiftRule phi_rule = PhiShiftRule::FourTerm;
  double eps = 0.05, delta = 0.1;  // shot budget of the sampled estimator

  void validate() const {
    if (Lay < 1) throw ConfigError("Lay must be at least 1");
    if (!(eta > 0.0)) throw ConfigError("learning rate must be positive");
    if (restarts < 1) throw ConfigError("at least one restart is required");
    if (!(grad_tol >= 0.0)) throw ConfigError("grad_tol must be non-negative");
    if (!(eps > 0.0 && eps <= 0.05)) throw ConfigError("eps must lie in (0, 0.05]");
    if (!(delta > 0.0 && delta <= 0.1)) throw ConfigError("delta must lie in (0, 0.1]");
  }
};

struct TrainResult {
  QNNParams params;
  double cost = 0.0;
  std::vector<std::vector<double>> traces;  // per restart (one entry for train_nq), cost before each update and at the end
};

namespace detail {

// Gradient descent from p; returns the trace and leaves p at the final
// point, or at the best point if keep_best.
inline std::vector<double> descend(QNNParams& p, const std::vector<Sample>& data, const QNNTrainConfig& cfg,
                                   const QNNEstimator& est, Rng& rng, bool keep_best) {
  std::vector<double> trace;
  QNNParams best = p;
  double best_cost = cost(data, p, est, rng);
  trace.push_back(best_cost);
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    const auto g = gradient(data, p, est, rng, cfg.phi_rule);
    double gmax = 0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < cfg.grad_tol) break;
    for (std::size_t k = 0; k < g.size(); ++k) p.at(k) -= cfg.eta * g[k];
    const double c = cost(data, p, est, rng);
    trace.push_back(c);
    if (c < best_cost) {
      best_cost = c;
      best = p;
    }
  }
  if (keep_best) p = best;
  return trace;
}

}  // namespace detail

// Best of `restarts` runs from uniform [-pi, pi] initializations, ranked by
// final training cost.
inline TrainResult train_1q(const std::vector<Sample>& train, const QNNTrainConfig& cfg, const QNNEstimator& est,
                            Rng& rng) {
  cfg.validate();
  std::vector<QNNParams> ps(cfg.restarts, QNNParams(1, cfg.Lay));
  std::vector<std::vector<double>> traces(cfg.restarts);
  const Rng base = rng.fork(0x1b);
  rng();
  parallel_for(cfg.restarts, [&](std::size_t t) {
    Rng r = base.fork(t);
    for (auto& v : ps[t].theta) v = -PI + 2.0 * PI * r.uniform();
    traces[t] = detail::descend(ps[t], train, cfg, est, r, false);
  });
  TrainResult out;
  std::size_t best = 0;
  for (std::size_t t = 1; t < cfg.restarts; ++t)
    if (traces[t].back() < traces[best].back()) best = t;
  out.params = ps[best];
  out.cost = traces[best].back();
  out.traces = std::move(traces);
  return out;
}

// N-qubit parameters from an (N-1)-qubit optimum: inherited angles, zero
// angles on the new qubit and the new CU link.
inline QNNParams warm_start(const QNNParams& prev) {
  prev.check();
  QNNParams p(prev.N + 1, prev.Lay);
  for (std::size_t q = 0; q < prev.N; ++q)
    for (std::size_t l = 0; l < prev.Lay; ++l)
      for (std::size_t j = 0; j < 3; ++j) p.th(q, l, j) = prev.th(q, l, j);
  for (std::size_t s = 0; s + 1 < prev.N; ++s)
    for (std::size_t l = 0; l < prev.Lay; ++l)
      for (std::size_t j = 0; j < 3; ++j) p.ph(s, l, j) = prev.ph(s, l, j);
  return p;
}

// Gradient descent from the warm start, keeping the best point seen.
inline TrainResult train_nq(const std::vector<Sample>& train, const QNNParams& prev, const QNNTrainConfig& cfg,
                            const QNNEstimator& est, Rng& rng) {
  cfg.validate();
  if (prev.Lay != cfg.Lay) throw std::invalid_argument("previous parameters have a different layer count");
  TrainResult out;
  out.params = warm_start(prev);
  Rng r = rng.fork(out.params.N);
  rng();
  out.traces.push_back(detail::descend(out.params, train, cfg, est, r, true));
  out.cost = *std::min_element(out.traces[0].begin(), out.traces[0].end());
  return out;
}

struct QNNSplit {
  LabeledDataset train, test;
};

struct QNNMetric {
  std::size_t Lay = 0;
  std::vector<std::vector<double>> acc;          // [N-1][k]
  std::vector<double> mean, stddev;              // per N
  std::vector<std::vector<QNNParams>> params;    // [N-1][k]
  std::vector<std::vector<double>> train_cost;   // [N-1][k]
};

inline double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

inline QNNMetric run_benchmark(const std::vector<QNNSplit>& datasets, std::size_t n_max, const QNNTrainConfig& cfg,
                               const QNNEstimator& est, Rng& rng) {
  cfg.validate();
  if (datasets.empty()) throw std::invalid_argument("need at least one dataset");
  if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
  const std::size_t K = datasets.size();
  QNNMetric m;
  m.Lay = cfg.Lay;
  m.acc.assign(n_max, std::vector<double>(K));
  m.train_cost.assign(n_max, std::vector<double>(K));
  m.params.assign(n_max, std::vector<QNNParams>(K));
  const Rng base = rng.fork(0x4e);
  rng();
  parallel_for(K, [&](std::size_t k) {
    Rng r = base.fork(k);
    const auto& tr = datasets[k].train.samples;
    const auto& te = datasets[k].test.samples;
    TrainResult res = train_1q(tr, cfg, est, r);
    for (std::size_t n = 1;; ++n) {
      m.params[n - 1][k] = res.params;
      m.train_cost[n - 1][k] = res.cost;
      Rng tr_rng = r.fork(0x7e57 + n);
      m.acc[n - 1][k] = test_accuracy(te, res.params, est, tr_rng);
      if (n == n_max) break;
      res = train_nq(tr, res.params, cfg, est, r);
    }
  });
  for (std::size_t n = 0; n < n_max; ++n) {
    m.mean.push_back(std::accumulate(m.acc[n].begin(), m.acc[n].end(), 0.0) / double(K));
    m.stddev.push_back(sample_std(m.acc[n]));
  }
  return m;
}

enum class DatasetKind { Sphere, Plane, TwoBlobs };

inline const char* dataset_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::Sphere: return "sphere";
    case DatasetKind::Plane: return "plane";
    default: return "two-blobs";
  }
}

inline DatasetKind dataset_from_name(const std::string& s) {
  if (s == "sphere") return DatasetKind::Sphere;
  if (s == "plane") return DatasetKind::Plane;
  if (s == "two-blobs") return DatasetKind::TwoBlobs;
  throw ConfigError("unknown dataset generator '" + s + "'");
}

// Radius enclosing half of the [-1, 1]^3 cube volume.
inline double sphere_radius() { return std::cbrt(3.0 / PI); }

inline const Features& plane_normal() {
  static const Features w{0.6, -0.48, 0.64};
  return w;
}

inline LabeledDataset generate_dataset(DatasetKind kind, std::size_t n, std::uint64_t seed) {
  if (n < 20) throw std::invalid_argument("dataset needs at least 20 samples");
  LabeledDataset d;
  d.generator = dataset_name(kind);
  d.seed = seed;
  Rng rng(seed);
  auto u = [&] { return -1.0 + 2.0 * rng.uniform(); };
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    if (kind == DatasetKind::TwoBlobs) {
      s.y = (i % 2) ? 1 : -1;
      for (auto& v : s.x) v = std::clamp(0.4 * s.y + 0.3 * rng.normal(), -1.0, 1.0);
    } else {
      for (auto& v : s.x) v = u();
      if (kind == DatasetKind::Sphere) {
        s.y = std::hypot(s.x[0], s.x[1], s.x[2]) > sphere_radius() ? 1 : -1;
      } else {
        const auto& w = plane_normal();
        s.y = s.x[0] * w[0] + s.x[1] * w[1] + s.x[2] * w[2] >= 0.0 ? 1 : -1;
      }
    }
    d.samples.push_back(s);
  }
  return d;
}

// Stratified split: round(test_fraction * class size) of each class go to
// the test set, chosen by a seeded shuffle.
inline QNNSplit split_dataset(const LabeledDataset& d, Rng& rng, double test_fraction = 0.3) {
  QNNSplit out;
  out.train.generator = out.test.generator = d.generator;
  out.train.seed = out.test.seed = d.seed;
  out.train.split = "train";
  out.test.split = "test";
  for (int label : {-1, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < d.samples.size(); ++i)
      if (d.samples[i].y == label) idx.push_back(i);
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
    const auto nt = std::size_t(std::llround(test_fraction * double(idx.size())));
    std::sort(idx.begin(), idx.begin() + nt);
    std::sort(idx.begin() + nt, idx.end());
    for (std::size_t j = 0; j < idx.size(); ++j) (j < nt ? out.test : out.train).samples.push_back(d.samples[idx[j]]);
  }
  return out;
}

}  // namespace qusquare
