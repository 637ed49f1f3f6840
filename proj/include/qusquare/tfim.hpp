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

#include <cmath>
#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qusquare/backend.hpp"
#include "qusquare/qsp.hpp"

namespace qusquare {

inline const double E_CONST = std::exp(1.0);

struct TFIMConfig {
  std::size_t L = 3;
  double eps = 0.01;
  double delta = 0.1;
  double eps0_threshold = 7e-5;
  double eps0_min = 1e-7;
  int eps0_steps = 6;     // geometric bisection steps for the smallest passing eps0
  double s = 0.01;        // time grid
  double t_start = 1.0;
  double t_limit = 10.0;
  int max_degree = 400;   // circuit-depth budget on the truncation degree

  void validate() const {
    if (L < 3) throw ConfigError("L must be at least 3");
    if (!(eps > 0.0 && eps <= 0.01)) throw ConfigError("eps must lie in (0, 0.01]");
    if (!(delta > 0.0 && delta <= 0.1)) throw ConfigError("delta must lie in (0, 0.1]");
    if (!(eps0_min > 0.0 && eps0_min < eps0_threshold)) throw ConfigError("need 0 < eps0_min < eps0 threshold");
    if (!(eps0_threshold > 0.0 && eps0_threshold <= 7e-5)) throw ConfigError("eps0 threshold must lie in (0, 7e-5]");
    if (eps0_steps < 0) throw ConfigError("eps0_steps must be non-negative");
    if (!(s > 0.0 && s <= 0.01)) throw ConfigError("time step s must lie in (0, 0.01]");
    if (!(t_start >= s && t_limit >= t_start)) throw ConfigError("need s <= t_start <= t_limit");
    if (max_degree < 2) throw ConfigError("max_degree must be at least 2");
  }
};

inline double tfim_coupling(std::size_t L) { return 1.0 / (double(L) * E_CONST); }
inline double tfim_alpha() { return 2.0 / E_CONST; }

inline std::size_t ancilla_count(std::size_t terms) {
  std::size_t m = 0;
  while ((std::size_t(1) << m) < terms) ++m;
  return std::max<std::size_t>(m, 1);
}

struct TFIMTerms {
  std::vector<double> weights;
  std::vector<PauliString> unitaries;
};

// Z_j for every site, then X_j X_{j+1} with periodic wrap.
inline TFIMTerms tfim_terms(std::size_t L) {
  if (L < 3) throw std::invalid_argument("TFIM needs L >= 3");
  TFIMTerms t;
  for (std::size_t j = 0; j < L; ++j) t.unitaries.push_back(PauliString::single(L, j, 'Z'));
  for (std::size_t j = 0; j < L; ++j) {
    PauliString p(L);
    p.set(j, 'X');
    p.set((j + 1) % L, 'X');
    t.unitaries.push_back(p);
  }
  t.weights.assign(2 * L, std::sqrt(1.0 / double(2 * L)));
  return t;
}

// Ancilla-register layout: qubit 0 carries the most significant index bit.
inline Circuit build_uprep(const std::vector<double>& p) {
  if (p.empty()) throw std::invalid_argument("empty weight vector");
  double nrm = 0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument("weights must be non-negative");
    nrm += v * v;
  }
  if (nrm == 0.0) throw std::invalid_argument("zero weight vector");
  const std::size_t m = ancilla_count(p.size());
  const std::size_t dim = std::size_t(1) << m;
  std::vector<double> vec(dim, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) vec[i] = p[i] / std::sqrt(nrm);

  // angles[k] for level k+1 has dim >> (k+1) entries
  std::vector<std::vector<double>> angles;
  while (vec.size() > 1) {
    std::vector<double> next(vec.size() / 2), ang(vec.size() / 2);
    for (std::size_t s = 0; s < next.size(); ++s) {
      next[s] = std::hypot(vec[2 * s], vec[2 * s + 1]);
      ang[s] = next[s] > 0.0 ? 2.0 * std::acos(std::clamp(vec[2 * s] / next[s], -1.0, 1.0)) : 0.0;
    }
    angles.push_back(std::move(ang));
    vec = std::move(next);
  }
  Circuit c(m);
  for (std::size_t lvl = m; lvl-- > 0;) {
    // lvl = m-1 is the single top angle on qubit 0
    const unsigned target = unsigned(m - 1 - lvl);
    const auto& ang = angles[lvl];
    for (std::size_t s = 0; s < ang.size(); ++s) {
      if (ang[s] == 0.0) continue;
      Gate g = gates::ry(target, ang[s]);
      for (unsigned b = 0; b < target; ++b) g.controls.push_back({b, bool((s >> (target - 1 - b)) & 1u)});
      c.append(g);
    }
  }
  return c;
}

// System qubits 0..L-1, ancillas L..L+m-1 (L = MSB). Index i applies U_i to
// the system; padded indices act as identity.
inline Circuit build_uselect(const std::vector<PauliString>& us, std::size_t L) {
  const std::size_t m = ancilla_count(us.size());
  Circuit c(L + m);
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (us[i].size() != L) throw std::invalid_argument("term size does not match system size");
    std::vector<Control> ctl;
    for (std::size_t b = 0; b < m; ++b) ctl.push_back({unsigned(L + b), bool((i >> (m - 1 - b)) & 1u)});
    if (us[i].negative()) throw std::invalid_argument("select terms must be unsigned Paulis");
    for (unsigned q = 0; q < L; ++q) {
      const char ch = us[i].at(q);
      if (ch == 'I') continue;
      Gate g = ch == 'X' ? gates::x(q) : ch == 'Y' ? gates::y(q) : gates::z(q);
      g.controls = ctl;
      c.append(g);
    }
  }
  return c;
}

struct TFIMLayout {
  std::size_t L = 0, m = 0;
  unsigned qA = 0, qB = 0;
  std::size_t total() const { return L + m + 2; }
  std::vector<unsigned> ancillas() const {
    std::vector<unsigned> a;
    for (std::size_t b = 0; b < m; ++b) a.push_back(unsigned(L + b));
    return a;
  }
};

inline TFIMLayout tfim_layout(std::size_t L) {
  TFIMLayout l;
  l.L = L;
  l.m = ancilla_count(2 * L);
  l.qA = unsigned(L + l.m);
  l.qB = unsigned(L + l.m + 1);
  return l;
}

// Prep^dagger Select Prep on system + ancilla qubits.
inline Circuit block_encoding(std::size_t L) {
  const auto terms = tfim_terms(L);
  const std::size_t m = ancilla_count(terms.unitaries.size());
  std::vector<unsigned> amap;
  for (std::size_t b = 0; b < m; ++b) amap.push_back(unsigned(L + b));
  const Circuit prep = relabel(build_uprep(terms.weights), amap, L + m);
  Circuit c = prep;
  c = concat(c, build_uselect(terms.unitaries, L));
  return concat(c, inverse(prep));
}

// e^{i phi (2P - I)} on the qA = 0 subspace, P projecting the ancillas onto
// all-zero; the qA = 1 subspace gets the conjugate phase.
inline Circuit projector_phase_circuit(double phi, const std::vector<unsigned>& ancillas, unsigned qA, std::size_t n) {
  Circuit c(n);
  Gate cnot = gates::x(qA);
  for (auto a : ancillas) cnot.controls.push_back({a, false});
  c.append(cnot);
  c.append(gates::rz(qA, 2.0 * phi));
  c.append(cnot);
  return c;
}

struct QSPCircuit {
  Circuit circuit;
  TFIMLayout layout;
  double t = 0.0, eps0 = 0.0, tau = 0.0;
  int degree = 0;
  PhaseSequence cos_phases, sin_phases;
  std::vector<double> psi_cos, psi_sin;
};

// H on qA and qB, the cos sequence controlled on qB = 0, the sin sequence
// controlled on qB = 1, S and H on qB, H on qA. Post-selecting qB = 1 with
// qA and the ancillas at 0 leaves (P_cos - i P_sin)(H/alpha)/2 on the system.
inline QSPCircuit assemble_qsp(std::size_t L, double t, double eps0, int max_degree = 400) {
  if (t < 0.0) throw std::domain_error("t must be non-negative");
  QSPCircuit q;
  q.layout = tfim_layout(L);
  q.t = t;
  q.eps0 = eps0;
  q.tau = tfim_alpha() * t;
  q.degree = t > 0.0 ? truncation_degree(q.tau, eps0) : 0;
  if (q.degree > max_degree)
    throw std::runtime_error("truncation degree " + std::to_string(q.degree) + " exceeds depth budget");
  q.cos_phases = solve_phases(chebyshev_coeffs(q.tau, q.degree, Parity::Even, eps0));
  q.sin_phases = solve_phases(chebyshev_coeffs(q.tau, q.degree, Parity::Odd, eps0));
  q.psi_cos = reflection_phases(q.cos_phases.full);
  q.psi_sin = reflection_phases(q.sin_phases.full);

  const std::size_t n = q.layout.total();
  std::vector<unsigned> inner;
  for (unsigned k = 0; k < L + q.layout.m; ++k) inner.push_back(k);
  const Circuit ub = relabel(block_encoding(L), inner, n);
  const auto anc = q.layout.ancillas();

  Circuit c(n);
  c.append(gates::h(q.layout.qA));
  c.append(gates::h(q.layout.qB));
  auto branch = [&](const std::vector<double>& psi, bool bit) {
    const Control ctl{q.layout.qB, bit};
    for (std::size_t j = psi.size(); j-- > 0;) {
      append_controlled(c, projector_phase_circuit(psi[j], anc, q.layout.qA, n), ctl);
      if (j > 0) append_controlled(c, ub, ctl);
    }
  };
  branch(q.psi_cos, false);
  branch(q.psi_sin, true);
  c.append(gates::s(q.layout.qB));
  c.append(gates::h(q.layout.qB));
  c.append(gates::h(q.layout.qA));
  q.circuit = std::move(c);
  return q;
}

// Closed-form magnetization from the free-fermion solution with
// antiperiodic momenta k = 2 pi (m + 1/2) / L.
inline double analytical_Mz(std::size_t L, double t) {
  if (L < 3) throw std::invalid_argument("TFIM needs L >= 3");
  double acc = 0;
  for (std::size_t m = 0; m < L; ++m) {
    const double k = 2.0 * PI * (double(m) + 0.5) / double(L);
    const double e = 1.0 - std::cos(k), d = std::sin(k);
    const double n2 = e * e + d * d;
    if (n2 == 0.0 || d == 0.0) continue;
    const double en = 2.0 / (E_CONST * double(L)) * std::sqrt(n2);
    const double sn = std::sin(en * t);
    acc += d * d / n2 * sn * sn;
  }
  return 1.0 - 2.0 / double(L) * acc;
}

struct MzEstimate {
  double mu = 0.0;
  std::vector<double> mu_i;
  std::size_t accepted = 0;
  std::size_t raw = 0;
  double acceptance_rate = 0.0;
};

inline bool postselected(std::uint64_t bits, const TFIMLayout& l) {
  if (!((bits >> l.qB) & 1u)) return false;
  if ((bits >> l.qA) & 1u) return false;
  for (auto a : l.ancillas())
    if ((bits >> a) & 1u) return false;
  return true;
}

inline std::size_t raw_shot_budget(std::size_t quota, double eps0) {
  return std::size_t(std::ceil(20.0 * double(quota) / ((1.0 - eps0) * (1.0 - eps0) / 4.0)));
}

// Draws fixed-size batches until `quota` post-selected shots are collected.
inline MzEstimate estimate_Mz(const Circuit& c, const TFIMLayout& l, double eps, double delta, double eps0,
                              const Backend& backend, Rng& rng) {
  const std::size_t quota = hoeffding_shots(eps, delta);
  const std::size_t budget = raw_shot_budget(quota, eps0);
  const std::size_t batch = std::max<std::size_t>(4 * quota, 1024);
  MzEstimate est;
  std::vector<double> sums(l.L, 0.0);
  const Rng base = rng.fork(0x7f1);
  rng();
  for (std::size_t b = 0; est.accepted < quota; ++b) {
    if (est.raw >= budget) {
      const double rate = est.raw ? double(est.accepted) / double(est.raw) : 0.0;
      throw StarvationError("post-selection budget exhausted after " + std::to_string(est.raw) + " shots", rate);
    }
    Rng r = base.fork(b);
    const auto bits = backend.sample(c, std::min(batch, budget - est.raw), r);
    for (auto v : bits) {
      ++est.raw;
      if (!postselected(v, l)) continue;
      for (std::size_t q = 0; q < l.L; ++q) sums[q] += ((v >> q) & 1u) ? -1.0 : 1.0;
      if (++est.accepted == quota) break;
    }
  }
  est.mu_i.resize(l.L);
  double tot = 0;
  for (std::size_t q = 0; q < l.L; ++q) {
    est.mu_i[q] = sums[q] / double(quota);
    tot += est.mu_i[q];
  }
  est.mu = tot / double(l.L);
  est.acceptance_rate = double(est.accepted) / double(est.raw);
  return est;
}

inline double interval_halfwidth(double eps0, double eps) { return 10.0 * (2.0 * eps0 + eps); }

inline bool check_interval(double mu, double mz, double eps0, double eps) {
  const double w = interval_halfwidth(eps0, eps);
  return mu >= mz - w && mu <= mz + w;
}

struct TFIMRunRecord {
  double t = 0.0, eps0 = 0.0;
  int degree = 0;
  std::vector<double> mu_i;
  double mu = 0.0, mz = 0.0, lo = 0.0, hi = 0.0;
  bool pass = false;
  std::size_t accepted = 0, raw = 0;
  double acceptance_rate = 0.0;
  std::string error;
};

inline TFIMRunRecord run_tfim(const TFIMConfig& cfg, double t, double eps0, const Backend& backend, Rng& rng) {
  TFIMRunRecord rec;
  rec.t = t;
  rec.eps0 = eps0;
  rec.mz = analytical_Mz(cfg.L, t);
  rec.lo = rec.mz - interval_halfwidth(eps0, cfg.eps);
  rec.hi = rec.mz + interval_halfwidth(eps0, cfg.eps);
  try {
    const auto q = assemble_qsp(cfg.L, t, eps0, cfg.max_degree);
    rec.degree = q.degree;
    const auto est = estimate_Mz(q.circuit, q.layout, cfg.eps, cfg.delta, eps0, backend, rng);
    rec.mu_i = est.mu_i;
    rec.mu = est.mu;
    rec.accepted = est.accepted;
    rec.raw = est.raw;
    rec.acceptance_rate = est.acceptance_rate;
    rec.pass = check_interval(rec.mu, rec.mz, eps0, cfg.eps);
  } catch (const StarvationError& e) {
    rec.error = e.what();
    rec.acceptance_rate = e.acceptance_rate;
  } catch (const SolverError& e) {
    rec.error = e.what();
  } catch (const std::runtime_error& e) {
    rec.error = e.what();
  }
  return rec;
}

struct TFIMResult {
  double t_max = 0.0;
  std::map<double, std::optional<double>> eps_min;  // per evaluated t; empty if none passed
  std::vector<TFIMRunRecord> records;
  std::string diagnostic;
};

// Smallest passing eps0 at time t: check the threshold, then the lower
// bound, then bisect geometrically between them.
inline std::optional<double> smallest_eps0(const TFIMConfig& cfg, double t, const Backend& backend, Rng& rng,
                                           std::vector<TFIMRunRecord>& log) {
  std::uint64_t k = 0;
  auto run = [&](double e0) {
    Rng r = rng.fork(k++);
    log.push_back(run_tfim(cfg, t, e0, backend, r));
    return log.back().pass;
  };
  if (!run(cfg.eps0_threshold)) return std::nullopt;
  if (run(cfg.eps0_min)) return cfg.eps0_min;
  double lo = cfg.eps0_min, hi = cfg.eps0_threshold;
  for (int i = 0; i < cfg.eps0_steps; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (run(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

inline TFIMResult search_tmax(const TFIMConfig& cfg, const Backend& backend, Rng& rng) {
  cfg.validate();
  TFIMResult out;
  const auto jmax = std::size_t(std::floor(cfg.t_limit / cfg.s + 1e-9));
  std::map<std::size_t, bool> seen;
  auto feasible = [&](std::size_t j) {
    auto it = seen.find(j);
    if (it != seen.end()) return it->second;
    const double t = double(j) * cfg.s;
    Rng r = rng.fork(j);
    const auto e = smallest_eps0(cfg, t, backend, r, out.records);
    out.eps_min[t] = e;
    return seen[j] = e.has_value() && *e < cfg.eps0_threshold;
  };
  std::size_t j = std::min(jmax, std::max<std::size_t>(1, std::size_t(std::llround(cfg.t_start / cfg.s))));
  std::size_t good = 0, bad = 0;
  if (feasible(j)) {
    good = j;
    while (good < jmax) {
      const std::size_t nj = std::min(2 * good, jmax);
      if (feasible(nj)) {
        good = nj;
      } else {
        bad = nj;
        break;
      }
    }
    if (bad == 0) out.diagnostic = "search stopped at t_limit";
  } else {
    bad = j;
    while (bad > 1) {
      const std::size_t nj = bad / 2;
      if (feasible(nj)) {
        good = nj;
        break;
      }
      bad = nj;
    }
    if (good == 0) {
      out.diagnostic = "no evaluated time reached eps_t,min below the threshold";
      return out;
    }
  }
  if (bad != 0)
    while (bad - good > 1) {
      const std::size_t mid = good + (bad - good) / 2;
      if (feasible(mid))
        good = mid;
      else
        bad = mid;
    }
  out.t_max = double(good) * cfg.s;
  return out;
}

}  // namespace qusquare
