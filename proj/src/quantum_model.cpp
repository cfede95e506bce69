#include "qmh/quantum_model.hpp"

#include <cmath>
#include <random>

namespace qmh {

namespace {

using C = std::complex<double>;
using CMat = std::vector<C>;
using CVec = std::vector<C>;

CMat cmul(const CMat& a, const CMat& b, int n) {
  CMat r(static_cast<std::size_t>(n) * n, C{0, 0});
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      C v = a[i * n + k];
      if (v == C{0, 0}) continue;
      for (int j = 0; j < n; ++j) r[i * n + j] += v * b[k * n + j];
    }
  return r;
}

CVec apply(const CMat& a, const CVec& x, int n) {
  CVec r(n, C{0, 0});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r[i] += a[i * n + j] * x[j];
  return r;
}

C inner(const CVec& x, const CVec& y) {
  C s{0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double mat_max_abs(const CMat& a) {
  double m = 0.0;
  for (const C& v : a) m = std::max(m, std::abs(v));
  return m;
}

const CMat& projector_of(const QuantumModel& m, int basic, int label) {
  auto it = m.projectors.find({basic, label});
  if (it == m.projectors.end())
    throw InputError("model is missing projector for basic " + std::to_string(basic) +
                     " label " + std::to_string(label));
  return it->second;
}

} // namespace

std::vector<ModelIssue> check_model(const QuantumModel& m, const Scenario& s, double tol) {
  std::vector<ModelIssue> issues;
  const int n = m.dim;
  if (n <= 0 || m.state.size() != static_cast<std::size_t>(n)) {
    issues.push_back({"state dimension mismatch", 1.0});
    return issues;
  }
  double nrm = std::sqrt(std::abs(inner(m.state, m.state)));
  if (std::fabs(nrm - 1.0) > tol)
    issues.push_back({"state is not normalized", std::fabs(nrm - 1.0)});

  for (int i = 0; i < s.n_basics(); ++i) {
    CMat sum(static_cast<std::size_t>(n) * n, C{0, 0});
    for (int a = 0; a < s.space.cards[i]; ++a) {
      const CMat& e = projector_of(m, i, a);
      if (e.size() != static_cast<std::size_t>(n) * n) {
        issues.push_back({"projector dimension mismatch", 1.0});
        return issues;
      }
      // Hermiticity
      double h = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) h = std::max(h, std::abs(e[r * n + c] - std::conj(e[c * n + r])));
      if (h > tol)
        issues.push_back({"projector (" + std::to_string(i) + "," + std::to_string(a) +
                              ") is not Hermitian",
                          h});
      // idempotency
      CMat ee = cmul(e, e, n);
      for (std::size_t k = 0; k < ee.size(); ++k) ee[k] -= e[k];
      double idem = mat_max_abs(ee);
      if (idem > tol)
        issues.push_back({"projector (" + std::to_string(i) + "," + std::to_string(a) +
                              ") is not idempotent",
                          idem});
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += e[k];
    }
    for (int r = 0; r < n; ++r) sum[r * n + r] -= C{1, 0};
    double comp = mat_max_abs(sum);
    if (comp > tol)
      issues.push_back({"projectors of basic " + std::to_string(i) + " do not sum to identity",
                        comp});
  }

  // commutation for jointly performable pairs
  for (const auto& k : s.all_measurements) {
    if (k.size() != 2) continue;
    int i = k[0], j = k[1];
    for (int a = 0; a < s.space.cards[i]; ++a)
      for (int b = 0; b < s.space.cards[j]; ++b) {
        const CMat& ea = projector_of(m, i, a);
        const CMat& eb = projector_of(m, j, b);
        CMat ab = cmul(ea, eb, n);
        CMat ba = cmul(eb, ea, n);
        for (std::size_t q = 0; q < ab.size(); ++q) ab[q] -= ba[q];
        double comm = mat_max_abs(ab);
        if (comm > tol)
          issues.push_back({"projectors (" + std::to_string(i) + "," + std::to_string(a) +
                                ") and (" + std::to_string(j) + "," + std::to_string(b) +
                                ") do not commute",
                            comm});
      }
  }
  return issues;
}

Behaviour model_behaviour(const QuantumModel& m, std::shared_ptr<const Scenario> s,
                          double tol) {
  auto issues = check_model(m, *s, tol);
  if (!issues.empty()) {
    std::string msg = "quantum model invariant violation: " + issues.front().what +
                      " (magnitude " + std::to_string(issues.front().magnitude) + ")";
    throw InputError(msg);
  }
  std::vector<std::vector<double>> probs;
  for (const auto& kset : s->maximal_contexts) {
    Measurement meas = s->make_measurement(kset);
    std::vector<double> v;
    for (std::size_t c = 0; c < meas.n_cells(); ++c) {
      auto labels = meas.cell_labels(c);
      CVec w = m.state;
      for (std::size_t q = meas.basics.size(); q-- > 0;)
        w = apply(projector_of(m, meas.basics[q], labels[q]), w, m.dim);
      C p = inner(m.state, w);
      if (std::fabs(p.imag()) > 10 * tol)
        throw Error("model probability has a non-negligible imaginary part");
      v.push_back(p.real());
    }
    probs.push_back(std::move(v));
  }
  Behaviour b = Behaviour::create(std::move(s), std::move(probs));
  auto bad = validate(b, std::max(tol * 100, 1e-8));
  if (!bad.empty())
    throw Error("model behaviour failed consistency validation: " + bad.front().what);
  return b;
}

linalg::Matrix model_atom_gram(const QuantumModel& m, const Scenario& s) {
  const std::size_t n = s.n_atoms();
  std::vector<CVec> atom_vecs(n);
  for (std::size_t atom = 0; atom < n; ++atom) {
    CVec w = m.state;
    for (int f = s.n_basics(); f-- > 0;)
      w = apply(projector_of(m, f, s.space.label_of(atom, f)), w, m.dim);
    atom_vecs[atom] = std::move(w);
  }
  linalg::Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double v = inner(atom_vecs[i], atom_vecs[j]).real();
      g.at(i, j) = v;
      g.at(j, i) = v;
    }
  return g;
}

namespace {

// qubit projector onto the +/- eigenspace of direction n.sigma
CMat qubit_projector(double nx, double ny, double nz, int label) {
  double s = label == 0 ? 1.0 : -1.0;
  CMat e(4);
  e[0] = C{(1.0 + s * nz) / 2.0, 0.0};
  e[1] = C{s * nx / 2.0, -s * ny / 2.0};
  e[2] = C{s * nx / 2.0, s * ny / 2.0};
  e[3] = C{(1.0 - s * nz) / 2.0, 0.0};
  return e;
}

// embed a one-qubit operator on qubit 0 or 1 of a two-qubit space
CMat embed(const CMat& e, int qubit) {
  CMat r(16, C{0, 0});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        if (qubit == 0)
          r[(i * 2 + k) * 4 + (j * 2 + k)] = e[i * 2 + j];
        else
          r[(k * 2 + i) * 4 + (k * 2 + j)] = e[i * 2 + j];
      }
  return r;
}

QuantumModel two_qubit_model(const std::array<std::array<double, 3>, 2>& alice,
                             const std::array<std::array<double, 3>, 2>& bob,
                             const CVec& state) {
  QuantumModel m;
  m.dim = 4;
  m.state = state;
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a)
      m.projectors[{x, a}] =
          embed(qubit_projector(alice[x][0], alice[x][1], alice[x][2], a), 0);
  for (int y = 0; y < 2; ++y)
    for (int b = 0; b < 2; ++b)
      m.projectors[{2 + y, b}] =
          embed(qubit_projector(bob[y][0], bob[y][1], bob[y][2], b), 1);
  return m;
}

} // namespace

QuantumModel singlet_model() {
  const double r = 1.0 / std::sqrt(2.0);
  CVec psi(4, C{0, 0});
  psi[1] = C{r, 0};
  psi[2] = C{-r, 0};
  // A: z and x; B: -(z+x)/sqrt2 and (x-z)/sqrt2, giving E = (r, r, r, -r).
  return two_qubit_model({{{0, 0, 1}, {1, 0, 0}}},
                         {{{-r, 0, -r}, {r, 0, -r}}}, psi);
}

QuantumModel random_two_qubit_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto dir = [&]() {
    std::array<double, 3> d;
    double nn = 0;
    do {
      d = {g(rng), g(rng), g(rng)};
      nn = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
    } while (nn < 1e-6);
    for (auto& v : d) v /= nn;
    return d;
  };
  CVec psi(4);
  double nn = 0;
  for (auto& v : psi) {
    v = C{g(rng), g(rng)};
    nn += std::norm(v);
  }
  nn = std::sqrt(nn);
  for (auto& v : psi) v /= nn;
  return two_qubit_model({dir(), dir()}, {dir(), dir()}, psi);
}

QuantumModel point_model(const Scenario& s, std::size_t atom) {
  if (atom >= s.n_atoms()) throw InputError("atom index out of range");
  QuantumModel m;
  m.dim = 1;
  m.state = {C{1, 0}};
  for (int i = 0; i < s.n_basics(); ++i)
    for (int a = 0; a < s.space.cards[i]; ++a)
      m.projectors[{i, a}] = {s.space.label_of(atom, i) == a ? C{1, 0} : C{0, 0}};
  return m;
}

} // namespace qmh
