#pragma once

#include <map>

#include "maximal.hpp"
#include "norms.hpp"
#include "reproducing.hpp"

namespace morreykit {

struct AtomSpec {
  int K = 1;
  int L = -1;
  double d = 3.0;
  double moment_tol = 1e-8;
  double deriv_tol = 1e-6;
  bool homogeneous = false;
};

struct MoleculeSpec {
  int K = 1;
  int L = -1;
  double N = 4.0;
  double moment_tol = 1e-8;
  double deriv_tol = 1e-6;
};

/// A function stored on a cubic window of `width` cells per axis starting at
/// grid index `origin` (wrapped modulo the torus). Periodic patches span the
/// whole torus.
struct Patch {
  int n = 1, J = 0;
  std::vector<int> origin;
  int width = 0;
  bool periodic = false;
  std::vector<cplx> data;

  std::size_t size() const { return data.size(); }

  /// Adds c * patch into a torus grid function.
  void add_to(GridFunction& g, cplx c) const {
    const int G = 1 << J;
    std::vector<int> loc(n), at(n);
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data[i] == 0.0) continue;
      std::size_t t = i;
      for (int k = n - 1; k >= 0; --k) loc[k] = int(t % width), t /= width;
      std::size_t flat = 0;
      for (int k = 0; k < n; ++k) flat = flat * G + ((origin[k] + loc[k]) % G + G) % G;
      g.data[flat] += c * data[i];
    }
  }

  GridFunction to_grid() const {
    GridFunction g(n, J);
    add_to(g, 1.0);
    return g;
  }

  static Patch extract(const GridFunction& f, std::vector<int> origin, int width) {
    Patch p;
    p.n = f.n;
    p.J = f.J;
    p.width = width;
    p.origin = std::move(origin);
    p.periodic = width >= f.G();
    if (p.periodic) {
      p.width = f.G();
      p.origin.assign(f.n, 0);
    }
    const int G = f.G();
    std::size_t total = 1;
    for (int k = 0; k < f.n; ++k) total *= p.width;
    p.data.resize(total);
    std::vector<int> loc(f.n);
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t t = i;
      for (int k = f.n - 1; k >= 0; --k) loc[k] = int(t % p.width), t /= p.width;
      std::size_t flat = 0;
      for (int k = 0; k < f.n; ++k) flat = flat * G + ((p.origin[k] + loc[k]) % G + G) % G;
      p.data[i] = f.data[flat];
    }
    return p;
  }
};

namespace detail {

inline int log2_exact(int w) {
  int e = 0;
  while ((1 << e) < w) ++e;
  if ((1 << e) != w) throw domain_error("patch width must be a power of two");
  return e;
}

// max_{|alpha|<=K} 2^{-j|alpha|} sup |d^alpha p|, derivatives taken
// spectrally on the patch zero-padded to twice its width (or periodically
// for torus-wide patches).
inline double derivative_sup(const Patch& p, int j, int K) {
  const int W = p.periodic ? p.width : 2 * p.width;
  const int e = log2_exact(W);
  GridFunction g(p.n, e);
  const int off = p.periodic ? 0 : p.width / 2;
  std::vector<int> loc(p.n);
  for (std::size_t i = 0; i < p.data.size(); ++i) {
    std::size_t t = i;
    for (int k = p.n - 1; k >= 0; --k) loc[k] = int(t % p.width), t /= p.width;
    std::size_t flat = 0;
    for (int k = 0; k < p.n; ++k) flat = flat * W + loc[k] + off;
    g.data[flat] = p.data[i];
  }
  // spectral_derivative treats the box as length 1; the box is W h long.
  const double len = std::ldexp(double(W), -p.J);
  double best = 0;
  if (K == 0) return g.max_abs();
  auto spec = fft_forward(g);
  for (auto& alpha : multi_indices(p.n, K)) {
    int a = abs_multi(alpha);
    std::vector<cplx> s = spec;
    for_each_frequency(p.n, e, [&](std::size_t i, const double* xi, const int* c) {
      cplx m = 1.0;
      for (int k = 0; k < p.n; ++k) {
        if (alpha[k] == 0) continue;
        if (alpha[k] % 2 == 1 && c[k] == W / 2) {
          m = 0.0;
          break;
        }
        m *= std::pow(cplx(0.0, xi[k] / len), alpha[k]);
      }
      s[i] *= m;
    });
    double sup = a == 0 ? g.max_abs() : fft_inverse(std::move(s), p.n, e).max_abs();
    best = std::max(best, std::ldexp(sup, -j * a));
  }
  return best;
}

// Separable zero-padded convolution of a patch with a 1D kernel on every axis.
inline void convolve_patch(std::vector<cplx>& data, int n, int W, const Kernel1D& d, double h) {
  if (d.zero) {
    std::fill(data.begin(), data.end(), cplx(0.0));
    return;
  }
  std::vector<cplx> line(W), out(W);
  for (int ax = 0; ax < n; ++ax) {
    std::size_t stride = 1;
    for (int k = ax + 1; k < n; ++k) stride *= W;
    for (std::size_t base = 0; base < data.size(); ++base) {
      if ((base / stride) % W != 0) continue;
      bool any = false;
      for (int i = 0; i < W; ++i) {
        line[i] = data[base + i * stride];
        any = any || line[i] != 0.0;
      }
      if (!any) continue;
      for (int i = 0; i < W; ++i) out[i] = 0.0;
      for (int src = 0; src < W; ++src) {
        if (line[src] == 0.0) continue;
        for (std::size_t t = 0; t < d.taps.size(); ++t) {
          int dst = src + d.lo + int(t);
          if (dst >= 0 && dst < W) out[dst] += d.taps[t] * h * line[src];
        }
      }
      for (int i = 0; i < W; ++i) data[base + i * stride] = out[i];
    }
  }
}

}  // namespace detail

/// Window used for an atom at Q: the doubled cube 2Q when the support fits,
/// else the smallest power-of-two window containing dQ.
inline Patch atom_window(const GridFunction& a, const DyadicCube& Q, double d) {
  const int G = a.G();
  if (Q.j <= 1) return Patch::extract(a, std::vector<int>(a.n, 0), G);
  const int s = G >> Q.j;
  std::vector<int> o2(a.n);
  for (int k = 0; k < a.n; ++k) o2[k] = int(Q.m[k]) * s - s / 2;
  Patch two = Patch::extract(a, o2, 2 * s);
  std::size_t inside = 0, total = 0;
  for (auto& v : two.data) inside += v != 0.0;
  for (auto& v : a.data) total += v != 0.0;
  if (inside == total) return two;
  int W = 1;
  while (W < d * s) W <<= 1;
  std::vector<int> o(a.n);
  for (int k = 0; k < a.n; ++k) o[k] = int(Q.m[k]) * s + s / 2 - W / 2;
  return Patch::extract(a, o, W);
}

struct AtomReport {
  bool support_ok = true;
  bool derivative_ok = true;
  bool moment_ok = true;
  double max_derivative = 0;  ///< max_alpha 2^{-j|alpha|} sup |d^alpha a|
  double max_moment = 0;
  bool ok() const { return support_ok && derivative_ok && moment_ok; }
};

namespace detail {
// Discrete moments h^n sum (x - x0)^beta p(x) over the patch window, with x
// measured on the unwrapped window.
inline double max_moment(const Patch& p, const std::vector<double>& x0, int L) {
  if (L < 0) return 0.0;
  const double h = std::ldexp(1.0, -p.J);
  double best = 0;
  std::vector<int> loc(p.n);
  for (auto& beta : multi_indices(p.n, L)) {
    KahanSum re, im;
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      if (p.data[i] == 0.0) continue;
      std::size_t t = i;
      for (int k = p.n - 1; k >= 0; --k) loc[k] = int(t % p.width), t /= p.width;
      double w = 1;
      for (int k = 0; k < p.n; ++k) {
        double x = (p.origin[k] + loc[k]) * h - x0[k];
        if (p.periodic) x -= std::round(x);
        w *= std::pow(x, beta[k]);
      }
      re.add(w * p.data[i].real());
      im.add(w * p.data[i].imag());
    }
    best = std::max(best, std::abs(cplx(re.value(), im.value())) * std::pow(h, p.n));
  }
  return best;
}
}  // namespace detail

/// Checks the (K,L)-atom conditions for a at Q: support in dQ, scaled
/// derivative bounds and, for j >= 1, vanishing moments up to L. In
/// homogeneous mode torus-wide atoms (j <= 0) must have mean zero.
inline AtomReport validate_atom(const GridFunction& a, const DyadicCube& Q, const AtomSpec& spec) {
  AtomReport rep;
  if (Q.j >= 1) {
    auto cells = box_cells(dilate(Q, spec.d), a.G());
    std::vector<char> inside(a.size(), 0);
    for (auto c : cells) inside[c] = 1;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!inside[i] && a.data[i] != 0.0) rep.support_ok = false;
  }
  Patch w = atom_window(a, Q, spec.d);
  rep.max_derivative = detail::derivative_sup(w, Q.j, spec.K);
  rep.derivative_ok = rep.max_derivative <= 1.0 + spec.deriv_tol;
  if (Q.j >= 1) {
    rep.max_moment = detail::max_moment(w, Q.center(), spec.L);
  } else if (spec.homogeneous && spec.L >= 0) {
    rep.max_moment = std::abs(a.integral());
  }
  rep.moment_ok = rep.max_moment <= spec.moment_tol;
  return rep;
}

/// Molecule check: |d^alpha b(x)| <= 2^{|alpha| j} (1 + 2^j |x - 2^-j m|)^-N for
/// |alpha| <= K (torus distance), and vanishing moments up to L for j >= 1.
inline AtomReport validate_molecule(const GridFunction& b, const DyadicCube& Q, const MoleculeSpec& spec) {
  AtomReport rep;
  if (!(spec.N > spec.K + b.n)) throw domain_error("validate_molecule: need N > K + n");
  const int G = b.G();
  std::vector<double> env(b.size());
  std::vector<int> c(b.n), d(b.n);
  for (std::size_t i = 0; i < b.size(); ++i) {
    b.coords(i, c.data());
    for (int k = 0; k < b.n; ++k) d[k] = c[k] - int(Q.j <= 0 ? 0 : Q.m[k] * (G >> Q.j));
    env[i] = std::pow(1.0 + std::ldexp(torus_distance(d.data(), b.n, G), std::max(Q.j, 0)), -spec.N);
  }
  for (auto& alpha : multi_indices(b.n, spec.K)) {
    auto da = abs_multi(alpha) == 0 ? b : spectral_derivative(b, alpha);
    for (std::size_t i = 0; i < b.size(); ++i) {
      double v = std::ldexp(std::abs(da.data[i]), -Q.j * abs_multi(alpha)) / env[i];
      rep.max_derivative = std::max(rep.max_derivative, v);
    }
  }
  rep.derivative_ok = rep.max_derivative <= 1.0 + spec.deriv_tol;
  if (Q.j >= 1 && spec.L >= 0) {
    Patch w = Patch::extract(b, std::vector<int>(b.n, 0), G);
    rep.max_moment = detail::max_moment(w, Q.center(), spec.L);
  }
  rep.moment_ok = rep.max_moment <= spec.moment_tol;
  return rep;
}

/// Coefficients and normalized atoms keyed by cube, ordered by (j, m).
struct AtomicDecomposition {
  int n = 1, J = 0;
  int K = 1;
  CoeffField lambda;
  std::map<DyadicCube, Patch> atoms;
};

/// gamma_jm = phi_j * ((psi_j * f) chi_Q_jm); lambda_jm is the K-derivative
/// normalization of gamma_jm and a_jm = gamma_jm / lambda_jm. Summing
/// lambda_jm a_jm over all cubes returns f exactly (up to rounding).
inline AtomicDecomposition atomic_analyze(const GridFunction& f, const RychkovPair& pair, int K = 1, int jobs = 1) {
  if (f.n != pair.n() || f.J != pair.J()) throw domain_error("atomic_analyze: pair does not match the grid");
  const int n = f.n, J = f.J, G = f.G();
  const double h = f.h();
  AtomicDecomposition out;
  out.n = n;
  out.J = J;
  out.K = K;
  out.lambda = CoeffField(n, pair.floor_level(), pair.top());
  auto spec = fft_forward(f);
  for (int j = pair.floor_level(); j <= pair.top(); ++j) {
    auto ps = pair.psi_hat(j);
    std::vector<cplx> s = spec;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= ps[i];
    GridFunction g = fft_inverse(std::move(s), n, J);
    if (j <= 0) {
      GridFunction gam = pair.apply(g, pair.phi_hat(j));
      Patch p = Patch::extract(gam, std::vector<int>(n, 0), G);
      double lam = std::max(detail::derivative_sup(p, j, K), 1e-300);
      for (auto& v : p.data) v /= lam;
      out.lambda.at(j, 0) = lam;
      out.atoms.emplace(DyadicCube{j, Index(n, 0)}, std::move(p));
      continue;
    }
    const int side = G >> j, W = 2 * side;
    const std::size_t count = std::size_t(1) << (j * n);
    std::vector<Patch> level(count);
    std::vector<double> lams(count);
    CubeLattice lat{n, j, 0, true};
    parallel_for(count, jobs, [&](std::size_t flat) {
      DyadicCube Q = lat.cube(j, std::int64_t(flat));
      Patch p;
      p.n = n;
      p.J = J;
      p.width = W;
      p.origin.resize(n);
      for (int k = 0; k < n; ++k) p.origin[k] = int(Q.m[k]) * side - side / 2;
      std::size_t total = 1;
      for (int k = 0; k < n; ++k) total *= W;
      p.data.assign(total, 0.0);
      std::vector<int> loc(n);
      for (std::size_t i = 0; i < total; ++i) {
        std::size_t t = i;
        bool in = true;
        for (int k = n - 1; k >= 0; --k) {
          loc[k] = int(t % W), t /= W;
          in = in && loc[k] >= side / 2 && loc[k] < side / 2 + side;
        }
        if (!in) continue;
        std::size_t gf = 0;
        for (int k = 0; k < n; ++k) gf = gf * G + ((p.origin[k] + loc[k]) % G + G) % G;
        p.data[i] = g.data[gf];
      }
      std::vector<cplx> lo = p.data;
      detail::convolve_patch(p.data, n, W, pair.D(j), h);
      detail::convolve_patch(lo, n, W, pair.D(j - 1), h);
      for (std::size_t i = 0; i < total; ++i) p.data[i] -= lo[i];
      double lam = std::max(detail::derivative_sup(p, j, K), 1e-300);
      for (auto& v : p.data) v /= lam;
      lams[flat] = lam;
      level[flat] = std::move(p);
    });
    for (std::size_t flat = 0; flat < count; ++flat) {
      out.lambda.at(j, flat) = lams[flat];
      out.atoms.emplace(lat.cube(j, std::int64_t(flat)), std::move(level[flat]));
    }
  }
  return out;
}

/// f = sum_j sum_m lambda_jm a_jm, increasing j then lexicographic m.
inline GridFunction synthesize(const CoeffField& lam, const std::map<DyadicCube, Patch>& atoms, int J) {
  GridFunction f(lam.n, J);
  for (int j = lam.jmin; j <= lam.jmax; ++j) {
    CubeLattice lat{lam.n, std::max(j, 0), 0, true};
    for (std::size_t flat = 0; flat < lam.cubes_at(j); ++flat) {
      cplx c = lam.at(j, flat);
      if (c == 0.0) continue;
      DyadicCube Q = lat.cube(std::max(j, 0), std::int64_t(flat));
      Q.j = j;
      auto it = atoms.find(Q);
      if (it == atoms.end()) throw domain_error("synthesize: no atom for cube " + cube_literal(Q));
      it->second.add_to(f, c);
    }
  }
  return f;
}

inline GridFunction synthesize(const AtomicDecomposition& d) { return synthesize(d.lambda, d.atoms, d.J); }

/// C^K profile (1 - y^2)_+^{K+1} per axis times the monic polynomial of
/// degree L+1 orthogonal to all lower degrees in the discrete inner product
/// on the support, so exactly the moments up to L vanish. Support is
/// c(Q) + [-w, w]^n with w = 1.25 l(Q), inside 3Q. Normalized so the
/// scaled K-derivative bound holds with equality (spectrally measured).
inline GridFunction make_test_atom(int n, int J, const DyadicCube& Q, int K, int L) {
  GridFunction a(n, J);
  const double hw = 1.25 * Q.side();
  auto ctr = Q.center();
  const int G = a.G();
  // 1D profile along the axis, with x the signed offset from the center
  auto profile = [&](double y) { return std::abs(y) < 1 ? std::pow(1 - y * y, K + 1) : 0.0; };
  std::vector<std::vector<double>> ax(n, std::vector<double>(G, 0.0));
  std::vector<std::vector<double>> yy(n, std::vector<double>(G, 0.0));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < G; ++i) {
      double x = double(i) / G - ctr[k];
      x -= std::round(x);
      yy[k][i] = x / hw;
      ax[k][i] = profile(yy[k][i]);
    }
  // moment polynomial along axis 0 only: enough for all |beta| <= L because the
  // other factors are even and the basis is a tensor product
  std::vector<double> poly(G, 1.0);
  if (L >= 0) {
    const int D = L + 1;
    Eigen::MatrixXd A(D, D);
    Eigen::VectorXd rhs(D);
    for (int r = 0; r < D; ++r) {
      for (int c = 0; c < D; ++c) {
        double s = 0;
        for (int i = 0; i < G; ++i) s += std::pow(yy[0][i], r + c) * ax[0][i];
        A(r, c) = s;
      }
      double s = 0;
      for (int i = 0; i < G; ++i) s += std::pow(yy[0][i], r + D) * ax[0][i];
      rhs(r) = -s;
    }
    Eigen::VectorXd co = A.colPivHouseholderQr().solve(rhs);
    for (int i = 0; i < G; ++i) {
      double p = std::pow(yy[0][i], D);
      for (int r = 0; r < D; ++r) p += co(r) * std::pow(yy[0][i], r);
      poly[i] = p;
    }
  }
  std::vector<int> c(n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a.coords(i, c.data());
    double v = poly[c[0]];
    for (int k = 0; k < n; ++k) v *= ax[k][c[k]];
    a.data[i] = v;
  }
  AtomSpec spec;
  spec.K = K;
  Patch w = atom_window(a, Q, spec.d);
  double norm = detail::derivative_sup(w, Q.j, K);
  a *= 1.0 / norm;
  return a;
}

/// Molecule-type test function: envelope exp(1 - sqrt(1 + |2^j (x - c)|^2))
/// times a moment-removing polynomial, normalized against the order-N decay
/// bound. Algebraic tails would leave a jump at the torus seam; exponential
/// tails do not, and still satisfy the decay bound for every N.
inline GridFunction make_test_molecule(int n, int J, const DyadicCube& Q, int K, int L, double N) {
  GridFunction b(n, J);
  auto ctr = Q.center();
  const int G = b.G();
  const double sc = std::ldexp(1.0, Q.j);
  std::vector<std::vector<double>> yy(n, std::vector<double>(G));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < G; ++i) {
      double x = double(i) / G - ctr[k];
      x -= std::round(x);
      yy[k][i] = x * sc;
    }
  std::vector<double> env(b.size());
  std::vector<int> c(n);
  for (std::size_t i = 0; i < b.size(); ++i) {
    b.coords(i, c.data());
    double r2 = 0;
    for (int k = 0; k < n; ++k) r2 += yy[k][c[k]] * yy[k][c[k]];
    env[i] = std::exp(1.0 - std::sqrt(1.0 + r2));
  }
  std::vector<double> poly(G, 1.0);
  if (L >= 0) {
    // weight: marginal of the envelope on axis 0
    std::vector<double> wt(G, 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) {
      b.coords(i, c.data());
      wt[c[0]] += env[i];
    }
    const int D = L + 1;
    Eigen::MatrixXd A(D, D);
    Eigen::VectorXd rhs(D);
    for (int r = 0; r < D; ++r) {
      for (int cc = 0; cc < D; ++cc) {
        double s = 0;
        for (int i = 0; i < G; ++i) s += std::pow(yy[0][i], r + cc) * wt[i];
        A(r, cc) = s;
      }
      double s = 0;
      for (int i = 0; i < G; ++i) s += std::pow(yy[0][i], r + D) * wt[i];
      rhs(r) = -s;
    }
    Eigen::VectorXd co = A.colPivHouseholderQr().solve(rhs);
    for (int i = 0; i < G; ++i) {
      double p = std::pow(yy[0][i], D);
      for (int r = 0; r < D; ++r) p += co(r) * std::pow(yy[0][i], r);
      poly[i] = p;
    }
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    b.coords(i, c.data());
    b.data[i] = env[i] * poly[c[0]];
  }
  MoleculeSpec ms;
  ms.K = K;
  ms.L = L;
  ms.N = N;
  double m = validate_molecule(b, Q, ms).max_derivative;
  b *= 1.0 / m;
  return b;
}

struct DecayProfile {
  std::vector<int> nu;
  std::vector<double> ratio;  ///< sup_x |tau_nu(D) a| / M[chi_Q]^{P/n}
  double high_slope = 0;      ///< fitted over nu >= j
  double low_slope = 0;       ///< fitted over low_floor <= nu <= j
};

/// Band-by-band decay of an atom at Q against the maximal envelope of chi_Q.
/// Bands below 2 are empty on the torus and are skipped; values at the
/// rounding floor are excluded from the fits. The low fit starts at
/// `low_floor`: for coarser bands the torus is too small for the sup over x
/// to reach distances of order 2^-nu, and the ratio plateaus.
/// For molecules pass N as P.
inline DecayProfile band_decay_profile(const GridFunction& a, const DyadicCube& Q, const FilterBank& bank, double P,
                                       int low_floor = 5) {
  if (Q.j < low_floor + 1) throw domain_error("band_decay_profile: cube too coarse for a low-frequency fit");
  GridFunction chi(a.n, a.J);
  for (auto c : box_cells(dilate(Q, 1.0), a.G())) chi.data[c] = 1.0;
  auto M = hl_maximal(chi);
  std::vector<double> env(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) env[i] = std::pow(M.data[i].real(), P / a.n);
  BandSet bs(a, bank);
  DecayProfile out;
  double peak = 0;
  for (int nu = 2; nu <= bs.top(); ++nu) {
    auto b = bs.band(nu);
    double r = 0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(b.data[i]) / env[i]);
    out.nu.push_back(nu);
    out.ratio.push_back(r);
    peak = std::max(peak, r);
  }
  std::vector<double> hx, hy, lx, ly;
  for (std::size_t i = 0; i < out.nu.size(); ++i) {
    if (out.ratio[i] <= 1e-12 * peak) continue;
    double y = std::log2(out.ratio[i]);
    if (out.nu[i] >= Q.j) hx.push_back(out.nu[i]), hy.push_back(y);
    if (out.nu[i] <= Q.j && out.nu[i] >= low_floor) lx.push_back(out.nu[i]), ly.push_back(y);
  }
  out.high_slope = hx.size() >= 2 ? fit_slope(hx, hy) : 0.0;
  out.low_slope = lx.size() >= 2 ? fit_slope(lx, ly) : 0.0;
  return out;
}

}  // namespace morreykit
