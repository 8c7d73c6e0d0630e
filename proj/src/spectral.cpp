#include "qmpemba/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <lapacke.h>

#include "qmpemba/errors.hpp"

namespace qmpemba {

const char* to_string(Sector s) {
  switch (s) {
    case Sector::symmetric:
      return "symmetric";
    case Sector::other:
      return "other";
    case Sector::unclassified:
      return "unclassified";
  }
  return "unclassified";
}

Operator SpectralData::right_mode(std::size_t k) const {
  return unvectorize(right.col(static_cast<Eigen::Index>(k)), dim_hilbert);
}

Operator SpectralData::left_mode(std::size_t k) const {
  // tr(l rho) = sum_ij l_ji rho_ij = w^T vec(rho)  =>  l = reshape(w)^T
  return unvectorize(left.col(static_cast<Eigen::Index>(k)), dim_hilbert).transpose();
}

Complex SpectralData::coefficient(std::size_t k, const Operator& rho) const {
  return left.col(static_cast<Eigen::Index>(k)).transpose() * vectorize(rho);
}

namespace {

constexpr double kOrderQuantum = 1e-9;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

struct OrderKey {
  long long re_cell;
  long long im_cell;
  double abs_re;
  double im;
  auto operator<=>(const OrderKey&) const = default;
};

OrderKey order_key(Complex z) {
  const double ar = std::abs(z.real());
  return {std::llround(ar / kOrderQuantum), std::llround(z.imag() / kOrderQuantum), ar,
          z.imag()};
}

// Hermitian orthonormal basis of D x D matrices, indexed like vec():
//   (i,i)        -> E_ii
//   (i,j), i<j   -> (E_ij + E_ji)/sqrt2
//   (j,i), i<j   -> (-i E_ij + i E_ji)/sqrt2
// T has these as columns; it is block diagonal on index pairs {p, q}.
struct BasisPair {
  long p;  // vec index of (i,j), i<j
  long q;  // vec index of (j,i)
};

std::vector<BasisPair> basis_pairs(long d) {
  std::vector<BasisPair> out;
  out.reserve(static_cast<std::size_t>(d * (d - 1) / 2));
  for (long j = 0; j < d; ++j)
    for (long i = 0; i < j; ++i) out.push_back({i + d * j, j + d * i});
  return out;
}

// Real matrix T^dag M T. Throws if the result is not real, which would mean
// the generator does not preserve hermiticity.
Eigen::MatrixXd to_hermitian_basis(const Operator& m, long d) {
  const auto pairs = basis_pairs(d);
  Operator y = m;
  for (const auto& bp : pairs) {
    const CVector cp = y.col(bp.p);
    const CVector cq = y.col(bp.q);
    y.col(bp.p) = (cp + cq) * kInvSqrt2;
    y.col(bp.q) = (-kI * cp + kI * cq) * kInvSqrt2;
  }
  for (const auto& bp : pairs) {
    const Eigen::RowVectorXcd rp = y.row(bp.p);
    const Eigen::RowVectorXcd rq = y.row(bp.q);
    y.row(bp.p) = (rp + rq) * kInvSqrt2;
    y.row(bp.q) = (kI * rp - kI * rq) * kInvSqrt2;
  }
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  const double imag = y.imag().cwiseAbs().maxCoeff();
  if (imag > 1e-9 * scale) {
    std::ostringstream os;
    os << "generator is not hermiticity preserving (imaginary residue " << imag
       << " in the hermitian basis)";
    throw SpectralError(os.str());
  }
  return y.real();
}

// x -> T x, columnwise.
void from_hermitian_basis(Operator& x, long d) {
  for (const auto& bp : basis_pairs(d)) {
    const Eigen::RowVectorXcd xp = x.row(bp.p);
    const Eigen::RowVectorXcd xq = x.row(bp.q);
    x.row(bp.p) = (xp - kI * xq) * kInvSqrt2;
    x.row(bp.q) = (xp + kI * xq) * kInvSqrt2;
  }
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Groups of (transitively) coinciding eigenvalues; singletons omitted.
std::vector<std::vector<std::size_t>> find_clusters(const std::vector<Complex>& eig,
                                                    double tol) {
  const std::size_t n = eig.size();
  std::vector<std::size_t> by_re(n);
  std::iota(by_re.begin(), by_re.end(), 0);
  std::sort(by_re.begin(), by_re.end(), [&](std::size_t a, std::size_t b) {
    return eig[a].real() < eig[b].real() || (eig[a].real() == eig[b].real() && a < b);
  });
  UnionFind uf(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const Complex za = eig[by_re[a]];
      const Complex zb = eig[by_re[b]];
      if (zb.real() - za.real() >= tol) break;
      if (std::abs(za - zb) < tol) uf.unite(by_re[a], by_re[b]);
    }
  }
  std::vector<std::vector<std::size_t>> groups(n);
  for (std::size_t k = 0; k < n; ++k) groups[uf.find(k)].push_back(k);
  std::vector<std::vector<std::size_t>> out;
  for (auto& g : groups)
    if (g.size() > 1) out.push_back(std::move(g));
  return out;
}

Operator gather(const Operator& m, const std::vector<std::size_t>& cols) {
  Operator out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    out.col(static_cast<Eigen::Index>(c)) = m.col(static_cast<Eigen::Index>(cols[c]));
  return out;
}

void scatter(Operator& m, const std::vector<std::size_t>& cols, const Operator& block) {
  for (std::size_t c = 0; c < cols.size(); ++c)
    m.col(static_cast<Eigen::Index>(cols[c])) = block.col(static_cast<Eigen::Index>(c));
}

std::string describe_cluster(const std::vector<Complex>& eig,
                             const std::vector<std::size_t>& cluster) {
  std::ostringstream os;
  os.precision(12);
  os << "{";
  for (std::size_t c = 0; c < cluster.size(); ++c)
    os << (c ? ", " : "") << eig[cluster[c]].real() << (eig[cluster[c]].imag() < 0 ? "" : "+")
       << eig[cluster[c]].imag() << "i";
  os << "}";
  return os.str();
}

double condition(const Operator& g) {
  Eigen::JacobiSVD<Operator> svd(g);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

// Applies a permutation of mode positions to every per-mode field.
void reorder(SpectralData& sd, const std::vector<std::size_t>& order) {
  const std::size_t n = order.size();
  std::vector<Complex> eig(n);
  std::vector<ModeResidual> res(sd.residuals.empty() ? 0 : n);
  std::vector<Sector> sec(sd.sectors.empty() ? 0 : n);
  Operator r(sd.right.rows(), sd.right.cols());
  Operator l(sd.left.rows(), sd.left.cols());
  for (std::size_t k = 0; k < n; ++k) {
    const auto src = order[k];
    eig[k] = sd.eigenvalues[src];
    if (!res.empty()) res[k] = sd.residuals[src];
    if (!sec.empty()) sec[k] = sd.sectors[src];
    r.col(static_cast<Eigen::Index>(k)) = sd.right.col(static_cast<Eigen::Index>(src));
    l.col(static_cast<Eigen::Index>(k)) = sd.left.col(static_cast<Eigen::Index>(src));
  }
  sd.eigenvalues = std::move(eig);
  sd.residuals = std::move(res);
  sd.sectors = std::move(sec);
  sd.right = std::move(r);
  sd.left = std::move(l);
}

std::vector<std::size_t> sorted_order(const std::vector<Complex>& eig) {
  std::vector<std::size_t> order(eig.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spectral_order_less(eig[a], eig[b]);
  });
  return order;
}

Operator hermitized_stationary(const Operator& r) {
  const Complex tr = r.trace();
  Operator rho = r / tr;
  return 0.5 * (rho + rho.adjoint());
}

}  // namespace

bool spectral_order_less(Complex a, Complex b) { return order_key(a) < order_key(b); }

SpectralData eigendecompose(const Generator& g, const DecomposeOptions& opt) {
  const long d = g.dim_hilbert;
  const long n = d * d;
  if (g.matrix.rows() != n || g.matrix.cols() != n)
    throw SpectralError("eigendecompose: generator matrix has wrong dimension");

  Eigen::MatrixXd a = to_hermitian_basis(g.matrix, d);
  const Eigen::MatrixXd a_copy = a;

  Eigen::VectorXd wr(n), wi(n);
  Eigen::MatrixXd vl(n, n), vr(n, n);
  const lapack_int info =
      LAPACKE_dgeev(LAPACK_COL_MAJOR, 'V', 'V', static_cast<lapack_int>(n), a.data(),
                    static_cast<lapack_int>(n), wr.data(), wi.data(), vl.data(),
                    static_cast<lapack_int>(n), vr.data(), static_cast<lapack_int>(n));
  if (info != 0)
    throw SpectralError("dgeev failed to converge (info = " + std::to_string(info) + ")");

  // Eigenvector residuals in the real basis, where T is unitary and so norms
  // carry over unchanged.
  const Eigen::MatrixXd avr = a_copy * vr;

  SpectralData sd;
  sd.dim_hilbert = d;
  sd.eigenvalues.resize(static_cast<std::size_t>(n));
  sd.residuals.resize(static_cast<std::size_t>(n));
  Operator x(n, n);  // right eigenvectors, hermitian-basis coordinates
  Operator u(n, n);  // left eigenvectors u with u^H A = lambda u^H
  for (long j = 0; j < n; ++j) {
    if (wi(j) == 0.0) {
      sd.eigenvalues[j] = {wr(j), 0.0};
      x.col(j) = vr.col(j).cast<Complex>();
      u.col(j) = vl.col(j).cast<Complex>();
      const double res = (avr.col(j) - wr(j) * vr.col(j)).norm() / vr.col(j).norm();
      sd.residuals[j].eigen = res;
    } else {
      if (j + 1 >= n) throw SpectralError("dgeev returned an unpaired complex eigenvalue");
      const Complex lam{wr(j), wi(j)};
      sd.eigenvalues[j] = lam;
      sd.eigenvalues[j + 1] = std::conj(lam);
      x.col(j) = vr.col(j).cast<Complex>() + kI * vr.col(j + 1).cast<Complex>();
      x.col(j + 1) = x.col(j).conjugate();
      u.col(j) = vl.col(j).cast<Complex>() + kI * vl.col(j + 1).cast<Complex>();
      u.col(j + 1) = u.col(j).conjugate();
      // A(p + iq) - lam (p + iq), real and imaginary parts.
      const Eigen::VectorXd re_part =
          avr.col(j) - wr(j) * vr.col(j) + wi(j) * vr.col(j + 1);
      const Eigen::VectorXd im_part =
          avr.col(j + 1) - wr(j) * vr.col(j + 1) - wi(j) * vr.col(j);
      const double res = std::sqrt(re_part.squaredNorm() + im_part.squaredNorm()) /
                         x.col(j).norm();
      sd.residuals[j].eigen = res;
      sd.residuals[j + 1].eigen = res;
      ++j;
    }
  }
  a.resize(0, 0);
  vl.resize(0, 0);
  vr.resize(0, 0);

  // Back to matrix units. Right: r = T x. Left row vector: y^T A = lambda y^T
  // with y = conj(u); w^T = y^T T^dag, i.e. w = conj(T u).
  from_hermitian_basis(x, d);
  from_hermitian_basis(u, d);
  sd.right = std::move(x);
  sd.left = u.conjugate();
  u.resize(0, 0);

  // Left and right vectors come out of the solver in the same order; verify
  // the pairing and biorthogonalize inside degenerate clusters.
  const auto clusters = find_clusters(sd.eigenvalues, opt.cluster_tol);
  std::vector<char> in_cluster(static_cast<std::size_t>(n), 0);
  for (const auto& cl : clusters) {
    for (auto k : cl) in_cluster[k] = 1;
    const Operator rc = gather(sd.right, cl);
    const Operator wc = gather(sd.left, cl);
    const Operator gram = wc.transpose() * rc;
    const double cond = condition(gram);
    if (!(cond < opt.max_cluster_condition)) {
      std::ostringstream os;
      os << "left/right pairing failed in degenerate cluster "
         << describe_cluster(sd.eigenvalues, cl) << " (Gram condition " << cond << ")";
      throw SpectralError(os.str());
    }
    scatter(sd.left, cl, wc * gram.transpose().inverse());
  }
  for (long k = 0; k < n; ++k) {
    const double nr = sd.right.col(k).norm();
    sd.right.col(k) /= nr;
    if (in_cluster[static_cast<std::size_t>(k)]) {
      sd.left.col(k) *= nr;
    } else {
      const Complex pairing = sd.left.col(k).transpose() * sd.right.col(k);
      if (std::abs(pairing) < 1.0 / opt.max_cluster_condition) {
        std::ostringstream os;
        os << "left/right pairing failed: tr(l r) = " << std::abs(pairing)
           << " for eigenvalue " << sd.eigenvalues[k];
        throw SpectralError(os.str());
      }
      sd.left.col(k) /= pairing;
    }
  }

  reorder(sd, sorted_order(sd.eigenvalues));

  for (std::size_t k = 0; k < sd.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const Complex pairing = sd.left.col(kk).transpose() * sd.right.col(kk);
    sd.residuals[k].biorth = std::abs(pairing - 1.0);
    Complex tr = 0.0;
    for (long i = 0; i < d; ++i) tr += sd.right(i + d * i, kk);
    if (std::abs(sd.eigenvalues[k]) < opt.zero_tol) {
      ++sd.zero_modes;
      sd.residuals[k].trace = 0.0;
    } else {
      sd.residuals[k].trace = std::abs(tr);
    }
  }
  if (sd.zero_modes == 1) {
    sd.stationary = hermitized_stationary(sd.right_mode(0));
    sd.residuals[0].trace = std::abs(sd.stationary.trace() - 1.0);
  }
  return sd;
}

Operator stationary_state(const SpectralData& sd) {
  if (sd.zero_modes != 1)
    throw SpectralError("degenerate stationary manifold (" + std::to_string(sd.zero_modes) +
                        " zero modes)");
  return sd.stationary;
}

std::vector<long> basis_permutation(int n_spins, const std::vector<int>& site_perm) {
  const long dim = 1L << n_spins;
  std::vector<long> out(static_cast<std::size_t>(dim));
  for (long x = 0; x < dim; ++x) {
    long y = 0;
    for (int s = 0; s < n_spins; ++s) {
      const long bit = (x >> (n_spins - 1 - s)) & 1L;
      y |= bit << (n_spins - 1 - site_perm[static_cast<std::size_t>(s)]);
    }
    out[static_cast<std::size_t>(x)] = y;
  }
  return out;
}

std::vector<std::vector<int>> symmetry_generators(const ChainParams& p) {
  std::vector<std::vector<int>> gens;
  std::vector<int> reflection(static_cast<std::size_t>(p.n_spins));
  for (int s = 0; s < p.n_spins; ++s) reflection[s] = p.n_spins - 1 - s;
  gens.push_back(reflection);
  if (p.alpha == 0.0) {
    for (int s = 0; s + 1 < p.n_spins; ++s) {
      std::vector<int> t(static_cast<std::size_t>(p.n_spins));
      std::iota(t.begin(), t.end(), 0);
      std::swap(t[s], t[s + 1]);
      gens.push_back(t);
    }
  }
  return gens;
}

std::vector<std::vector<int>> symmetry_group(const ChainParams& p) {
  std::vector<int> id(static_cast<std::size_t>(p.n_spins));
  std::iota(id.begin(), id.end(), 0);
  std::vector<std::vector<int>> out;
  if (p.alpha == 0.0) {
    auto perm = id;
    do {
      out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    out.push_back(id);
    std::vector<int> reflection(id.rbegin(), id.rend());
    if (reflection != id) out.push_back(reflection);
  }
  return out;
}

namespace {

// vec(P r P^T) for a basis permutation x -> perm[x].
CVector conjugate_vec(const CVector& vr, const std::vector<long>& perm, long d) {
  CVector out(vr.size());
  for (long b = 0; b < d; ++b)
    for (long a = 0; a < d; ++a)
      out(perm[static_cast<std::size_t>(a)] + d * perm[static_cast<std::size_t>(b)]) =
          vr(a + d * b);
  return out;
}

CVector symmetrize_vec(const CVector& vr, const std::vector<std::vector<long>>& group, long d) {
  CVector acc = CVector::Zero(vr.size());
  for (const auto& perm : group) acc += conjugate_vec(vr, perm, d);
  return acc / static_cast<double>(group.size());
}

std::vector<std::vector<long>> basis_perms(const std::vector<std::vector<int>>& site_perms,
                                           int n_spins) {
  std::vector<std::vector<long>> out;
  out.reserve(site_perms.size());
  for (const auto& sp : site_perms) out.push_back(basis_permutation(n_spins, sp));
  return out;
}

constexpr double kInvarianceTol = 1e-7;

}  // namespace

Operator symmetrize(const Operator& r, const ChainParams& p) {
  const auto group = basis_perms(symmetry_group(p), p.n_spins);
  return unvectorize(symmetrize_vec(vectorize(r), group, r.rows()), r.rows());
}

void classify_sector(SpectralData& sd, const ChainParams& p) {
  const long d = sd.dim_hilbert;
  if (d != p.hilbert_dim())
    throw std::invalid_argument("classify_sector: parameters do not match decomposition");
  const auto gens = basis_perms(symmetry_generators(p), p.n_spins);
  const std::size_t n = sd.size();

  auto invariance_defect = [&](const CVector& v) {
    double worst = 0.0;
    const double nv = v.norm();
    for (const auto& perm : gens)
      worst = std::max(worst, (conjugate_vec(v, perm, d) - v).norm() / nv);
    return worst;
  };

  sd.sectors.assign(n, Sector::other);
  for (std::size_t k = 0; k < n; ++k)
    if (invariance_defect(sd.right.col(static_cast<Eigen::Index>(k))) < kInvarianceTol)
      sd.sectors[k] = Sector::symmetric;

  const auto clusters = find_clusters(sd.eigenvalues, 1e-8);
  if (clusters.empty()) return;
  const auto group = basis_perms(symmetry_group(p), p.n_spins);

  bool changed = false;
  for (const auto& cl : clusters) {
    const auto m = static_cast<Eigen::Index>(cl.size());
    const Operator rc = gather(sd.right, cl);
    Operator sym(rc.rows(), m);
    for (Eigen::Index c = 0; c < m; ++c) sym.col(c) = symmetrize_vec(rc.col(c), group, d);

    Eigen::JacobiSVD<Operator> svd_s(sym, Eigen::ComputeThinU);
    Eigen::Index rank = 0;
    for (Eigen::Index c = 0; c < svd_s.singularValues().size(); ++c)
      if (svd_s.singularValues()(c) > kInvarianceTol) ++rank;
    if (rank == 0) {
      for (auto k : cl) sd.sectors[k] = Sector::other;
      continue;
    }
    if (rank == m) {
      for (auto k : cl) sd.sectors[k] = Sector::symmetric;
      continue;
    }

    // Mixed cluster: split the invariant subspace into its symmetric part and
    // the complement, then rebuild the paired left vectors.
    Eigen::JacobiSVD<Operator> svd_o(rc - sym, Eigen::ComputeThinU);
    Operator rnew(rc.rows(), m);
    rnew.leftCols(rank) = svd_s.matrixU().leftCols(rank);
    rnew.rightCols(m - rank) = svd_o.matrixU().leftCols(m - rank);

    const Operator wc = gather(sd.left, cl);
    const Operator coeff = wc.transpose() * rnew;  // rnew = rc * coeff if in span
    const double span_err = (rc * coeff - rnew).norm();
    const double cond = condition(coeff);
    bool ok = span_err < kInvarianceTol && cond < 1e8;
    if (ok) {
      for (Eigen::Index c = 0; c < m; ++c) {
        const double def = invariance_defect(rnew.col(c));
        if (c < rank ? def >= kInvarianceTol : def < kInvarianceTol) ok = false;
      }
    }
    if (!ok) {
      for (auto k : cl) sd.sectors[k] = Sector::unclassified;
      continue;
    }
    const Operator wnew = wc * coeff.inverse().transpose();
    Eigen::VectorXcd lam(m);
    for (Eigen::Index c = 0; c < m; ++c) lam(c) = sd.eigenvalues[cl[c]];
    const Operator mixed = coeff.inverse() * lam.asDiagonal() * coeff;
    double worst_res = 0.0;
    for (auto k : cl) worst_res = std::max(worst_res, sd.residuals[k].eigen);
    scatter(sd.right, cl, rnew);
    scatter(sd.left, cl, wnew);
    for (Eigen::Index c = 0; c < m; ++c) {
      const auto k = cl[c];
      sd.eigenvalues[k] = mixed(c, c);
      sd.sectors[k] = c < rank ? Sector::symmetric : Sector::other;
      sd.residuals[k].eigen = worst_res;
      const Complex pairing = wnew.col(c).transpose() * rnew.col(c);
      sd.residuals[k].biorth = std::abs(pairing - 1.0);
      Complex tr = 0.0;
      for (long i = 0; i < d; ++i) tr += rnew(i + d * i, c);
      sd.residuals[k].trace = std::abs(tr);
    }
    changed = true;
  }
  if (changed) reorder(sd, sorted_order(sd.eigenvalues));
}

GapReport gap_report(const SpectralData& sd, bool restrict_to_symmetric) {
  if (restrict_to_symmetric && sd.sectors.size() != sd.size())
    throw std::logic_error("gap_report: restricted report requires classify_sector");
  constexpr double zero_tol = 1e-9;
  constexpr double same_tol = 1e-8;

  auto eligible = [&](std::size_t k) {
    if (std::abs(sd.eigenvalues[k]) < zero_tol) return false;
    return !restrict_to_symmetric || sd.sectors[k] == Sector::symmetric;
  };

  GapReport rep;
  rep.restricted = restrict_to_symmetric;
  bool have2 = false;
  bool have3 = false;
  for (std::size_t k = 0; k < sd.size() && !have3; ++k) {
    if (restrict_to_symmetric && sd.sectors[k] == Sector::unclassified) ++rep.unclassified_skipped;
    if (!eligible(k)) continue;
    const Complex lam = sd.eigenvalues[k];
    if (!have2) {
      rep.lambda2 = lam;
      rep.index2 = k;
      rep.multiplicity = 1;
      have2 = true;
      continue;
    }
    const bool same = std::abs(lam - rep.lambda2) < same_tol;
    const bool partner =
        std::abs(rep.lambda2.imag()) > zero_tol && std::abs(lam - std::conj(rep.lambda2)) < same_tol;
    if (same) {
      ++rep.multiplicity;
      continue;
    }
    if (partner) continue;
    rep.lambda3 = lam;
    rep.index3 = k;
    have3 = true;
  }
  if (!have3)
    throw SpectralError(std::string("fewer than two decay channels in ") +
                        (restrict_to_symmetric ? "the symmetric sector" : "the spectrum"));
  if (!(rep.lambda2.real() < 0.0) || !(rep.lambda3.real() < 0.0))
    throw SpectralError("non-decaying mode among the excited eigenvalues");

  rep.tau2 = -1.0 / rep.lambda2.real();
  rep.tau3 = -1.0 / rep.lambda3.real();
  rep.ratio = rep.tau3 / rep.tau2;
  rep.gap_is_complex = std::abs(rep.lambda2.imag()) > zero_tol;
  rep.degenerate_gap = std::abs(rep.lambda2.real() - rep.lambda3.real()) < zero_tol;
  return rep;
}

double biorthogonality_defect(const SpectralData& sd) {
  Operator gram = sd.left.transpose() * sd.right;
  gram -= Operator::Identity(gram.rows(), gram.cols());
  return gram.cwiseAbs().maxCoeff();
}

}  // namespace qmpemba
