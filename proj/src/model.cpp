#include "qmpemba/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmpemba {

void validate(const ChainParams& p) {
  if (p.n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
  if (p.n_spins > 6)
    throw std::invalid_argument("n_spins must be <= 6 (dense superoperator storage)");
  if (!(p.gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(p.epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(p.alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  if (!std::isfinite(p.omega)) throw std::invalid_argument("omega must be finite");
  if (!std::isfinite(p.v)) throw std::invalid_argument("v must be finite");
}

Operator pauli(PauliAxis axis) {
  Operator m = Operator::Zero(2, 2);
  switch (axis) {
    case PauliAxis::x:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case PauliAxis::y:
      m(0, 1) = -kI;
      m(1, 0) = kI;
      break;
    case PauliAxis::z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
    case PauliAxis::plus:
      m(0, 1) = 1.0;
      break;
    case PauliAxis::minus:
      m(1, 0) = 1.0;
      break;
  }
  return m;
}

Operator embed(const Operator& op, int site, int n_spins) {
  if (op.rows() != 2 || op.cols() != 2)
    throw std::invalid_argument("embed: single-site operator must be 2x2");
  if (site < 1 || site > n_spins)
    throw std::out_of_range("embed: site " + std::to_string(site) +
                            " out of range [1, " + std::to_string(n_spins) + "]");
  const long dim = 1L << n_spins;
  const int shift = n_spins - site;  // bit position of the site
  Operator out = Operator::Zero(dim, dim);
  for (long col = 0; col < dim; ++col) {
    const int b = static_cast<int>((col >> shift) & 1L);
    for (int a = 0; a < 2; ++a) {
      const Complex val = op(a, b);
      if (val == Complex{}) continue;
      const long row = (col & ~(1L << shift)) | (static_cast<long>(a) << shift);
      out(row, col) += val;
    }
  }
  return out;
}

Operator build_hamiltonian(const ChainParams& p) {
  validate(p);
  const long dim = p.hilbert_dim();
  Operator h = Operator::Zero(dim, dim);
  const Operator sx = pauli(PauliAxis::x);
  for (int k = 1; k <= p.n_spins; ++k) h += p.omega * embed(sx, k, p.n_spins);

  // sigma^z sigma^z terms are diagonal; bit value 0 is up (+1).
  for (long s = 0; s < dim; ++s) {
    double e = 0.0;
    for (int k = 1; k <= p.n_spins; ++k) {
      const double zk = ((s >> (p.n_spins - k)) & 1L) ? -1.0 : 1.0;
      for (int m = k + 1; m <= p.n_spins; ++m) {
        const double zm = ((s >> (p.n_spins - m)) & 1L) ? -1.0 : 1.0;
        e += zk * zm / std::pow(static_cast<double>(m - k), p.alpha);
      }
    }
    h(s, s) += p.v * e;
  }
  return h;
}

std::vector<Operator> build_jump_ops(const ChainParams& p) {
  validate(p);
  std::vector<Operator> out;
  out.reserve(p.n_spins);
  const Operator lower = std::sqrt(p.gamma) * pauli(PauliAxis::minus);
  for (int k = 1; k <= p.n_spins; ++k) out.push_back(embed(lower, k, p.n_spins));
  return out;
}

Generator assemble_generator(const Operator& hamiltonian,
                             const std::vector<Operator>& jumps) {
  const long d = hamiltonian.rows();
  if (hamiltonian.cols() != d)
    throw std::invalid_argument("assemble_generator: hamiltonian is not square");
  for (const auto& l : jumps)
    if (l.rows() != d || l.cols() != d)
      throw std::invalid_argument("assemble_generator: jump operator dimension mismatch");

  Operator k_sum = Operator::Zero(d, d);
  for (const auto& l : jumps) k_sum += l.adjoint() * l;
  // Effective non-hermitian part: rho -> G rho + rho G^dag, G = -iH - K/2.
  const Operator g_eff = -kI * hamiltonian - 0.5 * k_sum;

  const long n = d * d;
  Generator gen;
  gen.dim_hilbert = d;
  gen.hamiltonian = hamiltonian;
  gen.jumps = jumps;
  gen.matrix = Operator::Zero(n, n);
  Operator& m = gen.matrix;

  // Row index i + d*j, column index k + d*l (column stacking).
  // I (x) G contributes delta_jl G_ik; (G^dag)^T (x) I = conj(G) (x) I
  // contributes conj(G)_jl delta_ik.
  for (long l = 0; l < d; ++l) {
    for (long k = 0; k < d; ++k) {
      const long col = k + d * l;
      for (long i = 0; i < d; ++i) m(i + d * l, col) += g_eff(i, k);
      for (long j = 0; j < d; ++j) m(k + d * j, col) += std::conj(g_eff(j, l));
    }
  }

  for (const auto& jump : jumps) {
    for (long l = 0; l < d; ++l)
      for (long j = 0; j < d; ++j) {
        const Complex a = std::conj(jump(j, l));
        if (a == Complex{}) continue;
        for (long k = 0; k < d; ++k)
          for (long i = 0; i < d; ++i) {
            const Complex b = jump(i, k);
            if (b == Complex{}) continue;
            m(i + d * j, k + d * l) += a * b;
          }
      }
  }
  return gen;
}

Generator build_generator(const ChainParams& p) {
  return assemble_generator(build_hamiltonian(p), build_jump_ops(p));
}

namespace {

void check_dim(const Generator& g, const Operator& x, const char* who) {
  if (x.rows() != g.dim_hilbert || x.cols() != g.dim_hilbert)
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
}

}  // namespace

Operator apply_generator(const Generator& g, const Operator& rho) {
  check_dim(g, rho, "apply_generator");
  return unvectorize(g.matrix * vectorize(rho), g.dim_hilbert);
}

Operator apply_generator_direct(const Generator& g, const Operator& rho) {
  check_dim(g, rho, "apply_generator_direct");
  Operator out = -kI * (g.hamiltonian * rho - rho * g.hamiltonian);
  for (const auto& l : g.jumps) {
    const Operator ll = l.adjoint() * l;
    out += l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll);
  }
  return out;
}

Operator apply_adjoint(const Generator& g, const Operator& obs) {
  check_dim(g, obs, "apply_adjoint");
  // tr(A W[rho]) = vec(A^T)^T M vec(rho)  =>  vec(W^dag[A]^T) = M^T vec(A^T).
  const Operator at = obs.transpose();
  const CVector y = g.matrix.transpose() * vectorize(at);
  return unvectorize(y, g.dim_hilbert).transpose();
}

Operator single_site_rotation(double theta, double phi) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  // exp(i theta sigma^y / 2) = cos I + sin (i sigma^y) = [[c, s], [-s, c]]
  Operator ry(2, 2);
  ry << c, s, -s, c;
  Operator rz = Operator::Zero(2, 2);
  rz(0, 0) = std::exp(kI * (phi / 2.0));
  rz(1, 1) = std::exp(-kI * (phi / 2.0));
  return rz * ry;
}

Operator rotation_unitary(const ChainParams& p, double theta, double phi) {
  validate(p);
  const Operator site = single_site_rotation(theta, phi);
  Operator u = Operator::Identity(1, 1);
  for (int k = 0; k < p.n_spins; ++k) {
    Operator next(u.rows() * 2, u.cols() * 2);
    for (long r = 0; r < u.rows(); ++r)
      for (long c = 0; c < u.cols(); ++c)
        next.block(2 * r, 2 * c, 2, 2) = u(r, c) * site;
    u = std::move(next);
  }
  return u;
}

CVector rotated_all_down(int n_spins, double theta, double phi) {
  const Complex up = std::sin(theta / 2.0) * std::exp(kI * (phi / 2.0));
  const Complex down = std::cos(theta / 2.0) * std::exp(-kI * (phi / 2.0));
  const long dim = 1L << n_spins;
  CVector psi(dim);
  for (long s = 0; s < dim; ++s) {
    Complex amp = 1.0;
    for (int k = 0; k < n_spins; ++k) amp *= ((s >> k) & 1L) ? down : up;
    psi(s) = amp;
  }
  return psi;
}

}  // namespace qmpemba
