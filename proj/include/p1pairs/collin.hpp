#pragma once

#include "p1pairs/pairchain.hpp"

namespace p1pairs {

/// One level of a complete collineation. Level i > 0 maps the kernel of
/// level i-1 (in the coordinates of `kernel` there) to its cokernel (in the
/// coordinates of `coker` there).
struct CollineationLevel {
  QMat map;
  QMat kernel;  // kernel_basis(map)
  QMat coker;   // cokernel_projection(map)
};

struct CollineationChain {
  std::vector<CollineationLevel> levels;
  int length() const { return static_cast<int>(levels.size()) - 1; }
};

/// H^0 of psi(m) : V (x) W_m -> W_{n+m}; block j is multiplication by f_j.
QMat gamma(const StablePair& p, int m);

int m0_bound(int n);
int default_m(int n);

/// rank gamma(p, m) == m + 1 + deg im psi with the degree from the gcd.
bool rank_formula_check(const StablePair& p, int m);

/// Smallest j with p in M(n)_j.
int stratum_index(const StablePair& p, int m);

CollineationLevel make_level(QMat map);
CollineationChain embed_chain(const PsiChain& c, int m);
Report validate_collineation(const CollineationChain& cc);

/// (psi, s) -> s psi.
StablePair stratum_map_g(const StablePair& pk, const BinForm& s);

struct TangentDims {
  int stratum = 0;
  Index jac_dim = 0;
  Index param_rank = 0;
};

/// Zariski tangent dimension of the stratum through p, from the minors of
/// gamma, and the rank of the stratum parameterization at p.
TangentDims tangent_dim_at(const StablePair& p, int m, int threads = 1);

/// (j + 1) N - 1 + (n - j).
Index expected_stratum_dim(int N, int n, int j);

}  // namespace p1pairs
