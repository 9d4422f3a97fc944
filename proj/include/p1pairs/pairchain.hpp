#pragma once

#include "p1pairs/report.hpp"
#include "p1pairs/tailmod.hpp"

#include <stdexcept>

namespace p1pairs {

using ValidationReport = Report;

/// A pair (O(n), psi : V (x) O -> O(n)) given by N forms of degree n.
struct StablePair {
  int N = 2;
  int n = 0;
  std::vector<BinForm> forms;

  /// Throws std::invalid_argument on malformed data.
  void check() const;
};

/// Window on which chains over a pair of this shape are computed.
struct Window {
  int lo = 0;
  int hi = 0;
};

Window default_window(int N, int n);

/// Raised when no further chain step exists.
class Exhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Chain psi_0, ..., psi_m with psi_i : ker psi_{i-1} -> coker psi_{i-1}.
struct PsiChain {
  StablePair base;
  Window window;
  ModulePtr vo;  // V (x) O
  ModulePtr f;   // O(n)
  SheafMap psi0;
  /// steps[i] is psi_{i+1}.
  std::vector<SheafMap> steps;
  /// kernels[i] = ker psi_i with its inclusion into V (x) O.
  std::vector<KernelResult> kernels;
  /// cokernels[i] = coker psi_i.
  std::vector<CokernelResult> cokernels;

  int length() const { return static_cast<int>(steps.size()); }
  const SheafMap& psi(int i) const { return i == 0 ? psi0 : steps[static_cast<std::size_t>(i - 1)]; }
  bool complete() const { return is_zero_module(*cokernels.back().module); }
};

struct PhiChain {
  int N = 2;
  int n = 0;
  ModulePtr vo;
  std::vector<ModulePtr> modules;
  std::vector<SheafMap> maps;
  /// alphas[i] : coker phi_i -> F_{i+1}, betas[i] : F_{i+1} -> im phi_i.
  std::vector<SheafMap> alphas;
  std::vector<SheafMap> betas;
  std::vector<ImageResult> images;
  std::vector<CokernelResult> cokernels;
  std::vector<KernelResult> kernels;

  int length() const { return static_cast<int>(maps.size()) - 1; }
};

struct PairAnalysis {
  int deg_im = 0;
  int coker_length = 0;
  std::vector<int> kernel_splitting;
  bool surjective = false;
};

PairAnalysis analyze(const StablePair& p);

/// Chain consisting of psi_0 only.
PsiChain make_chain(const StablePair& p);
PsiChain make_chain(const StablePair& p, Window w);
/// Appends psi_{m+1} : ker psi_m -> coker psi_m.
void append_step(PsiChain& c, SheafMap step);

ValidationReport validate_psi_chain(const PsiChain& c);
ValidationReport validate_phi_chain(const PhiChain& c);

PhiChain psi_to_phi(const PsiChain& c);
/// The first `length` + 1 levels of c.
PhiChain truncate(const PhiChain& c, int length);
PsiChain phi_to_psi(const PhiChain& c);

/// Appends a random nonzero step with coefficients in [-bound, bound] over a
/// hom basis. Throws Exhausted when coker psi_m is zero.
PsiChain extend_chain(const PsiChain& c, Rng& rng, std::int64_t bound = 9);
/// Extends until the chain is complete.
PsiChain complete_chain(PsiChain c, Rng& rng, std::int64_t bound = 9);

bool chain_equivalent(const PsiChain& a, const PsiChain& b);

/// Random pair whose forms share a common factor of degree g.
StablePair random_pair(Rng& rng, int N, int n, int g, std::int64_t bound = 9);
/// Random complete chain; sparse draws favour non-surjective steps.
PsiChain random_chain(Rng& rng, int N, int n, int g, bool sparse, std::int64_t bound = 9);
PsiChain random_chain(Rng& rng, const StablePair& p, bool sparse, std::int64_t bound = 9);

}  // namespace p1pairs
