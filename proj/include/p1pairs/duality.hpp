#pragma once

#include "p1pairs/pairchain.hpp"

namespace p1pairs {

/// A locally free sheaf with an isomorphism from a sum of line bundles.
struct FramedBundle {
  ModulePtr e;
  std::vector<int> twists;
  SheafMap frame;  // sum O(twists) -> e
  ModulePtr dual;  // sum O(-twists)
};

FramedBundle frame_bundle(ModulePtr e);
/// f^dual : b.dual -> a.dual for f : a.e -> b.e.
SheafMap dual_map(const SheafMap& f, const FramedBundle& a, const FramedBundle& b);

struct QuotLevel {
  ModulePtr g;
  TorsionResult split;
};

/// 0 -> A -> G_{i+1} -> B -> 0 with A ~ G_i^{t.f.} and B ~ G_i^{tor}.
struct QuotExtension {
  SheafMap in;
  SheafMap out;
};

struct QuotChain {
  int N = 0;
  int n = 0;
  ModulePtr vdual;
  SheafMap rho;  // V^dual (x) O -> G_0
  std::vector<QuotLevel> levels;
  std::vector<QuotExtension> extensions;

  int length() const { return static_cast<int>(levels.size()) - 1; }
};

struct DualizedPair {
  SheafMap rho;
  ModulePtr g0;
};

/// G_0 = coker(psi^dual : O(-n) -> V^dual (x) O).
DualizedPair dualize_pair(const StablePair& p, Window w);
DualizedPair dualize_pair(const StablePair& p);

QuotChain dual_chain(const PsiChain& c, Rng& rng);

Report validate_quot_chain(const QuotChain& q);
Report verify_duality(const PsiChain& c, const QuotChain& q, Rng& rng);

/// Control: replaces G_{i+1} by G_i^{t.f.} + G_i^{tor} with the split sequence.
QuotChain with_split_extension(const QuotChain& q, int i);

}  // namespace p1pairs
