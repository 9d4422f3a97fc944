#pragma once

#include "p1pairs/pairchain.hpp"

#include <map>

namespace p1pairs {

/// A G_m-equivariant sheaf on Y = X x P^1, stored as the weight pieces of its
/// rows: part(b, w) is the weight-w subsheaf of the pushforward of S(0, b) to
/// X. Multiplication by w0 keeps the weight and multiplication by w1 raises it
/// by one.
class BiTailModule {
 public:
  BiTailModule(int a_lo, int a_hi, int b_lo, int b_hi);

  int a_lo() const { return a_lo_; }
  int a_hi() const { return a_hi_; }
  int b_lo() const { return b_lo_; }
  int b_hi() const { return b_hi_; }

  /// Weights with a stored piece in row b, ascending.
  std::vector<int> weights(int b) const;
  /// The stored piece or a zero module.
  ModulePtr part(int b, int w) const;
  bool has_part(int b, int w) const;
  /// part(b, w) -> part(b + 1, w).
  SheafMap mul_w0(int b, int w) const;
  /// part(b, w) -> part(b + 1, w + 1).
  SheafMap mul_w1(int b, int w) const;

  Index dim(int a, int b) const;

  void set_part(int b, int w, ModulePtr m);
  void set_w0(int b, int w, SheafMap f);
  void set_w1(int b, int w, SheafMap f);

  /// Throws InternalError when w0 and w1 fail to commute.
  void validate() const;

 private:
  int a_lo_, a_hi_, b_lo_, b_hi_;
  ModulePtr zero_;
  std::map<std::pair<int, int>, ModulePtr> parts_;
  std::map<std::pair<int, int>, SheafMap> w0_, w1_;
};

using BiModulePtr = std::shared_ptr<const BiTailModule>;

/// Weight-preserving morphism, piece by piece; absent pieces are zero.
struct EqSheafMap {
  BiModulePtr source;
  BiModulePtr target;
  std::map<std::pair<int, int>, SheafMap> parts;

  SheafMap at(int b, int w) const;
};

/// Throws InternalError unless f commutes with w0 and w1.
void validate_map(const EqSheafMap& f);
EqSheafMap compose(const EqSheafMap& g, const EqSheafMap& f);

struct BiKernel {
  BiModulePtr module;
  EqSheafMap inclusion;
};

BiKernel kernel(const EqSheafMap& f);
/// The map into K with incl * result = f, for an injective incl : K -> T.
EqSheafMap lift_through(const EqSheafMap& incl, const EqSheafMap& f);

/// p^* F with the b-monomial w0^(b-k) w1^k in weight `weight + k`.
BiTailModule pullback_from_X(ModulePtr f, int b_lo, int b_hi, int weight);
/// S (x) O(k_minus D_- + k_plus D_+).
BiTailModule twist_D(const BiTailModule& s, int k_minus, int k_plus);
/// Sheaf supported on D_+ (sign +1) or D_- (sign -1) with fibre T in the given weight.
BiTailModule pushforward_D(ModulePtr t, int side, int weight, int a_lo, int a_hi, int b_lo, int b_hi);

/// Restriction to D_- or D_+ computed in one row, by weight.
struct Restriction {
  int row = 0;
  int side = 0;  // -1 for D_-, +1 for D_+
  /// weight -> cokernel; projections start at the piece of `row` that
  /// carries this weight.
  std::map<int, CokernelResult> parts;

  /// The weight of row pieces mapping to restriction weight w.
  int source_weight(int w) const { return side > 0 ? w + row : w; }
  /// Weights with nonzero restriction.
  std::vector<int> support() const;
  ModulePtr module(int w) const;
};

Restriction restrict_Dminus(const BiTailModule& s);
Restriction restrict_Dminus(const BiTailModule& s, int row);
Restriction restrict_Dplus(const BiTailModule& s);
Restriction restrict_Dplus(const BiTailModule& s, int row);

/// Fibre over the point (c : 1), the quotient of row b by (w0 - c w1) row b-1.
struct Fiber {
  int row = 0;
  DirectSum pieces;  // the pieces of `row` in ascending weight
  std::vector<int> weights;
  CokernelResult quotient;

  /// Projection from the weight-w piece of `row` to the fibre.
  SheafMap projection(int w) const;
};

Fiber restrict_fiber(const BiTailModule& s, const Rat& c);
Fiber restrict_fiber(const BiTailModule& s, const Rat& c, int row);

/// Restriction of a map to D_- or D_+, weight by weight.
std::map<int, SheafMap> restrict_map(const EqSheafMap& f, const Restriction& src, const Restriction& tgt);

struct Modification {
  BiModulePtr module;
  EqSheafMap inclusion;
};

/// Kernel of S -> (weight -1 part on D_-) + (weight 0 part on D_+).
/// Throws std::invalid_argument when a restriction has weights outside {0, -1}.
Modification elementary_modification(BiModulePtr s);

struct AdmissibleVerdict {
  bool admissible = false;
  ModulePtr f;
  std::string reason;
};

/// Decided through the canonical map p^* p_* S -> S, which is an isomorphism
/// exactly when S is a pullback.
AdmissibleVerdict is_admissible(BiModulePtr s);
bool is_trivial_admissible(const BiTailModule& s);

bool flatness_check(const BiTailModule& s, Rng& rng);

/// The sheaf F~_i with phi~_i and the subsheaf chain F~_i in K_i in p^*F_i(D_-).
struct TildeComponent {
  int index = 0;
  ModulePtr f;                  // F_i
  BiModulePtr ambient;          // p^* F_i (x) O(D_-)
  BiModulePtr k;                // K_i
  BiModulePtr tilde;            // F~_i
  EqSheafMap inclusion;         // F~_i -> ambient
  BiModulePtr vo;               // V (x) O_Y
  EqSheafMap phi;               // V (x) O_Y -> F~_i
};

struct TildeOptions {
  int b_lo = -1;
  int b_hi = 3;
  /// Mutation control: stop at K_i instead of taking ker mu^-.
  bool skip_minus = false;
};

TildeComponent build_tilde(const PhiChain& pc, int i, TildeOptions opt = {});
std::vector<TildeComponent> build_all_tilde(const PhiChain& pc, TildeOptions opt = {});

Report verify_lemma_tFi(const PhiChain& pc, int i, Rng& rng, TildeOptions opt = {});
Report verify_lemma_tFi(const PhiChain& pc, const TildeComponent& c, Rng& rng);

/// Boundary matching of consecutive components along D_i.
Report glue_check(const std::vector<TildeComponent>& comps, Rng& rng);
Report glue_check(const PhiChain& pc, Rng& rng);

/// The identities gamma phi^+ = phi_1 and beta phi_1 = phi^- on one component.
Report lemma_cons_check(const TildeComponent& c);

/// Dimension of the space of compatible families of equivariant
/// endomorphisms e_i of F~_i with e_i phi~_i = lambda phi~_i, glued along D_i.
Index glued_endomorphism_dim(const PhiChain& pc, const std::vector<TildeComponent>& comps);

/// The criterion for expanded stable pairs on the glued datum of pc.
Report criterion_check(const PhiChain& pc, Rng& rng, TildeOptions opt = {});

}  // namespace p1pairs
