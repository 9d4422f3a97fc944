#pragma once

#include "p1pairs/binform.hpp"
#include "p1pairs/errors.hpp"

#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace p1pairs {

/// Matrix of binary forms; entries(i, j) maps summand j of the source to
/// summand i of the target.
using FormMatrix = std::vector<std::vector<BinForm>>;

/// Relation map from sum O(rels[j]) to sum O(gens[i]); the sheaf is its
/// cokernel. Entry (i, j) has degree gens[i] - rels[j].
struct Presentation {
  std::vector<int> gens;
  std::vector<int> rels;
  FormMatrix matrix;
};

/// A coherent sheaf F on P^1 as the window of section spaces
/// F_d = H^0(F(d)), d_lo <= d <= d_hi, with multiplication by z0 and z1.
class TailModule {
 public:
  TailModule() = default;
  TailModule(int d_lo, std::vector<Index> dims, std::vector<QMat> mul0, std::vector<QMat> mul1,
             std::optional<Presentation> presentation = std::nullopt);

  int d_lo() const { return d_lo_; }
  int d_hi() const { return d_lo_ + static_cast<int>(dims_.size()) - 1; }
  int width() const { return d_hi() - d_lo_; }
  bool contains(int d) const { return d >= d_lo_ && d <= d_hi(); }

  Index dim(int d) const;
  const std::vector<Index>& dims() const { return dims_; }
  /// Multiplication maps F_d -> F_{d+1}.
  const QMat& mul0(int d) const;
  const QMat& mul1(int d) const;
  /// Multiplication by a form f : F_d -> F_{d + deg f}.
  QMat mul(const BinForm& f, int d) const;

  const std::optional<Presentation>& presentation() const { return presentation_; }
  void set_presentation(std::optional<Presentation> p) { presentation_ = std::move(p); }

  /// Throws InternalError when the multiplication squares fail to commute.
  void validate() const;

 private:
  int d_lo_ = 0;
  std::vector<Index> dims_;
  std::vector<QMat> mul0_;
  std::vector<QMat> mul1_;
  std::optional<Presentation> presentation_;
};

using ModulePtr = std::shared_ptr<const TailModule>;

ModulePtr share(TailModule m);

/// Degree-0 morphism. maps[k] acts in degree d_lo + k.
struct SheafMap {
  ModulePtr source;
  ModulePtr target;
  int d_lo = 0;
  std::vector<QMat> maps;

  int d_hi() const { return d_lo + static_cast<int>(maps.size()) - 1; }
  bool contains(int d) const { return d >= d_lo && d <= d_hi(); }
  const QMat& at(int d) const;
};

struct Hilbert {
  Index r = 0;
  Index c = 0;
  Index operator()(int d) const { return r * d + c; }
  friend bool operator==(const Hilbert&, const Hilbert&) = default;
};

struct RankDegree {
  Index rank = 0;
  Index degree = 0;
  friend bool operator==(const RankDegree&, const RankDegree&) = default;
};

// ---- construction ----------------------------------------------------------

/// sum O(twists[i]) on [d_lo, d_hi] in monomial bases.
TailModule free_module(const std::vector<int>& twists, int d_lo, int d_hi);
TailModule zero_module(int d_lo, int d_hi);

/// Cokernel of a presentation, valid on [d_lo, d_hi].
TailModule from_presentation(const Presentation& p, int d_lo, int d_hi);

/// Map between free modules given by forms. The modules must have been built
/// by free_module with the same twists.
SheafMap form_map(ModulePtr source, ModulePtr target, const FormMatrix& m);

/// Recovers the forms of a map between standard free modules.
FormMatrix read_forms(const SheafMap& f, const std::vector<int>& source_twists,
                      const std::vector<int>& target_twists);

// ---- windows ---------------------------------------------------------------

/// Exact extension of the window down to new_lo.
TailModule down_extend(const TailModule& f, int new_lo);
/// Extension up to new_hi; valid only in the regular range (checked).
TailModule up_extend(const TailModule& f, int new_hi);
TailModule restrict_window(const TailModule& f, int lo, int hi);
/// Window [lo, hi] obtained by extending or cutting as needed.
TailModule rewindow(const TailModule& f, int lo, int hi);

SheafMap restrict_window(const SheafMap& f, int lo, int hi);
/// Re-expresses f between rewindowed copies of its source and target.
SheafMap rewindow(const SheafMap& f, ModulePtr source, ModulePtr target);

// ---- invariants ------------------------------------------------------------

/// Hilbert polynomial read from the top of the window. Throws
/// WindowTooNarrow if the top three dims are not affine.
Hilbert hilbert(const TailModule& f);
RankDegree rank_degree(const TailModule& f);
bool is_zero_module(const TailModule& f);

// ---- maps ------------------------------------------------------------------

SheafMap zero_map(ModulePtr source, ModulePtr target);
SheafMap identity_map(ModulePtr m);
SheafMap compose(const SheafMap& g, const SheafMap& f);
SheafMap add(const SheafMap& f, const SheafMap& g);
SheafMap scale(const SheafMap& f, const Rat& c);
/// Linear combination sum c_k * basis[k].
SheafMap combination(const std::vector<SheafMap>& basis, const std::vector<Rat>& coeffs);

bool is_zero(const SheafMap& f);
bool is_injective(const SheafMap& f);
bool is_surjective(const SheafMap& f);
bool is_degreewise_bijective(const SheafMap& f);
bool equal(const SheafMap& f, const SheafMap& g);
/// g = lambda * f with lambda != 0 (or both zero).
bool proportional(const SheafMap& f, const SheafMap& g, Rat* lambda = nullptr);

/// Degreewise inverse of a degreewise bijective map.
SheafMap inverse(const SheafMap& f);

/// Whether two injections into the same sheaf have the same image.
bool same_subsheaf(const SheafMap& a, const SheafMap& b);

/// Throws InternalError unless f commutes with multiplication.
void validate_map(const SheafMap& f);

/// Extends the degreewise data of f down to the source's d_lo.
SheafMap down_extend_map(SheafMap f);

// ---- kernels and cokernels -------------------------------------------------

struct KernelResult {
  ModulePtr module;
  SheafMap inclusion;
};

struct CokernelResult {
  ModulePtr module;
  SheafMap projection;
  /// Degreewise sections of the projection on the trusted suffix.
  int section_lo = 0;
  std::vector<QMat> sections;
};

struct ImageResult {
  ModulePtr module;
  SheafMap inclusion;
  SheafMap projection;
};

KernelResult kernel(const SheafMap& f);
CokernelResult cokernel(const SheafMap& f);
ImageResult image(const SheafMap& f);

/// The map coker(f) -> H induced by h : target(f) -> H with h f = 0.
SheafMap induced_from_cokernel(const CokernelResult& c, const SheafMap& h);

/// The map A -> K with incl * result = h, for an injective incl : K -> G.
SheafMap lift_through(const SheafMap& incl, const SheafMap& h);

/// Restriction of f : A -> B to a subsheaf K -> A, landing in a subsheaf L -> B.
SheafMap restrict_map(const SheafMap& f, const SheafMap& k_incl, const SheafMap& l_incl);

struct DirectSum {
  ModulePtr module;
  std::vector<SheafMap> inclusions;
  std::vector<SheafMap> projections;
};

DirectSum direct_sum(const std::vector<ModulePtr>& parts);
TailModule direct_sum(const TailModule& a, const TailModule& b);

/// The map sum A_j -> sum B_i with blocks[i][j] : A_j -> B_i.
SheafMap block_map(const DirectSum& src, const DirectSum& tgt,
                   const std::vector<std::vector<std::optional<SheafMap>>>& blocks);

TailModule twist(const TailModule& f, int k);
SheafMap twist(const SheafMap& f, ModulePtr source, ModulePtr target);

struct PushoutResult {
  ModulePtr module;
  SheafMap in_a;
  SheafMap in_b;
};

PushoutResult pushout(const SheafMap& f, const SheafMap& g);

// ---- homs and isomorphism --------------------------------------------------

/// Basis of Hom(F, G).
std::vector<SheafMap> hom_space(ModulePtr f, ModulePtr g);

struct IsoVerdict {
  enum class Kind { Iso, NoIso, ProbablyNot };
  Kind kind = Kind::ProbablyNot;
  std::optional<SheafMap> witness;
  std::string reason;
  int trials = 0;
  bool is_iso() const { return kind == Kind::Iso; }
};

IsoVerdict iso_test(ModulePtr f, ModulePtr g, Rng& rng);

// ---- structure -------------------------------------------------------------

struct TorsionResult {
  ModulePtr torsion;
  SheafMap inclusion;
  ModulePtr free_part;
  SheafMap projection;
  Index length = 0;
};

TorsionResult torsion_filtration(ModulePtr f);
Index torsion_length(ModulePtr f);
bool is_locally_free(ModulePtr f);

/// Sorted splitting type of a locally free sheaf.
std::vector<int> splitting_type(ModulePtr e);

/// Minimal presentation plus the generator map sum O(gens) -> F.
struct PresentationResult {
  Presentation presentation;
  ModulePtr generators;  // sum O(gens) on F's window
  SheafMap generator_map;
};

PresentationResult minimal_presentation(ModulePtr f, std::uint64_t seed = 0);

/// Dual of a locally free sheaf, with its generator description.
ModulePtr dual(ModulePtr e);
/// Ext^1(T, O) for torsion T.
ModulePtr ext1(ModulePtr t);

FormMatrix transpose(const FormMatrix& m);
std::vector<int> negate(std::vector<int> twists);

}  // namespace p1pairs
