#include "p1pairs/tailmod.hpp"
#include "tailmod_internal.hpp"

#include <algorithm>

namespace p1pairs {

std::atomic<long>& chi_failures() {
  static std::atomic<long> count{0};
  return count;
}

TailModule::TailModule(int d_lo, std::vector<Index> dims, std::vector<QMat> mul0, std::vector<QMat> mul1,
                       std::optional<Presentation> presentation)
    : d_lo_(d_lo),
      dims_(std::move(dims)),
      mul0_(std::move(mul0)),
      mul1_(std::move(mul1)),
      presentation_(std::move(presentation)) {
  if (dims_.empty()) throw std::invalid_argument("TailModule: empty window");
  if (mul0_.size() + 1 != dims_.size() || mul1_.size() + 1 != dims_.size())
    throw std::invalid_argument("TailModule: need one multiplication map per adjacent pair");
  for (std::size_t k = 0; k < mul0_.size(); ++k) {
    if (mul0_[k].rows() != dims_[k + 1] || mul0_[k].cols() != dims_[k] || mul1_[k].rows() != dims_[k + 1] ||
        mul1_[k].cols() != dims_[k])
      throw std::invalid_argument("TailModule: multiplication map shape mismatch");
  }
}

Index TailModule::dim(int d) const {
  if (!contains(d)) throw std::out_of_range("TailModule::dim: degree " + std::to_string(d) + " outside window");
  return dims_[static_cast<std::size_t>(d - d_lo_)];
}

const QMat& TailModule::mul0(int d) const {
  if (d < d_lo_ || d >= d_hi()) throw std::out_of_range("TailModule::mul0: degree outside window");
  return mul0_[static_cast<std::size_t>(d - d_lo_)];
}

const QMat& TailModule::mul1(int d) const {
  if (d < d_lo_ || d >= d_hi()) throw std::out_of_range("TailModule::mul1: degree outside window");
  return mul1_[static_cast<std::size_t>(d - d_lo_)];
}

QMat TailModule::mul(const BinForm& f, int d) const {
  if (f.is_zero()) {
    const int e = std::max(0, f.degree());
    return QMat::Zero(dim(d + e), dim(d));
  }
  const int e = f.degree();
  if (!contains(d) || !contains(d + e)) throw std::out_of_range("TailModule::mul: degree outside window");
  // Horner-like: accumulate products of monomials z0^(e-i) z1^i.
  QMat out = QMat::Zero(dim(d + e), dim(d));
  for (int i = 0; i <= e; ++i) {
    if (f.coeff(i).is_zero()) continue;
    QMat acc = identity(dim(d));
    int cur = d;
    for (int k = 0; k < i; ++k, ++cur) acc = mul1(cur) * acc;
    for (int k = 0; k < e - i; ++k, ++cur) acc = mul0(cur) * acc;
    out += f.coeff(i) * acc;
  }
  return out;
}

void TailModule::validate() const {
  for (int d = d_lo_; d + 2 <= d_hi(); ++d) {
    if (mul1(d + 1) * mul0(d) != mul0(d + 1) * mul1(d))
      throw InternalError("TailModule: multiplications do not commute at degree " + std::to_string(d));
  }
}

ModulePtr share(TailModule m) { return std::make_shared<const TailModule>(std::move(m)); }

const QMat& SheafMap::at(int d) const {
  if (!contains(d)) throw std::out_of_range("SheafMap::at: degree " + std::to_string(d) + " outside window");
  return maps[static_cast<std::size_t>(d - d_lo)];
}

// ---- construction ----------------------------------------------------------

TailModule free_module(const std::vector<int>& twists, int d_lo, int d_hi) {
  if (d_hi < d_lo) throw std::invalid_argument("free_module: empty window");
  std::vector<Index> dims;
  std::vector<QMat> m0, m1;
  for (int d = d_lo; d <= d_hi; ++d) {
    Index n = 0;
    for (int a : twists) n += wdim(d + a);
    dims.push_back(n);
  }
  for (int d = d_lo; d < d_hi; ++d) {
    QMat a = QMat::Zero(dims[static_cast<std::size_t>(d + 1 - d_lo)], dims[static_cast<std::size_t>(d - d_lo)]);
    QMat b = a;
    Index r = 0, c = 0;
    for (int t : twists) {
      const int e = d + t;
      const Index rows = wdim(e + 1), cols = wdim(e);
      if (cols > 0) {
        a.block(r, c, rows, cols) = mult_map(BinForm::z0(), e);
        b.block(r, c, rows, cols) = mult_map(BinForm::z1(), e);
      }
      r += rows;
      c += cols;
    }
    m0.push_back(std::move(a));
    m1.push_back(std::move(b));
  }
  Presentation p;
  p.gens = twists;
  p.matrix.assign(twists.size(), {});
  return TailModule(d_lo, std::move(dims), std::move(m0), std::move(m1), std::move(p));
}

TailModule zero_module(int d_lo, int d_hi) { return free_module({}, d_lo, d_hi); }

namespace {

std::vector<int> free_twists_of(const TailModule& m) {
  if (!m.presentation() || !m.presentation()->rels.empty())
    throw std::invalid_argument("form map requires modules built by free_module");
  return m.presentation()->gens;
}

}  // namespace

SheafMap form_map(ModulePtr source, ModulePtr target, const FormMatrix& m) {
  const auto b = free_twists_of(*source);
  const auto a = free_twists_of(*target);
  if (m.size() != a.size()) throw std::invalid_argument("form_map: row count mismatch");
  for (const auto& row : m)
    if (row.size() != b.size()) throw std::invalid_argument("form_map: column count mismatch");
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!m[i][j].is_zero() && m[i][j].degree() != a[i] - b[j])
        throw std::invalid_argument("form_map: entry degree must equal target twist minus source twist");
  SheafMap f;
  f.source = source;
  f.target = target;
  f.d_lo = std::max(source->d_lo(), target->d_lo());
  const int hi = std::min(source->d_hi(), target->d_hi());
  for (int d = f.d_lo; d <= hi; ++d) {
    QMat x = QMat::Zero(target->dim(d), source->dim(d));
    Index r = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      Index c = 0;
      const Index rows = wdim(d + a[i]);
      for (std::size_t j = 0; j < b.size(); ++j) {
        const Index cols = wdim(d + b[j]);
        if (rows > 0 && cols > 0 && !m[i][j].is_zero()) x.block(r, c, rows, cols) = mult_map(m[i][j], d + b[j]);
        c += cols;
      }
      r += rows;
    }
    f.maps.push_back(std::move(x));
  }
  return f;
}

FormMatrix read_forms(const SheafMap& f, const std::vector<int>& source_twists,
                      const std::vector<int>& target_twists) {
  const int d = f.d_hi();
  FormMatrix out(target_twists.size(), std::vector<BinForm>(source_twists.size()));
  const QMat& x = f.at(d);
  Index c = 0;
  for (std::size_t j = 0; j < source_twists.size(); ++j) {
    const int e = d + source_twists[j];
    if (e < 0) throw WindowTooNarrow("read_forms: generator degree above window");
    Index r = 0;
    for (std::size_t i = 0; i < target_twists.size(); ++i) {
      const int deg = target_twists[i] - source_twists[j];
      const Index rows = wdim(d + target_twists[i]);
      // Column c is z0^e; its image in summand i is z0^e * f_ij.
      for (Index k = deg + 1; k < rows; ++k)
        if (!x(r + k, c).is_zero()) throw InternalError("read_forms: image is not a multiple of z0^e");
      if (deg >= 0) {
        QVec v(deg + 1);
        for (int k = 0; k <= deg; ++k) v(k) = x(r + k, c);
        out[i][j] = BinForm::from_vector(deg, v);
      } else {
        for (Index k = 0; k < rows; ++k)
          if (!x(r + k, c).is_zero()) throw InternalError("read_forms: nonzero map of negative degree");
        out[i][j] = BinForm::zero_of_degree(deg);
      }
      r += rows;
    }
    c += wdim(e);
  }
  return out;
}

// ---- windows ---------------------------------------------------------------

TailModule down_extend(const TailModule& f, int new_lo) {
  if (new_lo >= f.d_lo()) return f;
  std::vector<Index> dims(f.dims());
  std::vector<QMat> m0, m1;
  for (int d = f.d_lo(); d < f.d_hi(); ++d) {
    m0.push_back(f.mul0(d));
    m1.push_back(f.mul1(d));
  }
  for (int d = f.d_lo(); d > new_lo; --d) {
    // F_{d-1} = {(a, b) in F_d^2 : z1 a = z0 b}; z0 s = a, z1 s = b.
    const Index n = dims.front();
    QMat k;
    if (m0.empty()) throw WindowTooNarrow("down_extend: window has a single degree");
    k = kernel_basis(hstack(m1.front(), -m0.front()));
    m0.insert(m0.begin(), k.topRows(n));
    m1.insert(m1.begin(), k.bottomRows(n));
    dims.insert(dims.begin(), k.cols());
  }
  return TailModule(new_lo, std::move(dims), std::move(m0), std::move(m1), f.presentation());
}

TailModule up_extend(const TailModule& f, int new_hi) {
  if (new_hi <= f.d_hi()) return f;
  const Hilbert h = hilbert(f);
  std::vector<Index> dims(f.dims());
  std::vector<QMat> m0, m1;
  for (int d = f.d_lo(); d < f.d_hi(); ++d) {
    m0.push_back(f.mul0(d));
    m1.push_back(f.mul1(d));
  }
  for (int t = f.d_hi(); t < new_hi; ++t) {
    // F_{t+1} = coker(F_{t-1} -> F_t + F_t, v -> (z1 v, -z0 v)) once H^1(F(t-1)) = 0.
    const Index below = dims[dims.size() - 2];
    if (below != h(t - 1)) throw WindowTooNarrow("up_extend: window top is not regular");
    const QMat& a = m0.back();
    const QMat& b = m1.back();
    const CokernelSplit cs = cokernel_split(vstack(b, -a));
    const Index n = dims.back();
    m0.push_back(cs.projection.leftCols(n));
    m1.push_back(cs.projection.rightCols(n));
    dims.push_back(cs.projection.rows());
  }
  return TailModule(f.d_lo(), std::move(dims), std::move(m0), std::move(m1), f.presentation());
}

TailModule restrict_window(const TailModule& f, int lo, int hi) {
  if (lo < f.d_lo() || hi > f.d_hi() || hi < lo) throw std::out_of_range("restrict_window: not a subwindow");
  std::vector<Index> dims;
  std::vector<QMat> m0, m1;
  for (int d = lo; d <= hi; ++d) dims.push_back(f.dim(d));
  for (int d = lo; d < hi; ++d) {
    m0.push_back(f.mul0(d));
    m1.push_back(f.mul1(d));
  }
  return TailModule(lo, std::move(dims), std::move(m0), std::move(m1), f.presentation());
}

TailModule rewindow(const TailModule& f, int lo, int hi) {
  TailModule g = f;
  if (hi > g.d_hi()) g = up_extend(g, hi);
  if (lo < g.d_lo()) g = down_extend(g, lo);
  return restrict_window(g, lo, hi);
}

SheafMap restrict_window(const SheafMap& f, int lo, int hi) {
  if (lo < f.d_lo || hi > f.d_hi() || hi < lo) throw std::out_of_range("restrict_window: not a subwindow of map");
  SheafMap g;
  g.source = f.source;
  g.target = f.target;
  g.d_lo = lo;
  for (int d = lo; d <= hi; ++d) g.maps.push_back(f.at(d));
  return g;
}

// Solves [m0_B; m1_B] X = [x mul0_A; x mul1_A] for the degree below.
QMat extend_map_down(const TailModule& a, const TailModule& b, int d, const QMat& x_above) {
  const QMat lhs = vstack(b.mul0(d), b.mul1(d));
  const QMat rhs = vstack(x_above * a.mul0(d), x_above * a.mul1(d));
  auto x = solve(lhs, rhs);
  if (!x) throw WindowTooNarrow("map does not extend to lower degree " + std::to_string(d));
  return *x;
}

// Solves X [m0_A | m1_A] = [m0_B x | m1_B x] for the degree above.
std::optional<QMat> extend_map_up(const TailModule& a, const TailModule& b, int d, const QMat& x) {
  const QMat lhs = hstack(a.mul0(d), a.mul1(d));
  const QMat rhs = hstack(b.mul0(d) * x, b.mul1(d) * x);
  auto xt = solve(lhs.transpose(), rhs.transpose());
  if (!xt) return std::nullopt;
  return QMat(xt->transpose());
}

SheafMap down_extend_map(SheafMap f) {
  const int lo = std::max(f.source->d_lo(), f.target->d_lo());
  while (f.d_lo > lo) {
    const int d = f.d_lo - 1;
    QMat x = extend_map_down(*f.source, *f.target, d, f.maps.front());
    f.maps.insert(f.maps.begin(), std::move(x));
    f.d_lo = d;
  }
  return f;
}

SheafMap rewindow(const SheafMap& f, ModulePtr source, ModulePtr target) {
  // The new modules agree with the old ones on the overlap of windows.
  SheafMap g;
  g.source = source;
  g.target = target;
  const int lo = std::max(source->d_lo(), target->d_lo());
  const int hi = std::min(source->d_hi(), target->d_hi());
  const int olo = std::max(lo, f.d_lo), ohi = std::min(hi, f.d_hi());
  if (olo > ohi) throw WindowTooNarrow("rewindow: windows do not overlap");
  g.d_lo = olo;
  for (int d = olo; d <= ohi; ++d) g.maps.push_back(f.at(d));
  for (int d = ohi; d < hi; ++d) {
    auto x = extend_map_up(*source, *target, d, g.maps.back());
    if (!x) throw WindowTooNarrow("rewindow: map does not extend upward");
    g.maps.push_back(std::move(*x));
  }
  return down_extend_map(std::move(g));
}

// ---- invariants ------------------------------------------------------------

Hilbert hilbert(const TailModule& f) {
  if (f.width() < 2) throw WindowTooNarrow("hilbert: window narrower than three degrees");
  const int hi = f.d_hi();
  Hilbert h;
  h.r = f.dim(hi) - f.dim(hi - 1);
  h.c = f.dim(hi) - h.r * hi;
  if (h(hi - 2) != f.dim(hi - 2)) throw WindowTooNarrow("hilbert: dimensions not yet affine at top of window");
  if (h.r < 0) throw InternalError("hilbert: negative rank");
  return h;
}

RankDegree rank_degree(const TailModule& f) {
  const Hilbert h = hilbert(f);
  return {h.r, h.c - h.r};
}

bool is_zero_module(const TailModule& f) {
  for (Index n : f.dims())
    if (n != 0) return false;
  return true;
}

// ---- maps ------------------------------------------------------------------

SheafMap zero_map(ModulePtr source, ModulePtr target) {
  SheafMap f;
  f.d_lo = std::max(source->d_lo(), target->d_lo());
  const int hi = std::min(source->d_hi(), target->d_hi());
  for (int d = f.d_lo; d <= hi; ++d) f.maps.push_back(QMat::Zero(target->dim(d), source->dim(d)));
  f.source = std::move(source);
  f.target = std::move(target);
  return f;
}

SheafMap identity_map(ModulePtr m) {
  SheafMap f;
  f.d_lo = m->d_lo();
  for (int d = m->d_lo(); d <= m->d_hi(); ++d) f.maps.push_back(identity(m->dim(d)));
  f.source = m;
  f.target = m;
  return f;
}

SheafMap compose(const SheafMap& g, const SheafMap& f) {
  SheafMap h;
  h.source = f.source;
  h.target = g.target;
  h.d_lo = std::max(f.d_lo, g.d_lo);
  const int hi = std::min(f.d_hi(), g.d_hi());
  if (hi < h.d_lo) throw WindowTooNarrow("compose: windows do not overlap");
  for (int d = h.d_lo; d <= hi; ++d) {
    if (g.at(d).cols() != f.at(d).rows()) throw std::invalid_argument("compose: incompatible maps");
    h.maps.push_back(g.at(d) * f.at(d));
  }
  return h;
}

SheafMap add(const SheafMap& f, const SheafMap& g) {
  SheafMap h;
  h.source = f.source;
  h.target = f.target;
  h.d_lo = std::max(f.d_lo, g.d_lo);
  const int hi = std::min(f.d_hi(), g.d_hi());
  for (int d = h.d_lo; d <= hi; ++d) {
    if (f.at(d).rows() != g.at(d).rows() || f.at(d).cols() != g.at(d).cols())
      throw std::invalid_argument("add: shape mismatch");
    h.maps.push_back(f.at(d) + g.at(d));
  }
  return h;
}

SheafMap scale(const SheafMap& f, const Rat& c) {
  SheafMap h = f;
  for (auto& m : h.maps) m *= c;
  return h;
}

SheafMap combination(const std::vector<SheafMap>& basis, const std::vector<Rat>& coeffs) {
  if (basis.empty() || basis.size() != coeffs.size()) throw std::invalid_argument("combination: size mismatch");
  SheafMap h = scale(basis[0], coeffs[0]);
  for (std::size_t k = 1; k < basis.size(); ++k) {
    if (coeffs[k].is_zero()) continue;
    for (int d = h.d_lo; d <= h.d_hi(); ++d) h.maps[static_cast<std::size_t>(d - h.d_lo)] += coeffs[k] * basis[k].at(d);
  }
  return h;
}

bool is_zero(const SheafMap& f) {
  for (const auto& m : f.maps)
    if (!is_zero(m)) return false;
  return true;
}

bool is_injective(const SheafMap& f) {
  // A sheaf map is injective iff it is injective on sections in high degree.
  const QMat& m = f.at(f.d_hi());
  return rank(m) == m.cols();
}

bool is_surjective(const SheafMap& f) {
  const QMat& m = f.at(f.d_hi());
  return rank(m) == m.rows();
}

bool is_degreewise_bijective(const SheafMap& f) {
  for (const auto& m : f.maps)
    if (m.rows() != m.cols() || rank(m) != m.rows()) return false;
  return true;
}

bool equal(const SheafMap& f, const SheafMap& g) {
  const int lo = std::max(f.d_lo, g.d_lo), hi = std::min(f.d_hi(), g.d_hi());
  for (int d = lo; d <= hi; ++d)
    if (f.at(d) != g.at(d)) return false;
  return true;
}

bool proportional(const SheafMap& f, const SheafMap& g, Rat* lambda) {
  const int lo = std::max(f.d_lo, g.d_lo), hi = std::min(f.d_hi(), g.d_hi());
  QMat a(0, 1), b(0, 1);
  for (int d = lo; d <= hi; ++d) {
    const QMat& x = f.at(d);
    const QMat& y = g.at(d);
    if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
    a = vstack(a, Eigen::Map<const QMat>(x.data(), x.size(), 1));
    b = vstack(b, Eigen::Map<const QMat>(y.data(), y.size(), 1));
  }
  return proportional(a, b, lambda);
}

SheafMap inverse(const SheafMap& f) {
  SheafMap g;
  g.source = f.target;
  g.target = f.source;
  g.d_lo = f.d_lo;
  for (const auto& m : f.maps) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse: map is not bijective");
    auto x = solve(m, identity(m.rows()));
    if (!x) throw std::invalid_argument("inverse: map is not bijective");
    g.maps.push_back(std::move(*x));
  }
  return g;
}

bool same_subsheaf(const SheafMap& a, const SheafMap& b) {
  const int lo = std::max(a.d_lo, b.d_lo), hi = std::min(a.d_hi(), b.d_hi());
  for (int d = lo; d <= hi; ++d) {
    const Index ra = rank(a.at(d)), rb = rank(b.at(d));
    if (ra != rb || rank(hstack(a.at(d), b.at(d))) != ra) return false;
  }
  return true;
}

void validate_map(const SheafMap& f) {
  for (int d = f.d_lo; d < f.d_hi(); ++d) {
    if (f.target->mul0(d) * f.at(d) != f.at(d + 1) * f.source->mul0(d) ||
        f.target->mul1(d) * f.at(d) != f.at(d + 1) * f.source->mul1(d))
      throw InternalError("SheafMap does not commute with multiplication at degree " + std::to_string(d));
  }
}

}  // namespace p1pairs
