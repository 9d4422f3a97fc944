#include "p1pairs/acceptance.hpp"

#include "p1pairs/collin.hpp"
#include "p1pairs/expanded.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <thread>

namespace p1pairs {

namespace {

using CaseFn = std::function<Report(int, Rng&)>;

// Runs count cases, case i with the child stream i of rng; results are kept
// in case order whatever the thread count.
std::vector<Report> run_cases(int count, const Rng& rng, int threads, const CaseFn& fn) {
  std::vector<Report> out(static_cast<std::size_t>(count));
  std::atomic<int> next{0};
  const auto work = [&] {
    for (int i = next++; i < count; i = next++) {
      Rng r = rng.child(static_cast<std::uint64_t>(i));
      Report rep;
      try {
        rep = fn(i, r);
      } catch (const std::exception& e) {
        rep.add("no exceptions", false, e.what());
      }
      out[static_cast<std::size_t>(i)] = std::move(rep);
    }
  };
  threads = std::clamp(threads, 1, std::max(1, count));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return out;
}

// One clause per distinct name: how many cases passed it, and the first failure.
void tally(Report& into, const std::vector<Report>& cases, const std::string& prefix) {
  struct Count {
    int total = 0;
    int passed = 0;
    std::string first;
  };
  std::vector<std::string> order;
  std::map<std::string, Count> counts;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    for (const auto& c : cases[i].clauses) {
      auto [it, fresh] = counts.try_emplace(c.name);
      if (fresh) order.push_back(c.name);
      Count& k = it->second;
      ++k.total;
      if (c.pass) {
        ++k.passed;
      } else if (k.first.empty()) {
        k.first = "case " + std::to_string(i) + (c.detail.empty() ? "" : ": " + c.detail);
      }
    }
  }
  for (const auto& name : order) {
    const Count& k = counts[name];
    std::string detail = std::to_string(k.passed) + "/" + std::to_string(k.total);
    if (!k.first.empty()) detail += "; first failure " + k.first;
    into.add(prefix + name, k.passed == k.total, detail);
  }
  if (cases.empty()) into.add(prefix + "cases", false, "no cases ran");
}

int count(const SuiteConfig& cfg, int full, int quick) { return cfg.quick ? quick : full; }

Rng suite_rng(const SuiteConfig& cfg, int id) { return Rng(cfg.seed).child(static_cast<std::uint64_t>(id)); }

// ---- 1: rank formula -------------------------------------------------------

Report rank_case(const StablePair& p, int deg_gcd) {
  Report r;
  const int m = p.n + 1;
  const Index expect = m + 1 + (p.n - deg_gcd);
  const Index got = rank(gamma(p, m));
  r.add("rank = m + 1 + n - deg gcd", got == expect,
        "rank " + std::to_string(got) + ", expected " + std::to_string(expect));
  const int j = stratum_index(p, p.n + 1);
  bool stable = true;
  for (int mm = std::max(0, p.n - 1); mm <= p.n + 1; ++mm) stable = stable && stratum_index(p, mm) == j;
  r.add("stratum index independent of m", stable);
  r.add("stratum index = n - deg gcd", j == p.n - deg_gcd);
  return r;
}

Report criterion1(const SuiteConfig& cfg) {
  Report out;
  const Rng rng = suite_rng(cfg, 1);
  const auto random_cases = run_cases(count(cfg, 200, 40), rng.child(0), cfg.threads, [&](int i, Rng& r) {
    StablePair p;
    p.N = 2 + i % 2;
    p.n = 1 + (i / 2) % 4;
    bool nonzero = false;
    while (!nonzero) {
      p.forms.clear();
      for (int k = 0; k < p.N; ++k) {
        // Some forms vanish so that large common factors occur.
        BinForm f = r.uniform(0, 5) == 0 ? BinForm::zero_of_degree(p.n) : random_form(r, p.n, cfg.coeff_bound);
        if (f.is_zero()) f = BinForm::zero_of_degree(p.n);
        nonzero = nonzero || !f.is_zero();
        p.forms.push_back(f);
      }
    }
    return rank_case(p, gcd(p.forms).degree());
  });
  tally(out, random_cases, "random: ");
  const auto built = run_cases(count(cfg, 50, 10), rng.child(1), cfg.threads, [&](int i, Rng& r) {
    const int N = 2 + i % 2;
    const int n = 1 + (i / 2) % 4;
    const int g = 1 + (i / 8) % n;
    return rank_case(random_pair(r, N, n, g, cfg.coeff_bound), g);
  });
  tally(out, built, "forced gcd: ");
  return out;
}

// ---- 2: chain round trip ---------------------------------------------------

// Each step is a random map killed by z0, so a cokernel supported at z0 = 0
// loses length one per step.
PsiChain slow_chain(Rng& r, const StablePair& p, std::int64_t bound) {
  PsiChain c = make_chain(p);
  while (!c.complete()) {
    const ModulePtr t = c.cokernels.back().module;
    const auto basis = hom_space(c.kernels.back().module, t);
    Index rows = 0;
    for (int d = t->d_lo(); d < t->d_hi(); ++d) rows += t->dim(d + 1) * c.kernels.back().module->dim(d);
    QMat z(rows, static_cast<Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
      Index at = 0;
      for (int d = t->d_lo(); d < t->d_hi(); ++d) {
        const QMat m = t->mul0(d) * basis[k].at(d);
        for (Index a = 0; a < m.rows(); ++a)
          for (Index b = 0; b < m.cols(); ++b) z(at++, static_cast<Index>(k)) = m(a, b);
      }
    }
    const QMat killed = kernel_basis(z);
    if (killed.cols() == 0) {
      c = extend_chain(c, r, bound);
      continue;
    }
    QVec v;
    do v = killed * random_vector(r, killed.cols(), bound);
    while (is_zero(QMat(v)));
    append_step(c, combination(basis, std::vector<Rat>(v.data(), v.data() + v.size())));
  }
  return c;
}

PsiChain power_factor_chain(Rng& r, int N, int n, int g, std::int64_t bound) {
  StablePair p = random_pair(r, N, n - g, 0, bound);
  p.n = n;
  const BinForm h = BinForm::monomial(g, 0);
  for (auto& f : p.forms) f = f.is_zero() ? BinForm::zero_of_degree(n) : f * h;
  return slow_chain(r, p, bound);
}

PsiChain mixed_chain(int i, Rng& r, int max_n, std::int64_t bound) {
  const int N = 2 + i % 2;
  const int n = 1 + (i / 2) % max_n;
  const int g = static_cast<int>(r.uniform(0, n));
  const bool sparse = r.uniform(0, 1) == 1;
  if (g == 0 || r.uniform(0, 1) == 0) return random_chain(r, N, n, g, sparse, bound);
  // Common factor z0^g: the cokernel sits at one point and chains can be long.
  return power_factor_chain(r, N, n, g, bound);
}

Report criterion2(const SuiteConfig& cfg) {
  Report out;
  const auto cases = run_cases(count(cfg, 50, 10), suite_rng(cfg, 2), cfg.threads, [&](int i, Rng& r) {
    const PsiChain c = mixed_chain(i, r, 4, cfg.coeff_bound);
    Report rep;
    rep.add("length " + std::to_string(c.length()), true);
    rep.add("psi chain valid", validate_psi_chain(c).ok());
    const PhiChain pc = psi_to_phi(c);
    const Report v = validate_phi_chain(pc);
    std::string failed;
    for (const auto& cl : v.clauses)
      if (!cl.pass) failed += (failed.empty() ? "" : ", ") + cl.name;
    rep.add("phi chain invariants", v.ok(), failed);
    rep.add("round trip equivalent", chain_equivalent(phi_to_psi(pc), c));
    return rep;
  });
  std::set<std::string> seen;
  for (const auto& c : cases)
    for (const auto& cl : c.clauses)
      if (cl.name.rfind("length ", 0) == 0) seen.insert(cl.name.substr(7));
  std::vector<Report> core = cases;
  for (auto& c : core)
    std::erase_if(c.clauses, [](const Report::Clause& cl) { return cl.name.rfind("length ", 0) == 0; });
  tally(out, core, "");
  std::string mix;
  for (const auto& s : seen) mix += (mix.empty() ? "" : ",") + s;
  out.add("mixed lengths", seen.size() >= 3 || cfg.quick, "lengths " + mix);
  return out;
}

// ---- 3, 4: expanded pairs --------------------------------------------------

PsiChain expanded_chain(int i, Rng& r, std::int64_t bound) {
  const int N = 2 + i % 2;
  const int n = 1 + (i / 2) % 3;
  const int g = 1 + static_cast<int>(r.uniform(0, n - 1));
  const bool sparse = r.uniform(0, 1) == 1;
  if (i % 3 == 2) return power_factor_chain(r, N, n, g, bound);
  return random_chain(r, N, n, g, sparse, bound);
}

int expanded_count(const SuiteConfig& cfg) { return count(cfg, 25, 4); }

Report criterion3(const SuiteConfig& cfg) {
  Report out;
  const Rng rng = suite_rng(cfg, 3);
  const auto cases = run_cases(expanded_count(cfg), rng, cfg.threads, [&](int i, Rng& r) {
    const PsiChain c = expanded_chain(i, r, cfg.coeff_bound);
    const PhiChain pc = psi_to_phi(c);
    Report rep;
    for (int k = 0; k <= pc.length(); ++k) {
      rep.merge(verify_lemma_tFi(pc, build_tilde(pc, k), r));
    }
    TildeOptions skip;
    skip.skip_minus = true;
    rep.add("control skip mu-: (c) D- weight -1 fails",
            !verify_lemma_tFi(pc, pc.length(), r, skip).passed("(c) D- weight -1"));

    // psi_1 = 0 inserted before completing again.
    PsiChain z = make_chain(c.base, c.window);
    append_step(z, zero_map(z.kernels[0].module, z.cokernels[0].module));
    const PhiChain pz = psi_to_phi(complete_chain(z, r, cfg.coeff_bound));
    rep.add("control zero step: (1) not trivial[1] fails", is_trivial_admissible(*build_tilde(pz, 1).tilde));
    return rep;
  });
  tally(out, cases, "");
  return out;
}

Report criterion4(const SuiteConfig& cfg) {
  Report out;
  // Same chains as criterion 3.
  const Rng rng = suite_rng(cfg, 3);
  const auto cases = run_cases(expanded_count(cfg), rng, cfg.threads, [&](int i, Rng& r) {
    const PhiChain pc = psi_to_phi(expanded_chain(i, r, cfg.coeff_bound));
    Report rep;
    const Report crit = criterion_check(pc, r);
    std::string failed;
    for (const auto& cl : crit.clauses)
      if (!cl.pass) failed += (failed.empty() ? "" : ", ") + cl.name;
    rep.add("criterion_check", crit.ok(), failed);
    bool glued = true;
    bool scalars = true;
    for (const auto& cl : crit.clauses) {
      if (cl.name.rfind("glue ", 0) == 0) glued = glued && cl.pass;
      if (cl.name == "endomorphisms are scalars") scalars = cl.pass;
    }
    rep.add("glue_check", glued);
    rep.add("endomorphism space is 1-dimensional", scalars, crit.clauses.back().detail);
    const Report cut = criterion_check(truncate(pc, pc.length() - 1), r);
    rep.add("control truncated: (2) surjective at D_m fails", !cut.passed("(2) surjective at D_m"));
    return rep;
  });
  tally(out, cases, "");
  return out;
}

// ---- 5: duality ------------------------------------------------------------

Report criterion5(const SuiteConfig& cfg) {
  Report out;
  const auto cases = run_cases(count(cfg, 50, 10), suite_rng(cfg, 5), cfg.threads, [&](int i, Rng& r) {
    const PsiChain c = mixed_chain(i, r, 4, cfg.coeff_bound);
    const QuotChain q = dual_chain(c, r);
    Report rep;
    const Report d = verify_duality(c, q, r);
    bool lengths = true;
    bool splittings = true;
    bool ext = true;
    for (const auto& cl : d.clauses) {
      if (cl.name.rfind("torsion length", 0) == 0) lengths = lengths && cl.pass;
      if (cl.name.rfind("splitting", 0) == 0) splittings = splittings && cl.pass;
      if (cl.name.rfind("torsion is Ext^1", 0) == 0) ext = ext && cl.pass;
    }
    rep.add("chain lengths agree", d.passed("chain lengths"));
    rep.add("G_0 = coker psi^dual", d.passed("G_0"));
    rep.add("l(G_i^tor) = l(T_i)", lengths);
    rep.add("G_i^tor = Ext^1(T_i, O)", ext);
    rep.add("splitting(G_i^tf) = -splitting(K_i)", splittings);
    rep.add("final level locally free", is_locally_free(q.levels.back().g));
    const Report v = validate_quot_chain(q);
    std::string failed;
    for (const auto& cl : v.clauses)
      if (!cl.pass) failed += (failed.empty() ? "" : ", ") + cl.name;
    rep.add("validate_quot_chain", v.ok(), failed);
    if (q.length() >= 1) {
      const int s = (q.length() - 1) / 2;
      const Report bad = validate_quot_chain(with_split_extension(q, s));
      rep.add("control split extension: torsion drops fails",
              !bad.passed("torsion drops[" + std::to_string(s + 1) + "]"));
    }
    return rep;
  });
  tally(out, cases, "");
  return out;
}

// ---- 6: stratum dimensions -------------------------------------------------

Report criterion6(const SuiteConfig& cfg) {
  struct Task {
    int N, n, j;
  };
  std::vector<Task> tasks;
  const int samples = count(cfg, 10, 2);
  for (auto [N, n] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}})
    for (int j = 0; j < n; ++j)
      for (int s = 0; s < samples; ++s) tasks.push_back({N, n, j});
  Report out;
  const auto cases =
      run_cases(static_cast<int>(tasks.size()), suite_rng(cfg, 6), cfg.threads, [&](int i, Rng& r) {
        const Task& t = tasks[static_cast<std::size_t>(i)];
        const StablePair p = random_pair(r, t.N, t.n, t.n - t.j, cfg.coeff_bound);
        const TangentDims d = tangent_dim_at(p, t.n + 1);
        const Index expect = expected_stratum_dim(t.N, t.n, t.j);
        const std::string where = "(N,n,j) = (" + std::to_string(t.N) + "," + std::to_string(t.n) + "," +
                                  std::to_string(t.j) + "), expected " + std::to_string(expect);
        Report rep;
        rep.add("point lies in stratum j", d.stratum == t.j, where);
        rep.add("jac_dim = (j+1)N - 1 + (n-j)", d.jac_dim == expect, where + ", got " + std::to_string(d.jac_dim));
        rep.add("param_rank = (j+1)N - 1 + (n-j)", d.param_rank == expect,
                where + ", got " + std::to_string(d.param_rank));
        return rep;
      });
  tally(out, cases, "");
  return out;
}

// ---- 7: engine soundness ---------------------------------------------------

// Invariants of the first chain level read on window w.
std::vector<Index> pair_invariants(const StablePair& p, Window w) {
  const PsiChain c = make_chain(p, w);
  const ModulePtr k = c.kernels[0].module;
  const ModulePtr t = c.cokernels[0].module;
  std::vector<Index> v;
  for (const ModulePtr& m : {k, t}) {
    const Hilbert h = hilbert(*m);
    v.push_back(h.r);
    v.push_back(h.c);
    v.push_back(torsion_length(m));
  }
  for (int s : splitting_type(k)) v.push_back(s);
  v.push_back(static_cast<Index>(hom_space(k, t).size()));
  const PresentationResult pr = minimal_presentation(t);
  v.push_back(static_cast<Index>(pr.presentation.gens.size()));
  v.push_back(static_cast<Index>(pr.presentation.rels.size()));
  return v;
}

ModulePtr random_torsion(Rng& r, std::int64_t bound, Index* length) {
  while (true) {
    const int k = static_cast<int>(r.uniform(1, 2));
    Presentation p;
    p.gens.assign(static_cast<std::size_t>(k), 0);
    std::vector<int> d;
    for (int j = 0; j < k; ++j) {
      d.push_back(static_cast<int>(r.uniform(1, 3)));
      p.rels.push_back(-d.back());
    }
    p.matrix.assign(static_cast<std::size_t>(k), {});
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        BinForm f = random_form(r, d[static_cast<std::size_t>(j)], bound);
        p.matrix[static_cast<std::size_t>(i)].push_back(f.is_zero() ? BinForm::zero_of_degree(d[static_cast<std::size_t>(j)]) : f);
      }
    auto t = share(from_presentation(p, 0, 12));
    if (hilbert(*t).r != 0) continue;
    // The determinant has degree sum d_j, and it is the length.
    *length = 0;
    for (int x : d) *length += x;
    return t;
  }
}

Report criterion7(const SuiteConfig& cfg) {
  Report out;
  const Rng rng = suite_rng(cfg, 7);

  const auto stability = run_cases(count(cfg, 20, 5), rng.child(0), cfg.threads, [&](int i, Rng& r) {
    const int N = 2 + i % 2;
    const int n = 1 + (i / 2) % 4;
    const StablePair p = random_pair(r, N, n, static_cast<int>(r.uniform(0, n)), cfg.coeff_bound);
    const Window w = default_window(N, n);
    Report rep;
    rep.add("invariants at width w and w+2 agree", pair_invariants(p, w) == pair_invariants(p, {w.lo, w.hi + 2}));
    return rep;
  });
  tally(out, stability, "window stability: ");

  const auto round_trips = run_cases(count(cfg, 30, 6), rng.child(1), cfg.threads, [&](int i, Rng& r) {
    const PsiChain c = mixed_chain(i, r, 3, cfg.coeff_bound);
    std::vector<ModulePtr> mods = {c.kernels[0].module, c.cokernels[0].module, c.f};
    if (c.length() > 0) mods.push_back(c.cokernels[1].module);
    Report rep;
    for (const auto& f : mods) {
      if (is_zero_module(*f)) continue;
      const PresentationResult p = minimal_presentation(f);
      const ModulePtr g = share(from_presentation(p.presentation, f->d_lo(), f->d_hi()));
      rep.add("presentation round trip", is_surjective(p.generator_map) && iso_test(f, g, r).is_iso());
    }
    return rep;
  });
  tally(out, round_trips, "minimal presentation: ");

  const auto ext = run_cases(count(cfg, 100, 20), rng.child(2), cfg.threads, [&](int, Rng& r) {
    Index len = 0;
    const ModulePtr t = random_torsion(r, cfg.coeff_bound, &len);
    const ModulePtr e = ext1(t);
    Report rep;
    rep.add("l(T) = deg det", torsion_length(t) == len && hilbert(*t).c == len);
    rep.add("l(Ext^1(T, O)) = l(T)", hilbert(*e).r == 0 && torsion_length(e) == len);
    return rep;
  });
  tally(out, ext, "ext1: ");

  const auto minors = run_cases(count(cfg, 100, 20), rng.child(3), cfg.threads, [&](int, Rng& r) {
    const Index rows = r.uniform(1, 5);
    const Index cols = r.uniform(1, 5);
    const Index target = r.uniform(0, std::min(rows, cols));
    const QMat m = random_matrix(r, rows, target, cfg.coeff_bound) * random_matrix(r, target, cols, cfg.coeff_bound);
    Index by_minors = 0;
    for (Index k = 1; k <= std::min(rows, cols); ++k)
      if (!is_zero(exterior_power(m, k))) by_minors = k;
    Report rep;
    rep.add("exterior power rank = rref rank", by_minors == rank(m),
            std::to_string(by_minors) + " vs " + std::to_string(rank(m)));
    return rep;
  });
  tally(out, minors, "exterior power: ");

  const long chi = chi_failures().load();
  out.add("chi additivity never failed", chi == 0, std::to_string(chi) + " failures");
  return out;
}

// ---- 8: determinism --------------------------------------------------------

Report criterion8(const SuiteConfig& cfg) {
  SuiteConfig a = cfg;
  a.quick = true;
  a.threads = 1;
  SuiteConfig b = a;
  b.threads = std::max(2, cfg.threads);
  const auto ids = selftest_ids(true);
  const std::string first = suites_to_json(a, run_suites(a, ids)).dump(2);
  const std::string second = suites_to_json(b, run_suites(b, ids)).dump(2);
  Report out;
  // The thread count is not part of the report.
  out.add("selftest reports byte-identical", first == second,
          std::to_string(first.size()) + " and " + std::to_string(second.size()) + " bytes");
  return out;
}

}  // namespace

std::string criterion_title(int id) {
  switch (id) {
    case 1: return "rank formula and stratum index";
    case 2: return "chain round trip";
    case 3: return "flatness and restriction isomorphisms of F~_i";
    case 4: return "criterion for expanded stable pairs";
    case 5: return "duality with complete quotients";
    case 6: return "stratum tangent dimensions";
    case 7: return "engine soundness";
    case 8: return "determinism";
    default: throw std::out_of_range("unknown criterion " + std::to_string(id));
  }
}

CriterionResult run_criterion(int id, const SuiteConfig& cfg) {
  CriterionResult r;
  r.id = id;
  r.title = criterion_title(id);
  const auto start = std::chrono::steady_clock::now();
  switch (id) {
    case 1: r.report = criterion1(cfg); break;
    case 2: r.report = criterion2(cfg); break;
    case 3: r.report = criterion3(cfg); break;
    case 4: r.report = criterion4(cfg); break;
    case 5: r.report = criterion5(cfg); break;
    case 6: r.report = criterion6(cfg); break;
    case 7: r.report = criterion7(cfg); break;
    case 8: r.report = criterion8(cfg); break;
    default: throw std::out_of_range("unknown criterion " + std::to_string(id));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_suites(const SuiteConfig& cfg, const std::vector<int>& ids) {
  std::vector<CriterionResult> out;
  for (int id : ids) out.push_back(run_criterion(id, cfg));
  return out;
}

Json suites_to_json(const SuiteConfig& cfg, const std::vector<CriterionResult>& results) {
  Json list = Json::array();
  bool all = true;
  for (const auto& r : results) {
    Json o = {{"id", r.id}, {"title", r.title}};
    const Json rep = to_json(r.report);
    o["pass"] = rep["pass"];
    o["clauses"] = rep["clauses"];
    list.push_back(o);
    all = all && r.pass();
  }
  return {{"schema", kSchema},
          {"seed", cfg.seed},
          {"level", cfg.quick ? "quick" : "full"},
          {"coeff_bound", cfg.coeff_bound},
          {"pass", all},
          {"criteria", list}};
}

std::vector<int> selftest_ids(bool quick) {
  if (quick) return {1, 2, 3, 4, 5, 6, 7};
  return {1, 2, 3, 4, 5, 6, 7, 8};
}

int threads_from_env() {
  const char* v = std::getenv("P1PAIRS_THREADS");
  if (v == nullptr) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (end == v || *end != '\0' || n < 1) return 1;
  return static_cast<int>(std::min<long>(n, 64));
}

}  // namespace p1pairs
