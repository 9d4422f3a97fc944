// p1pairs: command-line front end for stable pairs and chains on P^1.

#include "p1pairs/acceptance.hpp"
#include "p1pairs/collin.hpp"
#include "p1pairs/expanded.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>

using namespace p1pairs;

namespace {

struct RunConfig {
  std::uint64_t seed = 0;
  std::optional<int> width;
  std::optional<int> m;
  std::int64_t coeff_bound = 9;
  std::string out;
  std::string format = "json";
};

Json header() { return {{"schema", kSchema}}; }

std::string render_text(const Json& j, const std::string& indent = "") {
  std::string s;
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) {
      s += indent + k + ":\n" + render_text(v, indent + "  ");
    } else if (v.is_array() && !v.empty() && v.front().is_object()) {
      for (std::size_t i = 0; i < v.size(); ++i) s += indent + k + "[" + std::to_string(i) + "]:\n" + render_text(v[i], indent + "  ");
    } else {
      s += indent + k + ": " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
    }
  }
  return s;
}

void emit(const RunConfig& cfg, const Json& j) {
  const std::string text = cfg.format == "text" ? render_text(j) : j.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(cfg.out, text);
  }
}

Json restriction_json(const Restriction& r) {
  Json o = Json::object();
  for (int w : r.support()) {
    const ModulePtr m = r.module(w);
    const Hilbert h = hilbert(*m);
    o[std::to_string(w)] = {{"rank", h.r}, {"euler", h.c}, {"torsion_length", torsion_length(m)}};
  }
  return o;
}

Json cmd_analyze(const RunConfig& cfg, const std::string& file) {
  const StablePair p = pair_from_json(read_json_file(file));
  const PairAnalysis a = analyze(p);
  const int m = cfg.m.value_or(default_m(p.n));
  Json j = header();
  j["deg_im"] = a.deg_im;
  j["coker_length"] = a.coker_length;
  j["kernel_splitting"] = a.kernel_splitting;
  j["stratum_j"] = stratum_index(p, m);
  j["gamma_rank"] = rank(gamma(p, m));
  j["m"] = m;
  return j;
}

Window build_window(const RunConfig& cfg, const StablePair& p) {
  Window w = default_window(p.N, p.n);
  if (cfg.width) {
    if (*cfg.width < 4) throw InputError("--width must be at least 4");
    w.hi = w.lo + *cfg.width;
  }
  return w;
}

Json cmd_chain(const RunConfig& cfg, const std::string& action, const std::string& file) {
  Rng rng(cfg.seed);
  if (action == "build") {
    const StablePair p = pair_from_json(read_json_file(file));
    return chain_to_json(complete_chain(make_chain(p, build_window(cfg, p)), rng, cfg.coeff_bound));
  }
  const PsiChain c = chain_from_json(read_json_file(file));
  if (action == "extend") {
    if (c.complete()) throw InputError("chain is already complete");
    return chain_to_json(extend_chain(c, rng, cfg.coeff_bound));
  }
  Json j = header();
  j["length"] = c.length();
  j["complete"] = c.complete();
  j["psi"] = to_json(validate_psi_chain(c));
  if (c.complete()) {
    const PhiChain pc = psi_to_phi(c);
    j["phi"] = to_json(validate_phi_chain(pc));
    j["round_trip"] = chain_equivalent(phi_to_psi(pc), c);
  }
  return j;
}

Json cmd_embed(const RunConfig& cfg, const std::string& file) {
  const PsiChain c = chain_from_json(read_json_file(file));
  const int m = cfg.m.value_or(default_m(c.base.n));
  const CollineationChain cc = embed_chain(c, m);
  Json levels = Json::array();
  for (const auto& l : cc.levels) levels.push_back({{"rank", rank(l.map)}, {"map", to_json(l.map)}});
  Json j = header();
  j["m"] = m;
  j["levels"] = levels;
  j["validation"] = to_json(validate_collineation(cc));
  return j;
}

Json cmd_strata(const RunConfig& cfg, const std::string& file) {
  const StablePair p = pair_from_json(read_json_file(file));
  const int m = cfg.m.value_or(default_m(p.n));
  if (m < p.n - 1) throw InputError("--m must be at least n - 1");
  const QMat g = gamma(p, m);
  const int j = stratum_index(p, m);
  Json out = header();
  out["m"] = m;
  out["gamma"] = to_json(g);
  out["gamma_rank"] = rank(g);
  out["stratum_j"] = j;
  out["stratum_dim"] = expected_stratum_dim(p.N, p.n, j);
  if (j < p.n) {
    const TangentDims t = tangent_dim_at(p, m, threads_from_env());
    out["jac_dim"] = t.jac_dim;
    out["param_rank"] = t.param_rank;
  }
  return out;
}

Json cmd_dualize(const RunConfig& cfg, const std::string& file) {
  const PsiChain c = chain_from_json(read_json_file(file));
  if (!c.complete()) throw InputError("dualize needs a complete chain");
  Rng rng(cfg.seed);
  const QuotChain q = dual_chain(c, rng);
  Json j = quot_chain_to_json(c, q);
  j["validation"] = to_json(validate_quot_chain(q));
  j["duality"] = to_json(verify_duality(c, q, rng));
  return j;
}

Json cmd_expand(const RunConfig& cfg, const std::string& file) {
  const PsiChain c = chain_from_json(read_json_file(file));
  if (!c.complete()) throw InputError("expand needs a complete chain");
  Rng rng(cfg.seed);
  const PhiChain pc = psi_to_phi(c);
  const auto comps = build_all_tilde(pc);
  Json list = Json::array();
  for (const auto& comp : comps) {
    const Hilbert h = hilbert(*restrict_fiber(*comp.tilde, Rat(1)).quotient.module);
    Json o = {{"index", comp.index},
              {"fiber", {{"rank", h.r}, {"euler", h.c}}},
              {"D_plus", restriction_json(restrict_Dplus(*comp.tilde))},
              {"D_minus", restriction_json(restrict_Dminus(*comp.tilde))},
              {"admissible", is_admissible(comp.tilde).admissible},
              {"trivial", is_trivial_admissible(*comp.tilde)},
              {"lemma", to_json(verify_lemma_tFi(pc, comp, rng))}};
    list.push_back(o);
  }
  Json j = header();
  j["length"] = pc.length();
  j["components"] = list;
  j["criterion"] = to_json(criterion_check(pc, rng));
  return j;
}

int cmd_selftest(const RunConfig& cfg, const std::string& level) {
  SuiteConfig s;
  s.seed = cfg.seed;
  s.quick = level == "quick";
  s.coeff_bound = cfg.coeff_bound;
  s.threads = threads_from_env();
  const auto results = run_suites(s, selftest_ids(s.quick));
  const Json j = suites_to_json(s, results);
  emit(cfg, j);
  return j["pass"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stable pairs, complete chains and their invariants on P^1"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "Seed for all random choices")->default_val(0);
  app.add_option("--m", cfg.m, "Twist m for the collineation matrices (default n + 1)");
  app.add_option("--width", cfg.width, "Window width for newly built chains");
  app.add_option("--coeff-bound", cfg.coeff_bound, "Bound on random integer coefficients")
      ->default_val(9)
      ->check(CLI::Range(1, 1000000));
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--out", cfg.out, "Output path (default stdout)");

  std::string file;
  std::string action;
  std::string level = "quick";
  std::function<Json()> run;

  auto* analyze = app.add_subcommand("analyze", "Invariants of a pair");
  analyze->add_option("pair-file", file)->required();
  analyze->callback([&] { run = [&] { return cmd_analyze(cfg, file); }; });

  auto* chain = app.add_subcommand("chain", "Build, validate or extend a chain");
  chain->add_option("action", action)->required()->check(CLI::IsMember({"build", "validate", "extend"}));
  chain->add_option("file", file, "Pair file for build, chain file otherwise")->required();
  chain->callback([&] { run = [&] { return cmd_chain(cfg, action, file); }; });

  auto* embed = app.add_subcommand("embed", "Complete collineation of a chain");
  embed->add_option("chain-file", file)->required();
  embed->callback([&] { run = [&] { return cmd_embed(cfg, file); }; });

  auto* strata = app.add_subcommand("strata", "Stratum and tangent dimensions of a pair");
  strata->add_option("pair-file", file)->required();
  strata->callback([&] { run = [&] { return cmd_strata(cfg, file); }; });

  auto* dualize = app.add_subcommand("dualize", "Complete quotient of a chain");
  dualize->add_option("chain-file", file)->required();
  dualize->callback([&] { run = [&] { return cmd_dualize(cfg, file); }; });

  auto* expand = app.add_subcommand("expand", "Expanded pair of a chain");
  expand->add_option("chain-file", file)->required();
  expand->callback([&] { run = [&] { return cmd_expand(cfg, file); }; });

  auto* selftest = app.add_subcommand("selftest", "Run the acceptance suites");
  selftest->add_option("--level", level)->check(CLI::IsMember({"quick", "full"}));

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (selftest->parsed()) return cmd_selftest(cfg, level);
    emit(cfg, run());
    return 0;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const Exhausted& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
