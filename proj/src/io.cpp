#include "p1pairs/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace p1pairs {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

int int_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw InputError(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

void check_schema(const Json& j) {
  const Json& s = field(j, "schema");
  if (!s.is_string() || s.get<std::string>() != kSchema)
    throw InputError(std::string("unsupported schema; expected \"") + kSchema + "\"");
}

}  // namespace

Json to_json(const Rat& x) { return x.str(); }

Json to_json(const BinForm& f) {
  Json c = Json::array();
  const QVec v = f.vector();
  for (Index i = 0; i < v.size(); ++i) c.push_back(v(i).str());
  return {{"degree", f.degree()}, {"coeffs", c}};
}

Json to_json(const QMat& m) {
  Json e = Json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index k = 0; k < m.cols(); ++k) e.push_back(m(i, k).str());
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", e}};
}

Json to_json(const Presentation& p) {
  Json rows = Json::array();
  for (const auto& row : p.matrix) {
    Json r = Json::array();
    for (const auto& f : row) r.push_back(to_json(f));
    rows.push_back(r);
  }
  return {{"gens", p.gens}, {"rels", p.rels}, {"matrix", rows}};
}

Json to_json(const Report& r) {
  Json clauses = Json::array();
  for (const auto& c : r.clauses) {
    Json o = {{"name", c.name}, {"pass", c.pass}};
    if (!c.detail.empty()) o["detail"] = c.detail;
    clauses.push_back(o);
  }
  return {{"pass", r.ok()}, {"clauses", clauses}};
}

Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(j.get<long>());
  if (!j.is_string()) throw InputError("rational entries must be strings");
  try {
    return Rat::parse(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

BinForm form_from_json(const Json& j) {
  const int d = int_field(j, "degree");
  const Json& c = field(j, "coeffs");
  if (!c.is_array()) throw InputError("form coefficients must be an array");
  std::vector<Rat> v;
  for (const auto& x : c) v.push_back(rat_from_json(x));
  try {
    return BinForm(d, std::move(v));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

QMat matrix_from_json(const Json& j) {
  const int r = int_field(j, "rows");
  const int c = int_field(j, "cols");
  const Json& e = field(j, "entries");
  if (r < 0 || c < 0 || !e.is_array() || e.size() != static_cast<std::size_t>(r) * static_cast<std::size_t>(c))
    throw InputError("matrix entry count does not match its shape");
  QMat m(r, c);
  std::size_t k = 0;
  for (Index i = 0; i < r; ++i)
    for (Index l = 0; l < c; ++l) m(i, l) = rat_from_json(e[k++]);
  return m;
}

Json pair_to_json(const StablePair& p) {
  Json forms = Json::array();
  for (const auto& f : p.forms) forms.push_back(to_json(f));
  return {{"schema", kSchema}, {"N", p.N}, {"n", p.n}, {"forms", forms}};
}

StablePair pair_from_json(const Json& j) {
  check_schema(j);
  StablePair p;
  p.N = int_field(j, "N");
  p.n = int_field(j, "n");
  const Json& forms = field(j, "forms");
  if (!forms.is_array()) throw InputError("\"forms\" must be an array");
  for (const auto& f : forms) p.forms.push_back(form_from_json(f));
  try {
    p.check();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return p;
}

Json chain_to_json(const PsiChain& c) {
  Json j = pair_to_json(c.base);
  j["window"] = {{"lo", c.window.lo}, {"hi", c.window.hi}};
  Json steps = Json::array();
  for (const auto& s : c.steps) {
    Json maps = Json::array();
    for (const auto& m : s.maps) maps.push_back(to_json(m));
    steps.push_back({{"d_lo", s.d_lo}, {"maps", maps}});
  }
  j["steps"] = steps;
  return j;
}

PsiChain chain_from_json(const Json& j) {
  const StablePair p = pair_from_json(j);
  const Json& w = field(j, "window");
  const Window win{int_field(w, "lo"), int_field(w, "hi")};
  if (win.hi - win.lo < 4) throw InputError("chain window must span at least five degrees");
  PsiChain c = make_chain(p, win);
  const Json& steps = field(j, "steps");
  if (!steps.is_array()) throw InputError("\"steps\" must be an array");
  for (const auto& s : steps) {
    if (c.complete()) throw InputError("step after a surjective map");
    SheafMap step;
    step.source = c.kernels.back().module;
    step.target = c.cokernels.back().module;
    step.d_lo = int_field(s, "d_lo");
    const Json& maps = field(s, "maps");
    if (!maps.is_array()) throw InputError("step maps must be an array");
    for (const auto& m : maps) step.maps.push_back(matrix_from_json(m));
    if (step.d_lo != step.source->d_lo() || step.d_hi() != step.source->d_hi())
      throw InputError("step must cover the chain window");
    for (int d = step.d_lo; d <= step.d_hi(); ++d) {
      const QMat& m = step.at(d);
      if (m.rows() != step.target->dim(d) || m.cols() != step.source->dim(d))
        throw InputError("step matrix in degree " + std::to_string(d) + " has the wrong shape");
    }
    try {
      validate_map(step);
    } catch (const InternalError&) {
      throw InputError("step does not commute with multiplication");
    }
    append_step(c, std::move(step));
  }
  return c;
}

Json quot_chain_to_json(const PsiChain& c, const QuotChain& q) {
  Json levels = Json::array();
  for (const auto& l : q.levels) {
    const RankDegree rd = rank_degree(*l.g);
    Json o = {{"rank", rd.rank},
              {"degree", rd.degree},
              {"torsion_length", l.split.length},
              {"free_splitting", splitting_type(l.split.free_part)},
              {"presentation", to_json(minimal_presentation(l.g).presentation)}};
    levels.push_back(o);
  }
  Json j = pair_to_json(c.base);
  j["window"] = {{"lo", c.window.lo}, {"hi", c.window.hi}};
  j["levels"] = levels;
  return j;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError(e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return parse_json(s.str());
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
  }
}

}  // namespace p1pairs
