#include "stablelab/serialize.hpp"

#include "stablelab/rng.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace stablelab {

namespace {

Json rows_to_json(const std::vector<Permutation>& rows) {
  Json out = Json::array();
  for (const auto& row : rows) {
    Json r = Json::array();
    for (int v : row) r.push_back(v + 1);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Permutation> rows_from_json(const Json& j, const char* field) {
  if (!j.is_array()) throw FormatError(std::string(field) + " must be an array of rows");
  std::vector<Permutation> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw FormatError(std::string(field) + " rows must be arrays");
    Permutation row;
    for (const auto& v : r) {
      if (!v.is_number_integer()) throw FormatError(std::string(field) + " entries must be integers");
      row.push_back(v.get<int>() - 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Json points_to_json(const PointMatrix& pts, int n) {
  Json out = Json::array();
  for (int a = 0; a < n; ++a) {
    Json agent = Json::array();
    for (int c = 0; c < n; ++c) {
      Json p = Json::array();
      for (Eigen::Index u = 0; u < pts.cols(); ++u) p.push_back(pts(static_cast<Eigen::Index>(a) * n + c, u));
      agent.push_back(std::move(p));
    }
    out.push_back(std::move(agent));
  }
  return out;
}

PointMatrix points_from_json(const Json& j, int n, int k, const char* field) {
  const std::string f(field);
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw FormatError(f + " must hold n agents");
  PointMatrix pts(static_cast<Eigen::Index>(n) * n, k);
  for (int a = 0; a < n; ++a) {
    const auto& agent = j[a];
    if (!agent.is_array() || static_cast<int>(agent.size()) != n) {
      throw FormatError(f + " agent " + std::to_string(a + 1) + " must hold n points");
    }
    for (int c = 0; c < n; ++c) {
      const auto& p = agent[c];
      if (!p.is_array() || static_cast<int>(p.size()) != k) {
        throw FormatError(f + " points must have " + std::to_string(k) + " coordinates");
      }
      for (int u = 0; u < k; ++u) {
        if (!p[u].is_number()) throw FormatError(f + " coordinates must be numbers");
        pts(static_cast<Eigen::Index>(a) * n + c, u) = p[u].get<double>();
      }
    }
  }
  return pts;
}

int positive_field(const Json& j, const char* name) {
  if (!j.contains(name) || !j[name].is_number_integer()) {
    throw FormatError(std::string("missing integer field '") + name + "'");
  }
  const int v = j[name].get<int>();
  if (v < 1) throw FormatError(std::string(name) + " must be >= 1");
  return v;
}

const Json& field(const Json& j, const char* name) {
  if (!j.contains(name)) throw FormatError(std::string("missing field '") + name + "'");
  return j[name];
}

Permutation perm_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("matching must be an array");
  Permutation p;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw FormatError("matching entries must be integers");
    p.push_back(v.get<int>() - 1);
  }
  return p;
}

Json perm_to_json(const Permutation& p) {
  Json out = Json::array();
  for (int v : p) out.push_back(v + 1);
  return out;
}

}  // namespace

std::string model_name(const AnyInstance& inst) {
  switch (inst.index()) {
    case 0: return "bipartite_strict";
    case 1: return "cyclic_strict";
    default: return "bipartite_poset";
  }
}

Json to_json(const BipartiteStrictInstance& inst) {
  return Json{{"model", "bipartite_strict"},
              {"n", inst.size()},
              {"men_prefs", rows_to_json(inst.prefs(Side::First))},
              {"women_prefs", rows_to_json(inst.prefs(Side::Second))}};
}

Json to_json(const CyclicStrictInstance& inst) {
  Json blocks = Json::array();
  for (const auto& block : inst.prefs()) blocks.push_back(rows_to_json(block));
  return Json{{"model", "cyclic_strict"}, {"r", inst.sides()}, {"n", inst.size()}, {"prefs", std::move(blocks)}};
}

Json to_json(const BipartitePosetInstance& inst) {
  return Json{{"model", "bipartite_poset"},
              {"n", inst.size()},
              {"k1", inst.dimension(Side::First)},
              {"k2", inst.dimension(Side::Second)},
              {"x_points", points_to_json(inst.points(Side::First), inst.size())},
              {"y_points", points_to_json(inst.points(Side::Second), inst.size())}};
}

Json to_json(const AnyInstance& inst) {
  return std::visit([](const auto& i) { return to_json(i); }, inst);
}

AnyInstance instance_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("instance must be a JSON object");
  const auto& model = field(j, "model");
  if (!model.is_string()) throw FormatError("model must be a string");
  const auto name = model.get<std::string>();
  if (name == "bipartite_strict") {
    const int n = positive_field(j, "n");
    return BipartiteStrictInstance(n, rows_from_json(field(j, "men_prefs"), "men_prefs"),
                                   rows_from_json(field(j, "women_prefs"), "women_prefs"));
  }
  if (name == "cyclic_strict") {
    const int r = positive_field(j, "r");
    const int n = positive_field(j, "n");
    const auto& blocks = field(j, "prefs");
    if (!blocks.is_array()) throw FormatError("prefs must be an array of blocks");
    std::vector<std::vector<Permutation>> prefs;
    for (const auto& b : blocks) prefs.push_back(rows_from_json(b, "prefs"));
    return CyclicStrictInstance(r, n, std::move(prefs));
  }
  if (name == "bipartite_poset") {
    const int n = positive_field(j, "n");
    const int k1 = positive_field(j, "k1");
    const int k2 = positive_field(j, "k2");
    return BipartitePosetInstance(n, points_from_json(field(j, "x_points"), n, k1, "x_points"),
                                  points_from_json(field(j, "y_points"), n, k2, "y_points"));
  }
  throw FormatError("unknown model '" + name + "'");
}

Json to_json(const BipartiteMatching& m) { return perm_to_json(m.partner); }

Json to_json(const CyclicMatching& m) {
  Json out = Json::array();
  for (const auto& p : m.maps) out.push_back(perm_to_json(p));
  return out;
}

AnyMatching matching_from_json(const Json& j) {
  const Json& body = j.is_object() ? field(j, "matching") : j;
  if (!body.is_array()) throw FormatError("matching must be an array");
  if (!body.empty() && body.front().is_array()) {
    CyclicMatching m;
    for (const auto& p : body) m.maps.push_back(perm_from_json(p));
    return m;
  }
  return BipartiteMatching{perm_from_json(body)};
}

Json to_json(const BlockWitness& w) {
  if (const auto* p = std::get_if<PairWitness>(&w)) return Json{{"pair", {p->first + 1, p->second + 1}}};
  const auto& t = std::get<TupleWitness>(w);
  Json prefer = Json::array();
  for (int s : t.prefer_set) prefer.push_back(s + 1);
  return Json{{"tuple", perm_to_json(t.agents)}, {"prefer_set", std::move(prefer)}};
}

BlockWitness witness_from_json(const Json& j) {
  if (j.contains("pair")) {
    const auto p = perm_from_json(j["pair"]);
    if (p.size() != 2) throw FormatError("pair witness needs two entries");
    return PairWitness{p[0], p[1]};
  }
  TupleWitness t;
  t.agents = perm_from_json(field(j, "tuple"));
  t.prefer_set = perm_from_json(field(j, "prefer_set"));
  return t;
}

Json to_json(const ProposalTrace& t) {
  return Json{{"matching", to_json(t.matching)}, {"total_proposals", t.total_proposals}, {"per_man_rank", t.per_man_rank}};
}

std::string canonical_dump(const Json& j) { return j.dump(); }

std::string content_hash(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string("fnv1a64:") + buf;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace stablelab
