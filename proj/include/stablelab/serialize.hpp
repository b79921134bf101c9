// JSON formats. All indices are 1-based on the wire.
//
// Instance documents:
//   {"model":"bipartite_strict","n":N,"men_prefs":[[...]...],"women_prefs":[[...]...]}
//   {"model":"cyclic_strict","r":R,"n":N,"prefs":[[[...]...]...]}      // prefs[s][agent]
//   {"model":"bipartite_poset","n":N,"k1":K1,"k2":K2,
//    "x_points":[[[...K1]...N]...N],"y_points":[[[...K2]...N]...N]}    // [agent][candidate]
// Doubles are written in shortest round-trip form, so parsing a written
// document reproduces every coordinate bit-exactly.
#pragma once

#include "stablelab/core.hpp"
#include "stablelab/matchalg.hpp"
#include "stablelab/stability.hpp"

#include <json.hpp>

#include <string>
#include <variant>

namespace stablelab {

using Json = nlohmann::json;

using AnyInstance = std::variant<BipartiteStrictInstance, CyclicStrictInstance, BipartitePosetInstance>;
using AnyMatching = std::variant<BipartiteMatching, CyclicMatching>;

/// Malformed or schema-violating document.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string model_name(const AnyInstance& inst);

Json to_json(const BipartiteStrictInstance& inst);
Json to_json(const CyclicStrictInstance& inst);
Json to_json(const BipartitePosetInstance& inst);
Json to_json(const AnyInstance& inst);

AnyInstance instance_from_json(const Json& j);

/// Bipartite: [p1, ..., pn] (partner of each first-side agent).
/// Cyclic: [[pi_2...], ..., [pi_r...]].
/// Either may be wrapped as {"matching": ...}.
Json to_json(const BipartiteMatching& m);
Json to_json(const CyclicMatching& m);
AnyMatching matching_from_json(const Json& j);

/// {"pair":[i,j]} or {"tuple":[a1,...,ar],"prefer_set":[...]}.
Json to_json(const BlockWitness& w);
BlockWitness witness_from_json(const Json& j);

/// {"matching":[...],"total_proposals":T,"per_man_rank":[...]}.
Json to_json(const ProposalTrace& t);

/// Compact dump used for hashing and files (no whitespace, sorted keys).
std::string canonical_dump(const Json& j);
std::string content_hash(const std::string& bytes);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace stablelab
