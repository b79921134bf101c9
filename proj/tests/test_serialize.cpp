#include "stablelab/genprefs.hpp"
#include "stablelab/serialize.hpp"

#include <doctest.h>

#include <filesystem>

using namespace stablelab;

TEST_CASE("instances round-trip through JSON") {
  for (std::uint64_t t = 0; t < 25; ++t) {
    const AnyInstance strict = gen_bipartite_strict(4, {3, t});
    const AnyInstance cyclic = gen_cyclic_strict(3, 3, {3, t});
    const AnyInstance poset = gen_bipartite_poset(4, 3, 2, {3, t});
    for (const auto& inst : {strict, cyclic, poset}) {
      const std::string text = canonical_dump(to_json(inst));
      const AnyInstance back = instance_from_json(Json::parse(text));
      CHECK(back == inst);  // doubles are bit-exact
      CHECK(canonical_dump(to_json(back)) == text);
    }
  }
}

TEST_CASE("wire format is 1-based") {
  const BipartiteStrictInstance inst(2, {{1, 0}, {0, 1}}, {{0, 1}, {1, 0}});
  const Json j = to_json(inst);
  CHECK(j["model"] == "bipartite_strict");
  CHECK(j["men_prefs"] == Json::parse("[[2,1],[1,2]]"));
  CHECK(j["women_prefs"] == Json::parse("[[1,2],[2,1]]"));
  CHECK(model_name(AnyInstance(inst)) == "bipartite_strict");
}

TEST_CASE("malformed instance documents") {
  CHECK_THROWS_AS(instance_from_json(Json::parse("[]")), FormatError);
  CHECK_THROWS_AS(instance_from_json(Json::parse(R"({"model":"tripartite","n":2})")), FormatError);
  CHECK_THROWS_AS(instance_from_json(Json::parse(R"({"model":"bipartite_strict","n":0})")), FormatError);
  CHECK_THROWS_AS(instance_from_json(Json::parse(R"({"model":"bipartite_strict","n":1,"men_prefs":[[1]]})")),
                  FormatError);
  CHECK_THROWS_AS(
      instance_from_json(Json::parse(R"({"model":"bipartite_strict","n":1,"men_prefs":[["a"]],"women_prefs":[[1]]})")),
      FormatError);
  CHECK_THROWS_AS(instance_from_json(Json::parse(
                      R"({"model":"bipartite_poset","n":1,"k1":2,"k2":1,"x_points":[[[0.5]]],"y_points":[[[0.5]]]})")),
                  FormatError);
}

TEST_CASE("matchings and witnesses") {
  const AnyMatching b = matching_from_json(Json::parse("[2,1,3]"));
  CHECK(std::get<BipartiteMatching>(b).partner == Permutation{1, 0, 2});
  const AnyMatching wrapped = matching_from_json(Json::parse(R"({"matching":[1,2]})"));
  CHECK(std::get<BipartiteMatching>(wrapped).partner == Permutation{0, 1});
  const AnyMatching c = matching_from_json(Json::parse("[[2,1],[1,2]]"));
  CHECK(std::get<CyclicMatching>(c).maps == std::vector<Permutation>{{1, 0}, {0, 1}});
  CHECK(to_json(std::get<CyclicMatching>(c)) == Json::parse("[[2,1],[1,2]]"));
  CHECK_THROWS_AS(matching_from_json(Json::parse(R"({"other":1})")), FormatError);

  const BlockWitness pair = PairWitness{0, 1};
  CHECK(to_json(pair) == Json::parse(R"({"pair":[1,2]})"));
  CHECK(witness_from_json(to_json(pair)) == pair);
  const BlockWitness tuple = TupleWitness{{0, 2, 1}, {0, 2}};
  CHECK(to_json(tuple) == Json::parse(R"({"tuple":[1,3,2],"prefer_set":[1,3]})"));
  CHECK(witness_from_json(to_json(tuple)) == tuple);
}

TEST_CASE("content hashes and files") {
  const std::string h = content_hash("abc");
  CHECK(h.rfind("fnv1a64:", 0) == 0);
  CHECK(h.size() == 8 + 16);
  CHECK(content_hash("abc") == h);
  CHECK(content_hash("abd") != h);
  CHECK(content_hash("") == "fnv1a64:cbf29ce484222325");

  const auto dir = std::filesystem::temp_directory_path() / "stablelab_serialize_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "inst.json").string();
  const AnyInstance inst = gen_bipartite_poset(3, 2, 2, {1, 1});
  write_text_file(path, canonical_dump(to_json(inst)));
  CHECK(instance_from_json(read_json_file(path)) == inst);
  write_text_file(path, "{not json");
  CHECK_THROWS_AS(read_json_file(path), FormatError);
  CHECK_THROWS_AS(read_json_file((dir / "missing.json").string()), FormatError);
}
