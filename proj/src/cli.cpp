#include "stablelab/cli.hpp"

#include "stablelab/genprefs.hpp"
#include "stablelab/matchalg.hpp"
#include "stablelab/parallel.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace stablelab {

namespace {

void dump17_into(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      if (std::string_view(buf).find_first_of(".eE") == std::string_view::npos) out += ".0";
      return;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        dump17_into(v, out);
      }
      out += ']';
      return;
    }
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump17_into(it.value(), out);
      }
      out += '}';
      return;
    }
    default: out += j.dump();
  }
}

SeedSpec seed_of(const CliConfig& c) { return SeedSpec{c.seed.value_or(0), c.trial}; }

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const CliConfig& c, std::ostream& out, const std::string& text) {
  if (c.output.empty()) {
    out << text;
  } else {
    write_text_file(c.output, text);
  }
}

void require_format(const CliConfig& c, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed) {
    if (c.format == f) return;
  }
  throw UsageError("format '" + c.format + "' is not supported by " + c.subcommand);
}

AnyInstance load_or_generate(const CliConfig& c) {
  if (!c.instance_path.empty()) {
    AnyInstance inst = instance_from_json(read_json_file(c.instance_path));
    const auto problems = std::visit([](const auto& i) { return validate(i); }, inst);
    if (!problems.empty()) throw InvalidInstance(problems.front());
    return inst;
  }
  return generate(c.params, seed_of(c));
}

Json load_matching_json(const std::string& text) {
  if (text.empty()) throw UsageError("--matching is required");
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) {
    try {
      return Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw FormatError(std::string("inline matching is not valid JSON: ") + e.what());
    }
  }
  return read_json_file(text);
}

CyclicNotion cyclic_notion_of(const CliConfig& c, const std::string& name, int r) {
  if (name == "weak") return CyclicNotion::weak(r);
  if (name == "strong") {
    return CyclicNotion::strong(r, c.threshold > 0 ? c.threshold : majority_threshold(r), c.keep_partner);
  }
  throw UsageError("cyclic notions are weak and strong, got '" + name + "'");
}

std::vector<std::string> notions_of(const CliConfig& c, const AnyInstance& inst) {
  if (!c.notions.empty() && !(c.notions.size() == 1 && c.notions[0] == "all")) return c.notions;
  if (std::holds_alternative<CyclicStrictInstance>(inst)) return {"weak", "strong"};
  return {"weak", "strong", "super"};
}

// --- subcommands -------------------------------------------------------------

int cmd_generate(const CliConfig& c, std::ostream& out) {
  require_format(c, {"json"});
  const AnyInstance inst = generate(c.params, seed_of(c));
  const std::string text = dump17(to_json(inst)) + "\n";
  const std::string hash = content_hash(text);
  if (c.output.empty()) {
    out << text;
  } else {
    write_text_file(c.output, text);
    out << hash << "\n";
  }
  return kExitOk;
}

int cmd_check(const CliConfig& c, std::ostream& out) {
  require_format(c, {"json"});
  const AnyInstance inst = load_or_generate(c);
  const AnyMatching matching = matching_from_json(load_matching_json(c.matching));
  const std::string notion = c.notions.empty() ? "weak" : c.notions.front();
  StabilityResult res;
  if (const auto* cyc = std::get_if<CyclicStrictInstance>(&inst)) {
    const auto* m = std::get_if<CyclicMatching>(&matching);
    if (!m) throw FormatError("cyclic instance needs a cyclic matching");
    if (static_cast<int>(m->maps.size()) != cyc->sides() - 1) throw FormatError("matching must hold r - 1 maps");
    for (const auto& p : m->maps) {
      if (!is_permutation_of_range(p, cyc->size())) throw FormatError("matching map is not a permutation of size n");
    }
    res = is_stable(*cyc, *m, cyclic_notion_of(c, notion, cyc->sides()));
  } else {
    const auto* m = std::get_if<BipartiteMatching>(&matching);
    if (!m) throw FormatError("bipartite instance needs a bipartite matching");
    const Notion nt = parse_notion(notion);
    res = std::visit(
        [&](const auto& i) -> StabilityResult {
          using T = std::decay_t<decltype(i)>;
          if constexpr (std::is_same_v<T, CyclicStrictInstance>) {
            return {};
          } else {
            if (!is_permutation_of_range(m->partner, i.size())) {
              throw FormatError("matching is not a permutation of size n");
            }
            return is_stable(i, *m, nt);
          }
        },
        inst);
  }
  Json report{{"verdict", res.stable ? "stable" : "unstable"}, {"notion", notion}};
  if (res.witness) report["witness"] = to_json(*res.witness);
  emit(c, out, dump17(report) + "\n");
  return res.stable ? kExitOk : kExitUnstable;
}

int cmd_count(const CliConfig& c, std::ostream& out) {
  require_format(c, {"json", "csv"});
  const AnyInstance inst = load_or_generate(c);
  const auto notions = notions_of(c, inst);
  Json counts = Json::object();
  std::uint64_t examined = 0;
  if (const auto* cyc = std::get_if<CyclicStrictInstance>(&inst)) {
    for (const auto& name : notions) {
      CountOptions<CyclicMatching> opts;
      opts.cap = c.caps;
      const auto res = count_stable(*cyc, cyclic_notion_of(c, name, cyc->sides()), opts);
      counts[name] = res.count;
      examined = res.examined;
    }
  } else {
    for (const auto& name : notions) parse_notion(name);
    const NotionCounts nc = std::visit(
        [&](const auto& i) -> NotionCounts {
          using T = std::decay_t<decltype(i)>;
          if constexpr (std::is_same_v<T, CyclicStrictInstance>) {
            return {};
          } else {
            return count_all_notions(i, c.caps);
          }
        },
        inst);
    for (const auto& name : notions) counts[name] = nc[parse_notion(name)];
    examined = nc.examined;
  }
  if (c.format == "csv") {
    std::string text = "notion,count,matchings_examined\n";
    for (const auto& name : notions) {
      text += name + "," + std::to_string(counts[name].get<std::uint64_t>()) + "," + std::to_string(examined) + "\n";
    }
    emit(c, out, text);
  } else {
    const Json report{{"model", model_name(inst)},
                      {"instance_hash", content_hash(canonical_dump(to_json(inst)))},
                      {"counts", counts},
                      {"matchings_examined", examined}};
    emit(c, out, dump17(report) + "\n");
  }
  return kExitOk;
}

int cmd_algo(const CliConfig& c, std::ostream& out) {
  require_format(c, {"json"});
  const AnyInstance inst = load_or_generate(c);
  if (c.algorithm == "gale-shapley") {
    const auto* strict = std::get_if<BipartiteStrictInstance>(&inst);
    if (!strict) throw UsageError("gale-shapley needs a bipartite_strict instance");
    ProposalOrder order;
    if (c.order == "lowest") {
      order = ProposalOrder::LowestFreeFirst;
    } else if (c.order == "chain") {
      order = ProposalOrder::LastRejectedFirst;
    } else {
      throw UsageError("--order must be lowest or chain");
    }
    Json report;
    if (c.woman_optimal) {
      report = Json{{"matching", to_json(woman_optimal(*strict))}, {"side", "women"}};
    } else {
      report = to_json(gale_shapley(*strict, order));
      report["side"] = "men";
    }
    emit(c, out, dump17(report) + "\n");
    return kExitOk;
  }
  if (c.algorithm == "extension") {
    const auto* poset = std::get_if<BipartitePosetInstance>(&inst);
    if (!poset) throw UsageError("extension needs a bipartite_poset instance");
    const SeedSpec seed = seed_of(c);
    const auto extended = linear_extension_instance(*poset, seed);
    const auto m = weak_stable_via_extension(*poset, seed);
    const Json report{{"matching", to_json(m)},
                      {"extended_instance", to_json(extended)},
                      {"weakly_stable", is_stable(*poset, m, Notion::Weak).stable}};
    emit(c, out, dump17(report) + "\n");
    return kExitOk;
  }
  throw UsageError("algo needs gale-shapley or extension");
}

// Memo of quadrature results under $STABLE_LAB_CACHE/constants.json, keyed
// by index and tolerance.
class ConstantCache {
 public:
  ConstantCache() {
    const char* dir = std::getenv("STABLE_LAB_CACHE");
    if (!dir || !*dir) return;
    path_ = (std::filesystem::path(dir) / "constants.json").string();
    std::ifstream in(path_);
    if (in) {
      try {
        data_ = Json::parse(in);
      } catch (const Json::parse_error&) {
        data_ = Json::object();  // stale or partial file: recompute
      }
    }
    if (!data_.is_object()) data_ = Json::object();
  }

  template <class F>
  double get(const std::string& key, F&& compute) {
    if (!path_.empty() && data_.contains(key) && data_[key].is_number()) return data_[key].get<double>();
    const double v = compute();
    if (!path_.empty()) {
      data_[key] = v;
      dirty_ = true;
    }
    return v;
  }

  void flush() {
    if (!dirty_) return;
    std::filesystem::create_directories(std::filesystem::path(path_).parent_path());
    write_text_file(path_, data_.dump() + "\n");
  }

 private:
  std::string path_;
  Json data_ = Json::object();
  bool dirty_ = false;
};

int cmd_constants(const CliConfig& c, std::ostream& out) {
  require_format(c, {"json", "csv"});
  if (c.c_r_range.empty() && c.rho_k_range.empty() && c.r_k_range.empty()) {
    throw UsageError("constants needs at least one of --c-r, --rho-k, --r-k");
  }
  ConstantCache cache;
  Json report = Json::object();
  std::string csv = "constant,index,value\n";
  auto add = [&](const char* name, int index, double v) {
    report[name][std::to_string(index)] = v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    csv += std::string(name) + "," + std::to_string(index) + "," + buf + "\n";
  };
  for (int r : parse_int_range(c.c_r_range)) add("c_r", r, constant_c_r(r));
  for (int k : parse_int_range(c.rho_k_range)) {
    char key[64];
    std::snprintf(key, sizeof key, "rho_k/%d/%.3g", k, c.tolerance);
    add("rho_k", k, cache.get(key, [&] { return constant_rho_k(k, c.tolerance); }));
  }
  for (int k : parse_int_range(c.r_k_range)) add("r_k", k, constant_r_k(k));
  cache.flush();
  emit(c, out, c.format == "csv" ? csv : dump17(report) + "\n");
  return kExitOk;
}

int cmd_experiment(const CliConfig& c, std::ostream& out) {
  require_format(c, {"json", "csv", "jsonl"});
  if (c.manifest_path.empty()) throw UsageError("experiment needs --manifest");
  Manifest m = manifest_from_json(read_json_file(c.manifest_path));
  if (c.seed) m.master_seed = *c.seed;
  if (c.mc) m.mc = true;
  if (c.samples) m.samples = *c.samples;
  const int threads = c.threads > 0 ? c.threads : default_threads();
  const ExperimentResult result = run_manifest(m, threads);
  const ManifestOutputs files = write_outputs(m, result, c.out_dir, c.format == "csv");
  if (c.format == "jsonl") {
    emit(c, out, records_jsonl(result.records));
  } else if (c.format == "csv") {
    emit(c, out, summary_csv(result.summary));
  } else {
    Json report{{"summary", to_json(result.summary)},
                {"jsonl", files.jsonl_path},
                {"jsonl_hash", files.jsonl_hash},
                {"summary_path", files.summary_path},
                {"summary_hash", files.summary_hash}};
    if (!files.csv_path.empty()) report["csv"] = files.csv_path;
    emit(c, out, dump17(report) + "\n");
  }
  return kExitOk;
}

void add_model_options(CLI::App* sub, CliConfig& c, std::string& model) {
  sub->add_option("--model", model, "bipartite_strict, cyclic_strict or bipartite_poset");
  sub->add_option("--n", c.params.n, "agents per side");
  sub->add_option("--r", c.params.r, "number of sides (cyclic)");
  sub->add_option("--k1", c.params.k1, "first-side poset dimension");
  sub->add_option("--k2", c.params.k2, "second-side poset dimension");
  sub->add_option("--trial", c.trial, "trial index within the seed");
}

void add_cap_options(CLI::App* sub, CliConfig& c) {
  sub->add_option("--max-n", c.caps.max_bipartite_n, "largest bipartite n to enumerate");
  sub->add_option("--max-log-cyclic", c.caps.max_log_cyclic, "bound on log of the cyclic matching count");
}

}  // namespace

std::string dump17(const Json& j) {
  std::string out;
  dump17_into(j, out);
  return out;
}

std::vector<int> parse_int_range(const std::string& text) {
  std::vector<int> out;
  if (text.empty()) return out;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("bad integer range '" + text + "'");
    return v;
  };
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(part));
      continue;
    }
    const int lo = to_int(part.substr(0, dots));
    const int hi = to_int(part.substr(dots + 2));
    if (hi < lo || hi - lo > 1000) throw UsageError("bad integer range '" + text + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

Json to_json(const CliConfig& c) {
  Json j{{"subcommand", c.subcommand},
         {"algorithm", c.algorithm},
         {"params", to_json(c.params)},
         {"trial", c.trial},
         {"trials", c.trials},
         {"caps", {{"max_bipartite_n", c.caps.max_bipartite_n}, {"max_log_cyclic", c.caps.max_log_cyclic}}},
         {"output", c.output},
         {"format", c.format},
         {"tolerance", c.tolerance},
         {"instance", c.instance_path},
         {"matching", c.matching},
         {"notions", c.notions},
         {"threshold", c.threshold},
         {"keep_partner", c.keep_partner},
         {"order", c.order},
         {"woman_optimal", c.woman_optimal},
         {"c_r", c.c_r_range},
         {"rho_k", c.rho_k_range},
         {"r_k", c.r_k_range},
         {"manifest", c.manifest_path},
         {"out_dir", c.out_dir},
         {"threads", c.threads},
         {"mc", c.mc}};
  // Keep every parameter, not only those its model uses, so the round trip is exact.
  j["params"]["r"] = c.params.r;
  j["params"]["k1"] = c.params.k1;
  j["params"]["k2"] = c.params.k2;
  j["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  j["samples"] = c.samples ? Json(*c.samples) : Json(nullptr);
  return j;
}

CliConfig cli_config_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("config must be an object");
  CliConfig c;
  try {
    c.subcommand = j.value("subcommand", c.subcommand);
    c.algorithm = j.value("algorithm", c.algorithm);
    const Json params = j.value("params", Json::object());
    c.params = params_from_json(parse_model(params.value("model", std::string("bipartite_strict"))), params);
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
    c.trial = j.value("trial", c.trial);
    c.trials = j.value("trials", c.trials);
    if (j.contains("caps")) {
      c.caps.max_bipartite_n = j["caps"].value("max_bipartite_n", c.caps.max_bipartite_n);
      c.caps.max_log_cyclic = j["caps"].value("max_log_cyclic", c.caps.max_log_cyclic);
    }
    c.output = j.value("output", c.output);
    c.format = j.value("format", c.format);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.instance_path = j.value("instance", c.instance_path);
    c.matching = j.value("matching", c.matching);
    c.notions = j.value("notions", c.notions);
    c.threshold = j.value("threshold", c.threshold);
    c.keep_partner = j.value("keep_partner", c.keep_partner);
    c.order = j.value("order", c.order);
    c.woman_optimal = j.value("woman_optimal", c.woman_optimal);
    c.c_r_range = j.value("c_r", c.c_r_range);
    c.rho_k_range = j.value("rho_k", c.rho_k_range);
    c.r_k_range = j.value("r_k", c.r_k_range);
    c.manifest_path = j.value("manifest", c.manifest_path);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.threads = j.value("threads", c.threads);
    c.mc = j.value("mc", c.mc);
    if (j.contains("samples") && !j["samples"].is_null()) c.samples = j["samples"].get<std::uint64_t>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad config field: ") + e.what());
  }
  return c;
}

CliConfig parse_cli(const std::vector<std::string>& args) {
  CliConfig c;
  std::string model = "bipartite_strict";
  std::string seed;
  std::string samples;

  CLI::App app{"Random stable matching laboratory", "stable-lab"};
  app.require_subcommand(1);
  auto seed_option = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "master seed, decimal or 0x-hex");
  };
  auto output_option = [&](CLI::App* sub) {
    sub->add_option("--out", c.output, "write output here instead of standard output");
    sub->add_option("--format", c.format, "json, csv or jsonl")->check(CLI::IsMember({"json", "csv", "jsonl"}));
  };
  auto notion_option = [&](CLI::App* sub) {
    sub->add_option("--notion", c.notions, "weak, strong, super (bipartite); weak, strong (cyclic)");
    sub->add_option("--threshold", c.threshold, "cyclic strong threshold m (default floor(r/2)+1)");
    sub->add_flag("--keep-partner", c.keep_partner, "cyclic strong variant: non-preferring agents keep partners");
  };

  auto* gen = app.add_subcommand("generate", "sample a random instance");
  add_model_options(gen, c, model);
  seed_option(gen);
  output_option(gen);

  auto* check = app.add_subcommand("check", "test a matching for stability");
  check->add_option("--instance", c.instance_path, "instance JSON file")->required();
  check->add_option("--matching", c.matching, "matching JSON file or inline JSON")->required();
  notion_option(check);
  seed_option(check);
  output_option(check);

  auto* count = app.add_subcommand("count", "count stable matchings by enumeration");
  count->add_option("--instance", c.instance_path, "instance JSON file (otherwise generate one)");
  add_model_options(count, c, model);
  notion_option(count);
  add_cap_options(count, c);
  seed_option(count);
  output_option(count);

  auto* algo = app.add_subcommand("algo", "run a matching algorithm");
  algo->add_option("algorithm", c.algorithm, "gale-shapley or extension")
      ->required()
      ->check(CLI::IsMember({"gale-shapley", "extension"}));
  algo->add_option("--instance", c.instance_path, "instance JSON file (otherwise generate one)");
  add_model_options(algo, c, model);
  algo->add_option("--order", c.order, "proposer order: lowest or chain");
  algo->add_flag("--woman-optimal", c.woman_optimal, "report the woman-optimal matching instead");
  seed_option(algo);
  output_option(algo);

  auto* constants = app.add_subcommand("constants", "evaluate c_r, rho_k and r_k");
  constants->add_option("--c-r", c.c_r_range, "range of r, e.g. 3..5");
  constants->add_option("--rho-k", c.rho_k_range, "range of k");
  constants->add_option("--r-k", c.r_k_range, "range of k");
  constants->add_option("--tolerance", c.tolerance, "quadrature absolute tolerance");
  seed_option(constants);
  output_option(constants);

  auto* exp = app.add_subcommand("experiment", "run a manifest");
  exp->add_option("--manifest", c.manifest_path, "manifest JSON file")->required();
  exp->add_option("--out-dir", c.out_dir, "directory for <name>.jsonl and <name>.summary.json");
  exp->add_option("--threads", c.threads, "worker threads (default: all cores)");
  exp->add_flag("--mc", c.mc, "estimate expected counts by Monte Carlo integration");
  exp->add_option("--samples", samples, "Monte Carlo samples");
  seed_option(exp);
  output_option(exp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    throw CliUsage(code == 0 ? kExitOk : kExitUsage, o.str(), er.str());
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  try {
    c.params.model = parse_model(model);
    if (!seed.empty()) c.seed = parse_seed(seed);
    if (!samples.empty()) c.samples = parse_seed(samples);
  } catch (const std::invalid_argument& e) {
    throw CliUsage(kExitUsage, "", std::string("error: ") + e.what() + "\n");
  }
  return c;
}

int execute(const CliConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.subcommand == "generate") return cmd_generate(c, out);
    if (c.subcommand == "check") return cmd_check(c, out);
    if (c.subcommand == "count") return cmd_count(c, out);
    if (c.subcommand == "algo") return cmd_algo(c, out);
    if (c.subcommand == "constants") return cmd_constants(c, out);
    if (c.subcommand == "experiment") return cmd_experiment(c, out);
    throw UsageError("unknown subcommand '" + c.subcommand + "'");
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CliConfig c;
  try {
    c = parse_cli(args);
  } catch (const CliUsage& u) {
    out << u.out;
    err << u.err;
    return u.code;
  }
  return execute(c, out, err);
}

}  // namespace stablelab
