#include "stablelab/experiments.hpp"

#include "stablelab/genprefs.hpp"
#include "stablelab/matchalg.hpp"
#include "stablelab/parallel.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>

namespace stablelab {

namespace {

double format_ready(double v) { return std::isfinite(v) ? v : 0.0; }

Json stats_json(const QuantityStats& q) {
  return Json{{"mean", q.mean}, {"std_error", q.std_error}, {"min", q.min}, {"max", q.max}, {"samples", q.samples}};
}

Json estimate_json(const EstimateWithError& e) {
  return Json{{"value", e.value}, {"std_error", e.std_error}, {"samples", e.samples}};
}

std::uint64_t factorial(int n) {
  std::uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

CyclicNotion cyclic_notion(const std::string& name, int r, const ExperimentOptions& opts) {
  if (name == "weak") return CyclicNotion::weak(r);
  if (name == "strong") {
    const int m = opts.cyclic_threshold > 0 ? opts.cyclic_threshold : majority_threshold(r);
    return CyclicNotion::strong(r, m, opts.keep_partner);
  }
  throw std::invalid_argument("cyclic notion must be weak or strong, got '" + name + "'");
}

void validate_notions(const ModelParams& p, const std::vector<std::string>& notions) {
  if (notions.empty()) throw std::invalid_argument("at least one notion is required");
  for (const auto& name : notions) {
    if (p.model == Model::CyclicStrict) {
      if (name != "weak" && name != "strong") throw std::invalid_argument("cyclic notion must be weak or strong");
    } else {
      parse_notion(name);
    }
  }
}

void check_params(const ModelParams& p, const EnumerationCap& cap) {
  if (p.n < 1) throw std::invalid_argument("n must be ≥ 1");
  if (p.model == Model::CyclicStrict) {
    if (p.r < 2) throw std::invalid_argument("r must be ≥ 2");
    check_cap(p.r, p.n, cap);
  } else {
    if (p.model == Model::BipartitePoset && (p.k1 < 1 || p.k2 < 1)) {
      throw std::invalid_argument("k1 and k2 must be ≥ 1");
    }
    check_cap(p.n, cap);
  }
}

TrialRecord evaluate(const ModelParams& p, const AnyInstance& inst, const std::vector<std::string>& notions,
                     const ExperimentOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.params = p;
  rec.instance_hash = content_hash(canonical_dump(to_json(inst)));
  if (const auto* cyc = std::get_if<CyclicStrictInstance>(&inst)) {
    for (const auto& name : notions) {
      CountOptions<CyclicMatching> co;
      co.cap = opts.cap;
      const auto res = count_stable(*cyc, cyclic_notion(name, p.r, opts), co);
      rec.counts[name] = res.count;
      rec.matchings_examined = res.examined;
    }
  } else {
    const NotionCounts c = std::visit(
        [&](const auto& i) -> NotionCounts {
          using T = std::decay_t<decltype(i)>;
          if constexpr (std::is_same_v<T, CyclicStrictInstance>) {
            return {};
          } else {
            return count_all_notions(i, opts.cap);
          }
        },
        inst);
    for (const auto& name : notions) rec.counts[name] = c[parse_notion(name)];
    rec.matchings_examined = c.examined;
  }
  if (opts.record_timing) {
    rec.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

ExperimentSummary cyclic_summary(const ModelParams& p, std::vector<TrialRecord>& records) {
  auto summary = summarize("cyclic_expectation", p, records);
  const double c_r = p.r >= 3 ? constant_c_r(p.r) : 0.0;
  const double reference = c_r * std::pow(p.n * std::log(static_cast<double>(p.n)) / 2.0, p.r - 1);
  summary.extra["c_r"] = c_r;
  summary.extra["reference"] = reference;
  const auto it = summary.quantities.find("count_weak");
  if (reference > 0 && it != summary.quantities.end()) {
    summary.extra["ratio"] = it->second.mean / reference;
  } else {
    summary.extra["ratio"] = nullptr;
  }
  return summary;
}

}  // namespace

std::string to_string(Model m) {
  switch (m) {
    case Model::BipartiteStrict: return "bipartite_strict";
    case Model::CyclicStrict: return "cyclic_strict";
    case Model::BipartitePoset: return "bipartite_poset";
  }
  return "?";
}

Model parse_model(std::string_view text) {
  if (text == "bipartite_strict") return Model::BipartiteStrict;
  if (text == "cyclic_strict") return Model::CyclicStrict;
  if (text == "bipartite_poset") return Model::BipartitePoset;
  throw std::invalid_argument("unknown model '" + std::string(text) + "'");
}

Json to_json(const ModelParams& p) {
  Json j{{"model", to_string(p.model)}, {"n", p.n}};
  if (p.model == Model::CyclicStrict) j["r"] = p.r;
  if (p.model == Model::BipartitePoset) {
    j["k1"] = p.k1;
    j["k2"] = p.k2;
  }
  return j;
}

ModelParams params_from_json(Model model, const Json& params) {
  ModelParams p;
  p.model = model;
  if (!params.is_object()) throw FormatError("params must be an object");
  p.n = params.value("n", 1);
  p.r = params.value("r", 3);
  p.k1 = params.value("k1", 1);
  p.k2 = params.value("k2", 1);
  return p;
}

AnyInstance generate(const ModelParams& p, const SeedSpec& seed) {
  switch (p.model) {
    case Model::BipartiteStrict: return gen_bipartite_strict(p.n, seed);
    case Model::CyclicStrict: return gen_cyclic_strict(p.r, p.n, seed);
    case Model::BipartitePoset: return gen_bipartite_poset(p.n, p.k1, p.k2, seed);
  }
  throw std::logic_error("unreachable");
}

Json to_json(const TrialRecord& r) {
  Json j{{"trial", r.seed.trial_index},
         {"master_seed", r.seed.master_seed},
         {"params", to_json(r.params)},
         {"counts", r.counts},
         {"matchings_examined", r.matchings_examined}};
  if (!r.instance_hash.empty()) j["instance_hash"] = r.instance_hash;
  if (r.instance_index) j["instance_index"] = *r.instance_index;
  if (r.total_proposals) j["total_proposals"] = *r.total_proposals;
  if (!r.mc_estimates.empty()) {
    j["mc"] = true;
    Json est = Json::object();
    for (const auto& [k, e] : r.mc_estimates) est[k] = estimate_json(e);
    j["mc_estimates"] = std::move(est);
  }
  if (r.wall_time_ms) j["wall_time_ms"] = *r.wall_time_ms;
  return j;
}

Json to_json(const ExperimentSummary& s) {
  Json q = Json::object();
  for (const auto& [k, v] : s.quantities) q[k] = stats_json(v);
  Json f = Json::object();
  for (const auto& [k, v] : s.solvable_fraction) f[k] = Json{{"value", v.value}, {"std_error", v.std_error}};
  return Json{{"experiment", s.experiment},
              {"params", to_json(s.params)},
              {"trials", s.trials},
              {"quantities", std::move(q)},
              {"solvable_fraction", std::move(f)},
              {"extra", s.extra}};
}

QuantityStats quantity_stats(const std::vector<double>& values) {
  QuantityStats q;
  q.samples = values.size();
  if (values.empty()) return q;
  double sum = 0;
  q.min = values.front();
  q.max = values.front();
  for (double v : values) {
    sum += v;
    q.min = std::min(q.min, v);
    q.max = std::max(q.max, v);
  }
  const double n = static_cast<double>(values.size());
  q.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - q.mean) * (v - q.mean);
    q.std_error = std::sqrt(ss / (n - 1) / n);
  }
  return q;
}

std::vector<TrialRecord> run_trials(const ModelParams& params, const std::vector<std::string>& notions,
                                    std::uint64_t trials, const SeedSpec& seed, const ExperimentOptions& opts) {
  check_params(params, opts.cap);
  validate_notions(params, notions);
  std::vector<TrialRecord> records(trials);
  parallel_for(trials, opts.threads, [&](std::uint64_t t) {
    const SeedSpec s = seed.with_trial(seed.trial_index + t);
    records[t] = evaluate(params, generate(params, s), notions, opts);
    records[t].seed = s;
  });
  return records;
}

std::vector<TrialRecord> run_exhaustive(const ModelParams& params, const std::vector<std::string>& notions,
                                        const ExperimentOptions& opts) {
  check_params(params, opts.cap);
  validate_notions(params, notions);
  if (params.model == Model::BipartitePoset) {
    throw std::invalid_argument("exhaustive sweeps need a strict model");
  }
  const int n = params.n;
  const int rows = params.model == Model::CyclicStrict ? params.r * n : 2 * n;
  std::vector<Permutation> perms;
  for_each_permutation(n, [&](const Permutation& p) { perms.push_back(p); });
  const double total_d = std::pow(static_cast<double>(perms.size()), rows);
  if (total_d > 1e8) throw CapExceeded("exhaustive sweep exceeds 1e8 instances; sample instead");
  const auto total = static_cast<std::uint64_t>(std::llround(total_d));

  std::vector<TrialRecord> records(total);
  parallel_for(total, opts.threads, [&](std::uint64_t idx) {
    // Mixed-radix digits, the last row varying fastest.
    std::vector<Permutation> chosen(rows);
    std::uint64_t rest = idx;
    for (int q = rows - 1; q >= 0; --q) {
      chosen[q] = perms[rest % perms.size()];
      rest /= perms.size();
    }
    AnyInstance inst;
    if (params.model == Model::CyclicStrict) {
      std::vector<std::vector<Permutation>> blocks(params.r);
      for (int s = 0; s < params.r; ++s) {
        blocks[s].assign(chosen.begin() + s * n, chosen.begin() + (s + 1) * n);
      }
      inst = CyclicStrictInstance(params.r, n, std::move(blocks));
    } else {
      inst = BipartiteStrictInstance(n, std::vector<Permutation>(chosen.begin(), chosen.begin() + n),
                                     std::vector<Permutation>(chosen.begin() + n, chosen.end()));
    }
    records[idx] = evaluate(params, inst, notions, opts);
    records[idx].instance_index = idx;
    records[idx].seed = SeedSpec{0, idx};
  });
  return records;
}

ExperimentSummary summarize(const std::string& experiment, const ModelParams& params,
                            const std::vector<TrialRecord>& records) {
  ExperimentSummary s;
  s.experiment = experiment;
  s.params = params;
  s.trials = records.size();
  std::map<std::string, std::vector<double>> values;
  for (const auto& r : records) {
    for (const auto& [k, v] : r.counts) values["count_" + k].push_back(static_cast<double>(v));
    if (r.total_proposals) values["total_proposals"].push_back(static_cast<double>(*r.total_proposals));
  }
  for (const auto& [k, v] : values) s.quantities[k] = quantity_stats(v);
  if (!records.empty()) {
    for (const auto& [name, _] : records.front().counts) {
      std::uint64_t solvable = 0;
      for (const auto& r : records) solvable += r.counts.at(name) >= 1;
      const double n = static_cast<double>(records.size());
      const double p = static_cast<double>(solvable) / n;
      s.solvable_fraction[name] = {p, std::sqrt(p * (1 - p) / n)};
    }
  }
  return s;
}

ExperimentResult estimate_expected_count(const ModelParams& params, const std::string& notion, std::uint64_t trials,
                                         const SeedSpec& seed, const ExperimentOptions& opts) {
  if (trials < 2) throw std::invalid_argument("trials must be ≥ 2");
  ExperimentResult out;
  out.records = run_trials(params, {notion}, trials, seed, opts);
  out.summary = summarize("expected_count", params, out.records);
  return out;
}

ExperimentResult estimate_solvable_fraction(const ModelParams& params, const std::string& notion,
                                            std::uint64_t trials, const SeedSpec& seed,
                                            const ExperimentOptions& opts) {
  auto out = estimate_expected_count(params, notion, trials, seed, opts);
  out.summary.experiment = "solvable_fraction";
  return out;
}

ExactMean exhaustive_expected_count(const ModelParams& params, const std::string& notion,
                                    const ExperimentOptions& opts) {
  const auto records = run_exhaustive(params, {notion}, opts);
  ExactMean m;
  m.denominator = records.size();
  for (const auto& r : records) m.numerator += r.counts.at(notion);
  return m;
}

ExperimentResult monotonicity_experiment(int n, int k_base, std::uint64_t trials, const SeedSpec& seed,
                                         const ExperimentOptions& opts) {
  if (k_base < 1) throw std::invalid_argument("k_base must be ≥ 1");
  const ModelParams params{Model::BipartitePoset, n, 3, k_base, k_base};
  check_params(params, opts.cap);
  ExperimentResult out;
  out.records.resize(trials);
  std::vector<char> strict_mismatch(trials, 0);
  parallel_for(trials, opts.threads, [&](std::uint64_t t) {
    const auto start = std::chrono::steady_clock::now();
    const SeedSpec s = seed.with_trial(seed.trial_index + t);
    const auto base = gen_bipartite_poset(n, k_base, k_base, s);
    const auto coupled = couple_add_dimension(base, Side::First, s);
    const auto cb = count_all_notions(base, opts.cap);
    const auto cc = count_all_notions(coupled, opts.cap);
    TrialRecord& rec = out.records[t];
    rec.params = params;
    rec.seed = s;
    rec.instance_hash = content_hash(canonical_dump(to_json(base)));
    rec.counts = {{"base_weak", cb.weak},       {"coupled_weak", cc.weak},     {"base_strong", cb.strong},
                  {"coupled_strong", cc.strong}, {"base_super", cb.super},     {"coupled_super", cc.super}};
    rec.matchings_examined = cb.examined + cc.examined;
    if (k_base == 1) {
      const auto strict = count_all_notions(sorted_lists(base), opts.cap);
      strict_mismatch[t] = strict.weak != cb.weak;
    }
    if (opts.record_timing) {
      rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  });
  std::uint64_t weak_violations = 0, super_violations = 0, mismatches = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto& c = out.records[t].counts;
    weak_violations += c.at("coupled_weak") < c.at("base_weak");
    super_violations += c.at("coupled_super") > c.at("base_super");
    mismatches += strict_mismatch[t];
  }
  out.summary = summarize("monotonicity", params, out.records);
  out.summary.extra["k_base"] = k_base;
  out.summary.extra["weak_violations"] = weak_violations;
  out.summary.extra["super_violations"] = super_violations;
  if (k_base == 1) out.summary.extra["strict_mismatches"] = mismatches;
  return out;
}

ExperimentResult cyclic_expectation_experiment(int r, int n, std::uint64_t trials, const SeedSpec& seed,
                                               const ExperimentOptions& opts) {
  const ModelParams params{Model::CyclicStrict, n, r, 1, 1};
  ExperimentResult out;
  out.records = run_trials(params, {"weak"}, trials, seed, opts);
  out.summary = cyclic_summary(params, out.records);
  return out;
}

ExperimentResult proposal_experiment(int n, std::uint64_t trials, const SeedSpec& seed,
                                     const ExperimentOptions& opts) {
  if (n < 1) throw std::invalid_argument("n must be ≥ 1");
  const ModelParams params{Model::BipartiteStrict, n, 3, 1, 1};
  ExperimentResult out;
  out.records.resize(trials);
  parallel_for(trials, opts.threads, [&](std::uint64_t t) {
    const SeedSpec s = seed.with_trial(seed.trial_index + t);
    const auto inst = gen_bipartite_strict(n, s);
    TrialRecord& rec = out.records[t];
    rec.params = params;
    rec.seed = s;
    rec.instance_hash = content_hash(canonical_dump(to_json(inst)));
    rec.total_proposals = gale_shapley(inst).total_proposals;
  });
  out.summary = summarize("proposals", params, out.records);
  double harmonic = 0;
  for (int j = 1; j <= n; ++j) harmonic += 1.0 / j;
  out.summary.extra["n_H_n"] = n * harmonic;
  out.summary.extra["upper_bound"] = (n - 1) * harmonic + 1;
  return out;
}

ExperimentResult mc_expected_count(const ModelParams& params, std::uint64_t samples, const SeedSpec& seed,
                                   const ExperimentOptions& opts) {
  if (params.model == Model::CyclicStrict) {
    throw std::invalid_argument("Monte Carlo expected counts cover bipartite models only");
  }
  const int k1 = params.model == Model::BipartitePoset ? params.k1 : 1;
  const int k2 = params.model == Model::BipartitePoset ? params.k2 : 1;
  McOptions mo;
  mo.threads = opts.threads;
  const auto est = mc_F_integrals(params.n, k1, k2, samples, seed, mo);
  const double scale = static_cast<double>(factorial(params.n));
  ExperimentResult out;
  TrialRecord rec;
  rec.params = params;
  rec.seed = seed;
  rec.mc_estimates = {{"F1", est[0]}, {"F2", est[1]}, {"F3", est[2]}};
  out.records.push_back(rec);
  out.summary.experiment = "mc_expected_count";
  out.summary.params = params;
  out.summary.trials = samples;
  const char* names[] = {"expected_count_weak", "expected_count_strong", "expected_count_super"};
  for (int d = 0; d < 3; ++d) {
    const double v = est[d].value * scale;
    out.summary.quantities[names[d]] = {v, est[d].std_error * scale, v, v, samples};
  }
  return out;
}

Manifest manifest_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("manifest must be a JSON object");
  Manifest m;
  try {
    m.experiment = j.value("experiment", m.experiment);
    m.name = j.value("name", m.experiment);
    const Model model = parse_model(j.value("model", std::string("bipartite_strict")));
    m.params = params_from_json(model, j.value("params", Json::object()));
    m.k_base = j.value("params", Json::object()).value("k_base", 1);
    if (j.contains("notions")) {
      m.notions = j["notions"].get<std::vector<std::string>>();
    } else if (j.contains("notion")) {
      m.notions = {j["notion"].get<std::string>()};
    }
    m.trials = j.value("trials", m.trials);
    m.master_seed = j.contains("master_seed") && j["master_seed"].is_string()
                        ? parse_seed(j["master_seed"].get<std::string>())
                        : j.value("master_seed", std::uint64_t{0});
    if (j.contains("caps")) {
      m.caps.max_bipartite_n = j["caps"].value("max_bipartite_n", m.caps.max_bipartite_n);
      m.caps.max_log_cyclic = j["caps"].value("max_log_cyclic", m.caps.max_log_cyclic);
    }
    m.exhaustive = j.value("exhaustive", false);
    m.mc = j.value("mc", false);
    m.samples = j.value("samples", m.samples);
    m.threshold = j.value("threshold", 0);
    m.keep_partner = j.value("keep_partner", false);
    m.record_timing = j.value("record_timing", false);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("bad manifest field: ") + e.what());
  }
  if (m.name.empty() || m.name.find('/') != std::string::npos) throw FormatError("manifest name must be a file stem");
  return m;
}

Json to_json(const Manifest& m) {
  Json params = to_json(m.params);
  params.erase("model");
  if (m.experiment == "monotonicity") params["k_base"] = m.k_base;
  return Json{{"experiment", m.experiment},
              {"name", m.name},
              {"model", to_string(m.params.model)},
              {"params", std::move(params)},
              {"notions", m.notions},
              {"trials", m.trials},
              {"master_seed", m.master_seed},
              {"caps", {{"max_bipartite_n", m.caps.max_bipartite_n}, {"max_log_cyclic", m.caps.max_log_cyclic}}},
              {"exhaustive", m.exhaustive},
              {"mc", m.mc},
              {"samples", m.samples},
              {"threshold", m.threshold},
              {"keep_partner", m.keep_partner},
              {"record_timing", m.record_timing}};
}

ExperimentResult run_manifest(const Manifest& m, int threads) {
  ExperimentOptions opts;
  opts.cap = m.caps;
  opts.threads = threads;
  opts.record_timing = m.record_timing;
  opts.cyclic_threshold = m.threshold;
  opts.keep_partner = m.keep_partner;
  const SeedSpec seed{m.master_seed, 0};

  if (m.experiment == "expected_count" || m.experiment == "solvable_fraction") {
    if (m.mc) return mc_expected_count(m.params, m.samples, seed, opts);
    ExperimentResult out;
    out.records = m.exhaustive ? run_exhaustive(m.params, m.notions, opts)
                               : run_trials(m.params, m.notions, m.trials, seed, opts);
    out.summary = summarize(m.experiment, m.params, out.records);
    return out;
  }
  if (m.experiment == "monotonicity") return monotonicity_experiment(m.params.n, m.k_base, m.trials, seed, opts);
  if (m.experiment == "cyclic_expectation") {
    ModelParams p = m.params;
    p.model = Model::CyclicStrict;
    ExperimentResult out;
    out.records = m.exhaustive ? run_exhaustive(p, {"weak"}, opts) : run_trials(p, {"weak"}, m.trials, seed, opts);
    out.summary = cyclic_summary(p, out.records);
    return out;
  }
  if (m.experiment == "proposals") return proposal_experiment(m.params.n, m.trials, seed, opts);
  throw FormatError("unknown experiment '" + m.experiment + "'");
}

std::string records_jsonl(const std::vector<TrialRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += canonical_dump(to_json(r));
    out += '\n';
  }
  return out;
}

std::string records_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out.precision(17);
  std::vector<std::string> count_keys;
  if (!records.empty()) {
    for (const auto& [k, _] : records.front().counts) count_keys.push_back(k);
  }
  out << "trial,master_seed,instance_hash,matchings_examined";
  for (const auto& k : count_keys) out << ",count_" << k;
  out << ",total_proposals\n";
  for (const auto& r : records) {
    out << r.seed.trial_index << ',' << r.seed.master_seed << ',' << r.instance_hash << ',' << r.matchings_examined;
    for (const auto& k : count_keys) out << ',' << r.counts.at(k);
    out << ',';
    if (r.total_proposals) out << *r.total_proposals;
    out << '\n';
  }
  return out.str();
}

std::string summary_csv(const ExperimentSummary& s) {
  std::ostringstream out;
  out.precision(17);
  out << "quantity,mean,std_error,min,max,samples\n";
  for (const auto& [k, q] : s.quantities) {
    out << k << ',' << format_ready(q.mean) << ',' << format_ready(q.std_error) << ',' << q.min << ',' << q.max
        << ',' << q.samples << '\n';
  }
  for (const auto& [k, f] : s.solvable_fraction) {
    out << "solvable_" << k << ',' << f.value << ',' << f.std_error << ",,," << s.trials << '\n';
  }
  return out.str();
}

ManifestOutputs write_outputs(const Manifest& m, const ExperimentResult& result, const std::string& out_dir,
                              bool csv) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  ManifestOutputs o;
  o.jsonl_path = (dir / (m.name + ".jsonl")).string();
  o.summary_path = (dir / (m.name + ".summary.json")).string();
  const std::string jsonl = records_jsonl(result.records);
  const std::string summary =
      Json{{"manifest", to_json(m)}, {"summary", to_json(result.summary)}}.dump(2) + "\n";
  write_text_file(o.jsonl_path, jsonl);
  write_text_file(o.summary_path, summary);
  o.jsonl_hash = content_hash(jsonl);
  o.summary_hash = content_hash(summary);
  if (csv) {
    o.csv_path = (dir / (m.name + ".csv")).string();
    write_text_file(o.csv_path, records_csv(result.records));
    write_text_file((dir / (m.name + ".summary.csv")).string(), summary_csv(result.summary));
  }
  return o;
}

}  // namespace stablelab
