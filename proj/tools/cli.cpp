#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <boost/math/distributions/binomial.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "sketchlb/sketchlb.hpp"

namespace sketchbench {

using nlohmann::json;
using namespace sketchlb;

std::string blob_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) throw Error("sha1 failed");
  std::ostringstream hex;
  for (unsigned i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

namespace {

// Usage problems detected after parsing (bad values, unreadable files).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Report {
  std::string command;
  json parameters = json::object();
  std::uint64_t seed = 0;
  std::map<std::string, std::pair<std::size_t, std::size_t>> outcomes;  // pass, fail
  std::vector<std::string> artifacts;
  json inputs = json::object();
  json result = json::object();
  std::string note;  // one human-readable line for the terminal

  void check(const std::string& invariant, bool ok, std::size_t times = 1) {
    auto& slot = outcomes[invariant];
    (ok ? slot.first : slot.second) += times;
  }
  void declare(const std::string& invariant) { outcomes.try_emplace(invariant, 0, 0); }
  bool ok() const {
    for (const auto& [name, counts] : outcomes)
      if (counts.second != 0) return false;
    return true;
  }

  json to_json(double wall) const {
    json out = json::object();
    for (const auto& [name, counts] : outcomes) out[name] = {{"pass", counts.first}, {"fail", counts.second}};
    return {{"command", command}, {"parameters", parameters}, {"seed", seed},        {"inputs", inputs},
            {"outcomes", out},    {"artifacts", artifacts},   {"result", result},    {"ok", ok()},
            {"wall_time_s", wall}};
  }
};

struct Common {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string read_input(Report& report, const std::string& path) {
  std::string text = read_file(path);
  report.inputs[path] = blob_hash(text);
  return text;
}

void write_artifact(Report& report, const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << content;
  report.artifacts.push_back(path);
}

std::string sibling(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(seed ^ splitmix64(index + 1)); }

// Subcommand parameters. One struct per command keeps the option bindings
// next to their defaults.

struct LbArgs {
  int n = 49, k = 3;
  double gamma = 0.5;
  std::string graph, spec, sweep = "random";
  std::size_t count = 500;
};

struct KconnArgs {
  std::string graph, expect;
  int k = 2;
};

struct AgmArgs {
  int n = 64, k = 3;
  double delta = 0.05, min_agreement = 0.95;
  std::size_t count = 200;
  std::string graph;
};

struct FamilyArgs {
  int n = 256, d = 3, k = 2;
  double epsilon = 0.8;
  std::size_t target = 40, max_attempts = 100000, trials = 32;
  std::string family, family_out, context_out, protocol = "window";
  unsigned bits = 2;
};

struct OverlapArgs {
  int m = 9, s = 4;
  std::string protocol = "appb", x, y, instance, instances_out;
};

struct ReduceArgs {
  int m = 6, s = 3, k = 2;
  std::string protocol = "window", x, y, instance, context, context_out, family_mode = "auto";
  unsigned bits = 2;
  std::size_t trials = 32, target = 40;
};

// gen-lb / verify-lb

void cmd_gen_lb(const LbArgs& a, const Common& c, Report& r) {
  std::mt19937_64 rng(c.seed);
  auto spec = random_spec(a.n, a.k, rng);
  spec.gamma = a.gamma;
  validate(spec);
  const auto built = build_lb_graph(spec);
  const auto lemma = check_lemma_lb(spec);
  r.check("lemma", lemma.holds);
  r.result = {{"condition", to_string(lemma.condition)}, {"min_cut", lemma.cut.value}, {"sigma", spec.sigma},
              {"edges", built.graph.edges().size()}};
  std::string graph_path = a.graph, spec_path = a.spec;
  if (!c.out.empty()) {
    if (graph_path.empty()) graph_path = sibling(c.out, ".graph");
    if (spec_path.empty()) spec_path = sibling(c.out, ".spec.json");
  }
  if (!graph_path.empty()) write_artifact(r, graph_path, graph_to_string(built.graph));
  if (!spec_path.empty()) write_artifact(r, spec_path, spec_to_json(spec).dump(2) + "\n");
  if (graph_path.empty() && spec_path.empty()) r.result["spec"] = spec_to_json(spec);
}

void cmd_verify_lb(const LbArgs& a, const Common& c, Report& r) {
  std::vector<LBGraphSpec> specs;
  const auto collect = [&](const LBGraphSpec& s) { specs.push_back(s); };
  if (a.sweep == "exhaustive") {
    for_each_exhaustive_spec(a.n, a.k, c.seed, collect);
  } else if (a.sweep == "random") {
    for_each_random_spec(a.n, a.k, a.count, c.seed, collect);
  } else {
    throw UsageError("--sweep must be exhaustive or random");
  }
  std::vector<LemmaCheck> checks(specs.size());
  parallel_for(specs.size(), c.threads, [&](std::size_t i) { checks[i] = check_lemma_lb(specs[i]); });
  std::size_t c1 = 0;
  json first_failure;
  r.declare("lemma");
  for (std::size_t i = 0; i < checks.size(); ++i) {
    r.check("lemma", checks[i].holds);
    c1 += checks[i].condition == Condition::C1;
    if (!checks[i].holds && first_failure.is_null()) first_failure = spec_to_json(specs[i]);
  }
  r.result = {{"cases", specs.size()}, {"c1", c1}, {"c0", specs.size() - c1}};
  if (!first_failure.is_null()) r.result["first_failure"] = first_failure;
}

// kconn

void cmd_kconn(const KconnArgs& a, const Common&, Report& r) {
  const MultiGraph g = graph_from_string(read_input(r, a.graph));
  if (g.node_count() < 2) throw UsageError("graph needs at least 2 nodes");
  const auto cut = global_min_cut(g);
  const bool connected = cut.value >= a.k;
  r.result = {{"nodes", g.node_count()},
              {"min_cut", cut.value},
              {"side", cut.side},
              {"decision", to_string(connected ? Decision::Connected : Decision::NotConnected)}};
  if (!a.expect.empty()) {
    if (a.expect != "connected" && a.expect != "not-connected")
      throw UsageError("--expect must be connected or not-connected");
    r.check("expectation", (a.expect == "connected") == connected);
  }
}

// agm-run

MultiGraph random_workload_graph(int max_n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(std::min(8, max_n), max_n);
  std::uniform_real_distribution<double> density(0.05, 0.35);
  const int n = size(rng);
  const double p = density(rng);
  std::bernoulli_distribution present(p), doubled(0.25);
  MultiGraph g(n);
  for (NodeId u = 1; u <= n; ++u)
    for (NodeId v = u + 1; v <= n; ++v)
      if (present(rng)) g.add_edge(u, v, doubled(rng) ? 2 : 1);
  return g;
}

struct AgmTrial {
  int n = 0, k = 0;
  bool truth = false, said = false, within_budget = false;
  std::size_t max_bits = 0;
};

void cmd_agm_run(const AgmArgs& a, const Common& c, Report& r) {
  if (a.count == 0 && a.graph.empty()) throw UsageError("--count must be positive");
  std::optional<MultiGraph> fixed;
  if (!a.graph.empty()) fixed = graph_from_string(read_input(r, a.graph));
  const std::size_t trials = fixed ? 1 : a.count;
  std::vector<AgmTrial> out(trials);
  parallel_for(trials, fixed ? 1U : c.threads, [&](std::size_t t) {
    std::mt19937_64 rng(trial_seed(c.seed, t));
    const MultiGraph g = fixed ? *fixed : random_workload_graph(a.n, rng);
    const int k = fixed ? a.k : std::uniform_int_distribution<int>(1, a.k)(rng);
    AgmSketchProtocol agm({g.node_count(), k}, a.delta);
    const auto transcript = execute(agm, g, no_advice(g.node_count()), SharedRandomness::seeded(rng()));
    AgmTrial& tr = out[t];
    tr.n = g.node_count();
    tr.k = k;
    tr.truth = g.node_count() < 2 || global_min_cut(g).value >= k;
    tr.said = transcript.decision == Decision::Connected;
    for (const auto& m : transcript.messages) tr.max_bits = std::max(tr.max_bits, m.bits.size());
    tr.within_budget = static_cast<double>(tr.max_bits) <= agm_budget_bound(tr.n, k, a.delta);
  });
  std::size_t agree = 0, connected = 0;
  r.declare("budget");
  r.declare("one-sided");
  for (const auto& tr : out) {
    agree += tr.truth == tr.said;
    connected += tr.truth;
    r.check("budget", tr.within_budget);
    r.check("one-sided", tr.truth || !tr.said);
  }
  const double rate = static_cast<double>(agree) / static_cast<double>(trials);
  using boost::math::binomial_distribution;
  const double lo = binomial_distribution<>::find_lower_bound_on_p(static_cast<double>(trials), static_cast<double>(agree), 0.005);
  const double hi = binomial_distribution<>::find_upper_bound_on_p(static_cast<double>(trials), static_cast<double>(agree), 0.005);
  r.check("agreement", rate >= a.min_agreement);
  r.result = {{"trials", trials},
              {"agreements", agree},
              {"agreement_rate", rate},
              {"ci99", {lo, hi}},
              {"oracle_connected", connected}};
}

// sample-family / choose-partition

IdSet ground_of(int n) { return Layout::of(n).w_ids(); }

void cmd_sample_family(const FamilyArgs& a, const Common& c, Report& r) {
  try {
    const auto f = sample_family(ground_of(a.n), a.d, a.epsilon, a.target, c.seed, a.max_attempts);
    r.check("target", true);
    r.check("pairwise-overlap", max_pairwise_overlap(f.members) <= f.overlap_bound());
    r.result = {{"size", f.size()}, {"overlap_bound", f.overlap_bound()}, {"max_overlap", max_pairwise_overlap(f.members)}};
    if (!a.family_out.empty())
      write_artifact(r, a.family_out, family_to_json(f).dump(2) + "\n");
    else
      r.result["family"] = family_to_json(f);
  } catch (const FamilyTooSparse& e) {
    r.check("target", false);
    r.result = {{"best", e.best()}, {"target", a.target}};
  }
}

void cmd_choose_partition(const FamilyArgs& a, const Common& c, Report& r) {
  const auto protocol = make_sketch_protocol(a.protocol, {a.n, a.k}, {.window_bits = a.bits});
  const SetFamily family = a.family.empty()
                               ? sample_family(ground_of(a.n), 2 * a.k - 1, a.epsilon, a.target, c.seed, a.max_attempts)
                               : family_from_json(json::parse(read_input(r, a.family)));
  r.check("pairwise-overlap", family_is_valid(family));
  PartitionContext ctx;
  try {
    ctx = choose_partition(*protocol, family, a.k, a.trials, c.seed, c.threads);
  } catch (const NoGoodPartition&) {
    r.result = {{"good", 0}, {"family_size", family.size()}};
    return;
  }
  r.declare("record-reverify");
  for (const auto& [node, rec] : ctx.good)
    r.check("record-reverify", record_violations(*protocol, rec, ctx.a, ctx.b, a.n, a.k).empty());
  // Pigeonhole floor on every V-node under the chosen partition.
  const int v_count = Layout::of(a.n).v_count;
  std::vector<std::size_t> common(static_cast<std::size_t>(v_count));
  parallel_for(common.size(), c.threads, [&](std::size_t i) {
    const auto parts = message_partitions(*protocol, static_cast<NodeId>(i + 1), family, ctx.a, ctx.b, a.n, a.k);
    common[i] = common_block(parts, family, ctx.a, ctx.b).members.size();
  });
  for (auto size : common) r.check("pigeonhole", pigeonhole_floor_holds(size, family.size(), protocol->max_bits()));
  r.result = {{"good", ctx.good.size()},
              {"v_nodes", v_count},
              {"trial", ctx.trial},
              {"good_per_trial", ctx.good_per_trial},
              {"family_size", family.size()}};
  if (!a.context_out.empty())
    write_artifact(r, a.context_out, context_to_json(ctx).dump(2) + "\n");
}

// overlap-*

bool claimed_correct(const std::string& protocol) { return protocol == "appb" || protocol == "full"; }

OverlapInstance instance_from_args(const OverlapArgs& a, Report& r) {
  if (!a.instance.empty()) return instance_from_json(json::parse(read_input(r, a.instance)));
  if (a.x.empty() || a.y.empty()) throw UsageError("give --x and --y, or --instance");
  return make_instance(TernaryVector::from_string(a.x), TernaryVector::from_string(a.y), a.m, a.s);
}

void cmd_overlap_solve(const OverlapArgs& a, const Common&, Report& r) {
  const auto inst = instance_from_args(a, r);
  const auto p = make_overlap_protocol(a.protocol, inst.m, inst.s);
  const BitString ma = p->alice_encode(inst.x), mb = p->bob_encode(inst.y);
  const Answer out = p->charlie_decode(inst.x.support(), inst.y.support(), ma, mb);
  if (claimed_correct(a.protocol)) r.check("correct", out == answer(inst));
  r.result = {{"instance", instance_to_json(inst)}, {"sigma", inst.sigma},        {"truth", to_string(answer(inst))},
              {"output", to_string(out)},           {"alice", ma.to_string()},   {"bob", mb.to_string()}};
}

void cmd_overlap_enum(const OverlapArgs& a, const Common&, Report& r) {
  const auto p = make_overlap_protocol(a.protocol, a.m, a.s);
  const auto sweep = sweep_protocol(*p);
  if (claimed_correct(a.protocol)) r.check("correct", sweep.wrong == 0);
  if (a.protocol == "appb")
    r.check("message-length", sweep.min_message_bits == static_cast<std::size_t>(a.s - 1) &&
                                  sweep.max_message_bits == static_cast<std::size_t>(a.s - 1));
  r.result = {{"instances", sweep.instances},
              {"wrong", sweep.wrong},
              {"min_message_bits", sweep.min_message_bits},
              {"max_message_bits", sweep.max_message_bits}};
  if (!a.instances_out.empty()) {
    std::ostringstream lines;
    for_each_valid_instance(a.m, a.s, [&](const OverlapInstance& inst) { lines << instance_to_json(inst).dump() << '\n'; });
    write_artifact(r, a.instances_out, lines.str());
  }
}

void cmd_overlap_attack(const OverlapArgs& a, const Common& c, Report& r) {
  const auto p = make_overlap_protocol(a.protocol, a.m, a.s);
  const auto found = attack(*p, c.threads);  // throws if a candidate fails to replay
  r.check("replay", true);
  if (claimed_correct(a.protocol)) r.check("no-counterexample", !found);
  if (found) {
    r.result = {{"counterexample", counterexample_to_json(*found)}};
    r.note = "counterexample at sigma = " + std::to_string(found->sigma);
  } else {
    r.result = {{"counterexample", nullptr}};
    r.note = "no counterexample";
  }
}

// reduce / verify-fidelity

FamilyMode family_mode_of(const std::string& s) {
  if (s == "auto") return FamilyMode::Auto;
  if (s == "sampled") return FamilyMode::Sampled;
  if (s == "complete") return FamilyMode::Complete;
  throw UsageError("--family-mode must be auto, sampled or complete");
}

struct ReductionSetup {
  std::unique_ptr<SketchProtocol> protocol;
  ReductionContext ctx;
  std::vector<OverlapInstance> instances;
};

ReductionSetup setup_reduction(const ReduceArgs& a, const Common& c, Report& r) {
  ReductionSetup out;
  const int n = reduction_n(a.m);
  out.protocol = make_sketch_protocol(a.protocol, {n, a.k}, {.window_bits = a.bits});
  if (!a.context.empty()) {
    out.ctx = reduction_from_json(json::parse(read_input(r, a.context)));
    if (out.ctx.m != a.m || out.ctx.s != a.s || out.ctx.k != a.k) throw UsageError("context does not match --m/--s/--k");
  } else {
    ReductionOptions options;
    options.family_mode = family_mode_of(a.family_mode);
    options.family_target = a.target;
    options.trials = a.trials;
    options.threads = c.threads;
    out.ctx = build_context(*out.protocol, a.m, a.s, a.k, c.seed, options);
  }
  if (!a.context_out.empty()) write_artifact(r, a.context_out, reduction_to_json(out.ctx).dump(2) + "\n");
  if (!a.instance.empty()) {
    out.instances.push_back(instance_from_json(json::parse(read_input(r, a.instance))));
  } else if (!a.x.empty() || !a.y.empty()) {
    out.instances.push_back(make_instance(TernaryVector::from_string(a.x), TernaryVector::from_string(a.y), a.m, a.s));
  } else {
    for_each_valid_instance(a.m, a.s, [&](const OverlapInstance& inst) { out.instances.push_back(inst); });
  }
  for (const auto& inst : out.instances)
    if (inst.m != a.m || inst.s != a.s) throw UsageError("instance does not match --m/--s");
  r.result["n"] = n;
  r.result["good_nodes"] = out.ctx.good_nodes;
  r.result["family_source"] = out.ctx.family_source;
  r.result["instances"] = out.instances.size();
  return out;
}

void cmd_reduce(const ReduceArgs& a, const Common& c, Report& r) {
  const auto setup = setup_reduction(a, c, r);
  struct Row {
    bool correct = false;
    CommunicationCheck comm;
    Answer output = Answer::No;
  };
  std::vector<Row> rows(setup.instances.size());
  parallel_for(rows.size(), c.threads, [&](std::size_t i) {
    const auto run = simulate(setup.instances[i], setup.ctx, *setup.protocol);
    rows[i] = {run.output == answer(setup.instances[i]), communication_check(run, setup.ctx, *setup.protocol), run.output};
  });
  std::size_t wrong = 0;
  r.declare("communication");
  for (const auto& row : rows) {
    wrong += !row.correct;
    r.check("communication", row.comm.exact());
  }
  r.result["wrong"] = wrong;
  r.result["alice_bob_bits"] = rows.empty() ? 0 : rows.front().comm.measured;
  r.result["sqrt_n_times_L"] = rows.empty() ? 0 : rows.front().comm.ceiling;
  if (rows.size() == 1) r.result["output"] = to_string(rows.front().output);
}

void cmd_verify_fidelity(const ReduceArgs& a, const Common& c, Report& r) {
  const auto setup = setup_reduction(a, c, r);
  struct Row {
    bool identical = false, semantic = false;
    std::vector<NodeId> differing;
  };
  std::vector<Row> rows(setup.instances.size());
  parallel_for(rows.size(), c.threads, [&](std::size_t i) {
    const auto& inst = setup.instances[i];
    const auto report = verify_fidelity(inst, setup.ctx, *setup.protocol);
    const auto g = build_compatible_graph(inst, setup.ctx);
    rows[i] = {report.identical, (global_min_cut(g.graph).value >= a.k) == (answer(inst) == Answer::Yes),
               report.differing};
  });
  r.declare("fidelity");
  r.declare("semantic");
  json first = nullptr;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    r.check("fidelity", rows[i].identical);
    r.check("semantic", rows[i].semantic);
    if (!rows[i].identical && first.is_null())
      first = {{"instance", instance_to_json(setup.instances[i])}, {"differing", rows[i].differing}};
  }
  if (!first.is_null()) r.result["first_mismatch"] = first;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "seed (default: $SKETCHBENCH_SEED or 1)");
  sub->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1U, 256U));
  sub->add_option("--out", c.out, "report JSON path");
}

json parameters_of(const CLI::App* sub) {
  json p = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "out") continue;
    const auto given = opt->results();
    if (!given.empty())
      p[name] = given.back();
    else if (!opt->get_default_str().empty())
      p[name] = opt->get_default_str();
  }
  return p;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sketching lower-bound experiment driver", "sketchbench"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  Common common;
  if (const char* env = std::getenv("SKETCHBENCH_SEED")) {
    try {
      std::size_t used = 0;
      common.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      err << "error: SKETCHBENCH_SEED is not an unsigned integer\n";
      return 2;
    }
  }

  LbArgs lb;
  KconnArgs kc;
  AgmArgs agm;
  FamilyArgs fam;
  OverlapArgs ov;
  ReduceArgs red;

  auto* gen = app.add_subcommand("gen-lb", "sample one lower-bound graph, write graph and spec files");
  gen->add_option("--n", lb.n)->required();
  gen->add_option("--k", lb.k)->required();
  gen->add_option("--gamma", lb.gamma);
  gen->add_option("--graph", lb.graph, "graph file path");
  gen->add_option("--spec", lb.spec, "spec JSON path");

  auto* ver = app.add_subcommand("verify-lb", "min-cut oracle against the C0/C1 condition");
  ver->add_option("--n", lb.n)->required();
  ver->add_option("--k", lb.k)->required();
  ver->add_option("--sweep", lb.sweep)->check(CLI::IsMember({"exhaustive", "random"}));
  ver->add_option("--count", lb.count, "random specs");

  auto* kconn = app.add_subcommand("kconn", "k-edge-connectivity of a graph file");
  kconn->add_option("--graph", kc.graph)->required();
  kconn->add_option("--k", kc.k)->required();
  kconn->add_option("--expect", kc.expect, "connected | not-connected");

  auto* agm_run = app.add_subcommand("agm-run", "AGM sketches against the oracle");
  agm_run->add_option("--n", agm.n, "largest graph size")->check(CLI::Range(2, 4096));
  agm_run->add_option("--k", agm.k, "largest k")->check(CLI::Range(1, 64));
  agm_run->add_option("--delta", agm.delta);
  agm_run->add_option("--count", agm.count);
  agm_run->add_option("--min-agreement", agm.min_agreement);
  agm_run->add_option("--graph", agm.graph, "run on this graph instead");

  auto* sample = app.add_subcommand("sample-family", "sample a bounded-overlap set family over W");
  sample->add_option("--n", fam.n)->required();
  sample->add_option("--d", fam.d)->required();
  sample->add_option("--epsilon", fam.epsilon);
  sample->add_option("--target", fam.target);
  sample->add_option("--max-attempts", fam.max_attempts);
  sample->add_option("--family-out", fam.family_out);

  auto* choose = app.add_subcommand("choose-partition", "pick A/B and separated pairs for a protocol");
  choose->add_option("--n", fam.n)->required();
  choose->add_option("--k", fam.k)->required();
  choose->add_option("--protocol", fam.protocol)->check(CLI::IsMember({"full", "constant", "window", "parity"}));
  choose->add_option("--bits", fam.bits, "window width");
  choose->add_option("--epsilon", fam.epsilon);
  choose->add_option("--target", fam.target);
  choose->add_option("--max-attempts", fam.max_attempts);
  choose->add_option("--trials", fam.trials);
  choose->add_option("--family", fam.family, "family JSON to use instead of sampling");
  choose->add_option("--context-out", fam.context_out);

  auto add_overlap = [&](CLI::App* sub, bool instance) {
    sub->add_option("--m", ov.m);
    sub->add_option("--s", ov.s);
    sub->add_option("--protocol", ov.protocol)->check(CLI::IsMember({"appb", "truncate", "full"}));
    if (instance) {
      sub->add_option("--x", ov.x, "Alice's vector, e.g. 01**1***");
      sub->add_option("--y", ov.y);
      sub->add_option("--instance", ov.instance, "instance JSON");
    }
  };
  auto* solve = app.add_subcommand("overlap-solve", "run a one-way protocol on one instance");
  add_overlap(solve, true);
  auto* enumerate = app.add_subcommand("overlap-enum", "run a protocol on every valid instance");
  add_overlap(enumerate, false);
  enumerate->add_option("--instances-out", ov.instances_out, "write all instances as JSON lines");
  auto* attack_cmd = app.add_subcommand("overlap-attack", "flipped-index attack");
  add_overlap(attack_cmd, false);

  auto add_reduce = [&](CLI::App* sub) {
    sub->add_option("--m", red.m);
    sub->add_option("--s", red.s);
    sub->add_option("--k", red.k);
    sub->add_option("--protocol", red.protocol)->check(CLI::IsMember({"full", "constant", "window", "parity"}));
    sub->add_option("--bits", red.bits, "window width");
    sub->add_option("--trials", red.trials);
    sub->add_option("--target", red.target, "family size");
    sub->add_option("--family-mode", red.family_mode)->check(CLI::IsMember({"auto", "sampled", "complete"}));
    sub->add_option("--context", red.context, "reduction context JSON to reuse");
    sub->add_option("--context-out", red.context_out);
    sub->add_option("--x", red.x);
    sub->add_option("--y", red.y);
    sub->add_option("--instance", red.instance, "single instance JSON (default: all valid instances)");
  };
  auto* reduce = app.add_subcommand("reduce", "three-party simulation of a sketching protocol");
  add_reduce(reduce);
  auto* fidelity = app.add_subcommand("verify-fidelity", "simulated messages against direct execution");
  add_reduce(fidelity);

  for (auto* sub : app.get_subcommands({})) add_common(sub, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  Report report;
  report.command = sub->get_name();
  report.seed = common.seed;
  report.parameters = parameters_of(sub);
  const auto started = std::chrono::steady_clock::now();
  try {
    const std::string& name = report.command;
    if (name == "gen-lb") cmd_gen_lb(lb, common, report);
    else if (name == "verify-lb") cmd_verify_lb(lb, common, report);
    else if (name == "kconn") cmd_kconn(kc, common, report);
    else if (name == "agm-run") cmd_agm_run(agm, common, report);
    else if (name == "sample-family") cmd_sample_family(fam, common, report);
    else if (name == "choose-partition") cmd_choose_partition(fam, common, report);
    else if (name == "overlap-solve") cmd_overlap_solve(ov, common, report);
    else if (name == "overlap-enum") cmd_overlap_enum(ov, common, report);
    else if (name == "overlap-attack") cmd_overlap_attack(ov, common, report);
    else if (name == "reduce") cmd_reduce(red, common, report);
    else if (name == "verify-fidelity") cmd_verify_fidelity(red, common, report);
  } catch (const NotEnoughGoodNodes& e) {
    // A legitimate negative outcome of the setup, not a usage problem.
    report.check("setup", false);
    report.result["error"] = e.what();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const json doc = report.to_json(wall);
  if (common.out.empty()) {
    out << doc.dump(2) << "\n";
  } else {
    std::ofstream file(common.out);
    if (!file) {
      err << "usage error: cannot write " << common.out << "\n";
      return 2;
    }
    file << doc.dump(2) << "\n";
  }
  std::ostream& summary = common.out.empty() ? err : out;
  if (!report.note.empty()) summary << report.note << "\n";
  for (const auto& [name, counts] : report.outcomes)
    summary << (counts.second == 0 ? "ok   " : "FAIL ") << name << ": " << counts.first << " passed, " << counts.second
        << " failed\n";
  return report.ok() ? 0 : 1;
}

}  // namespace sketchbench
