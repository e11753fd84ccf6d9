// dyncomm: generate benchmarks, detect dynamic overlapping communities and
// evaluate covers.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dyncomm/dyncomm.hpp"

namespace fs = std::filesystem;
using namespace dyncomm;

namespace {

struct SeedOption {
  std::uint64_t value = 1;
  CLI::Option* opt = nullptr;

  void add(CLI::App* app) {
    opt = app->add_option("--seed", value, "RNG seed (falls back to $DYNCOMM_SEED, then 1)");
  }
  std::uint64_t resolve() const {
    if (opt->count() > 0) return value;
    if (const char* env = std::getenv("DYNCOMM_SEED")) {
      std::uint64_t s = 0;
      if (!detail::parse_uint(env, s)) throw Error(std::string("invalid DYNCOMM_SEED '") + env + "'");
      return s;
    }
    return value;
  }
};

/// `--config FILE` holds `key=value` lines named after the long options;
/// options given on the command line win.
void add_config_option(CLI::App* app) {
  app->add_option("--config", "key=value configuration file")->check(CLI::ExistingFile);
}

void apply_config(CLI::App* app) {
  auto* cfg = app->get_option("--config");
  if (cfg->count() == 0) return;
  const auto path = cfg->as<std::string>();
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (!item.parents.empty() && item.parents != std::vector<std::string>{app->get_name()}) continue;
    auto* opt = app->get_option_no_throw("--" + item.name);
    if (!opt || opt == cfg) throw Error("unknown key '" + item.name + "' in " + path);
    if (opt->count() > 0) continue;
    for (const auto& v : item.inputs) opt->add_result(v);
    opt->run_callback();
  }
}

void add_hyper_options(CLI::App* app, HyperParams& h) {
  app->add_option("--alpha", h.alpha, "CRP concentration")->capture_default_str();
  app->add_option("--gamma", h.gamma, "symmetric Dirichlet parameter")->capture_default_str();
  app->add_option("--theta", h.theta, "membership threshold")->capture_default_str();
  app->add_option("--samples-first", h.s_first, "sweeps on the first snapshot")->capture_default_str();
  app->add_option("--samples-later", h.s_later, "sweeps on later snapshots")->capture_default_str();
  app->add_option("--k0-divisor", h.k0_divisor, "initial communities = N / divisor")->capture_default_str();
}

/// Files are rendered in memory and written only once every step succeeded.
struct PendingFiles {
  std::vector<std::pair<fs::path, std::string>> files;

  void add(fs::path p, std::string body) { files.emplace_back(std::move(p), std::move(body)); }
  void commit() const {
    for (const auto& [p, body] : files) {
      if (p.has_parent_path()) fs::create_directories(p.parent_path());
      std::ofstream out(p, std::ios::binary);
      if (!out || !(out << body)) throw Error("cannot write " + p.string());
    }
  }
};

std::string meta_text(const std::string& command, std::uint64_t seed,
                      const std::vector<std::pair<std::string, std::string>>& extra) {
  std::ostringstream ss;
  ss << "command=" << command << "\nseed=" << seed << '\n';
  for (const auto& [k, v] : extra) ss << k << '=' << v << '\n';
  return ss.str();
}

std::string join(const std::vector<std::size_t>& xs) {
  std::string s;
  for (std::size_t x : xs) s += (s.empty() ? "" : " ") + std::to_string(x);
  return s;
}

/// Checks that every snapshot index of a cover file exists in the network.
void check_snapshots(const std::map<std::size_t, Cover>& covers, const DynamicNetwork& net,
                     const std::string& what) {
  for (const auto& [t, c] : covers)
    if (t == 0 || t > net.snapshots.size())
      throw Error("snapshot mismatch: " + what + " has snapshot " + std::to_string(t) + " but the network has " +
                  std::to_string(net.snapshots.size()));
}

std::vector<MetricRow> metric_rows(const DynamicNetwork& net, const std::map<std::size_t, Cover>& covers,
                                   const std::optional<std::map<std::size_t, Cover>>& truth) {
  std::vector<MetricRow> rows;
  static const Cover kEmpty;
  for (const auto& g : net.snapshots) {
    auto it = covers.find(g.t());
    const Cover& c = it == covers.end() ? kEmpty : it->second;
    MetricRow r;
    r.t = g.t();
    r.modularity = extended_modularity(c, g);
    r.k_detected = community_count_series({c}).front();
    if (truth) {
      auto jt = truth->find(g.t());
      r.nmi = overlapping_nmi(c, jt == truth->end() ? kEmpty : jt->second, g.nodes());
    }
    rows.push_back(r);
  }
  return rows;
}

std::string csv_text(const std::vector<MetricRow>& rows) {
  std::ostringstream ss;
  write_metric_csv(ss, rows);
  return ss.str();
}

std::string covers_text(const std::map<std::size_t, Cover>& covers) {
  std::ostringstream ss;
  write_covers(ss, covers);
  return ss.str();
}

void print_summary(const std::vector<MetricRow>& rows) {
  std::vector<double> nmi, q;
  for (const auto& r : rows) {
    if (r.nmi) nmi.push_back(*r.nmi);
    q.push_back(r.modularity);
  }
  const auto sq = summarize(q);
  std::cout << "modularity mean=" << format_weight(sq.mean) << " std=" << format_weight(sq.stddev) << '\n';
  if (!nmi.empty()) {
    const auto sn = summarize(nmi);
    std::cout << "nmi mean=" << format_weight(sn.mean) << " std=" << format_weight(sn.stddev) << '\n';
  }
}

// generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string preset;
  std::string schedule;
  std::string out = ".";
  SeedOption seed;
  GenConfig cfg;
  std::vector<CLI::Option*> cfg_opts;
};

void setup_generate(CLI::App& app, GenerateArgs& a) {
  auto* sub = app.add_subcommand("generate", "Generate a dynamic benchmark network with ground truth");
  add_config_option(sub);
  sub->add_option("--preset", a.preset, "named configuration and schedule")
      ->check(CLI::IsMember(preset_names()));
  sub->add_option("--schedule", a.schedule, "event schedule file (replaces the preset schedule)")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", a.out, "output directory")->capture_default_str();
  a.seed.add(sub);
  auto& c = a.cfg;
  a.cfg_opts = {
      sub->add_option("--n", c.n, "node count"),
      sub->add_option("--k", c.k, "initial community count"),
      sub->add_option("--overlap-nodes", c.overlap_nodes, "overlapping node count (on)"),
      sub->add_option("--memberships", c.memberships_per_overlap, "memberships per overlapping node (om)"),
      sub->add_option("--mixing", c.mixing, "fraction of edge mass outside communities"),
      sub->add_option("--avg-degree", c.avg_degree, "target mean degree"),
      sub->add_option("--max-degree", c.max_degree, "degree cap (0 disables)"),
      sub->add_option("--snapshots", c.snapshots, "snapshot count T"),
      sub->add_option("--churn", c.churn, "fraction of nodes re-assigned per step"),
      sub->add_option("--min-size", c.min_community_size, "smallest community churn may leave"),
  };
}

int run_generate(const GenerateArgs& a) {
  Preset p;
  if (!a.preset.empty()) {
    p = make_preset(a.preset);
  } else {
    p.config = desk_config();
    p.config.snapshots = 1;
  }
  // explicitly given options override the preset
  GenConfig given = a.cfg;
  const auto set = [&](std::size_t k) { return a.cfg_opts[k]->count() > 0; };
  auto& c = p.config;
  if (set(0)) c.n = given.n;
  if (set(1)) c.k = given.k;
  if (set(2)) c.overlap_nodes = given.overlap_nodes;
  if (set(3)) c.memberships_per_overlap = given.memberships_per_overlap;
  if (set(4)) c.mixing = given.mixing;
  if (set(5)) c.avg_degree = given.avg_degree;
  if (set(6)) c.max_degree = given.max_degree;
  if (set(7)) c.snapshots = given.snapshots;
  if (set(8)) c.churn = given.churn;
  if (set(9)) c.min_community_size = given.min_community_size;
  c.seed = a.seed.resolve();
  if (!a.schedule.empty()) {
    std::ifstream in(a.schedule);
    if (!in) throw Error("cannot open " + a.schedule);
    p.schedule = read_schedule(in);
  } else {
    // a shortened preset keeps only the events that fit
    std::erase_if(p.schedule.events, [&](const auto& e) { return e.t > c.snapshots; });
  }
  for (const auto& e : p.schedule.events)
    if (e.t > c.snapshots)
      throw Error("schedule event at snapshot " + std::to_string(e.t) + " beyond T=" +
                  std::to_string(c.snapshots));
  const Benchmark b = generate_dynamic(c, p.schedule);

  std::ostringstream net, sched;
  write_dynamic(net, b.network);
  write_schedule(sched, p.schedule);
  const fs::path out(a.out);
  PendingFiles files;
  files.add(out / "network.txt", net.str());
  files.add(out / "truth.txt", covers_text(b.truth.covers()));
  files.add(out / "schedule.txt", sched.str());
  const std::string k_series = join(b.truth.k_series());
  files.add(out / "meta.txt", meta_text("generate", c.seed,
                                        {{"preset", a.preset.empty() ? "none" : a.preset},
                                         {"n", std::to_string(c.n)},
                                         {"snapshots", std::to_string(c.snapshots)},
                                         {"k_series", k_series}}));
  files.commit();
  std::cout << "seed=" << c.seed << '\n' << "k_series " << k_series << '\n';
  return 0;
}

// detect -----------------------------------------------------------------

struct DetectArgs {
  std::string input;
  std::string truth;
  std::string out = ".";
  std::size_t chains = 1;
  SeedOption seed;
  HyperParams h;
};

void setup_detect(CLI::App& app, DetectArgs& a) {
  auto* sub = app.add_subcommand("detect", "Detect overlapping communities in every snapshot");
  add_config_option(sub);
  sub->add_option("--input", a.input, "dynamic network file")->required()->check(CLI::ExistingFile);
  sub->add_option("--truth", a.truth, "ground-truth cover file; fills the nmi column")
      ->check(CLI::ExistingFile);
  sub->add_option("--out", a.out, "output directory")->capture_default_str();
  sub->add_option("--chains", a.chains, "independent chains per snapshot")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  a.seed.add(sub);
  add_hyper_options(sub, a.h);
}

int run_detect(const DetectArgs& a) {
  a.h.check();
  const DynamicNetwork net = load_dynamic(a.input);
  std::optional<std::map<std::size_t, Cover>> truth;
  if (!a.truth.empty()) {
    truth = load_covers(a.truth);
    check_snapshots(*truth, net, "truth");
  }
  DetectOptions opt;
  opt.chains = a.chains;
  opt.seed = a.seed.resolve();
  const auto det = detect_dynamic(net, a.h, opt);
  std::map<std::size_t, Cover> covers;
  for (const auto& d : det) covers.emplace(d.t, d.cover);
  const auto rows = metric_rows(net, covers, truth);

  const fs::path out(a.out);
  PendingFiles files;
  files.add(out / "cover.txt", covers_text(covers));
  files.add(out / "metrics.csv", csv_text(rows));
  std::ostringstream sel;
  for (const auto& d : det) sel << (sel.tellp() > 0 ? " " : "") << d.t << ':' << d.chain << ':' << d.sweep_index;
  files.add(out / "meta.txt",
            meta_text("detect", opt.seed,
                      {{"input", a.input},
                       {"alpha", format_weight(a.h.alpha)},
                       {"gamma", format_weight(a.h.gamma)},
                       {"theta", format_weight(a.h.theta)},
                       {"samples_first", std::to_string(a.h.s_first)},
                       {"samples_later", std::to_string(a.h.s_later)},
                       {"k0_divisor", std::to_string(a.h.k0_divisor)},
                       {"chains", std::to_string(a.chains)},
                       {"selected", sel.str()}}));
  files.commit();
  std::cout << "seed=" << opt.seed << '\n';
  std::cout << "k_detected " << join(community_count_series([&] {
    std::vector<Cover> cs;
    for (const auto& d : det) cs.push_back(d.cover);
    return cs;
  }())) << '\n';
  print_summary(rows);
  return 0;
}

// evaluate ---------------------------------------------------------------

struct EvaluateArgs {
  std::vector<std::string> covers;
  std::string truth;
  std::string input;
  std::string out;
  bool aggregate = false;
};

void setup_evaluate(CLI::App& app, EvaluateArgs& a) {
  auto* sub = app.add_subcommand("evaluate", "Score cover files against a network and ground truth");
  add_config_option(sub);
  sub->add_option("--cover", a.covers, "cover file (repeat with --aggregate)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--truth", a.truth, "ground-truth cover file")->check(CLI::ExistingFile);
  sub->add_option("--input", a.input, "dynamic network file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", a.out, "metric CSV path (default: standard output)");
  sub->add_flag("--aggregate", a.aggregate, "average the metrics over several cover files");
}

int run_evaluate(const EvaluateArgs& a) {
  if (a.covers.size() > 1 && !a.aggregate) throw Error("several --cover files need --aggregate");
  const DynamicNetwork net = load_dynamic(a.input);
  std::optional<std::map<std::size_t, Cover>> truth;
  if (!a.truth.empty()) {
    truth = load_covers(a.truth);
    check_snapshots(*truth, net, "truth");
  }
  std::vector<std::vector<MetricRow>> runs;
  for (const auto& path : a.covers) {
    const auto covers = load_covers(path);
    check_snapshots(covers, net, path);
    runs.push_back(metric_rows(net, covers, truth));
  }

  if (!a.aggregate) {
    const std::string csv = csv_text(runs.front());
    if (a.out.empty()) {
      std::cout << csv;
    } else {
      PendingFiles files;
      files.add(a.out, csv);
      files.commit();
      print_summary(runs.front());
    }
    return 0;
  }

  // per snapshot: mean and std over runs; then the spread of per-run means
  std::ostringstream ss;
  ss << "t,nmi_mean,nmi_std,modularity_mean,modularity_std,k_mean\n";
  for (std::size_t s = 0; s < net.snapshots.size(); ++s) {
    std::vector<double> nmi, q, k;
    for (const auto& rows : runs) {
      if (rows[s].nmi) nmi.push_back(*rows[s].nmi);
      q.push_back(rows[s].modularity);
      k.push_back(static_cast<double>(rows[s].k_detected));
    }
    const auto sn = summarize(nmi), sq = summarize(q), sk = summarize(k);
    ss << net.snapshots[s].t() << ',';
    if (!nmi.empty()) ss << format_weight(sn.mean) << ',' << format_weight(sn.stddev);
    else ss << ',';
    ss << ',' << format_weight(sq.mean) << ',' << format_weight(sq.stddev) << ',' << format_weight(sk.mean)
       << '\n';
  }
  if (a.out.empty()) {
    std::cout << ss.str();
  } else {
    PendingFiles files;
    files.add(a.out, ss.str());
    files.commit();
  }
  std::vector<double> run_nmi, run_q;
  for (const auto& rows : runs) {
    std::vector<double> nmi, q;
    for (const auto& r : rows) {
      if (r.nmi) nmi.push_back(*r.nmi);
      q.push_back(r.modularity);
    }
    if (!nmi.empty()) run_nmi.push_back(summarize(nmi).mean);
    run_q.push_back(summarize(q).mean);
  }
  std::ostream& info = a.out.empty() ? std::cerr : std::cout;
  const auto sq = summarize(run_q);
  info << "runs=" << runs.size() << '\n'
       << "modularity mean=" << format_weight(sq.mean) << " std=" << format_weight(sq.stddev) << '\n';
  if (!run_nmi.empty()) {
    const auto sn = summarize(run_nmi);
    info << "nmi mean=" << format_weight(sn.mean) << " std=" << format_weight(sn.stddev) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian overlapping community detection in dynamic networks"};
  app.require_subcommand(1);
  GenerateArgs gen;
  DetectArgs det;
  EvaluateArgs eval;
  setup_generate(app, gen);
  setup_detect(app, det);
  setup_evaluate(app, eval);
  CLI11_PARSE(app, argc, argv);
  try {
    apply_config(app.get_subcommands().front());
    if (app.got_subcommand("generate")) return run_generate(gen);
    if (app.got_subcommand("detect")) return run_detect(det);
    return run_evaluate(eval);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
