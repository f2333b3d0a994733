// Command-line front end. Talks to the library only through palinscan.h.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "palinscan/palinscan.h"

namespace {

using json = nlohmann::ordered_json;

// Carries a status out of the command handlers to main.
struct Failure {
  ps_status status;
  std::string message;
};

void check(ps_status s) {
  if (s != PS_OK) throw Failure{s, ps_last_error()};
}

[[noreturn]] void usage_error(const std::string& message) {
  throw Failure{PS_ERR_INVALID_ARGUMENT, message};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using SequencePtr = std::unique_ptr<ps_sequence, Deleter<ps_sequence, ps_sequence_free>>;
using FastaPtr = std::unique_ptr<ps_fasta, Deleter<ps_fasta, ps_fasta_free>>;
using EventsPtr = std::unique_ptr<ps_events, Deleter<ps_events, ps_events_free>>;
using ScoreModelPtr = std::unique_ptr<ps_score_model, Deleter<ps_score_model, ps_score_model_free>>;
using ScanPtr = std::unique_ptr<ps_scan_result, Deleter<ps_scan_result, ps_scan_result_free>>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  ps_string_free(s);
  return out;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

struct Options {
  std::vector<std::string> inputs;
  std::vector<std::string> accessions;
  std::string endpoint;
  std::string cache_dir;
  std::string model_file;
  int L = 6;
  std::size_t w = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 20090601;
  std::size_t replicates = 500;
  std::vector<std::string> multipliers;
  std::string score = "pls";
  bool json = false;
  std::optional<double> nu_fixed;
  std::size_t nu_walks = 100000;
  bool compat_paper = false;
  std::string tilt = "per-bp";
  std::string v_definition = "row";
  std::string rate = "markov";
  double pseudo_count = 0.0;
  unsigned threads = 0;
  std::string series_file;
  double t_min = -1.0;
  std::optional<double> t_max;
  std::size_t points = 11;
  bool iid = false;
  std::size_t length = 135301;
  double lambda0_target = 0.00098;
  std::vector<double> thresholds;
  bool per_replicate = false;
  bool verbose = false;
};

struct NamedSequence {
  std::string label;
  SequencePtr seq;
};

std::vector<NamedSequence> load_inputs(const Options& o) {
  std::vector<NamedSequence> out;
  auto take_all = [&](ps_fasta* raw) {
    FastaPtr fasta(raw);
    for (std::size_t i = 0; i < ps_fasta_count(fasta.get()); ++i) {
      ps_sequence* s = nullptr;
      check(ps_fasta_get(fasta.get(), i, &s));
      SequencePtr seq(s);
      char* id = nullptr;
      check(ps_sequence_id(seq.get(), &id));
      out.push_back({take_string(id), std::move(seq)});
    }
  };
  for (const auto& path : o.inputs) {
    ps_fasta* f = nullptr;
    check(ps_fasta_read_file(path.c_str(), &f));
    take_all(f);
  }
  for (const auto& acc : o.accessions) {
    ps_fasta* f = nullptr;
    check(ps_fetch(acc.c_str(), o.endpoint.empty() ? nullptr : o.endpoint.c_str(),
                   o.cache_dir.empty() ? nullptr : o.cache_dir.c_str(), &f));
    take_all(f);
  }
  return out;
}

std::optional<ps_model> load_model_file(const Options& o) {
  if (o.model_file.empty()) return std::nullopt;
  std::ifstream in(o.model_file);
  if (!in) throw Failure{PS_ERR_IO, "cannot open model file " + o.model_file};
  std::stringstream ss;
  ss << in.rdbuf();
  ps_model m;
  check(ps_model_from_json(ss.str().c_str(), &m));
  return m;
}

ps_model default_model(const Options& o) {
  if (auto m = load_model_file(o)) return *m;
  ps_model m;
  check(ps_model_bohv1(&m));
  return m;
}

std::vector<std::array<double, 3>> parse_multipliers(const Options& o) {
  std::vector<std::array<double, 3>> out;
  const std::vector<std::string> specs =
      o.multipliers.empty() ? std::vector<std::string>{"1,1,1"} : o.multipliers;
  for (const auto& spec : specs) {
    std::array<double, 3> a{};
    std::stringstream ss(spec);
    std::string item;
    int n = 0;
    while (std::getline(ss, item, ',')) {
      if (n == 3) usage_error("--multipliers expects three values a1,a2,a3: " + spec);
      try {
        std::size_t used = 0;
        a[n++] = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        usage_error("--multipliers: not a number: " + item);
      }
    }
    if (n != 3) usage_error("--multipliers expects three values a1,a2,a3: " + spec);
    out.push_back(a);
  }
  return out;
}

ps_score_kind score_kind(const Options& o) {
  ps_score_kind k;
  check(ps_score_kind_parse(o.score.c_str(), &k));
  return k;
}

ps_score_options score_options(const Options& o) {
  ps_score_options s{};
  s.iid_mode = o.iid ? 1 : 0;
  s.column_v = (o.compat_paper || o.v_definition == "column") ? 1 : 0;
  return s;
}

ps_scan_options scan_options(const Options& o) {
  ps_scan_options s;
  ps_scan_options_default(&s);
  s.literal_tilt = (o.compat_paper || o.tilt == "literal") ? 1 : 0;
  s.literal_mean_factor = o.compat_paper ? 1 : 0;
  s.literal_variance = o.compat_paper ? 1 : 0;
  s.nu_walks = o.nu_walks;
  s.nu_seed = o.seed;
  if (o.nu_fixed) {
    s.use_nu_fixed = 1;
    s.nu_fixed = *o.nu_fixed;
  }
  return s;
}

ps_experiment_config experiment_config(const Options& o) {
  ps_experiment_config c;
  check(ps_experiment_config_default(&c));
  c.model = default_model(o);
  c.n = o.length;
  c.L = o.L;
  c.w = o.w;
  c.replicates = o.replicates;
  c.lambda0_target = o.lambda0_target;
  c.seed = o.seed;
  c.threads = o.threads;
  return c;
}

// The bank source for experiments: the first input sequence when given.
SequencePtr bank_source(const Options& o) {
  auto inputs = load_inputs(o);
  if (inputs.empty()) return nullptr;
  return std::move(inputs.front().seq);
}

int run_estimate(const Options& o) {
  const auto inputs = load_inputs(o);
  if (inputs.empty()) usage_error("estimate: give --input or --accession");
  static const char* kBases = "ACGT";
  json rows = json::array();
  std::string header = "id\tlength\tdropped\tevents\tlambda_average\tlambda_iid\tlambda_markov";
  for (char b : std::string(kBases)) header += std::string("\tpi_") + b;
  for (char a : std::string(kBases))
    for (char b : std::string(kBases)) header += std::string("\tP_") + a + b;
  if (!o.json) std::cout << header << '\n';

  for (const auto& in : inputs) {
    ps_model m;
    check(ps_model_estimate(in.seq.get(), o.pseudo_count, &m));
    ps_events* ev = nullptr;
    check(ps_find_palindromes(in.seq.get(), o.L, &ev));
    EventsPtr events(ev);
    const std::size_t n = ps_sequence_length(in.seq.get());
    const double avg = static_cast<double>(ps_events_count(events.get())) / static_cast<double>(n);
    double iid = 0.0;
    double mkv = 0.0;
    check(ps_lambda_iid(m.pi, o.L, &iid));
    check(ps_lambda_markov(&m, o.L, &mkv));
    if (o.json) {
      json r;
      r["id"] = in.label;
      r["length"] = n;
      r["dropped"] = ps_sequence_dropped(in.seq.get());
      r["events"] = ps_events_count(events.get());
      r["lambda_average"] = avg;
      r["lambda_iid"] = iid;
      r["lambda_markov"] = mkv;
      r["model"] = json::parse(take_string([&] {
        char* s = nullptr;
        check(ps_model_to_json(&m, &s));
        return s;
      }()));
      rows.push_back(r);
    } else {
      std::cout << in.label << '\t' << n << '\t' << ps_sequence_dropped(in.seq.get()) << '\t'
                << ps_events_count(events.get()) << '\t' << fmt("%.10g", avg) << '\t'
                << fmt("%.10g", iid) << '\t' << fmt("%.10g", mkv);
      for (double p : m.pi) std::cout << '\t' << fmt("%.8g", p);
      for (double p : m.trans) std::cout << '\t' << fmt("%.8g", p);
      std::cout << '\n';
    }
  }
  if (o.json) std::cout << rows.dump(2) << '\n';
  return 0;
}

int run_scan(const Options& o) {
  const auto inputs = load_inputs(o);
  if (inputs.empty()) usage_error("scan: give --input or --accession");
  const ps_score_kind kind = score_kind(o);
  const auto fixed_model = load_model_file(o);
  const ps_scan_options sopts = scan_options(o);
  json rows = json::array();
  if (!o.json)
    std::cout << "id\tW\tw\tscore\tlambda0\tevents\tmax\targmax\ttheta1\tlambda1\tnu\tnu_se\tp\n";

  std::ofstream series;
  if (!o.series_file.empty()) {
    series.open(o.series_file);
    if (!series) throw Failure{PS_ERR_IO, "cannot write " + o.series_file};
  }

  for (const auto& in : inputs) {
    ps_model m;
    if (fixed_model)
      m = *fixed_model;
    else
      check(ps_model_estimate(in.seq.get(), o.pseudo_count, &m));
    ps_events* ev = nullptr;
    check(ps_find_palindromes(in.seq.get(), o.L, &ev));
    EventsPtr events(ev);
    const std::size_t W = ps_sequence_length(in.seq.get());

    double lambda0 = 0.0;
    if (o.rate == "markov")
      check(ps_lambda_markov(&m, o.L, &lambda0));
    else if (o.rate == "iid")
      check(ps_lambda_iid(m.pi, o.L, &lambda0));
    else
      lambda0 = static_cast<double>(ps_events_count(events.get())) / static_cast<double>(W);
    if (!(lambda0 > 0.0) && ps_events_count(events.get()) > 0)
      throw Failure{PS_ERR_DOMAIN, in.label + ": null rate estimate is zero"};

    const ps_score_options so = score_options(o);
    ps_score_model* raw_sm = nullptr;
    check(ps_score_model_create(kind, &m, o.L, &so, &raw_sm));
    ScoreModelPtr sm(raw_sm);
    ps_scan_result* raw = nullptr;
    check(ps_scan(events.get(), &m, W, lambda0, sm.get(), o.w, &sopts, &raw));
    ScanPtr result(raw);

    ps_pvalue pv;
    check(ps_scan_result_pvalue(result.get(), &pv));
    double max = 0.0;
    std::size_t argmax = 0;
    check(ps_scan_result_max(result.get(), &max, &argmax));
    if (series.is_open()) {
      char* s = nullptr;
      check(ps_scan_result_series_tsv(result.get(), &s));
      series << "# " << in.label << '\n' << take_string(s);
    }
    if (o.json) {
      char* s = nullptr;
      check(ps_scan_result_json(result.get(), &s));
      json r;
      r["id"] = in.label;
      r["events"] = ps_events_count(events.get());
      r["report"] = json::parse(take_string(s));
      rows.push_back(r);
    } else {
      std::cout << in.label << '\t' << W << '\t' << o.w << '\t' << o.score << '\t'
                << fmt("%.10g", lambda0) << '\t' << ps_events_count(events.get()) << '\t'
                << fmt("%.10g", max) << '\t' << argmax << '\t' << fmt("%.10g", pv.theta1)
                << '\t' << fmt("%.10g", pv.lambda1) << '\t' << fmt("%.6g", pv.nu) << '\t'
                << fmt("%.3g", pv.nu_se) << '\t' << fmt("%.6g", pv.p) << '\n';
    }
  }
  if (o.json) std::cout << rows.dump(2) << '\n';
  return 0;
}

int run_mgf(const Options& o) {
  const ps_score_kind kind = score_kind(o);
  ps_model m;
  const auto inputs = load_inputs(o);
  if (!inputs.empty())
    check(ps_model_estimate(inputs.front().seq.get(), o.pseudo_count, &m));
  else
    m = default_model(o);
  const ps_score_options so = score_options(o);
  ps_score_model* raw = nullptr;
  check(ps_score_model_create(kind, &m, o.L, &so, &raw));
  ScoreModelPtr sm(raw);

  const double domain = ps_score_model_t_max(sm.get());
  double hi = o.t_max.value_or(std::isfinite(domain) ? 0.95 * domain : 1.0);
  if (o.points < 2) usage_error("mgf: --points must be at least 2");
  if (!(hi > o.t_min)) usage_error("mgf: empty t range");

  json rows = json::array();
  if (!o.json) std::cout << "t\tK\tphi\tphi1\tphi2\n";
  for (std::size_t i = 0; i < o.points; ++i) {
    const double t = o.t_min + (hi - o.t_min) * static_cast<double>(i) / static_cast<double>(o.points - 1);
    double k = 0.0;
    double phi[3];
    check(ps_mgf(sm.get(), t, &k));
    check(ps_phi(sm.get(), t, phi));
    if (o.json) {
      rows.push_back({{"t", t}, {"K", k}, {"phi", phi[0]}, {"phi1", phi[1]}, {"phi2", phi[2]}});
    } else {
      std::cout << fmt("%.6g", t) << '\t' << fmt("%.12g", k) << '\t' << fmt("%.12g", phi[0])
                << '\t' << fmt("%.10g", phi[1]) << '\t' << fmt("%.8g", phi[2]) << '\n';
    }
  }
  if (o.json) {
    json out;
    out["score"] = o.score;
    out["L"] = o.L;
    out["t_max"] = std::isfinite(domain) ? json(domain) : json(nullptr);
    out["event_rate"] = ps_score_model_event_rate(sm.get());
    out["grid"] = rows;
    std::cout << out.dump(2) << '\n';
  }
  return 0;
}

int run_simulate(const Options& o) {
  auto cfg = experiment_config(o);
  const auto bank = bank_source(o);
  std::vector<ps_rate_row> rows;
  std::vector<json> details;
  for (const auto& a : parse_multipliers(o)) {
    for (int i = 0; i < 3; ++i) cfg.multipliers[i] = a[i];
    ps_rate_row row;
    std::vector<double> avg(cfg.replicates);
    std::vector<double> mkv(cfg.replicates);
    check(ps_rate_experiment_detail(&cfg, bank.get(), &row, avg.data(), mkv.data()));
    rows.push_back(row);
    json detail = json::array();
    for (std::size_t i = 0; i < cfg.replicates; ++i)
      detail.push_back({{"replicate", i}, {"lambda_average", avg[i]}, {"lambda_markov", mkv[i]}});
    details.push_back(std::move(detail));
  }
  if (o.json) {
    json out = json::array();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      json entry = {{"multipliers", {r.multipliers[0], r.multipliers[1], r.multipliers[2]}},
                    {"replicates", r.replicates},
                    {"lambda_average", r.mean_average},
                    {"lambda_markov", r.mean_markov},
                    {"se_average", r.se_average},
                    {"se_markov", r.se_markov},
                    {"true_lambda", r.true_lambda}};
      if (o.verbose) entry["detail"] = details[k];
      out.push_back(std::move(entry));
    }
    std::cout << out.dump(2) << '\n';
  } else {
    char* s = nullptr;
    check(ps_rate_table_tsv(rows.data(), rows.size(), &s));
    std::cout << take_string(s);
  }
  return 0;
}

int run_power(const Options& o) {
  auto cfg = experiment_config(o);
  const auto bank = bank_source(o);
  ps_power_options popts;
  ps_power_options_default(&popts);
  popts.kind = score_kind(o);
  popts.alpha = o.alpha;
  popts.per_replicate = o.per_replicate ? 1 : 0;
  popts.scan = scan_options(o);
  if (!o.thresholds.empty()) {
    if (o.thresholds.size() != 2) usage_error("--thresholds expects two values: average,markov");
    popts.use_fixed_thresholds = 1;
    popts.fixed_thresholds[0] = o.thresholds[0];
    popts.fixed_thresholds[1] = o.thresholds[1];
  }
  std::vector<ps_power_row> rows;
  std::vector<json> details;
  const std::size_t R = cfg.replicates;
  for (const auto& a : parse_multipliers(o)) {
    for (int i = 0; i < 3; ++i) cfg.multipliers[i] = a[i];
    ps_power_row pair[2];
    std::vector<double> thresholds(2 * R);
    std::vector<unsigned char> detected(2 * R * 3);
    check(ps_power_experiment_detail(&cfg, &popts, bank.get(), pair, thresholds.data(),
                                     detected.data()));
    for (int e = 0; e < 2; ++e) {
      rows.push_back(pair[e]);
      json detail = json::array();
      for (std::size_t i = 0; i < R; ++i) {
        const unsigned char* d = &detected[(e * R + i) * 3];
        detail.push_back({{"replicate", i},
                          {"threshold", thresholds[e * R + i]},
                          {"detected", {d[0] != 0, d[1] != 0, d[2] != 0}}});
      }
      details.push_back(std::move(detail));
    }
  }
  if (o.json) {
    json out = json::array();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      json entry = {{"multipliers", {r.multipliers[0], r.multipliers[1], r.multipliers[2]}},
                    {"score", o.score},
                    {"estimator", r.estimator ? "markov" : "average"},
                    {"lambda0", r.lambda0},
                    {"threshold", r.threshold},
                    {"power", {r.power[0], r.power[1], r.power[2]}},
                    {"replicates", r.replicates}};
      if (o.verbose) entry["detail"] = details[k];
      out.push_back(std::move(entry));
    }
    std::cout << out.dump(2) << '\n';
  } else {
    char* s = nullptr;
    check(ps_power_table_tsv(rows.data(), rows.size(), &s));
    std::cout << take_string(s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Palindrome rate estimation and scan statistics for DNA sequences", "palinscan"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ps_version()));
  Options o;

  auto add_inputs = [&](CLI::App* c) {
    c->add_option("--input", o.inputs, "FASTA file(s); every record is processed")->check(CLI::ExistingFile);
    c->add_option("--accession", o.accessions, "GenBank accession(s) to fetch (cached in $PALINSCAN_CACHE)");
    c->add_option("--endpoint", o.endpoint, "Fetch URL prefix; the accession is appended");
    c->add_option("--cache-dir", o.cache_dir, "Cache directory for fetched accessions");
  };
  auto add_model = [&](CLI::App* c) {
    c->add_option("--model", o.model_file, "Markov model JSON {pi, trans}");
  };
  auto add_L = [&](CLI::App* c) {
    c->add_option("--L", o.L, "Minimum palindrome half-length")->capture_default_str()->check(CLI::Range(1, 64));
  };
  auto add_score = [&](CLI::App* c) {
    c->add_option("--score", o.score, "Score: pcs, pls or bws")->capture_default_str()
        ->check(CLI::IsMember({"pcs", "pls", "bws"}, CLI::ignore_case));
    c->add_option("--v-definition", o.v_definition, "BWS first factor: row or column")
        ->capture_default_str()->check(CLI::IsMember({"row", "column"}));
  };
  auto add_scan_flags = [&](CLI::App* c) {
    c->add_option("--w", o.w, "Window width (bp)")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--nu-fixed", o.nu_fixed, "Use this overshoot factor instead of simulating it")
        ->check(CLI::Range(0.0, 1.0e6));
    c->add_option("--nu-walks", o.nu_walks, "Ladder walks for the overshoot factor")->capture_default_str();
    c->add_option("--tilt-convention", o.tilt, "Centring condition: per-bp or literal")
        ->capture_default_str()->check(CLI::IsMember({"per-bp", "literal"}));
    c->add_flag("--compat-paper", o.compat_paper,
                "Literal conventions: per-window centring, (b - lambda0 mu0) factor, "
                "phi'' local variance, column v");
  };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Master seed")->capture_default_str();
    c->add_flag("--json", o.json, "Emit JSON instead of TSV");
    c->add_option("--pseudo-count", o.pseudo_count, "Pseudo-count added to transition counts")
        ->capture_default_str()->check(CLI::NonNegativeNumber);
  };
  auto add_experiment = [&](CLI::App* c) {
    c->add_option("--replicates", o.replicates, "Replicates per scenario")->capture_default_str()
        ->check(CLI::PositiveNumber);
    c->add_option("--multipliers", o.multipliers, "Hot-spot multipliers a1,a2,a3 (repeatable)");
    c->add_option("--length", o.length, "Simulated sequence length")->capture_default_str();
    c->add_option("--lambda0", o.lambda0_target, "Base rate for hot-spot insertion")->capture_default_str();
    c->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
    c->add_flag("--verbose", o.verbose, "With --json, include per-replicate detail");
  };

  auto* estimate = app.add_subcommand("estimate", "Estimate pi, P and the three null rates per sequence");
  add_inputs(estimate);
  add_L(estimate);
  add_common(estimate);

  auto* scan = app.add_subcommand("scan", "Window scan of palindrome scores with a p-value");
  add_inputs(scan);
  add_model(scan);
  add_L(scan);
  add_score(scan);
  add_scan_flags(scan);
  add_common(scan);
  scan->add_option("--rate", o.rate, "Null rate: markov, iid or average")->capture_default_str()
      ->check(CLI::IsMember({"markov", "iid", "average"}));
  scan->add_option("--series", o.series_file, "Write the window series as TSV to this file");

  auto* mgf = app.add_subcommand("mgf", "Tabulate K(t) and phi(t) on a grid");
  add_inputs(mgf);
  add_model(mgf);
  add_L(mgf);
  add_score(mgf);
  add_common(mgf);
  mgf->add_option("--t-min", o.t_min, "Grid start")->capture_default_str();
  mgf->add_option("--t-max", o.t_max, "Grid end (default 95% of the domain)");
  mgf->add_option("--points", o.points, "Grid points")->capture_default_str();
  mgf->add_flag("--iid", o.iid, "Use the iid special case");

  auto* simulate = app.add_subcommand("simulate", "Rate-estimator robustness under hot spots");
  add_inputs(simulate);
  add_model(simulate);
  add_L(simulate);
  add_common(simulate);
  add_experiment(simulate);
  simulate->add_option("--w", o.w, "Window width (bp)")->capture_default_str();

  auto* power = app.add_subcommand("power", "Detection power under average and Markov null rates");
  add_inputs(power);
  add_model(power);
  add_L(power);
  add_score(power);
  add_scan_flags(power);
  add_common(power);
  add_experiment(power);
  power->add_option("--alpha", o.alpha, "Significance level for thresholds")->capture_default_str()
      ->check(CLI::Range(1e-12, 1.0 - 1e-12));
  power->add_option("--thresholds", o.thresholds, "Fixed thresholds average,markov")->delimiter(',');
  power->add_flag("--per-replicate", o.per_replicate, "Recompute thresholds for every replicate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*estimate) return run_estimate(o);
    if (*scan) return run_scan(o);
    if (*mgf) return run_mgf(o);
    if (*simulate) return run_simulate(o);
    if (*power) return run_power(o);
  } catch (const Failure& f) {
    std::cerr << "palinscan: " << ps_status_name(f.status) << ": " << f.message << '\n';
    return static_cast<int>(f.status);
  } catch (const std::exception& e) {
    std::cerr << "palinscan: " << e.what() << '\n';
    return static_cast<int>(PS_ERR_INTERNAL);
  }
  return 1;
}
