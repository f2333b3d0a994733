#include "palinscan/palinscan.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "palinscan/error.hpp"
#include "palinscan/markov.hpp"
#include "palinscan/mgf.hpp"
#include "palinscan/palindrome.hpp"
#include "palinscan/scan.hpp"
#include "palinscan/seqio.hpp"
#include "palinscan/sim.hpp"

using namespace palinscan;

struct ps_sequence {
  DnaSeq seq;
};
struct ps_fasta {
  std::vector<FastaRecord> records;
};
struct ps_events {
  std::vector<palindrome::PalindromeEvent> events;
  int L = 0;
};
struct ps_score_model {
  mgf::ScoreModel sm;
};
struct ps_scan_result {
  scan::ScanReport report;
};

namespace {

thread_local std::string g_last_error;

ps_status fail_with(ps_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
ps_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return PS_OK;
  } catch (const Error& e) {
    return fail_with(static_cast<ps_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail_with(PS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail_with(PS_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

markov::MarkovModel to_model(const ps_model* m) {
  require(m != nullptr, "model is null");
  markov::MarkovModel out;
  for (std::size_t i = 0; i < 4; ++i) {
    out.pi[i] = m->pi[i];
    for (std::size_t j = 0; j < 4; ++j) out.trans(i, j) = m->trans[4 * i + j];
  }
  out.validate();
  return out;
}

void from_model(const markov::MarkovModel& m, ps_model* out) {
  for (std::size_t i = 0; i < 4; ++i) {
    out->pi[i] = m.pi[i];
    for (std::size_t j = 0; j < 4; ++j) out->trans[4 * i + j] = m.trans(i, j);
  }
}

palindrome::ScoreKind to_kind(ps_score_kind k) {
  switch (k) {
    case PS_SCORE_PCS: return palindrome::ScoreKind::PCS;
    case PS_SCORE_PLS: return palindrome::ScoreKind::PLS;
    case PS_SCORE_BWS: return palindrome::ScoreKind::BWS;
  }
  fail(ErrorCode::InvalidArgument, "unknown score kind");
}

ps_score_kind from_kind(palindrome::ScoreKind k) {
  switch (k) {
    case palindrome::ScoreKind::PCS: return PS_SCORE_PCS;
    case palindrome::ScoreKind::PLS: return PS_SCORE_PLS;
    case palindrome::ScoreKind::BWS: return PS_SCORE_BWS;
  }
  return PS_SCORE_PCS;
}

scan::ScanOptions to_scan_options(const ps_scan_options* o) {
  scan::ScanOptions out;
  if (o == nullptr) return out;
  out.tilt = o->literal_tilt ? scan::TiltConvention::Literal : scan::TiltConvention::PerBasePair;
  out.literal_mean_factor = o->literal_mean_factor != 0;
  out.literal_variance = o->literal_variance != 0;
  out.delta = o->delta;
  out.nu_walks = o->nu_walks;
  out.nu_seed = o->nu_seed;
  if (o->use_nu_fixed) out.nu_fixed = o->nu_fixed;
  return out;
}

void from_pvalue(const scan::PvalueReport& r, ps_pvalue* out) {
  out->b = r.b;
  out->w = r.w;
  out->W = r.W;
  out->p = r.p;
  out->nu = r.nu;
  out->nu_se = r.nu_se;
  out->i_b = r.i_b;
  out->lambda0 = r.lambda0;
  out->lambda1 = r.lambda1;
  out->theta1 = r.theta1;
}

sim::ExperimentConfig to_config(const ps_experiment_config* c) {
  require(c != nullptr, "experiment config is null");
  sim::ExperimentConfig cfg;
  cfg.model = to_model(&c->model);
  cfg.n = c->n;
  cfg.L = c->L;
  cfg.w = c->w;
  cfg.replicates = c->replicates;
  cfg.multipliers = {c->multipliers[0], c->multipliers[1], c->multipliers[2]};
  cfg.hotspot_length = c->hotspot_length;
  cfg.lambda0_target = c->lambda0_target;
  cfg.master_seed = c->seed;
  cfg.threads = c->threads;
  return cfg;
}

std::optional<palindrome::PalindromeBank> bank_from(const ps_sequence* source, int L) {
  if (source == nullptr) return std::nullopt;
  return palindrome::build_bank(source->seq, L);
}

sim::RateRow to_rate_row(const ps_rate_row& r) {
  sim::RateRow out;
  out.multipliers = {r.multipliers[0], r.multipliers[1], r.multipliers[2]};
  out.replicates = r.replicates;
  out.mean_average = r.mean_average;
  out.mean_markov = r.mean_markov;
  out.se_average = r.se_average;
  out.se_markov = r.se_markov;
  out.true_lambda = r.true_lambda;
  return out;
}

}  // namespace

extern "C" {

const char* ps_version(void) { return "1.0.0"; }

const char* ps_status_name(ps_status status) {
  switch (status) {
    case PS_OK: return "ok";
    case PS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PS_ERR_PARSE: return "parse error";
    case PS_ERR_IO: return "i/o error";
    case PS_ERR_NETWORK: return "network error";
    case PS_ERR_NOT_FOUND: return "not found";
    case PS_ERR_DOMAIN: return "domain error";
    case PS_ERR_SINGULAR: return "singular matrix";
    case PS_ERR_NO_CONVERGENCE: return "no convergence";
    case PS_ERR_EMPTY: return "empty input";
    case PS_ERR_INFINITE_SCORE: return "infinite score";
    case PS_ERR_UNATTAINABLE: return "unattainable";
    case PS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ps_last_error(void) { return g_last_error.c_str(); }

void ps_string_free(char* s) { std::free(s); }

/* ---- sequences ---- */

ps_status ps_fasta_read_file(const char* path, ps_fasta** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new ps_fasta{read_fasta_file(path)};
  });
}

ps_status ps_fasta_parse(const char* text, size_t length, ps_fasta** out) {
  return guarded([&] {
    require((text != nullptr || length == 0) && out != nullptr, "null argument");
    *out = new ps_fasta{parse_fasta(std::string_view(text ? text : "", length))};
  });
}

ps_status ps_fetch(const char* accession, const char* endpoint, const char* cache_dir,
                   ps_fasta** out) {
  return guarded([&] {
    require(accession != nullptr && out != nullptr, "null argument");
    const auto dir = cache_dir ? std::filesystem::path(cache_dir)
                               : resolve_cache_dir(".palinscan-cache");
    auto rec = fetch_sequence(accession, endpoint ? endpoint : kDefaultEndpoint, dir);
    *out = new ps_fasta{{std::move(rec)}};
  });
}

size_t ps_fasta_count(const ps_fasta* fasta) { return fasta ? fasta->records.size() : 0; }

ps_status ps_fasta_get(const ps_fasta* fasta, size_t index, ps_sequence** out) {
  return guarded([&] {
    require(fasta != nullptr && out != nullptr, "null argument");
    require(index < fasta->records.size(), "record index out of range");
    *out = new ps_sequence{fasta->records[index].seq};
  });
}

void ps_fasta_free(ps_fasta* fasta) { delete fasta; }

ps_status ps_sequence_from_string(const char* bases, const char* id, ps_sequence** out) {
  return guarded([&] {
    require(bases != nullptr && out != nullptr, "null argument");
    *out = new ps_sequence{DnaSeq::clean(bases, id ? id : "")};
  });
}

size_t ps_sequence_length(const ps_sequence* seq) { return seq ? seq->seq.length() : 0; }

size_t ps_sequence_dropped(const ps_sequence* seq) { return seq ? seq->seq.dropped_count() : 0; }

ps_status ps_sequence_id(const ps_sequence* seq, char** out) {
  return guarded([&] {
    require(seq != nullptr && out != nullptr, "null argument");
    *out = dup_string(seq->seq.source_id());
  });
}

ps_status ps_sequence_bases(const ps_sequence* seq, char** out) {
  return guarded([&] {
    require(seq != nullptr && out != nullptr, "null argument");
    *out = dup_string(seq->seq.bases());
  });
}

void ps_sequence_free(ps_sequence* seq) { delete seq; }

/* ---- model ---- */

ps_status ps_model_bohv1(ps_model* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    from_model(markov::bohv1_model(), out);
  });
}

ps_status ps_model_estimate(const ps_sequence* seq, double pseudo_count, ps_model* out) {
  return guarded([&] {
    require(seq != nullptr && out != nullptr, "null argument");
    from_model(markov::estimate_model(seq->seq, pseudo_count), out);
  });
}

ps_status ps_model_to_json(const ps_model* model, char** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = dup_string(markov::to_json(to_model(model)));
  });
}

ps_status ps_model_from_json(const char* json, ps_model* out) {
  return guarded([&] {
    require(json != nullptr && out != nullptr, "null argument");
    from_model(markov::from_json(json), out);
  });
}

ps_status ps_lambda_markov(const ps_model* model, int L, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    *out = markov::lambda_markov(to_model(model), L).lambda;
  });
}

ps_status ps_lambda_iid(const double pi[4], int L, double* out) {
  return guarded([&] {
    require(pi != nullptr && out != nullptr, "null argument");
    *out = markov::lambda_iid(numeric::Vec4{{pi[0], pi[1], pi[2], pi[3]}}, L).lambda;
  });
}

ps_status ps_simulate_sequence(const ps_model* model, size_t n, uint64_t seed, ps_sequence** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    Rng rng(seed);
    *out = new ps_sequence{markov::generate_sequence(to_model(model), n, rng)};
  });
}

/* ---- palindromes ---- */

ps_status ps_find_palindromes(const ps_sequence* seq, int L, ps_events** out) {
  return guarded([&] {
    require(seq != nullptr && out != nullptr, "null argument");
    *out = new ps_events{palindrome::find_palindromes(seq->seq, L), L};
  });
}

size_t ps_events_count(const ps_events* events) { return events ? events->events.size() : 0; }

ps_status ps_events_get(const ps_events* events, size_t index, size_t* center, int* half_length) {
  return guarded([&] {
    require(events != nullptr, "null argument");
    require(index < events->events.size(), "event index out of range");
    const auto& e = events->events[index];
    if (center) *center = e.center;
    if (half_length) *half_length = e.half_length;
  });
}

ps_status ps_events_score(const ps_events* events, size_t index, ps_score_kind kind,
                          const ps_model* model, double* out) {
  return guarded([&] {
    require(events != nullptr && out != nullptr, "null argument");
    require(index < events->events.size(), "event index out of range");
    *out = palindrome::score_event(events->events[index], to_kind(kind), events->L,
                                   to_model(model));
  });
}

ps_status ps_events_tsv(const ps_events* events, const ps_model* model, char** out) {
  return guarded([&] {
    require(events != nullptr && out != nullptr, "null argument");
    *out = dup_string(palindrome::events_to_tsv(events->events, events->L, to_model(model)));
  });
}

void ps_events_free(ps_events* events) { delete events; }

/* ---- score models ---- */

ps_status ps_score_kind_parse(const char* name, ps_score_kind* out) {
  return guarded([&] {
    require(name != nullptr && out != nullptr, "null argument");
    *out = from_kind(palindrome::parse_score_kind(name));
  });
}

ps_status ps_score_model_create(ps_score_kind kind, const ps_model* model, int L,
                                const ps_score_options* options, ps_score_model** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    mgf::ScoreModelOptions opts;
    if (options) {
      opts.iid_mode = options->iid_mode != 0;
      opts.v_definition = options->column_v ? mgf::VDefinition::Column : mgf::VDefinition::Row;
    }
    *out = new ps_score_model{mgf::ScoreModel(to_kind(kind), to_model(model), L, opts)};
  });
}

void ps_score_model_free(ps_score_model* sm) { delete sm; }

double ps_score_model_t_max(const ps_score_model* sm) {
  return sm ? sm->sm.domain().t_max : std::nan("");
}

double ps_score_model_event_rate(const ps_score_model* sm) {
  return sm ? sm->sm.event_rate() : std::nan("");
}

ps_status ps_mgf(const ps_score_model* sm, double t, double* out) {
  return guarded([&] {
    require(sm != nullptr && out != nullptr, "null argument");
    *out = sm->sm.mgf(t);
  });
}

ps_status ps_mgf_exact_length(const ps_score_model* sm, double t, int k, double* out) {
  return guarded([&] {
    require(sm != nullptr && out != nullptr, "null argument");
    *out = sm->sm.exact_length(t, k);
  });
}

ps_status ps_phi(const ps_score_model* sm, double theta, double out[3]) {
  return guarded([&] {
    require(sm != nullptr && out != nullptr, "null argument");
    out[0] = mgf::phi(sm->sm, theta);
    out[1] = mgf::phi_prime(sm->sm, theta);
    out[2] = mgf::phi_double_prime(sm->sm, theta);
  });
}

/* ---- scan ---- */

void ps_scan_options_default(ps_scan_options* out) {
  if (out == nullptr) return;
  const scan::ScanOptions d;
  out->literal_tilt = 0;
  out->literal_mean_factor = 0;
  out->literal_variance = 0;
  out->delta = d.delta;
  out->nu_walks = d.nu_walks;
  out->nu_seed = d.nu_seed;
  out->use_nu_fixed = 0;
  out->nu_fixed = 1.0;
}

ps_status ps_p_value(double b, size_t w, size_t W, double lambda0, const ps_score_model* sm,
                     const ps_scan_options* options, ps_pvalue* out) {
  return guarded([&] {
    require(sm != nullptr && out != nullptr, "null argument");
    from_pvalue(scan::p_value(b, w, W, lambda0, sm->sm, to_scan_options(options)), out);
  });
}

ps_status ps_threshold_for_alpha(double alpha, size_t w, size_t W, double lambda0,
                                 const ps_score_model* sm, const ps_scan_options* options,
                                 double* out) {
  return guarded([&] {
    require(sm != nullptr && out != nullptr, "null argument");
    *out = scan::threshold_for_alpha(alpha, w, W, lambda0, sm->sm, to_scan_options(options));
  });
}

ps_status ps_scan(const ps_events* events, const ps_model* scoring, size_t W, double lambda0,
                  const ps_score_model* sm, size_t w, const ps_scan_options* options,
                  ps_scan_result** out) {
  return guarded([&] {
    require(events != nullptr && sm != nullptr && out != nullptr, "null argument");
    const auto positions =
        sim::scored_positions(events->events, sm->sm.kind(), sm->sm.L(), to_model(scoring));
    *out = new ps_scan_result{
        scan::scan_events(positions, W, lambda0, sm->sm, w, to_scan_options(options))};
  });
}

ps_status ps_scan_result_pvalue(const ps_scan_result* result, ps_pvalue* out) {
  return guarded([&] {
    require(result != nullptr && out != nullptr, "null argument");
    from_pvalue(result->report.pvalue, out);
  });
}

ps_status ps_scan_result_max(const ps_scan_result* result, double* max, size_t* argmax) {
  return guarded([&] {
    require(result != nullptr, "null argument");
    if (max) *max = result->report.series.max;
    if (argmax) *argmax = result->report.series.argmax;
  });
}

ps_status ps_scan_result_json(const ps_scan_result* result, char** out) {
  return guarded([&] {
    require(result != nullptr && out != nullptr, "null argument");
    *out = dup_string(scan::to_json(result->report));
  });
}

ps_status ps_scan_result_series_tsv(const ps_scan_result* result, char** out) {
  return guarded([&] {
    require(result != nullptr && out != nullptr, "null argument");
    *out = dup_string(scan::series_to_tsv(result->report.series));
  });
}

void ps_scan_result_free(ps_scan_result* result) { delete result; }

/* ---- experiments ---- */

ps_status ps_experiment_config_default(ps_experiment_config* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const sim::ExperimentConfig d;
    from_model(d.model, &out->model);
    out->n = d.n;
    out->L = d.L;
    out->w = d.w;
    out->replicates = d.replicates;
    for (int i = 0; i < 3; ++i) out->multipliers[i] = d.multipliers[i];
    out->hotspot_length = d.hotspot_length;
    out->lambda0_target = d.lambda0_target;
    out->seed = d.master_seed;
    out->threads = d.threads;
  });
}

ps_status ps_rate_experiment(const ps_experiment_config* config, const ps_sequence* bank_source,
                             ps_rate_row* out) {
  return ps_rate_experiment_detail(config, bank_source, out, nullptr, nullptr);
}

ps_status ps_rate_experiment_detail(const ps_experiment_config* config,
                                    const ps_sequence* bank_source, ps_rate_row* out,
                                    double* lambda_average, double* lambda_markov) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const auto cfg = to_config(config);
    const auto row = sim::rate_experiment(cfg, bank_from(bank_source, cfg.L));
    for (int i = 0; i < 3; ++i) out->multipliers[i] = row.multipliers[i];
    out->replicates = row.replicates;
    out->mean_average = row.mean_average;
    out->mean_markov = row.mean_markov;
    out->se_average = row.se_average;
    out->se_markov = row.se_markov;
    out->true_lambda = row.true_lambda;
    if (lambda_average != nullptr)
      std::copy(row.replicate_average.begin(), row.replicate_average.end(), lambda_average);
    if (lambda_markov != nullptr)
      std::copy(row.replicate_markov.begin(), row.replicate_markov.end(), lambda_markov);
  });
}

ps_status ps_rate_table_tsv(const ps_rate_row* rows, size_t count, char** out) {
  return guarded([&] {
    require((rows != nullptr || count == 0) && out != nullptr, "null argument");
    std::vector<sim::RateRow> v;
    for (size_t i = 0; i < count; ++i) v.push_back(to_rate_row(rows[i]));
    *out = dup_string(sim::rate_table_tsv(v));
  });
}

void ps_power_options_default(ps_power_options* out) {
  if (out == nullptr) return;
  const sim::PowerOptions d;
  out->kind = from_kind(d.kind);
  out->alpha = d.alpha;
  out->per_replicate = 0;
  out->use_fixed_thresholds = 0;
  out->fixed_thresholds[0] = 0.0;
  out->fixed_thresholds[1] = 0.0;
  ps_scan_options_default(&out->scan);
}

ps_status ps_power_experiment(const ps_experiment_config* config, const ps_power_options* options,
                              const ps_sequence* bank_source, ps_power_row out[2]) {
  return ps_power_experiment_detail(config, options, bank_source, out, nullptr, nullptr);
}

ps_status ps_power_experiment_detail(const ps_experiment_config* config,
                                     const ps_power_options* options,
                                     const ps_sequence* bank_source, ps_power_row out[2],
                                     double* thresholds, unsigned char* detected) {
  return guarded([&] {
    require(options != nullptr && out != nullptr, "null argument");
    const auto cfg = to_config(config);
    sim::PowerOptions opts;
    opts.kind = to_kind(options->kind);
    opts.alpha = options->alpha;
    opts.per_replicate = options->per_replicate != 0;
    if (options->use_fixed_thresholds)
      opts.fixed_thresholds =
          std::array<double, 2>{options->fixed_thresholds[0], options->fixed_thresholds[1]};
    opts.scan = to_scan_options(&options->scan);
    const auto rows = sim::power_experiment(cfg, opts, bank_from(bank_source, cfg.L));
    require(rows.size() == 2 && rows[0].power.size() == 3, "power experiment: unexpected layout");
    for (int r = 0; r < 2; ++r) {
      for (int i = 0; i < 3; ++i) {
        out[r].multipliers[i] = rows[r].multipliers[i];
        out[r].power[i] = rows[r].power[i];
      }
      out[r].kind = from_kind(rows[r].kind);
      out[r].estimator = rows[r].estimator == "markov" ? 1 : 0;
      out[r].lambda0 = rows[r].lambda0;
      out[r].threshold = rows[r].threshold;
      out[r].replicates = rows[r].replicates;
      if (thresholds != nullptr)
        std::copy(rows[r].replicate_threshold.begin(), rows[r].replicate_threshold.end(),
                  thresholds + r * cfg.replicates);
      if (detected != nullptr)
        std::copy(rows[r].detected.begin(), rows[r].detected.end(),
                  detected + r * cfg.replicates * 3);
    }
  });
}

ps_status ps_power_table_tsv(const ps_power_row* rows, size_t count, char** out) {
  return guarded([&] {
    require((rows != nullptr || count == 0) && out != nullptr, "null argument");
    std::vector<sim::PowerRow> v;
    for (size_t i = 0; i < count; ++i) {
      sim::PowerRow r;
      for (int k = 0; k < 3; ++k) r.multipliers[k] = rows[i].multipliers[k];
      r.kind = to_kind(rows[i].kind);
      r.estimator = rows[i].estimator ? "markov" : "average";
      r.lambda0 = rows[i].lambda0;
      r.threshold = rows[i].threshold;
      r.power.assign(rows[i].power, rows[i].power + 3);
      r.replicates = rows[i].replicates;
      v.push_back(std::move(r));
    }
    *out = dup_string(sim::power_table_tsv(v));
  });
}

}  // extern "C"
