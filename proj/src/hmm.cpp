#include "d2dsim/hmm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace d2dsim::hmm {

namespace {

constexpr std::array<State, kStateCount> kStates{State::BaseStation, State::CellularUser,
                                                 State::Pair};

std::size_t idx(State s) { return static_cast<std::size_t>(s); }

void check_symbol(const HmmModel& model, std::size_t x) {
  if (x >= model.alphabet.size()) throw InputError("observation symbol outside the alphabet");
}

std::size_t draw(std::span<const double> weights, Rng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double u = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding left u at or past the last boundary; take the last non-zero entry.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    throw InputError("malformed number '" + tok + "' in model file");
  }
  return v;
}

}  // namespace

std::string_view to_string(State s) {
  switch (s) {
    case State::BaseStation: return "BaseStation";
    case State::CellularUser: return "CellularUser";
    case State::Pair: return "Pair";
  }
  return "?";
}

State parse_state(std::string_view name) {
  for (State s : kStates) {
    if (to_string(s) == name) return s;
  }
  throw InputError("unknown HMM state '" + std::string(name) + "'");
}

// ---- alphabet -------------------------------------------------------------

int Alphabet::bucket_of(double sinr_db) const {
  if (!(sinr_db >= lowest_edge_db)) return 0;
  const double b = std::floor((sinr_db - lowest_edge_db) / bucket_width_db) + 1.0;
  return b >= n_buckets - 1 ? n_buckets - 1 : static_cast<int>(b);
}

double Alphabet::representative_db(int bucket) const {
  return lowest_edge_db - bucket_width_db / 2.0 + bucket_width_db * bucket;
}

std::size_t Alphabet::symbol(Application app, int bucket) const {
  if (bucket < 0 || bucket >= n_buckets) throw InputError("SINR bucket out of range");
  return static_cast<std::size_t>(app) * static_cast<std::size_t>(n_buckets) +
         static_cast<std::size_t>(bucket);
}

std::size_t Alphabet::symbol_for(Application app, double sinr_linear) const {
  return symbol(app, bucket_of(linear_to_db(sinr_linear)));
}

Application Alphabet::application_of(std::size_t sym) const {
  return static_cast<Application>(sym / static_cast<std::size_t>(n_buckets));
}

int Alphabet::bucket_of_symbol(std::size_t sym) const {
  return static_cast<int>(sym % static_cast<std::size_t>(n_buckets));
}

// ---- model ----------------------------------------------------------------

HmmModel HmmModel::defaults(Alphabet alphabet) {
  HmmModel m;
  m.alphabet = alphabet;
  for (auto& row : m.emission) {
    row.assign(alphabet.size(), 1.0 / static_cast<double>(alphabet.size()));
  }
  return m;
}

void HmmModel::check_stochastic(double tol) const {
  auto check = [&](std::span<const double> row, const char* what) {
    double sum = 0.0;
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) throw InputError(std::string(what) + " entry outside [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > tol) throw InputError(std::string(what) + " does not sum to 1");
  };
  check(prior, "prior");
  for (const auto& row : transition) check(row, "transition row");
  for (const auto& row : emission) {
    if (row.size() != alphabet.size()) throw InputError("emission row size does not match alphabet");
    check(row, "emission row");
  }
}

double path_probability(const HmmModel& model, std::span<const State> path) {
  if (path.empty()) throw InputError("empty state path");
  double p = model.prior.at(idx(path[0]));
  for (std::size_t n = 0; n + 1 < path.size(); ++n) p *= model.a(path[n], path[n + 1]);
  return p;
}

double path_observation_likelihood(const HmmModel& model, std::span<const State> path,
                                   std::span<const std::size_t> observations) {
  if (path.size() != observations.size()) {
    throw InputError("state path and observation sequence differ in length");
  }
  double p = 1.0;
  for (std::size_t n = 0; n < path.size(); ++n) {
    check_symbol(model, observations[n]);
    p *= model.b(path[n], observations[n]);
  }
  return p;
}

double sequence_likelihood(const HmmModel& model, std::span<const std::size_t> observations) {
  if (observations.empty()) throw InputError("empty observation sequence");
  std::array<double, kStateCount> alpha{};
  check_symbol(model, observations[0]);
  for (State s : kStates) alpha[idx(s)] = model.prior[idx(s)] * model.b(s, observations[0]);
  for (std::size_t n = 1; n < observations.size(); ++n) {
    check_symbol(model, observations[n]);
    std::array<double, kStateCount> next{};
    for (State to : kStates) {
      double acc = 0.0;
      for (State from : kStates) acc += alpha[idx(from)] * model.a(from, to);
      next[idx(to)] = acc * model.b(to, observations[n]);
    }
    alpha = next;
  }
  return alpha[0] + alpha[1] + alpha[2];
}

HmmModel train(const HmmModel& model, std::span<const LabeledSequence> corpus,
               const TrainingOptions& opts) {
  if (corpus.empty()) throw TrainingError("no labelled sequences to train on");
  const std::size_t m = model.alphabet.size();

  std::array<std::vector<double>, kStateCount> counts;
  for (auto& row : counts) row.assign(m, 0.0);
  std::array<double, kStateCount> first{};
  Matrix3 trans{};

  for (const auto& seq : corpus) {
    if (seq.states.size() != seq.observations.size()) {
      throw InputError("labelled sequence has mismatched lengths");
    }
    if (seq.states.empty()) continue;
    first[idx(seq.states[0])] += 1.0;
    for (std::size_t n = 0; n < seq.states.size(); ++n) {
      check_symbol(model, seq.observations[n]);
      counts[idx(seq.states[n])][seq.observations[n]] += 1.0;
      if (n + 1 < seq.states.size()) trans[idx(seq.states[n])][idx(seq.states[n + 1])] += 1.0;
    }
  }

  HmmModel out = model;
  for (std::size_t s = 0; s < kStateCount; ++s) {
    const double total = std::accumulate(counts[s].begin(), counts[s].end(), 0.0);
    out.emission[s].resize(m);
    for (std::size_t x = 0; x < m; ++x) {
      out.emission[s][x] = (counts[s][x] + 1.0) / (total + static_cast<double>(m));
    }
  }
  if (opts.reestimate_prior) {
    const double total = first[0] + first[1] + first[2];
    for (std::size_t s = 0; s < kStateCount; ++s) out.prior[s] = (first[s] + 1.0) / (total + 3.0);
  }
  if (opts.reestimate_transition) {
    for (std::size_t s = 0; s < kStateCount; ++s) {
      const double total = trans[s][0] + trans[s][1] + trans[s][2];
      for (std::size_t t = 0; t < kStateCount; ++t) {
        out.transition[s][t] = (trans[s][t] + 1.0) / (total + 3.0);
      }
    }
  }
  out.trained = true;
  return out;
}

State sample_next_state(const HmmModel& model, State from, Rng& rng) {
  return static_cast<State>(draw(model.transition[idx(from)], rng));
}

int sample_sinr_bucket(const HmmModel& model, Application app, Rng& rng) {
  const auto& row = model.emission[idx(State::Pair)];
  const std::size_t base = model.alphabet.symbol(app, 0);
  const std::span<const double> slice(row.data() + base,
                                      static_cast<std::size_t>(model.alphabet.n_buckets));
  return static_cast<int>(draw(slice, rng));
}

IterationResult hmm_allocate(ScenarioState& state, const Deployment& dep,
                             std::span<const Application> demands, const RadioConfig& cfg,
                             const AllocationPolicy& policy, const HmmModel& model, Rng& rng) {
  if (!model.trained) throw ContractViolation("HMM allocation needs a trained model");
  if (demands.size() < dep.d()) throw ContractViolation("missing demand for a pair slot");
  constexpr int kMaxWalk = 64;

  RbLedger& ledger = state.ledger;
  const int n = state.iteration + 1;
  ledger.ensure(dep.c(), n);
  ledger.replenish(n);

  IterationResult result;
  result.iteration = n;
  result.n_cellular = dep.c();
  result.pairs.resize(dep.d());
  std::vector<bool> lent(ledger.accounts().size(), false);

  for (PairId j = 0; j < dep.d(); ++j) {
    PairOutcome& out = result.pairs[j];
    AllocationDecision& dec = out.decision;
    dec.pair_id = j;
    dec.application = demands[j];
    dec.k = rb_demand(dec.application, policy);

    // The grant is issued once the chain reaches a cellular user.
    State s = State::BaseStation;
    for (int step = 0; step < kMaxWalk && s != State::CellularUser; ++step) {
      s = sample_next_state(model, s, rng);
    }
    std::vector<CellularId> capable;
    for (CellularId id = 0; id < dep.c(); ++id) {
      if (ledger.can_share(id, dec.k, policy.share_cap)) capable.push_back(id);
    }
    if (capable.empty()) {
      result.unserved.push_back(j);
      continue;
    }
    dec.partner = capable[rng.below(capable.size())];
    dec.holdings_before = ledger.share(dec.partner, dec.k, policy.share_cap);
    lent[dec.partner] = true;
    out.served = true;

    const int bucket = sample_sinr_bucket(model, dec.application, rng);
    dec.sinr_per_rb = db_to_linear(model.alphabet.representative_db(bucket));
    dec.feasible = dec.sinr_per_rb >= db_to_linear(cfg.sinr_threshold_db);
    out.standalone_bps = pair_throughput(dec.sinr_per_rb, dec.k, cfg.rb_bandwidth_hz);
    out.throughput_bps = out.standalone_bps;
    out.mos = mos(to_kbps(out.throughput_bps));
    result.iteration_total_bps += out.throughput_bps;

    ledger.add_record({n, dec.partner, j, dec.k, dec.holdings_before, dec.sinr_per_rb,
                       out.standalone_bps, out.throughput_bps, false});
  }

  for (CellularId id = 0; id < lent.size(); ++id) {
    if (!lent[id]) continue;
    auto& acc = ledger.account(id);
    acc.last_active_iteration = n;
    acc.carry_bps = 0.0;
  }
  state.iteration = n;
  return result;
}

// ---- serialization ----------------------------------------------------------
//
//   hmm-model 1
//   states BaseStation CellularUser Pair
//   alphabet <n_buckets> <lowest_edge_db> <bucket_width_db>
//   trained <0|1>
//   prior <p_bs> <p_cu> <p_pair>
//   transition <State> <a0> <a1> <a2>      (one line per state)
//   emission <State> <b0> ... <bM-1>       (one line per state)

void save(const HmmModel& model, std::ostream& os) {
  os << "hmm-model 1\n";
  os << "states";
  for (State s : kStates) os << ' ' << to_string(s);
  os << "\nalphabet " << model.alphabet.n_buckets << ' '
     << format_double(model.alphabet.lowest_edge_db) << ' '
     << format_double(model.alphabet.bucket_width_db) << '\n';
  os << "trained " << (model.trained ? 1 : 0) << '\n';
  os << "prior";
  for (double p : model.prior) os << ' ' << format_double(p);
  os << '\n';
  for (State s : kStates) {
    os << "transition " << to_string(s);
    for (double p : model.transition[idx(s)]) os << ' ' << format_double(p);
    os << '\n';
  }
  for (State s : kStates) {
    os << "emission " << to_string(s);
    for (double p : model.emission[idx(s)]) os << ' ' << format_double(p);
    os << '\n';
  }
}

HmmModel load(std::istream& is) {
  HmmModel m;
  std::string line;
  int line_no = 0;
  bool header = false;
  std::array<bool, kStateCount> have_trans{}, have_emit{};

  auto fail = [&](const std::string& what) {
    throw InputError("model line " + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(is, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);

    if (key == "hmm-model") {
      if (toks.size() != 1 || toks[0] != "1") fail("unsupported model version");
      header = true;
    } else if (key == "states") {
      if (toks.size() != kStateCount) fail("expected three states");
      for (std::size_t s = 0; s < kStateCount; ++s) {
        if (parse_state(toks[s]) != kStates[s]) fail("states out of order");
      }
    } else if (key == "alphabet") {
      if (toks.size() != 3) fail("alphabet needs three fields");
      m.alphabet.n_buckets = std::stoi(toks[0]);
      if (m.alphabet.n_buckets < 1) fail("alphabet needs at least one bucket");
      m.alphabet.lowest_edge_db = parse_double(toks[1]);
      m.alphabet.bucket_width_db = parse_double(toks[2]);
    } else if (key == "trained") {
      if (toks.size() != 1) fail("trained flag needs one field");
      m.trained = toks[0] == "1";
    } else if (key == "prior") {
      if (toks.size() != kStateCount) fail("prior needs three entries");
      for (std::size_t s = 0; s < kStateCount; ++s) m.prior[s] = parse_double(toks[s]);
    } else if (key == "transition" || key == "emission") {
      if (toks.empty()) fail("missing state name");
      const std::size_t s = idx(parse_state(toks[0]));
      std::vector<double> row;
      for (std::size_t i = 1; i < toks.size(); ++i) row.push_back(parse_double(toks[i]));
      if (key == "transition") {
        if (row.size() != kStateCount) fail("transition row needs three entries");
        std::copy(row.begin(), row.end(), m.transition[s].begin());
        have_trans[s] = true;
      } else {
        m.emission[s] = std::move(row);
        have_emit[s] = true;
      }
    } else {
      fail("unknown record '" + key + "'");
    }
  }
  if (!header) throw InputError("not an HMM model file");
  for (std::size_t s = 0; s < kStateCount; ++s) {
    if (!have_trans[s] || !have_emit[s]) throw InputError("model file is missing rows");
  }
  m.check_stochastic(1e-9);
  return m;
}

}  // namespace d2dsim::hmm
