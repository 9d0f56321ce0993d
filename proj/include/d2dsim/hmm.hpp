#pragma once

// Hidden Markov model baseline allocator.
//
// States are the three actors of a grant (BS, cellular user, D2D pair). The
// observation alphabet is (application, SINR bucket): buckets are 10 dB wide
// starting at `lowest_edge_db`, with the first and last bucket open-ended.

#include <array>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "d2dsim/allocation.hpp"

namespace d2dsim::hmm {

enum class State : std::uint8_t { BaseStation = 0, CellularUser = 1, Pair = 2 };

inline constexpr std::size_t kStateCount = 3;

std::string_view to_string(State s);
State parse_state(std::string_view name);

/// Bad model input: unknown state, length mismatch, malformed model file.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Alphabet {
  int n_buckets = 10;
  double lowest_edge_db = -10.0;  // upper edge of bucket 0
  double bucket_width_db = 10.0;

  std::size_t size() const { return kApplicationCount * static_cast<std::size_t>(n_buckets); }
  int bucket_of(double sinr_db) const;
  /// Midpoint of the bucket's nominal 10 dB range.
  double representative_db(int bucket) const;
  std::size_t symbol(Application app, int bucket) const;
  std::size_t symbol_for(Application app, double sinr_linear) const;
  Application application_of(std::size_t symbol) const;
  int bucket_of_symbol(std::size_t symbol) const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

using Matrix3 = std::array<std::array<double, kStateCount>, kStateCount>;

struct HmmModel {
  std::array<double, kStateCount> prior{1.0, 0.0, 0.0};
  Matrix3 transition{{{0.02, 0.80, 0.18}, {0.19, 0.01, 0.80}, {0.18, 0.80, 0.02}}};
  Alphabet alphabet;
  std::array<std::vector<double>, kStateCount> emission;  // rows over alphabet symbols
  bool trained = false;

  /// Untrained default: demand/response table as transitions, uniform emissions.
  static HmmModel defaults(Alphabet alphabet = {});

  double a(State from, State to) const {
    return transition[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
  }
  double b(State s, std::size_t symbol) const {
    return emission[static_cast<std::size_t>(s)].at(symbol);
  }

  /// Throws InputError unless every distribution sums to 1 within tol.
  void check_stochastic(double tol = 1e-12) const;
};

/// pi[q1] * prod a[q_n, q_n+1].
double path_probability(const HmmModel& model, std::span<const State> path);

/// prod P(x_n | q_n).
double path_observation_likelihood(const HmmModel& model, std::span<const State> path,
                                   std::span<const std::size_t> observations);

/// P(X | model) by the forward recursion over the trellis.
double sequence_likelihood(const HmmModel& model, std::span<const std::size_t> observations);

struct LabeledSequence {
  std::vector<State> states;
  std::vector<std::size_t> observations;
};

struct TrainingOptions {
  bool reestimate_prior = false;
  bool reestimate_transition = false;
};

/// Emission frequencies per state with add-one smoothing; prior and
/// transitions are kept unless re-estimation is requested.
HmmModel train(const HmmModel& model, std::span<const LabeledSequence> corpus,
               const TrainingOptions& opts = {});

State sample_next_state(const HmmModel& model, State from, Rng& rng);

/// Draws an SINR bucket for `app` from the Pair state's emission row.
int sample_sinr_bucket(const HmmModel& model, Application app, Rng& rng);

/// One HMM iteration: each pair's lender is chosen by walking the state
/// chain from the BS until a cellular-user visit, then picking uniformly
/// among RB-capable users; the SINR comes from the trained distribution.
/// The geometric channel is never consulted.
IterationResult hmm_allocate(ScenarioState& state, const Deployment& dep,
                             std::span<const Application> demands, const RadioConfig& cfg,
                             const AllocationPolicy& policy, const HmmModel& model, Rng& rng);

/// Flat text form; probabilities are written in shortest round-trip notation.
void save(const HmmModel& model, std::ostream& os);
HmmModel load(std::istream& is);

}  // namespace d2dsim::hmm
