// Copyright 2026 The hfreadout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// QND fidelity, readout fidelity and repeatability of a single measurement, and
// the repeated-measurement error classifier with its synthetic record source.
//
// States are labelled 0, 1 (computational), 2, 3 and 4+ (leaked). Outcomes are 0 or 1.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hfro {

inline constexpr int kStateCount = 5;

/// "0", "1", "2", "3", "4+".
std::string state_label(int state);
int parse_state_label(const std::string &text);

/// P(i_s, j_m | k_s) for post-state i, outcome j and prepared state k, over all five states.
class ConditionalTable {
  public:
    /// Ideal readout: every state is left alone; leaked states report outcome 1.
    static ConditionalTable ideal();

    double &at(int post, int outcome, int prepared) { return p_[index(post, outcome, prepared)]; }
    double at(int post, int outcome, int prepared) const { return p_[index(post, outcome, prepared)]; }

    /// P(j_s | k_s) regardless of outcome.
    double post_state(int post, int prepared) const;
    /// P(j_m | k_s) regardless of post-state.
    double outcome(int outcome, int prepared) const;

    /// Throws InvalidParameter when an entry leaves [0, 1] or a prepared row misses 1 by more than 1e-9.
    void validate() const;

  private:
    static int index(int post, int outcome, int prepared);
    std::array<double, kStateCount * 2 * kStateCount> p_{};
};

struct QndDecomposition {
    double q = 0.0;
    double eps_assign = 0.0;
    double eps_trans = 0.0;
    double eps_trans_bitflip = 0.0;
    double eps_trans_leakage = 0.0;
};

/// Q = [P(1_s,1_m|1_s) + P(0_s,0_m|0_s)] / 2 with its assignment and transition split.
QndDecomposition qnd_fidelity(const ConditionalTable &t);

/// F = [P(0_m|0_s) + P(1_m|1_s)] / 2.
double readout_fidelity(const ConditionalTable &t);

/// P(i_m2 | j_m1, k_s) for two back-to-back measurements, k in {0, 1}.
struct RepeatTable {
    std::array<double, 8> p{};

    double &at(int second, int first, int prepared) { return p[(prepared * 2 + first) * 2 + second]; }
    double at(int second, int first, int prepared) const { return p[(prepared * 2 + first) * 2 + second]; }
};

/// Two applications of t. Rows whose first outcome never occurs are NaN.
RepeatTable compose_repeat(const ConditionalTable &t);

/// R = [P(0_m2|0_m1,0_s) + P(1_m2|1_m1,1_s)] / 2. Throws InvalidParameter when either row is undefined.
double repeatability(const RepeatTable &t);

inline constexpr int kDefaultSequenceLength = 18;

struct ShotRecord {
    int prepared = 0;
    int pre_leak = 0;   // 0 or 1 means computational
    std::vector<std::uint8_t> outcomes;
    int post_leak = 0;
};

inline bool is_leaked(int label) { return label >= 2; }

/// Per-measurement error rates recovered from a record set.
struct ErrorTally {
    int sequence_length = kDefaultSequenceLength;
    std::uint64_t records = 0;
    std::uint64_t discarded = 0;         // pre_leak non-computational
    std::uint64_t leaked_sequences = 0;  // post_leak non-computational among kept
    std::uint64_t clean_sequences = 0;   // kept and not leaked; basis of the two counts below
    std::uint64_t assignment_events = 0;
    std::uint64_t transition_events = 0;

    double eps_assign = 0.0;
    double eps_trans_bitflip = 0.0;
    double eps_trans_leakage = 0.0;
    double sigma_assign = 0.0;
    double sigma_trans_bitflip = 0.0;
    double sigma_trans_leakage = 0.0;

    double eps_trans() const { return eps_trans_bitflip + eps_trans_leakage; }
    /// 1 - eps_assign - eps_trans.
    double q() const { return 1.0 - eps_assign - eps_trans(); }
};

/// Events found in one outcome sequence relative to the prepared state.
struct SequenceEvents {
    int assignment = 0;
    int transition = 0;
};

/// A change of assignment that persists for at least two measurements, or sits in
/// the last position, is a transition; a change lasting one measurement is an
/// assignment error.
SequenceEvents classify_sequence(int prepared, const std::vector<std::uint8_t> &outcomes);

struct ExpectedEvents {
    double assignment = 0.0;
    double transition = 0.0;
};

/// Mean events per sequence for misassignment a and per-measurement bit-flip b,
/// with no leakage. The state may flip before each readout.
ExpectedEvents expected_events(double a, double b, int length);

/// Classifies records and inverts the event counts for the per-measurement rates.
/// Throws InvalidParameter on malformed records, an empty set or when every record is discarded.
ErrorTally classify_records(const std::vector<ShotRecord> &records, int workers = 1);

struct SynthRates {
    double assign = 0.0;
    double bitflip = 0.0;
    /// Sequence leakage probability divided by the sequence length.
    double leakage = 0.0;
    /// Probability the pre-sequence leakage check reports a leaked state.
    double initial_leakage = 0.0;
    int sequence_length = kDefaultSequenceLength;

    void validate() const;
};

/// Markov records: per measurement the state may leak or flip, then the outcome is
/// misassigned with probability assign. A leaked state reports one fixed outcome for
/// the rest of the sequence. Record r is drawn from its own stream seeded by (seed, r),
/// and even records are prepared in 0, odd ones in 1.
std::vector<ShotRecord> synthesize_records(const SynthRates &rates, std::uint64_t n_shots, std::uint64_t seed,
                                           int workers = 1);

/// CSV rows: prepared,pre_leak,o1..oN,post_leak with a header line.
void write_records_csv(std::ostream &out, const std::vector<ShotRecord> &records);
std::vector<ShotRecord> read_records_csv(std::istream &in);

}  // namespace hfro
