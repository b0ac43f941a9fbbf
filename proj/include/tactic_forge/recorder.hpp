#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tactic_forge/corpus.hpp"
#include "tactic_forge/proof_env.hpp"

namespace tactic_forge {

class SinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PairSink {
 public:
  virtual ~PairSink() = default;
  virtual void emit(const PairRecord& pair) = 0;
};

class MemorySink : public PairSink {
 public:
  void emit(const PairRecord& pair) override { pairs.push_back(pair); }
  std::vector<PairRecord> pairs;
};

class JsonlSink : public PairSink {
 public:
  explicit JsonlSink(std::ostream& out) : out_(out) {}
  void emit(const PairRecord& pair) override {
    out_ << pair_json(pair).dump() << '\n';
    if (!out_) throw SinkError("failed writing pair record");
  }

 private:
  std::ostream& out_;
};

/// Collects pairs for one file. Seqs start at 0 and grow by one per recorded
/// pair, whether or not the pair is later flushed.
class RecordingSession : public PairRecorder {
 public:
  RecordingSession(std::string file, PairSink& sink) : file_(std::move(file)), sink_(&sink) {}

  void begin_lemma(std::string lemma) { lemma_ = std::move(lemma); }

  std::size_t record(const ProofState& state, std::string_view tactic) override {
    pending_.push_back({file_, lemma_, next_seq_++, state, normalize_tactic(tactic), std::nullopt});
    return pending_.size() - 1;
  }

  void on_result(std::size_t handle, const std::vector<ProofState>& subgoals) override {
    pending_.at(handle).children = subgoals;
  }

  const std::vector<PairRecord>& pending() const { return pending_; }

  /// Sends pending pairs to the sink in recording order.
  void flush() {
    for (const auto& p : pending_) sink_->emit(p);
    pending_.clear();
  }

  void discard() { pending_.clear(); }

  Seq next_seq() const { return next_seq_; }

 private:
  std::string file_;
  std::string lemma_;
  PairSink* sink_;
  std::vector<PairRecord> pending_;
  Seq next_seq_ = 0;
};

/// Instruments `script_text` and runs it on `statement`, recording into the session.
inline ProofOutcome record_lemma(const ProofEnv& env, RecordingSession& session, const std::string& lemma,
                                 const ProofState& statement, const std::string& script_text) {
  session.begin_lemma(lemma);
  Script instrumented = instrument(parse_script(script_text));
  return run_script(env, GoalStack{{statement}}, instrumented, &session);
}

}  // namespace tactic_forge
