#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "reasonforge/corpus.hpp"
#include "reasonforge/reward.hpp"
#include "reasonforge/verifier.hpp"

namespace rforge {

/// One line of a rollout file: {"problemId", "sampleIndex", "outputText"}.
struct Rollout {
  std::string problem_id;
  std::uint64_t sample_index = 0;
  std::string output_text;
};

Json rollout_to_json(const Rollout& r);
Rollout rollout_from_json(const Json& j);
std::vector<Rollout> read_rollouts(const std::string& path);

/// Scores every rollout against its gold record. Output order follows the
/// input. Throws InvalidArgument for a problem id absent from `gold`.
std::vector<SampleRecord> evaluate_rollouts(const std::vector<CorpusRecord>& gold, const std::vector<Rollout>& rollouts,
                                            unsigned threads = 1);

/// {"problemId", "sampleIndex", ...score_fields} per rollout, in input order.
std::vector<Json> reward_rollouts(const std::vector<CorpusRecord>& gold, const std::vector<Rollout>& rollouts,
                                  const RewardConfig& cfg, unsigned threads = 1);

/// Runs the command line with `args` (program name excluded).
/// Returns 0 on success, 1 on a domain error, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rforge
