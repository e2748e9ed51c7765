#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reasonforge/graph.hpp"
#include "reasonforge/rational.hpp"
#include "reasonforge/verifier.hpp"

namespace rforge {

struct SimilarityScore {
  Rational value;
  std::string method;
};

/// Multiset Jaccard over edges labelled (parent depth, child op, child depth).
SimilarityScore topo_similarity(const StructSignature& a, const StructSignature& b);

struct SimilarityItem {
  std::int64_t op_count = 0;
  StructSignature predicted;
  StructSignature gold;
};

struct Histogram {
  std::string bucket;
  std::size_t count = 0;
  std::vector<Rational> mass;  ///< 20 bins of width 0.05; 1.0 falls in the last
};

constexpr std::size_t kSimilarityBins = 20;

/// One normalized histogram per non-empty bucket. Throws EmptyBucket when no
/// item falls in any bucket.
std::vector<Histogram> similarity_distribution(const std::vector<SimilarityItem>& items,
                                               const std::vector<Bucket>& buckets);
std::string histogram_csv(const std::vector<Histogram>& hists);

struct ErrorDistribution {
  std::map<Failure, std::size_t> counts;  ///< step failures by type
  std::size_t answer_only = 0;            ///< every step OK but the answer is wrong
  std::size_t failing_steps = 0;

  /// Share of failing steps per type; sums to 100 when any step failed.
  std::map<Failure, Rational> percentages() const;
};

ErrorDistribution error_distribution(const std::vector<EvalResult>& results);
std::string error_csv(const ErrorDistribution& d);

}  // namespace rforge
