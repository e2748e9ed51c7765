#include "reasonforge/analysis.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "reasonforge/error.hpp"

namespace rforge {

namespace {

using EdgeLabel = std::tuple<std::uint32_t, Op, std::uint32_t>;

std::map<EdgeLabel, std::size_t> edge_labels(const StructSignature& s) {
  std::map<std::uint32_t, std::uint32_t> depth;
  auto entries = s.entries;
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; });
  for (const auto& e : entries) {
    std::uint32_t d = 0;
    for (auto p : e.parents) d = std::max(d, depth[p] + 1);
    depth[e.rank] = d;
  }
  std::map<EdgeLabel, std::size_t> out;
  for (const auto& e : entries) {
    for (auto p : e.parents) ++out[{depth[p], e.op, depth[e.rank]}];
  }
  return out;
}

}  // namespace

SimilarityScore topo_similarity(const StructSignature& a, const StructSignature& b) {
  auto ea = edge_labels(a), eb = edge_labels(b);
  std::size_t inter = 0, uni = 0;
  for (const auto& [label, n] : ea) {
    auto it = eb.find(label);
    std::size_t m = it == eb.end() ? 0 : it->second;
    inter += std::min(n, m);
    uni += std::max(n, m);
  }
  for (const auto& [label, m] : eb) {
    if (!ea.count(label)) uni += m;
  }
  SimilarityScore s;
  s.method = "depth-edge-jaccard";
  // Two edgeless graphs compare by their entries alone.
  if (uni == 0) {
    s.value = a == b ? 1 : 0;
  } else {
    s.value = Rational(static_cast<long long>(inter), static_cast<long long>(uni));
  }
  return s;
}

std::vector<Histogram> similarity_distribution(const std::vector<SimilarityItem>& items,
                                               const std::vector<Bucket>& buckets) {
  std::vector<Histogram> out;
  for (const auto& b : buckets) {
    Histogram h;
    h.bucket = b.name;
    std::vector<std::size_t> counts(kSimilarityBins, 0);
    for (const auto& item : items) {
      if (!b.contains(item.op_count)) continue;
      Rational v = topo_similarity(item.predicted, item.gold).value;
      Rational scaled = v * static_cast<long long>(kSimilarityBins);
      BigInt floor = numerator(scaled) / denominator(scaled);
      std::size_t bin = floor >= kSimilarityBins ? kSimilarityBins - 1 : static_cast<std::size_t>(floor);
      ++counts[bin];
      ++h.count;
    }
    if (h.count == 0) continue;
    for (auto c : counts) h.mass.emplace_back(static_cast<long long>(c), static_cast<long long>(h.count));
    out.push_back(std::move(h));
  }
  if (out.empty()) throw Error(Errc::EmptyBucket, "no similarity items fall in the configured buckets");
  return out;
}

std::string histogram_csv(const std::vector<Histogram>& hists) {
  std::ostringstream out;
  out << "bucket,bin_lo,bin_hi,count,fraction\n";
  for (const auto& h : hists) {
    for (std::size_t i = 0; i < h.mass.size(); ++i) {
      Rational lo(static_cast<long long>(i), static_cast<long long>(kSimilarityBins));
      Rational hi(static_cast<long long>(i + 1), static_cast<long long>(kSimilarityBins));
      auto count = h.mass[i] * static_cast<long long>(h.count);
      out << h.bucket << ',' << to_decimal(lo, 2) << ',' << to_decimal(hi, 2) << ',' << to_decimal(count, 0) << ','
          << to_decimal(h.mass[i]) << '\n';
    }
  }
  return out.str();
}

std::map<Failure, Rational> ErrorDistribution::percentages() const {
  std::map<Failure, Rational> out;
  for (const auto& [f, n] : counts) {
    out[f] = failing_steps == 0 ? Rational(0)
                                : Rational(static_cast<long long>(n) * 100, static_cast<long long>(failing_steps));
  }
  return out;
}

ErrorDistribution error_distribution(const std::vector<EvalResult>& results) {
  ErrorDistribution d;
  d.counts = {{Failure::MissingNode, 0}, {Failure::WrongParents, 0}, {Failure::WrongValue, 0}};
  for (const auto& r : results) {
    for (const auto& [f, n] : r.failure_counts()) {
      d.counts[f] += n;
      d.failing_steps += n;
    }
    if (r.process_acc == 1 && !r.answer_correct) ++d.answer_only;
  }
  return d;
}

std::string error_csv(const ErrorDistribution& d) {
  std::ostringstream out;
  out << "type,count,percent\n";
  auto pct = d.percentages();
  for (const auto& [f, n] : d.counts) out << failure_name(f) << ',' << n << ',' << to_decimal(pct[f], 2) << '\n';
  out << "ANSWER_ONLY," << d.answer_only << ",\n";
  return out.str();
}

}  // namespace rforge
