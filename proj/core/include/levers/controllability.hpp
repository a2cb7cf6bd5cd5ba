#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "levers/fcm.hpp"

namespace levers {

/// Where each factor sits relative to the set of all minimal control
/// configurations. The three lists partition the factors and are sorted.
struct NodeClassification {
  std::vector<FactorId> always;
  std::vector<FactorId> never;
  std::vector<FactorId> sometimes;

  friend bool operator==(const NodeClassification&,
                         const NodeClassification&) = default;
};

/// One minimal set of driver factors.
struct ControlConfiguration {
  std::vector<FactorId> members;  // sorted
  double score = 0.0;
  // Factors with no directed path from any member.
  std::vector<FactorId> warnings;

  friend bool operator==(const ControlConfiguration&,
                         const ControlConfiguration&) = default;
};

struct ComponentSummary {
  std::vector<FactorId> factors;
  std::size_t matching_size = 0;
  // Minimal configuration size for this component: max(N_c - m_c, 1).
  std::size_t configuration_size = 0;
  std::size_t configuration_count = 0;

  std::size_t deficiency() const noexcept {
    return factors.size() - matching_size;
  }

  friend bool operator==(const ComponentSummary&,
                         const ComponentSummary&) = default;
};

struct Budget {
  std::size_t max_configs = 10'000;
  std::chrono::milliseconds max_time{60'000};
};

/// Shared flag polled between candidate tests.
class CancellationToken {
 public:
  CancellationToken() : flag_(std::make_shared<std::atomic<bool>>(false)) {}

  void cancel() const noexcept { flag_->store(true); }
  bool cancelled() const noexcept { return flag_->load(); }

 private:
  std::shared_ptr<std::atomic<bool>> flag_;
};

struct EnumerationOptions {
  Budget budget;
  CancellationToken cancellation;
  // Called with the running total of candidate forcing tests.
  std::function<void(std::size_t)> on_progress;
  // 0 selects std::thread::hardware_concurrency().
  unsigned workers = 0;
};

struct AnalysisReport {
  std::shared_ptr<const FcmGraph> graph;
  std::size_t matching_size = 0;
  std::size_t configuration_size = 0;
  NodeClassification classification;
  std::vector<ComponentSummary> components;
  std::vector<ControlConfiguration> configurations;
  bool truncated = false;
  // "max_configs", "max_time" or "cancelled" when truncated.
  std::string truncation_reason;
  std::map<FactorId, std::size_t> frequencies;
  std::vector<std::string> neutral_influences;
  std::vector<FactorId> defaulted_controllability;
  // Perspective whose labels produced the scores, empty for the graph's own.
  std::string perspective;
  std::size_t candidates_tested = 0;
};

/// Polynomial-time classification of factors into in-all, in-none and
/// in-some minimal control configurations. Throws SelfLoopError.
NodeClassification classify_nodes(const FcmGraph& graph);

/// Every minimal control configuration, combined across weakly connected
/// components. Classification always completes; the configuration search
/// stops early (truncated = true) on budget exhaustion or cancellation.
/// Scores are left at zero; see score_report(). Throws SelfLoopError.
AnalysisReport enumerate_configurations(const FcmGraph& graph,
                                        const EnumerationOptions& options = {});

/// True iff `candidate` is one of the configurations enumerate_configurations
/// would return. Unknown ids make the candidate invalid.
bool is_configuration(const FcmGraph& graph,
                      const std::vector<FactorId>& candidate);

/// Factors that no member of `config` reaches along directed links.
std::vector<FactorId> reachability_warnings(const FcmGraph& graph,
                                            const std::vector<FactorId>& config);

/// Generic rank of the Kalman matrix [B, AB, ..., A^{N-1}B] for the
/// structural pattern of the graph with one input per config member,
/// estimated from three seeded random realizations of the nonzero pattern.
/// Throws InvalidArgument on an empty config or unknown ids.
std::size_t structural_controllability_rank(
    const FcmGraph& graph, const std::vector<FactorId>& config);

}  // namespace levers
