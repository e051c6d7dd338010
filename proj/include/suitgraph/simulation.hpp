#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "suitgraph/experience_store.hpp"
#include "suitgraph/generalise.hpp"
#include "suitgraph/ontology.hpp"
#include "suitgraph/rng.hpp"
#include "suitgraph/suitability.hpp"

namespace suitgraph {

/// True success probability of applying a model class to a target class.
///
/// File format:
///   {"default": 0.0, "entries": [{"target": "orange", "model": "apple", "p": 1.0}, ...]}
class GroundTruthMatrix {
public:
    explicit GroundTruthMatrix(double default_p = 0.0);

    void set(const ClassId& target, const ClassId& model, double p);
    double probability(const ClassId& target, const ClassId& model) const;
    double default_probability() const noexcept { return default_; }

    static GroundTruthMatrix from_json(const std::string& text);
    static GroundTruthMatrix load(const std::string& path);
    std::string to_json() const;

private:
    std::map<std::pair<ClassId, ClassId>, double> entries_;
    double default_;
};

/// Bernoulli draw with the ground-truth probability (one uniform draw).
bool simulate_execution(const GroundTruthMatrix& gt, const ClassId& target, const ClassId& model, Rng& rng);

enum class Strategy { Suitability, Random, SimilarityOnly, CountOnly };

std::string to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

/// Selection rules for ablations:
///   Suitability     select_model (argmax of the posterior)
///   Random          uniform over candidates
///   SimilarityOnly  argmax of similarity, random tie-break
///   CountOnly       argmax of the analytic success mean, random tie-break
ClassId baseline_select(Strategy strategy, const SuitabilityGraph& graph, const SuitabilityConfig& cfg, Rng& rng);

struct CampaignConfig {
    int trials_per_object = 10;
    std::vector<ClassId> targets;
    SuitabilityConfig cfg;
    Strategy strategy = Strategy::Suitability;
    std::uint64_t seed = 0;
    std::string action = "grasp";
    std::string mode = kDefaultMode;
    std::optional<int> max_ancestor_hops;

    void validate(const ClassHierarchy& hierarchy) const;
};

struct TrialStep {
    int trial = 0;  // 1-based within the target
    ClassId target;
    std::optional<ClassId> selected;  // empty when a new model is needed
    std::optional<bool> outcome;
    bool used_own_model = false;
    std::map<ClassId, double> posteriors;
    std::map<ClassId, double> success_estimates;

    bool operator==(const TrialStep&) const = default;
};

struct TrialLog {
    std::string rng_algorithm = Rng::kAlgorithmName;
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::Suitability;
    SuitabilityConfig cfg;
    /// Cluster members per target, in campaign order of first appearance.
    std::map<ClassId, std::vector<ClassId>> clusters;
    std::map<ClassId, bool> own_model;
    std::vector<ClassId> target_order;
    std::vector<TrialStep> steps;

    std::string to_json() const;
};

/// Posterior snapshots must sum to one within this tolerance.
inline constexpr double kNormalisationTolerance = 1e-9;

class CampaignError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runs `trials_per_object` rounds of generalise_execution_model for each
/// target in order, all drawing from one Rng seeded with `config.seed`.
/// Experience goes into `store` when given, otherwise into a private one.
TrialLog run_campaign(const CampaignConfig& config, const ClassHierarchy& hierarchy, const ModelRegistry& models,
                      const GroundTruthMatrix& gt, KnowledgeBase* store = nullptr);

struct ReportRow {
    ClassId target;
    std::size_t cluster_size = 0;
    std::size_t models_attempted = 0;
    std::string o_star = "/";
    std::int64_t n_success = 0;

    bool operator==(const ReportRow&) const = default;
};

/// Per-target cluster size, distinct models attempted, the model whose
/// analytic success mean reaches tau (highest mean wins, "/" if none) and
/// the total successes.
std::vector<ReportRow> summarize(const TrialLog& log);

std::string report_csv(const std::vector<ReportRow>& rows);
std::string report_json(const std::vector<ReportRow>& rows);

}  // namespace suitgraph
