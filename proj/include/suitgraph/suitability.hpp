#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "suitgraph/ontology.hpp"
#include "suitgraph/rng.hpp"

namespace suitgraph {

inline constexpr const char* kDefaultMode = "default";

/// Experience is always scoped by action and qualitative mode.
struct ExperienceKey {
    std::string action;
    std::string mode = kDefaultMode;
    ClassId target;     // object the action was executed on
    ClassId candidate;  // class whose execution model was used

    auto operator<=>(const ExperienceKey&) const = default;
    bool valid() const noexcept {
        return !action.empty() && !mode.empty() && !target.empty() && !candidate.empty();
    }
};

struct ExperienceRecord {
    std::int64_t n_success = 0;
    std::int64_t n_failure = 0;
    /// Last selection posterior P_t(candidate | target, S) for this pair.
    double posterior = 0.0;

    std::int64_t trial_count() const noexcept { return n_success + n_failure; }
    bool operator==(const ExperienceRecord&) const = default;
};

ExperienceRecord record_outcome(ExperienceRecord record, bool success);

class ConfigError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SuitabilityConfig {
    double alpha0 = 3.0;
    double beta0 = 3.0;
    double tau = 0.6;
    int beta_sample_count = 10;
    std::uint64_t rng_seed = 0;
    /// Generalisation to the parent requires at least one sibling.
    bool strict_generalisation = true;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
    bool operator==(const SuitabilityConfig&) const = default;
};

/// Lower bound applied to each beta parameter after the count update.
inline constexpr double kBetaParamFloor = 1e-6;

struct BetaParams {
    double alpha;
    double beta;
};

/// Beta(alpha0 + N+ - 1, beta0 + N- - 1), each parameter clamped at
/// kBetaParamFloor.
BetaParams posterior_beta_params(const ExperienceRecord& record, const SuitabilityConfig& cfg);

/// Mean of `cfg.beta_sample_count` draws from the posterior beta. Always in
/// the open interval (0, 1).
double success_probability(const ExperienceRecord& record, const SuitabilityConfig& cfg, Rng& rng);

/// Analytic mean alpha / (alpha + beta) of the posterior beta.
double deterministic_success_probability(const ExperienceRecord& record, const SuitabilityConfig& cfg);

class GraphError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Weighted distribution over the object cluster of one
/// (target, action, mode) decision problem.
class SuitabilityGraph {
public:
    struct Candidate {
        double similarity = 1.0;
        ExperienceRecord record;
    };

    /// Success-probability source for one update; called once per candidate
    /// in sorted candidate order.
    using SuccessEstimator = std::function<double(const ClassId&, const ExperienceRecord&)>;

    /// Uniform prior over the cluster, zero counts. Throws GraphError on an
    /// empty cluster or a member without a similarity.
    static SuitabilityGraph init(const ObjectCluster& cluster, const std::map<ClassId, double>& similarities,
                                 std::string action, std::string mode = kDefaultMode);

    const ClassId& target() const noexcept { return target_; }
    const std::string& action() const noexcept { return action_; }
    const std::string& mode() const noexcept { return mode_; }
    std::size_t size() const noexcept { return candidates_.size(); }
    const std::map<ClassId, Candidate>& candidates() const noexcept { return candidates_; }
    std::vector<ClassId> candidate_ids() const;

    double posterior(const ClassId& c) const;
    std::map<ClassId, double> posteriors() const;

    void set_record(const ClassId& c, const ExperienceRecord& record);
    /// Replaces the current distribution with `priors` (renormalised).
    /// Candidates missing from `priors` get 1/size before renormalising.
    void set_priors(const std::map<ClassId, double>& priors);

    /// One recursion step: posterior <- eta * s * p * posterior. Returns the
    /// success probabilities that were used.
    std::map<ClassId, double> update(const SuccessEstimator& estimate);
    /// Update with the sampled beta-mean estimator.
    std::map<ClassId, double> update(const SuitabilityConfig& cfg, Rng& rng);

    /// Folds an outcome into the candidate's counts.
    void record(const ClassId& c, bool success);

private:
    SuitabilityGraph() = default;
    Candidate& at(const ClassId& c);
    const Candidate& at(const ClassId& c) const;

    ClassId target_;
    std::string action_;
    std::string mode_;
    std::map<ClassId, Candidate> candidates_;
    // Normalised log posteriors; kept in log space so long campaigns do not
    // underflow to zero.
    std::map<ClassId, double> log_posterior_;
};

/// Posteriors within this distance of the maximum are ties.
inline constexpr double kTieTolerance = 1e-12;

/// Argmax of the posterior. Ties are broken uniformly with one rng draw;
/// no draw is consumed when the maximum is unique.
ClassId select_model(const SuitabilityGraph& graph, Rng& rng);

class MissingRecordError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// True iff `model_class`'s model reached `tau` on every sibling object.
/// `records` maps each sibling to the experience of applying model_class's
/// model to it. An empty sibling set passes only when strict mode is off.
bool generalisation_check(const ClassId& model_class, const std::vector<ClassId>& siblings,
                          const std::map<ClassId, ExperienceRecord>& records, const SuitabilityConfig& cfg);

/// True iff a new model must be learned for the cluster's target: the
/// cluster is empty, or every member's failure probability reaches `tau`.
bool specification_check(const ObjectCluster& cluster, const std::map<ClassId, ExperienceRecord>& records,
                         const SuitabilityConfig& cfg);

}  // namespace suitgraph
