#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "suitgraph/experience_store.hpp"
#include "suitgraph/ontology.hpp"
#include "suitgraph/suitability.hpp"

namespace suitgraph {

/// Runs one action execution of `model_class`'s model on `object` and
/// reports whether it succeeded. Throwing means the execution could not be
/// attempted at all.
using Executor = std::function<bool(const ClassId& object, const ClassId& model_class)>;

/// Picks a candidate from an updated graph. Defaults to select_model.
using Selector = std::function<ClassId(const SuitabilityGraph&, Rng&)>;

struct DecisionProblem {
    ClassId target;
    std::string action;
    std::string mode = kDefaultMode;
};

struct GeneraliseOptions {
    /// Start from a uniform prior instead of the stored posteriors.
    bool reset_posteriors = false;
    std::optional<int> max_ancestor_hops;
    Selector selector;
};

struct GeneraliseResult {
    std::optional<ClassId> selected;
    std::optional<bool> outcome;
    bool used_own_model = false;
    /// Set when the cluster is empty and no execution took place.
    bool specification_needed = false;
    ObjectCluster cluster;
    std::map<ClassId, double> posteriors;
    std::map<ClassId, double> success_estimates;
};

/// Rebuilds the suitability graph of a decision problem from stored
/// experience: counts from the store, prior from the stored posteriors
/// (uniform for candidates without an entry). Throws GraphError on an empty
/// cluster.
SuitabilityGraph restore_graph(const DecisionProblem& problem, const ClassHierarchy& hierarchy,
                               const ObjectCluster& cluster, const KnowledgeBase& store, bool reset_posteriors = false);

/// Selects a model for `problem.target` and executes it.
///
/// A target with its own model is executed directly and nothing is
/// recorded. Otherwise the cluster's graph is updated once, a model chosen,
/// executed, and the outcome plus every candidate's posterior written to
/// `store`. If the executor throws, the store is left untouched.
GeneraliseResult generalise_execution_model(const DecisionProblem& problem, const ClassHierarchy& hierarchy,
                                            const ModelRegistry& models, KnowledgeBase& store,
                                            const SuitabilityConfig& cfg, const Executor& execute, Rng& rng,
                                            const GeneraliseOptions& options = {});

/// Records of applying `model_class`'s model to each of its siblings, with
/// empty records where nothing is stored yet.
std::map<ClassId, ExperienceRecord> sibling_records(const ClassHierarchy& hierarchy, const ClassId& model_class,
                                                    const std::string& action, const std::string& mode,
                                                    const KnowledgeBase& store);

/// Records of applying each cluster member's model to the cluster target.
std::map<ClassId, ExperienceRecord> cluster_records(const ObjectCluster& cluster, const std::string& action,
                                                    const std::string& mode, const KnowledgeBase& store);

}  // namespace suitgraph
