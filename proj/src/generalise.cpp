#include "suitgraph/generalise.hpp"

namespace suitgraph {

SuitabilityGraph restore_graph(const DecisionProblem& problem, const ClassHierarchy& hierarchy,
                               const ObjectCluster& cluster, const KnowledgeBase& store, bool reset_posteriors) {
    std::map<ClassId, double> sims;
    for (const auto& m : cluster.members) sims[m] = hierarchy.wup_similarity(problem.target, m);
    auto graph = SuitabilityGraph::init(cluster, sims, problem.action, problem.mode);

    std::map<ClassId, double> priors;
    for (const auto& m : cluster.members) {
        auto rec = store.query({problem.action, problem.mode, problem.target, m});
        if (!rec) continue;
        graph.set_record(m, *rec);
        priors[m] = rec->posterior;
    }
    bool usable = !reset_posteriors && !priors.empty();
    if (usable) {
        usable = false;
        for (const auto& [_, p] : priors) usable = usable || p > 0.0;
    }
    if (usable) graph.set_priors(priors);
    return graph;
}

GeneraliseResult generalise_execution_model(const DecisionProblem& problem, const ClassHierarchy& hierarchy,
                                            const ModelRegistry& models, KnowledgeBase& store,
                                            const SuitabilityConfig& cfg, const Executor& execute, Rng& rng,
                                            const GeneraliseOptions& options) {
    GeneraliseResult result;
    result.cluster.target = problem.target;
    if (!hierarchy.contains(problem.target)) throw UnknownClassError(problem.target);

    if (models.has_model(problem.target)) {
        result.used_own_model = true;
        result.selected = problem.target;
        result.outcome = execute(problem.target, problem.target);
        return result;
    }

    result.cluster = object_cluster(hierarchy, problem.target, models, options.max_ancestor_hops);
    if (result.cluster.empty()) {
        result.specification_needed = true;
        return result;
    }

    auto graph = restore_graph(problem, hierarchy, result.cluster, store, options.reset_posteriors);
    result.success_estimates = graph.update(cfg, rng);
    const ClassId chosen = options.selector ? options.selector(graph, rng) : select_model(graph, rng);

    const bool success = execute(problem.target, chosen);

    graph.record(chosen, success);
    result.selected = chosen;
    result.outcome = success;
    result.posteriors = graph.posteriors();
    for (const auto& [c, p] : result.posteriors) {
        ExperienceKey key{problem.action, problem.mode, problem.target, c};
        if (c == chosen)
            store.append(key, success, p);
        else
            store.set_posterior(key, p);
    }
    return result;
}

std::map<ClassId, ExperienceRecord> sibling_records(const ClassHierarchy& hierarchy, const ClassId& model_class,
                                                    const std::string& action, const std::string& mode,
                                                    const KnowledgeBase& store) {
    std::map<ClassId, ExperienceRecord> out;
    for (const auto& s : hierarchy.siblings(model_class))
        out[s] = store.query({action, mode, s, model_class}).value_or(ExperienceRecord{});
    return out;
}

std::map<ClassId, ExperienceRecord> cluster_records(const ObjectCluster& cluster, const std::string& action,
                                                    const std::string& mode, const KnowledgeBase& store) {
    std::map<ClassId, ExperienceRecord> out;
    for (const auto& m : cluster.members)
        out[m] = store.query({action, mode, cluster.target, m}).value_or(ExperienceRecord{});
    return out;
}

}  // namespace suitgraph
