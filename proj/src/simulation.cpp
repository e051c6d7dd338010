#include "suitgraph/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "suitgraph/canonical_json.hpp"

namespace suitgraph {

using nlohmann::json;

namespace {

void check_probability(double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(what + " must lie in [0, 1]");
}

json config_json(const SuitabilityConfig& cfg) {
    return {{"alpha0", cfg.alpha0}, {"beta0", cfg.beta0}, {"tau", cfg.tau}, {"beta_sample_count", cfg.beta_sample_count}};
}

// Uniform choice among the candidates whose score is within tolerance of the
// best; no draw is consumed for a unique maximum.
ClassId argmax_with_ties(const std::vector<std::pair<ClassId, double>>& scored, Rng& rng) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [_, s] : scored) best = std::max(best, s);
    std::vector<ClassId> ties;
    for (const auto& [c, s] : scored)
        if (best - s <= kTieTolerance) ties.push_back(c);
    if (ties.size() == 1) return ties.front();
    return ties[rng.index(ties.size())];
}

}  // namespace

GroundTruthMatrix::GroundTruthMatrix(double default_p) : default_(default_p) {
    check_probability(default_p, "default ground-truth probability");
}

void GroundTruthMatrix::set(const ClassId& target, const ClassId& model, double p) {
    check_probability(p, "ground-truth probability for (" + target + ", " + model + ")");
    entries_[{target, model}] = p;
}

double GroundTruthMatrix::probability(const ClassId& target, const ClassId& model) const {
    auto it = entries_.find({target, model});
    return it == entries_.end() ? default_ : it->second;
}

GroundTruthMatrix GroundTruthMatrix::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("malformed ground-truth JSON: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("ground-truth document must be an object");
    double def = 0.0;
    if (doc.contains("default")) {
        if (!doc["default"].is_number()) throw std::invalid_argument("\"default\" must be a number");
        def = doc["default"].get<double>();
    }
    GroundTruthMatrix gt(def);
    if (!doc.contains("entries")) return gt;
    if (!doc["entries"].is_array()) throw std::invalid_argument("\"entries\" must be an array");
    for (const auto& e : doc["entries"]) {
        if (!e.is_object() || !e.contains("target") || !e.contains("model") || !e.contains("p") ||
            !e["target"].is_string() || !e["model"].is_string() || !e["p"].is_number())
            throw std::invalid_argument("ground-truth entry requires string target/model and numeric p");
        gt.set(e["target"].get<std::string>(), e["model"].get<std::string>(), e["p"].get<double>());
    }
    return gt;
}

GroundTruthMatrix GroundTruthMatrix::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open ground-truth file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

std::string GroundTruthMatrix::to_json() const {
    json entries = json::array();
    for (const auto& [key, p] : entries_) entries.push_back({{"target", key.first}, {"model", key.second}, {"p", p}});
    return dump_canonical({{"default", default_}, {"entries", entries}}) + "\n";
}

bool simulate_execution(const GroundTruthMatrix& gt, const ClassId& target, const ClassId& model, Rng& rng) {
    return rng.uniform01() < gt.probability(target, model);
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Suitability:
            return "suitability";
        case Strategy::Random:
            return "random";
        case Strategy::SimilarityOnly:
            return "similarity-only";
        case Strategy::CountOnly:
            return "count-only";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
    for (auto s : {Strategy::Suitability, Strategy::Random, Strategy::SimilarityOnly, Strategy::CountOnly})
        if (to_string(s) == name) return s;
    return std::nullopt;
}

ClassId baseline_select(Strategy strategy, const SuitabilityGraph& graph, const SuitabilityConfig& cfg, Rng& rng) {
    if (graph.size() == 0) throw GraphError("cannot select from an empty suitability graph");
    std::vector<std::pair<ClassId, double>> scored;
    switch (strategy) {
        case Strategy::Suitability:
            return select_model(graph, rng);
        case Strategy::Random: {
            auto ids = graph.candidate_ids();
            return ids[rng.index(ids.size())];
        }
        case Strategy::SimilarityOnly:
            for (const auto& [c, cand] : graph.candidates()) scored.emplace_back(c, cand.similarity);
            break;
        case Strategy::CountOnly:
            for (const auto& [c, cand] : graph.candidates())
                scored.emplace_back(c, deterministic_success_probability(cand.record, cfg));
            break;
    }
    return argmax_with_ties(scored, rng);
}

void CampaignConfig::validate(const ClassHierarchy& hierarchy) const {
    if (trials_per_object < 1) throw ConfigError("trials_per_object must be at least 1");
    if (targets.empty()) throw ConfigError("campaign needs at least one target");
    if (action.empty() || mode.empty()) throw ConfigError("action and mode must be non-empty");
    cfg.validate();
    for (const auto& t : targets)
        if (!hierarchy.contains(t)) throw UnknownClassError(t);
}

TrialLog run_campaign(const CampaignConfig& config, const ClassHierarchy& hierarchy, const ModelRegistry& models,
                      const GroundTruthMatrix& gt, KnowledgeBase* store) {
    config.validate(hierarchy);
    KnowledgeBase scratch;
    KnowledgeBase& kb = store ? *store : scratch;

    TrialLog log;
    log.seed = config.seed;
    log.strategy = config.strategy;
    log.cfg = config.cfg;

    Rng rng(config.seed);
    GeneraliseOptions opts;
    opts.max_ancestor_hops = config.max_ancestor_hops;
    if (config.strategy != Strategy::Suitability) {
        opts.selector = [&](const SuitabilityGraph& g, Rng& r) {
            return baseline_select(config.strategy, g, config.cfg, r);
        };
    }
    const Executor execute = [&](const ClassId& object, const ClassId& model) {
        return simulate_execution(gt, object, model, rng);
    };

    for (const auto& target : config.targets) {
        if (!log.clusters.count(target)) {
            log.target_order.push_back(target);
            log.clusters[target] = object_cluster(hierarchy, target, models, config.max_ancestor_hops).members;
            log.own_model[target] = models.has_model(target);
        }
        DecisionProblem problem{target, config.action, config.mode};
        for (int trial = 1; trial <= config.trials_per_object; ++trial) {
            GeneraliseResult r;
            try {
                r = generalise_execution_model(problem, hierarchy, models, kb, config.cfg, execute, rng, opts);
            } catch (const std::exception& e) {
                throw CampaignError("target '" + target + "', trial " + std::to_string(trial) + ": " + e.what());
            }
            if (!r.posteriors.empty()) {
                double sum = 0.0;
                for (const auto& [_, p] : r.posteriors) sum += p;
                if (std::abs(sum - 1.0) > kNormalisationTolerance)
                    throw CampaignError("target '" + target + "', trial " + std::to_string(trial) +
                                        ": posterior snapshot sums to " + format_double17(sum));
            }
            log.steps.push_back(TrialStep{trial, target, r.selected, r.outcome, r.used_own_model,
                                          std::move(r.posteriors), std::move(r.success_estimates)});
        }
    }
    return log;
}

std::string TrialLog::to_json() const {
    json targets = json::array();
    for (const auto& t : target_order)
        targets.push_back({{"target", t}, {"cluster", clusters.at(t)}, {"own_model", own_model.at(t)}});
    json jsteps = json::array();
    for (const auto& s : steps) {
        json step = {
            {"trial", s.trial},
            {"target", s.target},
            {"selected", s.selected ? json(*s.selected) : json(nullptr)},
            {"outcome", s.outcome ? json(*s.outcome) : json(nullptr)},
            {"own_model", s.used_own_model},
            {"posteriors", json(s.posteriors)},
            {"success_estimates", json(s.success_estimates)},
        };
        jsteps.push_back(std::move(step));
    }
    json doc = {
        {"rng", rng_algorithm},
        {"seed", seed},
        {"strategy", to_string(strategy)},
        {"config", config_json(cfg)},
        {"targets", targets},
        {"steps", jsteps},
    };
    return dump_canonical(doc) + "\n";
}

std::vector<ReportRow> summarize(const TrialLog& log) {
    std::vector<ReportRow> rows;
    for (const auto& target : log.target_order) {
        ReportRow row;
        row.target = target;
        row.cluster_size = log.clusters.at(target).size();
        std::map<ClassId, ExperienceRecord> per_model;
        for (const auto& s : log.steps) {
            if (s.target != target || !s.selected || !s.outcome) continue;
            per_model[*s.selected] = record_outcome(per_model[*s.selected], *s.outcome);
            if (*s.outcome) ++row.n_success;
        }
        row.models_attempted = per_model.size();
        double best = -1.0;
        for (const auto& [model, rec] : per_model) {
            const double p = deterministic_success_probability(rec, log.cfg);
            if (p >= log.cfg.tau && p > best) {
                best = p;
                row.o_star = model;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::string out = "target,cluster_size,models_attempted,o_star,n_success\n";
    for (const auto& r : rows) {
        out += r.target + "," + std::to_string(r.cluster_size) + "," + std::to_string(r.models_attempted) + "," +
               r.o_star + "," + std::to_string(r.n_success) + "\n";
    }
    return out;
}

std::string report_json(const std::vector<ReportRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"target", r.target},
                       {"cluster_size", r.cluster_size},
                       {"models_attempted", r.models_attempted},
                       {"o_star", r.o_star},
                       {"n_success", r.n_success}});
    }
    return dump_canonical(arr) + "\n";
}

}  // namespace suitgraph
