#include "suitgraph/suitability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace suitgraph {

ExperienceRecord record_outcome(ExperienceRecord record, bool success) {
    if (success)
        ++record.n_success;
    else
        ++record.n_failure;
    return record;
}

void SuitabilityConfig::validate() const {
    if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) throw ConfigError("alpha0 must be a positive finite number");
    if (!(beta0 > 0.0) || !std::isfinite(beta0)) throw ConfigError("beta0 must be a positive finite number");
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
    if (beta_sample_count < 1) throw ConfigError("beta_sample_count must be at least 1");
}

BetaParams posterior_beta_params(const ExperienceRecord& record, const SuitabilityConfig& cfg) {
    const double a = cfg.alpha0 + static_cast<double>(record.n_success) - 1.0;
    const double b = cfg.beta0 + static_cast<double>(record.n_failure) - 1.0;
    return {std::max(a, kBetaParamFloor), std::max(b, kBetaParamFloor)};
}

double success_probability(const ExperienceRecord& record, const SuitabilityConfig& cfg, Rng& rng) {
    const auto [a, b] = posterior_beta_params(record, cfg);
    double sum = 0.0;
    for (int i = 0; i < cfg.beta_sample_count; ++i) sum += rng.beta(a, b);
    const double mean = sum / cfg.beta_sample_count;
    // Near-degenerate parameters can round every draw to 0 or 1.
    return std::clamp(mean, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

double deterministic_success_probability(const ExperienceRecord& record, const SuitabilityConfig& cfg) {
    const auto [a, b] = posterior_beta_params(record, cfg);
    return a / (a + b);
}

SuitabilityGraph SuitabilityGraph::init(const ObjectCluster& cluster, const std::map<ClassId, double>& similarities,
                                        std::string action, std::string mode) {
    if (cluster.empty())
        throw GraphError("object cluster of '" + cluster.target + "' is empty; a new model must be learned");
    SuitabilityGraph g;
    g.target_ = cluster.target;
    g.action_ = std::move(action);
    g.mode_ = std::move(mode);
    const double uniform = 1.0 / static_cast<double>(cluster.size());
    for (const auto& m : cluster.members) {
        auto it = similarities.find(m);
        if (it == similarities.end()) throw GraphError("missing similarity for candidate '" + m + "'");
        if (!(it->second > 0.0 && it->second <= 1.0))
            throw GraphError("similarity of '" + m + "' must lie in (0, 1]");
        ExperienceRecord rec;
        rec.posterior = uniform;
        g.candidates_[m] = Candidate{it->second, rec};
        g.log_posterior_[m] = std::log(uniform);
    }
    return g;
}

SuitabilityGraph::Candidate& SuitabilityGraph::at(const ClassId& c) {
    auto it = candidates_.find(c);
    if (it == candidates_.end()) throw GraphError("'" + c + "' is not a candidate for '" + target_ + "'");
    return it->second;
}

const SuitabilityGraph::Candidate& SuitabilityGraph::at(const ClassId& c) const {
    auto it = candidates_.find(c);
    if (it == candidates_.end()) throw GraphError("'" + c + "' is not a candidate for '" + target_ + "'");
    return it->second;
}

std::vector<ClassId> SuitabilityGraph::candidate_ids() const {
    std::vector<ClassId> ids;
    ids.reserve(candidates_.size());
    for (const auto& [c, _] : candidates_) ids.push_back(c);
    return ids;
}

double SuitabilityGraph::posterior(const ClassId& c) const { return at(c).record.posterior; }

std::map<ClassId, double> SuitabilityGraph::posteriors() const {
    std::map<ClassId, double> out;
    for (const auto& [c, cand] : candidates_) out[c] = cand.record.posterior;
    return out;
}

void SuitabilityGraph::set_record(const ClassId& c, const ExperienceRecord& record) {
    auto& cand = at(c);
    cand.record.n_success = record.n_success;
    cand.record.n_failure = record.n_failure;
}

void SuitabilityGraph::set_priors(const std::map<ClassId, double>& priors) {
    const double uniform = 1.0 / static_cast<double>(candidates_.size());
    std::map<ClassId, double> logs;
    double max_log = -std::numeric_limits<double>::infinity();
    for (const auto& [c, _] : candidates_) {
        auto it = priors.find(c);
        const double p = it == priors.end() ? uniform : it->second;
        if (!(p >= 0.0) || !std::isfinite(p)) throw GraphError("prior of '" + c + "' must be a finite non-negative number");
        logs[c] = std::log(p);
        max_log = std::max(max_log, logs[c]);
    }
    if (!std::isfinite(max_log)) throw GraphError("all priors are zero");
    double total = 0.0;
    for (auto& [c, l] : logs) total += std::exp(l - max_log);
    const double log_norm = max_log + std::log(total);
    for (auto& [c, l] : logs) {
        log_posterior_[c] = l - log_norm;
        candidates_[c].record.posterior = std::exp(log_posterior_[c]);
    }
}

std::map<ClassId, double> SuitabilityGraph::update(const SuccessEstimator& estimate) {
    std::map<ClassId, double> used;
    std::map<ClassId, double> next;
    double max_log = -std::numeric_limits<double>::infinity();
    for (const auto& [c, cand] : candidates_) {
        const double p = estimate(c, cand.record);
        if (!(p >= 0.0 && p <= 1.0)) throw GraphError("success probability of '" + c + "' outside [0, 1]");
        used[c] = p;
        const double l = std::log(cand.similarity) + std::log(p) + log_posterior_.at(c);
        next[c] = l;
        max_log = std::max(max_log, l);
    }
    if (!std::isfinite(max_log))
        throw GraphError("cannot normalise suitability graph of '" + target_ + "': all weights are zero");
    double total = 0.0;
    for (const auto& [c, l] : next) total += std::exp(l - max_log);
    const double log_norm = max_log + std::log(total);
    for (const auto& [c, l] : next) {
        log_posterior_[c] = l - log_norm;
        candidates_[c].record.posterior = std::exp(log_posterior_[c]);
    }
    return used;
}

std::map<ClassId, double> SuitabilityGraph::update(const SuitabilityConfig& cfg, Rng& rng) {
    return update([&](const ClassId&, const ExperienceRecord& r) { return success_probability(r, cfg, rng); });
}

void SuitabilityGraph::record(const ClassId& c, bool success) {
    auto& cand = at(c);
    cand.record = record_outcome(cand.record, success);
}

ClassId select_model(const SuitabilityGraph& graph, Rng& rng) {
    if (graph.size() == 0) throw GraphError("cannot select from an empty suitability graph");
    double best = -1.0;
    for (const auto& [c, cand] : graph.candidates()) best = std::max(best, cand.record.posterior);
    std::vector<ClassId> ties;
    for (const auto& [c, cand] : graph.candidates())
        if (best - cand.record.posterior <= kTieTolerance) ties.push_back(c);
    if (ties.size() == 1) return ties.front();
    return ties[rng.index(ties.size())];
}

namespace {

const ExperienceRecord& record_for(const std::map<ClassId, ExperienceRecord>& records, const ClassId& cls) {
    auto it = records.find(cls);
    if (it == records.end()) throw MissingRecordError("no experience record for '" + cls + "'");
    return it->second;
}

}  // namespace

bool generalisation_check(const ClassId& model_class, const std::vector<ClassId>& siblings,
                          const std::map<ClassId, ExperienceRecord>& records, const SuitabilityConfig& cfg) {
    if (siblings.empty()) return !cfg.strict_generalisation;
    bool all = true;
    for (const auto& s : siblings) {
        if (s == model_class) throw MissingRecordError("'" + model_class + "' listed as its own sibling");
        // Look up every record so that missing ones are always reported.
        if (deterministic_success_probability(record_for(records, s), cfg) < cfg.tau) all = false;
    }
    return all;
}

bool specification_check(const ObjectCluster& cluster, const std::map<ClassId, ExperienceRecord>& records,
                         const SuitabilityConfig& cfg) {
    if (cluster.empty()) return true;
    bool all = true;
    for (const auto& m : cluster.members) {
        const auto [a, b] = posterior_beta_params(record_for(records, m), cfg);
        if (b / (a + b) < cfg.tau) all = false;
    }
    return all;
}

}  // namespace suitgraph
