#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "suitgraph/suitability.hpp"

namespace suitgraph {

class StoreError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KnowledgeBaseMeta {
    std::string ontology_checksum;
    SuitabilityConfig config;
    int version = 1;

    bool operator==(const KnowledgeBaseMeta& o) const {
        // Only the persisted configuration fields take part.
        return ontology_checksum == o.ontology_checksum && version == o.version &&
               config.alpha0 == o.config.alpha0 && config.beta0 == o.config.beta0 && config.tau == o.config.tau &&
               config.beta_sample_count == o.config.beta_sample_count;
    }
};

/// Experience records keyed by (action, mode, target, candidate).
///
/// JSON layout (format version 1), written with sorted keys and 17
/// significant digits for reals:
///
///   {"entries":[{"action":..,"candidate":..,"mode":..,"n_failure":..,
///                "n_success":..,"posterior":..,"target":..}, ...],
///    "meta":{"alpha0":..,"beta0":..,"beta_sample_count":..,
///            "ontology_checksum":..,"tau":..},
///    "version":1}
///
/// Entries are ordered by key.
class KnowledgeBase {
public:
    static constexpr int kFormatVersion = 1;

    KnowledgeBase() = default;
    explicit KnowledgeBase(KnowledgeBaseMeta meta) : meta_(std::move(meta)) {}

    /// One execution: counts are updated and the stored posterior replaced
    /// by the snapshot.
    void append(const ExperienceKey& key, bool success, double posterior_snapshot);
    /// Overwrites only the posterior, creating a zero-count entry if needed.
    void set_posterior(const ExperienceKey& key, double posterior);
    std::optional<ExperienceRecord> query(const ExperienceKey& key) const;
    bool erase(const ExperienceKey& key) { return entries_.erase(key) > 0; }

    const std::map<ExperienceKey, ExperienceRecord>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    const KnowledgeBaseMeta& meta() const noexcept { return meta_; }
    KnowledgeBaseMeta& meta() noexcept { return meta_; }

    std::string export_json() const;
    /// Throws StoreError on schema violations or a newer format version.
    static KnowledgeBase import_json(const std::string& text);

    /// Atomic write (temporary file, then rename).
    void save(const std::string& path) const;
    static KnowledgeBase load(const std::string& path);

    bool operator==(const KnowledgeBase&) const = default;

private:
    KnowledgeBaseMeta meta_;
    std::map<ExperienceKey, ExperienceRecord> entries_;
};

}  // namespace suitgraph
