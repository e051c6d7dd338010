#include "suitgraph/experience_store.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "suitgraph/canonical_json.hpp"

namespace suitgraph {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& keys, const char* where) {
    if (!obj.is_object()) throw StoreError(std::string(where) + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!keys.count(it.key())) throw StoreError(std::string("unexpected key \"") + it.key() + "\" in " + where);
    for (const auto& k : keys)
        if (!obj.contains(k)) throw StoreError(std::string("missing key \"") + k + "\" in " + where);
}

std::string get_string(const json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_string() || v.get<std::string>().empty())
        throw StoreError(std::string("\"") + key + "\" must be a non-empty string");
    return v.get<std::string>();
}

std::int64_t get_count(const json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw StoreError(std::string("\"") + key + "\" must be a non-negative integer");
    return v.get<std::int64_t>();
}

double get_real(const json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw StoreError(std::string("\"") + key + "\" must be a number");
    return v.get<double>();
}

void check_posterior(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw StoreError("posterior must lie in [0, 1]");
}

}  // namespace

void KnowledgeBase::append(const ExperienceKey& key, bool success, double posterior_snapshot) {
    if (!key.valid()) throw StoreError("experience key components must be non-empty");
    check_posterior(posterior_snapshot);
    auto& rec = entries_[key];
    rec = record_outcome(rec, success);
    rec.posterior = posterior_snapshot;
}

void KnowledgeBase::set_posterior(const ExperienceKey& key, double posterior) {
    if (!key.valid()) throw StoreError("experience key components must be non-empty");
    check_posterior(posterior);
    entries_[key].posterior = posterior;
}

std::optional<ExperienceRecord> KnowledgeBase::query(const ExperienceKey& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string KnowledgeBase::export_json() const {
    json doc = json::object();
    doc["version"] = meta_.version;
    doc["meta"] = {
        {"ontology_checksum", meta_.ontology_checksum},
        {"alpha0", meta_.config.alpha0},
        {"beta0", meta_.config.beta0},
        {"tau", meta_.config.tau},
        {"beta_sample_count", meta_.config.beta_sample_count},
    };
    json entries = json::array();
    for (const auto& [key, rec] : entries_) {
        entries.push_back({
            {"action", key.action},
            {"mode", key.mode},
            {"target", key.target},
            {"candidate", key.candidate},
            {"n_success", rec.n_success},
            {"n_failure", rec.n_failure},
            {"posterior", rec.posterior},
        });
    }
    doc["entries"] = std::move(entries);
    return dump_canonical(doc) + "\n";
}

KnowledgeBase KnowledgeBase::import_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw StoreError(std::string("malformed knowledge base JSON: ") + e.what());
    }
    require_keys(doc, {"version", "meta", "entries"}, "knowledge base");
    if (!doc["version"].is_number_integer()) throw StoreError("\"version\" must be an integer");
    const int version = doc["version"].get<int>();
    if (version > kFormatVersion)
        throw StoreError("knowledge base format version " + std::to_string(version) + " is newer than supported (" +
                         std::to_string(kFormatVersion) + ")");
    if (version < 1) throw StoreError("invalid knowledge base format version " + std::to_string(version));

    const auto& m = doc["meta"];
    require_keys(m, {"ontology_checksum", "alpha0", "beta0", "tau", "beta_sample_count"}, "meta");
    KnowledgeBaseMeta meta;
    meta.version = version;
    if (!m["ontology_checksum"].is_string()) throw StoreError("\"ontology_checksum\" must be a string");
    meta.ontology_checksum = m["ontology_checksum"].get<std::string>();
    meta.config.alpha0 = get_real(m, "alpha0");
    meta.config.beta0 = get_real(m, "beta0");
    meta.config.tau = get_real(m, "tau");
    if (!m["beta_sample_count"].is_number_integer()) throw StoreError("\"beta_sample_count\" must be an integer");
    meta.config.beta_sample_count = m["beta_sample_count"].get<int>();
    try {
        meta.config.validate();
    } catch (const ConfigError& e) {
        throw StoreError(std::string("invalid meta configuration: ") + e.what());
    }

    KnowledgeBase kb(std::move(meta));
    if (!doc["entries"].is_array()) throw StoreError("\"entries\" must be an array");
    for (const auto& e : doc["entries"]) {
        require_keys(e, {"action", "mode", "target", "candidate", "n_success", "n_failure", "posterior"}, "entry");
        ExperienceKey key{get_string(e, "action"), get_string(e, "mode"), get_string(e, "target"),
                          get_string(e, "candidate")};
        ExperienceRecord rec{get_count(e, "n_success"), get_count(e, "n_failure"), get_real(e, "posterior")};
        check_posterior(rec.posterior);
        if (!kb.entries_.emplace(std::move(key), rec).second) throw StoreError("duplicate experience key in entries");
    }
    return kb;
}

void KnowledgeBase::save(const std::string& path) const {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StoreError("cannot write '" + tmp.string() + "'");
        out << export_json();
        out.flush();
        if (!out) throw StoreError("failed writing '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw StoreError("cannot replace '" + path + "': " + ec.message());
}

KnowledgeBase KnowledgeBase::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot open knowledge base '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return import_json(buf.str());
}

}  // namespace suitgraph
