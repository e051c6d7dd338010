#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace suitgraph {

using ClassId = std::string;

/// Raised for any malformed or non-tree ontology input. `subject()` names the
/// offending class when one is known.
class OntologyError : public std::runtime_error {
public:
    OntologyError(const std::string& what, std::string subject = {})
        : std::runtime_error(what), subject_(std::move(subject)) {}

    const std::string& subject() const noexcept { return subject_; }

private:
    std::string subject_;
};

/// Raised when a query names a class the hierarchy does not contain.
class UnknownClassError : public std::out_of_range {
public:
    explicit UnknownClassError(const std::string& cls)
        : std::out_of_range("unknown class '" + cls + "'"), cls_(cls) {}

    const std::string& class_id() const noexcept { return cls_; }

private:
    std::string cls_;
};

enum class OntologyFormat { JsonTree, OwlSubset };

/// Picks a format from a file extension: `.json` is json-tree, `.owl`,
/// `.rdf` and `.xml` are owl-subset.
std::optional<OntologyFormat> format_from_path(std::string_view path);

using WarningSink = std::function<void(const std::string&)>;

/// Immutable rooted tree of object classes.
///
/// Depth is 1-based: the root has depth 1 so that Wu-Palmer similarity is
/// always well defined.
class ClassHierarchy {
public:
    /// Builds a hierarchy from explicit parent links. Every class that is
    /// not a key of `parent` and appears in `classes` is a root candidate;
    /// exactly one must exist.
    static ClassHierarchy from_parent_map(const std::set<ClassId>& classes,
                                          const std::map<ClassId, ClassId>& parent);

    const ClassId& root() const noexcept { return names_[root_]; }
    std::size_t size() const noexcept { return names_.size(); }
    bool contains(std::string_view cls) const;

    /// All classes in lexicographic order.
    std::vector<ClassId> classes() const;

    std::optional<ClassId> parent(std::string_view cls) const;
    std::vector<ClassId> children(std::string_view cls) const;
    /// Strict ancestors, nearest first (parent, grandparent, ..., root).
    std::vector<ClassId> ancestors(std::string_view cls) const;
    std::vector<ClassId> siblings(std::string_view cls) const;

    int depth(std::string_view cls) const;
    int height() const noexcept { return height_; }

    /// Least common subsumer: the deepest ancestor-or-self shared by a and b.
    const ClassId& lcs(std::string_view a, std::string_view b) const;

    /// 2 * depth(lcs) / (depth(a) + depth(b)).
    double wup_similarity(std::string_view a, std::string_view b) const;

    /// Strict ancestors, siblings and direct children of `cls`, sorted.
    /// `max_ancestor_hops` limits how far up the ancestor walk goes; empty
    /// means up to and including the root.
    std::vector<ClassId> relatives(std::string_view cls,
                                   std::optional<int> max_ancestor_hops = std::nullopt) const;

    friend bool operator==(const ClassHierarchy& a, const ClassHierarchy& b);

private:
    ClassHierarchy() = default;

    std::size_t index_of(std::string_view cls) const;

    std::vector<ClassId> names_;                 // sorted
    std::vector<std::size_t> parent_;            // parent_[root_] == root_
    std::vector<std::vector<std::size_t>> children_;
    std::vector<int> depth_;
    std::size_t root_ = 0;
    int height_ = 0;
};

/// Parses a hierarchy. Non-fatal notes (skipped OWL constructs) go to
/// `warn`; when `warn` is empty they are written to stderr.
ClassHierarchy parse_hierarchy(std::string_view source, OntologyFormat format,
                               const WarningSink& warn = {});

ClassHierarchy load_hierarchy(const std::string& path,
                              std::optional<OntologyFormat> format = std::nullopt,
                              const WarningSink& warn = {});

/// Nested `{"name": ..., "children": [...]}` document, children sorted by
/// name, two-space indentation. Parsing the result yields an equal hierarchy.
std::string serialize_json_tree(const ClassHierarchy& h);

/// FNV-1a 64 over the canonical json-tree form, as 16 lowercase hex digits.
std::string hierarchy_checksum(const ClassHierarchy& h);

/// Classes related to `target` that have a registered execution model.
struct ObjectCluster {
    ClassId target;
    std::vector<ClassId> members;  // sorted, never contains target

    std::size_t size() const noexcept { return members.size(); }
    bool empty() const noexcept { return members.empty(); }
};

/// The set of classes with a known execution model for some action.
class ModelRegistry {
public:
    ModelRegistry() = default;
    explicit ModelRegistry(std::set<ClassId> modeled) : modeled_(std::move(modeled)) {}

    bool has_model(std::string_view cls) const { return modeled_.count(std::string(cls)) > 0; }
    void add(ClassId cls) { modeled_.insert(std::move(cls)); }
    const std::set<ClassId>& classes() const noexcept { return modeled_; }

private:
    std::set<ClassId> modeled_;
};

ObjectCluster object_cluster(const ClassHierarchy& h, std::string_view target,
                             const std::function<bool(const ClassId&)>& has_model,
                             std::optional<int> max_ancestor_hops = std::nullopt);

ObjectCluster object_cluster(const ClassHierarchy& h, std::string_view target,
                             const ModelRegistry& models,
                             std::optional<int> max_ancestor_hops = std::nullopt);

}  // namespace suitgraph
