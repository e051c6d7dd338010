#include "suitgraph/ontology.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

namespace suitgraph {

namespace {

void emit_warning(const WarningSink& warn, const std::string& msg) {
    if (warn)
        warn(msg);
    else
        std::cerr << "warning: " << msg << '\n';
}

std::string lower_ext(std::string_view path) {
    auto dot = path.rfind('.');
    if (dot == std::string_view::npos) return {};
    std::string ext(path.substr(dot));
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

// ---- json-tree ------------------------------------------------------------

void collect_json_node(const nlohmann::json& node, const ClassId* parent,
                       std::set<ClassId>& classes, std::map<ClassId, ClassId>& parents) {
    if (!node.is_object()) throw OntologyError("json-tree: class node must be an object");
    auto name_it = node.find("name");
    if (name_it == node.end() || !name_it->is_string())
        throw OntologyError("json-tree: class node requires a string \"name\"");
    ClassId name = name_it->get<std::string>();
    if (name.empty()) throw OntologyError("json-tree: empty class name");
    for (auto it = node.begin(); it != node.end(); ++it) {
        if (it.key() != "name" && it.key() != "children")
            throw OntologyError("json-tree: unexpected key \"" + it.key() + "\" in class", name);
    }
    if (!classes.insert(name).second) throw OntologyError("duplicate class '" + name + "'", name);
    if (parent) parents.emplace(name, *parent);

    auto kids = node.find("children");
    if (kids == node.end()) return;
    if (!kids->is_array())
        throw OntologyError("json-tree: \"children\" of '" + name + "' must be an array", name);
    for (const auto& child : *kids) collect_json_node(child, &name, classes, parents);
}

ClassHierarchy parse_json_tree(std::string_view source) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(source.begin(), source.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw OntologyError(std::string("json-tree: malformed JSON: ") + e.what());
    }
    std::set<ClassId> classes;
    std::map<ClassId, ClassId> parents;
    collect_json_node(doc, nullptr, classes, parents);
    return ClassHierarchy::from_parent_map(classes, parents);
}

// ---- owl-subset (RDF/XML) -------------------------------------------------

using boost::property_tree::ptree;

constexpr std::string_view kOwlThing = "http://www.w3.org/2002/07/owl#Thing";

// Local name of an IRI: the fragment after '#', else the last path segment.
std::string local_name(std::string_view iri) {
    auto hash = iri.rfind('#');
    if (hash != std::string_view::npos) return std::string(iri.substr(hash + 1));
    auto slash = iri.rfind('/');
    if (slash != std::string_view::npos) return std::string(iri.substr(slash + 1));
    return std::string(iri);
}

std::optional<std::string> attr(const ptree& node, const char* name) {
    auto attrs = node.get_child_optional("<xmlattr>");
    if (!attrs) return std::nullopt;
    auto v = attrs->get_optional<std::string>(name);
    if (!v) return std::nullopt;
    return *v;
}

std::optional<std::string> subject_of(const ptree& node) {
    if (auto about = attr(node, "rdf:about")) return local_name(*about);
    if (auto id = attr(node, "rdf:ID")) return *id;
    return std::nullopt;
}

struct OwlCollector {
    std::set<ClassId> declared;
    std::map<ClassId, ClassId> parents;
    bool thing_referenced = false;
    const WarningSink& warn;

    void add_subclass(const ClassId& child, const std::string& parent_iri) {
        if (parent_iri == kOwlThing || parent_iri == "owl:Thing") thing_referenced = true;
        ClassId parent = local_name(parent_iri);
        if (parent.empty()) throw OntologyError("owl-subset: empty superclass IRI", child);
        if (parent == child) throw OntologyError("cycle detected at class '" + child + "'", child);
        declared.insert(parent);
        auto [it, inserted] = parents.emplace(child, parent);
        if (!inserted && it->second != parent)
            throw OntologyError("multiple parents for class '" + child + "' ('" + it->second +
                                    "' and '" + parent + "')",
                                child);
    }

    void read_class(const ptree& node) {
        auto name = subject_of(node);
        if (!name || name->empty()) {
            emit_warning(warn, "owl-subset: skipping anonymous class expression");
            return;
        }
        declared.insert(*name);
        for (const auto& [tag, child] : node) {
            if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
            if (tag == "rdfs:subClassOf") {
                if (auto res = attr(child, "rdf:resource"))
                    add_subclass(*name, *res);
                else
                    emit_warning(warn, "owl-subset: skipping non-named superclass of '" + *name + "'");
            } else if (tag == "rdfs:label" || tag == "rdfs:comment") {
                continue;
            } else {
                emit_warning(warn, "owl-subset: ignoring <" + tag + "> in class '" + *name + "'");
            }
        }
    }

    // rdf:Description is only consumed when it carries rdf:type owl:Class or
    // a subClassOf with a named resource.
    void read_description(const ptree& node) {
        auto name = subject_of(node);
        bool is_class = false;
        std::vector<std::string> supers;
        for (const auto& [tag, child] : node) {
            if (tag == "rdf:type") {
                auto res = attr(child, "rdf:resource");
                if (res && local_name(*res) == "Class") is_class = true;
            } else if (tag == "rdfs:subClassOf") {
                if (auto res = attr(child, "rdf:resource")) supers.push_back(*res);
            }
        }
        if (!name || (!is_class && supers.empty())) {
            emit_warning(warn, "owl-subset: ignoring rdf:Description without class content");
            return;
        }
        declared.insert(*name);
        for (const auto& s : supers) add_subclass(*name, s);
    }
};

ClassHierarchy parse_owl_subset(std::string_view source, const WarningSink& warn) {
    ptree doc;
    try {
        std::istringstream in{std::string(source)};
        boost::property_tree::read_xml(in, doc);
    } catch (const boost::property_tree::xml_parser_error& e) {
        throw OntologyError(std::string("owl-subset: malformed XML: ") + e.what());
    }
    auto rdf = doc.get_child_optional("rdf:RDF");
    if (!rdf) throw OntologyError("owl-subset: missing <rdf:RDF> root element");

    OwlCollector c{{}, {}, false, warn};
    for (const auto& [tag, node] : *rdf) {
        if (tag == "<xmlattr>" || tag == "<xmlcomment>" || tag == "owl:Ontology") continue;
        if (tag == "owl:Class")
            c.read_class(node);
        else if (tag == "rdf:Description")
            c.read_description(node);
        else
            emit_warning(warn, "owl-subset: ignoring <" + tag + ">");
    }
    if (c.declared.empty()) throw OntologyError("owl-subset: no named classes found");

    // Every OWL class is implicitly a subclass of owl:Thing; once Thing is in
    // play, parentless classes hang off it.
    if (c.thing_referenced) {
        for (const auto& cls : c.declared)
            if (cls != "Thing" && !c.parents.count(cls)) c.parents.emplace(cls, "Thing");
    }
    return ClassHierarchy::from_parent_map(c.declared, c.parents);
}

void write_json_node(const ClassHierarchy& h, const ClassId& cls, int indent, std::string& out) {
    std::string pad(static_cast<std::size_t>(indent), ' ');
    out += pad + "{\"name\": " + nlohmann::json(cls).dump();
    auto kids = h.children(cls);
    if (kids.empty()) {
        out += "}";
        return;
    }
    out += ", \"children\": [\n";
    for (std::size_t i = 0; i < kids.size(); ++i) {
        write_json_node(h, kids[i], indent + 2, out);
        out += i + 1 < kids.size() ? ",\n" : "\n";
    }
    out += pad + "]}";
}

}  // namespace

std::optional<OntologyFormat> format_from_path(std::string_view path) {
    auto ext = lower_ext(path);
    if (ext == ".json") return OntologyFormat::JsonTree;
    if (ext == ".owl" || ext == ".rdf" || ext == ".xml") return OntologyFormat::OwlSubset;
    return std::nullopt;
}

ClassHierarchy ClassHierarchy::from_parent_map(const std::set<ClassId>& classes,
                                               const std::map<ClassId, ClassId>& parent) {
    if (classes.empty()) throw OntologyError("hierarchy has no classes");
    ClassHierarchy h;
    h.names_.assign(classes.begin(), classes.end());
    for (const auto& n : h.names_)
        if (n.empty()) throw OntologyError("empty class identifier");

    const std::size_t n = h.names_.size();
    const std::size_t none = n;
    h.parent_.assign(n, none);
    for (const auto& [child, par] : parent) {
        if (!classes.count(child)) throw OntologyError("undeclared class '" + child + "'", child);
        if (!classes.count(par))
            throw OntologyError("undeclared parent '" + par + "' of class '" + child + "'", child);
        h.parent_[h.index_of(child)] = h.index_of(par);
    }

    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i)
        if (h.parent_[i] == none) roots.push_back(i);
    if (roots.size() > 1)
        throw OntologyError("multiple roots ('" + h.names_[roots[0]] + "', '" + h.names_[roots[1]] + "')",
                            h.names_[roots[1]]);

    // Walking up more than n links means a cycle; this also covers the
    // no-root case where every class has a parent.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t cur = i;
        std::size_t steps = 0;
        while (h.parent_[cur] != none) {
            cur = h.parent_[cur];
            if (++steps > n) throw OntologyError("cycle detected at class '" + h.names_[i] + "'", h.names_[i]);
        }
    }

    h.root_ = roots.front();
    h.parent_[h.root_] = h.root_;
    h.children_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i)
        if (i != h.root_) h.children_[h.parent_[i]].push_back(i);

    h.depth_.assign(n, 0);
    std::vector<std::size_t> stack{h.root_};
    h.depth_[h.root_] = 1;
    while (!stack.empty()) {
        auto cur = stack.back();
        stack.pop_back();
        h.height_ = std::max(h.height_, h.depth_[cur]);
        for (auto c : h.children_[cur]) {
            h.depth_[c] = h.depth_[cur] + 1;
            stack.push_back(c);
        }
    }
    return h;
}

std::size_t ClassHierarchy::index_of(std::string_view cls) const {
    auto it = std::lower_bound(names_.begin(), names_.end(), cls,
                               [](const ClassId& a, std::string_view b) { return a < b; });
    if (it == names_.end() || *it != cls) throw UnknownClassError(std::string(cls));
    return static_cast<std::size_t>(it - names_.begin());
}

bool ClassHierarchy::contains(std::string_view cls) const {
    return std::binary_search(names_.begin(), names_.end(), cls,
                              [](const auto& a, const auto& b) { return std::string_view(a) < std::string_view(b); });
}

std::vector<ClassId> ClassHierarchy::classes() const { return names_; }

std::optional<ClassId> ClassHierarchy::parent(std::string_view cls) const {
    auto i = index_of(cls);
    if (i == root_) return std::nullopt;
    return names_[parent_[i]];
}

std::vector<ClassId> ClassHierarchy::children(std::string_view cls) const {
    std::vector<ClassId> out;
    for (auto c : children_[index_of(cls)]) out.push_back(names_[c]);
    return out;
}

std::vector<ClassId> ClassHierarchy::ancestors(std::string_view cls) const {
    std::vector<ClassId> out;
    auto i = index_of(cls);
    while (i != root_) {
        i = parent_[i];
        out.push_back(names_[i]);
    }
    return out;
}

std::vector<ClassId> ClassHierarchy::siblings(std::string_view cls) const {
    auto i = index_of(cls);
    std::vector<ClassId> out;
    if (i == root_) return out;
    for (auto s : children_[parent_[i]])
        if (s != i) out.push_back(names_[s]);
    return out;
}

int ClassHierarchy::depth(std::string_view cls) const { return depth_[index_of(cls)]; }

const ClassId& ClassHierarchy::lcs(std::string_view a, std::string_view b) const {
    auto i = index_of(a);
    auto j = index_of(b);
    while (depth_[i] > depth_[j]) i = parent_[i];
    while (depth_[j] > depth_[i]) j = parent_[j];
    while (i != j) {
        i = parent_[i];
        j = parent_[j];
    }
    return names_[i];
}

double ClassHierarchy::wup_similarity(std::string_view a, std::string_view b) const {
    const double common = depth(lcs(a, b));
    return 2.0 * common / static_cast<double>(depth(a) + depth(b));
}

std::vector<ClassId> ClassHierarchy::relatives(std::string_view cls,
                                               std::optional<int> max_ancestor_hops) const {
    std::set<ClassId> out;
    auto ups = ancestors(cls);
    std::size_t limit = ups.size();
    if (max_ancestor_hops) limit = std::min<std::size_t>(limit, static_cast<std::size_t>(std::max(0, *max_ancestor_hops)));
    out.insert(ups.begin(), ups.begin() + static_cast<std::ptrdiff_t>(limit));
    for (auto& s : siblings(cls)) out.insert(std::move(s));
    for (auto& c : children(cls)) out.insert(std::move(c));
    return {out.begin(), out.end()};
}

bool operator==(const ClassHierarchy& a, const ClassHierarchy& b) {
    return a.names_ == b.names_ && a.parent_ == b.parent_ && a.root_ == b.root_;
}

ClassHierarchy parse_hierarchy(std::string_view source, OntologyFormat format, const WarningSink& warn) {
    switch (format) {
        case OntologyFormat::JsonTree:
            return parse_json_tree(source);
        case OntologyFormat::OwlSubset:
            return parse_owl_subset(source, warn);
    }
    throw OntologyError("unsupported ontology format");
}

ClassHierarchy load_hierarchy(const std::string& path, std::optional<OntologyFormat> format,
                              const WarningSink& warn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw OntologyError("cannot open ontology file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    if (!format) format = format_from_path(path);
    if (!format) throw OntologyError("cannot infer ontology format from '" + path + "'");
    return parse_hierarchy(buf.str(), *format, warn);
}

std::string serialize_json_tree(const ClassHierarchy& h) {
    std::string out;
    write_json_node(h, h.root(), 0, out);
    out += "\n";
    return out;
}

std::string hierarchy_checksum(const ClassHierarchy& h) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_json_tree(h)) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

ObjectCluster object_cluster(const ClassHierarchy& h, std::string_view target,
                             const std::function<bool(const ClassId&)>& has_model,
                             std::optional<int> max_ancestor_hops) {
    ObjectCluster cluster{std::string(target), {}};
    for (auto& rel : h.relatives(target, max_ancestor_hops))
        if (has_model(rel)) cluster.members.push_back(std::move(rel));
    return cluster;
}

ObjectCluster object_cluster(const ClassHierarchy& h, std::string_view target, const ModelRegistry& models,
                             std::optional<int> max_ancestor_hops) {
    return object_cluster(
        h, target, [&](const ClassId& c) { return models.has_model(c); }, max_ancestor_hops);
}

}  // namespace suitgraph
