#include "suitgraph/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "suitgraph/experience_store.hpp"
#include "suitgraph/generalise.hpp"
#include "suitgraph/ontology.hpp"
#include "suitgraph/simulation.hpp"
#include "suitgraph/suitability.hpp"

namespace suitgraph::cli {

namespace {

namespace fs = std::filesystem;

struct SpecificationNeeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TeachQuit {};

struct Options {
    std::string ontology;
    std::string format;
    std::string models;
    std::string kb;
    std::string action = "grasp";
    std::string mode = kDefaultMode;
    double alpha0 = 3.0;
    double beta0 = 3.0;
    double tau = 0.6;
    int beta_samples = 10;
    std::uint64_t seed = 0;
    int trials = 10;
    std::string strategy = "suitability";
    std::string gt;
    std::string out;
    std::string in;
    std::string targets;
    int max_ancestor_hops = -1;
    bool reset_posterior = false;
    bool lenient_generalisation = false;

    std::string target;
    std::string class_a;
    std::string class_b;
    std::string kb_action;
};

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto b = item.find_first_not_of(" \t");
        auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

SuitabilityConfig make_config(const Options& o) {
    SuitabilityConfig cfg;
    cfg.alpha0 = o.alpha0;
    cfg.beta0 = o.beta0;
    cfg.tau = o.tau;
    cfg.beta_sample_count = o.beta_samples;
    cfg.rng_seed = o.seed;
    cfg.strict_generalisation = !o.lenient_generalisation;
    cfg.validate();
    return cfg;
}

std::optional<int> hops(const Options& o) {
    if (o.max_ancestor_hops < 0) return std::nullopt;
    return o.max_ancestor_hops;
}

ClassHierarchy load_ontology(const Options& o, std::ostream& err) {
    std::optional<OntologyFormat> fmt;
    if (o.format == "json-tree")
        fmt = OntologyFormat::JsonTree;
    else if (o.format == "owl-subset")
        fmt = OntologyFormat::OwlSubset;
    else if (!o.format.empty())
        throw InputError("unknown ontology format '" + o.format + "'");
    return load_hierarchy(o.ontology, fmt, [&](const std::string& msg) { err << "warning: " << msg << '\n'; });
}

ModelRegistry load_models(const Options& o, const ClassHierarchy& h) {
    ModelRegistry reg;
    for (auto& m : split_list(o.models)) {
        if (!h.contains(m)) throw UnknownClassError(m);
        reg.add(std::move(m));
    }
    return reg;
}

void require_class(const ClassHierarchy& h, const std::string& cls) {
    if (!h.contains(cls)) throw UnknownClassError(cls);
}

KnowledgeBase load_kb_or_fresh(const Options& o, const SuitabilityConfig* cfg, const ClassHierarchy* h,
                               std::ostream& err) {
    KnowledgeBase kb;
    if (!o.kb.empty() && fs::exists(o.kb)) {
        kb = KnowledgeBase::load(o.kb);
        if (h && !kb.meta().ontology_checksum.empty() && kb.meta().ontology_checksum != hierarchy_checksum(*h))
            err << "warning: knowledge base was recorded under a different ontology (checksum "
                << kb.meta().ontology_checksum << ")\n";
    } else {
        if (cfg) kb.meta().config = *cfg;
    }
    if (h) kb.meta().ontology_checksum = hierarchy_checksum(*h);
    if (cfg) kb.meta().config = *cfg;
    return kb;
}

void print_graph_table(const SuitabilityGraph& g, std::ostream& out) {
    out << "candidate\tsimilarity\tn_success\tn_failure\tposterior\n";
    for (const auto& [c, cand] : g.candidates()) {
        out << c << '\t' << fixed6(cand.similarity) << '\t' << cand.record.n_success << '\t' << cand.record.n_failure
            << '\t' << fixed6(cand.record.posterior) << '\n';
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << text;
}

// ---- subcommands ----------------------------------------------------------

int cmd_cluster(const Options& o, std::ostream& out, std::ostream& err) {
    auto h = load_ontology(o, err);
    require_class(h, o.target);
    auto models = load_models(o, h);
    auto cluster = object_cluster(h, o.target, models, hops(o));
    for (const auto& m : cluster.members) out << m << '\n';
    out << "size: " << cluster.size() << '\n';
    return kOk;
}

int cmd_similarity(const Options& o, std::ostream& out, std::ostream& err) {
    auto h = load_ontology(o, err);
    out << fixed6(h.wup_similarity(o.class_a, o.class_b)) << '\n';
    return kOk;
}

int cmd_select(const Options& o, std::ostream& out, std::ostream& err) {
    auto h = load_ontology(o, err);
    require_class(h, o.target);
    auto models = load_models(o, h);
    auto cfg = make_config(o);
    auto kb = load_kb_or_fresh(o, &cfg, &h, err);

    out << "target: " << o.target << "\naction: " << o.action << "\nmode: " << o.mode << '\n';
    if (models.has_model(o.target)) {
        out << "selected: " << o.target << " (own model)\n";
        return kOk;
    }
    auto cluster = object_cluster(h, o.target, models, hops(o));
    if (cluster.empty()) throw SpecificationNeeded("no related class of '" + o.target + "' has an execution model");

    Rng rng(o.seed);
    DecisionProblem problem{o.target, o.action, o.mode};
    auto graph = restore_graph(problem, h, cluster, kb, o.reset_posterior);
    graph.update(cfg, rng);
    auto chosen = select_model(graph, rng);
    out << "selected: " << chosen << '\n';
    print_graph_table(graph, out);
    return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    auto h = load_ontology(o, err);
    auto models = load_models(o, h);
    CampaignConfig cc;
    cc.trials_per_object = o.trials;
    cc.cfg = make_config(o);
    cc.seed = o.seed;
    cc.action = o.action;
    cc.mode = o.mode;
    cc.max_ancestor_hops = hops(o);
    auto strategy = parse_strategy(o.strategy);
    if (!strategy) throw InputError("unknown strategy '" + o.strategy + "'");
    cc.strategy = *strategy;
    if (!o.targets.empty()) {
        cc.targets = split_list(o.targets);
    } else {
        for (const auto& c : h.classes())
            if (h.children(c).empty() && !models.has_model(c)) cc.targets.push_back(c);
    }
    for (const auto& t : cc.targets) require_class(h, t);
    if (cc.trials_per_object < 1) throw InputError("--trials must be at least 1");

    GroundTruthMatrix gt = o.gt.empty() ? GroundTruthMatrix(0.5) : GroundTruthMatrix::load(o.gt);

    KnowledgeBase kb = load_kb_or_fresh(o, &cc.cfg, &h, err);
    auto log = run_campaign(cc, h, models, gt, &kb);
    auto rows = summarize(log);
    const auto csv = report_csv(rows);
    out << csv;

    if (!o.out.empty()) {
        fs::create_directories(o.out);
        write_file(fs::path(o.out) / "report.csv", csv);
        write_file(fs::path(o.out) / "report.json", report_json(rows));
        write_file(fs::path(o.out) / "trial_log.json", log.to_json());
    }
    if (!o.kb.empty()) kb.save(o.kb);
    return kOk;
}

int cmd_teach(const Options& o, std::istream& in, std::ostream& out, std::ostream& err) {
    auto h = load_ontology(o, err);
    require_class(h, o.target);
    auto models = load_models(o, h);
    auto cfg = make_config(o);
    auto kb = load_kb_or_fresh(o, &cfg, &h, err);
    DecisionProblem problem{o.target, o.action, o.mode};

    const Executor ask = [&](const ClassId& object, const ClassId& model) -> bool {
        out << "execute '" << o.action << "' on " << object << " with the model of " << model << '\n';
        for (;;) {
            out << "success? [y/n/q] " << std::flush;
            std::string line;
            if (!std::getline(in, line)) throw TeachQuit{};
            line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }),
                       line.end());
            if (line == "y" || line == "Y") return true;
            if (line == "n" || line == "N") return false;
            if (line == "q" || line == "Q") throw TeachQuit{};
            out << "please answer y, n or q\n";
        }
    };

    Rng rng(o.seed);
    GeneraliseOptions opts;
    opts.reset_posteriors = o.reset_posterior;
    opts.max_ancestor_hops = hops(o);
    std::set<ClassId> used_models;
    bool first = true;
    for (;;) {
        GeneraliseResult r;
        try {
            r = generalise_execution_model(problem, h, models, kb, cfg, ask, rng, opts);
        } catch (const TeachQuit&) {
            break;
        }
        if (first && o.reset_posterior) opts.reset_posteriors = false;
        first = false;
        if (r.specification_needed)
            throw SpecificationNeeded("no related class of '" + o.target + "' has an execution model");
        if (r.used_own_model) {
            out << "executed with own model (not recorded)\n";
            continue;
        }
        used_models.insert(*r.selected);
        if (!o.kb.empty()) kb.save(o.kb);
    }

    out << "\nsession summary for " << o.target << " (" << o.action << "/" << o.mode << ")\n";
    if (!models.has_model(o.target)) {
        auto cluster = object_cluster(h, o.target, models, hops(o));
        auto records = cluster_records(cluster, o.action, o.mode, kb);
        for (const auto& [m, rec] : records)
            out << "  " << m << ": n_success=" << rec.n_success << " n_failure=" << rec.n_failure
                << " P(S=1)=" << fixed6(deterministic_success_probability(rec, cfg)) << '\n';
        const bool spec = specification_check(cluster, records, cfg);
        out << "specification needed: " << (spec ? "yes" : "no") << '\n';
    }
    for (const auto& m : used_models) {
        auto parent = h.parent(m);
        auto records = sibling_records(h, m, o.action, o.mode, kb);
        const bool gen = generalisation_check(m, h.siblings(m), records, cfg);
        out << "model of " << m << " generalises to " << (parent ? *parent : std::string("(root)")) << ": "
            << (gen ? "yes" : "no") << '\n';
    }
    return kOk;
}

int cmd_kb(const Options& o, std::ostream& out) {
    if (o.kb_action == "export") {
        KnowledgeBase kb = fs::exists(o.kb) ? KnowledgeBase::load(o.kb) : KnowledgeBase{};
        const auto text = kb.export_json();
        if (o.out.empty())
            out << text;
        else
            write_file(o.out, text);
        return kOk;
    }
    if (o.kb_action == "import") {
        if (o.in.empty()) throw InputError("kb import needs --in");
        auto kb = KnowledgeBase::import_json(read_file(o.in));
        kb.save(o.kb);
        out << "imported " << kb.size() << " entries into " << o.kb << '\n';
        return kOk;
    }
    // show
    if (!fs::exists(o.kb)) throw InputError("knowledge base '" + o.kb + "' does not exist");
    auto kb = KnowledgeBase::load(o.kb);
    const auto& m = kb.meta();
    out << "version " << m.version << ", ontology " << (m.ontology_checksum.empty() ? "-" : m.ontology_checksum)
        << ", alpha0 " << fixed6(m.config.alpha0) << ", beta0 " << fixed6(m.config.beta0) << ", tau "
        << fixed6(m.config.tau) << ", beta samples " << m.config.beta_sample_count << '\n';
    out << "action\tmode\ttarget\tcandidate\tn_success\tn_failure\tposterior\n";
    for (const auto& [k, r] : kb.entries())
        out << k.action << '\t' << k.mode << '\t' << k.target << '\t' << k.candidate << '\t' << r.n_success << '\t'
            << r.n_failure << '\t' << fixed6(r.posterior) << '\n';
    out << kb.size() << " entries\n";
    return kOk;
}

void add_ontology_flags(CLI::App* sub, Options& o) {
    sub->add_option("--ontology", o.ontology, "Ontology file (.json json-tree, .owl/.rdf/.xml owl-subset)")
        ->required();
    sub->add_option("--format", o.format, "Override format detection")
        ->check(CLI::IsMember({"json-tree", "owl-subset"}));
}

void add_model_flags(CLI::App* sub, Options& o) {
    sub->add_option("--models", o.models, "Comma-separated classes that have an execution model");
    sub->add_option("--max-ancestor-hops", o.max_ancestor_hops,
                    "Limit ancestor classes considered for clusters (-1: up to the root)");
}

void add_config_flags(CLI::App* sub, Options& o) {
    sub->add_option("--action", o.action, "Action identifier")->capture_default_str();
    sub->add_option("--mode", o.mode, "Qualitative mode")->capture_default_str();
    sub->add_option("--alpha0", o.alpha0, "Prior beta alpha")->capture_default_str();
    sub->add_option("--beta0", o.beta0, "Prior beta beta")->capture_default_str();
    sub->add_option("--tau", o.tau, "Certainty threshold")->capture_default_str();
    sub->add_option("--beta-samples", o.beta_samples, "Beta draws per success estimate")->capture_default_str();
    sub->add_option("--seed", o.seed, "RNG seed (falls back to $SUITGRAPH_SEED)")
        ->envname("SUITGRAPH_SEED")
        ->capture_default_str();
    sub->add_flag("--lenient-generalisation", o.lenient_generalisation,
                  "Let a model without siblings generalise to its parent");
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Ontology-assisted execution model generalisation", "suitgraph"};
    app.require_subcommand(1);

    auto* cluster = app.add_subcommand("cluster", "List the object cluster of a class");
    add_ontology_flags(cluster, o);
    add_model_flags(cluster, o);
    cluster->add_option("target", o.target, "Target class")->required();

    auto* similarity = app.add_subcommand("similarity", "Wu-Palmer similarity of two classes");
    add_ontology_flags(similarity, o);
    similarity->add_option("a", o.class_a)->required();
    similarity->add_option("b", o.class_b)->required();

    auto* select = app.add_subcommand("select", "Dry-run model selection for a class (kb is not modified)");
    add_ontology_flags(select, o);
    add_model_flags(select, o);
    add_config_flags(select, o);
    select->add_option("--kb", o.kb, "Knowledge base file (absent: fresh)");
    select->add_flag("--reset-posterior", o.reset_posterior, "Ignore stored posteriors");
    select->add_option("target", o.target, "Target class")->required();

    auto* simulate = app.add_subcommand("simulate", "Run a simulated campaign against a ground-truth matrix");
    add_ontology_flags(simulate, o);
    add_model_flags(simulate, o);
    add_config_flags(simulate, o);
    simulate->add_option("--gt", o.gt, "Ground-truth JSON (default: p = 0.5 everywhere)");
    simulate->add_option("--trials", o.trials, "Trials per target")->capture_default_str();
    simulate->add_option("--strategy", o.strategy, "suitability | random | similarity-only | count-only")
        ->capture_default_str();
    simulate->add_option("--targets", o.targets, "Comma-separated targets (default: modelless leaf classes)");
    simulate->add_option("--kb", o.kb, "Knowledge base to extend and save");
    simulate->add_option("--out", o.out, "Directory for report.csv, report.json and trial_log.json");

    auto* teach = app.add_subcommand("teach", "Interactive teacher-labelled execution loop");
    add_ontology_flags(teach, o);
    add_model_flags(teach, o);
    add_config_flags(teach, o);
    teach->add_option("--kb", o.kb, "Knowledge base file (saved after every answer)");
    teach->add_flag("--reset-posterior", o.reset_posterior, "Ignore stored posteriors at session start");
    teach->add_option("target", o.target, "Target class")->required();

    auto* kbcmd = app.add_subcommand("kb", "Knowledge base export, import and display");
    kbcmd->add_option("command", o.kb_action, "export | import | show")
        ->required()
        ->check(CLI::IsMember({"export", "import", "show"}));
    kbcmd->add_option("--kb", o.kb, "Knowledge base file")->required();
    kbcmd->add_option("--in", o.in, "Input JSON for import");
    kbcmd->add_option("--out", o.out, "Output file for export (default: stdout)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kInputError;
    }

    try {
        if (*cluster) return cmd_cluster(o, out, err);
        if (*similarity) return cmd_similarity(o, out, err);
        if (*select) return cmd_select(o, out, err);
        if (*simulate) return cmd_simulate(o, out, err);
        if (*teach) return cmd_teach(o, in, out, err);
        if (*kbcmd) return cmd_kb(o, out);
    } catch (const UnknownClassError& e) {
        err << "error: " << e.what() << '\n';
        return kUnknownClass;
    } catch (const SpecificationNeeded& e) {
        err << "specification needed: " << e.what() << '\n';
        return kSpecificationNeeded;
    } catch (const OntologyError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const StoreError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternalError;
    }
    return kInternalError;
}

}  // namespace suitgraph::cli
