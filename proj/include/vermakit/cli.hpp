#pragma once

// Command-line front end. Subcommands:
//   components <file>   print the c-component partition of the observed set
//   project <file>      print the latent projection as an ADMG file
//   find <file>         derive constraints (text or machine format)
//   verify <file>       derive constraints and check them on random models
//
// All output is byte-deterministic for identical invocations; `verify` exits
// nonzero iff some derived constraint fails.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>

#include "machine_report.hpp"
#include "oracle.hpp"

namespace vermakit {

struct RunConfig {
    std::string path;
    std::uint64_t seed = 1;
    std::size_t trials = 50;
    int domain_size = 2;
    double tolerance = 1e-9;
    std::string orders = "canonical";  // canonical | all
    std::string dedup = "none";        // none | numeric
    std::string format = "text";       // text | machine
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline LatentDag as_latent(const ParsedGraph& g) {
    if (std::holds_alternative<LatentDag>(g)) return std::get<LatentDag>(g);
    return to_latent(std::get<Admg>(g));
}

inline FinderConfig finder_config(const RunConfig& rc) {
    FinderConfig cfg;
    cfg.order_mode = rc.orders == "all" ? FinderConfig::OrderMode::all_orders
                                        : FinderConfig::OrderMode::canonical;
    cfg.dedup = rc.dedup == "numeric" ? FinderConfig::Dedup::numeric : FinderConfig::Dedup::none;
    return cfg;
}

inline std::string format_deviation(double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", d);
    return buf;
}

inline int cmd_components(const RunConfig& rc, std::ostream& out) {
    ParsedGraph g = parse_graph(read_file(rc.path));
    std::vector<VarSet> blocks;
    if (std::holds_alternative<Admg>(g)) {
        const Admg& a = std::get<Admg>(g);
        blocks = admg_c_components(a, a.observed());
    } else {
        LatentDag d = prune_hidden_nonancestors(std::get<LatentDag>(g));
        blocks = c_components(d, d.observed());
    }
    std::string line;
    for (const VarSet& b : blocks) {
        if (!line.empty()) line += " ";
        line += braced(b);
    }
    out << line << "\n";
    return 0;
}

inline int cmd_project(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    ParsedGraph g = parse_graph(read_file(rc.path));
    if (std::holds_alternative<Admg>(g)) {
        err << "error: input is already an ADMG\n";
        return 1;
    }
    LatentDag d = prune_hidden_nonancestors(std::get<LatentDag>(g));
    out << format_graph(project(d));
    return 0;
}

inline std::vector<Constraint> derive(const ParsedGraph& g, const FinderConfig& cfg,
                                      std::vector<std::vector<NodeId>>* orders_out = nullptr) {
    LatentDag d = prune_hidden_nonancestors(as_latent(g));
    std::vector<Constraint> cs = find_constraints(d, cfg);
    subsumption_annotate(cs, d, cfg);
    if (orders_out) {
        if (cfg.order_mode == FinderConfig::OrderMode::canonical)
            orders_out->push_back(topological_order(d, d.observed()));
        else
            *orders_out = all_topological_orders(d, cfg.order_cap);
    }
    return cs;
}

inline int cmd_find(const RunConfig& rc, std::ostream& out) {
    ParsedGraph g = parse_graph(read_file(rc.path));
    FinderConfig cfg = finder_config(rc);
    std::vector<std::vector<NodeId>> orders;
    std::vector<Constraint> cs = derive(g, cfg, &orders);
    if (rc.format == "machine") {
        out << machine_report(g, cfg, orders, cs);
        return 0;
    }
    for (std::size_t ord = 0; ord < orders.size(); ++ord) {
        std::string line;
        for (const NodeId& n : orders[ord]) line += (line.empty() ? "" : " < ") + n.name;
        out << "# order: " << line << "\n";
    }
    std::size_t nf = 0;
    for (const Constraint& c : cs)
        if (c.kind == Constraint::Kind::functional) ++nf;
    out << "# constraints: " << cs.size() << " (" << nf << " functional, " << cs.size() - nf
        << " conditional independence)\n";
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const Constraint& c = cs[i];
        out << "[" << i << "] " << render_constraint(c);
        if (c.subsumed_by) out << "  (subsumed by [" << *c.subsumed_by << "])";
        out << "\n";
        if (orders.size() > 1) {
            std::string line;
            for (const NodeId& n : c.order) line += (line.empty() ? "" : " < ") + n.name;
            out << "      order: " << line << "\n";
        }
        for (const DerivationStep& s : c.derivation)
            out << "      " << s.step << " (" << s.rule << "): " << s.detail << "\n";
    }
    return 0;
}

inline int cmd_verify(const RunConfig& rc, std::ostream& out) {
    ParsedGraph g = parse_graph(read_file(rc.path));
    FinderConfig cfg = finder_config(rc);
    std::vector<Constraint> cs = derive(g, cfg);
    LatentDag d = prune_hidden_nonancestors(as_latent(g));
    out << "constraints: " << cs.size() << "; models: " << rc.trials << " (seed " << rc.seed
        << ", domain size " << rc.domain_size << ", tolerance " << format_deviation(rc.tolerance)
        << ")\n";
    bool all_ok = true;
    std::vector<double> max_dev(cs.size(), 0.0);
    for (std::size_t t = 0; t < rc.trials; ++t) {
        DiscreteModel m = random_model(d, uniform_domains(d, rc.domain_size), rc.seed + t);
        Distribution joint = observed_joint(m);
        for (std::size_t i = 0; i < cs.size(); ++i) {
            VerifyReport r = verify_constraint(cs[i], joint, rc.tolerance);
            max_dev[i] = std::max(max_dev[i], r.max_deviation);
        }
    }
    for (std::size_t i = 0; i < cs.size(); ++i) {
        bool ok = max_dev[i] <= rc.tolerance;
        all_ok = all_ok && ok;
        out << "[" << i << "] " << (ok ? "PASS" : "FAIL") << " max_deviation="
            << format_deviation(max_dev[i]) << " " << render_constraint(cs[i]) << "\n";
    }
    out << "result: " << (all_ok ? "PASS" : "FAIL") << "\n";
    return all_ok ? 0 : 1;
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"testable constraints of causal DAGs with hidden variables", "verma-kit"};
    app.require_subcommand(1);
    RunConfig rc;

    CLI::App* components = app.add_subcommand("components", "print the c-component partition");
    components->add_option("file", rc.path, "graph file")->required();

    CLI::App* project = app.add_subcommand("project", "print the latent projection as an ADMG");
    project->add_option("file", rc.path, "graph file")->required();

    CLI::App* find = app.add_subcommand("find", "derive testable constraints");
    find->add_option("file", rc.path, "graph file")->required();
    find->add_option("--orders", rc.orders, "topological orders to use")
        ->check(CLI::IsMember({"canonical", "all"}))
        ->capture_default_str();
    find->add_option("--dedup", rc.dedup, "subsumption annotation")
        ->check(CLI::IsMember({"none", "numeric"}))
        ->capture_default_str();
    find->add_option("--format", rc.format, "output format")
        ->check(CLI::IsMember({"text", "machine"}))
        ->capture_default_str();

    CLI::App* verify = app.add_subcommand("verify", "check constraints on random models");
    verify->add_option("file", rc.path, "graph file")->required();
    verify->add_option("--seed", rc.seed, "random seed")->capture_default_str();
    verify->add_option("--trials", rc.trials, "number of random models")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    verify->add_option("--domain-size", rc.domain_size, "domain size of observed variables")
        ->check(CLI::Range(2, 64))
        ->capture_default_str();
    verify->add_option("--tol", rc.tolerance, "verification tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (components->parsed()) return detail::cmd_components(rc, out);
        if (project->parsed()) return detail::cmd_project(rc, out, err);
        if (find->parsed()) return detail::cmd_find(rc, out);
        return detail::cmd_verify(rc, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ComponentCapError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const CapExceededError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace vermakit
