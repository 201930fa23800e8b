// Command-line front end: parses an integrand expression, runs the requested
// pipeline (telescoper search, recursive integration, ep-expansion, numeric
// verification) and prints text or versioned JSON.
#include <CLI11.hpp>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "hyperaz/epsexpand.hpp"
#include "hyperaz/parse.hpp"
#include "hyperaz/verify.hpp"

using json = nlohmann::ordered_json;
using namespace hyperaz;

namespace {

int exit_code_for(ErrorCode c) {
    switch (c) {
        case ErrorCode::ParseError:
        case ErrorCode::NonHyperexponential:
            return 2;
        case ErrorCode::NotFound:
            return 3;
        case ErrorCode::UnboundedBoundaryTerm:
            return 4;
        case ErrorCode::RescaleRequired:
        case ErrorCode::SingularObstruction:
        case ErrorCode::UnderdeterminedInit:
        case ErrorCode::InconsistentInit:
        case ErrorCode::ExpansionUnsupported:
            return 5;
        case ErrorCode::DivergentIntegral:
        case ErrorCode::NumericFailure:
            return 6;
        default:
            return 1;
    }
}

Bound parse_bound(const std::string& s) {
    if (s == "inf" || s == "+inf") return Bound::pos_inf();
    if (s == "-inf") return Bound::neg_inf();
    return Bound::finite(rational_from_string(s));
}

// "name:lo:hi" with "-inf"/"inf" ends
IntVar parse_var_spec(const std::string& spec) {
    std::size_t c1 = spec.find(':');
    std::size_t c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
    if (c2 == std::string::npos)
        raise(ErrorCode::ParseError, "--var expects name:lower:upper, got '" +
                                         spec + "'");
    return {spec.substr(0, c1),
            parse_bound(spec.substr(c1 + 1, c2 - c1 - 1)),
            parse_bound(spec.substr(c2 + 1))};
}

struct Options {
    std::string expression;
    std::vector<std::string> var_specs;
    std::string param;
    std::string mode_name = "continuous";
    std::string ansatz_name = "plain";
    long lmax = 8;
    long degmax = 12;
    std::string add_factors;
    std::uint64_t seed = 0;
    std::string format = "text";
    // expand
    std::string eps_range = "0:0";
    long order = 20;
    long table_length = 8;
    std::string init_file;
    // verify
    std::vector<std::string> at_points;
    double tol = 1e-4;
};

void add_common(CLI::App* cmd, Options& o, bool with_mode) {
    cmd->add_option("expression", o.expression, "integrand expression")
        ->required();
    cmd->add_option("--var", o.var_specs,
                    "integration variable as name:lower:upper (repeatable; "
                    "'-inf'/'inf' for infinite ends)")
        ->required();
    cmd->add_option("--param", o.param, "parameter name (default n or x)");
    if (with_mode)
        cmd->add_option("--mode", o.mode_name, "discrete|continuous")
            ->check(CLI::IsMember({"discrete", "continuous"}));
    cmd->add_option("--ansatz", o.ansatz_name, "plain|vanish")
        ->check(CLI::IsMember({"plain", "vanish"}));
    cmd->add_option("--lmax", o.lmax, "maximum telescoper order");
    cmd->add_option("--degmax", o.degmax, "maximum certificate degree");
    cmd->add_option("--add-factors", o.add_factors,
                    "extra certificate numerator factors, one polynomial per "
                    "integration variable, ';'-separated");
    cmd->add_option("--seed", o.seed, "search seed");
    cmd->add_option("--format", o.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));
}

Mode mode_of(const Options& o) {
    return o.mode_name == "discrete" ? Mode::kDiscrete : Mode::kContinuous;
}

HyperTerm build_term(Options& o) {
    if (o.param.empty())
        o.param = mode_of(o) == Mode::kDiscrete ? "n" : "x";
    std::vector<IntVar> vars;
    for (auto& s : o.var_specs) vars.push_back(parse_var_spec(s));
    return parse_integrand(o.expression, mode_of(o), o.param, std::move(vars));
}

AnsatzConfig build_cfg(const Options& o, const HyperTerm& term) {
    AnsatzConfig cfg;
    cfg.ansatz = o.ansatz_name == "vanish" ? Ansatz::kBoundaryVanishing
                                           : Ansatz::kPlain;
    cfg.L_max = o.lmax;
    cfg.degree_max = o.degmax;
    cfg.seed = o.seed;
    if (!o.add_factors.empty()) {
        std::stringstream ss(o.add_factors);
        std::string piece;
        while (std::getline(ss, piece, ';'))
            cfg.add_factors.push_back(parse_polynomial(piece));
        if (cfg.add_factors.size() != term.dim())
            raise(ErrorCode::ParseError,
                  "--add-factors must list one polynomial per integration "
                  "variable");
    }
    return cfg;
}

json telescoper_json(const Annihilator& ann) {
    json t = json::array();
    for (long i = 0; i <= ann.L; ++i)
        t.push_back({{"order", i},
                     {"coeff", ann.e[static_cast<std::size_t>(i)].str()}});
    return t;
}

json rhs_json(const std::vector<BoundaryIntegral>& rhs,
              const std::vector<IntVar>& vars) {
    json arr = json::array();
    for (auto& b : rhs)
        arr.push_back({{"sign", b.sign},
                       {"var", vars[b.var_index].name},
                       {"end", b.at_upper ? "upper" : "lower"},
                       {"term", b.term.str()}});
    return arr;
}

json annihilator_json(const Annihilator& ann,
                      const std::vector<BoundaryIntegral>& rhs,
                      const std::vector<IntVar>& vars) {
    json doc;
    doc["L"] = ann.L;
    doc["telescoper"] = telescoper_json(ann);
    doc["operator"] = operator_str(ann);
    json cert = json::array();
    for (auto& R : ann.certificate) cert.push_back(R.str());
    doc["certificate"] = cert;
    doc["homogeneous"] = rhs.empty();
    doc["rhs"] = rhs_json(rhs, vars);
    return doc;
}

void print_annihilator_text(std::ostream& os, const Annihilator& ann,
                            const std::vector<BoundaryIntegral>& rhs,
                            const HyperTerm& term) {
    os << "telescoper: " << operator_str(ann) << "\n";
    os << "order: " << ann.L << "\n";
    for (std::size_t i = 0; i < ann.certificate.size(); ++i)
        os << "certificate[" << term.intvars[i].name
           << "]: " << ann.certificate[i].str() << "\n";
    os << "homogeneous: " << (rhs.empty() ? "yes" : "no") << "\n";
    for (auto& b : rhs) os << "rhs: " << b.str() << "\n";
}

json stats_json(const TelescopeStats& st) {
    return {{"tried", st.tried},
            {"precheck_pass", st.precheck_pass},
            {"exact_solves", st.exact_solves}};
}

json tree_json(const RecursionNode& node) {
    json doc;
    doc["integral"] = node.integral.str();
    if (node.base_value) {
        doc["base_value"] = *node.base_value;
        return doc;
    }
    doc["L"] = node.annihilator->L;
    doc["telescoper"] = telescoper_json(*node.annihilator);
    doc["operator"] = operator_str(*node.annihilator);
    json cert = json::array();
    for (auto& R : node.annihilator->certificate) cert.push_back(R.str());
    doc["certificate"] = cert;
    doc["rhs"] = rhs_json(node.rhs, node.integral.intvars);
    json kids = json::array();
    for (auto& c : node.children) kids.push_back(tree_json(c));
    doc["children"] = kids;
    return doc;
}

void print_tree_text(std::ostream& os, const RecursionNode& node, int depth) {
    std::string pad(2 * static_cast<std::size_t>(depth), ' ');
    if (node.base_value) {
        os << pad << "leaf: " << *node.base_value << "\n";
        return;
    }
    os << pad << "dim " << node.integral.dim() << ": "
       << operator_str(*node.annihilator) << "\n";
    for (std::size_t i = 0; i < node.rhs.size(); ++i) {
        os << pad << "  " << node.rhs[i].str() << "\n";
        print_tree_text(os, node.children[i], depth + 2);
    }
}

// init file: lines `eps_order start c_start c_{start+1} ...`, '#' comments
std::vector<SeriesInX> load_init(const std::string& path, long t, long u) {
    std::vector<SeriesInX> init(static_cast<std::size_t>(u - t + 1));
    if (path.empty()) return init;
    std::ifstream in(path);
    if (!in)
        raise(ErrorCode::ParseError, "cannot open init file " + path);
    std::string line;
    while (std::getline(in, line)) {
        std::string body = line.substr(0, line.find('#'));
        std::istringstream ls(body);
        long j, s;
        if (!(ls >> j)) continue;
        if (!(ls >> s))
            raise(ErrorCode::ParseError,
                  "init line needs `eps_order start c...`: " + line);
        SeriesInX series;
        series.start = s;
        std::string tok;
        while (ls >> tok) series.coeffs.push_back(rational_from_string(tok));
        if (series.coeffs.empty())
            raise(ErrorCode::ParseError,
                  "init line has no coefficients: " + line);
        if (j < t || j > u) continue;  // outside the requested window
        init[static_cast<std::size_t>(j - t)] = std::move(series);
    }
    return init;
}

json expansion_json(const EpsExpansion& ex, const std::string& param) {
    json doc;
    doc["t"] = ex.t;
    doc["u"] = ex.u();
    json entries = json::array();
    if (ex.mode == Mode::kContinuous) {
        for (std::size_t k = 0; k < ex.entries.size(); ++k) {
            json cs = json::array();
            for (auto& c : ex.entries[k].coeffs)
                cs.push_back(rational_str(c));
            entries.push_back({{"eps_order", ex.t + static_cast<long>(k)},
                               {"start", ex.entries[k].start},
                               {"coeffs", cs},
                               {"series", ex.entries[k].str(param)}});
        }
    } else {
        for (std::size_t k = 0; k < ex.tables.size(); ++k) {
            json vs = json::array();
            for (auto& v : ex.tables[k]) vs.push_back(rational_str(v));
            entries.push_back({{"eps_order", ex.t + static_cast<long>(k)},
                               {"n0", ex.n0},
                               {"values", vs}});
        }
    }
    doc["entries"] = entries;
    return doc;
}

void print_expansion_text(std::ostream& os, const EpsExpansion& ex,
                          const std::string& param) {
    if (ex.mode == Mode::kContinuous) {
        for (std::size_t k = 0; k < ex.entries.size(); ++k)
            os << "ep^" << ex.t + static_cast<long>(k) << ": "
               << ex.entries[k].str(param) << "\n";
    } else {
        for (std::size_t k = 0; k < ex.tables.size(); ++k) {
            os << "ep^" << ex.t + static_cast<long>(k) << ":";
            for (std::size_t i = 0; i < ex.tables[k].size(); ++i)
                os << " " << param << "=" << ex.n0 + static_cast<long>(i)
                   << ":" << rational_str(ex.tables[k][i]);
            os << "\n";
        }
    }
}

void emit(const Options& o, json doc, const std::string& text) {
    if (o.format == "json") {
        doc["schema"] = 1;
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << text;
    }
}

int run_telescope(Options& o, bool force_vanish) {
    HyperTerm term = build_term(o);
    if (force_vanish) o.ansatz_name = "vanish";
    AnsatzConfig cfg = build_cfg(o, term);
    auto out = find_telescoper(term, cfg);
    if (!out.annihilator)
        raise(ErrorCode::NotFound,
              "no telescoper within L <= " + std::to_string(cfg.L_max) +
                  ", degree <= " + std::to_string(cfg.degree_max));
    std::vector<BoundaryIntegral> rhs;
    if (cfg.ansatz == Ansatz::kPlain)
        rhs = boundary_terms(term, *out.annihilator);

    json doc;
    doc["mode"] = term.mode == Mode::kDiscrete ? "discrete" : "continuous";
    doc.update(annihilator_json(*out.annihilator, rhs, term.intvars));
    doc["stats"] = stats_json(out.stats);
    std::ostringstream text;
    print_annihilator_text(text, *out.annihilator, rhs, term);
    text << "stats: tried=" << out.stats.tried
         << " precheck=" << out.stats.precheck_pass
         << " solves=" << out.stats.exact_solves << "\n";
    emit(o, std::move(doc), text.str());
    return 0;
}

int run_integrate(Options& o) {
    HyperTerm term = build_term(o);
    AnsatzConfig cfg = build_cfg(o, term);
    auto node =
        divide_and_conquer(term, cfg, static_cast<long>(term.dim()) + 1);
    json doc;
    doc["mode"] = term.mode == Mode::kDiscrete ? "discrete" : "continuous";
    doc["tree"] = tree_json(node);
    std::ostringstream text;
    print_tree_text(text, node, 0);
    emit(o, std::move(doc), text.str());
    return 0;
}

int run_expand(Options& o, ExpandStrategy strategy) {
    HyperTerm term = build_term(o);
    ExpandOptions eo;
    eo.strategy = strategy;
    eo.ansatz = build_cfg(o, term);
    eo.M = o.order;
    eo.table_length = o.table_length;
    std::size_t colon = o.eps_range.find(':');
    if (colon == std::string::npos)
        raise(ErrorCode::ParseError, "--eps expects t:u");
    eo.t = std::stol(o.eps_range.substr(0, colon));
    eo.u = std::stol(o.eps_range.substr(colon + 1));
    auto init = load_init(o.init_file, eo.t, eo.u);
    auto ex = expand_integral(term, eo, init);
    json doc;
    doc["mode"] = term.mode == Mode::kDiscrete ? "discrete" : "continuous";
    doc["expansion"] = expansion_json(ex, term.param);
    std::ostringstream text;
    print_expansion_text(text, ex, term.param);
    emit(o, std::move(doc), text.str());
    return 0;
}

int run_verify(Options& o) {
    HyperTerm term = build_term(o);
    AnsatzConfig cfg = build_cfg(o, term);
    auto out = find_telescoper(term, cfg);
    if (!out.annihilator)
        raise(ErrorCode::NotFound, "no telescoper to verify");
    bool exact = verify_certificate(term, *out.annihilator);

    std::vector<std::map<std::string, Rational>> pts;
    if (o.at_points.empty())
        o.at_points = term.mode == Mode::kDiscrete
                          ? std::vector<std::string>{"1", "2", "3"}
                          : std::vector<std::string>{"1/2", "1", "2"};
    for (auto& s : o.at_points)
        pts.push_back({{term.param, rational_from_string(s)}});
    double residual = check_annihilator_numeric(term, *out.annihilator, pts);

    json doc;
    doc["mode"] = term.mode == Mode::kDiscrete ? "discrete" : "continuous";
    doc["L"] = out.annihilator->L;
    doc["operator"] = operator_str(*out.annihilator);
    doc["exact_certificate"] = exact;
    doc["residual"] = residual;
    doc["tolerance"] = o.tol;
    std::ostringstream text;
    text << "telescoper: " << operator_str(*out.annihilator) << "\n"
         << "exact certificate: " << (exact ? "pass" : "FAIL") << "\n"
         << "numeric residual: " << residual << " (tolerance " << o.tol
         << ")\n";
    emit(o, std::move(doc), text.str());
    if (!exact || residual > o.tol)
        raise(ErrorCode::NumericFailure, "verification failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"telescoper search and expansion for hyperexponential "
                 "multi-integrals"};
    app.require_subcommand(1);

    if (const char* tc = std::getenv("HYPERAZ_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(tc, &end, 10);
        if (end == tc || *end != '\0' || v < 1) {
            std::cerr << "HYPERAZ_THREADS must be a positive integer\n";
            return 1;
        }
        // all pipelines are currently single-threaded; the cap is accepted
        // for forward compatibility and has no effect on results
    }

    struct Cmd {
        Options opts;
        int (*run)(Options&);
    };
    // deque: CLI11 keeps pointers into each Cmd's Options, so the storage
    // must be stable across insertions
    std::deque<std::pair<CLI::App*, Cmd>> cmds;
    auto add = [&](const std::string& name, const std::string& help,
                   bool discrete, bool with_mode, int (*run)(Options&)) {
        CLI::App* sub = app.add_subcommand(name, help);
        Cmd c;
        c.opts.mode_name = discrete ? "discrete" : "continuous";
        c.run = run;
        cmds.emplace_back(sub, std::move(c));
        add_common(sub, cmds.back().second.opts, with_mode);
        return sub;
    };

    auto plain = [](Options& o) { return run_telescope(o, false); };
    auto direct = [](Options& o) { return run_telescope(o, true); };
    add("az", "discrete telescoper (recurrence in the parameter)", true,
        false, plain);
    add("caz", "continuous telescoper (ODE in the parameter)", false, false,
        plain);
    add("az-direct", "discrete telescoper, boundary-vanishing ansatz", true,
        false, direct);
    add("caz-direct", "continuous telescoper, boundary-vanishing ansatz",
        false, false, direct);
    add("az-integrate", "recursive boundary-term recursion (discrete)", true,
        false, run_integrate);
    add("caz-integrate", "recursive boundary-term recursion (continuous)",
        false, false, run_integrate);

    auto expand_rec = [](Options& o) {
        return run_expand(o, ExpandStrategy::kRecursive);
    };
    auto expand_dir = [](Options& o) {
        return run_expand(o, ExpandStrategy::kDirect);
    };
    CLI::App* ex1 = add("expand", "ep-expansion via the recursion tree",
                        false, true, expand_rec);
    CLI::App* ex2 = add("expand-direct",
                        "ep-expansion via the homogeneous equation", false,
                        true, expand_dir);
    CLI::App* ver = add("verify", "numeric residual check of the telescoper",
                        false, true, run_verify);
    for (auto& [sub, cmd] : cmds) {
        if (sub == ex1 || sub == ex2) {
            sub->add_option("--eps", cmd.opts.eps_range,
                            "ep order window t:u (inclusive)");
            sub->add_option("--order", cmd.opts.order,
                            "series truncation order");
            sub->add_option("--table-length", cmd.opts.table_length,
                            "values per ep order (discrete mode)");
            sub->add_option("--init", cmd.opts.init_file,
                            "initial series file: lines `eps_order start "
                            "c_start c_{start+1} ...`");
        }
        if (sub == ver) {
            sub->add_option("--at", cmd.opts.at_points,
                            "parameter values to test at (repeatable)");
            sub->add_option("--tol", cmd.opts.tol,
                            "residual tolerance");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        for (auto& [sub, cmd] : cmds)
            if (sub->parsed()) return cmd.run(cmd.opts);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
