// Python bindings for the core pipelines: parse, telescope, recurse, expand,
// verify.  Polynomials and rationals cross the boundary as canonical strings.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hyperaz/epsexpand.hpp"
#include "hyperaz/parse.hpp"
#include "hyperaz/verify.hpp"

namespace py = pybind11;
using namespace hyperaz;

namespace {

Mode mode_from(const std::string& s) {
    if (s == "discrete") return Mode::kDiscrete;
    if (s == "continuous") return Mode::kContinuous;
    throw py::value_error("mode must be 'discrete' or 'continuous'");
}

std::string mode_name(Mode m) {
    return m == Mode::kDiscrete ? "discrete" : "continuous";
}

Bound bound_from(const std::string& s) {
    if (s == "inf" || s == "+inf") return Bound::pos_inf();
    if (s == "-inf") return Bound::neg_inf();
    return Bound::finite(rational_from_string(s));
}

HyperTerm parse_py(const std::string& text, const std::string& mode,
                   const std::string& param,
                   const std::vector<std::tuple<std::string, std::string,
                                                std::string>>& vars) {
    std::vector<IntVar> ivs;
    for (auto& [name, lo, hi] : vars)
        ivs.push_back({name, bound_from(lo), bound_from(hi)});
    return parse_integrand(text, mode_from(mode), param, std::move(ivs));
}

AnsatzConfig cfg_from(const std::string& ansatz, long lmax, long degmax,
                      std::uint64_t seed,
                      const std::vector<std::string>& add_factors) {
    AnsatzConfig cfg;
    if (ansatz == "vanish")
        cfg.ansatz = Ansatz::kBoundaryVanishing;
    else if (ansatz != "plain")
        throw py::value_error("ansatz must be 'plain' or 'vanish'");
    cfg.L_max = lmax;
    cfg.degree_max = degmax;
    cfg.seed = seed;
    for (auto& f : add_factors)
        cfg.add_factors.push_back(parse_polynomial(f));
    return cfg;
}

py::dict boundary_dict(const BoundaryIntegral& b,
                       const std::vector<IntVar>& vars) {
    py::dict d;
    d["sign"] = b.sign;
    d["var"] = vars[b.var_index].name;
    d["end"] = b.at_upper ? "upper" : "lower";
    d["term"] = b.term;
    return d;
}

py::dict tree_dict(const RecursionNode& node) {
    py::dict d;
    d["integral"] = node.integral.str();
    if (node.base_value) {
        d["base_value"] = *node.base_value;
        return d;
    }
    d["annihilator"] = *node.annihilator;
    py::list rhs, children;
    for (auto& b : node.rhs)
        rhs.append(boundary_dict(b, node.integral.intvars));
    for (auto& c : node.children) children.append(tree_dict(c));
    d["rhs"] = rhs;
    d["children"] = children;
    return d;
}

py::dict expansion_dict(const EpsExpansion& ex) {
    py::dict d;
    d["mode"] = mode_name(ex.mode);
    d["t"] = ex.t;
    d["u"] = ex.u();
    py::list entries;
    if (ex.mode == Mode::kContinuous) {
        for (std::size_t k = 0; k < ex.entries.size(); ++k) {
            py::dict e;
            e["eps_order"] = ex.t + static_cast<long>(k);
            e["start"] = ex.entries[k].start;
            py::list cs;
            for (auto& c : ex.entries[k].coeffs)
                cs.append(rational_str(c));
            e["coeffs"] = cs;
            entries.append(e);
        }
    } else {
        for (std::size_t k = 0; k < ex.tables.size(); ++k) {
            py::dict e;
            e["eps_order"] = ex.t + static_cast<long>(k);
            e["n0"] = ex.n0;
            py::list vs;
            for (auto& v : ex.tables[k]) vs.append(rational_str(v));
            e["values"] = vs;
            entries.append(e);
        }
    }
    d["entries"] = entries;
    return d;
}

std::vector<SeriesInX> init_from(
    const std::vector<std::tuple<long, long, std::vector<std::string>>>& init,
    long t, long u) {
    std::vector<SeriesInX> out(static_cast<std::size_t>(u - t + 1));
    for (auto& [j, start, coeffs] : init) {
        if (j < t || j > u)
            throw py::value_error("init eps_order outside the window");
        SeriesInX s;
        s.start = start;
        for (auto& c : coeffs) s.coeffs.push_back(rational_from_string(c));
        out[static_cast<std::size_t>(j - t)] = std::move(s);
    }
    return out;
}

std::map<std::string, Rational> assign_from(
    const std::map<std::string, std::string>& a) {
    std::map<std::string, Rational> out;
    for (auto& [k, v] : a) out[k] = rational_from_string(v);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "telescoper search and expansion for hyperexponential "
              "multi-integrals";

    static py::exception<Error> exc(m, "HyperazError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object o = py::cast(std::string(error_name(e.code())) + ": " +
                                    e.what());
            PyErr_SetObject(exc.ptr(), o.ptr());
        }
    });

    py::class_<HyperTerm>(m, "HyperTerm")
        .def_property_readonly("mode",
                               [](const HyperTerm& t) {
                                   return mode_name(t.mode);
                               })
        .def_readonly("param", &HyperTerm::param)
        .def_property_readonly("dim", &HyperTerm::dim)
        .def_property_readonly("variables",
                               [](const HyperTerm& t) {
                                   std::vector<std::string> vs;
                                   for (auto& iv : t.intvars)
                                       vs.push_back(iv.name);
                                   return vs;
                               })
        .def("__str__", &HyperTerm::str)
        .def("__repr__", [](const HyperTerm& t) {
            return "HyperTerm(" + t.str() + ")";
        });

    py::class_<Annihilator>(m, "Annihilator")
        .def_property_readonly("mode",
                               [](const Annihilator& a) {
                                   return mode_name(a.mode);
                               })
        .def_readonly("param", &Annihilator::param)
        .def_readonly("order", &Annihilator::L)
        .def_property_readonly("coeffs",
                               [](const Annihilator& a) {
                                   std::vector<std::string> cs;
                                   for (auto& e : a.e) cs.push_back(e.str());
                                   return cs;
                               })
        .def_property_readonly("certificate",
                               [](const Annihilator& a) {
                                   std::vector<std::string> cs;
                                   for (auto& R : a.certificate)
                                       cs.push_back(R.str());
                                   return cs;
                               })
        .def("__str__", &operator_str)
        .def("__repr__", [](const Annihilator& a) {
            return "Annihilator(" + operator_str(a) + ")";
        });

    m.def("parse", &parse_py, py::arg("expression"), py::arg("mode"),
          py::arg("param"), py::arg("variables"),
          "Parse an integrand expression; variables are (name, lower, upper) "
          "with '-inf'/'inf' for infinite ends.");

    m.def(
        "telescope",
        [](const HyperTerm& term, const std::string& ansatz, long lmax,
           long degmax, std::uint64_t seed,
           const std::vector<std::string>& add_factors) -> py::object {
            auto out = find_telescoper(
                term, cfg_from(ansatz, lmax, degmax, seed, add_factors));
            if (!out.annihilator) return py::none();
            return py::cast(*out.annihilator);
        },
        py::arg("term"), py::arg("ansatz") = "plain", py::arg("lmax") = 8,
        py::arg("degmax") = 12, py::arg("seed") = 0,
        py::arg("add_factors") = std::vector<std::string>{},
        "Iterative-deepening telescoper search; None when the sweep is "
        "exhausted.");

    m.def(
        "boundary_terms",
        [](const HyperTerm& term, const Annihilator& ann) {
            py::list out;
            for (auto& b : boundary_terms(term, ann))
                out.append(boundary_dict(b, term.intvars));
            return out;
        },
        py::arg("term"), py::arg("annihilator"),
        "Certificate boundary contributions as the inhomogeneous right-hand "
        "side.");

    m.def(
        "integrate_tree",
        [](const HyperTerm& term, const std::string& ansatz, long lmax,
           long degmax, std::uint64_t seed,
           const std::vector<std::string>& add_factors) {
            auto node = divide_and_conquer(
                term, cfg_from(ansatz, lmax, degmax, seed, add_factors),
                static_cast<long>(term.dim()) + 1);
            return tree_dict(node);
        },
        py::arg("term"), py::arg("ansatz") = "plain", py::arg("lmax") = 8,
        py::arg("degmax") = 12, py::arg("seed") = 0,
        py::arg("add_factors") = std::vector<std::string>{},
        "Divide-and-conquer recursion down to 0-dimensional base values.");

    m.def(
        "expand",
        [](const HyperTerm& term, long t, long u, long order,
           long table_length, const std::string& strategy,
           const std::vector<std::tuple<long, long,
                                        std::vector<std::string>>>& init,
           const std::string& ansatz, long lmax, long degmax,
           std::uint64_t seed) {
            ExpandOptions eo;
            eo.t = t;
            eo.u = u;
            eo.M = order;
            eo.table_length = table_length;
            if (strategy == "direct")
                eo.strategy = ExpandStrategy::kDirect;
            else if (strategy == "recursive")
                eo.strategy = ExpandStrategy::kRecursive;
            else
                throw py::value_error(
                    "strategy must be 'direct' or 'recursive'");
            eo.ansatz = cfg_from(ansatz, lmax, degmax, seed, {});
            return expansion_dict(
                expand_integral(term, eo, init_from(init, t, u)));
        },
        py::arg("term"), py::arg("t"), py::arg("u"), py::arg("order") = 20,
        py::arg("table_length") = 8, py::arg("strategy") = "direct",
        py::arg("init") =
            std::vector<std::tuple<long, long, std::vector<std::string>>>{},
        py::arg("ansatz") = "plain", py::arg("lmax") = 8,
        py::arg("degmax") = 12, py::arg("seed") = 0,
        "ep-expansion of the integral; init entries are (eps_order, start, "
        "[coefficients]).");

    m.def(
        "expand_closed_form",
        [](const HyperTerm& term, long t, long u, long order) {
            return expansion_dict(expand_closed_form(term, t, u, order));
        },
        py::arg("term"), py::arg("t"), py::arg("u"), py::arg("order") = 20,
        "Exact expansion of a 0-dimensional closed-form term.");

    m.def("verify_certificate", &verify_certificate, py::arg("term"),
          py::arg("annihilator"),
          "Exact telescoper-identity check via logarithmic derivatives.");

    m.def(
        "numeric_integrate",
        [](const HyperTerm& term,
           const std::map<std::string, std::string>& assign,
           double target_rel_err) {
            auto q = numeric_integrate(term, assign_from(assign),
                                       target_rel_err);
            py::dict d;
            d["value"] = q.value;
            d["abs_error_estimate"] = q.abs_error_estimate;
            d["method"] = q.method == QuadratureResult::kMonteCarlo
                              ? "monte_carlo"
                              : "adaptive";
            d["evaluations"] = q.evaluations;
            return d;
        },
        py::arg("term"), py::arg("assign") = std::map<std::string,
                                                      std::string>{},
        py::arg("target_rel_err") = 1e-10,
        "Numeric value of the integral at an assignment of the parameter "
        "and ep.");

    m.def(
        "check_annihilator_numeric",
        [](const HyperTerm& term, const Annihilator& ann,
           const std::vector<std::map<std::string, std::string>>& points) {
            std::vector<std::map<std::string, Rational>> pts;
            for (auto& p : points) pts.push_back(assign_from(p));
            return check_annihilator_numeric(term, ann, pts);
        },
        py::arg("term"), py::arg("annihilator"), py::arg("points"),
        "Maximum relative numeric residual of the annihilator over the "
        "points.");

    m.def("operator_str", &operator_str, py::arg("annihilator"),
          "Pretty operator form, e.g. '(n + 1) - (n + 2)*N'.");
}
