#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mms/cheeger.hpp"
#include "mms/conformal.hpp"
#include "mms/hopflax.hpp"
#include "mms/json_io.hpp"
#include "mms/modulus.hpp"
#include "mms/plans.hpp"
#include "mms/polyapprox.hpp"
#include "mms/shortest_paths.hpp"
#include "mms/transport.hpp"

namespace {

using mms::json;

std::string fmt(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(12) << v;
    return os.str();
}

std::vector<double> parse_times(const std::string& spec) {
    // either "a:b:logN" / "a:b:linN" or a comma list
    const auto c1 = spec.find(':');
    if (c1 != std::string::npos) {
        const auto c2 = spec.find(':', c1 + 1);
        if (c2 == std::string::npos) throw mms::Error(mms::ErrorCode::BadInput, "bad time spec");
        const double a = std::stod(spec.substr(0, c1));
        const double b = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
        std::string tail = spec.substr(c2 + 1);
        bool log_scale = tail.rfind("log", 0) == 0;
        if (log_scale || tail.rfind("lin", 0) == 0) tail = tail.substr(3);
        const int count = std::stoi(tail);
        if (count < 2 || !(a > 0.0) || !(b > a))
            throw mms::Error(mms::ErrorCode::BadInput, "bad time spec");
        std::vector<double> out;
        for (int i = 0; i < count; ++i) {
            const double t = (double)i / (count - 1);
            out.push_back(log_scale ? a * std::pow(b / a, t) : a + (b - a) * t);
        }
        return out;
    }
    std::vector<double> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

json matrix_to_json(const mms::DistMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.size(); ++j)
            row.push_back(mms::is_finite(m(i, j)) ? json(m(i, j)) : json(nullptr));
        rows.push_back(row);
    }
    return rows;
}

mms::DistMatrix pick_metric(const mms::DiscreteSpace& space, const std::string& metric_spec) {
    if (metric_spec.empty()) return space.dist();
    if (metric_spec.rfind("conformal:", 0) == 0) {
        const auto g = mms::load_vector(metric_spec.substr(10), space.size());
        return mms::conformal_distance(space, mms::ConformalWeight::from(g));
    }
    if (metric_spec.rfind("truncate:", 0) == 0) {
        const double t = std::stod(metric_spec.substr(9));
        if (!(t > 0.0)) throw mms::Error(mms::ErrorCode::BadInput, "truncation level must be positive");
        mms::DistMatrix d(space.size());
        for (std::size_t i = 0; i < space.size(); ++i)
            for (std::size_t j = 0; j < space.size(); ++j)
                d(i, j) = i == j ? 0.0 : std::min(space.dist()(i, j), t);
        return d;
    }
    throw mms::Error(mms::ErrorCode::BadInput, "unknown metric spec: " + metric_spec);
}

void emit(const std::string& out_path, const json& j, bool to_stdout) {
    if (!out_path.empty()) mms::write_json(out_path, j);
    if (to_stdout || out_path.empty()) std::cout << j.dump(2) << "\n";
}

struct SuiteRow {
    std::string fixture, check;
    bool pass;
    double residual;
};

void run_fixture(const std::string& path, double default_tol, std::vector<SuiteRow>& rows) {
    const json j = mms::load_json(path);
    const std::string name = std::filesystem::path(path).stem().string();

    if (j.contains("expect_invalid") && j.at("expect_invalid").get<bool>()) {
        bool failed = false;
        try {
            mms::space_from_json(j.at("space"));
        } catch (const mms::Error&) {
            failed = true;
        }
        rows.push_back({name, "validate_rejects", failed, failed ? 0.0 : 1.0});
        return;
    }

    const mms::DiscreteSpace space = mms::space_from_json(j.at("space"));
    rows.push_back({name, "validate", true, 0.0});

    for (const auto& chk : j.value("checks", json::array())) {
        const std::string type = chk.at("type").get<std::string>();
        const double p = chk.value("p", 2.0);
        if (type == "duality") {
            const mms::PathFamily fam = mms::family_from_json(chk.at("family"), space);
            const auto arcs = mms::enumerate_family(fam, space);
            const auto rep = mms::duality_certificate(arcs, space, p, chk.value("tilde", false));
            const double tol = chk.value("tol", default_tol);
            rows.push_back({name, "duality_gap", rep.relative_gap <= tol, rep.relative_gap});
        } else if (type == "triple") {
            const auto h = mms::vector_from_json(chk.at("h"), space.size());
            const auto rep = mms::triple_agreement(h, space, p);
            const double tol = chk.value("tol", default_tol);
            rows.push_back({name, "triple_gap", rep.max_pairwise_gap <= tol, rep.max_pairwise_gap});
        } else if (type == "sandwich") {
            const auto gvec = mms::vector_from_json(chk.at("g"), space.size());
            const auto g = mms::ConformalWeight::from(gvec);
            const auto dual = mms::dual_lipschitz_distance(space, g);
            const auto trap = mms::conformal_distance(space, g);
            const auto chain = mms::chain_distance(space, g, space.dist(), 2.0 * space.max_finite_dist() + 1.0);
            double worst = 0.0;
            for (std::size_t a = 0; a < space.size(); ++a)
                for (std::size_t b = 0; b < space.size(); ++b) {
                    if (!mms::is_finite(trap(a, b))) continue;
                    worst = std::max(worst, dual(a, b) - trap(a, b));
                    worst = std::max(worst, trap(a, b) - chain(a, b));
                }
            rows.push_back({name, "sandwich", worst <= 1e-12, worst});
        } else if (type == "hopflax") {
            const auto f = mms::vector_from_json(chk.at("f"), space.size());
            const auto times = parse_times(chk.value("times", std::string("0.05:5:log16")));
            const auto rep = mms::estimate_suite(f, space, space.dist(), times, p);
            double worst = 0.0;
            for (const auto& c : rep.checks) worst = std::max(worst, c.worst_residual);
            rows.push_back({name, "hopflax_estimates", rep.pass(), worst});
        } else {
            throw mms::Error(mms::ErrorCode::BadInput, "unknown check type " + type);
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"variational calculus on finite metric-measure spaces"};
    app.set_help_flag("--help", "print help"); // keep --h free for the density option
    app.require_subcommand(1);

    double p = 2.0;
    std::uint64_t seed = 0;
    double tol = 1e-5;
    std::string out_path;
    bool as_json = false;
    app.add_option("--p", p, "exponent p in (1, inf)")->capture_default_str();
    app.add_option("--seed", seed, "seed for all randomized samplers")->capture_default_str();
    app.add_option("--tol", tol, "report tolerance")->capture_default_str();
    app.add_option("--out", out_path, "output path");
    app.add_flag("--json", as_json, "dump JSON to stdout as well");

    std::string space_path, family_path, f_path, h_path, g_path, mu0_path, mu1_path;
    std::string metric_spec, variant, times_spec = "0.05:5:log32", mode = "triple", n_list_spec =
                                                                                        "16,64,256";
    std::string f_name = "sin", dir_path;
    bool tilde = false;
    double c_param = 1.0, alpha = -1.0, beta = 1.0, eps = 0.05;

    auto* validate = app.add_subcommand("validate", "check space invariants");
    validate->add_option("--space", space_path)->required();

    auto* modulus = app.add_subcommand("modulus", "p-modulus of a path family");
    modulus->add_option("--space", space_path)->required();
    modulus->add_option("--family", family_path)->required();
    modulus->add_flag("--tilde", tilde, "endpoint-augmented constraints");

    auto* content = app.add_subcommand("content", "p-content of a path family");
    content->add_option("--space", space_path)->required();
    content->add_option("--family", family_path)->required();
    content->add_flag("--tilde", tilde);

    auto* duality = app.add_subcommand("duality", "modulus/content duality certificate");
    duality->add_option("--space", space_path)->required();
    duality->add_option("--family", family_path)->required();
    duality->add_flag("--tilde", tilde);

    auto* kr = app.add_subcommand("kr", "Kantorovich-Rubinstein distance");
    kr->add_option("--space", space_path)->required();
    kr->add_option("--mu0", mu0_path)->required();
    kr->add_option("--mu1", mu1_path)->required();
    kr->add_option("--metric", metric_spec, "conformal:g.json or truncate:T");

    auto* conformal = app.add_subcommand("conformal", "length/conformal distance matrices");
    conformal->add_option("--space", space_path)->required();
    conformal->add_option("--g", g_path)->required();
    conformal->add_option("--variant", variant, "dual | trapezoid | chain:eps")->required();

    std::string k_path;
    auto* hopflax = app.add_subcommand("hopflax", "Hopf-Lax flow trace");
    hopflax->add_option("--space", space_path)->required();
    hopflax->add_option("--f", f_path)->required();
    hopflax->add_option("--times", times_spec, "a:b:logN, a:b:linN or comma list");
    hopflax->add_option("--K", k_path, "JSON list of node indices (default: all)");
    hopflax->add_option("--metric", metric_spec);

    auto* dualcheeger = app.add_subcommand("dualcheeger", "dual Cheeger energies");
    dualcheeger->add_option("--space", space_path)->required();
    dualcheeger->add_option("--h", h_path)->required();
    dualcheeger->add_option("--mode", mode, "primal | plans | conformal | triple");

    auto* hw = app.add_subcommand("hw", "H=W refinement experiment");
    hw->add_option("--N", n_list_spec, "comma list of edge counts");
    hw->add_option("--f", f_name, "sin | quad | affine");

    auto* poly = app.add_subcommand("poly", "certified polynomial approximants");
    auto* poly_trunc = poly->add_subcommand("truncate", "clamp approximant");
    poly_trunc->add_option("--c", c_param)->required();
    poly_trunc->add_option("--alpha", alpha)->required();
    poly_trunc->add_option("--beta", beta)->required();
    poly_trunc->add_option("--eps", eps)->required();
    auto* poly_max = poly->add_subcommand("smoothmax", "two-variable smooth max");
    poly_max->add_option("--c", c_param)->required();
    poly_max->add_option("--eps", eps)->required();

    auto* suite = app.add_subcommand("suite", "run fixture checks into a CSV");
    suite->add_option("--dir", dir_path)->required();

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();
    poly_trunc->fallthrough();
    poly_max->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            const json j = mms::load_json(space_path);
            json rep;
            try {
                const mms::DiscreteSpace s = mms::space_from_json(j);
                rep = {{"valid", true}, {"nodes", s.size()}, {"violations", json::array()}};
            } catch (const mms::Error& e) {
                rep = {{"valid", false}, {"violations", json::array({e.what()})}};
            }
            emit(out_path, rep, as_json);
            return rep.at("valid").get<bool>() ? 0 : 1;
        }

        if (*modulus || *content || *duality) {
            const mms::DiscreteSpace space = mms::load_space(space_path);
            const auto arcs = mms::enumerate_family(mms::load_family(family_path, space), space);
            if (*modulus) {
                const auto sol = tilde ? mms::modulus_tilde_p(arcs, space, p)
                                       : mms::modulus_p(arcs, space, p);
                json rep = {{"value", mms::is_finite(sol.value) ? json(sol.value) : json("inf")},
                            {"density", sol.density},
                            {"gap", sol.achieved_gap},
                            {"activePaths", sol.active}};
                emit(out_path, rep, as_json);
                return sol.converged || !mms::is_finite(sol.value) ? 0 : 2;
            }
            if (*content) {
                const auto res = mms::content_p(arcs, space, p, tilde);
                json rep = {{"content", mms::is_finite(res.value) ? json(res.value) : json("inf")},
                            {"content_pow_p", mms::is_finite(res.value_pow_p) ? json(res.value_pow_p) : json("inf")},
                            {"planMass", res.plan_mass},
                            {"entropyPowQ", res.entropy_pow_q},
                            {"optimalityResidual", res.optimality_residual},
                            {"weights", res.optimal_plan.weights}};
                emit(out_path, rep, as_json);
                return res.converged || !mms::is_finite(res.value) ? 0 : 2;
            }
            const auto rep = mms::duality_certificate(arcs, space, p, tilde);
            json out = {{"modulus", mms::is_finite(rep.primal) ? json(rep.primal) : json("inf")},
                        {"contentPowP", mms::is_finite(rep.dual) ? json(rep.dual) : json("inf")},
                        {"relativeGap", rep.relative_gap},
                        {"slacknessResidual", rep.slackness_residual},
                        {"density", rep.modulus.density},
                        {"planWeights", rep.content.optimal_plan.weights}};
            emit(out_path, out, as_json);
            if (rep.infinite) return 0;
            return (rep.modulus.converged && rep.content.converged) ? 0 : 2;
        }

        if (*kr) {
            const mms::DiscreteSpace space = mms::load_space(space_path);
            const auto mu0 = mms::load_vector(mu0_path, space.size());
            const auto mu1 = mms::load_vector(mu1_path, space.size());
            const mms::DistMatrix delta = pick_metric(space, metric_spec);
            const auto primal = mms::kr_primal(mu0, mu1, delta);
            const auto dual = mms::kr_dual(mu0, mu1, delta);
            json rep = {{"primal", primal.finite ? json(primal.value) : json("inf")},
                        {"dual", dual.finite ? json(dual.value) : json("inf")},
                        {"gap", primal.finite ? std::abs(primal.value - dual.value) : 0.0},
                        {"potential", dual.potential}};
            emit(out_path, rep, as_json);
            return 0;
        }

        if (*conformal) {
            const mms::DiscreteSpace space = mms::load_space(space_path);
            const auto g = mms::ConformalWeight::from(mms::load_vector(g_path, space.size()));
            mms::DistMatrix m;
            if (variant == "dual")
                m = mms::dual_lipschitz_distance(space, g);
            else if (variant == "trapezoid")
                m = mms::conformal_distance(space, g);
            else if (variant.rfind("chain:", 0) == 0)
                m = mms::chain_distance(space, g, space.dist(), std::stod(variant.substr(6)));
            else
                throw mms::Error(mms::ErrorCode::BadInput, "unknown variant " + variant);
            emit(out_path, json{{"variant", variant}, {"matrix", matrix_to_json(m)}}, as_json);
            return 0;
        }

        if (*hopflax) {
            const mms::DiscreteSpace space = mms::load_space(space_path);
            const auto f = mms::load_vector(f_path, space.size());
            const mms::DistMatrix delta = pick_metric(space, metric_spec);
            const auto times = parse_times(times_spec);
            std::vector<int> K;
            if (k_path.empty()) {
                K.resize(space.size());
                for (std::size_t i = 0; i < space.size(); ++i) K[i] = (int)i;
            } else {
                for (double v : mms::load_vector(k_path, 0)) K.push_back((int)v);
            }
            std::ostringstream csv;
            csv.imbue(std::locale::classic());
            csv << "t,node,Q,Dminus,Dplus\n";
            for (double t : times) {
                const auto st = mms::hopf_lax(f, t, space, K, delta, p);
                for (std::size_t x = 0; x < space.size(); ++x)
                    csv << fmt(t) << "," << space.nodes()[x] << "," << fmt(st.values[x]) << ","
                        << fmt(st.d_minus[x]) << "," << fmt(st.d_plus[x]) << "\n";
            }
            if (out_path.empty())
                std::cout << csv.str();
            else
                mms::write_text(out_path, csv.str());
            return 0;
        }

        if (*dualcheeger) {
            const mms::DiscreteSpace space = mms::load_space(space_path);
            const auto h = mms::load_vector(h_path, space.size());
            json rep;
            if (mode == "primal") {
                const double v = mms::dual_cheeger_primal(h, space, p);
                rep = {{"primal", mms::is_finite(v) ? json(v) : json("inf")}};
            } else if (mode == "plans") {
                const auto r = mms::dual_cheeger_plans(h, space, p);
                rep = {{"plans", r.finite ? json(r.value) : json("inf")}};
            } else if (mode == "conformal") {
                const auto r = mms::dual_cheeger_conformal(h, space, p, 5, seed);
                rep = {{"conformal", mms::is_finite(r.value) ? json(r.value) : json("inf")},
                       {"g", r.g}};
            } else if (mode == "triple") {
                const auto r = mms::triple_agreement(h, space, p);
                rep = {{"primal", mms::is_finite(r.primal) ? json(r.primal) : json("inf")},
                       {"plans", mms::is_finite(r.plans) ? json(r.plans) : json("inf")},
                       {"conformal", mms::is_finite(r.conformal) ? json(r.conformal) : json("inf")},
                       {"primalPreCheeger", mms::is_finite(r.primal_pre) ? json(r.primal_pre) : json("inf")},
                       {"maxPairwiseGap", r.max_pairwise_gap}};
            } else {
                throw mms::Error(mms::ErrorCode::BadInput, "unknown mode " + mode);
            }
            emit(out_path, rep, as_json);
            return 0;
        }

        if (*hw) {
            std::vector<int> ns;
            std::stringstream ss(n_list_spec);
            std::string item;
            while (std::getline(ss, item, ',')) ns.push_back(std::stoi(item));
            double (*fn)(double) = nullptr;
            if (f_name == "sin")
                fn = +[](double x) { return std::sin(M_PI * x); };
            else if (f_name == "quad")
                fn = +[](double x) { return x * (1.0 - x); };
            else if (f_name == "affine")
                fn = +[](double x) { return 2.0 * x - 0.5; };
            else
                throw mms::Error(mms::ErrorCode::BadInput, "unknown profile " + f_name);
            const auto rep = mms::hw_refinement(ns, fn, p);
            std::ostringstream csv;
            csv.imbue(std::locale::classic());
            csv << "N,pCE,wCE,gap\n";
            for (const auto& pt : rep.points)
                csv << pt.n_edges << "," << fmt(pt.pre_energy) << "," << fmt(pt.weak_energy) << ","
                    << fmt(pt.gap) << "\n";
            if (out_path.empty())
                std::cout << csv.str();
            else
                mms::write_text(out_path, csv.str());
            return 0;
        }

        if (*poly) {
            if (*poly_trunc) {
                const auto res = mms::trunc_poly(c_param, alpha, beta, eps);
                json rep = {{"basis", "bernstein"},
                            {"interval", {-c_param, c_param}},
                            {"degree", res.degree},
                            {"certifiedError", res.certified_error},
                            {"coefficients", res.poly.bernstein_coeffs()}};
                emit(out_path, rep, as_json);
                return 0;
            }
            const auto res = mms::smooth_max(c_param, eps);
            json rep = {{"basis", "bernstein"},
                        {"interval", {-4.0 * c_param, 4.0 * c_param}},
                        {"degree", res.plus_part.degree()},
                        {"certifiedError", res.certified_error},
                        {"p0", res.p0},
                        {"coefficients", res.plus_part.bernstein_coeffs()}};
            emit(out_path, rep, as_json);
            return 0;
        }

        if (*suite) {
            std::vector<std::string> files;
            for (const auto& entry : std::filesystem::directory_iterator(dir_path))
                if (entry.path().extension() == ".json") files.push_back(entry.path().string());
            std::sort(files.begin(), files.end());
            std::vector<SuiteRow> rows;
            for (const auto& f : files) {
                try {
                    run_fixture(f, tol, rows);
                } catch (const mms::Error& e) {
                    // a fixture that fails to load or validate becomes a failing
                    // row instead of aborting the rest of the run
                    rows.push_back({std::filesystem::path(f).stem().string(),
                                    std::string("validate: ") + mms::error_code_name(e.code()),
                                    false, 1.0});
                }
            }
            std::ostringstream csv;
            csv.imbue(std::locale::classic());
            csv << "fixture,check,pass,residual\n";
            bool all_pass = true;
            for (const auto& r : rows) {
                csv << r.fixture << "," << r.check << "," << (r.pass ? "pass" : "fail") << ","
                    << fmt(r.residual) << "\n";
                all_pass = all_pass && r.pass;
            }
            if (out_path.empty())
                std::cout << csv.str();
            else
                mms::write_text(out_path, csv.str());
            return all_pass ? 0 : 1;
        }
    } catch (const mms::Error& e) {
        json err = {{"error", mms::error_code_name(e.code())}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        if (!out_path.empty()) {
            try {
                mms::write_json(out_path + ".error.json", err);
            } catch (...) {
            }
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << R"({"error":"Internal","message":")" << e.what() << "\"}\n";
        return 1;
    }
    return 0;
}
