// Command-line front end: map diagnostics, classification and sweeps over
// JSON-configured quasiperiodically forced circle maps.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpf/classify.hpp"
#include "qpf/config.hpp"
#include "qpf/fourier.hpp"

using nlohmann::json;

namespace {

struct GlobalOpts {
    std::string map_file;
    std::string cocycle_file;
    std::string out_path;
    std::string format = "json";
    long long seed = 0;
    double omega_override = -1.0;
};

void emit(const GlobalOpts& g, const std::string& text) {
    if (g.out_path.empty()) {
        std::cout << text << std::endl;
    } else {
        std::ofstream out(g.out_path);
        if (!out) throw qpf::Error("cannot open output file " + g.out_path);
        out << text << std::endl;
    }
}

void emit_doc(const GlobalOpts& g, const std::string& kind, json payload) {
    emit(g, qpf::make_document(kind, std::move(payload), g.seed).dump(2));
}

json load_map_config(const GlobalOpts& g) {
    if (g.map_file.empty()) throw qpf::Error("--map FILE is required for this subcommand");
    std::ifstream in(g.map_file);
    if (!in) throw qpf::Error("cannot open map config " + g.map_file);
    json j;
    in >> j;
    if (g.omega_override > 0.0) {
        j["omega"] = g.omega_override;
        if (j.contains("cocycle")) j["cocycle"]["omega"] = g.omega_override;
        if (j.contains("inner")) j["inner"]["omega"] = g.omega_override;
    }
    return j;
}

qpf::System load_map(const GlobalOpts& g) { return qpf::load_system(load_map_config(g)); }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw qpf::Error("cannot open output file " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diagnostics for quasiperiodically forced circle homeomorphisms"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--map", g.map_file, "map config (JSON)");
    app.add_option("--cocycle", g.cocycle_file, "cocycle config (JSON)");
    app.add_option("--seed", g.seed, "seed recorded in reports");
    app.add_option("--out", g.out_path, "output path (default stdout)");
    app.add_option("--format", g.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--omega", g.omega_override, "override omega from the config");

    // rotnum
    auto* rotnum = app.add_subcommand("rotnum", "fibrewise rotation number");
    long long rot_n = 1000000;
    double rot_theta = 0.0, rot_x = 0.0;
    bool fibre_avg = false;
    int rot_grid = 64;
    rotnum->add_option("--n", rot_n, "iterates");
    rotnum->add_option("--theta", rot_theta, "orbit start theta");
    rotnum->add_option("--x", rot_x, "orbit start x");
    rotnum->add_flag("--fibre-avg", fibre_avg, "average T^N_theta(0) over a theta grid");
    rotnum->add_option("--grid", rot_grid, "theta grid for --fibre-avg");

    // deps
    auto* deps = app.add_subcommand("deps", "rational dependence of (omega, rho)");
    double deps_rho = std::numeric_limits<double>::quiet_NaN();
    long long deps_maxq = 64, deps_maxk = 64, deps_n = 1000000;
    double deps_tol = 1e-7;
    deps->add_option("--rho", deps_rho, "rotation number (estimated from the map if absent)");
    deps->add_option("--max-q", deps_maxq, "max q");
    deps->add_option("--max-k", deps_maxk, "max |k|");
    deps->add_option("--tol", deps_tol, "residual tolerance");
    deps->add_option("--n", deps_n, "iterates for the rho estimate");

    // deviations
    auto* devs = app.add_subcommand("deviations", "deviation profiles D_n");
    double dev_rho = std::numeric_limits<double>::quiet_NaN();
    long long dev_n = 100000, dev_decimate = 0;
    int dev_orbits = 8;
    std::string dev_trace;
    devs->add_option("--rho", dev_rho, "rho (estimated if absent)");
    devs->add_option("--n", dev_n, "iterates per orbit");
    devs->add_option("--orbits", dev_orbits, "number of sampled orbits");
    devs->add_option("--trace", dev_trace, "write a decimated D_n trace CSV here");
    devs->add_option("--decimate", dev_decimate, "trace decimation stride");

    // graph (pullback attractor)
    auto* graph = app.add_subcommand("graph", "pullback approximation of invariant graphs");
    int graph_G = 1024, graph_iters = 200;
    bool graph_backward = false;
    double graph_init = 0.0;
    graph->add_option("--grid", graph_G, "theta grid");
    graph->add_option("--iters", graph_iters, "graph-transform iterations");
    graph->add_flag("--backward", graph_backward, "iterate the inverse transform");
    graph->add_option("--init", graph_init, "initial constant graph height");

    // strip
    auto* strip = app.add_subcommand("strip", "q-cover invariant strip construction");
    long long strip_n = 10000;
    int strip_G = 256;
    double strip_rho = std::numeric_limits<double>::quiet_NaN();
    double strip_C = -1.0;
    long long strip_rot_n = 1000000;
    strip->add_option("--n", strip_n, "forward/backward steps");
    strip->add_option("--grid", strip_G, "bins on the q-cover");
    strip->add_option("--rho", strip_rho, "rotation number (estimated if absent)");
    strip->add_option("--c-bound", strip_C, "deviation bound (estimated if absent)");
    strip->add_option("--rot-n", strip_rot_n, "iterates for the rho estimate");

    // semiconj
    auto* semi = app.add_subcommand("semiconj", "semi-conjugacy to the torus translation");
    double semi_rho = std::numeric_limits<double>::quiet_NaN();
    int semi_R = 256, semi_G = 256;
    long long semi_n = 10000;
    semi->add_option("--rho", semi_rho, "rotation number (estimated if absent)");
    semi->add_option("--r-grid", semi_R, "strip family resolution");
    semi->add_option("--n", semi_n, "sweep length");
    semi->add_option("--grid", semi_G, "theta grid");

    // lyapunov
    auto* lyap = app.add_subcommand("lyapunov", "Lyapunov exponent of an SL(2,R) cocycle");
    long long lyap_n = 1000000;
    int lyap_seeds = 1;
    lyap->add_option("--n", lyap_n, "iterates");
    lyap->add_option("--seeds", lyap_seeds, "number of start vectors");

    // transitive
    auto* trans = app.add_subcommand("transitive", "box-to-box reachability scan");
    int trans_G = 16, trans_spp = 9;
    long long trans_n = 100000;
    bool trans_winding = false;
    trans->add_option("--grid", trans_G, "G x G boxes");
    trans->add_option("--n", trans_n, "iterates per seed");
    trans->add_option("--spp", trans_spp, "samples per box");
    trans->add_flag("--winding-probe", trans_winding,
                    "also report the winding growth of an iterated segment");

    // classify
    auto* cls = app.add_subcommand("classify", "full four-quadrant classification");
    qpf::Budgets budgets;
    cls->add_option("--rotation-n", budgets.rotation_N);
    cls->add_option("--regularity-n", budgets.regularity_N);
    cls->add_option("--orbits", budgets.regularity_orbits);
    cls->add_option("--strip-n", budgets.strip_N);
    cls->add_option("--family-n", budgets.family_N);
    cls->add_option("--family-r", budgets.family_R);
    cls->add_option("--grid", budgets.strip_G);
    cls->add_option("--lyapunov-n", budgets.lyapunov_N);
    cls->add_option("--transitive-n", budgets.transitive_N);
    cls->add_option("--max-q", budgets.relation_max_q);
    cls->add_option("--max-k", budgets.relation_max_k);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run one diagnostic over a parameter grid");
    std::string sweep_param, sweep_values, sweep_stage = "rotnum";
    long long sweep_n = 100000;
    sweep->add_option("--param", sweep_param, "parameter name in the map config")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();
    sweep->add_option("--stage", sweep_stage, "rotnum|deviations|lyapunov|transitive")
        ->check(CLI::IsMember({"rotnum", "deviations", "lyapunov", "transitive"}));
    sweep->add_option("--n", sweep_n, "per-point budget");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rotnum->parsed()) {
            qpf::System sys = load_map(g);
            qpf::RotationEstimate est =
                fibre_avg ? qpf::rotation_number_fibre_average(sys.map, rot_n, rot_grid)
                          : qpf::rotation_number_orbit(sys.map, qpf::CirclePoint(rot_theta),
                                                       rot_x, rot_n);
            emit_doc(g, "rotnum", qpf::to_json(est));
        } else if (deps->parsed()) {
            qpf::System sys = load_map(g);
            double rho = deps_rho;
            double spread = 0.0;
            if (!std::isfinite(rho)) {
                qpf::RotationEstimate est =
                    qpf::rotation_number_orbit(sys.map, qpf::CirclePoint(0.0), 0.0, deps_n);
                rho = est.value;
                spread = est.spread;
            }
            double tol = std::max(deps_tol, 10.0 * spread + 1e-12);
            auto rel = qpf::rational_relation_search(sys.map.omega(), rho, deps_maxq,
                                                     deps_maxk, tol);
            json payload{{"omega", sys.map.omega()}, {"rho", rho}, {"tol", tol}};
            payload["relation"] = rel ? qpf::to_json(*rel) : json(nullptr);
            emit_doc(g, "deps", payload);
        } else if (devs->parsed()) {
            qpf::System sys = load_map(g);
            double rho = dev_rho;
            if (!std::isfinite(rho))
                rho = qpf::rotation_number_orbit(sys.map, qpf::CirclePoint(0.0), 0.0,
                                                 std::max<long long>(dev_n, 100000))
                          .value;
            qpf::RegularityVerdict verdict =
                qpf::regularity_diagnostic(sys.map, rho, dev_orbits, dev_n);
            if (!dev_trace.empty()) {
                long long dec = dev_decimate > 0 ? dev_decimate : std::max<long long>(1, dev_n / 4096);
                qpf::DeviationProfile prof = qpf::deviation_profile(
                    sys.map, qpf::CirclePoint(0.0), 0.0, rho, dev_n, dec);
                std::ostringstream csv;
                csv << "n,D_n\n";
                csv.precision(17);
                for (auto [n, d] : prof.trace) csv << n << ',' << d << '\n';
                write_file(dev_trace, csv.str());
            }
            emit_doc(g, "deviations", qpf::to_json(verdict));
        } else if (graph->parsed()) {
            qpf::System sys = load_map(g);
            qpf::PullbackResult res = qpf::pullback_attractor(
                sys.map, qpf::constant_graph(graph_G, graph_init),
                graph_iters,
                graph_backward ? qpf::PullbackDirection::Backward
                               : qpf::PullbackDirection::Forward);
            if (g.format == "csv") {
                std::ostringstream csv;
                qpf::write_strip_csv(csv, res.strip);
                emit(g, csv.str());
            } else {
                emit_doc(g, "graph", qpf::to_json(res));
            }
        } else if (strip->parsed()) {
            qpf::System sys = load_map(g);
            double rho = strip_rho;
            double spread = 0.0;
            if (!std::isfinite(rho)) {
                qpf::RotationEstimate est =
                    qpf::rotation_number_orbit(sys.map, qpf::CirclePoint(0.0), 0.0, strip_rot_n);
                rho = est.value;
                spread = est.spread;
            }
            auto rel = qpf::rational_relation_search(sys.map.omega(), rho, 64, 64,
                                                     std::max(1e-7, 10.0 * spread + 1e-12));
            if (!rel)
                throw qpf::Error("strip: omega and rho are rationally independent up to the "
                                 "search bounds; no invariant strip to construct");
            double C = strip_C;
            if (C < 0.0) {
                qpf::RegularityVerdict v = qpf::regularity_diagnostic(sys.map, rho, 4, 10000);
                C = v.C_estimate + 1e-6;
            }
            qpf::StripSearchResult res = qpf::strip_search(sys.map, *rel, C, strip_n, strip_G);
            if (g.format == "csv") {
                std::ostringstream csv;
                qpf::write_strip_csv(csv, res.strip);
                emit(g, csv.str());
            } else {
                json payload = qpf::to_json(res);
                payload["relation"] = qpf::to_json(*rel);
                emit_doc(g, "strip", payload);
            }
        } else if (semi->parsed()) {
            qpf::System sys = load_map(g);
            double rho = semi_rho;
            if (!std::isfinite(rho))
                rho = qpf::rotation_number_orbit(sys.map, qpf::CirclePoint(0.0), 0.0, 1000000)
                          .value;
            qpf::StripFamilyOptions opt;
            opt.R = semi_R;
            opt.N = semi_n;
            opt.G = semi_G;
            qpf::StripFamily fam = qpf::build_strip_family(sys.map, rho, opt);
            qpf::SemiConjugacy H = qpf::build_semiconjugacy(fam);
            qpf::DefectReport def = qpf::semiconjugacy_defect(H, sys.map, rho);
            if (!g.out_path.empty()) {
                std::ostringstream csv;
                qpf::write_semiconjugacy_csv(csv, H);
                write_file(g.out_path, csv.str());
                g.out_path.clear();  // report goes to stdout next to the CSV
            }
            emit_doc(g, "semiconj", qpf::to_json(def, fam));
        } else if (lyap->parsed()) {
            if (g.cocycle_file.empty()) throw qpf::Error("--cocycle FILE is required");
            qpf::CocycleSpec c = qpf::load_cocycle_file(g.cocycle_file);
            double lo = 0.0, hi = 0.0, sum = 0.0;
            json runs = json::array();
            for (int s = 0; s < lyap_seeds; ++s) {
                // deterministic, well-spread unit start vectors
                double ang = 2.39996322972865332 * (s + static_cast<double>(g.seed));
                qpf::LyapunovEstimate est = qpf::lyapunov_exponent(
                    c, qpf::CirclePoint(0.0), std::cos(ang), std::sin(ang), lyap_n);
                runs.push_back(qpf::to_json(est));
                sum += est.value;
                if (s == 0) {
                    lo = hi = est.value;
                } else {
                    lo = std::min(lo, est.value);
                    hi = std::max(hi, est.value);
                }
            }
            json payload{{"value", sum / lyap_seeds},
                         {"drift", runs[0]["drift"]},
                         {"seeds_spread", hi - lo},
                         {"seeds", runs},
                         {"column_winding", c.validation().column_winding},
                         {"det_defect", c.validation().max_det_defect}};
            emit_doc(g, "lyapunov", payload);
        } else if (trans->parsed()) {
            qpf::System sys = load_map(g);
            qpf::BoxScanResult scan =
                qpf::box_transitivity_scan(sys.map, trans_G, trans_spp, trans_n);
            if (g.format == "csv") {
                std::ostringstream csv;
                csv << "source,target,first_hit\n";
                for (int s = 0; s < scan.grid * scan.grid; ++s)
                    for (int t = 0; t < scan.grid * scan.grid; ++t) {
                        uint32_t h = scan.hit(s, t);
                        csv << s << ',' << t << ','
                            << (h == UINT32_MAX ? -1 : static_cast<long long>(h)) << '\n';
                    }
                emit(g, csv.str());
            } else {
                json payload = qpf::to_json(scan);
                if (trans_winding) {
                    auto w = qpf::winding_growth(sys.map, 0.1, 0.15, 0.3, 512,
                                                 static_cast<int>(std::min<long long>(
                                                     trans_n, 400)));
                    double peak = 0.0;
                    for (double v : w) peak = std::max(peak, std::abs(v));
                    payload["winding_probe_max"] = peak;
                    payload["winding_probe_final"] = w.back();
                }
                emit_doc(g, "transitive", payload);
            }
        } else if (cls->parsed()) {
            qpf::System sys = load_map(g);
            qpf::ClassificationReport rep = qpf::classify(sys, budgets);
            emit_doc(g, "classify", qpf::to_json(rep));
        } else if (sweep->parsed()) {
            json base = load_map_config(g);
            std::vector<double> values;
            std::stringstream ss(sweep_values);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) values.push_back(std::stod(tok));
            json rows = json::array();
            std::ostringstream csv;
            csv << "param,value,result,error\n";
            csv.precision(17);
            for (double v : values) {
                json cfg = base;
                cfg["params"][sweep_param] = v;
                json row{{"param", sweep_param}, {"value", v}};
                try {
                    qpf::System sys = qpf::load_system(cfg);
                    if (sweep_stage == "rotnum") {
                        row["result"] = qpf::to_json(qpf::rotation_number_orbit(
                            sys.map, qpf::CirclePoint(0.0), 0.0, sweep_n));
                    } else if (sweep_stage == "deviations") {
                        double rho = qpf::rotation_number_orbit(sys.map, qpf::CirclePoint(0.0),
                                                                0.0, sweep_n)
                                         .value;
                        row["result"] = qpf::to_json(
                            qpf::regularity_diagnostic(sys.map, rho, 4,
                                                       std::max<long long>(sweep_n, 10000)));
                    } else if (sweep_stage == "lyapunov") {
                        if (!sys.cocycle) throw qpf::Error("map has no cocycle backing");
                        row["result"] = qpf::to_json(qpf::lyapunov_exponent(
                            *sys.cocycle, qpf::CirclePoint(0.0), 1.0, 0.5, sweep_n));
                    } else {
                        row["result"] = qpf::to_json(
                            qpf::box_transitivity_scan(sys.map, 16, 9, sweep_n));
                    }
                    csv << sweep_param << ',' << v << ",ok,\n";
                } catch (const std::exception& e) {
                    row["error"] = e.what();
                    csv << sweep_param << ',' << v << ",error," << e.what() << '\n';
                }
                rows.push_back(std::move(row));
            }
            if (g.format == "csv")
                emit(g, csv.str());
            else
                emit_doc(g, "sweep", rows);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
