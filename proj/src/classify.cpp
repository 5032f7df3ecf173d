#include "qpf/classify.hpp"

#include <algorithm>
#include <cmath>

#include "qpf/fourier.hpp"

namespace qpf {

const char* to_string(Quadrant q) {
    switch (q) {
        case Quadrant::IA: return "IA";
        case Quadrant::IB: return "IB";
        case Quadrant::IIA: return "IIA";
        case Quadrant::IIB: return "IIB";
        default: return "undecided";
    }
}

ClassificationReport classify(const System& system, const Budgets& b) {
    ClassificationReport rep;
    const LiftedSkewMap& map = system.map;

    HomeoValidation hv = validate_homeomorphism(map);
    if (!hv.pass)
        throw Error("classify: map fails the homeomorphism contract (periodicity defect " +
                    std::to_string(hv.periodicity_defect) + ", min increment " +
                    std::to_string(hv.min_increment) + ")");

    rep.rotation = rotation_number_orbit(map, CirclePoint(0.0), 0.0, b.rotation_N);
    const double rho = rep.rotation.value;

    // tolerance for the relation search must dominate the estimation error
    double tol = std::max(b.relation_tol, 10.0 * rep.rotation.spread + 1e-12);
    try {
        rep.relation = rational_relation_search(map.omega(), rho, b.relation_max_q,
                                                b.relation_max_k, tol);
    } catch (const Error& e) {
        rep.notes.push_back(std::string("relation stage: ") + e.what());
        rep.quadrant = Quadrant::Undecided;
        return rep;
    }

    // The deviation diagnostics need rho to much better accuracy than the
    // classification itself: a rho error e shows up as a linear drift N*e in
    // every profile. A certified relation pins rho exactly; otherwise a longer
    // orbit brings the error down to C/N.
    double rho_used = rho;
    if (rep.relation) {
        rho_used = -(static_cast<double>(rep.relation->l) +
                     static_cast<double>(rep.relation->k) * map.omega()) /
                   static_cast<double>(rep.relation->q);
        if (std::abs(rho_used - rho) > tol)
            rep.notes.push_back("relation-refined rho differs from the orbit estimate by " +
                                std::to_string(std::abs(rho_used - rho)));
    } else {
        long long refine_N = std::max(b.rotation_N, 30 * b.regularity_N);
        if (refine_N > b.rotation_N)
            rho_used = rotation_number_orbit(map, CirclePoint(0.0), 0.0, refine_N).value;
    }

    RegularityVerdict reg;
    try {
        reg = regularity_diagnostic(map, rho_used, b.regularity_orbits, b.regularity_N,
                                    b.exponent_threshold);
    } catch (const Error& e) {
        rep.notes.push_back(std::string("regularity stage: ") + e.what());
        rep.quadrant = Quadrant::Undecided;
        return rep;
    }
    rep.regularity = reg.verdict;
    rep.C_estimate = reg.C_estimate;
    for (const auto& prof : reg.evidence) rep.growth_exponents.push_back(prof.growth_exponent);

    if (reg.verdict == Regularity::Regular && rep.relation) {
        try {
            // margin over the sampled C estimate: finitely many orbits
            // underestimate the true deviation bound slightly
            double C_bound = 1.05 * reg.C_estimate + 0.01;
            StripSearchResult sr = strip_search(map, *rep.relation, C_bound,
                                                b.strip_N, b.strip_G);
            StripSummary sum;
            sum.width = sr.strip.width();
            sum.max_half_width = sr.max_half_width;
            sum.contained = sr.contained;
            sum.cover_q = sr.strip.cover_q;
            sum.winding_k = sr.strip.winding_k;
            // a strip that fills the whole fibre certifies nothing; for k = 0
            // relations the line closure can wrap around, so fall back to the
            // pullback construction of the invariant strip
            if (sr.contained && sum.width < 0.999) {
                rep.strip = sum;
                rep.quadrant = Quadrant::IA;
            } else {
                PullbackResult pb = pullback_attractor(map, constant_graph(b.strip_G, 0.0),
                                                       200, PullbackDirection::Forward);
                if (pb.converged) {
                    StripSummary psum;
                    psum.width = pb.strip.width();
                    psum.max_half_width = pb.strip.width();
                    psum.contained = true;
                    psum.cover_q = 1;
                    psum.winding_k = 0;
                    rep.strip = psum;
                    rep.quadrant = Quadrant::IA;
                    rep.notes.push_back("strip certified by the pullback construction; the "
                                        "line-closure strip was degenerate (width " +
                                        std::to_string(sum.width) + ")");
                } else {
                    rep.strip = sum;
                    rep.notes.push_back("strip stage: line closure degenerate or escaped the "
                                        "deviation bound, and the pullback did not converge");
                    rep.quadrant = Quadrant::Undecided;
                }
            }
        } catch (const Error& e) {
            rep.notes.push_back(std::string("strip stage: ") + e.what());
            rep.quadrant = Quadrant::Undecided;
        }
    } else if (reg.verdict == Regularity::Regular && !rep.relation) {
        try {
            StripFamilyOptions opt;
            opt.R = b.family_R;
            opt.N = b.family_N;
            opt.G = b.family_G;
            opt.C_bound = reg.C_estimate + 0.5;
            StripFamily fam = build_strip_family(map, rho_used, opt);
            rep.family_order_violation = fam.max_order_violation;
            SemiConjugacy H = build_semiconjugacy(fam);
            DefectReport def = semiconjugacy_defect(H, map, rho_used);
            rep.semiconjugacy_defect = def.defect;
            if (def.defect < b.defect_threshold) {
                rep.quadrant = Quadrant::IB;
            } else {
                rep.notes.push_back("semiconjugacy stage: defect " +
                                    std::to_string(def.defect) + " above threshold");
                rep.quadrant = Quadrant::Undecided;
            }
        } catch (const Error& e) {
            rep.notes.push_back(std::string("semiconjugacy stage: ") + e.what());
            rep.quadrant = Quadrant::Undecided;
        }
    } else if (reg.verdict == Regularity::Irregular) {
        try {
            BoxScanResult scan = box_transitivity_scan(map, b.transitive_G, b.transitive_spp,
                                                       b.transitive_N);
            rep.transitivity = scan.verdict;
            rep.transitive_unreached = scan.unreached_pairs;
        } catch (const Error& e) {
            rep.notes.push_back(std::string("transitivity stage: ") + e.what());
        }
        if (system.cocycle) {
            LyapunovEstimate lyap = lyapunov_exponent(*system.cocycle, CirclePoint(0.0),
                                                      0.8315, 0.5554, b.lyapunov_N);
            rep.lyapunov = lyap;
            rep.quadrant = (lyap.value > b.lyapunov_threshold) ? Quadrant::IIA : Quadrant::IIB;
        } else {
            rep.notes.push_back("irregular map without a cocycle backing: the measurable "
                                "invariant graph proxy is unavailable, A/B split undecided");
            rep.quadrant = Quadrant::Undecided;
        }
    } else {
        rep.notes.push_back("regularity diagnostic undecided at this budget");
        rep.quadrant = Quadrant::Undecided;
    }

    if (system.skew_a) {
        // small-divisor report for the skew-translation cohomological equation
        MapExpression a = *system.skew_a;
        CoboundarySolution sol = solve_coboundary(
            [&a](double theta) { return a.eval(theta, 0.0); }, map.omega());
        if (sol.small_divisors > 0)
            rep.notes.push_back("coboundary solve: " + std::to_string(sol.small_divisors) +
                                " small-divisor modes skipped (|e^{2 pi i k omega} - 1| < 1e-8)");
    }

    // cross-module consistency: an invariant strip forces rational dependence
    // and rho_T-bounded orbits
    if (rep.strip && rep.strip->contained && rep.strip->width < 0.999) {
        if (!rep.relation) {
            rep.notes.push_back("inconsistency: certified strip with no rational relation");
            rep.quadrant = Quadrant::Undecided;
        }
        if (rep.regularity == Regularity::Irregular) {
            rep.notes.push_back("inconsistency: certified strip on a map diagnosed irregular");
            rep.quadrant = Quadrant::Undecided;
        }
    }
    return rep;
}

}  // namespace qpf
