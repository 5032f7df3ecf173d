#ifndef QPF_CLASSIFY_HPP
#define QPF_CLASSIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "qpf/cocycle.hpp"
#include "qpf/models.hpp"
#include "qpf/regularity.hpp"
#include "qpf/rotation.hpp"
#include "qpf/semiconj.hpp"
#include "qpf/strips.hpp"
#include "qpf/transitivity.hpp"

// Orchestration of all diagnostics into the four-quadrant report:
// regular/irregular x invariant-graphs/no-invariant-graphs.

namespace qpf {

// A map under study, with the optional backings some diagnostics need.
struct System {
    LiftedSkewMap map;
    std::optional<CocycleSpec> cocycle;    // enables the Lyapunov stage
    std::optional<MapExpression> skew_a;   // set for skew translations
};

struct Budgets {
    long long rotation_N = 1000000;
    long long relation_max_q = 64;
    long long relation_max_k = 64;
    double relation_tol = 1e-7;        // floor; widened to dominate estimate spread
    int regularity_orbits = 8;
    long long regularity_N = 100000;
    double exponent_threshold = 0.1;
    long long strip_N = 10000;
    int strip_G = 256;
    int family_R = 256;
    long long family_N = 10000;
    int family_G = 256;
    long long lyapunov_N = 1000000;
    int transitive_G = 16;
    int transitive_spp = 9;
    long long transitive_N = 100000;
    double defect_threshold = 1e-2;    // IB gate on the semi-conjugacy defect
    double lyapunov_threshold = 1e-2;  // IIA/IIB split
};

enum class Quadrant { IA, IB, IIA, IIB, Undecided };

const char* to_string(Quadrant q);

struct StripSummary {
    double width = 0.0;
    double max_half_width = 0.0;
    bool contained = false;
    int cover_q = 1;
    int winding_k = 0;
};

struct ClassificationReport {
    RotationEstimate rotation;
    std::optional<RationalRelation> relation;
    Regularity regularity = Regularity::Undecided;
    double C_estimate = 0.0;
    std::vector<double> growth_exponents;
    std::optional<StripSummary> strip;
    std::optional<double> semiconjugacy_defect;
    std::optional<double> family_order_violation;
    std::optional<LyapunovEstimate> lyapunov;
    std::optional<TransitivityVerdict> transitivity;
    int transitive_unreached = 0;
    Quadrant quadrant = Quadrant::Undecided;
    std::vector<std::string> notes;
};

ClassificationReport classify(const System& system, const Budgets& budgets);

}  // namespace qpf

#endif
