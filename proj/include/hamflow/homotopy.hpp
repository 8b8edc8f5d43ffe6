#ifndef HAMFLOW_HOMOTOPY_HPP
#define HAMFLOW_HOMOTOPY_HPP

#include <map>
#include <optional>
#include <vector>

#include "hamflow/degree.hpp"
#include "hamflow/reduction.hpp"

namespace hamflow {

enum class HomotopyMode { Regularized, Pinched };

std::string to_string(HomotopyMode m);

struct ContinuationSchedule {
    HomotopyMode mode = HomotopyMode::Regularized;
    Real eps0 = 0.0;        // first regularization level; must sit below half the certified gap
    int eps_levels = 1;     // geometric sequence eps0 * 2^{-n}, n = 0..eps_levels-1
    int lambda_steps = 20;
    Real ball_radius_factor = 2.0;   // R(eps) = factor * sup|r| * sqrt(T|Omega|) / eps
    bool compute_degree = true;      // degrees at lambda = 0, 1/2, 1 (first eps level)
    int gap_segment_samples = 21;    // pinched-mode certificate sampling
    Real inner_fraction_floor = 1e-3;

    std::vector<Real> eps_sequence() const;
};

struct TracePoint {
    Real eps = 0.0;
    Real lambda = 0.0;
    Real norm = 0.0;
    Real residual = 0.0;
    Real step1_margin = 0.0;       // eps*||z|| - ||r(z)||  (regularized mode)
    Real inner_fraction = 0.0;     // ||P0 z|| / ||z||, 0 when z = 0
    Real contraction = 0.0;
    int outer_iterations = 0;
    int newton_iterations = 0;
    std::optional<int> degree;
};

struct ContinuationTrace {
    HomotopyMode mode = HomotopyMode::Regularized;
    std::vector<TracePoint> points;
    SpectralField final_field;
    Real final_hs_residual = 0.0;           // residual of the eps=0, lambda=1 equation
    std::vector<Real> cauchy_gaps;          // ||z_{eps_n} - z_{eps_{n+1}}|| at lambda = 1
    std::map<Real, int> degrees;            // lambda -> degree at the first eps level
    Real max_contraction = 0.0;
    Real gap_certificate = 0.0;             // pinched mode: certified spectral gap
    Real epsilon0 = 0.0;                    // regularized mode: certified (-eps0, 0) gap
};

struct EngineSettings {
    ReductionSettings reduction;
    Real residual_tol = 1e-8;       // accept a continuation point only below this
    int extra_starts = 4;           // random Newton starts besides warm/zero
    int max_step_halvings = 6;      // adaptive lambda refinement on failure
    std::uint64_t seed = 0;
    DegreeSettings degree;
};

/// Drives the two proof pipelines. Regularized mode sweeps lambda 0 -> 1 at
/// the first eps level, then marches eps down at lambda = 1, warm-starting and
/// recording Cauchy gaps; the Step-1 bound eps||z|| <= ||r(z)|| is enforced at
/// every accepted point. Pinched mode first certifies the spectral gap over
/// [B1, B2] (refusing the run when the certificate fails), then sweeps lambda
/// at eps = 0 with an a priori norm bound as the abort monitor.
ContinuationTrace run_homotopy(const ContinuationSchedule& schedule,
                               const HamiltonianModel& model, const WindowDecomposition& window,
                               const ModeSet& modes, const EngineSettings& settings = {});

/// Step-2 fixed-point map reduced to the inner space:
/// F(z0) = z0 - P0 (eps I + L - B)^{-1} [lambda r(z0 + z_perp(z0))].
/// Identity at lambda = 0; its ball degree realizes the paper's degree chain.
MapFn make_step2_map(const ModeSet& modes, const WindowDecomposition& window,
                     const HamiltonianModel& model, Real eps, Real lambda,
                     const ReductionSettings& settings = {});

/// Ball radius policy R(eps) = factor * sup|r| * sqrt(T |Omega|) / eps.
Real ball_radius(const ContinuationSchedule& schedule, const HamiltonianModel& model,
                 const ModeSet& modes, Real eps);

struct MonitorCheck {
    bool applicable = false;
    bool pass = true;
    Real worst_margin = 0.0;
    std::string detail;
};

struct MonitorReport {
    MonitorCheck step1;            // eps||z|| - ||r|| <= 0 pointwise
    MonitorCheck boundedness;      // no growth beyond 10x the median norm
    MonitorCheck saturating_bound; // eps||z|| <= M1 sqrt(T|Omega|)
    MonitorCheck inner_fraction;   // degeneration indicator above the floor
    MonitorCheck cauchy_trend;     // gaps non-increasing (ratio <= 1.1) for n >= 2
    bool all_pass() const;
};

/// Post-hoc re-check of the proofs' a priori bounds along a trace.
/// Reports only, never throws.
MonitorReport apriori_monitor(const ContinuationTrace& trace, const HamiltonianModel& model,
                              HomotopyMode mode,
                              Real inner_fraction_floor = 1e-3);

} // namespace hamflow

#endif
