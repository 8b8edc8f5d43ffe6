#ifndef HAMFLOW_MODEL_HPP
#define HAMFLOW_MODEL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "hamflow/field.hpp"
#include "hamflow/matrix_field.hpp"

namespace hamflow {

enum class ModelKind { LinearForced, Saturating, Pinched };

std::string to_string(ModelKind k);

/// Which linear part the homotopy right-hand side blends against:
///   Regularized:  Phi'_lambda(z) = (1-lambda) B z  + lambda grad H(z)
///   Pinched:      Phi'_lambda(z) = (1-lambda) B1 z + lambda grad H(z)
/// Both equal grad H at lambda = 1.
enum class HomotopyForm { Regularized, Pinched };

struct SaturatingParams {
    Real m2 = 0.0;          // sign strength of the remainder
    int sign = -1;          // +1 or -1, the (H2+/-) orientation
    Vector center;          // optional shift c of the remainder (default 0)
    Real threshold = 0.99;  // saturation level fixing K and the certified bound

    Real m1() const { return m2; }                 // |r| <= m2 everywhere
    Real certified_m2() const { return threshold * m2; }
    /// Smallest radius K with sign*(r(z),z) >= certified_m2*|z| for |z| > K.
    Real k_radius() const;
};

/// A nonlinearity grad H with declared hypothesis class. Three shipped kinds:
///   linear_forced:  grad H(z) = B(t,x) z + f(t,x)
///   saturating:     grad H(z) = B(t,x) z + sign*M2*(z-c)/sqrt(1+|z-c|^2)
///   pinched:        grad H(z) = Bz(t,x,z) z + f(t,x),
///                   B1 <= Bz <= B2 pointwise, shipped Bz = B1 + (B2-B1)/(1+|z|^2)
struct HamiltonianModel {
    ModelKind kind = ModelKind::LinearForced;
    int m = 1;
    Real lipschitz = 0.0;   // declared Lipschitz constant of grad H (and of Phi'_lambda)
    MatrixField B;          // asymptotic linear part (linear_forced, saturating)
    MatrixField B1, B2;     // pinch bounds (pinched)
    SaturatingParams sat;   // saturating only
    SpectralField forcing;  // optional; empty means zero

    /// Pointwise state-dependent linearization (pinched kind).
    std::function<Matrix(Real t, const Vector& x, const Vector& z)> state_B;

    void validate() const;

    static HamiltonianModel linear_forced(MatrixField B, SpectralField f, Real lipschitz);
    static HamiltonianModel saturating(MatrixField B, SaturatingParams p, Real lipschitz);
    /// Shipped pinched model: Bz = B1 + (B2-B1)/(1+|z|^2), bounded remainder f.
    static HamiltonianModel pinched(MatrixField B1, MatrixField B2, SpectralField f,
                                    Real lipschitz);

    bool admits_form(HomotopyForm form) const;
    /// Linear part the homotopy blends against for the given form.
    const MatrixField& reference_B(HomotopyForm form) const;

    /// Pointwise remainder r(t,x,z); the grid sample index locates (t,x) for
    /// sampled coefficients. fvalue is the forcing sample at that point.
    Vector remainder_point(const Vector& z, const Matrix& Bsample, const VectorRef& fvalue) const;
    Vector grad_point(Real t, const Vector& x, const Vector& z, const Matrix& Bsample,
                      const VectorRef& fvalue) const;

    /// sup |r(t,x,z)| over states, used by ball-radius policies and monitors.
    /// For linear_forced this is the grid sup of |f|.
    Real remainder_sup(const GridSpec& grid) const;
};

/// Precomputed grid data for fast repeated evaluation of one model on one grid.
struct ModelGridContext {
    const HamiltonianModel* model = nullptr;
    const ModeSet* modes = nullptr;
    GridSpec grid;
    Vector forcing_values;   // zeros when the model has no forcing
    bool bref_constant = true;
    Matrix bref_const;
    // sampled reference-B entries resolved per point when not constant
    const MatrixField* bref = nullptr;
    HomotopyForm form = HomotopyForm::Regularized;
};

ModelGridContext make_context(const HamiltonianModel& model, const ModeSet& modes,
                              const GridSpec& grid, HomotopyForm form);

/// grad H(z) on the grid, pointwise.
Vector grad_values(const ModelGridContext& ctx, const VectorRef& state_values);
/// Phi'_lambda(z) on the grid.
Vector rhs_values(const ModelGridContext& ctx, const VectorRef& state_values, Real lambda);
/// r(t,x,z) on the grid.
Vector remainder_values(const ModelGridContext& ctx, const VectorRef& state_values);

/// Coefficients of the L2 projection of grad H(t,x,z(t,x)) onto the truncated
/// space, evaluated pseudo-spectrally on the (2x oversampled by default) grid.
Vector grad_eval(const HamiltonianModel& model, const ModeSet& modes, const VectorRef& z,
                 const GridSpec& grid);
SpectralField grad_eval(const HamiltonianModel& model, const SpectralField& z);

/// || (eps I + L) z - Phi'_lambda(z) || in the truncated L2 norm. The homotopy
/// form is derived from the model kind (pinched -> pinched, else regularized).
Real residual(const HamiltonianModel& model, const ModeSet& modes, const VectorRef& z, Real eps,
              Real lambda, const GridSpec& grid);
Real residual(const HamiltonianModel& model, const SpectralField& z, Real eps, Real lambda);

HomotopyForm natural_form(const HamiltonianModel& model);

/// Numerical hypothesis audit: Monte-Carlo plus structured samples checking
/// the declared Lipschitz ratio, remainder bound, sign condition beyond K,
/// pinching, and o(z) decay. Failure is a report, never an exception.
struct AuditCheck {
    bool applicable = false;
    bool pass = true;
    Real worst_margin = 0.0;  // >= 0 means satisfied
    std::string detail;
};

struct AuditReport {
    int samples = 0;
    AuditCheck lipschitz;
    AuditCheck remainder_bound;
    AuditCheck sign_condition;
    AuditCheck pinching;
    AuditCheck decay;
    bool all_pass() const;
};

AuditReport audit_conditions(const HamiltonianModel& model, int sample_count, Real radius,
                             std::uint64_t seed = 0);

} // namespace hamflow

#endif
