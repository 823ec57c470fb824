#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vtolsim/graph.hpp"
#include "vtolsim/vec3.hpp"

namespace vtolsim {

/// Per-follower estimate of the leader's motion. The acceleration estimate
/// is a_hat = k_gamma * tanh(gamma), so ||a_hat||_inf < k_gamma always.
struct EstimatorState {
    Vec3 pHat{};      // position estimate [m]
    Vec3 vHat{};      // velocity estimate [m/s]
    Vec3 gamma{};     // acceleration-estimate argument (dimensionless)
    Vec3 gammaDot{};  // [1/s]
};

struct EstimatorRates {
    Vec3 pHatDot{};
    Vec3 vHatDot{};
    Vec3 gammaDdot{};
};

/// What one node receives from an in-neighbor.
struct NeighborSample {
    Vec3 pHat{};
    Vec3 vHat{};
    Vec3 aHat{};
    Vec3 aHatDot{};
    double weight = 0.0;
};

/// Leader signals as seen by a directly connected follower.
struct LeaderSample {
    Vec3 p{};
    Vec3 v{};
    Vec3 a{};
    Vec3 jerk{};  // supplies a_hat_dot of the virtual node 0
    double weight = 0.0;
};

/// Snapshot of everything node i hears during one integration stage.
struct NeighborView {
    std::vector<NeighborSample> neighbors;
    std::optional<LeaderSample> leader;
};

/// How the signum in the estimator is evaluated.
enum class SgnMode { Exact, Smoothed };

Vec3 applySgn(const Vec3& v, SgnMode mode, double eps);

Vec3 aHat(const Vec3& gamma, double kGamma);
Vec3 aHatDot(const Vec3& gamma, const Vec3& gammaDot, double kGamma);

/// Distributed-estimator rates for one node:
///   pHatDot   = vHat - k_p sum d_ij (pHat_i - pHat_j)
///   vHatDot   = aHat - k_v sum d_ij (vHat_i - vHat_j)
///   gammaDdot = -l_a gammaDot + 2 Gamma gammaDot
///               - (k_a/k_gamma) GammaBar^-1 (e + sgn(e))
/// with e = l_a * (aHat disagreement) + (aHatDot disagreement) — the per-node
/// sliding surface — Gamma = diag(tanh(gamma) .* gammaDot) and
/// GammaBar = diag(sech^2(gamma)). The sums run over follower neighbors plus
/// (when connected) the leader.
EstimatorRates estimatorDerivative(const EstimatorState& self, const NeighborView& view,
                                   const GainSet& gains, SgnMode mode, double eps);

/// Stacked estimation errors (pBar, vBar, aBar) of all nodes against the
/// leader truth; used for logging and acceptance checks.
struct EstimationErrors {
    std::vector<Vec3> pBar;
    std::vector<Vec3> vBar;
    std::vector<Vec3> aBar;
};

EstimationErrors estimationErrors(const std::vector<EstimatorState>& states, double kGamma,
                                  const Vec3& pR, const Vec3& vR, const Vec3& aR);

/// Diagnostic sliding surface s = (M (x) I3)(l_a aBar + aBarDot), one Vec3
/// per node.
std::vector<Vec3> slidingSurface(const std::vector<Vec3>& aBar, const std::vector<Vec3>& aBarDot,
                                 const MatN& m, double lA);

}  // namespace vtolsim
