#pragma once

#include <string>
#include <vector>

#include "vtolsim/vec3.hpp"

namespace vtolsim {

/// Leader position and its derivatives through fourth order at one instant.
struct LeaderEval {
    Vec3 p{};
    Vec3 v{};
    Vec3 a{};
    Vec3 jerk{};
    Vec3 snap{};
};

/// Desired-trajectory provider. All built-in shapes have analytic
/// derivatives through fourth order; the polynomial bounds are obtained by
/// dense sampling with a 5% safety inflation, the rest analytically.
class LeaderTrajectory {
public:
    enum class Kind { Helix, Point, ConstantVelocity, Polynomial };

    static LeaderTrajectory helix(double radius, double angularRate, double climbRate);
    static LeaderTrajectory point(const Vec3& position);
    static LeaderTrajectory constantVelocity(const Vec3& position, const Vec3& velocity);
    /// One coefficient vector per axis, lowest order first: p_k(t) = sum c_i t^i.
    static LeaderTrajectory polynomial(const std::vector<double>& cx,
                                       const std::vector<double>& cy,
                                       const std::vector<double>& cz);

    LeaderEval evaluate(double t) const;

    /// sup over [0, horizon] of the componentwise |a| (inf norm of the
    /// acceleration trace).
    double accelBoundInf(double horizon) const;
    /// sup over [0, horizon] of ||a||.
    double accelBound2(double horizon) const;
    /// sup over [0, horizon] of ||l_a p^(3) - p^(4)||.
    double nPBar(double lA, double horizon) const;

    Kind kind() const { return kind_; }
    std::string describe() const;

private:
    LeaderTrajectory() = default;

    Kind kind_ = Kind::Point;
    // helix
    double radius_ = 0.0, omega_ = 0.0, climb_ = 0.0;
    // point / constant velocity
    Vec3 p0_{}, v0_{};
    // polynomial
    std::vector<double> coeffs_[3];
};

}  // namespace vtolsim
