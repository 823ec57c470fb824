#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vtolsim {

/// Dense square matrix just big enough for the follower-graph algebra.
class MatN {
public:
    MatN() = default;
    explicit MatN(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double operator()(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }

    MatN transpose() const;
    MatN operator*(const MatN& o) const;
    MatN operator+(const MatN& o) const;
    std::vector<double> operator*(const std::vector<double>& v) const;
    double frobeniusNorm() const;

    static MatN identity(std::size_t n);
    static MatN diag(const std::vector<double>& d);

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

/// Solve A x = b by partially pivoted LU. Throws std::runtime_error if a
/// pivot falls below the singularity tolerance.
std::vector<double> solveLinear(MatN a, std::vector<double> b);

/// Smallest eigenvalue of a symmetric matrix via cyclic Jacobi rotations,
/// iterated until the off-diagonal Frobenius norm drops below 1e-12
/// (relative to the matrix scale). Throws on non-convergence.
double lambdaMinSymmetric(MatN a);

/// Directed leader-follower communication topology. Entry d(i,j) is the
/// weight with which follower i+1 hears follower j+1; d0[i] is the weight
/// with which follower i+1 hears the leader (node 0).
struct CommGraph {
    std::size_t n = 0;
    MatN d;
    std::vector<double> d0;

    explicit CommGraph(std::size_t followers) : n(followers), d(followers), d0(followers, 0.0) {}

    /// Build from an explicit weighted edge list [from, to, weight] with
    /// node 0 reserved for the leader. Throws on malformed entries.
    static CommGraph fromEdges(std::size_t followers,
                               const std::vector<std::array<double, 3>>& edges);
};

/// M = L + diag(d0), the nonsymmetric Laplacian plus leader links.
MatN mMatrix(const CommGraph& g);

/// True iff every follower is reachable from the leader along directed edges.
bool hasDirectedSpanningTree(const CommGraph& g);

/// Positive diagonal weights theta with M^T theta = 1, the scaling under
/// which Xi = M^T Theta + Theta M is strictly diagonally dominant and
/// positive definite for every leader-rooted spanning-tree graph. Throws if
/// M is singular or any weight is non-positive (no spanning tree).
std::vector<double> thetaWeights(const MatN& m);

/// Xi = M^T Theta + Theta M, symmetrized after assembly.
MatN xiMatrix(const MatN& m, const std::vector<double>& theta);

/// Derived quantities of a communication graph used by the gain validator.
struct GraphCertificate {
    MatN m;
    std::vector<double> theta;
    MatN xi;
    double lambdaMinXi = 0.0;
    double lambdaMinMtThetaM = 0.0;
    double normTheta = 0.0;    // F-norm of diag(theta)
    double normThetaM = 0.0;   // F-norm of Theta * M
};

GraphCertificate buildCertificate(const CommGraph& g);

/// All estimator and controller gains plus the gravity constant.
struct GainSet {
    double k_p = 8.0;
    double k_v = 8.0;
    double k_a = 4.0;
    double l_a = 12.0;
    double k_gamma = 0.5;
    double k_eta = 4.0;
    double l_p = 4.0;
    double l_v = 4.0;
    double l_q = 16.0;
    double k_q = 16.0;
    double g = 9.81;

    bool allPositive() const;
};

/// One evaluated gain condition: pass/fail plus the numeric margin
/// (condition value minus its bound; positive means satisfied).
struct GainCondition {
    std::string name;
    bool pass = false;
    bool evaluable = true;  // false when a prerequisite condition failed
    double margin = 0.0;
    std::string detail;
};

struct GainValidationReport {
    std::vector<GainCondition> conditions;
    double accelBoundInf = 0.0;  // sup_t of the componentwise |pddot_r|
    double accelBound2 = 0.0;    // sup_t of ||pddot_r||
    double nPBar = 0.0;          // sup_t ||l_a p_r^(3) - p_r^(4)||

    bool allPass() const;
};

/// Evaluate the estimator/controller gain conditions against a graph
/// certificate and the leader trajectory bounds. Failed conditions are
/// reported with their margins, never thrown.
GainValidationReport validateGains(const GainSet& gains, const GraphCertificate& cert,
                                   double nPBar, double accelBoundInf, double accelBound2);

}  // namespace vtolsim
