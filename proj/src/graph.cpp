#include "vtolsim/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace vtolsim {

MatN MatN::transpose() const {
    MatN r(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) r(j, i) = (*this)(i, j);
    return r;
}

MatN MatN::operator*(const MatN& o) const {
    MatN r(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t k = 0; k < n_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n_; ++j) r(i, j) += aik * o(k, j);
        }
    return r;
}

MatN MatN::operator+(const MatN& o) const {
    MatN r(n_);
    for (std::size_t i = 0; i < n_ * n_; ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
}

std::vector<double> MatN::operator*(const std::vector<double>& v) const {
    std::vector<double> r(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
}

double MatN::frobeniusNorm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
}

MatN MatN::identity(std::size_t n) {
    MatN r(n);
    for (std::size_t i = 0; i < n; ++i) r(i, i) = 1.0;
    return r;
}

MatN MatN::diag(const std::vector<double>& d) {
    MatN r(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) r(i, i) = d[i];
    return r;
}

std::vector<double> solveLinear(MatN a, std::vector<double> b) {
    const std::size_t n = a.size();
    if (b.size() != n) throw std::invalid_argument("solveLinear: size mismatch");

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a(i, j)));
    const double tol = std::max(scale, 1.0) * 1e-13;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
        if (std::fabs(a(piv, k)) <= tol)
            throw std::runtime_error("solveLinear: matrix is singular");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

namespace {

double offDiagonalNorm(const MatN& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace

double lambdaMinSymmetric(MatN a) {
    const std::size_t n = a.size();
    if (n == 0) throw std::invalid_argument("lambdaMinSymmetric: empty matrix");
    if (n == 1) return a(0, 0);

    const double scale = std::max(a.frobeniusNorm(), 1e-300);
    const double target = 1e-12 * scale;
    const int maxSweeps = 100;

    for (int sweep = 0; sweep < maxSweeps; ++sweep) {
        if (offDiagonalNorm(a) <= target) break;
        if (sweep == maxSweeps - 1)
            throw std::runtime_error("lambdaMinSymmetric: Jacobi iteration did not converge");
        for (std::size_t p = 0; p < n - 1; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    double lam = a(0, 0);
    for (std::size_t i = 1; i < n; ++i) lam = std::min(lam, a(i, i));
    return lam;
}

CommGraph CommGraph::fromEdges(std::size_t followers,
                               const std::vector<std::array<double, 3>>& edges) {
    CommGraph g(followers);
    for (const auto& e : edges) {
        const double fromD = e[0], toD = e[1], w = e[2];
        if (fromD != std::floor(fromD) || toD != std::floor(toD))
            throw std::runtime_error("graph edge endpoints must be integers");
        const long from = static_cast<long>(fromD);
        const long to = static_cast<long>(toD);
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::runtime_error("graph edge weight must be finite and >= 0");
        if (from < 0 || from > static_cast<long>(followers) || to < 1 ||
            to > static_cast<long>(followers))
            throw std::runtime_error("graph edge endpoint out of range (node 0 is the leader; "
                                     "edges must point to a follower)");
        if (from == to) throw std::runtime_error("graph self-edges are not allowed");
        if (from == 0)
            g.d0[static_cast<std::size_t>(to - 1)] = w;
        else
            g.d(static_cast<std::size_t>(to - 1), static_cast<std::size_t>(from - 1)) = w;
    }
    return g;
}

MatN mMatrix(const CommGraph& g) {
    MatN m(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        double rowSum = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) {
            if (j == i) continue;
            rowSum += g.d(i, j);
            m(i, j) = -g.d(i, j);
        }
        m(i, i) = rowSum + g.d0[i];
    }
    return m;
}

bool hasDirectedSpanningTree(const CommGraph& g) {
    std::vector<bool> seen(g.n, false);
    std::deque<std::size_t> frontier;
    for (std::size_t i = 0; i < g.n; ++i)
        if (g.d0[i] > 0.0) {
            seen[i] = true;
            frontier.push_back(i);
        }
    while (!frontier.empty()) {
        const std::size_t j = frontier.front();
        frontier.pop_front();
        for (std::size_t i = 0; i < g.n; ++i)
            if (!seen[i] && g.d(i, j) > 0.0) {
                seen[i] = true;
                frontier.push_back(i);
            }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

std::vector<double> thetaWeights(const MatN& m) {
    // theta solves M^T theta = 1. Column sums of Theta M are then all one,
    // which makes Xi = M^T Theta + Theta M strictly diagonally dominant with
    // row margin 1 + theta_i d_i0 whenever M comes from a leader-rooted
    // spanning tree. (Scaling row i of Theta M by 1/(M^-1 1)_i instead does
    // NOT give dominance in general; see the graph tests for a two-node
    // counterexample.)
    const std::vector<double> theta =
        solveLinear(m.transpose(), std::vector<double>(m.size(), 1.0));
    for (double t : theta)
        if (!(t > 0.0))
            throw std::runtime_error("thetaWeights: M^-T 1 has a non-positive entry; "
                                     "the graph violates the spanning-tree assumption");
    return theta;
}

MatN xiMatrix(const MatN& m, const std::vector<double>& theta) {
    const std::size_t n = m.size();
    MatN xi(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            xi(i, j) = m(j, i) * theta[j] + theta[i] * m(i, j);
    // symmetrize to shed any last-bit asymmetry
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (xi(i, j) + xi(j, i));
            xi(i, j) = v;
            xi(j, i) = v;
        }
    return xi;
}

GraphCertificate buildCertificate(const CommGraph& g) {
    GraphCertificate cert;
    cert.m = mMatrix(g);
    cert.theta = thetaWeights(cert.m);
    cert.xi = xiMatrix(cert.m, cert.theta);
    cert.lambdaMinXi = lambdaMinSymmetric(cert.xi);

    const std::size_t n = g.n;
    MatN mtm(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += cert.m(k, i) * cert.theta[k] * cert.m(k, j);
            mtm(i, j) = s;
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (mtm(i, j) + mtm(j, i));
            mtm(i, j) = v;
            mtm(j, i) = v;
        }
    cert.lambdaMinMtThetaM = lambdaMinSymmetric(mtm);

    double st = 0.0;
    for (double t : cert.theta) st += t * t;
    cert.normTheta = std::sqrt(st);

    MatN thetaM(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) thetaM(i, j) = cert.theta[i] * cert.m(i, j);
    cert.normThetaM = thetaM.frobeniusNorm();
    return cert;
}

bool GainSet::allPositive() const {
    return k_p > 0 && k_v > 0 && k_a > 0 && l_a > 0 && k_gamma > 0 && k_eta > 0 && l_p > 0 &&
           l_v > 0 && l_q > 0 && k_q > 0 && g > 0;
}

bool GainValidationReport::allPass() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const GainCondition& c) { return c.pass; });
}

GainValidationReport validateGains(const GainSet& gains, const GraphCertificate& cert,
                                   double nPBar, double accelBoundInf, double accelBound2) {
    GainValidationReport rep;
    rep.nPBar = nPBar;
    rep.accelBoundInf = accelBoundInf;
    rep.accelBound2 = accelBound2;

    const double n = static_cast<double>(cert.m.size());
    const double lamXi = cert.lambdaMinXi;
    const double nTheta2 = cert.normTheta * cert.normTheta;

    {
        GainCondition c;
        c.name = "k_p k_v > ||Theta||^2 / lambda_min(Xi)^2";
        const double rhs = nTheta2 / (lamXi * lamXi);
        c.margin = gains.k_p * gains.k_v - rhs;
        c.pass = c.margin > 0.0;
        c.detail = "lhs=" + std::to_string(gains.k_p * gains.k_v) + " rhs=" + std::to_string(rhs);
        rep.conditions.push_back(c);
    }
    {
        GainCondition c;
        c.name = "l_a lower bound";
        const double den =
            cert.lambdaMinMtThetaM * (gains.k_p * gains.k_v * lamXi * lamXi - nTheta2);
        if (den <= 0.0) {
            c.evaluable = false;
            c.pass = false;
            c.margin = 0.0;
            c.detail = "not evaluable: requires the k_p k_v condition to hold";
        } else {
            const double rhs = gains.k_p * lamXi * nTheta2 / den;
            c.margin = gains.l_a - rhs;
            c.pass = c.margin > 0.0;
            c.detail = "lhs=" + std::to_string(gains.l_a) + " rhs=" + std::to_string(rhs);
        }
        rep.conditions.push_back(c);
    }
    {
        GainCondition c;
        c.name = "k_a > 2 sqrt(n) ||Theta M|| N_p_bar / lambda_min(Xi)";
        const double rhs = 2.0 * std::sqrt(n) * cert.normThetaM * nPBar / lamXi;
        c.margin = gains.k_a - rhs;
        c.pass = c.margin > 0.0;
        c.detail = "lhs=" + std::to_string(gains.k_a) + " rhs=" + std::to_string(rhs);
        rep.conditions.push_back(c);
    }
    {
        GainCondition c;
        c.name = "k_eta < (g - k_gamma)/2";
        c.margin = 0.5 * (gains.g - gains.k_gamma) - gains.k_eta;
        c.pass = c.margin > 0.0;
        c.detail = "k_eta=" + std::to_string(gains.k_eta) +
                   " bound=" + std::to_string(0.5 * (gains.g - gains.k_gamma));
        rep.conditions.push_back(c);
    }
    {
        GainCondition c;
        c.name = "k_gamma >= sup |pddot_r| (componentwise)";
        c.margin = gains.k_gamma - accelBoundInf;
        c.pass = c.margin >= 0.0;
        c.detail = "k_gamma=" + std::to_string(gains.k_gamma) +
                   " sup_inf=" + std::to_string(accelBoundInf) +
                   " sup_2norm=" + std::to_string(accelBound2);
        rep.conditions.push_back(c);
    }
    return rep;
}

}  // namespace vtolsim
