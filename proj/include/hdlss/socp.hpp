#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "hdlss/types.hpp"

namespace hdlss {

// Dense second-order cone programming by a primal-dual interior-point
// method with Nesterov-Todd scaling and Mehrotra predictor-corrector:
//
//     minimize    c'x
//     subject to  Gx + s = h,   s in K,
//
// where K is a product of a nonnegative orthant block followed by
// second-order cone blocks { u : u_0 >= ||u_1:|| }. The dual is
//
//     maximize   -h'z
//     subject to  G'z + c = 0,  z in K.
//
// Sized for dense problems with a few hundred variables, which is what the
// span-reduced DWD program produces.

struct ConeDims {
    Eigen::Index nonneg = 0;
    std::vector<Eigen::Index> soc;

    Eigen::Index total() const {
        Eigen::Index t = nonneg;
        for (auto q : soc) t += q;
        return t;
    }
    // Degree of the cone (barrier parameter count): each SOC counts once.
    Eigen::Index degree() const { return nonneg + static_cast<Eigen::Index>(soc.size()); }
};

struct SocpSettings {
    int max_iterations = 200;
    double feastol = 1e-9;
    double abstol = 1e-12;
    double reltol = 1e-9;
};

enum class SocpStatus { Optimal, MaxIterations, NumericalLimit };

struct SocpResult {
    Eigen::VectorXd x, s, z;
    double pcost = 0.0, dcost = 0.0;
    double gap = 0.0, relgap = 0.0;
    double pres = 0.0, dres = 0.0;
    int iterations = 0;
    SocpStatus status = SocpStatus::MaxIterations;
};

namespace socp_detail {

// Identity element of the cone: ones on the orthant, (1,0,...,0) per SOC.
inline Eigen::VectorXd cone_identity(const ConeDims& dims) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(dims.total());
    e.head(dims.nonneg).setOnes();
    Eigen::Index at = dims.nonneg;
    for (auto q : dims.soc) {
        e[at] = 1.0;
        at += q;
    }
    return e;
}

//

// Smallest t such that u + t*e is in the cone; u is interior iff < 0.
inline double max_step(const Eigen::VectorXd& u, const ConeDims& dims) {
    double t = -std::numeric_limits<double>::infinity();
    if (dims.nonneg > 0) t = std::max(t, -u.head(dims.nonneg).minCoeff());
    Eigen::Index at = dims.nonneg;
    for (auto q : dims.soc) {
        t = std::max(t, u.segment(at + 1, q - 1).norm() - u[at]);
        at += q;
    }
    return t == -std::numeric_limits<double>::infinity() ? 0.0 : t;
}

// Nesterov-Todd scaling W with W z = W^{-T} s = lambda. For the orthant
// W = diag(d); for a SOC block W = beta * (2 v v' - J) with v'Jv = 1 and
// J = diag(1, -I).
struct NTScaling {
    Eigen::VectorXd d;  // orthant scaling factors
    struct SocBlock {
        double beta = 1.0;
        Eigen::VectorXd v;
    };
    std::vector<SocBlock> socs;
    Eigen::VectorXd lambda;
    bool valid = false;
};

inline double jnrm2_sq(const Eigen::VectorXd& u) {
    return u[0] * u[0] - u.tail(u.size() - 1).squaredNorm();
}

inline NTScaling compute_scaling(const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                                 const ConeDims& dims) {
    NTScaling W;
    W.lambda.resize(dims.total());

    if (dims.nonneg > 0) {
        if (s.head(dims.nonneg).minCoeff() <= 0.0 || z.head(dims.nonneg).minCoeff() <= 0.0)
            return W;  // boundary hit, caller bails out
        W.d = (s.head(dims.nonneg).array() / z.head(dims.nonneg).array()).sqrt();
        W.lambda.head(dims.nonneg) =
            (s.head(dims.nonneg).array() * z.head(dims.nonneg).array()).sqrt();
    }

    Eigen::Index at = dims.nonneg;
    for (auto q : dims.soc) {
        auto sk = s.segment(at, q);
        auto zk = z.segment(at, q);
        double a2 = jnrm2_sq(sk);
        double b2 = jnrm2_sq(zk);
        if (a2 <= 0.0 || b2 <= 0.0 || sk[0] <= 0.0 || zk[0] <= 0.0) return W;
        double a = std::sqrt(a2), b = std::sqrt(b2);

        NTScaling::SocBlock blk;
        blk.beta = std::sqrt(a / b);

        double cc = std::sqrt((sk.dot(zk) / (a * b) + 1.0) / 2.0);
        Eigen::VectorXd v = sk / a;
        v[0] += zk[0] / b;
        v.tail(q - 1) -= zk.tail(q - 1) / b;
        v /= 2.0 * cc;
        v[0] += 1.0;
        v /= std::sqrt(2.0 * v[0]);
        blk.v = std::move(v);

        double dd = 2.0 * cc + sk[0] / a + zk[0] / b;
        Eigen::VectorXd lam(q);
        lam[0] = cc;
        lam.tail(q - 1) = ((cc + zk[0] / b) / dd) * (sk.tail(q - 1) / a) +
                          ((cc + sk[0] / a) / dd) * (zk.tail(q - 1) / b);
        W.lambda.segment(at, q) = std::sqrt(a * b) * lam;
        W.socs.push_back(std::move(blk));
        at += q;
    }
    W.valid = true;
    return W;
}

// u := W u, applied blockwise. For SOC, W u = beta (2 v (v'u) - J u).
inline void apply_w(const NTScaling& W, const ConeDims& dims, Eigen::VectorXd& u) {
    if (dims.nonneg > 0) u.head(dims.nonneg).array() *= W.d.array();
    Eigen::Index at = dims.nonneg;
    for (size_t k = 0; k < dims.soc.size(); ++k) {
        Eigen::Index q = dims.soc[k];
        const auto& v = W.socs[k].v;
        auto uk = u.segment(at, q);
        double vu = v.dot(uk);
        Eigen::VectorXd ju = uk;
        ju.tail(q - 1) *= -1.0;
        uk = W.socs[k].beta * (2.0 * vu * v - ju);
        at += q;
    }
}

// u := W^{-1} u. For SOC, W^{-1} u = (1/beta) (2 (Jv) (v'Ju) - Ju).
inline void apply_w_inv(const NTScaling& W, const ConeDims& dims, Eigen::VectorXd& u) {
    if (dims.nonneg > 0) u.head(dims.nonneg).array() /= W.d.array();
    Eigen::Index at = dims.nonneg;
    for (size_t k = 0; k < dims.soc.size(); ++k) {
        Eigen::Index q = dims.soc[k];
        const auto& v = W.socs[k].v;
        auto uk = u.segment(at, q);
        Eigen::VectorXd jv = v;
        jv.tail(q - 1) *= -1.0;
        double vju = jv.dot(uk);  // v'Ju = (Jv)'u
        Eigen::VectorXd ju = uk;
        ju.tail(q - 1) *= -1.0;
        uk = (2.0 * vju * jv - ju) / W.socs[k].beta;
        at += q;
    }
}

// Jordan product u o v.
inline Eigen::VectorXd jordan_mul(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                  const ConeDims& dims) {
    Eigen::VectorXd r(dims.total());
    r.head(dims.nonneg) = u.head(dims.nonneg).cwiseProduct(v.head(dims.nonneg));
    Eigen::Index at = dims.nonneg;
    for (auto q : dims.soc) {
        auto uk = u.segment(at, q);
        auto vk = v.segment(at, q);
        r[at] = uk.dot(vk);
        r.segment(at + 1, q - 1) = uk[0] * vk.tail(q - 1) + vk[0] * uk.tail(q - 1);
        at += q;
    }
    return r;
}

// Solves lambda o x = u.
inline Eigen::VectorXd jordan_div(const Eigen::VectorXd& lambda, const Eigen::VectorXd& u,
                                  const ConeDims& dims) {
    Eigen::VectorXd x(dims.total());
    x.head(dims.nonneg) = u.head(dims.nonneg).cwiseQuotient(lambda.head(dims.nonneg));
    Eigen::Index at = dims.nonneg;
    for (auto q : dims.soc) {
        auto lk = lambda.segment(at, q);
        auto uk = u.segment(at, q);
        double det = jnrm2_sq(lk);
        double x0 = (lk[0] * uk[0] - lk.tail(q - 1).dot(uk.tail(q - 1))) / det;
        x[at] = x0;
        x.segment(at + 1, q - 1) = (uk.tail(q - 1) - x0 * lk.tail(q - 1)) / lk[0];
        at += q;
    }
    return x;
}

// x := H(lambda)^{-1/2} x, the map under which the step-to-boundary of the
// updated iterate can be read off with max_step.
inline void scale2(const Eigen::VectorXd& lambda, Eigen::VectorXd& x, const ConeDims& dims) {
    x.head(dims.nonneg).array() /= lambda.head(dims.nonneg).array();
    Eigen::Index at = dims.nonneg;
    for (auto q : dims.soc) {
        auto lk = lambda.segment(at, q);
        auto xk = x.segment(at, q);
        double a = std::sqrt(jnrm2_sq(lk));
        double lx = (lk[0] * xk[0] - lk.tail(q - 1).dot(xk.tail(q - 1))) / a;
        double x0 = xk[0];
        xk[0] = lx;
        double cme = -(lx + x0) / (lk[0] / a + 1.0) / a;
        xk.tail(q - 1) += cme * lk.tail(q - 1);
        xk /= a;
        at += q;
    }
}

}  // namespace socp_detail

inline SocpResult solve_socp(const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                             const Eigen::VectorXd& c, const ConeDims& dims,
                             const SocpSettings& settings = {}) {
    using namespace socp_detail;

    const Eigen::Index rows = G.rows();
    const Eigen::Index m = G.cols();
    if (rows != dims.total() || h.size() != rows || c.size() != m)
        throw Error(ErrorKind::Dimension, "solve_socp: inconsistent problem sizes");
    if (!G.allFinite() || !h.allFinite() || !c.allFinite())
        throw Error(ErrorKind::Data, "solve_socp: non-finite problem data");

    const double deg = static_cast<double>(dims.degree());
    const Eigen::VectorXd e = cone_identity(dims);
    const double resx0 = std::max(1.0, c.norm());
    const double resz0 = std::max(1.0, h.norm());

    // Initial point: x minimizes ||Gx - h||, s is the shifted residual,
    // z comes from the least-norm dual-feasibility solve, both pushed
    // strictly inside the cone.
    Eigen::LDLT<Eigen::MatrixXd> gtg(G.transpose() * G);
    SocpResult res;
    res.x = gtg.solve(G.transpose() * h);
    res.s = h - G * res.x;
    double ts = max_step(res.s, dims);
    if (ts >= -1e-8 * std::max(1.0, res.s.norm())) res.s += (1.0 + ts) * e;
    res.z = G * gtg.solve(-c);
    double tz = max_step(res.z, dims);
    if (tz >= -1e-8 * std::max(1.0, res.z.norm())) res.z += (1.0 + tz) * e;

    SocpResult best = res;
    best.pres = best.dres = best.relgap = std::numeric_limits<double>::infinity();
    auto remember_best = [&](const SocpResult& cur) {
        double cur_bad = std::max({cur.pres, cur.dres, cur.relgap});
        double best_bad = std::max({best.pres, best.dres, best.relgap});
        if (cur_bad < best_bad) best = cur;
    };

    Eigen::MatrixXd Gs(rows, m);
    Eigen::VectorXd dx(m), dz(rows), ds(rows);

    for (int iter = 0;; ++iter) {
        Eigen::VectorXd rx = c + G.transpose() * res.z;
        Eigen::VectorXd rz = G * res.x + res.s - h;
        res.pcost = c.dot(res.x);
        res.dcost = -h.dot(res.z);
        res.gap = res.s.dot(res.z);
        if (res.pcost < 0.0)
            res.relgap = res.gap / -res.pcost;
        else if (res.dcost > 0.0)
            res.relgap = res.gap / res.dcost;
        else
            res.relgap = std::numeric_limits<double>::infinity();
        res.pres = rz.norm() / resz0;
        res.dres = rx.norm() / resx0;
        res.iterations = iter;
        remember_best(res);

        if (res.pres <= settings.feastol && res.dres <= settings.feastol &&
            (res.gap <= settings.abstol || res.relgap <= settings.reltol)) {
            res.status = SocpStatus::Optimal;
            return res;
        }
        if (iter >= settings.max_iterations) {
            best.status = SocpStatus::MaxIterations;
            return best;
        }

        NTScaling W = compute_scaling(res.s, res.z, dims);
        if (!W.valid) {
            // Iterate reached the cone boundary numerically; report the
            // best point seen.
            best.status = SocpStatus::NumericalLimit;
            return best;
        }
        const double mu = res.gap / deg;

        // Scaled coefficient matrix and its normal-equations factor.
        Gs = G;
        for (Eigen::Index j = 0; j < m; ++j) {
            Eigen::VectorXd col = Gs.col(j);
            apply_w_inv(W, dims, col);
            Gs.col(j) = col;
        }
        Eigen::MatrixXd H = Gs.transpose() * Gs;
        Eigen::LLT<Eigen::MatrixXd> llt(H);
        if (llt.info() != Eigen::Success) {
            double bump = 1e-14 * std::max(1.0, H.trace() / static_cast<double>(m));
            for (int attempt = 0; attempt < 8 && llt.info() != Eigen::Success; ++attempt) {
                H.diagonal().array() += bump;
                llt.compute(H);
                bump *= 100.0;
            }
            if (llt.info() != Eigen::Success) {
                best.status = SocpStatus::NumericalLimit;
                return best;
            }
        }

        Eigen::VectorXd lambda_sq = jordan_mul(W.lambda, W.lambda, dims);
        Eigen::VectorXd winv_rz = rz;
        apply_w_inv(W, dims, winv_rz);

        Eigen::VectorXd corrector;  // (W^{-T} ds_aff) o (W dz_aff)
        double sigma = 0.0;
        double step = 1.0;

        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd d_s = -lambda_sq;
            if (pass == 1) {
                d_s -= corrector;
                d_s += sigma * mu * e;
            }
            Eigen::VectorXd dl = jordan_div(W.lambda, d_s, dims);

            Eigen::VectorXd rhs = -rx - Gs.transpose() * (winv_rz + dl);
            dx = llt.solve(rhs);
            dz = Gs * dx + winv_rz + dl;
            apply_w_inv(W, dims, dz);
            ds = -rz - G * dx;

            Eigen::VectorXd ds_sc = ds;
            apply_w_inv(W, dims, ds_sc);
            Eigen::VectorXd dz_sc = dz;
            apply_w(W, dims, dz_sc);

            if (pass == 0) {
                double dsdz = ds_sc.dot(dz_sc);
                corrector = jordan_mul(ds_sc, dz_sc, dims);
                scale2(W.lambda, ds_sc, dims);
                scale2(W.lambda, dz_sc, dims);
                double t = std::max({0.0, max_step(ds_sc, dims), max_step(dz_sc, dims)});
                double astep = t == 0.0 ? 1.0 : std::min(1.0, 1.0 / t);
                sigma = std::pow(
                    std::clamp(1.0 - astep + dsdz / res.gap * astep * astep, 0.0, 1.0), 3.0);
            } else {
                scale2(W.lambda, ds_sc, dims);
                scale2(W.lambda, dz_sc, dims);
                double t = std::max({0.0, max_step(ds_sc, dims), max_step(dz_sc, dims)});
                step = t == 0.0 ? 1.0 : std::min(1.0, 0.99 / t);
            }
        }

        res.x += step * dx;
        res.s += step * ds;
        res.z += step * dz;
    }
}

}  // namespace hdlss
