#include "cmipdual/ipm.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <cstdio>
#include <cstdlib>

namespace cmipdual {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Seg = Eigen::Index;

struct BlockRange {
    const ConeBlock* blk;
    Seg off;
    Seg len;
};

std::vector<BlockRange> ranges(const ConeProduct& K)
{
    std::vector<BlockRange> out;
    for (std::size_t i = 0; i < K.size(); ++i) {
        out.push_back({&K.blocks()[i], static_cast<Seg>(K.offset(i)), static_cast<Seg>(K.blocks()[i].ambient_dim())});
    }
    return out;
}

// Matrix of the linear map u -> svec(L' smat(u) L) for symmetric-preserving maps.
Matrix congruence_matrix(const Matrix& L)
{
    const auto n = L.rows();
    const auto dim = n * (n + 1) / 2;
    Matrix out(dim, dim);
    for (Seg k = 0; k < dim; ++k) {
        Vector e = Vector::Zero(dim);
        e[k] = 1.0;
        out.col(k) = svec(L.transpose() * smat(e) * L);
    }
    return out;
}

double soc_det(const Eigen::Ref<const Vector>& x)
{
    const auto n = x.size();
    return x[n - 1] * x[n - 1] - x.head(n - 1).squaredNorm();
}

// Smallest positive root of a*t^2 + 2*b*t + c = 0 with c > 0, or +inf.
double smallest_positive_root(double a, double b, double c)
{
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
    if (std::abs(a) <= 1e-300 + 1e-14 * scale) {
        return b < 0.0 ? -c / (2.0 * b) : kInf;
    }
    const double disc = b * b - a * c;
    if (disc < 0.0) {
        return kInf;
    }
    const double sq = std::sqrt(disc);
    // Stable pair of roots.
    const double q = -(b + std::copysign(sq, b));
    double best = kInf;
    for (double r : {q / a, q != 0.0 ? c / q : kInf}) {
        if (r > 0.0 && r < best) {
            best = r;
        }
    }
    return best;
}

struct HsdProblem {
    Matrix G;  // G x + s = h
    Vector h;
    Vector c;
    ConeProduct K;
};

struct HsdOutcome {
    SolveStatus status = SolveStatus::IllPosed;
    Vector x;
    Vector z;
    Vector s;
    double tau = 1.0;
    double kappa = 1.0;
    Residuals res;
    std::optional<Vector> cert_z;  // z / (-h'z)
    std::optional<Vector> cert_x;  // x / (-c'x)
    int iterations = 0;
};

Vector shift_into_cone(const ConeProduct& K, const Vector& v)
{
    const double alpha = -cone_margin(K, v);
    if (alpha < 0.0) {
        return v;
    }
    return v + (1.0 + alpha) * interior_direction(K);
}

// Core HSD loop on min c'x s.t. G x + s = h, s in K.
HsdOutcome run_hsd(const HsdProblem& p, const IpmOptions& opts)
{
    const auto n = p.G.cols();
    const auto m = p.G.rows();
    const ConeProduct& K = p.K;
    const Vector e = interior_direction(K);
    const double deg = static_cast<double>(K.degree());
    const double hnorm = std::max(1.0, p.h.norm());
    const double cnorm = std::max(1.0, p.c.norm());

    Vector x = Vector::Zero(n);
    Vector s;
    Vector z;
    if (n > 0) {
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(p.G);
        x = cod.solve(p.h);
        Eigen::CompleteOrthogonalDecomposition<Matrix> codt(p.G.transpose());
        z = codt.solve(Vector(-p.c));
    } else {
        z = Vector::Zero(m);
    }
    s = shift_into_cone(K, p.h - p.G * x);
    z = shift_into_cone(K, z);
    double tau = 1.0;
    double kappa = 1.0;

    HsdOutcome out;
    double best_merit = kInf;
    const auto record = [&](SolveStatus st, const Residuals& r) {
        out.status = st;
        out.x = x;
        out.z = z;
        out.s = s;
        out.tau = tau;
        out.kappa = kappa;
        out.res = r;
    };

    const Seg N = n + m + 1;
    for (int it = 0; it <= opts.max_iterations; ++it) {
        out.iterations = it;
        const Vector rx = p.G.transpose() * z + p.c * tau;
        const Vector rz = s + p.G * x - p.h * tau;
        const double cx = p.c.dot(x);
        const double hz = p.h.dot(z);
        const double rt = kappa + cx + hz;
        const double pcost = cx / tau;
        const double dcost = -hz / tau;
        Residuals r;
        r.primal_res = rz.norm() / tau / hnorm;
        r.dual_res = rx.norm() / tau / cnorm;
        r.gap = std::max(s.dot(z) / (tau * tau), std::abs(pcost - dcost)) / std::max(1.0, std::abs(pcost));
        const double pinf = hz < 0.0 ? (p.G.transpose() * z).norm() / (-hz) / cnorm : kInf;
        const double dinf = cx < 0.0 ? (p.G * x + s).norm() / (-cx) / hnorm : kInf;

        if (!std::isfinite(r.primal_res) || !std::isfinite(r.dual_res) || !std::isfinite(r.gap)) {
            break;
        }
        if (r.primal_res <= opts.tol && r.dual_res <= opts.tol && r.gap <= opts.tol) {
            record(SolveStatus::Optimal, r);
            return out;
        }
        if (pinf <= opts.infeasibility_tol) {
            record(SolveStatus::PrimalInfeasible, r);
            out.cert_z = z / (-hz);
            return out;
        }
        if (dinf <= opts.infeasibility_tol) {
            record(SolveStatus::DualInfeasible, r);
            out.cert_x = x / (-cx);
            return out;
        }
        if (std::getenv("CMIPDUAL_TRACE")) {
            std::fprintf(stderr, "it %d pres %.2e dres %.2e gap %.2e pcost %.6e dcost %.6e tau %.2e kappa %.2e\n", it, r.primal_res, r.dual_res, r.gap, pcost, dcost, tau, kappa);
        }
        const double merit = std::max({r.primal_res, r.dual_res, r.gap});
        if (merit < best_merit) {
            best_merit = merit;
            record(SolveStatus::IllPosed, r);
        }
        if (it == opts.max_iterations) {
            break;
        }

        // Newton system in scaled variables (dx, W dz, dtau).
        NtScaling sc;
        try {
            sc = nt_scaling(K, s, z);
        } catch (const std::exception&) {
            break;
        }
        if (!sc.W.allFinite() || !sc.Winv.allFinite()) {
            break;
        }
        const Matrix WinvT = sc.Winv.transpose();
        const Matrix Gh = WinvT * p.G;
        const Vector hh = WinvT * p.h;
        Matrix KKT = Matrix::Zero(N, N);
        KKT.block(0, n, n, m) = Gh.transpose();
        KKT.block(0, n + m, n, 1) = p.c;
        KKT.block(n, 0, m, n) = Gh;
        KKT.block(n, n, m, m) = -Matrix::Identity(m, m);
        KKT.block(n, n + m, m, 1) = -hh;
        KKT.block(n + m, 0, 1, n) = p.c.transpose();
        KKT.block(n + m, n, 1, m) = hh.transpose();
        KKT(n + m, n + m) = -kappa / tau;
        Matrix KKTreg = KKT;
        for (Seg i = 0; i < n; ++i) {
            KKTreg(i, i) += 1e-10;
        }
        const Eigen::PartialPivLU<Matrix> lu(KKTreg);

        const double mu = (s.dot(z) + tau * kappa) / (deg + 1.0);
        const Vector& lam = sc.lambda;
        const Vector lam_sq = jordan_product(K, lam, lam);

        struct Direction {
            Vector dx, dz_scaled, dz, ds;
            double dtau, dkappa;
        };
        const auto solve_dir = [&](const Vector& ds_rhs, double dt_rhs, double eta) {
            const Vector q = jordan_divide(K, lam, ds_rhs);
            Vector rhs(N);
            rhs.head(n) = -eta * rx;
            rhs.segment(n, m) = -eta * (WinvT * rz) - q;
            rhs[n + m] = -eta * rt - dt_rhs / tau;
            Vector sol = lu.solve(rhs);
            for (int k = 0; k < 3; ++k) {
                const Vector resid = rhs - KKT * sol;
                sol += lu.solve(resid);
            }
            Direction d;
            d.dx = sol.head(n);
            d.dz_scaled = sol.segment(n, m);
            d.dtau = sol[n + m];
            d.dz = sc.Winv * d.dz_scaled;
            d.ds = sc.W.transpose() * (q - d.dz_scaled);
            d.dkappa = (dt_rhs - kappa * d.dtau) / tau;
            return std::make_pair(d, q);
        };
        const auto step_to_boundary = [&](const Direction& d) {
            double a = std::min(max_step(K, s, d.ds), max_step(K, z, d.dz));
            if (d.dtau < 0.0) {
                a = std::min(a, -tau / d.dtau);
            }
            if (d.dkappa < 0.0) {
                a = std::min(a, -kappa / d.dkappa);
            }
            return a;
        };

        // Predictor.
        const auto [aff, q_aff] = solve_dir(-lam_sq, -tau * kappa, 1.0);
        const double alpha_aff = std::min(1.0, step_to_boundary(aff));
        const double sigma = std::pow(1.0 - alpha_aff, 3);

        // Corrector.
        const Vector ws_aff = q_aff - aff.dz_scaled;  // W^{-T} ds_aff
        const Vector ds_rhs = -lam_sq + sigma * mu * e - jordan_product(K, ws_aff, aff.dz_scaled);
        const double dt_rhs = -tau * kappa + sigma * mu - aff.dtau * aff.dkappa;
        const auto [dir, q_unused] = solve_dir(ds_rhs, dt_rhs, 1.0 - sigma);
        (void)q_unused;
        const double alpha = std::min(1.0, opts.step_fraction * step_to_boundary(dir));
        if (!(alpha > 1e-12) || !dir.dx.allFinite() || !dir.dz.allFinite() || !dir.ds.allFinite()) {
            break;
        }
        x += alpha * dir.dx;
        z += alpha * dir.dz;
        s += alpha * dir.ds;
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
    }

    // Stalled or out of iterations: classify by the tau/kappa ratio when the
    // certificate holds at a slightly looser level.
    const double cx = p.c.dot(out.x);
    const double hz = p.h.dot(out.z);
    if (out.tau <= opts.infeasibility_tol * std::max(1.0, out.kappa)) {
        const double pinf = hz < 0.0 ? (p.G.transpose() * out.z).norm() / (-hz) / cnorm : kInf;
        const double dinf = cx < 0.0 ? (p.G * out.x + out.s).norm() / (-cx) / hnorm : kInf;
        if (pinf <= 10.0 * opts.infeasibility_tol && pinf <= dinf) {
            out.status = SolveStatus::PrimalInfeasible;
            out.cert_z = out.z / (-hz);
        } else if (dinf <= 10.0 * opts.infeasibility_tol) {
            out.status = SolveStatus::DualInfeasible;
            out.cert_x = out.x / (-cx);
        }
    }
    return out;
}

void add_check(CheckReport& rep, std::string name, double value, double limit)
{
    const bool ok = value <= limit;
    rep.checks.push_back({std::move(name), value, limit, ok});
    rep.pass = rep.pass && ok;
}

void add_cone_checks(CheckReport& rep, const ConeProduct& K, const Vector& v, const std::string& what,
                     double tol)
{
    const auto margins = block_margins(K, v);
    for (std::size_t i = 0; i < margins.size(); ++i) {
        add_check(rep, what + " in " + K.blocks()[i].describe() + " (block " + std::to_string(i) + ")",
                  std::max(0.0, -margins[i]), tol);
    }
}

}  // namespace

std::string to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Optimal:
        return "Optimal";
    case SolveStatus::PrimalInfeasible:
        return "PrimalInfeasible";
    case SolveStatus::DualInfeasible:
        return "DualInfeasible";
    case SolveStatus::IllPosed:
        return "IllPosed";
    }
    return "?";
}

std::string to_string(Feasibility f)
{
    switch (f) {
    case Feasibility::Feasible:
        return "feasible";
    case Feasibility::Infeasible:
        return "infeasible";
    case Feasibility::Unknown:
        return "unknown";
    }
    return "?";
}

NtScaling nt_scaling(const ConeProduct& K, const Vector& s, const Vector& z)
{
    const auto m = static_cast<Seg>(K.total_dim());
    NtScaling out{Matrix::Zero(m, m), Matrix::Zero(m, m), Vector::Zero(m)};
    for (const auto& r : ranges(K)) {
        const auto ss = s.segment(r.off, r.len);
        const auto zz = z.segment(r.off, r.len);
        switch (r.blk->kind()) {
        case ConeKind::Orthant: {
            if ((ss.array() <= 0.0).any() || (zz.array() <= 0.0).any()) {
                throw std::domain_error("nt_scaling: point not interior");
            }
            const Vector d = (ss.array() / zz.array()).sqrt();
            out.W.block(r.off, r.off, r.len, r.len) = d.asDiagonal();
            out.Winv.block(r.off, r.off, r.len, r.len) = d.cwiseInverse().asDiagonal();
            out.lambda.segment(r.off, r.len) = (ss.array() * zz.array()).sqrt();
            break;
        }
        case ConeKind::SecondOrder: {
            const double sdet = soc_det(ss);
            const double zdet = soc_det(zz);
            if (!(sdet > 0.0) || !(zdet > 0.0) || ss[r.len - 1] <= 0.0 || zz[r.len - 1] <= 0.0) {
                throw std::domain_error("nt_scaling: point not interior");
            }
            const auto k = r.len - 1;
            const Vector sb = ss / std::sqrt(sdet);
            const Vector zb = zz / std::sqrt(zdet);
            const double gamma = std::sqrt((1.0 + sb.dot(zb)) / 2.0);
            // t-last layout: J flips the vector part.
            Vector wb(r.len);
            wb.head(k) = (sb.head(k) - zb.head(k)) / (2.0 * gamma);
            wb[k] = (sb[k] + zb[k]) / (2.0 * gamma);
            const double eta = std::pow(sdet / zdet, 0.25);
            const double w0 = wb[k];
            const Vector w1 = wb.head(k);
            Matrix W(r.len, r.len);
            W.topLeftCorner(k, k) = Matrix::Identity(k, k) + w1 * w1.transpose() / (1.0 + w0);
            W.topRightCorner(k, 1) = w1;
            W.bottomLeftCorner(1, k) = w1.transpose();
            W(k, k) = w0;
            Matrix Wi = W;
            Wi.topRightCorner(k, 1) = -w1;
            Wi.bottomLeftCorner(1, k) = -w1.transpose();
            out.W.block(r.off, r.off, r.len, r.len) = eta * W;
            out.Winv.block(r.off, r.off, r.len, r.len) = Wi / eta;
            out.lambda.segment(r.off, r.len) = eta * W * zz;
            break;
        }
        case ConeKind::PsdTriangle: {
            const Eigen::LLT<Matrix> ls(smat(ss));
            const Eigen::LLT<Matrix> lz(smat(zz));
            if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) {
                throw std::domain_error("nt_scaling: point not interior");
            }
            const Matrix Ls = ls.matrixL();
            const Matrix Lz = lz.matrixL();
            const Eigen::JacobiSVD<Matrix> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Vector sv = svd.singularValues();
            if (!(sv.minCoeff() > 0.0)) {
                throw std::domain_error("nt_scaling: point not interior");
            }
            const Matrix R = Ls * svd.matrixV() * sv.cwiseSqrt().cwiseInverse().asDiagonal();
            const Matrix Rinv = R.inverse();
            // W(u) = svec(R' U R); W^{-1}(u) = svec(R^{-T} U R^{-1}).
            out.W.block(r.off, r.off, r.len, r.len) = congruence_matrix(R);
            out.Winv.block(r.off, r.off, r.len, r.len) = congruence_matrix(Rinv);
            out.lambda.segment(r.off, r.len) = svec(Matrix(sv.asDiagonal()));
            break;
        }
        }
    }
    return out;
}

Vector jordan_product(const ConeProduct& K, const Vector& u, const Vector& v)
{
    Vector out(u.size());
    for (const auto& r : ranges(K)) {
        const auto a = u.segment(r.off, r.len);
        const auto b = v.segment(r.off, r.len);
        switch (r.blk->kind()) {
        case ConeKind::Orthant:
            out.segment(r.off, r.len) = a.cwiseProduct(b);
            break;
        case ConeKind::SecondOrder: {
            const auto k = r.len - 1;
            out.segment(r.off, k) = a[k] * b.head(k) + b[k] * a.head(k);
            out[r.off + k] = a.dot(b);
            break;
        }
        case ConeKind::PsdTriangle: {
            const Matrix A = smat(a);
            const Matrix B = smat(b);
            out.segment(r.off, r.len) = svec(0.5 * (A * B + B * A));
            break;
        }
        }
    }
    return out;
}

Vector jordan_divide(const ConeProduct& K, const Vector& lambda, const Vector& rhs)
{
    Vector out(rhs.size());
    for (const auto& r : ranges(K)) {
        const auto l = lambda.segment(r.off, r.len);
        const auto b = rhs.segment(r.off, r.len);
        switch (r.blk->kind()) {
        case ConeKind::Orthant:
            out.segment(r.off, r.len) = b.cwiseQuotient(l);
            break;
        case ConeKind::SecondOrder: {
            // Arrow matrix inverse: l0 x1 + x0 l1 = b1, l'x = b0 (t-last).
            const auto k = r.len - 1;
            const double l0 = l[k];
            const double det = soc_det(l);
            const double x0 = (l0 * b[k] - l.head(k).dot(b.head(k))) / det;
            out[r.off + k] = x0;
            out.segment(r.off, k) = (b.head(k) - x0 * l.head(k)) / l0;
            break;
        }
        case ConeKind::PsdTriangle: {
            const Matrix L = smat(l);
            const Matrix B = smat(b);
            Matrix X(L.rows(), L.cols());
            for (Seg i = 0; i < L.rows(); ++i) {
                for (Seg j = 0; j < L.cols(); ++j) {
                    X(i, j) = 2.0 * B(i, j) / (L(i, i) + L(j, j));
                }
            }
            out.segment(r.off, r.len) = svec(X);
            break;
        }
        }
    }
    return out;
}

double max_step(const ConeProduct& K, const Vector& x, const Vector& dx)
{
    double best = kInf;
    for (const auto& r : ranges(K)) {
        const auto a = x.segment(r.off, r.len);
        const auto d = dx.segment(r.off, r.len);
        switch (r.blk->kind()) {
        case ConeKind::Orthant:
            for (Seg i = 0; i < r.len; ++i) {
                if (d[i] < 0.0) {
                    best = std::min(best, -a[i] / d[i]);
                }
            }
            break;
        case ConeKind::SecondOrder: {
            const auto k = r.len - 1;
            const double qa = d[k] * d[k] - d.head(k).squaredNorm();
            const double qb = a[k] * d[k] - a.head(k).dot(d.head(k));
            const double qc = soc_det(a);
            if (qc <= 0.0) {
                return 0.0;
            }
            best = std::min(best, smallest_positive_root(qa, qb, qc));
            break;
        }
        case ConeKind::PsdTriangle: {
            const Eigen::LLT<Matrix> llt(smat(a));
            if (llt.info() != Eigen::Success) {
                return 0.0;
            }
            const Matrix L = llt.matrixL();
            const Matrix Li = L.inverse();
            const Matrix M = Li * smat(d) * Li.transpose();
            const double lmin = jacobi_eigen(0.5 * (M + M.transpose())).values[0];
            if (lmin < 0.0) {
                best = std::min(best, -1.0 / lmin);
            }
            break;
        }
        }
    }
    return best;
}

ContinuousResult solve_continuous(const Instance& inst, const IpmOptions& opts)
{
    if (inst.n1() != 0) {
        throw std::invalid_argument("solve_continuous: instance has integer variables; relax it first");
    }
    ContinuousResult res;
    const auto n = static_cast<Seg>(inst.n2());
    if (inst.m() == 0) {
        if (inst.d().norm() == 0.0) {
            res.status = SolveStatus::Optimal;
            res.primal = Vector::Zero(n);
            res.dual_lambda = Vector(0);
            res.objective = 0.0;
        } else {
            res.status = SolveStatus::DualInfeasible;
            res.certificate = Vector(-inst.d() / inst.d().squaredNorm());
            res.objective = -kInf;
        }
        return res;
    }
    HsdProblem p{-inst.G(), -inst.b(), inst.d(), inst.cone()};
    const auto out = run_hsd(p, opts);
    res.status = out.status;
    res.iterations = out.iterations;
    res.residuals = out.res;
    res.primal = Vector(out.x / out.tau);
    res.dual_lambda = Vector(out.z / out.tau);
    switch (out.status) {
    case SolveStatus::Optimal:
    case SolveStatus::IllPosed:
        res.objective = inst.d().dot(*res.primal);
        break;
    case SolveStatus::PrimalInfeasible:
        res.objective = kInf;
        res.certificate = out.cert_z;
        res.primal.reset();
        res.dual_lambda.reset();
        break;
    case SolveStatus::DualInfeasible:
        res.objective = -kInf;
        res.certificate = out.cert_x;
        res.primal.reset();
        res.dual_lambda.reset();
        break;
    }
    return res;
}

std::string CheckReport::failures() const
{
    std::string out;
    for (const auto& c : checks) {
        if (!c.ok) {
            out += (out.empty() ? "" : ", ") + c.name;
        }
    }
    return out;
}

CheckReport verify_dual_point(const Instance& inst, const Vector& lambda, double tol)
{
    CheckReport rep;
    if (static_cast<std::size_t>(lambda.size()) != inst.m()) {
        add_check(rep, "dual length", kInf, 0.0);
        return rep;
    }
    const Matrix H = inst.full_matrix();
    const Vector obj = inst.full_objective();
    const Vector eq = H.transpose() * lambda - obj;
    for (Seg j = 0; j < eq.size(); ++j) {
        const auto col = static_cast<std::size_t>(j);
        const auto& name = col < inst.n1() ? inst.int_names()[col] : inst.cont_names()[col - inst.n1()];
        add_check(rep, "dual equality for column " + name, std::abs(eq[j]), tol * std::max(1.0, std::abs(obj[j])));
    }
    add_cone_checks(rep, inst.cone(), lambda, "dual vector", tol);
    return rep;
}

CheckReport verify_improving_ray(const Instance& inst, const Vector& ray, double tol)
{
    CheckReport rep;
    if (static_cast<std::size_t>(ray.size()) != inst.n1() + inst.n2()) {
        add_check(rep, "ray length", kInf, 0.0);
        return rep;
    }
    add_check(rep, "ray objective = -1", std::abs(inst.full_objective().dot(ray) + 1.0), tol);
    add_cone_checks(rep, inst.cone(), inst.full_matrix() * ray, "ray image", tol);
    return rep;
}

CheckReport verify_farkas(const Instance& inst, const Vector& lambda, double tol)
{
    CheckReport rep;
    if (static_cast<std::size_t>(lambda.size()) != inst.m()) {
        add_check(rep, "farkas length", kInf, 0.0);
        return rep;
    }
    const Vector eq = inst.full_matrix().transpose() * lambda;
    add_check(rep, "farkas columns vanish", eq.size() > 0 ? eq.cwiseAbs().maxCoeff() : 0.0, tol);
    add_check(rep, "farkas rhs = 1", std::abs(inst.b().dot(lambda) - 1.0), tol);
    add_cone_checks(rep, inst.cone(), lambda, "farkas vector", tol);
    return rep;
}

CheckReport verify_certificate(const Instance& inst, const ContinuousResult& res, double tol)
{
    switch (res.status) {
    case SolveStatus::Optimal: {
        CheckReport rep;
        if (!res.primal || !res.dual_lambda) {
            add_check(rep, "optimal result carries primal and dual", kInf, 0.0);
            return rep;
        }
        const Vector& y = *res.primal;
        const Vector& lam = *res.dual_lambda;
        if (static_cast<std::size_t>(y.size()) != inst.n1() + inst.n2()) {
            add_check(rep, "primal length", kInf, 0.0);
            return rep;
        }
        add_cone_checks(rep, inst.cone(), Vector(inst.full_matrix() * y - inst.b()), "primal slack", tol);
        const auto dual = verify_dual_point(inst, lam, tol);
        rep.checks.insert(rep.checks.end(), dual.checks.begin(), dual.checks.end());
        rep.pass = rep.pass && dual.pass;
        const double pobj = inst.full_objective().dot(y);
        const double dobj = inst.b().dot(lam);
        add_check(rep, "duality gap", std::abs(pobj - dobj), tol * std::max(1.0, std::abs(pobj)));
        add_check(rep, "reported objective", std::abs(pobj - res.objective), tol * std::max(1.0, std::abs(pobj)));
        return rep;
    }
    case SolveStatus::PrimalInfeasible:
        if (!res.certificate) {
            CheckReport rep;
            add_check(rep, "certificate present", kInf, 0.0);
            return rep;
        }
        return verify_farkas(inst, *res.certificate, tol);
    case SolveStatus::DualInfeasible:
        if (!res.certificate) {
            CheckReport rep;
            add_check(rep, "certificate present", kInf, 0.0);
            return rep;
        }
        return verify_improving_ray(inst, *res.certificate, tol);
    case SolveStatus::IllPosed:
        break;
    }
    CheckReport rep;
    add_check(rep, "status carries a claim", kInf, 0.0);
    return rep;
}

namespace {

// min t  s.t.  H r + t e in K,  obj'r = -1,  ||r|| <= bound.
// The optimum measures how close the dual is to having an exact Farkas ray.
std::optional<Vector> nearest_improving_ray(const Instance& rel, double bound, const IpmOptions& opts)
{
    const Matrix H = rel.full_matrix();
    const Vector obj = rel.full_objective();
    const auto n = H.cols();
    const auto m = H.rows();
    if (n == 0 || obj.norm() == 0.0) {
        return std::nullopt;
    }
    const Vector e = interior_direction(rel.cone());
    std::vector<ConeBlock> blocks{ConeBlock::orthant(2)};
    blocks.insert(blocks.end(), rel.cone().blocks().begin(), rel.cone().blocks().end());
    blocks.push_back(ConeBlock::second_order(static_cast<std::size_t>(n + 1)));
    const Seg rows = 2 + m + n + 1;
    Matrix G = Matrix::Zero(rows, n + 1);
    Vector b = Vector::Zero(rows);
    G.block(0, 0, 1, n) = obj.transpose();
    b[0] = -1.0;
    G.block(1, 0, 1, n) = -obj.transpose();
    b[1] = 1.0;
    G.block(2, 0, m, n) = H;
    G.block(2, n, m, 1) = e;
    G.block(2 + m, 0, n, n) = Matrix::Identity(n, n);
    b[rows - 1] = -bound;
    Vector d = Vector::Zero(n + 1);
    d[n] = 1.0;
    const auto aux = make_instance(Matrix(rows, 0), G, b, Vector(0), d, ConeProduct(blocks));
    const auto res = solve_continuous(aux, opts);
    if (!res.primal) {
        return std::nullopt;
    }
    Vector r = res.primal->head(n);
    const double scale = -obj.dot(r);
    if (!(scale > 0.0)) {
        return std::nullopt;
    }
    return Vector(r / scale);
}

}  // namespace

DualCheck check_dual_feasible(const Instance& inst, const IpmOptions& opts)
{
    const Instance rel = continuous_relaxation(inst);
    const Matrix H = rel.full_matrix();  // m x N
    const Vector obj = rel.full_objective();
    const auto m = H.rows();
    const auto N = H.cols();
    DualCheck out;

    if (obj.size() == 0 || obj.cwiseAbs().maxCoeff() == 0.0) {
        out.status = Feasibility::Feasible;
        out.lambda = Vector::Zero(m);
        out.note = "zero objective: the zero multiplier is feasible";
        return out;
    }

    // Pose  l in K, H'l = obj  as a zero-objective conic problem; equality
    // rows become pairs of orthant rows.
    std::vector<ConeBlock> blocks{ConeBlock::orthant(static_cast<std::size_t>(2 * N))};
    blocks.insert(blocks.end(), rel.cone().blocks().begin(), rel.cone().blocks().end());
    Matrix G(2 * N + m, m);
    Vector b = Vector::Zero(2 * N + m);
    G.topRows(N) = H.transpose();
    G.middleRows(N, N) = -H.transpose();
    G.bottomRows(m) = Matrix::Identity(m, m);
    b.head(N) = obj;
    b.segment(N, N) = -obj;
    const auto feas = make_instance(Matrix(2 * N + m, 0), G, b, Vector(0), Vector::Zero(m), ConeProduct(blocks));
    const auto res = solve_continuous(feas, opts);

    const auto accept_lambda = [&](const Vector& lam) {
        out.residual = (H.transpose() * lam - obj).cwiseAbs().maxCoeff();
        out.violation = std::max(0.0, -cone_margin(rel.cone(), lam));
        const double lim = 1e-7 * std::max(1.0, obj.cwiseAbs().maxCoeff());
        return out.residual <= lim && out.violation <= lim;
    };

    if ((res.status == SolveStatus::Optimal || res.status == SolveStatus::IllPosed) && res.primal &&
        accept_lambda(*res.primal)) {
        out.status = Feasibility::Feasible;
        out.lambda = *res.primal;
        out.note = "dual point found by the interior-point method";
        return out;
    }
    if (res.status == SolveStatus::PrimalInfeasible && res.certificate) {
        const Vector& y = *res.certificate;
        Vector r = -(y.head(N) - y.segment(N, N));
        const double scale = -obj.dot(r);
        if (scale > 0.0) {
            r /= scale;
            out.violation = std::max(0.0, -cone_margin(rel.cone(), Vector(H * r)));
            out.status = Feasibility::Infeasible;
            out.ray = r;
            out.approximate = out.violation > 1e-9;
            out.note = "Farkas ray from the interior-point method";
            return out;
        }
    }

    // No clean answer: the dual may be weakly infeasible. Look for an almost
    // improving ray of bounded norm.
    std::optional<Vector> best;
    double best_viol = kInf;
    for (double bound : {1e4, 1e6}) {
        const auto r = nearest_improving_ray(rel, bound, opts);
        if (!r) {
            continue;
        }
        const double viol = std::max(0.0, -cone_margin(rel.cone(), Vector(H * *r)));
        if (std::getenv("CMIPDUAL_TRACE")) {
            std::fprintf(stderr, "bound %.0e violation %.3e\n", bound, viol);
        }
        if (viol < best_viol) {
            best_viol = viol;
            best = r;
        }
    }
    if (best && best_viol <= 1e-6) {
        out.status = Feasibility::Infeasible;
        out.ray = *best;
        out.violation = best_viol;
        out.approximate = best_viol > 1e-9;
        out.note = "approximate Farkas ray (weak infeasibility)";
        return out;
    }
    out.status = Feasibility::Unknown;
    out.note = "interior-point method ended " + to_string(res.status);
    return out;
}

}  // namespace cmipdual
