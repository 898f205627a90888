#include "eigenlocal/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "eigenlocal/errors.hpp"

namespace eigenlocal {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

constexpr double kDropTol = 1e-12;

/// M-orthonormalizes the columns of V (with MV = M V) by scaled Cholesky-free
/// eigendecomposition of the Gram matrix, dropping numerically dependent
/// directions. Returns the transform T so that callers can update other
/// images of V (e.g. K V) the same way.
Mat svqb(Mat& V, Mat& MV) {
    if (V.cols() == 0) return Mat(0, 0);
    Mat G = V.transpose() * MV;
    G = 0.5 * (G + G.transpose()).eval();
    Vec d = G.diagonal();
    const double dmax = d.maxCoeff();
    Vec dinv(d.size());
    for (Index i = 0; i < d.size(); ++i) dinv[i] = d[i] > 1e-300 * std::max(dmax, 1e-300) ? 1.0 / std::sqrt(d[i]) : 0.0;
    const Mat Gs = dinv.asDiagonal() * G * dinv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Mat> es(Gs);
    const Vec& theta = es.eigenvalues();
    const double tmax = theta.maxCoeff();
    std::vector<Index> keep;
    for (Index i = 0; i < theta.size(); ++i) {
        if (theta[i] > kDropTol * tmax && theta[i] > 0.0) keep.push_back(i);
    }
    Mat T(V.cols(), static_cast<Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c) {
        T.col(static_cast<Index>(c)) = dinv.asDiagonal() * es.eigenvectors().col(keep[c]) / std::sqrt(theta[keep[c]]);
    }
    V = (V * T).eval();
    MV = (MV * T).eval();
    return T;
}

Mat hcat(const Mat& a, const Mat& b, const Mat& c) {
    Mat out(a.rows(), a.cols() + b.cols() + c.cols());
    out << a, b, c;
    return out;
}

double uniform_pm1(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

}  // namespace

void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> u) {
    Index best = 0;
    for (Index i = 1; i < u.size(); ++i) {
        if (std::abs(u[i]) > std::abs(u[best])) best = i;
    }
    if (u.size() > 0 && u[best] < 0.0) u = -u;
}

double rayleigh_quotient(const SparseSymMatrix& K, const SparseSymMatrix& M, const Eigen::VectorXd& u) {
    const double den = u.dot(M * u);
    if (!(den > 0.0)) throw ValidationError("Rayleigh quotient of a zero vector");
    return u.dot(K * u) / den;
}

Eigen::MatrixXd m_orthonormalize(const SparseSymMatrix& M, const Eigen::MatrixXd& vectors) {
    Mat Q = vectors;
    for (Index j = 0; j < Q.cols(); ++j) {
        Vec v = Q.col(j);
        const double original = std::sqrt(std::max(0.0, v.dot(M * v)));
        if (!(original > 0.0)) throw ValidationError("m_orthonormalize: column " + std::to_string(j) + " is zero");
        // Two passes of modified Gram-Schmidt keep the Gram matrix at rounding level.
        for (int pass = 0; pass < 2; ++pass) {
            for (Index i = 0; i < j; ++i) {
                const Vec mq = M * Vec(Q.col(i));
                v -= mq.dot(v) * Q.col(i);
            }
        }
        const double remaining = std::sqrt(std::max(0.0, v.dot(M * v)));
        if (remaining <= 1e-10 * original) {
            throw ValidationError("m_orthonormalize: column " + std::to_string(j) +
                                  " is linearly dependent on the preceding columns");
        }
        Q.col(j) = v / remaining;
    }
    return Q;
}

EigenBasis solve_smallest(const SparseSymMatrix& K, const SparseSymMatrix& M, std::size_t k, double tol,
                          std::uint64_t seed) {
    const std::size_t n = K.n;
    if (M.n != n) throw ContractError("K and M differ in size");
    if (k == 0) throw ParameterError("k must be at least 1");
    if (!(4 * k < n)) {
        throw ParameterError("k = " + std::to_string(k) + " must be below n/4 for n = " + std::to_string(n));
    }
    if (!(tol >= 1e-12 && tol <= 1e-4)) throw ParameterError("tol must lie in [1e-12, 1e-4]");
    const Vec mdiag = M.diagonal();
    if (!(mdiag.minCoeff() > 0.0)) throw InputError("mass matrix is not positive definite (non-positive diagonal)");
    const Vec kdiag = K.diagonal();

    std::mt19937_64 rng(seed);
    const Index nn = static_cast<Index>(n);

    // Constant null vector of a Neumann stiffness matrix.
    const Vec ones = Vec::Ones(nn);
    const bool neumann = (K * ones).lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(K.max_abs(), 1e-300);
    Mat C(nn, 0);
    Mat MC(nn, 0);
    if (neumann) {
        const Vec mo = M * ones;
        const double mass = ones.dot(mo);
        if (!(mass > 0.0)) throw InputError("mass matrix is not positive definite");
        C = ones / std::sqrt(mass);
        MC = mo / std::sqrt(mass);
    }
    auto project = [&](Mat& V) {
        if (C.cols() > 0 && V.cols() > 0) V -= C * (MC.transpose() * V);
    };

    const std::size_t want = k - static_cast<std::size_t>(C.cols());
    EigenBasis basis;
    basis.seed = seed;
    basis.tol = tol;

    Mat X(nn, 0);
    Vec lambda(0);
    if (want > 0) {
        const std::size_t guard = std::max<std::size_t>(3, want / 4);
        const std::size_t room = (n - static_cast<std::size_t>(C.cols())) / 3;
        const Index bs = static_cast<Index>(std::min(want + guard, std::max(want, room)));

        X.resize(nn, bs);
        for (Index j = 0; j < bs; ++j) {
            for (Index i = 0; i < nn; ++i) X(i, j) = uniform_pm1(rng);
        }
        project(X);
        Mat MX = M * X;
        {
            Mat probe = X.transpose() * MX;
            for (Index j = 0; j < bs; ++j) {
                if (!(probe(j, j) > 0.0)) throw InputError("mass matrix is not positive definite");
            }
        }
        svqb(X, MX);
        if (X.cols() < bs) throw ConvergenceError("random start block is rank deficient");
        Mat KX = K * X;

        auto rayleigh_ritz_x = [&]() {
            Mat G = X.transpose() * KX;
            G = 0.5 * (G + G.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Mat> es(G);
            X = (X * es.eigenvectors()).eval();
            KX = (KX * es.eigenvectors()).eval();
            MX = (MX * es.eigenvectors()).eval();
            lambda = es.eigenvalues();
        };
        rayleigh_ritz_x();

        const Vec dinv = kdiag.unaryExpr([](double v) { return v > 0.0 ? 1.0 / v : 1.0; });
        Mat P(nn, 0), KP(nn, 0), MP(nn, 0);
        const std::size_t cap = 500 * k;
        Vec res(bs);
        bool converged = false;
        std::size_t it = 0;
        for (; it < cap; ++it) {
            const Mat R = KX - MX * lambda.asDiagonal();
            for (Index j = 0; j < bs; ++j) res[j] = R.col(j).norm() / std::max(lambda[j], 1.0);
            // Converge with headroom so the final polish stays within tol.
            const double goal = 0.5 * tol;
            if ((res.head(static_cast<Index>(want)).array() <= goal).all()) {
                converged = true;
                break;
            }
            std::vector<Index> active;
            for (Index j = 0; j < bs; ++j) {
                if (!(res[j] <= goal) || j >= static_cast<Index>(want)) active.push_back(j);
            }
            Mat W(nn, static_cast<Index>(active.size()));
            for (std::size_t a = 0; a < active.size(); ++a) {
                W.col(static_cast<Index>(a)) = dinv.cwiseProduct(R.col(active[a]));
            }
            project(W);
            Mat MW;
            for (int pass = 0; pass < 2; ++pass) {
                W -= X * (MX.transpose() * W);
                project(W);
                MW = M * W;
                svqb(W, MW);
            }
            Mat KW = K * W;

            if (P.cols() > 0) {
                const Mat cx = MX.transpose() * P;
                P -= X * cx;
                KP -= KX * cx;
                MP -= MX * cx;
                const Mat cw = MW.transpose() * P;
                P -= W * cw;
                KP -= KW * cw;
                MP -= MW * cw;
                const Mat T = svqb(P, MP);
                KP = (KP * T).eval();
            }

            Mat S = hcat(X, W, P);
            Mat KS = hcat(KX, KW, KP);
            Mat MS = hcat(MX, MW, MP);
            Mat GA = S.transpose() * KS;
            Mat GB = S.transpose() * MS;
            GA = 0.5 * (GA + GA.transpose()).eval();
            GB = 0.5 * (GB + GB.transpose()).eval();
            Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(GA, GB);
            if (ges.info() != Eigen::Success) {
                // Drop the search directions and restart from the current block.
                P.resize(nn, 0);
                KP.resize(nn, 0);
                MP.resize(nn, 0);
                svqb(X, MX);
                KX = K * X;
                rayleigh_ritz_x();
                continue;
            }
            const Mat Cfull = ges.eigenvectors().leftCols(bs);
            lambda = ges.eigenvalues().head(bs);
            const Index rest = S.cols() - bs;
            const Mat Crest = Cfull.bottomRows(rest);
            P = S.rightCols(rest) * Crest;
            KP = KS.rightCols(rest) * Crest;
            MP = MS.rightCols(rest) * Crest;
            X = S * Cfull;
            KX = KS * Cfull;
            MX = MS * Cfull;

            if ((it + 1) % 25 == 0) {
                // Refresh images to stop rounding drift in the recurrences.
                project(X);
                MX = M * X;
                svqb(X, MX);
                KX = K * X;
                rayleigh_ritz_x();
            }
        }
        basis.iterations = it;
        if (!converged) {
            std::ostringstream os;
            os << "eigensolver did not converge in " << cap << " block iterations; worst residual "
               << res.head(static_cast<Index>(want)).maxCoeff() << " against tol " << tol;
            throw ConvergenceError(os.str());
        }
        // Final Rayleigh-Ritz on the wanted columns.
        X = X.leftCols(static_cast<Index>(want)).eval();
        project(X);
        MX = M * X;
        svqb(X, MX);
        KX = K * X;
        rayleigh_ritz_x();
    }

    const Index total = static_cast<Index>(k);
    basis.eigenvectors.resize(nn, total);
    basis.eigenvalues.resize(total);
    Index col = 0;
    if (C.cols() > 0) {
        basis.eigenvectors.col(0) = C.col(0);
        basis.eigenvalues[0] = std::max(0.0, rayleigh_quotient(K, M, C.col(0)));
        col = 1;
    }
    for (Index j = 0; j < X.cols(); ++j, ++col) {
        basis.eigenvectors.col(col) = X.col(j);
        basis.eigenvalues[col] = lambda[j];
    }
    for (Index j = 0; j < total; ++j) apply_sign_convention(basis.eigenvectors.col(j));
    const Mat KU = K * basis.eigenvectors;
    const Mat MU = M * basis.eigenvectors;
    basis.residuals.resize(total);
    for (Index j = 0; j < total; ++j) {
        basis.residuals[j] = (KU.col(j) - basis.eigenvalues[j] * MU.col(j)).norm() /
                             std::max(basis.eigenvalues[j], 1.0);
    }
    return basis;
}

std::string eigen_basis_to_json(const EigenBasis& basis) {
    nlohmann::ordered_json j;
    j["eigenvalues"] = std::vector<double>(basis.eigenvalues.data(), basis.eigenvalues.data() + basis.eigenvalues.size());
    j["residuals"] = std::vector<double>(basis.residuals.data(), basis.residuals.data() + basis.residuals.size());
    j["seed"] = basis.seed;
    j["tol"] = basis.tol;
    j["iterations"] = basis.iterations;
    return j.dump(2);
}

}  // namespace eigenlocal
