#include "eszm/transfer_dense.hpp"

#include <cmath>

namespace eszm {

ChainConfig make_chain(Series series, int n, const CouplingParams& params, const BoundaryParams& bparams, int L) {
    SeriesSpec spec = make_series_spec(series, n, params);
    ChainConfig cfg;
    cfg.rfn = RMatrixFn(spec);
    cfg.boundaries = BoundaryPair(spec, bparams);
    cfg.L = L;
    return cfg;
}

void check_dense_size(const ChainConfig& cfg) {
    if (cfg.L < 1) throw std::invalid_argument("chain length must be >= 1");
    double dim = std::pow(static_cast<double>(cfg.N()), cfg.L);
    if (dim > 4096.0) throw std::length_error("dense mode limited to N^L <= 4096");
}

namespace {

using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

long ipow(long b, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

// Applies a two-site operator on (aux, chain site j) of the slab Y whose rows
// index aux (x) site_1 (x) ... (x) site_L. With dO/dY present, also updates the derivative.
void apply_two_site(const CMatrix& O, const CMatrix* dO, RowMat& Y, RowMat* dY, int j, int N, int L) {
    const long S0 = ipow(N, L);
    const long Sj = ipow(N, L - j);
    const long hiCount = ipow(N, j - 1);
    const int d = N * N;
    std::vector<long> offs(d);
    for (int a = 0; a < N; ++a)
        for (int m = 0; m < N; ++m) offs[a * N + m] = a * S0 + m * Sj;

    struct Entry {
        int r, c;
        cplx v;
    };
    auto entries = [d](const CMatrix& M) {
        std::vector<Entry> e;
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                if (M(r, c) != 0.0) e.push_back({r, c, M(r, c)});
        return e;
    };
    const std::vector<Entry> eo = entries(O);
    const std::vector<Entry> ed = dY ? entries(*dO) : std::vector<Entry>{};
    const Eigen::Index cols = Y.cols();
    RowMat out(d, cols), dout;
    if (dY) dout.resize(d, cols);
    for (long hi = 0; hi < hiCount; ++hi)
        for (long lo = 0; lo < Sj; ++lo) {
            long r0 = hi * N * Sj + lo;
            out.setZero();
            for (const auto& e : eo) out.row(e.r) += e.v * Y.row(r0 + offs[e.c]);
            if (dY) {
                dout.setZero();
                for (const auto& e : eo) dout.row(e.r) += e.v * dY->row(r0 + offs[e.c]);
                for (const auto& e : ed) dout.row(e.r) += e.v * Y.row(r0 + offs[e.c]);
                for (int k = 0; k < d; ++k) dY->row(r0 + offs[k]) = dout.row(k);
            }
            for (int k = 0; k < d; ++k) Y.row(r0 + offs[k]) = out.row(k);
        }
}

// Applies a one-site operator on aux.
void apply_aux(const CMatrix& K, const CMatrix* dK, RowMat& Y, RowMat* dY, int N, int L) {
    const long S0 = ipow(N, L);
    RowMat newY = RowMat::Zero(Y.rows(), Y.cols());
    RowMat newdY;
    if (dY) newdY = RowMat::Zero(Y.rows(), Y.cols());
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            if (K(a, b) != 0.0) newY.middleRows(a * S0, S0) += K(a, b) * Y.middleRows(b * S0, S0);
            if (dY) {
                if (K(a, b) != 0.0) newdY.middleRows(a * S0, S0) += K(a, b) * dY->middleRows(b * S0, S0);
                if ((*dK)(a, b) != 0.0) newdY.middleRows(a * S0, S0) += (*dK)(a, b) * Y.middleRows(b * S0, S0);
            }
        }
    Y = std::move(newY);
    if (dY) *dY = std::move(newdY);
}

void transfer_impl(const ChainConfig& cfg, cplx u, CMatrix& T, CMatrix* dT) {
    check_dense_size(cfg);
    const int N = cfg.N(), L = cfg.L;
    const long D = ipow(N, L);
    CMatrix R, dR, Km, dKm;
    if (dT) {
        cfg.rfn.evaluate_with_derivative(u, R, dR);
        k_template(cfg.spec(), cfg.boundaries.params().betaMinus, u, Km, dKm);
    } else {
        R = cfg.rfn.evaluate(u);
        Km = cfg.boundaries.k_minus(u);
    }
    CMatrix Rs = swap_spaces(R, N), dRs = dT ? swap_spaces(dR, N) : CMatrix();
    CMatrix Kp = cfg.boundaries.k_plus(u);
    CMatrix dKp = dT ? cfg.boundaries.k_plus_derivative(u) : CMatrix();

    T = CMatrix::Zero(D, D);
    if (dT) *dT = CMatrix::Zero(D, D);
    for (int b = 0; b < N; ++b) {
        RowMat Y = RowMat::Zero(N * D, D);
        Y.middleRows(b * D, D).setIdentity();
        RowMat dY;
        if (dT) dY = RowMat::Zero(N * D, D);
        RowMat* pdY = dT ? &dY : nullptr;
        for (int j = 1; j <= L; ++j) apply_two_site(Rs, &dRs, Y, pdY, j, N, L);
        apply_aux(Km, &dKm, Y, pdY, N, L);
        for (int j = L; j >= 1; --j) apply_two_site(R, &dR, Y, pdY, j, N, L);
        for (int a = 0; a < N; ++a) {
            T += Kp(b, a) * Y.middleRows(a * D, D);
            if (dT) {
                *dT += dKp(b, a) * Y.middleRows(a * D, D);
                *dT += Kp(b, a) * dY.middleRows(a * D, D);
            }
        }
    }
}

}  // namespace

CMatrix transfer_matrix(const ChainConfig& cfg, cplx u) {
    CMatrix T;
    transfer_impl(cfg, u, T, nullptr);
    return T;
}

void transfer_with_derivative(const ChainConfig& cfg, cplx u, CMatrix& T, CMatrix& dT) {
    transfer_impl(cfg, u, T, &dT);
}

CMatrix transfer_derivative_half_period(const ChainConfig& cfg) {
    CMatrix T, dT;
    transfer_with_derivative(cfg, 0.5 * cfg.spec().period, T, dT);
    return dT;
}

EszmDense eszm_dense(const ChainConfig& cfg) {
    const int N = cfg.N(), L = cfg.L;
    CMatrix dT = transfer_derivative_half_period(cfg);
    const double D = static_cast<double>(dT.rows());
    CMatrix psi = dT - (dT.trace() / D) * identity(static_cast<int>(D));
    double hs = std::sqrt(std::abs(hs_inner(psi, psi, L, N)));
    double scale = std::sqrt(std::abs(hs_inner(dT, dT, L, N)));
    if (hs <= 1e-12 * std::max(scale, 1e-300)) throw TrivialModeError("T'(p/2) is proportional to the identity");
    EszmDense e;
    e.norm = 1.0 / hs;
    e.psi = psi * e.norm;
    e.traceless = std::abs(e.psi.trace()) / D <= 1e-12;
    return e;
}

CMatrix trailing_reduce(const CMatrix& op, int N, int L, int k) {
    const long Dk = ipow(N, k), Rk = ipow(N, L - k);
    CMatrix red = CMatrix::Zero(Dk, Dk);
    for (long a = 0; a < Dk; ++a)
        for (long b = 0; b < Dk; ++b) {
            cplx s = 0.0;
            for (long r = 0; r < Rk; ++r) s += op(a * Rk + r, b * Rk + r);
            red(a, b) = s / static_cast<double>(Rk);
        }
    return kron(red, identity(static_cast<int>(Rk)));
}

CMatrix psi_j_dense(const CMatrix& psi, int N, int L, int j) {
    if (j < 1 || j > L) throw std::out_of_range("psi_j_dense: site out of range");
    return trailing_reduce(psi, N, L, j) - trailing_reduce(psi, N, L, j - 1);
}

CMatrix psi_j_dense(const ChainConfig& cfg, const EszmDense& eszm, int j) {
    return psi_j_dense(eszm.psi, cfg.N(), cfg.L, j);
}

CMatrix hamiltonian_from_transfer(const ChainConfig& cfg) {
    CMatrix T, dT;
    transfer_with_derivative(cfg, 0.0, T, dT);
    Eigen::FullPivLU<CMatrix> lu(T);
    if (!lu.isInvertible()) throw std::runtime_error("hamiltonian_from_transfer: T(0) is singular");
    return lu.solve(dT);
}

double commutator_residual(const CMatrix& a, const CMatrix& b) {
    return (a * b - b * a).norm() / (a.norm() * b.norm());
}

}  // namespace eszm
