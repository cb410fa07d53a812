#pragma once

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "eszm/boundary_catalog.hpp"
#include "eszm/models_ed.hpp"
#include "eszm/mpo_locality.hpp"
#include "eszm/transfer_dense.hpp"

namespace testsupport {

using namespace eszm;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(unsigned long seed) : gen(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
    // spectral parameter on one period strip
    cplx u() { return {uniform(-2.0, 2.0), uniform(-kPi, kPi)}; }
    cplx q() { return std::polar(uniform(1.1, 3.0), uniform(-kPi, kPi)); }
    cplx beta() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }
};

struct SeriesCase {
    Series series;
    int n;
};

inline std::vector<SeriesCase> small_cases() {
    return {{Series::A1, 2}, {Series::A1, 3}, {Series::A2odd, 1}, {Series::A2odd, 2}, {Series::A2even, 1},
            {Series::A2even, 2}, {Series::B1, 1}, {Series::B1, 2}, {Series::C1, 1}, {Series::C1, 2},
            {Series::D1, 2}, {Series::D1, 3}};
}

inline BetaMap random_betas(Series s, int n, Rng& rng) {
    BetaMap b;
    for (const auto& k : template_keys(s, n)) b[k] = rng.beta();
    if (b.count("i,i'")) b["i,i'"] += 1.5;  // keep away from zero, it appears in a denominator
    return b;
}

inline BoundaryParams fig1_boundaries() {
    BoundaryParams p;
    p.betaMinus = {{"1,1", -0.2}, {"i,i'", 1.1}};
    p.betaPlus = {{"1,1", 0.5}, {"i,i'", 0.1}};
    return p;
}

// Orthogonal boundaries with simple fixed beta- for each series.
inline BoundaryParams localizing_boundaries(Series s, int n, cplx q) {
    BoundaryParams p;
    cplx bp = constrained_beta_plus(s, n, q).front();
    switch (s) {
        case Series::A2even: return fig1_boundaries();
        case Series::D1:
            if (n == 2) {
                p.betaMinus = {{"1,1", 0.75}, {"2,2", 0.32}};
                p.betaPlus = {{"1,1", -1.0}, {"2,2", 0.2}};
                return p;
            }
            p.betaMinus = {{"1,1", 0.75}};
            p.betaPlus = {{"1,1", -1.0}};
            return p;
        case Series::A1: p.betaMinus = {{"1,1", 0.0}}; break;
        case Series::A2odd: p.betaMinus = {{"1,1", -0.15}}; break;
        case Series::B1: p.betaMinus = {{"1,1", 0.3}}; break;
        case Series::C1: p.betaMinus = {{"1,1", 0.15}}; break;
    }
    p.betaPlus = {{"1,1", bp}};
    return p;
}

// Transfer matrix built from full operators on aux (x) chain; independent of the slab code.
inline CMatrix oracle_transfer(const ChainConfig& cfg, cplx u) {
    const int N = cfg.N(), L = cfg.L;
    int D = 1;
    for (int i = 0; i < L; ++i) D *= N;
    const int full = N * D;
    CMatrix R = cfg.rfn.evaluate(u);
    CMatrix P = permutation(N);
    // embeds a two-site operator on (aux, site j) into the full space by explicit index maps
    auto embed = [&](const CMatrix& op, int j) {
        CMatrix out = CMatrix::Zero(full, full);
        int stride = 1;
        for (int k = j; k < L; ++k) stride *= N;
        for (int r = 0; r < full; ++r)
            for (int c = 0; c < full; ++c) {
                int ra = r / D, ca = c / D;
                int rs = (r % D) / stride % N, cs = (c % D) / stride % N;
                int rrest = (r % D) - rs * stride, crest = (c % D) - cs * stride;
                if (rrest != crest) continue;
                out(r, c) = op(ra * N + rs, ca * N + cs);
            }
        return out;
    };
    CMatrix X = kron(cfg.boundaries.k_plus(u), identity(D));
    for (int j = 1; j <= L; ++j) X = X * embed(R, j);
    X = X * kron(cfg.boundaries.k_minus(u), identity(D));
    for (int j = L; j >= 1; --j) X = X * embed(P * R * P, j);
    CMatrix T = CMatrix::Zero(D, D);
    for (int a = 0; a < N; ++a) T += X.block(a * D, a * D, D, D);
    return T;
}

// Full-chain fit H = c0 + c1 H_IK(bulk) + sum_a l_a I^a_1 + r_a I^a_L, a = 1..8.
struct IkFit {
    cplx c0{0.0, 0.0}, c1{0.0, 0.0};
    std::array<cplx, 9> left{}, right{};  // already divided by c1, index 0 unused
    double residual = 0.0;                // relative Frobenius residual
};

inline IkFit ik_fit(const CMatrix& H, int L, double delta) {
    auto g = gell_mann();
    const Fields9 zero{};
    const int D = static_cast<int>(H.rows());
    std::vector<CMatrix> basis{identity(D), ik_hamiltonian(L, delta, zero, zero)};
    for (int a = 1; a < 9; ++a) basis.push_back(site_operator(g[a], 0, L));
    for (int a = 1; a < 9; ++a) basis.push_back(site_operator(g[a], L - 1, L));
    CMatrix A(static_cast<Eigen::Index>(D) * D, static_cast<Eigen::Index>(basis.size()));
    for (size_t k = 0; k < basis.size(); ++k) A.col(k) = basis[k].reshaped();
    CVector h = H.reshaped();
    CVector c = A.colPivHouseholderQr().solve(h);
    IkFit f;
    f.residual = (A * c - h).norm() / h.norm();
    f.c0 = c(0);
    f.c1 = c(1);
    for (int a = 1; a < 9; ++a) {
        f.left[a] = c(1 + a) / c(1);
        f.right[a] = c(9 + a) / c(1);
    }
    return f;
}

// A2(2) boundaries whose transfer-derived Hamiltonian is Hermitian. beta-_{i,i'} makes the right
// field real; beta+_{i,i'} is the root of Im(left I^5 coefficient), bracketed in [0.05, 0.2].
inline BoundaryParams mazur_boundaries(double delta, double* imagResidual = nullptr) {
    const double L = 3;
    cplx q = CouplingParams::from_delta(delta).q;
    BoundaryParams p;
    p.betaMinus = {{"1,1", -0.2}, {"i,i'", 2.0 * std::sqrt(q) * std::abs(-0.2 - 1.0) / (q - 1.0)}};
    auto imag5 = [&](double off) {
        p.betaPlus = {{"1,1", 0.5}, {"i,i'", off}};
        auto cfg = make_chain(Series::A2even, 1, CouplingParams::from_q(q), p, static_cast<int>(L));
        return ik_fit(hamiltonian_from_transfer(cfg), static_cast<int>(L), delta).left[5].imag();
    };
    double a = 0.05, b = 0.2, fa = imag5(a);
    for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b), fm = imag5(m);
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    const double root = 0.5 * (a + b);
    if (imagResidual) *imagResidual = std::abs(imag5(root));
    p.betaPlus = {{"1,1", 0.5}, {"i,i'", root}};
    return p;
}

inline double rel(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace testsupport
