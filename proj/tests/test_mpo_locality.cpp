#include <doctest.h>

#include <chrono>

#include "eszm/mpo_locality.hpp"
#include "support.hpp"

using namespace eszm;
using testsupport::Rng;
using testsupport::rel;

// Generic open MPO expanded by Kronecker products; sites[k][s*N+t] is a d_in x d_out matrix.
static CMatrix mpo_oracle(const CVector& left, const std::vector<std::vector<CMatrix>>& sites, const CVector& right,
                          int N) {
    std::vector<CMatrix> ops;
    for (Eigen::Index b = 0; b < left.size(); ++b) ops.push_back(CMatrix::Constant(1, 1, left(b)));
    for (const auto& site : sites) {
        const Eigen::Index dout = site[0].cols();
        const Eigen::Index D = ops[0].rows();
        std::vector<CMatrix> next(dout, CMatrix::Zero(D * N, D * N));
        for (int s = 0; s < N; ++s)
            for (int t = 0; t < N; ++t)
                for (size_t bi = 0; bi < ops.size(); ++bi)
                    for (Eigen::Index bo = 0; bo < dout; ++bo) {
                        cplx w = site[s * N + t](bi, bo);
                        if (w != 0.0) next[bo] += w * kron(ops[bi], elementary(N, s, t));
                    }
        ops = std::move(next);
    }
    CMatrix out = CMatrix::Zero(ops[0].rows(), ops[0].cols());
    for (size_t b = 0; b < ops.size(); ++b) out += right(b) * ops[b];
    return out;
}

static ChainConfig random_chain(Series s, int n, int L, Rng& rng) {
    BoundaryParams bp;
    bp.betaMinus = testsupport::random_betas(s, n, rng);
    bp.betaPlus = testsupport::random_betas(s, n, rng);
    return make_chain(s, n, CouplingParams::from_q(rng.q()), bp, L);
}

static ChainConfig fig1_chain(int n, int L) {
    return make_chain(Series::A2even, n, CouplingParams::from_delta(1.811), testsupport::fig1_boundaries(), L);
}

TEST_CASE("W chain reproduces the dense transfer matrix") {
    Rng rng(61);
    for (auto c : testsupport::small_cases()) {
        CAPTURE(series_name(c.series));
        CAPTURE(c.n);
        auto cfg = random_chain(c.series, c.n, 3, rng);
        if (cfg.N() >= 5) cfg.L = 2;
        const int N = cfg.N();
        cplx u = rng.u();
        CMatrix R = cfg.rfn.evaluate(u);
        CMatrix kp = cfg.boundaries.k_plus(u), km = cfg.boundaries.k_minus(u);
        CVector lv(N * N), rv(N * N);
        for (int a = 0; a < N; ++a)
            for (int y = 0; y < N; ++y) {
                lv(a * N + y) = kp(y, a);
                rv(a * N + y) = km(a, y);
            }
        auto W = w_tensor(R, R, N);
        CMatrix T = transfer_matrix(cfg, u);
        CHECK(rel(contract_chain(lv, W, rv, N, cfg.L), T) <= 1e-10);
        CHECK(rel(mpo_oracle(lv, std::vector<std::vector<CMatrix>>(cfg.L, W), rv, N), T) <= 1e-10);
    }
    // at p/2 from the bundle
    auto cfg = random_chain(Series::B1, 1, 3, rng);
    auto b = build_bundle(cfg);
    CHECK(rel(contract_chain(b.kPlusVec, b.W, b.kMinusVec, 3, 3), transfer_matrix(cfg, 0.5 * cfg.spec().period)) <=
          1e-10);
}

TEST_CASE("Dtilde against central differences of W") {
    Rng rng(62);
    for (Series s : {Series::A1, Series::B1, Series::A2even}) {
        auto cfg = random_chain(s, s == Series::A1 ? 2 : 1, 2, rng);
        const int N = cfg.N();
        const cplx p2 = 0.5 * cfg.spec().period;
        const double h = 1e-6;
        CMatrix Rp = cfg.rfn.evaluate(p2 + h), Rm = cfg.rfn.evaluate(p2 - h);
        auto Wp = w_tensor(Rp, Rp, N), Wm = w_tensor(Rm, Rm, N);
        auto b = build_bundle(cfg);
        for (int k = 0; k < N * N; ++k) {
            CMatrix fd = (Wp[k] - Wm[k]) / (2.0 * h);
            if (fd.norm() > 0.0) CHECK(rel(b.Dtilde[k], fd) <= 1e-6);
        }
        CMatrix Km = cfg.boundaries.k_minus(p2);
        CMatrix fdK = (cfg.boundaries.k_minus(p2 + h) - cfg.boundaries.k_minus(p2 - h)) / (2.0 * h);
        for (int a = 0; a < N; ++a)
            for (int y = 0; y < N; ++y) {
                CHECK(b.kMinusVec(a * N + y) == Km(a, y));
                CHECK(std::abs(b.kMinusPrimeVec(a * N + y) - fdK(a, y)) <= 1e-6 * std::max(1.0, fdK.norm()));
            }
        CHECK(std::abs(b.cFactor - cfg.rfn.a1(p2) * cfg.rfn.a1(-p2)) == 0.0);
        CHECK(rel(b.What()[1], b.W[1] / b.cFactor) == 0.0);
    }
}

TEST_CASE("doubled operator: index-sum oracle and sector blocks") {
    Rng rng(63);
    for (auto c : testsupport::small_cases()) {
        if (c.n > 2) continue;
        CAPTURE(series_name(c.series));
        auto cfg = random_chain(c.series, c.n, 3, rng);
        auto b = build_bundle(cfg);
        const int N = cfg.N(), D = N * N * N * N;
        CVector v(D);
        for (int i = 0; i < D; ++i) v(i) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
        CMatrix Wc = doubled_matrix(b);
        CVector direct = apply_doubled(b, v);
        CHECK((Wc * v - direct).norm() <= 1e-12 * Wc.norm() * v.norm());

        auto op = doubled_operator(b);
        CHECK(rel(op.dense(), Wc) <= 1e-14);
        std::vector<int> seen(D, 0);
        for (const auto& blk : op.blocks)
            for (int i : blk.indices) ++seen[i];
        CHECK(std::all_of(seen.begin(), seen.end(), [](int k) { return k == 1; }));
        CHECK(op.bellBlock >= 0);
        // the Bell state has eigenvalue N
        CVector phi = bell_state(N);
        CHECK((Wc * phi - double(N) * phi).norm() <= 1e-9 * N);
        for (Eigen::Index k = 0; k + 1 < op.spectrum.eigenvalues.size(); ++k)
            CHECK(std::abs(op.spectrum.eigenvalues(k)) >= std::abs(op.spectrum.eigenvalues(k + 1)) * (1.0 - 1e-9));
    }
}

TEST_CASE("Bell state on top for A1 at Delta = 1.888") {
    BoundaryParams bp;
    bp.betaMinus = {{"1,1", 0.0}};
    bp.betaPlus = {{"1,1", 0.5}};
    auto cfg = make_chain(Series::A1, 2, CouplingParams::from_delta(1.888), bp, 4);
    auto op = doubled_operator(build_bundle(cfg));
    CVector phi = bell_state(2);
    CHECK(std::abs(phi.normalized().dot(op.topVector.normalized())) >= 1.0 - 1e-8);
    CHECK(std::abs(op.topEigenvalue - 2.0) <= 1e-9);
}

TEST_CASE("B1(2) at Delta = -1.5 has a non-Bell top vector") {
    auto row = scan_point(Series::B1, 2, -1.5);
    // non-normal operator: the new top vector still overlaps Phi, but not fully
    CHECK(row.overlap <= 0.99);
    CHECK(row.deflatedRadius > 5.0);
    auto deep = scan_point(Series::B1, 2, -2.5);
    CHECK(deep.overlap >= 1.0 - 1e-8);
    CHECK(deep.deflatedRadius < 5.0);
}

TEST_CASE("B1(2) threshold by a short scan") {
    auto res = scan_delta_threshold(Series::B1, 2, -1.9, -1.7, 0.05, 1e-6);
    REQUIRE(res.threshold.has_value());
    CHECK(std::abs(*res.threshold + 1.80437) <= 1e-3);
    CHECK_THROWS_AS(scan_delta_threshold(Series::B1, 2, -1.7, -1.9, 0.05), std::invalid_argument);
    CHECK_FALSE(scan_delta_threshold(Series::B1, 2, -3.0, -2.5, 0.1).threshold.has_value());
}

TEST_CASE("power sums and boundary vectors: eigen route against direct") {
    Rng rng(64);
    auto cfg = random_chain(Series::A2even, 1, 8, rng);
    auto b = build_bundle(cfg);
    for (int j = 1; j <= 8; ++j) {
        CMatrix direct = boundary_vector_d(b, 8, j, MiddleSumMethod::Direct);
        CMatrix eig = boundary_vector_d(b, 8, j, MiddleSumMethod::Eigen);
        CHECK(rel(eig, direct) <= 1e-11);
    }
    CMatrix A = CMatrix::Identity(3, 3);
    A(0, 1) = 0.5;
    CVector v = CVector::Ones(3);
    // Jordan block, exercises the defective fallback
    CHECK(rel(power_sum(A * 0.7, v, 6, MiddleSumMethod::Eigen), power_sum(A * 0.7, v, 6, MiddleSumMethod::Direct)) <=
          1e-11);
    CHECK(power_sum(A, v, 0, MiddleSumMethod::Direct).norm() == 0.0);
    // resonant eigenvalue 1 on a diagonalizable matrix
    CMatrix Dg = CMatrix::Zero(2, 2);
    Dg(0, 0) = 1.0;
    Dg(1, 1) = 0.5;
    CHECK(rel(power_sum(Dg, CVector::Ones(2), 5, MiddleSumMethod::Eigen),
              power_sum(Dg, CVector::Ones(2), 5, MiddleSumMethod::Direct)) <= 1e-12);
    CHECK_THROWS_AS(boundary_vector_d(b, 8, 0), std::out_of_range);
}

TEST_CASE("boundary vector at j = L has only the local and tail parts") {
    Rng rng(65);
    auto cfg = random_chain(Series::C1, 1, 5, rng);
    auto b = build_bundle(cfg);
    const int N = 2, d = 4;
    auto Wh = b.What(), Dh = b.Dhat();
    CMatrix tW = (Wh[0] + Wh[3]) / 2.0, tD = (Dh[0] + Dh[3]) / 2.0;
    CMatrix expect(d, d);
    for (int s = 0; s < N; ++s)
        for (int t = 0; t < N; ++t) {
            CMatrix pw = Wh[s * N + t], pd = Dh[s * N + t];
            if (s == t) {
                pw -= tW;
                pd -= tD;
            }
            expect.col(s * N + t) = pd * b.kMinusVec + pw * b.kMinusPrimeVec;
        }
    CHECK(rel(boundary_vector_d(b, 5, 5), expect) <= 1e-14);
}

TEST_CASE("D_j contraction equals the dense Psi_j") {
    Rng rng(66);
    for (auto c : testsupport::small_cases()) {
        if (c.n > 2) continue;
        CAPTURE(series_name(c.series));
        CAPTURE(c.n);
        auto cfg = random_chain(c.series, c.n, 4, rng);
        if (cfg.N() >= 4) cfg.L = 3;
        const int N = cfg.N(), L = cfg.L;
        auto b = build_bundle(cfg);
        auto Wh = b.What();
        CMatrix dT = transfer_derivative_half_period(cfg);
        const cplx scale = std::pow(b.cFactor, L);
        for (int j = 1; j <= L; ++j) {
            CMatrix Dj = boundary_vector_d(b, L, j);
            std::vector<std::vector<CMatrix>> sites(j - 1, Wh);
            std::vector<CMatrix> last(N * N);
            for (int k = 0; k < N * N; ++k) last[k] = Dj.col(k);
            sites.push_back(last);
            CMatrix op = kron(mpo_oracle(b.kPlusVec, sites, CVector::Ones(1), N),
                              identity(static_cast<int>(std::pow(N, L - j))));
            CHECK(rel(scale * op, psi_j_dense(dT, N, L, j)) <= 1e-9);
        }
    }
}

TEST_CASE("norms: MPO against dense for every series") {
    Rng rng(67);
    for (auto c : testsupport::small_cases()) {
        if (c.n > 2) continue;
        CAPTURE(series_name(c.series));
        CAPTURE(c.n);
        auto cfg = random_chain(c.series, c.n, 4, rng);
        if (cfg.N() >= 5) cfg.L = 3;
        const int N = cfg.N(), L = cfg.L;
        ProfileOptions opt;
        opt.fitStart = 1;
        opt.fitEnd = L;
        auto prof = norms_profile(cfg, opt);
        auto z = eszm_dense(cfg);
        double total = 0.0;
        for (int j = 1; j <= L; ++j) {
            CMatrix pj = psi_j_dense(cfg, z, j);
            CHECK(std::abs(prof.normsSquared[j - 1] - hs_inner(pj, pj, L, N).real()) <= 1e-8);
            total += prof.normsSquared[j - 1];
        }
        CHECK(std::abs(total - 1.0) <= 1e-9);
        CHECK(prof.maxImag <= 1e-10);
        CHECK(prof.clipped == 0);
    }
}

TEST_CASE("norms: Fig. 1 dense check at L = 4 and spectral route") {
    auto cfg = fig1_chain(1, 4);
    auto prof = norms_profile(cfg);
    auto z = eszm_dense(cfg);
    for (int j = 1; j <= 4; ++j) {
        CMatrix pj = psi_j_dense(cfg, z, j);
        CHECK(std::abs(prof.normsSquared[j - 1] - hs_inner(pj, pj, 4, 3).real()) <= 1e-8);
    }
    auto big = fig1_chain(1, 20);
    ProfileOptions spectral;
    spectral.method = NormsMethod::Spectral;
    auto a = norms_profile(big), s = norms_profile(big, spectral);
    for (int j = 0; j < 20; ++j) CHECK(std::abs(a.normsSquared[j] - s.normsSquared[j]) <= 1e-8 * a.normsSquared[0]);
}

TEST_CASE("synthetic decay fit") {
    std::vector<double> v;
    for (int j = 1; j <= 20; ++j) v.push_back(std::exp(-0.7 * j));
    auto f = fit_decay(v, 2, 16);
    CHECK(std::abs(f.alpha - 0.7) <= 1e-10);
    CHECK(f.rSquared >= 1.0 - 1e-12);
    CHECK(f.localized);
    CHECK_THROWS_AS(fit_decay(v, 2, 4), std::invalid_argument);
    std::vector<double> flat(20, 0.05);
    CHECK_FALSE(fit_decay(flat, 2, 16).localized);
}

TEST_CASE("Fig. 1 chains localize at L = 30") {
    for (int n = 1; n <= 3; ++n) {
        CAPTURE(n);
        auto prof = norms_profile(fig1_chain(n, 30));
        CHECK(prof.fit.alpha > 0.0);
        CHECK(prof.fit.rSquared >= 0.99);
        CHECK(prof.fit.jStart == 3);
        CHECK(prof.fit.jEnd == 26);
    }
}

TEST_CASE("A1 Fig. S1(a) localizes, Delta = 0.5 does not") {
    auto params = CouplingParams::from_delta(1.888);
    BoundaryParams bp;
    bp.betaMinus = {{"1,1", 0.0}};
    bp.betaPlus = {{"1,1", constrained_beta_plus(Series::A1, 2, params.q).front()}};
    auto prof = norms_profile(make_chain(Series::A1, 2, params, bp, 30));
    CHECK(prof.fit.localized);

    auto weak = CouplingParams::from_delta(0.5);
    bp.betaPlus = {{"1,1", constrained_beta_plus(Series::A1, 2, weak.q).front()}};
    auto off = norms_profile(make_chain(Series::A1, 2, weak, bp, 30));
    CHECK((off.fit.alpha <= 0.0 || off.fit.rSquared < 0.9));
}

TEST_CASE("trace and orthogonality vanish together") {
    Rng rng(68);
    int zeroTrace = 0;
    for (int k = 0; k < 100; ++k) {
        const auto c = testsupport::small_cases()[k % 12];
        cplx q = rng.q();
        BoundaryParams p;
        p.betaMinus = testsupport::random_betas(c.series, c.n, rng);
        p.betaPlus = testsupport::random_betas(c.series, c.n, rng);
        if (k % 2 == 0) p.betaPlus["1,1"] = constrained_beta_plus(c.series, c.n, q).front();
        BoundaryPair pair(make_series_spec(c.series, c.n, CouplingParams::from_q(q)), p);
        CMatrix kp = pair.k_plus(0.5 * pair.spec().period);
        double scale = kp.cwiseAbs().maxCoeff();
        bool t0 = std::abs(kp.trace()) <= 1e-12 * scale;
        bool o0 = std::abs(orthogonality(pair)) <= 1e-12 * scale * scale;
        CHECK(t0 == o0);
        zeroTrace += t0;
    }
    CHECK(zeroTrace == 50);
}

TEST_CASE("norms cost is polynomial in L") {
    auto time = [](int L) {
        auto cfg = fig1_chain(1, L);
        auto t0 = std::chrono::steady_clock::now();
        for (int r = 0; r < 3; ++r) norms_profile(cfg);
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    time(10);
    double t30 = time(30), t60 = time(60);
    CHECK(t60 <= 20.0 * t30);
}
