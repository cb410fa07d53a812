#include <doctest.h>

#include "eszm/algebra_catalog.hpp"
#include "eszm/models_ed.hpp"
#include "eszm/mpo_locality.hpp"
#include "support.hpp"

using namespace eszm;
using testsupport::Rng;

static CMatrix random_matrix(int r, int c, Rng& rng) {
    CMatrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    return m;
}

TEST_CASE("kron identity and elementary") {
    CHECK(max_abs(kron(identity(2), identity(2)) - identity(4)) == 0.0);
    CMatrix e = kron(elementary(2, 0, 0), elementary(2, 1, 1));
    CHECK(e(1, 1) == cplx(1.0));
    CHECK(e.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("kron index formula") {
    Rng rng(11);
    CMatrix a = random_matrix(3, 3, rng), b = random_matrix(3, 3, rng);
    CMatrix k = kron(a, b);
    double err = 0.0;
    for (int ia = 0; ia < 3; ++ia)
        for (int ja = 0; ja < 3; ++ja)
            for (int ib = 0; ib < 3; ++ib)
                for (int jb = 0; jb < 3; ++jb)
                    err = std::max(err, std::abs(k(ia * 3 + ib, ja * 3 + jb) - a(ia, ja) * b(ib, jb)));
    CHECK(err == 0.0);
}

TEST_CASE("partial trace") {
    Rng rng(12);
    CMatrix a = random_matrix(3, 3, rng), b = random_matrix(3, 3, rng);
    CHECK(max_abs(partial_trace(kron(a, b), {3, 3}, {1}) - a * b.trace()) < 1e-14);
    CHECK(std::abs(partial_trace(identity(27), {3, 3, 3}, {0, 1, 2})(0, 0) - 27.0) < 1e-14);

    // index-sum oracle on the first site
    CMatrix op = random_matrix(9, 9, rng);
    CMatrix red = partial_trace(op, {3, 3}, {0});
    double err = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < 3; ++k) s += op(k * 3 + i, k * 3 + j);
            err = std::max(err, std::abs(s - red(i, j)));
        }
    CHECK(err < 1e-14);
    CHECK(std::abs(red.trace() - op.trace()) < 1e-13);

    // composition
    CMatrix big = random_matrix(24, 24, rng);
    CMatrix once = partial_trace(big, {2, 3, 4}, {0, 2});
    CMatrix twice = partial_trace(partial_trace(big, {2, 3, 4}, {2}), {2, 3}, {0});
    CHECK(max_abs(once - twice) < 1e-13);
    CHECK_THROWS_AS(partial_trace(big, {2, 3, 3}, {0}), std::invalid_argument);
}

TEST_CASE("tensor reshape round trip") {
    Rng rng(13);
    CMatrix m = random_matrix(6, 6, rng);
    CTensor4 t = CTensor4::from_matrix(m, {2, 3, 3, 2});
    CHECK(max_abs(t.to_matrix() - m) == 0.0);
    CHECK(t(1, 2, 0, 1) == m(1 * 3 + 2, 0 * 2 + 1));
}

TEST_CASE("hs inner product") {
    auto s = pauli();
    CHECK(std::abs(hs_inner(identity(2), identity(2), 1, 2) - 1.0) < 1e-15);
    CHECK(std::abs(hs_inner(s[1], s[3], 1, 2)) < 1e-15);
    Rng rng(14);
    CMatrix a = random_matrix(9, 9, rng), b = random_matrix(9, 9, rng);
    CHECK(std::abs(hs_inner(a, b, 2, 3) - std::conj(hs_inner(b, a, 2, 3))) < 1e-13);
    CHECK(hs_inner(a, a, 2, 3).real() >= 0.0);
    CHECK_THROWS_AS(hs_inner(a, identity(4), 2, 3), std::invalid_argument);
}

TEST_CASE("eig_general") {
    CMatrix d = CMatrix::Zero(3, 3);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    d(2, 2) = 2.0;
    auto r = eig_general(d);
    CHECK(std::abs(r.eigenvalues(0) - 3.0) < 1e-14);
    CHECK(std::abs(r.eigenvalues(1) - 2.0) < 1e-14);
    CHECK(std::abs(r.eigenvalues(2) - 1.0) < 1e-14);

    CMatrix j(2, 2);
    j << 1.0, 1.0, 0.0, 1.0 + 1e-13;
    CHECK(eig_general(j).condition == Conditioning::NearDefective);

    Rng rng(15);
    CMatrix a = random_matrix(20, 20, rng);
    auto s = eig_general(a);
    CHECK(s.condition == Conditioning::WellConditioned);
    for (int k = 0; k < 20; ++k)
        CHECK((a * s.vectors.col(k) - s.eigenvalues(k) * s.vectors.col(k)).norm() <= 1e-8 * a.norm());
    CHECK(std::abs(s.eigenvalues.sum() - a.trace()) <= 1e-9 * a.norm());
    for (int k = 0; k + 1 < 20; ++k) CHECK(std::abs(s.eigenvalues(k)) >= std::abs(s.eigenvalues(k + 1)));
}

TEST_CASE("eig_general reconstructs the doubled operator of A1(1) at q = 2") {
    BoundaryParams bp;
    bp.betaMinus = {{"1,1", 0.0}};
    bp.betaPlus = {{"1,1", 0.5}};
    ChainConfig cfg = make_chain(Series::A1, 2, CouplingParams::from_q(2.0), bp, 4);
    CMatrix W = doubled_matrix(build_bundle(cfg));
    auto s = eig_general(W);
    CMatrix rec = s.vectors * s.eigenvalues.asDiagonal() * s.vectors.inverse();
    CHECK((rec - W).norm() / W.norm() < 1e-9);
}

TEST_CASE("eig_hermitian") {
    auto s = pauli();
    auto z = eig_hermitian(s[3]);
    CHECK(std::abs(z.eigenvalues(0).imag()) == 0.0);
    CHECK(std::abs(std::abs(z.eigenvalues(0).real()) - 1.0) < 1e-14);
    auto x = eig_hermitian(s[1]);
    CMatrix U = x.vectors;
    CHECK((U.adjoint() * U - identity(2)).norm() < 1e-10);
    CHECK(std::abs(std::abs(U(0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-14);
    CMatrix bad = s[1] + elementary(2, 0, 1);
    CHECK_THROWS_AS(eig_hermitian(bad), std::invalid_argument);

    Fields9 zero{};
    CMatrix H = ik_hamiltonian(3, 2.5, zero, zero);
    auto h = eig_hermitian(H);
    CMatrix Dg = h.vectors.adjoint() * H * h.vectors;
    CMatrix off = Dg;
    off.diagonal().setZero();
    CHECK(off.norm() < 1e-9);
    CHECK((h.vectors.adjoint() * h.vectors - identity(27)).norm() < 1e-10);
}

TEST_CASE("power iteration finds the dominant pair") {
    CMatrix a = CMatrix::Zero(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 5.0;
    a(2, 2) = -2.0;
    a(0, 1) = 0.3;
    auto [l, v] = power_iteration(a);
    CHECK(std::abs(l - 5.0) < 1e-10);
    CHECK((a * v - l * v).norm() < 1e-8);
}
