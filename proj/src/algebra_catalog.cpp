#include "eszm/algebra_catalog.hpp"

#include <cmath>
#include <stdexcept>

namespace eszm {

Series parse_series(const std::string& name) {
    if (name == "a1") return Series::A1;
    if (name == "a2odd") return Series::A2odd;
    if (name == "a2even") return Series::A2even;
    if (name == "b1") return Series::B1;
    if (name == "c1") return Series::C1;
    if (name == "d1") return Series::D1;
    throw std::invalid_argument("unknown series '" + name + "'");
}

std::string series_name(Series s) {
    switch (s) {
        case Series::A1: return "a1";
        case Series::A2odd: return "a2odd";
        case Series::A2even: return "a2even";
        case Series::B1: return "b1";
        case Series::C1: return "c1";
        case Series::D1: return "d1";
    }
    return "?";
}

CouplingParams CouplingParams::from_delta(cplx delta) {
    cplx q = delta + std::sqrt(delta * delta - 1.0);
    if (std::abs(q) < 1.0) q = 1.0 / q;
    return {q, delta};
}

CouplingParams CouplingParams::from_q(cplx q) { return {q, 0.5 * (q + 1.0 / q)}; }

cplx qpow(cplx q, double x) { return std::exp(x * std::log(q)); }

SeriesSpec make_series_spec(Series series, int n, const CouplingParams& params) {
    SeriesSpec s;
    s.series = series;
    s.n = n;
    s.params = params;
    const cplx q = params.q;
    if (std::abs(q) == 0.0) throw std::invalid_argument("make_series_spec: q = 0");
    if (n < 1 || (series == Series::D1 && n < 2) || (series == Series::A1 && n < 2))
        throw std::invalid_argument("make_series_spec: invalid rank " + std::to_string(n) + " for " +
                                    series_name(series));

    if (series == Series::A1) {
        s.N = n;
        s.rho = -static_cast<double>(n) * std::log(q);
        s.M = CMatrix::Zero(n, n);
        for (int i = 1; i <= n; ++i) s.M(i - 1, i - 1) = std::pow(q, n + 1 - 2 * i);
        s.bar.assign(n, 0.0);
        s.eps.assign(n, 1);
        return s;
    }

    switch (series) {
        case Series::B1:
            s.N = 2 * n + 1;
            s.xi = std::pow(q, 2 * n - 1);
            s.rho = -std::log(std::pow(q, 2 * n - 1));
            break;
        case Series::C1:
            s.N = 2 * n;
            s.xi = std::pow(q, 2 * n + 2);
            // tabulated as -log q^{2n+1}; only -log q^{2n+2} satisfies crossing
            s.rho = -std::log(std::pow(q, 2 * n + 2));
            break;
        case Series::D1:
            s.N = 2 * n;
            s.xi = std::pow(q, 2 * n - 2);
            s.rho = -std::log(std::pow(q, 2 * n - 2));
            break;
        case Series::A2even:
            s.N = 2 * n + 1;
            s.xi = -std::pow(q, 2 * n + 1);
            s.rho = -std::log(-std::pow(q, 2 * n + 1));
            break;
        case Series::A2odd:
            s.N = 2 * n;
            s.xi = -std::pow(q, 2 * n);
            s.rho = -std::log(-std::pow(q, 2 * n));
            break;
        default:
            break;
    }

    const int N = s.N;
    s.bar.resize(N);
    s.eps.assign(N, 1);
    if (series == Series::C1) {
        for (int i = 1; i <= N; ++i) {
            s.bar[i - 1] = i <= n ? i - 0.5 : i + 0.5;
            s.eps[i - 1] = i <= n ? 1 : -1;
        }
    } else {
        double mid = 0.5 * (N + 1);
        for (int i = 1; i <= N; ++i) {
            if (i < mid) s.bar[i - 1] = i + 0.5;
            else if (i == mid) s.bar[i - 1] = i;
            else s.bar[i - 1] = i - 0.5;
        }
    }
    double offset = series == Series::A2even ? 2.0 : 1.0;
    s.M = CMatrix::Zero(N, N);
    for (int i = 0; i < N; ++i) s.M(i, i) = qpow(q, 2.0 * n + offset - 2.0 * s.bar[i]);
    return s;
}

// Weights in x = e^u. out holds the N^4 entries of the N^2 x N^2 matrix in row-major order.
template <class T>
void RMatrixFn::assemble(T x, std::vector<T>& out) const {
    const int N = spec_.N;
    const cplx q = spec_.q();
    const cplx q2 = q * q;
    out.assign(static_cast<size_t>(N) * N * N * N, T(0.0));
    auto add = [&](T c, int i, int j, int k, int l) {  // c * E_ij (x) E_kl
        out[static_cast<size_t>(i * N + k) * N * N + (j * N + l)] = out[static_cast<size_t>(i * N + k) * N * N + (j * N + l)] + c;
    };
    const T one(1.0);
    const T mut(1.0 + mutation_);

    if (spec_.series == Series::A1) {
        T w1 = (x - T(q2)) * mut;
        T w2 = T(q) * (x - one);
        T w3 = T(-(q2 - 1.0));
        T w4 = x * T(-(q2 - 1.0));
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                if (i == j) {
                    add(w1, i, i, i, i);
                } else {
                    add(w2, i, i, j, j);
                    add(i < j ? w3 : w4, i, j, j, i);
                }
            }
        return;
    }

    const cplx xi = spec_.xi;
    T w1 = (x - T(q2)) * (x - T(xi)) * mut;
    T w2 = T(q) * (x - one) * (x - T(xi));
    T w3 = T(-(q2 - 1.0)) * (x - T(xi));
    T w4 = x * T(-(q2 - 1.0)) * (x - T(xi));
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            int ip = spec_.prime(i);
            if (i == j) {
                if (i != ip) add(w1, i, i, i, i);
            } else {
                if (j != ip) add(w2, i, i, j, j);
                if (i < j && i != spec_.prime(j)) add(w3, i, j, j, i);
                if (i > j && i != spec_.prime(j)) add(w4, i, j, j, i);
            }
        }
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            T a;
            const bool conj = i == spec_.prime(j);
            const double ee = spec_.eps[i] * spec_.eps[j];
            if (i == j && i != spec_.prime(i)) {
                a = (T(q2) * x - T(xi)) * (x - one);
            } else if (i == j) {
                a = T(q) * (x - T(xi)) * (x - one) + T((xi - 1.0) * (q2 - 1.0)) * x;
            } else if (i < j) {
                cplx qq = ee * xi * qpow(q, spec_.bar[i] - spec_.bar[j]);
                a = T(q2 - 1.0) * (T(qq) * (x - one) - (conj ? x - T(xi) : T(0.0)));
            } else {
                cplx qq = ee * qpow(q, spec_.bar[i] - spec_.bar[j]);
                a = T(q2 - 1.0) * x * (T(qq) * (x - one) - (conj ? x - T(xi) : T(0.0)));
            }
            add(a, i, j, spec_.prime(i), spec_.prime(j));
        }
}

CMatrix RMatrixFn::evaluate(cplx u) const {
    std::vector<cplx> w;
    assemble<cplx>(std::exp(u), w);
    const int d = spec_.N * spec_.N;
    CMatrix r(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) r(a, b) = w[static_cast<size_t>(a) * d + b];
    return r;
}

void RMatrixFn::evaluate_with_derivative(cplx u, CMatrix& value, CMatrix& deriv) const {
    std::vector<Dual> w;
    cplx x = std::exp(u);
    assemble<Dual>(Dual(x, x), w);
    const int d = spec_.N * spec_.N;
    value.resize(d, d);
    deriv.resize(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            value(a, b) = w[static_cast<size_t>(a) * d + b].v;
            deriv(a, b) = w[static_cast<size_t>(a) * d + b].d;
        }
}

CMatrix RMatrixFn::derivative(cplx u) const {
    CMatrix v, d;
    evaluate_with_derivative(u, v, d);
    return d;
}

cplx RMatrixFn::a1(cplx u) const {
    cplx x = std::exp(u), q = spec_.q();
    if (spec_.series == Series::A1) return x - q * q;
    return (x - q * q) * (x - spec_.xi);
}

cplx RMatrixFn::a1_derivative(cplx u) const {
    cplx x = std::exp(u), q = spec_.q();
    if (spec_.series == Series::A1) return x;
    return x * ((x - spec_.xi) + (x - q * q));
}

CTensor4 r_matrix(const RMatrixFn& fn, cplx u) {
    int N = fn.N();
    return CTensor4::from_matrix(fn.evaluate(u), {N, N, N, N});
}

CTensor4 r_matrix_derivative(const RMatrixFn& fn, cplx u) {
    int N = fn.N();
    return CTensor4::from_matrix(fn.derivative(u), {N, N, N, N});
}

CMatrix swap_spaces(const CMatrix& r12, int N) {
    CMatrix p = permutation(N);
    return p * r12 * p;
}

CMatrix partial_transpose_2(const CMatrix& x, int N) {
    CMatrix out(N * N, N * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c)
                for (int d = 0; d < N; ++d) out(a * N + b, c * N + d) = x(a * N + d, c * N + b);
    return out;
}

CMatrix partial_transpose_1(const CMatrix& x, int N) {
    CMatrix out(N * N, N * N);
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c)
                for (int d = 0; d < N; ++d) out(a * N + b, c * N + d) = x(c * N + b, a * N + d);
    return out;
}

double check_ybe(const RMatrixFn& fn, cplx u, cplx v) {
    const int N = fn.N();
    CMatrix I = identity(N);
    CMatrix r12 = kron(fn.evaluate(u - v), I);
    CMatrix r23 = kron(I, fn.evaluate(v));
    CMatrix p23 = kron(I, permutation(N));
    CMatrix r13 = p23 * kron(fn.evaluate(u), I) * p23;
    CMatrix lhs = r12 * r13 * r23;
    CMatrix rhs = r23 * r13 * r12;
    return max_abs(lhs - rhs) / std::max(max_abs(lhs), 1e-300);
}

double check_unitarity(const RMatrixFn& fn, cplx v) {
    const int N = fn.N();
    CMatrix lhs = fn.evaluate(v) * swap_spaces(fn.evaluate(-v), N);
    cplx c = fn.a1(v) * fn.a1(-v);
    return max_abs(lhs - c * identity(N * N)) / std::abs(c);
}

double check_crossing(const RMatrixFn& fn, cplx u) {
    const auto& s = fn.spec();
    const int N = s.N;
    const cplx rho = s.rho;
    if (s.series == Series::A1) {
        CMatrix t2 = partial_transpose_2(fn.evaluate(u), N);
        Eigen::FullPivLU<CMatrix> lu1(t2);
        if (!lu1.isInvertible()) throw std::runtime_error("check_crossing: singular partial transpose");
        CMatrix inner = partial_transpose_2(lu1.inverse(), N);
        Eigen::FullPivLU<CMatrix> lu2(inner);
        if (!lu2.isInvertible()) throw std::runtime_error("check_crossing: singular partial transpose");
        CMatrix lhs = lu2.inverse();
        CMatrix m2 = kron(identity(N), s.M);
        CMatrix rhs = m2 * fn.evaluate(u + 2.0 * rho) * m2.inverse();
        return proportionality_residual(lhs, rhs);
    }
    CMatrix m1 = kron(s.M, identity(N));
    CMatrix lhs = partial_transpose_1(fn.evaluate(u), N) * m1 *
                  partial_transpose_2(fn.evaluate(-u - 2.0 * rho), N) * m1.inverse();
    cplx c = s.xi * s.xi * fn.a1(u + rho) * fn.a1(-u - rho);
    return max_abs(lhs - c * identity(N * N)) / std::abs(c);
}

double check_periodicity(const RMatrixFn& fn, cplx u) {
    CMatrix a = fn.evaluate(u), b = fn.evaluate(u + fn.spec().period);
    return (a - b).norm() / a.norm();
}

double check_regularity(const RMatrixFn& fn) {
    return proportionality_residual(fn.evaluate(0.0), permutation(fn.N()).cast<cplx>());
}

}  // namespace eszm
