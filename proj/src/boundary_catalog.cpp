#include "eszm/boundary_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eszm {

std::vector<std::string> template_keys(Series s, int n) {
    switch (s) {
        case Series::A2even: return {"1,1", "i,i'"};
        case Series::D1: return n == 2 ? std::vector<std::string>{"1,1", "2,2"} : std::vector<std::string>{"1,1"};
        default: return {"1,1"};
    }
}

void validate_betas(Series s, int n, const BetaMap& betas) {
    auto keys = template_keys(s, n);
    for (const auto& [k, v] : betas)
        if (std::find(keys.begin(), keys.end(), k) == keys.end())
            throw std::invalid_argument("beta key '" + k + "' not admitted by the " + series_name(s) + " template");
    for (const auto& k : keys)
        if (!betas.count(k)) throw std::invalid_argument("missing beta key '" + k + "' for " + series_name(s));
}

namespace {

template <class T>
T checked_div(T num, T den, cplx u) {
    if (std::abs(value_of(den)) < 1e-8) {
        std::ostringstream os;
        os << "K-matrix pole at u = " << u;
        throw PoleError(os.str(), u);
    }
    return num / den;
}

template <class T>
void fill_k(const SeriesSpec& spec, const BetaMap& b, T x, cplx u, std::vector<T>& K) {
    const int N = spec.N, n = spec.n;
    const cplx q = spec.q();
    K.assign(static_cast<size_t>(N) * N, T(0.0));
    auto at = [&](int i, int j) -> T& { return K[static_cast<size_t>(i) * N + j]; };
    const T one(1.0), two(2.0);
    const T b11(b.at("1,1"));
    const T xinv = checked_div(one, x, u);
    // h(beta, x) = (beta(x-1) - 2) / (beta(1/x - 1) - 2)
    auto h = [&](T beta) { return checked_div(beta * (x - one) - two, beta * (xinv - one) - two, u); };

    switch (spec.series) {
        case Series::A1: {
            T f_plus = b11 * (x - one) + one;
            T f_minus = b11 * (xinv - one) + one;
            at(0, 0) = f_plus;
            for (int l = 1; l < N; ++l) at(l, l) = x * x * f_minus;
            break;
        }
        case Series::B1: {
            for (int i = 0; i < N; ++i) at(i, i) = one;
            at(0, 0) = checked_div(b11 * (xinv - one) + two, b11 * (x - one) + two, u);
            T Q(std::pow(q, 2 * n - 3));
            at(N - 1, N - 1) = checked_div(b11 * (Q * x - one) + two, b11 * (Q * xinv - one) + two, u);
            break;
        }
        case Series::C1: {
            T hv = h(b11);
            for (int j = 0; j < N; ++j) at(j, j) = j < n ? one : hv;
            break;
        }
        case Series::D1: {
            if (n == 2) {
                T b22(b.at("2,2"));
                T h11 = h(b11), h22 = h(b22);
                at(0, 0) = one;
                at(1, 1) = h11;
                at(2, 2) = h22;
                at(3, 3) = h11 * h22;
            } else {
                T h11 = h(b11);
                T Q(std::pow(q, 2 * n - 4));
                at(0, 0) = one;
                for (int j = 1; j < N - 1; ++j) at(j, j) = h11;
                at(N - 1, N - 1) = h11 * checked_div(b11 * (Q * x - one) - two, b11 * (Q * xinv - one) - two, u);
            }
            break;
        }
        case Series::A2odd: {
            T Q(std::pow(q, 2 * n - 2));
            for (int j = 0; j < n - 1; ++j) at(j, j) = one;
            at(n - 1, n - 1) = h(b11);
            at(n, n) = x * x * checked_div(b11 * (xinv + Q) + two * Q, b11 * (x + Q) + two * Q, u);
            for (int j = n + 1; j < N; ++j) at(j, j) = x * x;
            break;
        }
        case Series::A2even: {
            const cplx bo = b.at("i,i'");
            if (std::abs(bo) < 1e-300) throw std::invalid_argument("A2(2n) template needs beta_{i,i'} != 0");
            const T qq(q);
            for (int i = 0; i < n; ++i) at(i, i) = one + b11 * (x - one);
            at(n, n) = b11 * x - checked_div(x * x - qq, one - qq, u) * (b11 - one);
            for (int i = n + 1; i < N; ++i) at(i, i) = x * x * (one + b11 * (xinv - one));
            for (int i = 0; i < n; ++i) at(i, N - 1 - i) = T(0.5 * bo) * (x * x - one);
            cplx lower = std::pow((b.at("1,1") - 1.0) / (q - 1.0), 2) * 2.0 * q / bo;
            for (int i = n + 1; i < N; ++i) at(i, N - 1 - i) = T(lower) * (x * x - one);
            break;
        }
    }
}

}  // namespace

CMatrix k_template(const SeriesSpec& spec, const BetaMap& betas, cplx u) {
    std::vector<cplx> K;
    fill_k<cplx>(spec, betas, std::exp(u), u, K);
    const int N = spec.N;
    CMatrix m(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) m(i, j) = K[static_cast<size_t>(i) * N + j];
    return m;
}

void k_template(const SeriesSpec& spec, const BetaMap& betas, cplx u, CMatrix& value, CMatrix& deriv) {
    std::vector<Dual> K;
    cplx x = std::exp(u);
    fill_k<Dual>(spec, betas, Dual(x, x), u, K);
    const int N = spec.N;
    value.resize(N, N);
    deriv.resize(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            value(i, j) = K[static_cast<size_t>(i) * N + j].v;
            deriv(i, j) = K[static_cast<size_t>(i) * N + j].d;
        }
}

BoundaryPair::BoundaryPair(SeriesSpec spec, BoundaryParams bparams)
    : spec_(std::move(spec)), bparams_(std::move(bparams)) {
    validate_betas(spec_.series, spec_.n, bparams_.betaMinus);
    validate_betas(spec_.series, spec_.n, bparams_.betaPlus);
}

CMatrix BoundaryPair::k_minus(cplx u) const { return k_template(spec_, bparams_.betaMinus, u); }

CMatrix BoundaryPair::k_minus_derivative(cplx u) const {
    CMatrix v, d;
    k_template(spec_, bparams_.betaMinus, u, v, d);
    return d;
}

CMatrix BoundaryPair::k_plus(cplx u) const {
    return k_template(spec_, bparams_.betaPlus, -u - spec_.rho).transpose() * spec_.M;
}

CMatrix BoundaryPair::k_plus_derivative(cplx u) const {
    CMatrix v, d;
    k_template(spec_, bparams_.betaPlus, -u - spec_.rho, v, d);
    return -(d.transpose() * spec_.M);
}

CMatrix k_minus(const BoundaryPair& pair, cplx u) { return pair.k_minus(u); }
CMatrix k_plus(const BoundaryPair& pair, cplx u) { return pair.k_plus(u); }

CMatrix k_minus_from_plus(const BoundaryPair& pair, cplx w) {
    const auto& s = pair.spec();
    return (pair.k_plus(-w - s.rho) * s.M.inverse()).transpose();
}

double check_sre(const RMatrixFn& fn, const BoundaryPair& pair, cplx u, cplx v, bool shifted) {
    const int N = fn.N();
    CMatrix I = identity(N);
    cplx shift = shifted ? 0.5 * fn.spec().period : cplx(0.0);
    CMatrix k1 = kron(pair.k_minus(u + shift), I);
    CMatrix k2 = kron(I, pair.k_minus(v + shift));
    CMatrix r12m = fn.evaluate(u - v), r12p = fn.evaluate(u + v);
    CMatrix r21m = swap_spaces(r12m, N), r21p = swap_spaces(r12p, N);
    CMatrix lhs = r12m * k1 * r21p * k2;
    CMatrix rhs = k2 * r12p * k1 * r21m;
    return max_abs(lhs - rhs) / std::max(max_abs(lhs), 1e-300);
}

double check_k_regularity(const BoundaryPair& pair) {
    return proportionality_residual(pair.k_minus(0.0), identity(pair.spec().N));
}

double check_half_period(const BoundaryPair& pair) {
    return proportionality_residual(pair.k_minus(0.5 * pair.spec().period), identity(pair.spec().N));
}

double check_pull_through(const RMatrixFn& fn, const BoundaryPair& pair, cplx v) {
    const int N = fn.N();
    const cplx p2 = 0.5 * fn.spec().period;
    CMatrix k0 = kron(pair.k_minus(p2), identity(N));
    CMatrix lhs = fn.evaluate(p2 + v) * k0 * swap_spaces(fn.evaluate(p2 - v), N);
    return proportionality_residual(lhs, identity(N * N));
}

CVector bell_state(int N) {
    if (N < 2) throw std::invalid_argument("bell_state: N must be >= 2");
    CVector pair = CVector::Zero(N * N);
    for (int j = 0; j < N; ++j) pair(j * N + j) = 1.0;
    CVector phi(N * N * N * N);
    for (int a = 0; a < N * N; ++a)
        for (int b = 0; b < N * N; ++b) phi(a * N * N + b) = pair(a) * pair(b) / static_cast<double>(N);
    return phi;
}

CVector k_plus_vector(const BoundaryPair& pair) {
    const int N = pair.spec().N;
    CMatrix kp = pair.k_plus(0.5 * pair.spec().period);
    CVector v(N * N);
    for (int a = 0; a < N; ++a)
        for (int y = 0; y < N; ++y) v(a * N + y) = kp(y, a);
    return v;
}

BellData bell_data(const BoundaryPair& pair) {
    const int N = pair.spec().N;
    BellData d;
    d.phi = bell_state(N);
    CVector kv = k_plus_vector(pair);
    d.kDual.resize(N * N * N * N);
    for (int a = 0; a < N * N; ++a)
        for (int b = 0; b < N * N; ++b) d.kDual(a * N * N + b) = kv(a) * kv(b);
    d.overlap = (d.kDual.array() * d.phi.array()).sum();
    return d;
}

cplx orthogonality(const BoundaryPair& pair) { return bell_data(pair).overlap; }

double relative_trace_k_plus(const BoundaryPair& pair) {
    const int N = pair.spec().N;
    CMatrix kp = pair.k_plus(0.5 * pair.spec().period);
    double scale = kp.diagonal().cwiseAbs().maxCoeff();
    return std::abs(kp.trace()) / (N * std::max(scale, 1e-300));
}

std::vector<cplx> constrained_beta_plus(Series s, int n, cplx q) {
    switch (s) {
        case Series::A1: {
            cplx t = std::pow(q, n - 2);
            return {t / (1.0 + t)};
        }
        case Series::A2even: return {0.5};
        case Series::C1:
        case Series::D1:
        case Series::A2odd: return {-1.0};
        case Series::B1: return {1.0, 2.0 / (1.0 + std::pow(q, 2 * n - 3))};
    }
    return {};
}

}  // namespace eszm
