#include "eszm/tensor_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace eszm {

CTensor4::CTensor4(std::array<int, 4> d) : dims(d), data(static_cast<size_t>(d[0]) * d[1] * d[2] * d[3]) {}

cplx& CTensor4::operator()(int o1, int o2, int i1, int i2) {
    size_t r = static_cast<size_t>(o1) * dims[1] + o2;
    size_t c = static_cast<size_t>(i1) * dims[3] + i2;
    return data[r * dims[2] * dims[3] + c];
}

cplx CTensor4::operator()(int o1, int o2, int i1, int i2) const {
    size_t r = static_cast<size_t>(o1) * dims[1] + o2;
    size_t c = static_cast<size_t>(i1) * dims[3] + i2;
    return data[r * dims[2] * dims[3] + c];
}

CMatrix CTensor4::to_matrix() const {
    int rows = dims[0] * dims[1], cols = dims[2] * dims[3];
    CMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = data[static_cast<size_t>(r) * cols + c];
    return m;
}

CTensor4 CTensor4::from_matrix(const CMatrix& m, std::array<int, 4> d) {
    if (m.rows() != d[0] * d[1] || m.cols() != d[2] * d[3])
        throw std::invalid_argument("CTensor4::from_matrix: shape mismatch");
    CTensor4 t(d);
    int cols = d[2] * d[3];
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < cols; ++c) t.data[static_cast<size_t>(r) * cols + c] = m(r, c);
    return t;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix identity(int dim) { return CMatrix::Identity(dim, dim); }

CMatrix elementary(int N, int i, int j) {
    CMatrix e = CMatrix::Zero(N, N);
    e(i, j) = 1.0;
    return e;
}

CMatrix permutation(int N) {
    CMatrix p = CMatrix::Zero(N * N, N * N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) p(i * N + j, j * N + i) = 1.0;
    return p;
}

CMatrix partial_trace(const CMatrix& op, const std::vector<int>& siteDims,
                      const std::set<int>& traced) {
    const int ns = static_cast<int>(siteDims.size());
    long total = 1;
    for (int d : siteDims) total *= d;
    if (op.rows() != total || op.cols() != total)
        throw std::invalid_argument("partial_trace: operator dimension does not match site dims");
    for (int s : traced)
        if (s < 0 || s >= ns) throw std::invalid_argument("partial_trace: traced site out of range");

    std::vector<int> kept;
    for (int s = 0; s < ns; ++s)
        if (!traced.count(s)) kept.push_back(s);
    long keptDim = 1, tracedDim = 1;
    for (int s : kept) keptDim *= siteDims[s];
    for (int s : traced) tracedDim *= siteDims[s];

    // strides of each site in the full index
    std::vector<long> stride(ns);
    long acc = 1;
    for (int s = ns - 1; s >= 0; --s) {
        stride[s] = acc;
        acc *= siteDims[s];
    }
    auto compose = [&](long keptIdx, long tracedIdx) {
        long full = 0;
        for (int k = static_cast<int>(kept.size()) - 1; k >= 0; --k) {
            int s = kept[k];
            full += (keptIdx % siteDims[s]) * stride[s];
            keptIdx /= siteDims[s];
        }
        std::vector<int> tr(traced.begin(), traced.end());
        for (int k = static_cast<int>(tr.size()) - 1; k >= 0; --k) {
            int s = tr[k];
            full += (tracedIdx % siteDims[s]) * stride[s];
            tracedIdx /= siteDims[s];
        }
        return full;
    };

    std::vector<long> fullIdx(static_cast<size_t>(keptDim * tracedDim));
    for (long a = 0; a < keptDim; ++a)
        for (long t = 0; t < tracedDim; ++t) fullIdx[a * tracedDim + t] = compose(a, t);

    CMatrix out = CMatrix::Zero(keptDim, keptDim);
    for (long a = 0; a < keptDim; ++a)
        for (long b = 0; b < keptDim; ++b) {
            cplx s = 0.0;
            for (long t = 0; t < tracedDim; ++t)
                s += op(fullIdx[a * tracedDim + t], fullIdx[b * tracedDim + t]);
            out(a, b) = s;
        }
    return out;
}

cplx hs_inner(const CMatrix& a, const CMatrix& b, int L, int N) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw std::invalid_argument("hs_inner: dimension mismatch");
    double dim = std::pow(static_cast<double>(N), L);
    if (std::abs(dim - static_cast<double>(a.rows())) > 0.5)
        throw std::invalid_argument("hs_inner: dimension is not N^L");
    return (a.conjugate().cwiseProduct(b)).sum() / dim;
}

double max_abs(const CMatrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

double proportionality_residual(const CMatrix& a, const CMatrix& b) {
    cplx bb = (b.conjugate().cwiseProduct(b)).sum();
    cplx ba = (b.conjugate().cwiseProduct(a)).sum();
    double na = a.norm();
    if (na == 0.0) return b.norm() == 0.0 ? 0.0 : 1.0;
    if (std::abs(bb) == 0.0) return 1.0;
    return (a - (ba / bb) * b).norm() / na;
}

void normalize_phase(CVector& v) {
    double n = v.norm();
    if (n == 0.0) return;
    v /= n;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12) {
            v *= std::conj(v(i)) / std::abs(v(i));
            v(i) = std::abs(v(i));
            break;
        }
    }
}

static void sort_spectrum(SpectrumResult& r) {
    const Eigen::Index n = r.eigenvalues.size();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(r.eigenvalues(a)) > std::abs(r.eigenvalues(b));
    });
    CVector ev(n);
    CMatrix vec(r.vectors.rows(), n);
    for (Eigen::Index k = 0; k < n; ++k) {
        ev(k) = r.eigenvalues(order[k]);
        CVector col = r.vectors.col(order[k]);
        normalize_phase(col);
        vec.col(k) = col;
    }
    r.eigenvalues = ev;
    r.vectors = vec;
}

SpectrumResult eig_general(const CMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("eig_general: matrix not square");
    SpectrumResult r;
    if (a.rows() == 0) return r;
    Eigen::ComplexEigenSolver<CMatrix> es(a, true);
    if (es.info() != Eigen::Success) throw std::runtime_error("eig_general: eigensolver failed");
    r.eigenvalues = es.eigenvalues();
    r.vectors = es.eigenvectors();
    sort_spectrum(r);
    Eigen::JacobiSVD<CMatrix> svd(r.vectors);
    const auto& sv = svd.singularValues();
    double smin = sv(sv.size() - 1);
    r.eigvecCondition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    r.condition = r.eigvecCondition > 1e8 ? Conditioning::NearDefective : Conditioning::WellConditioned;
    return r;
}

SpectrumResult eig_hermitian(const CMatrix& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("eig_hermitian: matrix not square");
    double nh = h.norm();
    if ((h - h.adjoint()).norm() > 1e-10 * std::max(nh, 1e-300))
        throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: eigensolver failed");
    SpectrumResult r;
    r.eigenvalues = es.eigenvalues().cast<cplx>();
    r.vectors = es.eigenvectors();
    sort_spectrum(r);
    return r;
}

std::pair<cplx, CVector> power_iteration(const CMatrix& a, int maxIter, double tol) {
    const Eigen::Index n = a.rows();
    CVector v = CVector::Ones(n) / std::sqrt(static_cast<double>(n));
    for (Eigen::Index i = 0; i < n; ++i) v(i) += cplx(1e-3 * std::sin(1.0 + i), 1e-3 * std::cos(2.0 + i));
    v.normalize();
    cplx lambda = 0.0;
    for (int it = 0; it < maxIter; ++it) {
        CVector w = a * v;
        lambda = v.dot(w);
        double residual = (w - lambda * v).norm();
        double nw = w.norm();
        if (nw == 0.0 || residual <= tol * std::max(1.0, std::abs(lambda))) break;
        v = w / nw;
    }
    normalize_phase(v);
    lambda = v.dot(a * v);
    return {lambda, v};
}

}  // namespace eszm
