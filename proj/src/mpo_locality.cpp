#include "eszm/mpo_locality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eszm {

std::vector<CMatrix> MpoBundle::What() const {
    std::vector<CMatrix> out;
    out.reserve(W.size());
    for (const auto& w : W) out.push_back(w / cFactor);
    return out;
}

std::vector<CMatrix> MpoBundle::Dhat() const {
    std::vector<CMatrix> out;
    out.reserve(Dtilde.size());
    for (const auto& d : Dtilde) out.push_back(d / cFactor);
    return out;
}

std::vector<CMatrix> w_tensor(const CMatrix& Ra, const CMatrix& Rb, int N) {
    const int d = N * N;
    std::vector<CMatrix> W(d, CMatrix::Zero(d, d));
    for (int s = 0; s < N; ++s)
        for (int t = 0; t < N; ++t) {
            CMatrix& w = W[s * N + t];
            for (int a = 0; a < N; ++a)
                for (int y = 0; y < N; ++y)
                    for (int a2 = 0; a2 < N; ++a2)
                        for (int y2 = 0; y2 < N; ++y2) {
                            cplx acc = 0.0;
                            for (int m = 0; m < N; ++m)
                                acc += Ra(a * N + s, a2 * N + m) * Rb(m * N + y2, t * N + y);
                            w(a * N + y, a2 * N + y2) = acc;
                        }
        }
    return W;
}

MpoBundle build_bundle(const ChainConfig& cfg) {
    const int N = cfg.N();
    const cplx p2 = 0.5 * cfg.spec().period;
    MpoBundle b;
    b.N = N;
    CMatrix R, dR;
    cfg.rfn.evaluate_with_derivative(p2, R, dR);
    b.W = w_tensor(R, R, N);
    auto d1 = w_tensor(dR, R, N);
    auto d2 = w_tensor(R, dR, N);
    b.Dtilde.resize(N * N);
    for (int k = 0; k < N * N; ++k) b.Dtilde[k] = d1[k] + d2[k];

    b.kPlusVec = k_plus_vector(cfg.boundaries);
    CMatrix Km, dKm;
    k_template(cfg.spec(), cfg.boundaries.params().betaMinus, p2, Km, dKm);
    b.kMinusVec.resize(N * N);
    b.kMinusPrimeVec.resize(N * N);
    for (int a = 0; a < N; ++a)
        for (int y = 0; y < N; ++y) {
            b.kMinusVec(a * N + y) = Km(a, y);
            b.kMinusPrimeVec(a * N + y) = dKm(a, y);
        }
    b.cFactor = cfg.rfn.a1(p2) * cfg.rfn.a1(-p2);
    return b;
}

CMatrix contract_chain(const CVector& left, const std::vector<CMatrix>& W, const CVector& right, int N, int L) {
    const int d = N * N;
    // ops[b] is the partial operator on the first j sites with open bond b
    std::vector<CMatrix> ops(d);
    for (int b = 0; b < d; ++b) ops[b] = CMatrix::Constant(1, 1, left(b));
    for (int j = 1; j <= L; ++j) {
        const Eigen::Index D = ops[0].rows();
        const bool last = j == L;
        const int nOut = last ? 1 : d;
        std::vector<CMatrix> next(nOut, CMatrix::Zero(D * N, D * N));
        // stacked[(r,c), b] = ops[b](r,c)
        CMatrix stacked(D * D, d);
        for (int b = 0; b < d; ++b) stacked.col(b) = Eigen::Map<const CVector>(ops[b].data(), D * D);
        for (int s = 0; s < N; ++s)
            for (int t = 0; t < N; ++t) {
                CMatrix mixed = last ? CMatrix(stacked * (W[s * N + t] * right)) : CMatrix(stacked * W[s * N + t]);
                for (int bo = 0; bo < nOut; ++bo) {
                    Eigen::Map<const CMatrix> block(mixed.col(bo).data(), D, D);
                    for (Eigen::Index c = 0; c < D; ++c)
                        for (Eigen::Index r = 0; r < D; ++r) next[bo](r * N + s, c * N + t) += block(r, c);
                }
            }
        ops = std::move(next);
    }
    return ops[0];
}

CMatrix doubled_matrix(const MpoBundle& bundle) {
    const int d = bundle.N * bundle.N;
    auto Wh = bundle.What();
    CMatrix out = CMatrix::Zero(d * d, d * d);
    for (const auto& w : Wh) out += kron(w.conjugate(), w);
    return out;
}

CVector apply_doubled(const MpoBundle& bundle, const CVector& v) {
    const int d = bundle.N * bundle.N;
    auto Wh = bundle.What();
    CVector out = CVector::Zero(d * d);
    for (const auto& w : Wh)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                cplx acc = 0.0;
                for (int c = 0; c < d; ++c)
                    for (int e = 0; e < d; ++e) acc += std::conj(w(a, c)) * w(b, e) * v(c * d + e);
                out(a * d + b) += acc;
            }
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

CMatrix block_matrix(const std::vector<CMatrix>& Wh, const std::vector<int>& idx, int d) {
    const int m = static_cast<int>(idx.size());
    CMatrix out = CMatrix::Zero(m, m);
    std::vector<int> l1(m), l2(m);
    for (int i = 0; i < m; ++i) {
        l1[i] = idx[i] / d;
        l2[i] = idx[i] % d;
    }
    for (const auto& w : Wh)
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k) out(i, k) += std::conj(w(l1[i], l1[k])) * w(l2[i], l2[k]);
    return out;
}

std::vector<CMatrix> tau_split(const std::vector<CMatrix>& X, int N, CMatrix& tau) {
    const int d = N * N;
    tau = CMatrix::Zero(d, d);
    for (int s = 0; s < N; ++s) tau += X[s * N + s];
    tau /= static_cast<double>(N);
    std::vector<CMatrix> proj = X;
    for (int s = 0; s < N; ++s) proj[s * N + s] -= tau;
    return proj;
}

}  // namespace

std::vector<std::vector<int>> doubled_sectors(const std::vector<CMatrix>& Wh, int N) {
    const int d = N * N;
    double scale = 0.0;
    for (const auto& w : Wh) scale = std::max(scale, max_abs(w));
    const double cut = 1e-14 * scale;
    UnionFind uf(d * d);
    for (const auto& w : Wh) {
        std::vector<std::pair<int, int>> nz;
        for (int l = 0; l < d; ++l)
            for (int r = 0; r < d; ++r)
                if (std::abs(w(l, r)) > cut) nz.emplace_back(l, r);
        for (const auto& e1 : nz)
            for (const auto& e2 : nz) uf.unite(e1.first * d + e2.first, e1.second * d + e2.second);
    }
    std::vector<std::vector<int>> groups;
    std::vector<int> label(d * d, -1);
    for (int i = 0; i < d * d; ++i) {
        int r = uf.find(i);
        if (label[r] < 0) {
            label[r] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[label[r]].push_back(i);
    }
    return groups;
}

CMatrix DoubledOperator::dense() const {
    const int D = N * N * N * N;
    CMatrix out = CMatrix::Zero(D, D);
    for (const auto& b : blocks)
        for (size_t i = 0; i < b.indices.size(); ++i)
            for (size_t k = 0; k < b.indices.size(); ++k) out(b.indices[i], b.indices[k]) = b.matrix(i, k);
    return out;
}

DoubledOperator doubled_operator(const MpoBundle& bundle, bool withVectors) {
    const int N = bundle.N, d = N * N, D = d * d;
    auto Wh = bundle.What();
    DoubledOperator op;
    op.N = N;
    auto groups = doubled_sectors(Wh, N);
    CVector phi = bell_state(N);

    std::vector<cplx> allValues;
    std::vector<std::pair<int, int>> origin;  // (block, position in block spectrum)
    std::vector<SpectrumResult> spectra;
    const bool embed = withVectors && D <= 2500;
    for (const auto& g : groups) {
        SectorBlock blk;
        blk.indices = g;
        blk.matrix = block_matrix(Wh, g, d);
        for (int i : g)
            if (std::abs(phi(i)) > 0.0) op.bellBlock = static_cast<int>(op.blocks.size());
        SpectrumResult sr;
        if (embed) {
            sr = eig_general(blk.matrix);
        } else {
            Eigen::ComplexEigenSolver<CMatrix> es(blk.matrix, false);
            sr.eigenvalues = es.eigenvalues();
        }
        for (Eigen::Index k = 0; k < sr.eigenvalues.size(); ++k) {
            allValues.push_back(sr.eigenvalues(k));
            origin.emplace_back(static_cast<int>(op.blocks.size()), static_cast<int>(k));
        }
        spectra.push_back(std::move(sr));
        op.blocks.push_back(std::move(blk));
    }

    std::vector<size_t> order(allValues.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        double ma = std::abs(allValues[a]), mb = std::abs(allValues[b]);
        if (std::abs(ma - mb) > 1e-10 * std::max(ma, mb)) return ma > mb;
        // numerically tied moduli: the Bell sector goes first
        return origin[a].first == op.bellBlock && origin[b].first != op.bellBlock;
    });
    op.spectrum.eigenvalues.resize(static_cast<Eigen::Index>(allValues.size()));
    if (embed) op.spectrum.vectors = CMatrix::Zero(D, static_cast<Eigen::Index>(allValues.size()));
    double worstCond = 1.0;
    for (size_t k = 0; k < order.size(); ++k) {
        op.spectrum.eigenvalues(k) = allValues[order[k]];
        if (embed) {
            auto [bi, pos] = origin[order[k]];
            const auto& idx = op.blocks[bi].indices;
            for (size_t i = 0; i < idx.size(); ++i) op.spectrum.vectors(idx[i], k) = spectra[bi].vectors(i, pos);
        }
    }
    for (const auto& sr : spectra) worstCond = std::max(worstCond, sr.eigvecCondition);
    op.spectrum.eigvecCondition = worstCond;
    op.spectrum.condition = worstCond > 1e8 ? Conditioning::NearDefective : Conditioning::WellConditioned;

    // top eigenpair from its block
    const int topBlock = origin[order[0]].first;
    const auto& tb = op.blocks[topBlock];
    SpectrumResult tsr = eig_general(tb.matrix);
    cplx lambda = tsr.eigenvalues(0);
    CVector vb = tsr.vectors.col(0);
    if (tsr.condition == Conditioning::NearDefective) {
        auto [pl, pv] = power_iteration(tb.matrix);
        lambda = pl;
        vb = pv;
        op.usedPowerIteration = true;
    }
    op.topEigenvalue = lambda;
    op.topVector = CVector::Zero(D);
    for (size_t i = 0; i < tb.indices.size(); ++i) op.topVector(tb.indices[i]) = vb(i);
    normalize_phase(op.topVector);
    return op;
}

CVector power_sum(const CMatrix& A, const CVector& v, int count, MiddleSumMethod method) {
    if (count <= 0) return CVector::Zero(v.size());
    if (method == MiddleSumMethod::Direct) {
        CVector acc = CVector::Zero(v.size());
        CVector term = v;
        for (int m = 0; m < count; ++m) {
            acc += term;
            if (m + 1 < count) term = A * term;
        }
        return acc;
    }
    Eigen::ComplexEigenSolver<CMatrix> es(A, true);
    const CMatrix& S = es.eigenvectors();
    Eigen::PartialPivLU<CMatrix> lu(S);
    CMatrix rebuilt = S * es.eigenvalues().asDiagonal() * lu.inverse();
    // defective or nearly so: the eigenbasis cannot represent powers, accumulate directly
    if ((rebuilt - A).norm() > 1e-10 * std::max(A.norm(), 1e-300))
        return power_sum(A, v, count, MiddleSumMethod::Direct);
    CVector coeff = lu.solve(v);
    for (Eigen::Index k = 0; k < coeff.size(); ++k) {
        cplx x = es.eigenvalues()(k);
        cplx g = std::abs(x - 1.0) < 1e-8 ? cplx(count) : (1.0 - std::pow(x, count)) / (1.0 - x);
        coeff(k) *= g;
    }
    return S * coeff;
}

CMatrix boundary_vector_d(const MpoBundle& bundle, int L, int j, MiddleSumMethod method) {
    if (j < 1 || j > L) throw std::out_of_range("boundary_vector_d: site out of range");
    const int N = bundle.N, d = N * N;
    auto Wh = bundle.What();
    auto Dh = bundle.Dhat();
    CMatrix tauW, tauD;
    auto projW = tau_split(Wh, N, tauW);
    auto projD = tau_split(Dh, N, tauD);
    CVector acc = power_sum(tauW, tauD * bundle.kMinusVec, L - j, method);
    CVector tail = bundle.kMinusPrimeVec;
    for (int m = 0; m < L - j; ++m) tail = tauW * tail;
    CVector rest = acc + tail;
    CMatrix out(d, d);
    for (int st = 0; st < d; ++st) out.col(st) = projD[st] * bundle.kMinusVec + projW[st] * rest;
    return out;
}

LocalityProfile norms_profile(const ChainConfig& cfg, const ProfileOptions& opt) {
    const int L = cfg.L;
    if (L < 2) throw std::invalid_argument("norms_profile: L must be >= 2");
    MpoBundle bundle = build_bundle(cfg);
    const int N = bundle.N, d = N * N;
    auto Wh = bundle.What();
    auto Dh = bundle.Dhat();
    CMatrix tauW, tauD;
    auto projW = tau_split(Wh, N, tauW);
    auto projD = tau_split(Dh, N, tauD);

    // accumulate the D_j ingredients from j = L downwards
    std::vector<CVector> rest(L + 1);
    {
        CVector acc = CVector::Zero(d);
        CVector powD = tauD * bundle.kMinusVec;
        CVector tail = bundle.kMinusPrimeVec;
        for (int j = L; j >= 1; --j) {
            rest[j] = acc + tail;
            acc += powD;
            powD = tauW * powD;
            tail = tauW * tail;
        }
    }

    CMatrix spectralS, spectralSinv;
    CVector spectralLambda;
    CVector ell1;
    if (opt.method == NormsMethod::Spectral) {
        if (d * d > 2500) throw std::invalid_argument("spectral norms route limited to N^4 <= 2500");
        CMatrix Wcal = doubled_matrix(bundle);
        Eigen::ComplexEigenSolver<CMatrix> es(Wcal, true);
        spectralS = es.eigenvectors();
        spectralSinv = spectralS.inverse();
        spectralLambda = es.eigenvalues();
        ell1.resize(d * d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) ell1(a * d + b) = std::conj(bundle.kPlusVec(a)) * bundle.kPlusVec(b);
    }

    LocalityProfile prof;
    prof.rawNorms.resize(L);
    // ell_j / N^{j-1}
    CMatrix ell = bundle.kPlusVec.conjugate() * bundle.kPlusVec.transpose();
    double scaleRef = 0.0;
    std::vector<cplx> raw(L);
    for (int j = 1; j <= L; ++j) {
        CMatrix Dj(d, d);
        for (int st = 0; st < d; ++st) Dj.col(st) = projD[st] * bundle.kMinusVec + projW[st] * rest[j];
        CMatrix E = Dj.conjugate() * Dj.transpose();
        cplx nj;
        if (opt.method == NormsMethod::Spectral) {
            CVector coeff = spectralS.transpose() * ell1;  // ell1^T S
            for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff(k) *= std::pow(spectralLambda(k), j - 1);
            CVector ellj = spectralSinv.transpose() * coeff;
            nj = 0.0;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) nj += ellj(a * d + b) * E(a, b);
            nj /= std::pow(static_cast<double>(N), j);
        } else {
            nj = (ell.array() * E.array()).sum() / static_cast<double>(N);
            CMatrix next = CMatrix::Zero(d, d);
            for (const auto& w : Wh) next.noalias() += w.adjoint() * ell * w;
            ell = next / static_cast<double>(N);
        }
        raw[j - 1] = nj;
        scaleRef = std::max(scaleRef, std::abs(nj));
    }
    for (int j = 0; j < L; ++j) {
        prof.maxImag = std::max(prof.maxImag, std::abs(raw[j].imag()) / std::max(scaleRef, 1e-300));
        double r = raw[j].real();
        if (r < 0.0) {
            if (r < -1e-12 * scaleRef) ++prof.clipped;
            r = 0.0;
        }
        prof.rawNorms[j] = r;
    }
    if (prof.clipped > L / 10) throw std::runtime_error("norms_profile: too many negative norms clipped");
    double total = std::accumulate(prof.rawNorms.begin(), prof.rawNorms.end(), 0.0);
    if (total <= 0.0) throw TrivialModeError("norms_profile: vanishing total norm");
    prof.normalization = 1.0 / std::sqrt(total);
    prof.normsSquared.resize(L);
    for (int j = 0; j < L; ++j) prof.normsSquared[j] = prof.rawNorms[j] / total;

    int jStart = opt.fitStart;
    int jEnd = opt.fitEnd <= 0 ? L + opt.fitEnd : opt.fitEnd;
    if (jEnd - jStart + 1 >= 4) prof.fit = fit_decay(prof.normsSquared, jStart, jEnd);
    return prof;
}

FitResult fit_decay(const std::vector<double>& norms, int jStart, int jEnd) {
    FitResult f;
    f.jStart = jStart;
    f.jEnd = jEnd;
    std::vector<double> xs, ys;
    for (int j = std::max(jStart, 1); j <= std::min<int>(jEnd, static_cast<int>(norms.size())); ++j) {
        double v = norms[j - 1];
        if (v > 0.0) {
            xs.push_back(j);
            ys.push_back(std::log(v));
        }
    }
    if (xs.size() < 4) throw std::invalid_argument("fit_decay: fewer than 4 usable points in the fit window");
    const double n = static_cast<double>(xs.size());
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    double slope = sxy / sxx;
    f.intercept = my - slope * mx;
    double ssres = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (f.intercept + slope * xs[i]);
        ssres += r * r;
    }
    f.alpha = -slope;
    f.rSquared = syy > 0.0 ? 1.0 - ssres / syy : 1.0;
    f.localized = f.alpha > 0.0 && f.rSquared >= 0.99;
    return f;
}

FitResult fit_decay(const LocalityProfile& profile) { return profile.fit; }

ScanRow scan_point(Series series, int n, double delta) {
    SeriesSpec spec = make_series_spec(series, n, CouplingParams::from_delta(delta));
    RMatrixFn fn(spec);
    const int N = spec.N, d = N * N;
    const cplx p2 = 0.5 * spec.period;
    CMatrix R = fn.evaluate(p2);
    cplx c = fn.a1(p2) * fn.a1(-p2);
    auto W = w_tensor(R, R, N);
    for (auto& w : W) w /= c;
    auto groups = doubled_sectors(W, N);
    CVector phi = bell_state(N);
    const std::vector<int>* bell = nullptr;
    for (const auto& g : groups)
        for (int i : g)
            if (std::abs(phi(i)) > 0.0) bell = &g;
    if (!bell) throw std::logic_error("scan_point: Bell support not found");
    CMatrix blk = block_matrix(W, *bell, d);
    const int m = static_cast<int>(bell->size());
    CVector pb(m);
    for (int i = 0; i < m; ++i) pb(i) = phi((*bell)[i]);
    pb.normalize();

    ScanRow row;
    row.delta = delta;
    SpectrumResult sr = eig_general(blk);
    row.topModulus = std::abs(sr.eigenvalues(0));
    row.overlap = std::abs(pb.dot(sr.vectors.col(0)));
    CMatrix P = identity(m) - pb * pb.adjoint();
    Eigen::ComplexEigenSolver<CMatrix> es(P * blk * P, false);
    row.deflatedRadius = es.eigenvalues().cwiseAbs().maxCoeff();
    return row;
}

ScanResult scan_delta_threshold(Series series, int n, double lo, double hi, double step, double tol) {
    if (!(hi > lo) || !(step > 0.0)) throw std::invalid_argument("scan_delta_threshold: empty range");
    ScanResult res;
    res.N = make_series_spec(series, n, CouplingParams::from_delta(lo)).N;
    const double N = res.N;
    auto g = [&](double delta) { return scan_point(series, n, delta).deflatedRadius - N; };
    int steps = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int k = 0; k <= steps; ++k) res.rows.push_back(scan_point(series, n, lo + k * step));
    for (size_t k = 0; k + 1 < res.rows.size(); ++k) {
        double ga = res.rows[k].deflatedRadius - N, gb = res.rows[k + 1].deflatedRadius - N;
        if ((ga <= 0.0) != (gb <= 0.0)) {
            double a = res.rows[k].delta, b = res.rows[k + 1].delta;
            while (b - a > tol) {
                double mid = 0.5 * (a + b);
                if ((g(mid) <= 0.0) == (ga <= 0.0)) a = mid;
                else b = mid;
            }
            res.threshold = 0.5 * (a + b);
            break;
        }
    }
    return res;
}

}  // namespace eszm
