#include "eszm/models_ed.hpp"

#include <cmath>
#include <stdexcept>

namespace eszm {

std::array<CMatrix, 9> gell_mann() {
    std::array<CMatrix, 9> g;
    for (auto& m : g) m = CMatrix::Zero(3, 3);
    g[0] = identity(3);
    g[1](0, 1) = g[1](1, 0) = 1.0;
    g[2](0, 1) = -kI;
    g[2](1, 0) = kI;
    g[3](0, 0) = 1.0;
    g[3](1, 1) = -1.0;
    g[4](0, 2) = g[4](2, 0) = 1.0;
    g[5](0, 2) = -kI;
    g[5](2, 0) = kI;
    g[6](1, 2) = g[6](2, 1) = 1.0;
    g[7](1, 2) = -kI;
    g[7](2, 1) = kI;
    const double r3 = 1.0 / std::sqrt(3.0);
    g[8](0, 0) = r3;
    g[8](1, 1) = r3;
    g[8](2, 2) = -2.0 * r3;
    return g;
}

std::array<CMatrix, 4> pauli() {
    std::array<CMatrix, 4> s;
    for (auto& m : s) m = CMatrix::Zero(2, 2);
    s[0] = identity(2);
    s[1](0, 1) = s[1](1, 0) = 1.0;
    s[2](0, 1) = -kI;
    s[2](1, 0) = kI;
    s[3](0, 0) = 1.0;
    s[3](1, 1) = -1.0;
    return s;
}

CMatrix sz_spin1() {
    CMatrix s = CMatrix::Zero(3, 3);
    s(0, 0) = 1.0;
    s(2, 2) = -1.0;
    return s;
}

IkCouplings ik_couplings(double D) {
    if (!(D > 1.0)) throw std::invalid_argument("IK couplings are complex for Delta <= 1");
    IkCouplings c;
    auto& l = c.lambda;
    l.setZero();
    const double r = std::sqrt(D * D - 1.0);
    const double s = std::sqrt(D - 1.0);  // printed as sqrt(Delta - 1) in the coupling list
    const double r3 = std::sqrt(3.0);
    for (int a : {1, 2, 6, 7}) l(a, a) = 2.0 * D - 1.0;
    l(3, 3) = D;
    l(4, 4) = l(5, 5) = 1.0;
    l(8, 8) = (4.0 * D * D + D - 2.0) / 3.0;
    l(6, 1) = l(7, 2) = (D - 1.0 + r) * std::pow(D + r, -1.5);
    l(1, 6) = l(2, 7) = -l(6, 1) * (D + r) * (D + r);
    l(0, 3) = (1.0 + 3.0 * s + D * (-5.0 + 4.0 * D - 4.0 * r)) / 3.0;
    l(3, 0) = (1.0 - 3.0 * s + D * (-5.0 + 4.0 * D + 4.0 * r)) / 3.0;
    l(0, 8) = (-1.0 + 9.0 * s + D * (5.0 - 4.0 * D - 12.0 * r)) / (3.0 * r3);
    l(8, 0) = (-1.0 - 9.0 * s + D * (5.0 - 4.0 * D + 12.0 * r)) / (3.0 * r3);
    l(3, 8) = (-1.0 + D * (-1.0 + 2.0 * D + 2.0 * r)) / r3;
    l(8, 3) = (1.0 + D - 2.0 * D * D * D - 2.0 * D * D * r) / (r3 * (D + r) * (D + r));
    c.J = -1.0 / (2.0 * (r + D - 1.0) * std::sqrt(r + D));
    return c;
}

CMatrix site_operator(const CMatrix& op, int j, int L) {
    const int d = static_cast<int>(op.rows());
    if (j < 0 || j >= L) throw std::out_of_range("site_operator: site out of range");
    CMatrix left = identity(static_cast<int>(std::pow(d, j)));
    CMatrix right = identity(static_cast<int>(std::pow(d, L - j - 1)));
    return kron(kron(left, op), right);
}

CMatrix two_site_operator(const CMatrix& a, const CMatrix& b, int j, int L) {
    const int d = static_cast<int>(a.rows());
    if (j < 0 || j + 1 >= L) throw std::out_of_range("two_site_operator: bond out of range");
    CMatrix left = identity(static_cast<int>(std::pow(d, j)));
    CMatrix right = identity(static_cast<int>(std::pow(d, L - j - 2)));
    return kron(kron(left, kron(a, b)), right);
}

CMatrix ik_hamiltonian(int L, double delta, const Fields9& leftFields, const Fields9& rightFields) {
    if (L < 2) throw std::invalid_argument("ik_hamiltonian: L must be >= 2");
    IkCouplings c = ik_couplings(delta);
    auto g = gell_mann();
    CMatrix bond = CMatrix::Zero(9, 9);
    for (int a = 0; a < 9; ++a)
        for (int b = 0; b < 9; ++b)
            if (c.lambda(a, b) != 0.0) bond += c.lambda(a, b) * kron(g[a], g[b]);
    bond *= c.J;
    const int D = static_cast<int>(std::pow(3, L));
    CMatrix H = CMatrix::Zero(D, D);
    for (int j = 0; j + 1 < L; ++j) {
        CMatrix left = identity(static_cast<int>(std::pow(3, j)));
        CMatrix right = identity(static_cast<int>(std::pow(3, L - j - 2)));
        H += kron(kron(left, bond), right);
    }
    CMatrix hl = CMatrix::Zero(3, 3), hr = CMatrix::Zero(3, 3);
    for (int a = 0; a < 9; ++a) {
        hl += leftFields[a] * g[a];
        hr += rightFields[a] * g[a];
    }
    H += site_operator(hl, 0, L) + site_operator(hr, L - 1, L);
    return H;
}

CMatrix xxz_hamiltonian(int L, double delta, const Fields3& hLeft, const Fields3& hRight) {
    if (L < 2) throw std::invalid_argument("xxz_hamiltonian: L must be >= 2");
    auto s = pauli();
    CMatrix bond = kron(s[1], s[1]) + kron(s[2], s[2]) + delta * kron(s[3], s[3]);
    const int D = 1 << L;
    CMatrix H = CMatrix::Zero(D, D);
    for (int j = 0; j + 1 < L; ++j) {
        CMatrix left = identity(1 << j);
        CMatrix right = identity(1 << (L - j - 2));
        H += kron(kron(left, bond), right);
    }
    CMatrix hl = CMatrix::Zero(2, 2), hr = CMatrix::Zero(2, 2);
    for (int a = 0; a < 3; ++a) {
        hl += hLeft[a] * s[a + 1];
        hr += hRight[a] * s[a + 1];
    }
    H += site_operator(hl, 0, L) + site_operator(hr, L - 1, L);
    return H;
}

CMatrix boundary_observable_ik() { return gell_mann()[4] - sz_spin1(); }

HermitianSpectrum diagonalize(const CMatrix& H) {
    if ((H - H.adjoint()).norm() > 1e-10 * std::max(H.norm(), 1e-300))
        throw std::invalid_argument("diagonalize: Hamiltonian is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    if (es.info() != Eigen::Success) throw std::runtime_error("diagonalize: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

EdRun autocorrelation(const HermitianSpectrum& spec, const CMatrix& O, const std::vector<double>& times) {
    const Eigen::Index D = spec.energies.size();
    CMatrix Ot = spec.vectors.adjoint() * O * spec.vectors;
    Eigen::MatrixXd w = Ot.cwiseAbs2();
    EdRun run;
    run.times = times;
    run.correlator.resize(times.size());
    double diag = w.diagonal().sum();
    for (size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        double re = diag, im = 0.0;
        for (Eigen::Index m = 0; m < D; ++m)
            for (Eigen::Index n = m + 1; n < D; ++n) {
                double ph = (spec.energies(m) - spec.energies(n)) * t;
                re += (w(m, n) + w(n, m)) * std::cos(ph);
                im += (w(m, n) - w(n, m)) * std::sin(ph);
            }
        run.correlator[k] = re / static_cast<double>(D);
        run.maxImag = std::max(run.maxImag, std::abs(im) / static_cast<double>(D));
    }
    if (!times.empty()) {
        const double tq = times.front() + 0.75 * (times.back() - times.front());
        run.plateau = window_mean(run, tq, times.back());
    }
    return run;
}

EdRun autocorrelation(const CMatrix& H, const CMatrix& O, const std::vector<double>& times) {
    return autocorrelation(diagonalize(H), O, times);
}

double dephased_average(const HermitianSpectrum& spec, const CMatrix& O, double gap) {
    const Eigen::Index D = spec.energies.size();
    CMatrix Ot = spec.vectors.adjoint() * O * spec.vectors;
    double total = 0.0;
    Eigen::Index start = 0;
    for (Eigen::Index k = 1; k <= D; ++k) {
        if (k == D || spec.energies(k) - spec.energies(k - 1) >= gap) {
            const Eigen::Index len = k - start;
            total += Ot.block(start, start, len, len).cwiseAbs2().sum();
            start = k;
        }
    }
    return total / static_cast<double>(D);
}

std::vector<double> time_grid(double tMax, double dt) {
    std::vector<double> t;
    const int n = static_cast<int>(std::llround(tMax / dt));
    for (int k = 0; k <= n; ++k) t.push_back(k * dt);
    return t;
}

double window_mean(const EdRun& run, double tFrom, double tTo) {
    double s = 0.0;
    int c = 0;
    for (size_t k = 0; k < run.times.size(); ++k)
        if (run.times[k] >= tFrom - 1e-12 && run.times[k] <= tTo + 1e-12) {
            s += run.correlator[k];
            ++c;
        }
    return c ? s / c : 0.0;
}

}  // namespace eszm
