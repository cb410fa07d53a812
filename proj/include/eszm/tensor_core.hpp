#pragma once

#include <array>
#include <complex>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace eszm {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline const cplx kI{0.0, 1.0};

// Rank-4 tensor T[o1,o2,i1,i2]; rows (o1,o2) and columns (i1,i2) flattened
// lexicographically, 0-based: (k1,k2) -> k1*d2 + k2.
struct CTensor4 {
    std::array<int, 4> dims{0, 0, 0, 0};
    std::vector<cplx> data;

    CTensor4() = default;
    explicit CTensor4(std::array<int, 4> d);

    cplx& operator()(int o1, int o2, int i1, int i2);
    cplx operator()(int o1, int o2, int i1, int i2) const;

    CMatrix to_matrix() const;
    static CTensor4 from_matrix(const CMatrix& m, std::array<int, 4> d);
};

enum class Conditioning { WellConditioned, NearDefective };

struct SpectrumResult {
    CVector eigenvalues;  // descending modulus
    CMatrix vectors;      // right eigenvectors, columns in eigenvalue order
    Conditioning condition = Conditioning::WellConditioned;
    double eigvecCondition = 1.0;  // 2-norm condition number of the eigenvector matrix
};

CMatrix kron(const CMatrix& a, const CMatrix& b);
CMatrix identity(int dim);

// Elementary matrix E_ij (0-based).
CMatrix elementary(int N, int i, int j);

// Permutation operator on C^N (x) C^N.
CMatrix permutation(int N);

// Partial trace over the listed 0-based sites. Remaining sites keep their order.
CMatrix partial_trace(const CMatrix& op, const std::vector<int>& siteDims,
                      const std::set<int>& traced);

// N^{-L} Tr(a^dag b).
cplx hs_inner(const CMatrix& a, const CMatrix& b, int L, int N);

double max_abs(const CMatrix& a);

// ||A - cB||_F / ||A||_F with c = Tr(B^dag A)/Tr(B^dag B).
double proportionality_residual(const CMatrix& a, const CMatrix& b);

SpectrumResult eig_general(const CMatrix& a);
SpectrumResult eig_hermitian(const CMatrix& h);

// Dominant eigenpair by power iteration; vector normalized as in eig_general.
std::pair<cplx, CVector> power_iteration(const CMatrix& a, int maxIter = 20000,
                                         double tol = 1e-13);

// Unit 2-norm, first entry with modulus > 1e-12 made real positive.
void normalize_phase(CVector& v);

}  // namespace eszm
