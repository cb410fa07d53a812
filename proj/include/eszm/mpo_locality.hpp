#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "eszm/transfer_dense.hpp"

namespace eszm {

// Bi-index (a,y) -> a*N + y; physical pair (s,t) -> s*N + t.
// W[st](l, r) = sum_m R[(a,s),(a',m)] R[(m,y'),(t,y)] with l = (a,y), r = (a',y').
struct MpoBundle {
    int N = 0;
    std::vector<CMatrix> W;       // N^2 matrices of size N^2 x N^2
    std::vector<CMatrix> Dtilde;  // product-rule derivative of W at p/2
    CVector kPlusVec;             // (a,y) -> K+(p/2)[y,a]
    CVector kMinusVec;            // (a,y) -> K-(p/2)[a,y]
    CVector kMinusPrimeVec;       // (a,y) -> K-'(p/2)[a,y]
    cplx cFactor{1.0, 0.0};       // a1(p/2) a1(-p/2)

    // W / c and Dtilde / c
    std::vector<CMatrix> What() const;
    std::vector<CMatrix> Dhat() const;
};

// W tensor for a generic pair of R matrices at the same u.
std::vector<CMatrix> w_tensor(const CMatrix& Ra, const CMatrix& Rb, int N);

MpoBundle build_bundle(const ChainConfig& cfg);

// K+vec . W^{(x)L} . K-vec as a dense N^L x N^L operator (rows s, cols t).
CMatrix contract_chain(const CVector& left, const std::vector<CMatrix>& W, const CVector& right, int N, int L);

struct SectorBlock {
    std::vector<int> indices;  // positions in the N^4 doubled space
    CMatrix matrix;            // W-hat-cal restricted to the block
};

struct DoubledOperator {
    int N = 0;
    std::vector<SectorBlock> blocks;
    SpectrumResult spectrum;  // union of block spectra, vectors embedded in N^4
    int bellBlock = -1;       // block containing the support of Phi
    CVector topVector;
    cplx topEigenvalue{0.0, 0.0};
    bool usedPowerIteration = false;

    CMatrix dense() const;  // assembles the full N^4 x N^4 matrix
};

// Full matrix sum_st conj(What_st) (x) What_st (hatted, so Phi has eigenvalue N).
CMatrix doubled_matrix(const MpoBundle& bundle);
// Index-sum application of the doubled operator to a vector, v -> W v.
CVector apply_doubled(const MpoBundle& bundle, const CVector& v);
// Connected components of the sparsity graph of the doubled operator.
std::vector<std::vector<int>> doubled_sectors(const std::vector<CMatrix>& What, int N);

// withVectors = false skips eigenvectors of blocks other than the top one.
DoubledOperator doubled_operator(const MpoBundle& bundle, bool withVectors = true);

// Boundary vector D_j as an N^2 x N^2 matrix: rows bond index, cols (s,t).
enum class MiddleSumMethod { Direct, Eigen };
CMatrix boundary_vector_d(const MpoBundle& bundle, int L, int j, MiddleSumMethod method = MiddleSumMethod::Direct);

// sum_{m=0}^{count-1} A^m v
CVector power_sum(const CMatrix& A, const CVector& v, int count, MiddleSumMethod method);

struct FitResult {
    double alpha = 0.0;
    double intercept = 0.0;
    double rSquared = 0.0;
    int jStart = 0;
    int jEnd = 0;
    bool localized = false;  // alpha > 0 and rSquared >= 0.99
};

struct LocalityProfile {
    std::vector<double> normsSquared;  // normalized ||Psi_j||^2, j = 1..L
    std::vector<double> rawNorms;      // unnormalized, hatted units
    double normalization = 0.0;
    int clipped = 0;
    double maxImag = 0.0;
    FitResult fit;
};

enum class NormsMethod { Direct, Spectral };

struct ProfileOptions {
    int fitStart = 3;
    int fitEnd = -4;  // <= 0 means L + fitEnd
    NormsMethod method = NormsMethod::Direct;
};

LocalityProfile norms_profile(const ChainConfig& cfg, const ProfileOptions& opt = {});

FitResult fit_decay(const std::vector<double>& norms, int jStart, int jEnd);
FitResult fit_decay(const LocalityProfile& profile);

struct ScanRow {
    double delta = 0.0;
    double overlap = 0.0;         // |<Phi|top eigenvector>|
    double topModulus = 0.0;      // largest |lambda| of the Bell sector
    double deflatedRadius = 0.0;  // spectral radius of the Bell sector deflated by Phi
};

struct ScanResult {
    std::vector<ScanRow> rows;
    std::optional<double> threshold;
    int N = 0;
};

ScanRow scan_point(Series series, int n, double delta);
// Grid scan over [lo, hi] with step, then bisection of the deflated radius crossing N to tol.
ScanResult scan_delta_threshold(Series series, int n, double lo, double hi, double step, double tol = 1e-6);

}  // namespace eszm
