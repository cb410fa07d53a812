#pragma once

#include "eszm/boundary_catalog.hpp"

namespace eszm {

struct ChainConfig {
    RMatrixFn rfn;
    BoundaryPair boundaries;
    int L = 4;

    const SeriesSpec& spec() const { return rfn.spec(); }
    int N() const { return rfn.N(); }
};

ChainConfig make_chain(Series series, int n, const CouplingParams& params, const BoundaryParams& bparams, int L);

// Throws std::length_error when N^L exceeds the dense limit (4096).
void check_dense_size(const ChainConfig& cfg);

CMatrix transfer_matrix(const ChainConfig& cfg, cplx u);
// Analytic product-rule derivative dT/du at arbitrary u.
void transfer_with_derivative(const ChainConfig& cfg, cplx u, CMatrix& T, CMatrix& dT);
CMatrix transfer_derivative_half_period(const ChainConfig& cfg);

struct EszmDense {
    CMatrix psi;
    double norm = 0.0;  // the normalization constant multiplying T'(p/2) minus its trace part
    bool traceless = true;
};

class TrivialModeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

EszmDense eszm_dense(const ChainConfig& cfg);

// Psi_j for 1-based site j.
CMatrix psi_j_dense(const ChainConfig& cfg, const EszmDense& eszm, int j);
CMatrix psi_j_dense(const CMatrix& psi, int N, int L, int j);

// N^{-(L-k)} Tr_{k+1..L}(op) (x) I
CMatrix trailing_reduce(const CMatrix& op, int N, int L, int k);

CMatrix hamiltonian_from_transfer(const ChainConfig& cfg);

double commutator_residual(const CMatrix& a, const CMatrix& b);  // ||[a,b]|| / (||a|| ||b||)

}  // namespace eszm
