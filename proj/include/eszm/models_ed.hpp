#pragma once

#include <array>
#include <vector>

#include "eszm/tensor_core.hpp"

namespace eszm {

// I^0 = identity, then the standard eight Gell-Mann matrices in the basis (|+1>, |0>, |-1>).
std::array<CMatrix, 9> gell_mann();
// sigma^0 = identity, sigma^x, sigma^y, sigma^z
std::array<CMatrix, 4> pauli();
CMatrix sz_spin1();

struct IkCouplings {
    Eigen::Matrix<double, 9, 9> lambda;
    double J = 0.0;
};

IkCouplings ik_couplings(double delta);

// op acting on 0-based site j of an L-site chain with local dimension d
CMatrix site_operator(const CMatrix& op, int j, int L);
CMatrix two_site_operator(const CMatrix& a, const CMatrix& b, int j, int L);

using Fields9 = std::array<double, 9>;
using Fields3 = std::array<double, 3>;

CMatrix ik_hamiltonian(int L, double delta, const Fields9& leftFields, const Fields9& rightFields);
CMatrix xxz_hamiltonian(int L, double delta, const Fields3& hLeft, const Fields3& hRight);

// I^4 - S^z on a single spin-1 site
CMatrix boundary_observable_ik();

struct EdRun {
    std::vector<double> times;
    std::vector<double> correlator;
    double maxImag = 0.0;
    double plateau = 0.0;  // mean over the last quartile of the grid
};

struct HermitianSpectrum {
    Eigen::VectorXd energies;
    CMatrix vectors;
};

HermitianSpectrum diagonalize(const CMatrix& H);

// C(t) = d^{-1} Tr(O(t) O), d = dim H
EdRun autocorrelation(const CMatrix& H, const CMatrix& O, const std::vector<double>& times);
EdRun autocorrelation(const HermitianSpectrum& spec, const CMatrix& O, const std::vector<double>& times);

// Exact infinite-time average: eigenvalues closer than gap share a block.
double dephased_average(const HermitianSpectrum& spec, const CMatrix& O, double gap = 1e-10);

std::vector<double> time_grid(double tMax, double dt);
double window_mean(const EdRun& run, double tFrom, double tTo);

}  // namespace eszm
