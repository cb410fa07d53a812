#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "eszm/algebra_catalog.hpp"

namespace eszm {

using BetaMap = std::map<std::string, cplx>;  // keys "1,1", "2,2", "i,i'"

struct BoundaryParams {
    BetaMap betaMinus;
    BetaMap betaPlus;
};

class PoleError : public std::runtime_error {
public:
    PoleError(const std::string& what, cplx u) : std::runtime_error(what), u_(u) {}
    cplx u() const { return u_; }

private:
    cplx u_;
};

// Keys admitted by the K-matrix template of a series.
std::vector<std::string> template_keys(Series s, int n);
void validate_betas(Series s, int n, const BetaMap& betas);

// K-(u | beta) from the catalog templates; the derivative overload fills dK/du.
CMatrix k_template(const SeriesSpec& spec, const BetaMap& betas, cplx u);
void k_template(const SeriesSpec& spec, const BetaMap& betas, cplx u, CMatrix& value, CMatrix& deriv);

class BoundaryPair {
public:
    BoundaryPair() = default;
    BoundaryPair(SeriesSpec spec, BoundaryParams bparams);

    const SeriesSpec& spec() const { return spec_; }
    const BoundaryParams& params() const { return bparams_; }

    CMatrix k_minus(cplx u) const;
    CMatrix k_minus_derivative(cplx u) const;
    // (K-(-u - rho | beta+))^T M
    CMatrix k_plus(cplx u) const;
    CMatrix k_plus_derivative(cplx u) const;

private:
    SeriesSpec spec_;
    BoundaryParams bparams_;
};

CMatrix k_minus(const BoundaryPair& pair, cplx u);
CMatrix k_plus(const BoundaryPair& pair, cplx u);

// Recovers K-(w | beta+) from K+ by inverting the isomorphism: K-(w) = (K+(-w - rho) M^{-1})^T.
CMatrix k_minus_from_plus(const BoundaryPair& pair, cplx w);

// Sklyanin reflection equation residual for K- (optionally the shifted K-(u + p/2)).
double check_sre(const RMatrixFn& fn, const BoundaryPair& pair, cplx u, cplx v, bool shifted = false);
double check_k_regularity(const BoundaryPair& pair);
double check_half_period(const BoundaryPair& pair);
// R0j(p/2 + v) K-_0(p/2) Rj0(p/2 - v) proportional to identity.
double check_pull_through(const RMatrixFn& fn, const BoundaryPair& pair, cplx v);

// (1/N)(sum_j |j,j>) (x) (sum_j |j,j>), length N^4.
CVector bell_state(int N);

// Bi-index vector of K+(p/2): entry (a,y) = K+[y,a].
CVector k_plus_vector(const BoundaryPair& pair);

struct BellData {
    CVector phi;
    CVector kDual;  // <K| components K+vec (x) K+vec
    cplx overlap{0.0, 0.0};
};

BellData bell_data(const BoundaryPair& pair);
cplx orthogonality(const BoundaryPair& pair);

// |Tr K+(p/2)| / (N max_i |K+_ii(p/2)|)
double relative_trace_k_plus(const BoundaryPair& pair);

// beta+_{11} values that make Tr K+(p/2) = 0 for each series (all admissible choices).
std::vector<cplx> constrained_beta_plus(Series s, int n, cplx q);

}  // namespace eszm
