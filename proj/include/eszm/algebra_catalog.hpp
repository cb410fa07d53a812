#pragma once

#include <string>
#include <vector>

#include "eszm/dual.hpp"
#include "eszm/tensor_core.hpp"

namespace eszm {

enum class Series { A1, A2odd, A2even, B1, C1, D1 };

Series parse_series(const std::string& name);  // a1, a2odd, a2even, b1, c1, d1
std::string series_name(Series s);

struct CouplingParams {
    cplx q{2.0, 0.0};
    cplx delta{1.25, 0.0};

    // q = Delta + sqrt(Delta^2 - 1) (principal root), inverted if |q| < 1.
    static CouplingParams from_delta(cplx delta);
    static CouplingParams from_q(cplx q);
};

struct SeriesSpec {
    Series series = Series::A1;
    int n = 2;
    int N = 2;
    CouplingParams params;
    cplx xi{0.0, 0.0};  // unused for A1
    cplx rho{0.0, 0.0};
    CMatrix M;                 // diagonal crossing matrix
    std::vector<double> bar;   // i-bar, 0-based position i holds bar(i+1)
    std::vector<int> eps;      // epsilon_i
    cplx period{0.0, 2.0 * kPi};

    cplx q() const { return params.q; }
    int prime(int j) const { return N - 1 - j; }  // 0-based j' = N - j + 1
};

SeriesSpec make_series_spec(Series series, int n, const CouplingParams& params);

// q^x = exp(x log q), principal log.
cplx qpow(cplx q, double x);

class RMatrixFn {
public:
    RMatrixFn() = default;
    explicit RMatrixFn(SeriesSpec spec) : spec_(std::move(spec)) {}

    const SeriesSpec& spec() const { return spec_; }
    int N() const { return spec_.N; }

    CMatrix evaluate(cplx u) const;    // N^2 x N^2, rows (out1,out2), cols (in1,in2)
    CMatrix derivative(cplx u) const;  // entrywise analytic d/du
    void evaluate_with_derivative(cplx u, CMatrix& value, CMatrix& deriv) const;

    cplx a1(cplx u) const;
    cplx a1_derivative(cplx u) const;

    // Test hook: multiplies the diagonal a1-type weight by (1 + eps).
    void set_mutation(double eps) { mutation_ = eps; }
    double mutation() const { return mutation_; }

private:
    template <class T>
    void assemble(T x, std::vector<T>& out) const;

    SeriesSpec spec_;
    double mutation_ = 0.0;
};

CTensor4 r_matrix(const RMatrixFn& fn, cplx u);
CTensor4 r_matrix_derivative(const RMatrixFn& fn, cplx u);

// R21 = P R12 P
CMatrix swap_spaces(const CMatrix& r12, int N);
// Partial transposes on the first or second space of an N^2 x N^2 operator.
CMatrix partial_transpose_1(const CMatrix& x, int N);
CMatrix partial_transpose_2(const CMatrix& x, int N);

double check_ybe(const RMatrixFn& fn, cplx u, cplx v);
double check_unitarity(const RMatrixFn& fn, cplx v);
double check_crossing(const RMatrixFn& fn, cplx u);
double check_periodicity(const RMatrixFn& fn, cplx u);
double check_regularity(const RMatrixFn& fn);

}  // namespace eszm
