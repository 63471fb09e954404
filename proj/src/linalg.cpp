#include "qlab/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace qlab {

cplx det_id_plus(const MatC& a) {
    MatC m = MatC::Identity(a.rows(), a.cols()) + a;
    Eigen::PartialPivLU<MatC> lu(m);
    return lu.determinant();
}

MatR expm(const MatR& a) { return a.exp(); }

VecC eigenvalues(const MatC& a) {
    Eigen::ComplexEigenSolver<MatC> es(a, /*computeEigenvectors=*/false);
    return es.eigenvalues();
}

std::vector<cplx> elementary_symmetric(const VecC& vals, int kmax) {
    std::vector<cplx> e(static_cast<size_t>(kmax) + 1, cplx(0.0));
    e[0] = 1.0;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        int top = std::min<int>(kmax, static_cast<int>(i) + 1);
        for (int k = top; k >= 1; --k) e[k] += vals[i] * e[k - 1];
    }
    return e;
}

cplx log_gamma(cplx z) {
    static const double g = 7.0;
    static const double c[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (z.real() < 0.5) {
        // Reflection: log G(z) = log(pi / sin(pi z)) - log G(1 - z).
        return std::log(PI) - log_sin_pi(z) - log_gamma(cplx(1.0) - z);
    }
    z -= 1.0;
    cplx x = c[0];
    for (int i = 1; i < 9; ++i) x += c[i] / (z + static_cast<double>(i));
    cplx t = z + g + 0.5;
    return 0.5 * std::log(2.0 * PI) + (z + 0.5) * std::log(t) - t + std::log(x);
}

}  // namespace qlab
