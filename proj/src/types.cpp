#include "hamflow/types.hpp"

namespace hamflow {

Matrix symplectic_matrix(int m) {
    Matrix J = Matrix::Zero(2 * m, 2 * m);
    J.topRightCorner(m, m) = -Matrix::Identity(m, m);
    J.bottomLeftCorner(m, m) = Matrix::Identity(m, m);
    return J;
}

Matrix swap_matrix(int m) {
    Matrix N = Matrix::Zero(2 * m, 2 * m);
    N.topRightCorner(m, m) = Matrix::Identity(m, m);
    N.bottomLeftCorner(m, m) = Matrix::Identity(m, m);
    return N;
}

} // namespace hamflow
