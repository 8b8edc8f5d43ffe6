#ifndef HAMFLOW_TYPES_HPP
#define HAMFLOW_TYPES_HPP

#include <Eigen/Dense>

namespace hamflow {

using Real = double;
using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;
using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

/// Antisymmetric structure matrix J = [[0, -I_m], [I_m, 0]] (2m x 2m).
/// Satisfies J^2 = -I and J*N = -N*J with the swap matrix below.
Matrix symplectic_matrix(int m);

/// Symmetric swap matrix N = [[0, I_m], [I_m, 0]] (2m x 2m), N^2 = I.
Matrix swap_matrix(int m);

} // namespace hamflow

#endif
