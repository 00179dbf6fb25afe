#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace limkl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

inline constexpr const char* version_string = "0.1.0";

// Thrown on bad inputs: dimension mismatches, invalid parameters,
// infeasible label configurations. CLI maps this to exit code 2.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an iterative solver exhausts its budget. Exit code 3.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File and stream failures. Exit code 4.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All-zero quadratic contributions: the simplex update has no direction.
struct degenerate_direction_error : validation_error {
  using validation_error::validation_error;
};

// PSD repair ran out of ridge budget.
struct irreparable_matrix_error : validation_error {
  using validation_error::validation_error;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 2;
inline constexpr int non_convergence = 3;
inline constexpr int io = 4;
}  // namespace exit_code

inline bool is_symmetric(const Matrix& a, double rtol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rtol * scale;
}

// Binary classification labels must be exactly {-1,+1} with both present.
inline void require_binary_labels(const IntVector& y) {
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] == 1)
      pos = true;
    else if (y[i] == -1)
      neg = true;
    else
      throw validation_error("labels must be -1 or +1, got " + std::to_string(y[i]));
  }
  if (!pos || !neg) throw validation_error("both classes must be present");
}

}  // namespace limkl
