#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace qmh::linalg {

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
  double* row(std::size_t i) { return a.data() + i * cols; }
  const double* row(std::size_t i) const { return a.data() + i * cols; }

  static Matrix identity(std::size_t n);
};

Matrix matmul(const Matrix& A, const Matrix& B);
Matrix transpose(const Matrix& A);
double max_abs_diff(const Matrix& A, const Matrix& B);

// Symmetric packed upper-triangle indexing, row-major: (0,0),(0,1),...,(1,1),...
inline std::size_t packed_size(std::size_t n) { return n * (n + 1) / 2; }
inline std::size_t packed_index(std::size_t i, std::size_t j, std::size_t n) {
  // requires i <= j < n
  return i * n - i * (i + 1) / 2 + j;
}
// inverse of packed_index
std::pair<std::size_t, std::size_t> packed_coords(std::size_t p, std::size_t n);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// vectors.row(k) is the eigenvector for values[k]; A = V^T diag(values) V.
struct SymEig {
  std::vector<double> values;
  Matrix vectors;
};
SymEig jacobi_eigensym(const Matrix& A, int max_sweeps = 50, double tol = 1e-13);

double min_eigenvalue(const Matrix& A);

// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped to zero).
// Returns the most negative eigenvalue found before clipping.
double psd_clip(Matrix& A);

// Lower-triangular Cholesky factor stored by rows; supports appending a
// bordered row/column and symmetric rank-one updates, so a factor of a
// growing SPD matrix never has to be rebuilt.
class GrowingCholesky {
 public:
  std::size_t size() const { return rows_.size(); }
  // Append row (m12, m22) of the bordered matrix [[M, m12],[m12^T, m22]].
  // Returns false (and leaves the factor unchanged) if the pivot falls
  // below rel_tol * m22, i.e. the bordered matrix is not numerically PD.
  bool border(const std::vector<double>& m12, double m22, double rel_tol = 1e-13);
  // M <- M + v v^T
  void rank1_update(std::vector<double> v);
  void solve_lower(std::vector<double>& x) const;  // L x = b in place
  void solve_upper(std::vector<double>& x) const;  // L^T x = b in place
  void solve(std::vector<double>& x) const;        // M x = b in place

 private:
  std::vector<std::vector<double>> rows_;
};

// Sparse linear functional on symmetric n x n matrices, stored as packed
// upper-triangle coefficients: f(X) = sum c_ij X_ij over stored (i<=j).
// Matrix representative F has F_ii = c_ii, F_ij = F_ji = c_ij / 2.
struct SparseFunctional {
  std::vector<std::pair<std::size_t, double>> c; // sorted by packed index
  void add(std::size_t packed_idx, double v);    // accumulate, then finalize()
  void finalize();                               // sort + merge duplicates
};

double functional_norm2(const SparseFunctional& f, std::size_t n);
double functional_dot(const SparseFunctional& f, const SparseFunctional& g, std::size_t n);
double apply_functional(const SparseFunctional& f, const Matrix& X);
// X += w * F
void accumulate_functional(const SparseFunctional& f, double w, Matrix& X);

// A growing family of functionals with least-squares machinery over its
// span. Used for exact affine projections, range tests and certificate
// fitting in the feasibility solvers.
class FunctionalSpan {
 public:
  explicit FunctionalSpan(std::size_t matrix_side, double rank_tol = 1e-12);

  // Adds a functional (normalized internally); returns its index.
  std::size_t add(const SparseFunctional& f);

  std::size_t size() const { return norms_.size(); }
  std::size_t rank() const { return indep_.size(); }
  std::size_t matrix_side() const { return side_; }
  double norm_of(std::size_t e) const { return norms_[e]; }
  const SparseFunctional& normalized(std::size_t e) const { return funcs_[e]; }

  // Least-squares coefficients y (over the independent subset) minimizing
  // ||C y - t|| where C is the cross-Gram of all members vs independents.
  std::vector<double> lstsq_coeffs(const std::vector<double>& t) const;
  // C y: predicted functional values for every member.
  std::vector<double> predict(const std::vector<double>& y) const;
  // t - C lstsq(t): zero iff t is realizable as (f_e(X))_e for some X.
  std::vector<double> range_residual(const std::vector<double>& t) const;

  // X += sum_j y_j F_indep(j)
  void accumulate_combination(const std::vector<double>& y, Matrix& X) const;
  // Multipliers over all members realizing the same combination (zeros on
  // dependent members).
  std::vector<double> expand_to_members(const std::vector<double>& y) const;

  // f_e(X) for every member e (values of the *normalized* functionals).
  std::vector<double> evaluate_all(const Matrix& X) const;
  double value_of(std::size_t e, const Matrix& X) const;

  // Coefficients over the independents whose combination is the matrix-space
  // projection of a target with member values t_all (Gram solve, not the
  // coordinate-space least squares).
  std::vector<double> lstsq_matrix_coeffs(const std::vector<double>& t_all) const;

 private:
  struct DecodedEntry {
    std::size_t flat, mirror;
    double c;
  };

  std::size_t side_;
  double rank_tol_;
  std::vector<SparseFunctional> funcs_; // normalized
  std::vector<double> norms_;           // original Frobenius norms
  std::vector<std::vector<DecodedEntry>> dec_;
  std::vector<std::size_t> indep_;
  std::vector<std::vector<double>> cross_; // C columns: cross_[j][e] = <F_e, F_indep(j)>
  GrowingCholesky gram_indep_;             // Gram of independents
  GrowingCholesky ctc_;                    // C^T C
  std::vector<double> dense_scratch_;      // packed dense staging for adds

  std::vector<double> cT(const std::vector<double>& t) const;
};

// Gram-Schmidt with reorthogonalization; columns of V (n x k) are replaced
// by an orthonormal basis of their span (rank columns kept). Returns rank.
std::size_t orthonormalize_columns(Matrix& V, double rel_tol = 1e-10);

} // namespace qmh::linalg
