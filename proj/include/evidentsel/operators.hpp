#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <stdexcept>
#include <vector>

#include "evidentsel/types.hpp"

namespace evsel {

enum class OpKind { Dense, Circulant, FourierMask, Sparse };

/// Real linear operator with an adjoint. Immutable after construction;
/// apply/adjoint are reentrant.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual OpKind kind() const = 0;

  virtual Vec apply(const Vec& x) const = 0;
  virtual Vec apply_adjoint(const Vec& y) const = 0;

  /// A^T A x. Subclasses override where a cheaper form exists.
  virtual Vec apply_gram(const Vec& x) const { return apply_adjoint(apply(x)); }

  /// Columnwise A^T A on a block; dense operators turn this into GEMM.
  virtual Mat apply_gram_block(const Mat& X) const {
    Mat out(cols(), X.cols());
    for (Index j = 0; j < X.cols(); ++j) out.col(j) = apply_gram(X.col(j));
    return out;
  }

 protected:
  void check_apply_dim(const Vec& x) const {
    if (x.size() != cols()) throw std::invalid_argument("operator apply: dimension mismatch");
  }
  void check_adjoint_dim(const Vec& y) const {
    if (y.size() != rows()) throw std::invalid_argument("operator adjoint: dimension mismatch");
  }
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class DenseOperator final : public LinearOperator {
 public:
  explicit DenseOperator(Mat a);

  Index rows() const override { return a_.rows(); }
  Index cols() const override { return a_.cols(); }
  OpKind kind() const override { return OpKind::Dense; }

  Vec apply(const Vec& x) const override;
  Vec apply_adjoint(const Vec& y) const override;
  Vec apply_gram(const Vec& x) const override;
  Mat apply_gram_block(const Mat& X) const override;

  const Mat& matrix() const { return a_; }

 private:
  Mat a_;
  Mat gram_;  // A^T A, precomputed
};

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(Index n) : n_(n) {}

  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  OpKind kind() const override { return OpKind::Circulant; }

  Vec apply(const Vec& x) const override {
    check_apply_dim(x);
    return x;
  }
  Vec apply_adjoint(const Vec& y) const override {
    check_adjoint_dim(y);
    return y;
  }
  Vec apply_gram(const Vec& x) const override {
    check_apply_dim(x);
    return x;
  }
  Mat apply_gram_block(const Mat& X) const override { return X; }

 private:
  Index n_;
};

/// Circulant matrix C with C(j,k) = c[(j-k) mod n]; apply is circular
/// convolution with the first column, evaluated through the DFT.
class CirculantOperator final : public LinearOperator {
 public:
  explicit CirculantOperator(Vec first_column);

  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  OpKind kind() const override { return OpKind::Circulant; }

  Vec apply(const Vec& x) const override;
  Vec apply_adjoint(const Vec& y) const override;
  Vec apply_gram(const Vec& x) const override;

  const Vec& first_column() const { return col_; }
  /// Eigenvalues in the F-diagonalization C = F^{-1} diag(spectrum) F.
  const CVec& spectrum() const { return spectrum_; }

 private:
  Index n_;
  Vec col_;
  CVec spectrum_;
  Vec spectrum_sq_;
};

/// 2D circular convolution on n x n images (flattened row-major).
class Circulant2DOperator final : public LinearOperator {
 public:
  explicit Circulant2DOperator(Mat kernel);

  Index rows() const override { return n_ * n_; }
  Index cols() const override { return n_ * n_; }
  OpKind kind() const override { return OpKind::Circulant; }

  Vec apply(const Vec& x) const override;
  Vec apply_adjoint(const Vec& y) const override;
  Vec apply_gram(const Vec& x) const override;

  Index side() const { return n_; }
  const CVec& spectrum() const { return spectrum_; }

 private:
  Index n_;
  CVec spectrum_;
  Vec spectrum_sq_;
};

/// Order-r circular finite difference on n points: T_r = T_1^r, row stencil
/// [-1, 1] with wraparound for r = 1. Applied as r sweeps of first
/// differences, O(rn).
class FDRegularizer1D final : public LinearOperator {
 public:
  FDRegularizer1D(int order, Index n);

  Index rows() const override { return n_; }
  Index cols() const override { return n_; }
  OpKind kind() const override { return OpKind::Circulant; }

  Vec apply(const Vec& x) const override;
  Vec apply_adjoint(const Vec& y) const override;
  Vec apply_gram(const Vec& x) const override;
  Mat apply_gram_block(const Mat& X) const override;

  int order() const { return order_; }

 private:
  int order_;
  Index n_;
};

/// Stacked 2D regularizer [T_r (x) I ; I (x) T_r] on n x n images:
/// order-r differences along both axes, output length 2n^2.
class FDRegularizer2D final : public LinearOperator {
 public:
  FDRegularizer2D(int order, Index n);

  Index rows() const override { return 2 * n_ * n_; }
  Index cols() const override { return n_ * n_; }
  OpKind kind() const override { return OpKind::Sparse; }

  Vec apply(const Vec& x) const override;
  Vec apply_adjoint(const Vec& y) const override;
  Vec apply_gram(const Vec& x) const override;
  Mat apply_gram_block(const Mat& X) const override;

  int order() const { return order_; }
  Index side() const { return n_; }

 private:
  int order_;
  Index n_;
};

/// Sampling of DFT rows, in the real stacked form
/// u -> [Re((F u)_S); Im((F u)_S)] so that the real least-squares misfit
/// equals the complex one. F is the unitary DFT (2D when dims == 2).
class FourierMaskOperator final : public LinearOperator {
 public:
  FourierMaskOperator(Index n, std::vector<Index> mask_indices, int dims = 1);

  Index rows() const override { return 2 * static_cast<Index>(mask_.size()); }
  Index cols() const override { return n_total_; }
  OpKind kind() const override { return OpKind::FourierMask; }

  Vec apply(const Vec& x) const override;
  Vec apply_adjoint(const Vec& y) const override;

  const std::vector<Index>& mask() const { return mask_; }
  int dims() const { return dims_; }
  Index side() const { return n_; }

 private:
  CVec forward_full(const Vec& x) const;

  Index n_;
  Index n_total_;
  int dims_;
  std::vector<Index> mask_;
};

class SparseOperator final : public LinearOperator {
 public:
  explicit SparseOperator(Eigen::SparseMatrix<double> a) : a_(std::move(a)) {
    a_.makeCompressed();
  }

  Index rows() const override { return a_.rows(); }
  Index cols() const override { return a_.cols(); }
  OpKind kind() const override { return OpKind::Sparse; }

  Vec apply(const Vec& x) const override {
    check_apply_dim(x);
    return a_ * x;
  }
  Vec apply_adjoint(const Vec& y) const override {
    check_adjoint_dim(y);
    return a_.transpose() * y;
  }

  const Eigen::SparseMatrix<double>& matrix() const { return a_; }

 private:
  Eigen::SparseMatrix<double> a_;
};

struct FDRegularizerSpec {
  int order = 1;
  Index n = 0;  // grid size per axis
  int dims = 1;
};

/// Requires n > 2r (the eigenvalue identities assume it).
OperatorPtr make_fd_regularizer(const FDRegularizerSpec& spec);

/// Periodized, l1-normalized Gaussian kernel centered at index 0.
/// omega <= 0 degenerates to the identity kernel (delta at 0).
Vec make_gaussian_psf(Index n, double omega);
Mat make_gaussian_psf_2d(Index n, double omega);

struct RadonSpec {
  Index n = 0;                    // image side
  std::vector<double> angles_deg;
  Index detector_count = 0;       // bins spaced one pixel apart, centered
};

/// Parallel-beam Radon system matrix from exact ray-pixel intersection
/// lengths. Row layout is angle-major: row = angle_index * detector_count + bin.
std::shared_ptr<const SparseOperator> make_radon(const RadonSpec& spec);

/// Brute-force materialization (apply on basis vectors); test/oracle use.
Mat materialize(const LinearOperator& op);

}  // namespace evsel
