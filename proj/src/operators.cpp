#include "evidentsel/operators.hpp"

#include <algorithm>
#include <cmath>

#include "evidentsel/dft.hpp"

namespace evsel {

namespace {

constexpr double kPi = 3.14159265358979323846;

// One circular first-difference sweep in place: v_i <- v_{i+1} - v_i.
void diff_sweep(Vec& v) {
  const Index n = v.size();
  const double first = v[0];
  for (Index i = 0; i + 1 < n; ++i) v[i] = v[i + 1] - v[i];
  v[n - 1] = first - v[n - 1];
}

// Adjoint sweep: v_i <- v_{i-1} - v_i (indices mod n).
void diff_sweep_adjoint(Vec& v) {
  const Index n = v.size();
  const double last = v[n - 1];
  for (Index i = n - 1; i > 0; --i) v[i] = v[i - 1] - v[i];
  v[0] = last - v[0];
}

void diff_order(Vec& v, int order) {
  for (int r = 0; r < order; ++r) diff_sweep(v);
}

void diff_order_adjoint(Vec& v, int order) {
  for (int r = 0; r < order; ++r) diff_sweep_adjoint(v);
}

}  // namespace

// ---------------------------------------------------------------------------
// DenseOperator

DenseOperator::DenseOperator(Mat a) : a_(std::move(a)) {
  gram_.noalias() = a_.transpose() * a_;
}

Vec DenseOperator::apply(const Vec& x) const {
  check_apply_dim(x);
  return a_ * x;
}

Vec DenseOperator::apply_adjoint(const Vec& y) const {
  check_adjoint_dim(y);
  return a_.transpose() * y;
}

Vec DenseOperator::apply_gram(const Vec& x) const {
  check_apply_dim(x);
  return gram_ * x;
}

Mat DenseOperator::apply_gram_block(const Mat& X) const { return gram_ * X; }

// ---------------------------------------------------------------------------
// CirculantOperator

CirculantOperator::CirculantOperator(Vec first_column)
    : n_(first_column.size()), col_(std::move(first_column)) {
  if (n_ == 0) throw std::invalid_argument("circulant: empty first column");
  spectrum_ = dft_unnormalized(col_);
  spectrum_sq_ = spectrum_.cwiseAbs2();
}

Vec CirculantOperator::apply(const Vec& x) const {
  check_apply_dim(x);
  return ifft_real(CVec(spectrum_.cwiseProduct(fft(x))));
}

Vec CirculantOperator::apply_adjoint(const Vec& y) const {
  check_adjoint_dim(y);
  return ifft_real(CVec(spectrum_.conjugate().cwiseProduct(fft(y))));
}

Vec CirculantOperator::apply_gram(const Vec& x) const {
  check_apply_dim(x);
  return ifft_real(CVec(spectrum_sq_.cast<Complex>().cwiseProduct(fft(x))));
}

// ---------------------------------------------------------------------------
// Circulant2DOperator

Circulant2DOperator::Circulant2DOperator(Mat kernel) : n_(kernel.rows()) {
  if (kernel.rows() != kernel.cols() || n_ == 0)
    throw std::invalid_argument("circulant2d: kernel must be square and nonempty");
  Vec flat(n_ * n_);
  for (Index r = 0; r < n_; ++r)
    for (Index c = 0; c < n_; ++c) flat[r * n_ + c] = kernel(r, c);
  spectrum_ = dft2_unnormalized(flat, n_, n_);
  spectrum_sq_ = spectrum_.cwiseAbs2();
}

Vec Circulant2DOperator::apply(const Vec& x) const {
  check_apply_dim(x);
  return ifft2_real(CVec(spectrum_.cwiseProduct(fft2(x, n_, n_))), n_, n_);
}

Vec Circulant2DOperator::apply_adjoint(const Vec& y) const {
  check_adjoint_dim(y);
  return ifft2_real(CVec(spectrum_.conjugate().cwiseProduct(fft2(y, n_, n_))), n_, n_);
}

Vec Circulant2DOperator::apply_gram(const Vec& x) const {
  check_apply_dim(x);
  return ifft2_real(CVec(spectrum_sq_.cast<Complex>().cwiseProduct(fft2(x, n_, n_))), n_, n_);
}

// ---------------------------------------------------------------------------
// FDRegularizer1D

FDRegularizer1D::FDRegularizer1D(int order, Index n) : order_(order), n_(n) {
  if (order < 1) throw std::invalid_argument("fd regularizer: order must be >= 1");
  if (n <= 2 * order) throw std::invalid_argument("fd regularizer: requires n > 2r");
}

Vec FDRegularizer1D::apply(const Vec& x) const {
  check_apply_dim(x);
  Vec v = x;
  diff_order(v, order_);
  return v;
}

Vec FDRegularizer1D::apply_adjoint(const Vec& y) const {
  check_adjoint_dim(y);
  Vec v = y;
  diff_order_adjoint(v, order_);
  return v;
}

Vec FDRegularizer1D::apply_gram(const Vec& x) const {
  check_apply_dim(x);
  Vec v = x;
  diff_order(v, order_);
  diff_order_adjoint(v, order_);
  return v;
}

Mat FDRegularizer1D::apply_gram_block(const Mat& X) const {
  Mat out = X;
  Vec col(n_);
  for (Index j = 0; j < X.cols(); ++j) {
    col = out.col(j);
    diff_order(col, order_);
    diff_order_adjoint(col, order_);
    out.col(j) = col;
  }
  return out;
}

// ---------------------------------------------------------------------------
// FDRegularizer2D

FDRegularizer2D::FDRegularizer2D(int order, Index n) : order_(order), n_(n) {
  if (order < 1) throw std::invalid_argument("fd regularizer: order must be >= 1");
  if (n <= 2 * order) throw std::invalid_argument("fd regularizer: requires n > 2r");
}

Vec FDRegularizer2D::apply(const Vec& x) const {
  check_apply_dim(x);
  Vec out(2 * n_ * n_);
  Vec line(n_);
  // differences along rows (x direction)
  for (Index r = 0; r < n_; ++r) {
    for (Index c = 0; c < n_; ++c) line[c] = x[r * n_ + c];
    diff_order(line, order_);
    for (Index c = 0; c < n_; ++c) out[r * n_ + c] = line[c];
  }
  // differences along columns (y direction)
  for (Index c = 0; c < n_; ++c) {
    for (Index r = 0; r < n_; ++r) line[r] = x[r * n_ + c];
    diff_order(line, order_);
    for (Index r = 0; r < n_; ++r) out[n_ * n_ + r * n_ + c] = line[r];
  }
  return out;
}

Vec FDRegularizer2D::apply_adjoint(const Vec& y) const {
  check_adjoint_dim(y);
  Vec out = Vec::Zero(n_ * n_);
  Vec line(n_);
  for (Index r = 0; r < n_; ++r) {
    for (Index c = 0; c < n_; ++c) line[c] = y[r * n_ + c];
    diff_order_adjoint(line, order_);
    for (Index c = 0; c < n_; ++c) out[r * n_ + c] += line[c];
  }
  for (Index c = 0; c < n_; ++c) {
    for (Index r = 0; r < n_; ++r) line[r] = y[n_ * n_ + r * n_ + c];
    diff_order_adjoint(line, order_);
    for (Index r = 0; r < n_; ++r) out[r * n_ + c] += line[r];
  }
  return out;
}

Vec FDRegularizer2D::apply_gram(const Vec& x) const {
  check_apply_dim(x);
  Vec out = Vec::Zero(n_ * n_);
  Vec line(n_);
  for (Index r = 0; r < n_; ++r) {
    for (Index c = 0; c < n_; ++c) line[c] = x[r * n_ + c];
    diff_order(line, order_);
    diff_order_adjoint(line, order_);
    for (Index c = 0; c < n_; ++c) out[r * n_ + c] += line[c];
  }
  for (Index c = 0; c < n_; ++c) {
    for (Index r = 0; r < n_; ++r) line[r] = x[r * n_ + c];
    diff_order(line, order_);
    diff_order_adjoint(line, order_);
    for (Index r = 0; r < n_; ++r) out[r * n_ + c] += line[r];
  }
  return out;
}

Mat FDRegularizer2D::apply_gram_block(const Mat& X) const {
  Mat out(cols(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) out.col(j) = apply_gram(X.col(j));
  return out;
}

// ---------------------------------------------------------------------------
// FourierMaskOperator

FourierMaskOperator::FourierMaskOperator(Index n, std::vector<Index> mask_indices, int dims)
    : n_(n), dims_(dims), mask_(std::move(mask_indices)) {
  if (dims != 1 && dims != 2) throw std::invalid_argument("fourier mask: dims must be 1 or 2");
  n_total_ = (dims == 1) ? n : n * n;
  std::sort(mask_.begin(), mask_.end());
  if (std::adjacent_find(mask_.begin(), mask_.end()) != mask_.end())
    throw std::invalid_argument("fourier mask: duplicate indices");
  if (mask_.empty() || mask_.front() < 0 || mask_.back() >= n_total_)
    throw std::invalid_argument("fourier mask: indices out of range");
}

CVec FourierMaskOperator::forward_full(const Vec& x) const {
  return (dims_ == 1) ? fft(x) : fft2(x, n_, n_);
}

Vec FourierMaskOperator::apply(const Vec& x) const {
  check_apply_dim(x);
  const CVec xf = forward_full(x);
  const Index m = static_cast<Index>(mask_.size());
  Vec out(2 * m);
  for (Index i = 0; i < m; ++i) {
    out[i] = xf[mask_[i]].real();
    out[m + i] = xf[mask_[i]].imag();
  }
  return out;
}

Vec FourierMaskOperator::apply_adjoint(const Vec& y) const {
  check_adjoint_dim(y);
  const Index m = static_cast<Index>(mask_.size());
  CVec embedded = CVec::Zero(n_total_);
  for (Index i = 0; i < m; ++i) embedded[mask_[i]] = Complex(y[i], y[m + i]);
  return (dims_ == 1) ? ifft_real(embedded) : ifft2_real(embedded, n_, n_);
}

// ---------------------------------------------------------------------------
// Factories

OperatorPtr make_fd_regularizer(const FDRegularizerSpec& spec) {
  if (spec.dims == 1) return std::make_shared<FDRegularizer1D>(spec.order, spec.n);
  if (spec.dims == 2) return std::make_shared<FDRegularizer2D>(spec.order, spec.n);
  throw std::invalid_argument("fd regularizer: dims must be 1 or 2");
}

Vec make_gaussian_psf(Index n, double omega) {
  if (n < 1) throw std::invalid_argument("gaussian psf: n must be positive");
  Vec k = Vec::Zero(n);
  if (omega <= 0.0) {
    k[0] = 1.0;
    return k;
  }
  // Periodize by summing the aliased tails.
  for (Index i = 0; i < n; ++i) {
    double v = 0.0;
    for (int alias = -3; alias <= 3; ++alias) {
      const double d = static_cast<double>(i) + alias * static_cast<double>(n);
      v += std::exp(-0.5 * d * d / (omega * omega));
    }
    k[i] = v;
  }
  k /= k.sum();
  return k;
}

Mat make_gaussian_psf_2d(Index n, double omega) {
  const Vec k = make_gaussian_psf(n, omega);
  return k * k.transpose();
}

std::shared_ptr<const SparseOperator> make_radon(const RadonSpec& spec) {
  const Index n = spec.n;
  const Index nbins = spec.detector_count;
  if (n < 2) throw std::invalid_argument("radon: image side must be >= 2");
  if (spec.angles_deg.empty()) throw std::invalid_argument("radon: need at least one angle");
  if (nbins < 1) throw std::invalid_argument("radon: need at least one detector bin");

  const double h = static_cast<double>(n) / 2.0;
  const double axis_eps = 1e-12;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(spec.angles_deg.size()) * nbins * 2 * n);

  std::vector<double> crossings;
  for (std::size_t ai = 0; ai < spec.angles_deg.size(); ++ai) {
    const double theta = spec.angles_deg[ai] * kPi / 180.0;
    double c = std::cos(theta);
    double s = std::sin(theta);
    if (std::abs(c) < axis_eps) c = 0.0;
    if (std::abs(s) < axis_eps) s = 0.0;

    for (Index bi = 0; bi < nbins; ++bi) {
      const double t = static_cast<double>(bi) - (static_cast<double>(nbins) - 1.0) / 2.0;
      const Index row_index = static_cast<Index>(ai) * nbins + bi;

      if (s == 0.0) {
        // vertical ray x = t*c, full traversal of one pixel column
        const double x = t * c;
        const Index col = static_cast<Index>(std::floor(x + h));
        if (col >= 0 && col < n)
          for (Index r = 0; r < n; ++r)
            entries.emplace_back(row_index, r * n + col, 1.0);
        continue;
      }
      if (c == 0.0) {
        // horizontal ray y = t*s
        const double y = t * s;
        const Index row = static_cast<Index>(std::floor(h - y));
        if (row >= 0 && row < n)
          for (Index col = 0; col < n; ++col)
            entries.emplace_back(row_index, row * n + col, 1.0);
        continue;
      }

      // Ray p(tau) = (t*c - tau*s, t*s + tau*c). Clip to the image box.
      auto tau_for_x = [&](double x) { return (t * c - x) / s; };
      auto tau_for_y = [&](double y) { return (y - t * s) / c; };
      double tx0 = tau_for_x(-h), tx1 = tau_for_x(h);
      if (tx0 > tx1) std::swap(tx0, tx1);
      double ty0 = tau_for_y(-h), ty1 = tau_for_y(h);
      if (ty0 > ty1) std::swap(ty0, ty1);
      const double tau_min = std::max(tx0, ty0);
      const double tau_max = std::min(tx1, ty1);
      if (tau_min >= tau_max) continue;

      crossings.clear();
      crossings.push_back(tau_min);
      crossings.push_back(tau_max);
      for (Index k = 0; k <= n; ++k) {
        const double plane = -h + static_cast<double>(k);
        const double tau_x = tau_for_x(plane);
        if (tau_x > tau_min && tau_x < tau_max) crossings.push_back(tau_x);
        const double tau_y = tau_for_y(plane);
        if (tau_y > tau_min && tau_y < tau_max) crossings.push_back(tau_y);
      }
      std::sort(crossings.begin(), crossings.end());

      for (std::size_t k = 0; k + 1 < crossings.size(); ++k) {
        const double len = crossings[k + 1] - crossings[k];
        if (len <= 1e-12) continue;
        const double tau_mid = 0.5 * (crossings[k] + crossings[k + 1]);
        const double xm = t * c - tau_mid * s;
        const double ym = t * s + tau_mid * c;
        const Index col = static_cast<Index>(std::floor(xm + h));
        const Index row = static_cast<Index>(std::floor(h - ym));
        if (col < 0 || col >= n || row < 0 || row >= n) continue;
        entries.emplace_back(row_index, row * n + col, len);
      }
    }
  }

  Eigen::SparseMatrix<double> a(static_cast<Index>(spec.angles_deg.size()) * nbins, n * n);
  a.setFromTriplets(entries.begin(), entries.end());
  return std::make_shared<SparseOperator>(std::move(a));
}

Mat materialize(const LinearOperator& op) {
  Mat a(op.rows(), op.cols());
  Vec e = Vec::Zero(op.cols());
  for (Index j = 0; j < op.cols(); ++j) {
    e[j] = 1.0;
    a.col(j) = op.apply(e);
    e[j] = 0.0;
  }
  return a;
}

}  // namespace evsel
