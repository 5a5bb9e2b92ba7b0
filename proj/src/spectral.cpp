#include "phasespace/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>

namespace phasespace::spectral {

namespace {

// Pre/post twiddles turning a raw DFT into the centred continuous convention above.
class Axis {
 public:
  Axis(int n, double origin, double step) : n_(n), step_(step), pre_(n), post_(n) {
    const double dk = 2.0 * std::numbers::pi / (n * step);
    for (int j = 0; j < n; ++j) {
      pre_(j) = (j % 2 == 0) ? 1.0 : -1.0;
      const double k = (j - n / 2) * dk;
      post_(j) = std::polar(1.0, -k * origin);
    }
    buf_in_.resize(n);
    buf_out_.resize(n);
  }

  template <typename Vec>
  void forward(Vec&& v) {
    for (int j = 0; j < n_; ++j) buf_in_(j) = v(j) * pre_(j);
    fft_.fwd(buf_out_, buf_in_);
    for (int m = 0; m < n_; ++m) v(m) = buf_out_(m) * post_(m) * step_;
  }

  template <typename Vec>
  void inverse(Vec&& v) {
    for (int m = 0; m < n_; ++m) buf_in_(m) = v(m) * std::conj(post_(m));
    fft_.inv(buf_out_, buf_in_);  // includes 1/n
    // (dk/2π)·n = 1/step
    for (int j = 0; j < n_; ++j) v(j) = buf_out_(j) * pre_(j) / step_;
  }

 private:
  int n_;
  double step_;
  Eigen::ArrayXd pre_;
  Eigen::ArrayXcd post_;
  Eigen::VectorXcd buf_in_, buf_out_;
  Eigen::FFT<double> fft_;
};

}  // namespace

// Rows are strided in column-major storage, so the x axis is transformed on a transposed copy.
void forward_columns_axis(const PhaseGrid& grid, Eigen::ArrayXXcd& values) {
  Axis axis(grid.nx(), grid.x_min(), grid.dx());
  Eigen::ArrayXXcd t = values.transpose();
  for (Eigen::Index i = 0; i < t.cols(); ++i) axis.forward(t.col(i));
  values = t.transpose();
}

void inverse_columns_axis(const PhaseGrid& grid, Eigen::ArrayXXcd& values) {
  Axis axis(grid.nx(), grid.x_min(), grid.dx());
  Eigen::ArrayXXcd t = values.transpose();
  for (Eigen::Index i = 0; i < t.cols(); ++i) axis.inverse(t.col(i));
  values = t.transpose();
}

void forward_rows_axis(const PhaseGrid& grid, Eigen::ArrayXXcd& values) {
  Axis axis(grid.np(), grid.p_min(), grid.dp());
  for (Eigen::Index j = 0; j < values.cols(); ++j) axis.forward(values.col(j));
}

void inverse_rows_axis(const PhaseGrid& grid, Eigen::ArrayXXcd& values) {
  Axis axis(grid.np(), grid.p_min(), grid.dp());
  for (Eigen::Index j = 0; j < values.cols(); ++j) axis.inverse(values.col(j));
}

Eigen::VectorXcd forward(const Eigen::VectorXcd& f, double origin, double step) {
  Eigen::VectorXcd out = f;
  Axis(static_cast<int>(f.size()), origin, step).forward(out);
  return out;
}

Eigen::VectorXcd inverse(const Eigen::VectorXcd& F, double origin, double step) {
  Eigen::VectorXcd out = F;
  Axis(static_cast<int>(F.size()), origin, step).inverse(out);
  return out;
}

}  // namespace phasespace::spectral
