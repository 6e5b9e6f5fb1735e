#include "cdnet/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "cdnet/errors.hpp"

namespace cdnet {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

// Patch geometry of a cross-correlation from an image of `channels` x in_h x in_w
// to out_h x out_w positions.
struct Geometry {
  std::int64_t channels, in_h, in_w, kernel, stride, padding, out_h, out_w;

  std::int64_t rows() const { return channels * kernel * kernel; }
  std::int64_t cols() const { return out_h * out_w; }
};

template <typename T>
void im2col(const T* image, const Geometry& g, T* cols) {
  const std::int64_t n_out = g.cols();
  for (std::int64_t c = 0; c < g.channels; ++c) {
    const T* plane = image + c * g.in_h * g.in_w;
    for (std::int64_t ki = 0; ki < g.kernel; ++ki) {
      for (std::int64_t kj = 0; kj < g.kernel; ++kj) {
        T* row = cols + ((c * g.kernel + ki) * g.kernel + kj) * n_out;
        for (std::int64_t oy = 0; oy < g.out_h; ++oy) {
          const std::int64_t iy = oy * g.stride - g.padding + ki;
          T* dst = row + oy * g.out_w;
          if (iy < 0 || iy >= g.in_h) {
            std::fill(dst, dst + g.out_w, T(0));
            continue;
          }
          const T* src = plane + iy * g.in_w;
          for (std::int64_t ox = 0; ox < g.out_w; ++ox) {
            const std::int64_t ix = ox * g.stride - g.padding + kj;
            dst[ox] = (ix >= 0 && ix < g.in_w) ? src[ix] : T(0);
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatter-adds columns back onto the image.
template <typename T>
void col2im(const T* cols, const Geometry& g, T* image) {
  const std::int64_t n_out = g.cols();
  for (std::int64_t c = 0; c < g.channels; ++c) {
    T* plane = image + c * g.in_h * g.in_w;
    for (std::int64_t ki = 0; ki < g.kernel; ++ki) {
      for (std::int64_t kj = 0; kj < g.kernel; ++kj) {
        const T* row = cols + ((c * g.kernel + ki) * g.kernel + kj) * n_out;
        for (std::int64_t oy = 0; oy < g.out_h; ++oy) {
          const std::int64_t iy = oy * g.stride - g.padding + ki;
          if (iy < 0 || iy >= g.in_h) continue;
          T* dst = plane + iy * g.in_w;
          const T* src = row + oy * g.out_w;
          for (std::int64_t ox = 0; ox < g.out_w; ++ox) {
            const std::int64_t ix = ox * g.stride - g.padding + kj;
            if (ix >= 0 && ix < g.in_w) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

template <typename T>
bool any_requires_grad(std::initializer_list<const Variable<T>*> vars) {
  for (const auto* v : vars) {
    if (v->defined() && v->requires_grad()) return true;
  }
  return false;
}

template <typename T>
Variable<T> make_result(Tensor<T> value, bool requires_grad) {
  return Variable<T>(std::move(value), requires_grad, /*leaf=*/!requires_grad);
}

void check_conv_args(const char* op, const Shape& x, const Shape& w, const Shape& b, std::int64_t w_in_axis,
                     std::int64_t w_out_axis, int stride, int padding) {
  if (x.size() != 4 || w.size() != 4) {
    throw ShapeError(std::string(op) + ": expected rank-4 input and weight, got input " + shape_str(x) +
                     " and weight " + shape_str(w));
  }
  if (w[2] != w[3]) throw ShapeError(std::string(op) + ": kernel must be square, got weight " + shape_str(w));
  if (x[1] != w[static_cast<std::size_t>(w_in_axis)]) {
    throw ShapeError(std::string(op) + ": input channels of input " + shape_str(x) + " do not match weight " +
                     shape_str(w));
  }
  if (b.size() != 1 || b[0] != w[static_cast<std::size_t>(w_out_axis)]) {
    throw ShapeError(std::string(op) + ": bias " + shape_str(b) + " does not match weight " + shape_str(w));
  }
  if (stride < 1) throw ShapeError(std::string(op) + ": stride must be positive");
  if (padding < 0) throw ShapeError(std::string(op) + ": padding must be non-negative");
}

}  // namespace

const char* activation_name(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::identity: return "identity";
    case ActivationKind::relu: return "relu";
    case ActivationKind::leaky_relu: return "leaky_relu";
    case ActivationKind::sigmoid: return "sigmoid";
    case ActivationKind::tanh: return "tanh";
  }
  return "?";
}

std::int64_t conv_out_extent(std::int64_t in, std::int64_t kernel, std::int64_t stride, std::int64_t padding) {
  const std::int64_t span = in + 2 * padding - kernel;
  if (span < 0) return 0;
  return span / stride + 1;
}

std::int64_t conv_transpose_out_extent(std::int64_t in, std::int64_t kernel, std::int64_t stride,
                                       std::int64_t padding, std::int64_t output_padding) {
  return (in - 1) * stride - 2 * padding + kernel + output_padding;
}

template <typename T>
T sigmoid_scalar(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
Variable<T> conv2d(Tape<T>& tape, const Variable<T>& x, const Variable<T>& weight, const Variable<T>& bias,
                   int stride, int padding) {
  const Shape& xs = x.shape();
  const Shape& ws = weight.shape();
  check_conv_args("conv2d", xs, ws, bias.shape(), 1, 0, stride, padding);
  const std::int64_t n = xs[0], cin = xs[1], h = xs[2], w = xs[3];
  const std::int64_t cout = ws[0], k = ws[2];
  const std::int64_t oh = conv_out_extent(h, k, stride, padding);
  const std::int64_t ow = conv_out_extent(w, k, stride, padding);
  if (oh < 1 || ow < 1) {
    throw ShapeError("conv2d: kernel " + shape_str(ws) + " leaves no output positions for input " + shape_str(xs));
  }
  const Geometry g{cin, h, w, k, stride, padding, oh, ow};

  Tensor<T> out(Shape{n, cout, oh, ow});
  AlignedVector<T> cols(static_cast<std::size_t>(g.rows() * g.cols()));
  ConstMatMap<T> wm(weight.value().data().data(), cout, g.rows());
  for (std::int64_t i = 0; i < n; ++i) {
    im2col(x.value().data().data() + i * cin * h * w, g, cols.data());
    MatMap<T> y(out.data().data() + i * cout * oh * ow, cout, g.cols());
    y.noalias() = wm * ConstMatMap<T>(cols.data(), g.rows(), g.cols());
    for (std::int64_t c = 0; c < cout; ++c) y.row(c).array() += bias.value()[c];
  }

  const bool rg = any_requires_grad<T>({&x, &weight, &bias});
  Variable<T> result = make_result(std::move(out), rg);
  if (rg) {
    tape.record("conv2d", result, [x, weight, bias, result, g, n, cout]() mutable {
      const T* dy_all = result.grad().data().data();
      const std::int64_t in_size = g.channels * g.in_h * g.in_w;
      const std::int64_t out_size = cout * g.cols();
      AlignedVector<T> cols(static_cast<std::size_t>(g.rows() * g.cols()));
      ConstMatMap<T> wm(weight.value().data().data(), cout, g.rows());
      for (std::int64_t i = 0; i < n; ++i) {
        ConstMatMap<T> dy(dy_all + i * out_size, cout, g.cols());
        if (weight.requires_grad()) {
          im2col(x.value().data().data() + i * in_size, g, cols.data());
          MatMap<T> dw(weight.grad_buffer().data().data(), cout, g.rows());
          dw.noalias() += dy * ConstMatMap<T>(cols.data(), g.rows(), g.cols()).transpose();
        }
        if (bias.requires_grad()) {
          auto& db = bias.grad_buffer();
          for (std::int64_t c = 0; c < cout; ++c) {
            const T* row = dy_all + i * out_size + c * g.cols();
            for (std::int64_t j = 0; j < g.cols(); ++j) db[c] += row[j];
          }
        }
        if (x.requires_grad()) {
          MatMap<T> dcols(cols.data(), g.rows(), g.cols());
          dcols.noalias() = wm.transpose() * dy;
          col2im(cols.data(), g, x.grad_buffer().data().data() + i * in_size);
        }
      }
    });
  }
  return result;
}

template <typename T>
Variable<T> conv_transpose2d(Tape<T>& tape, const Variable<T>& x, const Variable<T>& weight,
                             const Variable<T>& bias, int stride, int padding, int output_padding) {
  const Shape& xs = x.shape();
  const Shape& ws = weight.shape();
  check_conv_args("conv_transpose2d", xs, ws, bias.shape(), 0, 1, stride, padding);
  if (output_padding < 0 || output_padding >= stride) {
    throw ShapeError("conv_transpose2d: output_padding " + std::to_string(output_padding) +
                     " must be in [0, stride=" + std::to_string(stride) + ")");
  }
  const std::int64_t n = xs[0], cin = xs[1], h = xs[2], w = xs[3];
  const std::int64_t cout = ws[1], k = ws[2];
  const std::int64_t oh = conv_transpose_out_extent(h, k, stride, padding, output_padding);
  const std::int64_t ow = conv_transpose_out_extent(w, k, stride, padding, output_padding);
  if (oh < 1 || ow < 1) {
    throw ShapeError("conv_transpose2d: input " + shape_str(xs) + " with weight " + shape_str(ws) +
                     " yields an empty output");
  }
  // The output plays the role of the cross-correlation input.
  const Geometry g{cout, oh, ow, k, stride, padding, h, w};
  if (conv_out_extent(oh, k, stride, padding) != h || conv_out_extent(ow, k, stride, padding) != w) {
    throw ShapeError("conv_transpose2d: padding " + std::to_string(padding) + " is too large for input " +
                     shape_str(xs) + " and weight " + shape_str(ws));
  }

  Tensor<T> out(Shape{n, cout, oh, ow});
  AlignedVector<T> cols(static_cast<std::size_t>(g.rows() * g.cols()));
  ConstMatMap<T> wm(weight.value().data().data(), cin, g.rows());
  const std::int64_t out_size = cout * oh * ow;
  for (std::int64_t i = 0; i < n; ++i) {
    MatMap<T> cm(cols.data(), g.rows(), g.cols());
    cm.noalias() = wm.transpose() * ConstMatMap<T>(x.value().data().data() + i * cin * h * w, cin, g.cols());
    T* y = out.data().data() + i * out_size;
    col2im(cols.data(), g, y);
    for (std::int64_t c = 0; c < cout; ++c) {
      const T bc = bias.value()[c];
      for (std::int64_t p = 0; p < oh * ow; ++p) y[c * oh * ow + p] += bc;
    }
  }

  const bool rg = any_requires_grad<T>({&x, &weight, &bias});
  Variable<T> result = make_result(std::move(out), rg);
  if (rg) {
    tape.record("conv_transpose2d", result, [x, weight, bias, result, g, n, cin, out_size]() mutable {
      const T* dy_all = result.grad().data().data();
      const std::int64_t in_size = cin * g.cols();
      AlignedVector<T> cols(static_cast<std::size_t>(g.rows() * g.cols()));
      ConstMatMap<T> wm(weight.value().data().data(), cin, g.rows());
      ConstMatMap<T> dcols(cols.data(), g.rows(), g.cols());
      for (std::int64_t i = 0; i < n; ++i) {
        const T* dy = dy_all + i * out_size;
        if (bias.requires_grad()) {
          auto& db = bias.grad_buffer();
          const std::int64_t plane = g.in_h * g.in_w;
          for (std::int64_t c = 0; c < g.channels; ++c) {
            T acc = 0;
            for (std::int64_t p = 0; p < plane; ++p) acc += dy[c * plane + p];
            db[c] += acc;
          }
        }
        if (!weight.requires_grad() && !x.requires_grad()) continue;
        im2col(dy, g, cols.data());
        if (weight.requires_grad()) {
          MatMap<T> dw(weight.grad_buffer().data().data(), cin, g.rows());
          dw.noalias() += ConstMatMap<T>(x.value().data().data() + i * in_size, cin, g.cols()) * dcols.transpose();
        }
        if (x.requires_grad()) {
          MatMap<T> dx(x.grad_buffer().data().data() + i * in_size, cin, g.cols());
          dx.noalias() += wm * dcols;
        }
      }
    });
  }
  return result;
}

template <typename T>
Variable<T> concat_channels(Tape<T>& tape, const std::vector<Variable<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat_channels: no inputs");
  if (parts.size() == 1) return parts.front();
  const Shape& first = parts.front().shape();
  if (first.size() != 4) throw ShapeError("concat_channels: expected rank-4 inputs, got " + shape_str(first));
  std::int64_t channels = 0;
  std::vector<std::int64_t> sizes;
  bool rg = false;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != 4 || s[0] != first[0] || s[2] != first[2] || s[3] != first[3]) {
      throw ShapeError("concat_channels: " + shape_str(s) + " does not match " + shape_str(first) +
                       " in batch or spatial extent");
    }
    channels += s[1];
    sizes.push_back(s[1]);
    rg = rg || p.requires_grad();
  }
  const std::int64_t n = first[0], plane = first[2] * first[3];
  Tensor<T> out(Shape{n, channels, first[2], first[3]});
  for (std::int64_t i = 0; i < n; ++i) {
    T* dst = out.data().data() + i * channels * plane;
    for (const auto& p : parts) {
      const std::int64_t block = p.shape()[1] * plane;
      const T* src = p.value().data().data() + i * block;
      std::copy(src, src + block, dst);
      dst += block;
    }
  }
  Variable<T> result = make_result(std::move(out), rg);
  if (rg) {
    tape.record("concat_channels", result, [parts, result, n, channels, plane]() mutable {
      const T* dy = result.grad().data().data();
      for (std::int64_t i = 0; i < n; ++i) {
        const T* src = dy + i * channels * plane;
        for (auto& p : parts) {
          const std::int64_t block = p.shape()[1] * plane;
          if (p.requires_grad()) {
            T* dst = p.grad_buffer().data().data() + i * block;
            for (std::int64_t j = 0; j < block; ++j) dst[j] += src[j];
          }
          src += block;
        }
      }
    });
  }
  return result;
}

template <typename T>
Variable<T> activation(Tape<T>& tape, Activation act, const Variable<T>& x) {
  if (act.kind == ActivationKind::identity) return x;
  const auto& in = x.value();
  Tensor<T> out(in.shape());
  const auto src = in.data();
  auto dst = out.data();
  const T alpha = static_cast<T>(act.alpha);
  switch (act.kind) {
    case ActivationKind::relu:
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > T(0) ? src[i] : T(0);
      break;
    case ActivationKind::leaky_relu:
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > T(0) ? src[i] : alpha * src[i];
      break;
    case ActivationKind::sigmoid:
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = sigmoid_scalar(src[i]);
      break;
    case ActivationKind::tanh:
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::tanh(src[i]);
      break;
    case ActivationKind::identity:
      break;
  }
  Variable<T> result = make_result(std::move(out), x.requires_grad());
  if (x.requires_grad()) {
    tape.record(activation_name(act.kind), result, [x, result, kind = act.kind, alpha]() mutable {
      const auto dy = result.grad().data();
      const auto in = x.value().data();
      const auto y = result.value().data();
      auto dx = x.grad_buffer().data();
      switch (kind) {
        case ActivationKind::relu:
          for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += in[i] > T(0) ? dy[i] : T(0);
          break;
        case ActivationKind::leaky_relu:
          for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += in[i] > T(0) ? dy[i] : alpha * dy[i];
          break;
        case ActivationKind::sigmoid:
          for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] * y[i] * (T(1) - y[i]);
          break;
        case ActivationKind::tanh:
          for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i] * (T(1) - y[i] * y[i]);
          break;
        case ActivationKind::identity:
          break;
      }
    });
  }
  return result;
}

template <typename T>
Variable<T> dense(Tape<T>& tape, const Variable<T>& x, const Variable<T>& weight, const Variable<T>& bias) {
  const Shape& xs = x.shape();
  const Shape& ws = weight.shape();
  if (xs.size() != 2 || ws.size() != 2 || xs[1] != ws[0]) {
    throw ShapeError("dense: input " + shape_str(xs) + " does not match weight " + shape_str(ws));
  }
  if (bias.shape().size() != 1 || bias.shape()[0] != ws[1]) {
    throw ShapeError("dense: bias " + shape_str(bias.shape()) + " does not match weight " + shape_str(ws));
  }
  const std::int64_t n = xs[0], f = xs[1], m = ws[1];
  Tensor<T> out(Shape{n, m});
  MatMap<T> y(out.data().data(), n, m);
  ConstMatMap<T> xm(x.value().data().data(), n, f);
  ConstMatMap<T> wm(weight.value().data().data(), f, m);
  y.noalias() = xm * wm;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < m; ++j) y(i, j) += bias.value()[j];
  }
  const bool rg = any_requires_grad<T>({&x, &weight, &bias});
  Variable<T> result = make_result(std::move(out), rg);
  if (rg) {
    tape.record("dense", result, [x, weight, bias, result, n, f, m]() mutable {
      ConstMatMap<T> dy(result.grad().data().data(), n, m);
      if (x.requires_grad()) {
        MatMap<T> dx(x.grad_buffer().data().data(), n, f);
        dx.noalias() += dy * ConstMatMap<T>(weight.value().data().data(), f, m).transpose();
      }
      if (weight.requires_grad()) {
        MatMap<T> dw(weight.grad_buffer().data().data(), f, m);
        dw.noalias() += ConstMatMap<T>(x.value().data().data(), n, f).transpose() * dy;
      }
      if (bias.requires_grad()) {
        auto& db = bias.grad_buffer();
        for (std::int64_t j = 0; j < m; ++j) db[j] += dy.col(j).sum();
      }
    });
  }
  return result;
}

template <typename T>
Variable<T> flatten(Tape<T>& tape, const Variable<T>& x) {
  const Shape& xs = x.shape();
  if (xs.empty()) throw ShapeError("flatten: rank-0 input");
  const std::int64_t n = xs[0];
  Variable<T> result = make_result(x.value().reshaped(Shape{n, x.value().numel() / n}), x.requires_grad());
  if (x.requires_grad()) {
    tape.record("flatten", result, [x, result]() mutable {
      const auto dy = result.grad().data();
      auto dx = x.grad_buffer().data();
      for (std::size_t i = 0; i < dy.size(); ++i) dx[i] += dy[i];
    });
  }
  return result;
}

template <typename T>
Variable<T> add(Tape<T>& tape, const Variable<T>& a, const Variable<T>& b) {
  if (a.shape() != b.shape()) throw ShapeError("add: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  Tensor<T> out = a.value();
  out.add_(b.value());
  const bool rg = any_requires_grad<T>({&a, &b});
  Variable<T> result = make_result(std::move(out), rg);
  if (rg) {
    tape.record("add", result, [a, b, result]() mutable {
      if (a.requires_grad()) a.grad_buffer().add_(result.grad());
      if (b.requires_grad()) b.grad_buffer().add_(result.grad());
    });
  }
  return result;
}

template <typename T>
Variable<T> mul(Tape<T>& tape, const Variable<T>& a, const Variable<T>& b) {
  if (a.shape() != b.shape()) throw ShapeError("mul: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  Tensor<T> out(a.shape());
  for (std::int64_t i = 0; i < out.numel(); ++i) out[i] = a.value()[i] * b.value()[i];
  const bool rg = any_requires_grad<T>({&a, &b});
  Variable<T> result = make_result(std::move(out), rg);
  if (rg) {
    tape.record("mul", result, [a, b, result]() mutable {
      const auto& dy = result.grad();
      if (a.requires_grad()) {
        auto& da = a.grad_buffer();
        for (std::int64_t i = 0; i < dy.numel(); ++i) da[i] += dy[i] * b.value()[i];
      }
      if (b.requires_grad()) {
        auto& db = b.grad_buffer();
        for (std::int64_t i = 0; i < dy.numel(); ++i) db[i] += dy[i] * a.value()[i];
      }
    });
  }
  return result;
}

template <typename T>
Variable<T> scale(Tape<T>& tape, const Variable<T>& a, T factor) {
  Tensor<T> out = a.value();
  for (auto& v : out.data()) v *= factor;
  Variable<T> result = make_result(std::move(out), a.requires_grad());
  if (a.requires_grad()) {
    tape.record("scale", result, [a, result, factor]() mutable {
      const auto& dy = result.grad();
      auto& da = a.grad_buffer();
      for (std::int64_t i = 0; i < dy.numel(); ++i) da[i] += factor * dy[i];
    });
  }
  return result;
}

template <typename T>
Variable<T> sum(Tape<T>& tape, const Variable<T>& a) {
  T acc = 0;
  for (auto v : a.value().data()) acc += v;
  Variable<T> result = make_result(Tensor<T>(Shape{1}, acc), a.requires_grad());
  if (a.requires_grad()) {
    tape.record("sum", result, [a, result]() mutable {
      const T g = result.grad()[0];
      for (auto& v : a.grad_buffer().data()) v += g;
    });
  }
  return result;
}

template <typename T>
Variable<T> mean(Tape<T>& tape, const Variable<T>& a) {
  return scale(tape, sum(tape, a), T(1) / static_cast<T>(a.value().numel()));
}

template <typename T>
std::vector<Tensor<T>> split_channels(const Tensor<T>& x, const std::vector<std::int64_t>& sizes) {
  require_rank4(x, "split_channels");
  std::int64_t total = 0;
  for (auto s : sizes) total += s;
  if (total != x.dim(1)) {
    throw ShapeError("split_channels: block sizes sum to " + std::to_string(total) + " but input " +
                     shape_str(x.shape()) + " has " + std::to_string(x.dim(1)) + " channels");
  }
  const std::int64_t n = x.dim(0), plane = x.dim(2) * x.dim(3);
  std::vector<Tensor<T>> out;
  for (auto s : sizes) out.emplace_back(Shape{n, s, x.dim(2), x.dim(3)});
  for (std::int64_t i = 0; i < n; ++i) {
    const T* src = x.data().data() + i * x.dim(1) * plane;
    for (auto& part : out) {
      const std::int64_t block = part.dim(1) * plane;
      std::copy(src, src + block, part.data().data() + i * block);
      src += block;
    }
  }
  return out;
}

#define CDNET_INSTANTIATE_OPS(T)                                                                                    \
  template T sigmoid_scalar(T);                                                                                     \
  template Variable<T> conv2d(Tape<T>&, const Variable<T>&, const Variable<T>&, const Variable<T>&, int, int);       \
  template Variable<T> conv_transpose2d(Tape<T>&, const Variable<T>&, const Variable<T>&, const Variable<T>&, int,   \
                                        int, int);                                                                  \
  template Variable<T> concat_channels(Tape<T>&, const std::vector<Variable<T>>&);                                 \
  template Variable<T> activation(Tape<T>&, Activation, const Variable<T>&);                                       \
  template Variable<T> dense(Tape<T>&, const Variable<T>&, const Variable<T>&, const Variable<T>&);                 \
  template Variable<T> flatten(Tape<T>&, const Variable<T>&);                                                      \
  template Variable<T> add(Tape<T>&, const Variable<T>&, const Variable<T>&);                                      \
  template Variable<T> mul(Tape<T>&, const Variable<T>&, const Variable<T>&);                                      \
  template Variable<T> scale(Tape<T>&, const Variable<T>&, T);                                                     \
  template Variable<T> sum(Tape<T>&, const Variable<T>&);                                                          \
  template Variable<T> mean(Tape<T>&, const Variable<T>&);                                                         \
  template std::vector<Tensor<T>> split_channels(const Tensor<T>&, const std::vector<std::int64_t>&);

CDNET_INSTANTIATE_OPS(float)
CDNET_INSTANTIATE_OPS(double)

}  // namespace cdnet
