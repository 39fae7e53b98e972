#include "signspot/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace signspot {

namespace {

constexpr double kLreluSlope = 0.2;
constexpr double kNormEps = 1e-12;

Vec lrelu(const Vec& z) {
  return z.unaryExpr([](double t) { return t >= 0.0 ? t : kLreluSlope * t; });
}

// Derivative convention: lrelu'(0) = 1.
Vec lrelu_grad(const Vec& z) {
  return z.unaryExpr([](double t) { return t >= 0.0 ? 1.0 : kLreluSlope; });
}

void fill_uniform(Mat& m, Rng& rng, double bound) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-bound, bound);
}

}  // namespace

StackGrads StackGrads::zeros(const MlpDims& dims) {
  StackGrads g;
  g.w1 = Mat::Zero(dims.d_in, dims.d_in);
  g.b1 = Vec::Zero(dims.d_in);
  g.w2 = Mat::Zero(dims.d_hidden, dims.d_in);
  g.b2 = Vec::Zero(dims.d_hidden);
  g.w3 = Mat::Zero(dims.d_out, dims.d_hidden);
  g.b3 = Vec::Zero(dims.d_out);
  return g;
}

void StackGrads::add_scaled(const StackGrads& other, double scale) {
  w1 += scale * other.w1;
  b1 += scale * other.b1;
  w2 += scale * other.w2;
  b2 += scale * other.b2;
  w3 += scale * other.w3;
  b3 += scale * other.b3;
}

MlpStack init_stack(Rng& rng, const MlpDims& dims) {
  if (dims.d_in < 1 || dims.d_hidden < 1 || dims.d_out < 1)
    throw DataError("MLP dimensions must be positive");
  MlpStack s;
  s.w1.resize(dims.d_in, dims.d_in);
  s.w2.resize(dims.d_hidden, dims.d_in);
  s.w3.resize(dims.d_out, dims.d_hidden);
  fill_uniform(s.w1, rng, std::sqrt(6.0 / dims.d_in));
  fill_uniform(s.w2, rng, std::sqrt(6.0 / dims.d_in));
  fill_uniform(s.w3, rng, std::sqrt(6.0 / dims.d_hidden));
  s.b1 = Vec::Zero(dims.d_in);
  s.b2 = Vec::Zero(dims.d_hidden);
  s.b3 = Vec::Zero(dims.d_out);
  return s;
}

MlpParams init_params(uint64_t seed, const MlpDims& dims, bool share_domains) {
  Rng rng(seed);
  MlpParams p;
  p.shared = init_stack(rng, dims);
  if (!share_domains) p.dict_specific = init_stack(rng, dims);
  return p;
}

Vec mlp_forward(const MlpStack& stack, const Vec& x, ForwardTape* tape) {
  if (x.size() != stack.w1.cols())
    throw DataError("MLP input dimension mismatch: got " + std::to_string(x.size()) +
                    ", expected " + std::to_string(stack.w1.cols()));
  if (!x.allFinite()) throw NumericalError("non-finite MLP input");
  Vec z1 = stack.w1 * x + stack.b1 + x;
  Vec h1 = lrelu(z1);
  Vec z2 = stack.w2 * h1 + stack.b2;
  Vec h2 = lrelu(z2);
  Vec e = stack.w3 * h2 + stack.b3;
  if (tape) {
    tape->x = x;
    tape->z1 = std::move(z1);
    tape->h1 = std::move(h1);
    tape->z2 = std::move(z2);
    tape->h2 = std::move(h2);
  }
  return e;
}

Vec mlp_backward(const MlpStack& stack, const ForwardTape& tape, const Vec& grad_e,
                 StackGrads& grads) {
  if (grad_e.size() != stack.w3.rows()) throw DataError("MLP output gradient shape mismatch");
  grads.w3.noalias() += grad_e * tape.h2.transpose();
  grads.b3 += grad_e;
  Vec grad_z2 = (stack.w3.transpose() * grad_e).cwiseProduct(lrelu_grad(tape.z2));
  grads.w2.noalias() += grad_z2 * tape.h1.transpose();
  grads.b2 += grad_z2;
  Vec grad_z1 = (stack.w2.transpose() * grad_z2).cwiseProduct(lrelu_grad(tape.z1));
  grads.w1.noalias() += grad_z1 * tape.x.transpose();
  grads.b1 += grad_z1;
  // Skip connection: x feeds z1 directly alongside W1*x.
  return stack.w1.transpose() * grad_z1 + grad_z1;
}

double cosine_similarity(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DataError("cosine similarity dimension mismatch");
  double na = a.norm();
  double nb = b.norm();
  if (na <= kNormEps || nb <= kNormEps)
    throw NumericalError("degenerate embedding: near-zero norm in cosine similarity");
  return a.dot(b) / (na * nb);
}

void cosine_backward(const Vec& a, const Vec& b, double grad_sim, Vec& grad_a, Vec& grad_b) {
  double na = a.norm();
  double nb = b.norm();
  if (na <= kNormEps || nb <= kNormEps)
    throw NumericalError("degenerate embedding: near-zero norm in cosine backward");
  double dot = a.dot(b);
  double inv = 1.0 / (na * nb);
  grad_a += grad_sim * (b * inv - a * (dot * inv / (na * na)));
  grad_b += grad_sim * (a * inv - b * (dot * inv / (nb * nb)));
}

Vec dictionary_feature(const FeatureSequence& clips) {
  if (clips.rows() < 1) throw DataError("dictionary entry has no clip features");
  Vec mean = Vec::Zero(clips.dim());
  for (int r = 0; r < clips.rows(); ++r) mean += clips.row(r);
  return mean / clips.rows();
}

namespace {

constexpr char kMagic[4] = {'M', 'L', 'P', 'W'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

uint32_t read_u32(std::istream& in) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

// Tensors are stored float32 row-major regardless of in-memory layout.
void write_tensor(std::ostream& out, const Mat& m) {
  write_u32(out, static_cast<uint32_t>(m.rows()));
  write_u32(out, static_cast<uint32_t>(m.cols()));
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f =
      m.cast<float>();
  out.write(reinterpret_cast<const char*>(f.data()),
            static_cast<std::streamsize>(sizeof(float)) * f.rows() * f.cols());
}

void write_tensor(std::ostream& out, const Vec& v) {
  write_u32(out, static_cast<uint32_t>(v.size()));
  write_u32(out, 1);
  Eigen::VectorXf f = v.cast<float>();
  out.write(reinterpret_cast<const char*>(f.data()),
            static_cast<std::streamsize>(sizeof(float)) * f.size());
}

Mat read_tensor(std::istream& in, const std::string& path) {
  uint32_t rows = read_u32(in);
  uint32_t cols = read_u32(in);
  if (!in || rows == 0 || cols == 0)
    throw DataError("invalid tensor shape in checkpoint " + path);
  Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f(rows, cols);
  size_t payload = static_cast<size_t>(rows) * cols * sizeof(float);
  in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(payload));
  if (static_cast<size_t>(in.gcount()) != payload)
    throw DataError("truncated tensor payload in checkpoint " + path);
  return f.cast<double>();
}

MlpStack read_stack(std::istream& in, const std::string& path) {
  MlpStack s;
  s.w1 = read_tensor(in, path);
  s.b1 = read_tensor(in, path).col(0);
  s.w2 = read_tensor(in, path);
  s.b2 = read_tensor(in, path).col(0);
  s.w3 = read_tensor(in, path);
  s.b3 = read_tensor(in, path).col(0);
  if (s.w1.rows() != s.w1.cols() || s.b1.size() != s.w1.rows() ||
      s.w2.cols() != s.w1.cols() || s.b2.size() != s.w2.rows() ||
      s.w3.cols() != s.w2.rows() || s.b3.size() != s.w3.rows())
    throw DataError("inconsistent layer shapes in checkpoint " + path);
  return s;
}

void write_stack(std::ostream& out, const MlpStack& s) {
  write_tensor(out, s.w1);
  write_tensor(out, s.b1);
  write_tensor(out, s.w2);
  write_tensor(out, s.b2);
  write_tensor(out, s.w3);
  write_tensor(out, s.b3);
}

}  // namespace

void save_params(const std::string& path, const MlpParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open checkpoint for writing: " + path);
  out.write(kMagic, 4);
  write_u32(out, kVersion);
  write_u32(out, static_cast<uint32_t>(params.shared.w1.cols()));
  write_stack(out, params.shared);
  if (params.dict_specific) write_stack(out, *params.dict_specific);
  if (!out) throw DataError("short write to checkpoint " + path);
}

MlpParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("bad magic in checkpoint: " + path);
  uint32_t version = read_u32(in);
  if (!in || version != kVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version) + " in " + path);
  uint32_t d_in = read_u32(in);
  if (!in) throw DataError("truncated checkpoint header in " + path);

  MlpParams p;
  p.shared = read_stack(in, path);
  if (p.shared.w1.cols() != static_cast<Eigen::Index>(d_in))
    throw DataError("checkpoint d_in does not match first layer in " + path);
  if (in.peek() != std::char_traits<char>::eof()) p.dict_specific = read_stack(in, path);
  return p;
}

}  // namespace signspot
