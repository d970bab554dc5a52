#pragma once

// Graph-scoring network M(G) -> R and the comparator CMP(G, G') = [M(G) < M(G')].
//
// Each of K message-passing iterations maps node embeddings X (n x 3p) to
//   [ X W_self^T + b_self | N W_nbr^T + b_nbr | R W_anti^T + b_anti ]
// where N holds neighbour sums and R the sums over strict non-neighbours
// (self excluded), then applies exact GELU and a per-node layer norm. The
// mean-pooled embedding feeds L dense layers: L-1 hidden layers of width p,
// each GELU + layer norm, and a final affine layer over [h_{L-1} | h_1].
//
// Gradients are derived by hand for this fixed architecture.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmis/graph.hpp"
#include "dpmis/rng.hpp"

namespace dpmis {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;

inline constexpr double kLayerNormEps = 1e-5;

/// K message-passing iterations, branch width p (embeddings are 3p wide), L dense layers.
struct Geometry {
  int iterations = 3;
  int width = 32;
  int layers = 4;

  bool operator==(const Geometry&) const = default;

  void validate() const {
    if (iterations < 1) throw std::invalid_argument("geometry: K must be >= 1");
    if (width < 1) throw std::invalid_argument("geometry: p must be >= 1");
    if (layers < 2) throw std::invalid_argument("geometry: L must be >= 2");
  }
  int embed() const { return 3 * width; }
};

struct GemLayer {
  Mat self_w, nbr_w, anti_w;  // p x 3p each
  Vec self_b, nbr_b, anti_b;  // p
  Vec norm_scale, norm_shift;  // 3p
};

struct DenseLayer {
  Mat w;
  Vec b;
  Vec norm_scale, norm_shift;  // empty on the final layer
};

/// Every learnable tensor of the scoring network. Also used as the gradient container.
struct CmpParams {
  Geometry geometry;
  std::vector<GemLayer> gem;
  std::vector<DenseLayer> head;

  /// All tensors zero (layer-norm scales included), shaped for `geo`.
  static CmpParams zeros(const Geometry& geo) {
    geo.validate();
    const int p = geo.width;
    const int e = geo.embed();
    CmpParams out;
    out.geometry = geo;
    out.gem.resize(geo.iterations);
    for (auto& g : out.gem) {
      g.self_w = Mat::Zero(p, e);
      g.nbr_w = Mat::Zero(p, e);
      g.anti_w = Mat::Zero(p, e);
      g.self_b = Vec::Zero(p);
      g.nbr_b = Vec::Zero(p);
      g.anti_b = Vec::Zero(p);
      g.norm_scale = Vec::Zero(e);
      g.norm_shift = Vec::Zero(e);
    }
    out.head.resize(geo.layers);
    for (int l = 0; l < geo.layers; ++l) {
      auto& d = out.head[l];
      const bool last = l == geo.layers - 1;
      const int in = l == 0 ? e : (last ? 2 * p : p);
      const int outw = last ? 1 : p;
      d.w = Mat::Zero(outw, in);
      d.b = Vec::Zero(outw);
      if (!last) {
        d.norm_scale = Vec::Zero(p);
        d.norm_shift = Vec::Zero(p);
      }
    }
    return out;
  }

  /// Visits every tensor in the fixed serialisation order:
  /// per iteration k: self_w, self_b, nbr_w, nbr_b, anti_w, anti_b, norm_scale, norm_shift;
  /// then per dense layer: w, b, and (hidden layers only) norm_scale, norm_shift.
  template <class F>
  void visit(F&& f) {
    visit_impl(*this, f);
  }
  template <class F>
  void visit(F&& f) const {
    visit_impl(*this, f);
  }

  std::size_t size() const {
    std::size_t total = 0;
    visit([&](const std::string&, std::span<const double> t) { total += t.size(); });
    return total;
  }

  void set_zero() {
    visit([](const std::string&, std::span<double> t) { std::fill(t.begin(), t.end(), 0.0); });
  }

  bool all_finite() const {
    bool ok = true;
    visit([&](const std::string&, std::span<const double> t) {
      for (double x : t) ok = ok && std::isfinite(x);
    });
    return ok;
  }

  /// Elementwise `this += scale * other`; geometries must match.
  void add_scaled(const CmpParams& other, double scale) {
    std::vector<std::span<const double>> src;
    other.visit([&](const std::string&, std::span<const double> t) { src.push_back(t); });
    std::size_t i = 0;
    visit([&](const std::string&, std::span<double> t) {
      for (std::size_t j = 0; j < t.size(); ++j) t[j] += scale * src[i][j];
      ++i;
    });
  }

  bool operator==(const CmpParams& o) const {
    if (!(geometry == o.geometry)) return false;
    std::vector<double> a, b;
    visit([&](const std::string&, std::span<const double> t) { a.insert(a.end(), t.begin(), t.end()); });
    o.visit([&](const std::string&, std::span<const double> t) { b.insert(b.end(), t.begin(), t.end()); });
    return a == b;
  }

 private:
  template <class Self, class F>
  static void visit_impl(Self& self, F& f) {
    auto span_of = [](auto& t) { return std::span(t.data(), static_cast<std::size_t>(t.size())); };
    for (std::size_t k = 0; k < self.gem.size(); ++k) {
      auto& g = self.gem[k];
      const std::string pre = "gem[" + std::to_string(k) + "].";
      f(pre + "self_w", span_of(g.self_w));
      f(pre + "self_b", span_of(g.self_b));
      f(pre + "nbr_w", span_of(g.nbr_w));
      f(pre + "nbr_b", span_of(g.nbr_b));
      f(pre + "anti_w", span_of(g.anti_w));
      f(pre + "anti_b", span_of(g.anti_b));
      f(pre + "norm_scale", span_of(g.norm_scale));
      f(pre + "norm_shift", span_of(g.norm_shift));
    }
    for (std::size_t l = 0; l < self.head.size(); ++l) {
      auto& d = self.head[l];
      const std::string pre = "head[" + std::to_string(l) + "].";
      f(pre + "w", span_of(d.w));
      f(pre + "b", span_of(d.b));
      if (d.norm_scale.size() > 0) {
        f(pre + "norm_scale", span_of(d.norm_scale));
        f(pre + "norm_shift", span_of(d.norm_shift));
      }
    }
  }
};

/// Fan-in scaled uniform weights and biases, U(-1/sqrt(fan_in), 1/sqrt(fan_in));
/// layer-norm scales 1 and shifts 0.
inline CmpParams init_params(const Geometry& geo, std::uint64_t seed) {
  CmpParams out = CmpParams::zeros(geo);
  Rng rng = make_rng(seed);
  auto fill = [&](auto& t, double fan_in) {
    std::uniform_real_distribution<double> u(-1.0 / std::sqrt(fan_in), 1.0 / std::sqrt(fan_in));
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = u(rng);
  };
  const double e = geo.embed();
  for (auto& g : out.gem) {
    fill(g.self_w, e);
    fill(g.self_b, e);
    fill(g.nbr_w, e);
    fill(g.nbr_b, e);
    fill(g.anti_w, e);
    fill(g.anti_b, e);
    g.norm_scale.setOnes();
  }
  for (auto& d : out.head) {
    const double fan_in = static_cast<double>(d.w.cols());
    fill(d.w, fan_in);
    fill(d.b, fan_in);
    if (d.norm_scale.size() > 0) d.norm_scale.setOnes();
  }
  return out;
}

/// Raised when a forward or backward pass produces a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0)); }

inline double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  return cdf + x * pdf;
}

template <class M>
M gelu_of(const M& z) {
  return z.unaryExpr([](double x) { return gelu(x); });
}

// Row-wise layer norm: returns normalised rows and writes 1/sigma per row.
inline Mat normalize_rows(const Mat& a, Vec& inv_std) {
  const Eigen::Index n = a.rows();
  const double d = static_cast<double>(a.cols());
  Mat out(n, a.cols());
  inv_std.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mean = a.row(i).sum() / d;
    const RowVec c = a.row(i).array() - mean;
    const double var = c.squaredNorm() / d;
    inv_std[i] = 1.0 / std::sqrt(var + kLayerNormEps);
    out.row(i) = c * inv_std[i];
  }
  return out;
}

// Backward of y = scale * xhat + shift per row. Accumulates scale/shift grads
// and returns dL/da.
inline Mat normalize_rows_backward(const Mat& dy, const Mat& xhat, const Vec& inv_std,
                                   const Vec& scale, Vec& dscale, Vec& dshift) {
  const double d = static_cast<double>(dy.cols());
  Mat da(dy.rows(), dy.cols());
  for (Eigen::Index i = 0; i < dy.rows(); ++i) {
    dscale += (dy.row(i).array() * xhat.row(i).array()).matrix().transpose();
    dshift += dy.row(i).transpose();
    const RowVec dxhat = dy.row(i).array() * scale.transpose().array();
    const double mean_dxhat = dxhat.sum() / d;
    const double mean_dxhat_xhat = dxhat.dot(xhat.row(i)) / d;
    da.row(i) = inv_std[i] *
                (dxhat.array() - mean_dxhat - xhat.row(i).array() * mean_dxhat_xhat).matrix();
  }
  return da;
}

inline Mat neighbor_sums(const Graph& g, const Mat& x) {
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (Eigen::Index v = 0; v < x.rows(); ++v) {
    for (VertexId u : g.neighbors(static_cast<VertexId>(v))) out.row(v) += x.row(u);
  }
  return out;
}

template <class M>
void require_finite(const M& m, const std::string& where) {
  if (!m.allFinite()) throw NumericError("non-finite value in " + where);
}

}  // namespace detail

/// Cached activations of one forward pass. `embeddings[k]` is the n x 3p node
/// embedding matrix entering iteration k (`embeddings[0]` is all zeros,
/// `embeddings[K]` the final one).
struct ForwardTrace {
  std::vector<Mat> embeddings;
  std::vector<Mat> neighbor_sum, anti_sum, pre_act, normed;
  std::vector<Vec> inv_std;
  RowVec pooled;
  std::vector<RowVec> head_pre, head_normed, head_out;
  std::vector<double> head_inv_std;
  RowVec final_input;
  double logit = 0.0;
};

/// M(G). An empty graph scores 0 by convention.
inline double score_graph(const CmpParams& params, const Graph& g, ForwardTrace* trace = nullptr) {
  const Geometry& geo = params.geometry;
  const int p = geo.width;
  const int e = geo.embed();
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  ForwardTrace local;
  ForwardTrace& t = trace ? *trace : local;
  t = ForwardTrace{};
  if (n == 0) return 0.0;

  Mat x = Mat::Zero(n, e);
  t.embeddings.push_back(x);
  for (int k = 0; k < geo.iterations; ++k) {
    const GemLayer& L = params.gem[k];
    Mat nbr = detail::neighbor_sums(g, x);
    const RowVec total = x.colwise().sum();
    Mat anti = (-nbr - x).rowwise() + total;
    Mat z(n, e);
    z.leftCols(p) = (x * L.self_w.transpose()).rowwise() + L.self_b.transpose();
    z.middleCols(p, p) = (nbr * L.nbr_w.transpose()).rowwise() + L.nbr_b.transpose();
    z.rightCols(p) = (anti * L.anti_w.transpose()).rowwise() + L.anti_b.transpose();
    Vec inv_std;
    Mat xhat = detail::normalize_rows(detail::gelu_of(z), inv_std);
    x = (xhat.array().rowwise() * L.norm_scale.transpose().array()).matrix().rowwise() +
        L.norm_shift.transpose();
    detail::require_finite(x, "gem[" + std::to_string(k) + "]");
    t.neighbor_sum.push_back(std::move(nbr));
    t.anti_sum.push_back(std::move(anti));
    t.pre_act.push_back(std::move(z));
    t.normed.push_back(std::move(xhat));
    t.inv_std.push_back(std::move(inv_std));
    t.embeddings.push_back(x);
  }

  t.pooled = x.colwise().mean();
  RowVec h = t.pooled;
  const int hidden = geo.layers - 1;
  for (int l = 0; l < hidden; ++l) {
    const DenseLayer& D = params.head[l];
    RowVec z = h * D.w.transpose() + D.b.transpose();
    Vec inv_std;
    Mat xhat = detail::normalize_rows(Mat(detail::gelu_of(z)), inv_std);
    h = xhat.row(0).cwiseProduct(D.norm_scale.transpose()) + D.norm_shift.transpose();
    detail::require_finite(h, "head[" + std::to_string(l) + "]");
    t.head_pre.push_back(std::move(z));
    t.head_normed.push_back(xhat.row(0));
    t.head_inv_std.push_back(inv_std[0]);
    t.head_out.push_back(h);
  }
  t.final_input.resize(2 * p);
  t.final_input << t.head_out.back(), t.head_out.front();
  const DenseLayer& last = params.head.back();
  t.logit = (t.final_input * last.w.transpose())(0, 0) + last.b[0];
  if (!std::isfinite(t.logit)) {
    throw NumericError("non-finite value in head[" + std::to_string(geo.layers - 1) + "]");
  }
  return t.logit;
}

/// Accumulates d(dlogit * M(G))/dtheta into `grads` using a trace from score_graph.
inline void backward_graph(const CmpParams& params, const Graph& g, const ForwardTrace& t,
                           double dlogit, CmpParams& grads) {
  const Geometry& geo = params.geometry;
  const int p = geo.width;
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  if (n == 0 || dlogit == 0.0) return;

  DenseLayer& glast = grads.head.back();
  glast.w.row(0) += dlogit * t.final_input;
  glast.b[0] += dlogit;
  const RowVec dinput = dlogit * params.head.back().w.row(0);

  const int hidden = geo.layers - 1;
  std::vector<RowVec> dh(hidden, RowVec::Zero(p));
  dh[hidden - 1] += dinput.head(p);
  dh[0] += dinput.tail(p);
  RowVec dpooled;
  for (int l = hidden - 1; l >= 0; --l) {
    const DenseLayer& D = params.head[l];
    DenseLayer& G = grads.head[l];
    Vec inv(1);
    inv[0] = t.head_inv_std[l];
    Mat da = detail::normalize_rows_backward(Mat(dh[l]), Mat(t.head_normed[l]), inv, D.norm_scale,
                                             G.norm_scale, G.norm_shift);
    const RowVec dz =
        da.row(0).cwiseProduct(t.head_pre[l].unaryExpr([](double z) { return detail::gelu_grad(z); }));
    const RowVec& in = l == 0 ? t.pooled : t.head_out[l - 1];
    G.w += dz.transpose() * in;
    G.b += dz.transpose();
    const RowVec din = dz * D.w;
    if (l > 0) {
      dh[l - 1] += din;
    } else {
      dpooled = din;
    }
  }
  detail::require_finite(dpooled, "head backward");

  Mat dx = dpooled.replicate(n, 1) / static_cast<double>(n);
  for (int k = geo.iterations - 1; k >= 0; --k) {
    const GemLayer& L = params.gem[k];
    GemLayer& G = grads.gem[k];
    Mat dgelu = detail::normalize_rows_backward(dx, t.normed[k], t.inv_std[k], L.norm_scale,
                                                G.norm_scale, G.norm_shift);
    Mat dz = dgelu.cwiseProduct(t.pre_act[k].unaryExpr([](double z) { return detail::gelu_grad(z); }));
    const Mat& x = t.embeddings[k];
    auto dza = dz.leftCols(p);
    auto dzb = dz.middleCols(p, p);
    auto dzc = dz.rightCols(p);
    G.self_w.noalias() += dza.transpose() * x;
    G.nbr_w.noalias() += dzb.transpose() * t.neighbor_sum[k];
    G.anti_w.noalias() += dzc.transpose() * t.anti_sum[k];
    G.self_b += dza.colwise().sum().transpose();
    G.nbr_b += dzb.colwise().sum().transpose();
    G.anti_b += dzc.colwise().sum().transpose();
    if (k == 0) break;  // embeddings[0] is constant
    const Mat dnbr = dzb * L.nbr_w;
    const Mat danti = dzc * L.anti_w;
    Mat next = dza * L.self_w;
    next += detail::neighbor_sums(g, Mat(dnbr - danti));
    next -= danti;
    next.rowwise() += danti.colwise().sum();
    dx = std::move(next);
    detail::require_finite(dx, "gem[" + std::to_string(k) + "] backward");
  }
}

/// CMP(G, G') = 1 iff M(G) < M(G'); ties give 0.
inline int cmp(const CmpParams& params, const Graph& a, const Graph& b) {
  return score_graph(params, a) < score_graph(params, b) ? 1 : 0;
}

/// Cross-entropy of softmax([s, s']) against `label` (1 means G' is the larger).
inline double pair_loss_from_logits(double s, double s_prime, int label) {
  const double hi = std::max(s, s_prime);
  const double lse = hi + std::log(std::exp(s - hi) + std::exp(s_prime - hi));
  return lse - (label == 1 ? s_prime : s);
}

inline double pair_loss(const CmpParams& params, const Graph& a, const Graph& b, int label) {
  return pair_loss_from_logits(score_graph(params, a), score_graph(params, b), label);
}

struct LossAndGrad {
  double loss = 0.0;
  double logit = 0.0;
  double logit_prime = 0.0;
  CmpParams grads;
};

/// Loss of one labelled pair and its exact gradient with respect to every parameter.
inline LossAndGrad pair_loss_and_grad(const CmpParams& params, const Graph& a, const Graph& b,
                                      int label) {
  if (label != 0 && label != 1) throw std::invalid_argument("pair label must be 0 or 1");
  LossAndGrad out;
  ForwardTrace ta, tb;
  out.logit = score_graph(params, a, &ta);
  out.logit_prime = score_graph(params, b, &tb);
  out.loss = pair_loss_from_logits(out.logit, out.logit_prime, label);
  const double hi = std::max(out.logit, out.logit_prime);
  const double ea = std::exp(out.logit - hi);
  const double eb = std::exp(out.logit_prime - hi);
  const double prob_b = eb / (ea + eb);
  const double d_b = prob_b - (label == 1 ? 1.0 : 0.0);
  out.grads = CmpParams::zeros(params.geometry);
  backward_graph(params, a, ta, -d_b, out.grads);
  backward_graph(params, b, tb, d_b, out.grads);
  return out;
}

}  // namespace dpmis
