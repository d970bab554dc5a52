#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpmis/comparator_net.hpp"

namespace dpmis {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment estimates over the flattened parameter vector.
struct AdamState {
  std::vector<double> m, v;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update of `w` in place.
inline void adam_update(std::span<double> w, std::span<const double> g, AdamState& s,
                        const AdamConfig& cfg) {
  if (w.size() != g.size()) throw std::invalid_argument("adam: parameter/gradient size mismatch");
  if (s.m.empty()) {
    s.m.assign(w.size(), 0.0);
    s.v.assign(w.size(), 0.0);
  }
  if (s.m.size() != w.size()) throw std::invalid_argument("adam: state size mismatch");
  ++s.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(s.step));
  for (std::size_t i = 0; i < w.size(); ++i) {
    s.m[i] = cfg.beta1 * s.m[i] + (1.0 - cfg.beta1) * g[i];
    s.v[i] = cfg.beta2 * s.v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double mhat = s.m[i] / c1;
    const double vhat = s.v[i] / c2;
    w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

inline std::vector<double> flatten(const CmpParams& p) {
  std::vector<double> out;
  out.reserve(p.size());
  p.visit([&](const std::string&, std::span<const double> t) { out.insert(out.end(), t.begin(), t.end()); });
  return out;
}

inline void unflatten(std::span<const double> flat, CmpParams& p) {
  std::size_t off = 0;
  p.visit([&](const std::string&, std::span<double> t) {
    for (double& x : t) x = flat[off++];
  });
}

inline void adam_step(CmpParams& params, const CmpParams& grads, AdamState& state,
                      const AdamConfig& cfg) {
  if (!(params.geometry == grads.geometry)) throw std::invalid_argument("adam: geometry mismatch");
  std::vector<double> w = flatten(params);
  const std::vector<double> g = flatten(grads);
  adam_update(w, g, state, cfg);
  unflatten(w, params);
}

}  // namespace dpmis
