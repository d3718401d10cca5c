// Copyright 2026 The Linkgate Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "linkgate/tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "linkgate/error.hpp"
#include "linkgate/tensor/kernels.hpp"

namespace linkgate::ops {
namespace {

const kernels::KernelSet& ks() { return kernels::active(); }

[[noreturn]] void shape_error(const char* op, const Shape& a, const Shape& b) {
  throw ConfigError(std::string(op) + ": shape mismatch " + shape_string(a) + " vs " +
                    shape_string(b));
}

[[noreturn]] void rank_error(const char* op, const Shape& a) {
  throw ConfigError(std::string(op) + ": unsupported shape " + shape_string(a));
}

void require_same(const char* op, const Var& a, const Var& b) {
  if (a.shape() != b.shape()) shape_error(op, a.shape(), b.shape());
}

Var emit(const Var& first, Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return first.tape()->record(std::move(value), inputs, std::move(fn));
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Index layout of softmax groups: `count` groups of `length` elements, element
// j of group g lives at base(g) + j * stride.
struct Groups {
  std::size_t count, length, stride, outer_stride;
  std::size_t at(std::size_t g, std::size_t j) const { return g * outer_stride + j * stride; }
};

Groups softmax_groups(const Shape& s, std::size_t axis, const char* op) {
  if (s.size() == 1 && axis == 0) return {1, s[0], 1, 0};
  if (s.size() == 2 && axis == 1) return {s[0], s[1], 1, s[1]};
  if (s.size() == 2 && axis == 0) return {s[1], s[0], s[1], 1};
  rank_error(op, s);
}

Tensor softmax_values(const Tensor& x, const Groups& gr, const std::vector<bool>* mask) {
  Tensor y(x.shape());
  for (std::size_t g = 0; g < gr.count; ++g) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < gr.length; ++j) {
      if (mask && !(*mask)[j]) continue;
      mx = std::max(mx, x[gr.at(g, j)]);
    }
    double total = 0.0;
    for (std::size_t j = 0; j < gr.length; ++j) {
      if (mask && !(*mask)[j]) continue;
      const double e = std::exp(x[gr.at(g, j)] - mx);
      y[gr.at(g, j)] = e;
      total += e;
    }
    for (std::size_t j = 0; j < gr.length; ++j) y[gr.at(g, j)] /= total;
  }
  return y;
}

// dx = y * (g - sum(g * y)) within each group.
void softmax_backward(const Tensor& y, const Tensor& g, const Groups& gr, Tensor& dx) {
  for (std::size_t grp = 0; grp < gr.count; ++grp) {
    double s = 0.0;
    for (std::size_t j = 0; j < gr.length; ++j) s += g[gr.at(grp, j)] * y[gr.at(grp, j)];
    for (std::size_t j = 0; j < gr.length; ++j) {
      const std::size_t i = gr.at(grp, j);
      dx[i] += y[i] * (g[i] - s);
    }
  }
}

}  // namespace

Var add(Var a, Var b) {
  require_same("add", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return emit(a, std::move(out), {a, b}, [a, b](BackwardContext& ctx) {
    const Tensor& g = ctx.grad_out();
    for (const Var& in : {a, b}) {
      if (Tensor* d = ctx.grad(in)) ks().axpy(1.0, g.data().data(), d->data().data(), g.size());
    }
  });
}

Var sub(Var a, Var b) {
  require_same("sub", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return emit(a, std::move(out), {a, b}, [a, b](BackwardContext& ctx) {
    const Tensor& g = ctx.grad_out();
    if (Tensor* d = ctx.grad(a)) ks().axpy(1.0, g.data().data(), d->data().data(), g.size());
    if (Tensor* d = ctx.grad(b)) ks().axpy(-1.0, g.data().data(), d->data().data(), g.size());
  });
}

Var mul(Var a, Var b) {
  require_same("mul", a, b);
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return emit(a, std::move(out), {a, b}, [a, b](BackwardContext& ctx) {
    const Tensor& g = ctx.grad_out();
    if (Tensor* d = ctx.grad(a)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*d)[i] += g[i] * b.value()[i];
    }
    if (Tensor* d = ctx.grad(b)) {
      for (std::size_t i = 0; i < g.size(); ++i) (*d)[i] += g[i] * a.value()[i];
    }
  });
}

Var scale(Var a, Var s) {
  if (s.size() != 1) shape_error("scale", a.shape(), s.shape());
  const double c = s.value()[0];
  Tensor out = a.value();
  for (double& v : out.data()) v *= c;
  return emit(a, std::move(out), {a, s}, [a, s](BackwardContext& ctx) {
    const Tensor& g = ctx.grad_out();
    if (Tensor* d = ctx.grad(a)) ks().axpy(s.value()[0], g.data().data(), d->data().data(), g.size());
    if (Tensor* d = ctx.grad(s)) (*d)[0] += ks().dot(g.data().data(), a.value().data().data(), g.size());
  });
}

Var scale(Var a, double c) {
  Tensor out = a.value();
  for (double& v : out.data()) v *= c;
  return emit(a, std::move(out), {a}, [a, c](BackwardContext& ctx) {
    const Tensor& g = ctx.grad_out();
    if (Tensor* d = ctx.grad(a)) ks().axpy(c, g.data().data(), d->data().data(), g.size());
  });
}

Var one_minus(Var a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = 1.0 - v;
  return emit(a, std::move(out), {a}, [a](BackwardContext& ctx) {
    const Tensor& g = ctx.grad_out();
    if (Tensor* d = ctx.grad(a)) ks().axpy(-1.0, g.data().data(), d->data().data(), g.size());
  });
}

Var add_rowwise(Var m, Var v) {
  const Shape& ms = m.shape();
  if (ms.size() != 2 || v.shape().size() != 1 || v.shape()[0] != ms[1]) {
    shape_error("add_rowwise", ms, v.shape());
  }
  Tensor out = m.value();
  for (std::size_t r = 0; r < ms[0]; ++r) {
    ks().axpy(1.0, v.value().data().data(), out.row(r).data(), ms[1]);
  }
  return emit(m, std::move(out), {m, v}, [m, v](BackwardContext& ctx) {
    const Tensor& g = ctx.grad_out();
    if (Tensor* d = ctx.grad(m)) ks().axpy(1.0, g.data().data(), d->data().data(), g.size());
    if (Tensor* d = ctx.grad(v)) {
      for (std::size_t r = 0; r < g.dim(0); ++r) {
        ks().axpy(1.0, g.row(r).data(), d->data().data(), g.dim(1));
      }
    }
  });
}

Var matmul(Var a, Var b) {
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (as.size() == 2 && bs.size() == 2) {
    if (as[1] != bs[0]) shape_error("matmul", as, bs);
    const std::size_t m = as[0], k = as[1], n = bs[1];
    Tensor out({m, n});
    kernels::gemm_nn(ks(), m, k, n, a.value().data().data(), b.value().data().data(),
                     out.data().data(), false);
    return emit(a, std::move(out), {a, b}, [a, b, m, k, n](BackwardContext& ctx) {
      const double* g = ctx.grad_out().data().data();
      if (Tensor* d = ctx.grad(a)) {
        kernels::gemm_nt(ks(), m, n, k, g, b.value().data().data(), d->data().data(), true);
      }
      if (Tensor* d = ctx.grad(b)) {
        kernels::gemm_tn(ks(), k, m, n, a.value().data().data(), g, d->data().data(), true);
      }
    });
  }
  if (as.size() == 2 && bs.size() == 1) {
    if (as[1] != bs[0]) shape_error("matmul", as, bs);
    const std::size_t m = as[0], k = as[1];
    Tensor out({m});
    kernels::gemm_nt(ks(), m, k, 1, a.value().data().data(), b.value().data().data(),
                     out.data().data(), false);
    return emit(a, std::move(out), {a, b}, [a, b, m, k](BackwardContext& ctx) {
      const double* g = ctx.grad_out().data().data();
      if (Tensor* d = ctx.grad(a)) {
        kernels::gemm_nn(ks(), m, 1, k, g, b.value().data().data(), d->data().data(), true);
      }
      if (Tensor* d = ctx.grad(b)) {
        kernels::gemm_tn(ks(), k, m, 1, a.value().data().data(), g, d->data().data(), true);
      }
    });
  }
  if (as.size() == 1 && bs.size() == 2) {
    if (as[0] != bs[0]) shape_error("matmul", as, bs);
    const std::size_t k = bs[0], n = bs[1];
    Tensor out({n});
    kernels::gemm_nn(ks(), 1, k, n, a.value().data().data(), b.value().data().data(),
                     out.data().data(), false);
    return emit(a, std::move(out), {a, b}, [a, b, k, n](BackwardContext& ctx) {
      const double* g = ctx.grad_out().data().data();
      if (Tensor* d = ctx.grad(a)) {
        kernels::gemm_nt(ks(), 1, n, k, g, b.value().data().data(), d->data().data(), true);
      }
      if (Tensor* d = ctx.grad(b)) {
        kernels::gemm_nn(ks(), k, 1, n, a.value().data().data(), g, d->data().data(), true);
      }
    });
  }
  shape_error("matmul", as, bs);
}

Var matmul_nt(Var a, Var b) {
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (as.size() != 2 || bs.size() != 2 || as[1] != bs[1]) shape_error("matmul_nt", as, bs);
  const std::size_t m = as[0], k = as[1], n = bs[0];
  Tensor out({m, n});
  kernels::gemm_nt(ks(), m, k, n, a.value().data().data(), b.value().data().data(),
                   out.data().data(), false);
  return emit(a, std::move(out), {a, b}, [a, b, m, k, n](BackwardContext& ctx) {
    const double* g = ctx.grad_out().data().data();
    if (Tensor* d = ctx.grad(a)) {
      kernels::gemm_nn(ks(), m, n, k, g, b.value().data().data(), d->data().data(), true);
    }
    if (Tensor* d = ctx.grad(b)) {
      kernels::gemm_tn(ks(), n, m, k, g, a.value().data().data(), d->data().data(), true);
    }
  });
}

Var dot(Var a, Var b) {
  if (a.shape().size() != 1) rank_error("dot", a.shape());
  require_same("dot", a, b);
  const std::size_t n = a.size();
  Tensor out = Tensor::scalar(ks().dot(a.value().data().data(), b.value().data().data(), n));
  return emit(a, std::move(out), {a, b}, [a, b, n](BackwardContext& ctx) {
    const double g = ctx.grad_out()[0];
    if (Tensor* d = ctx.grad(a)) ks().axpy(g, b.value().data().data(), d->data().data(), n);
    if (Tensor* d = ctx.grad(b)) ks().axpy(g, a.value().data().data(), d->data().data(), n);
  });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw ConfigError("concat: no inputs");
  std::vector<double> values;
  std::vector<std::size_t> offsets;
  for (const Var& p : parts) {
    if (p.shape().size() != 1) rank_error("concat", p.shape());
    offsets.push_back(values.size());
    values.insert(values.end(), p.value().data().begin(), p.value().data().end());
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  Tensor out = Tensor::vector(std::move(values));
  return parts.front().tape()->record(
      std::move(out), parts, [inputs, offsets](BackwardContext& ctx) {
        const Tensor& g = ctx.grad_out();
        for (std::size_t i = 0; i < inputs.size(); ++i) {
          if (Tensor* d = ctx.grad(inputs[i])) {
            ks().axpy(1.0, g.data().data() + offsets[i], d->data().data(), d->size());
          }
        }
      });
}

Var stack_rows(std::span<const Var> rows) {
  if (rows.empty()) throw ConfigError("stack_rows: no inputs");
  const Shape& first = rows.front().shape();
  if (first.size() != 1) rank_error("stack_rows", first);
  const std::size_t cols = first[0];
  std::vector<double> values;
  values.reserve(rows.size() * cols);
  for (const Var& r : rows) {
    if (r.shape() != first) shape_error("stack_rows", first, r.shape());
    values.insert(values.end(), r.value().data().begin(), r.value().data().end());
  }
  std::vector<Var> inputs(rows.begin(), rows.end());
  Tensor out = Tensor::matrix(rows.size(), cols, std::move(values));
  return rows.front().tape()->record(std::move(out), rows, [inputs, cols](BackwardContext& ctx) {
    const Tensor& g = ctx.grad_out();
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (Tensor* d = ctx.grad(inputs[i])) {
        ks().axpy(1.0, g.row(i).data(), d->data().data(), cols);
      }
    }
  });
}

Var slice(Var a, std::size_t begin, std::size_t length) {
  if (a.shape().size() != 1 || begin + length > a.size()) {
    throw ConfigError("slice: range [" + std::to_string(begin) + ", " +
                      std::to_string(begin + length) + ") outside shape " +
                      shape_string(a.shape()));
  }
  const auto src = a.value().data().subspan(begin, length);
  Tensor out = Tensor::vector(std::vector<double>(src.begin(), src.end()));
  return emit(a, std::move(out), {a}, [a, begin, length](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(a)) {
      ks().axpy(1.0, ctx.grad_out().data().data(), d->data().data() + begin, length);
    }
  });
}

Var row(Var m, std::size_t r) {
  const std::size_t ids[] = {r};
  return reshape(gather_rows(m, ids), Shape{m.shape().at(1)});
}

Var gather_rows(Var m, std::span<const std::size_t> ids) {
  const Shape& ms = m.shape();
  if (ms.size() != 2) rank_error("gather_rows", ms);
  const std::size_t cols = ms[1];
  Tensor out({ids.size(), cols});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= ms[0]) {
      throw ConfigError("gather_rows: row " + std::to_string(ids[i]) + " outside shape " +
                        shape_string(ms));
    }
    const auto src = m.value().row(ids[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  std::vector<std::size_t> rows(ids.begin(), ids.end());
  return emit(m, std::move(out), {m}, [m, rows, cols](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(m)) {
      const Tensor& g = ctx.grad_out();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        ks().axpy(1.0, g.row(i).data(), d->row(rows[i]).data(), cols);
      }
    }
  });
}

Var reshape(Var a, Shape shape) {
  if (shape_size(shape) != a.size()) shape_error("reshape", a.shape(), shape);
  Tensor out(std::move(shape), a.value().values());
  return emit(a, std::move(out), {a}, [a](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(a)) {
      ks().axpy(1.0, ctx.grad_out().data().data(), d->data().data(), d->size());
    }
  });
}

Var tanh(Var a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = std::tanh(v);
  Tensor cache = out;
  return emit(a, std::move(out), {a}, [a, cache = std::move(cache)](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(a)) {
      const Tensor& g = ctx.grad_out();
      for (std::size_t i = 0; i < g.size(); ++i) (*d)[i] += g[i] * (1.0 - cache[i] * cache[i]);
    }
  });
}

Var sigmoid(Var a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = stable_sigmoid(v);
  Tensor cache = out;
  return emit(a, std::move(out), {a}, [a, cache = std::move(cache)](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(a)) {
      const Tensor& g = ctx.grad_out();
      for (std::size_t i = 0; i < g.size(); ++i) (*d)[i] += g[i] * cache[i] * (1.0 - cache[i]);
    }
  });
}

Var log(Var a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = std::log(v);
  return emit(a, std::move(out), {a}, [a](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(a)) {
      const Tensor& g = ctx.grad_out();
      for (std::size_t i = 0; i < g.size(); ++i) (*d)[i] += g[i] / a.value()[i];
    }
  });
}

Var softmax(Var a, std::size_t axis) {
  const Groups gr = softmax_groups(a.shape(), axis, "softmax");
  Tensor out = softmax_values(a.value(), gr, nullptr);
  Tensor cache = out;
  return emit(a, std::move(out), {a}, [a, gr, cache = std::move(cache)](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(a)) softmax_backward(cache, ctx.grad_out(), gr, *d);
  });
}

Var masked_softmax(Var a, const std::vector<bool>& mask) {
  const Shape& s = a.shape();
  const Groups gr = softmax_groups(s, s.size() - 1, "masked_softmax");
  if (mask.size() != gr.length) {
    throw ConfigError("masked_softmax: mask length " + std::to_string(mask.size()) +
                      " vs shape " + shape_string(s));
  }
  if (std::find(mask.begin(), mask.end(), true) == mask.end()) {
    throw ConfigError("masked_softmax: mask selects no entries");
  }
  Tensor out = softmax_values(a.value(), gr, &mask);
  Tensor cache = out;
  return emit(a, std::move(out), {a}, [a, gr, cache = std::move(cache)](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(a)) softmax_backward(cache, ctx.grad_out(), gr, *d);
  });
}

Var log_softmax(Var a) {
  if (a.shape().size() != 1) rank_error("log_softmax", a.shape());
  const Groups gr{1, a.size(), 1, 0};
  Tensor probs = softmax_values(a.value(), gr, nullptr);
  const double mx = *std::max_element(a.value().data().begin(), a.value().data().end());
  double total = 0.0;
  for (double v : a.value().data()) total += std::exp(v - mx);
  const double lse = mx + std::log(total);
  Tensor out = a.value();
  for (double& v : out.data()) v -= lse;
  return emit(a, std::move(out), {a}, [a, probs = std::move(probs)](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(a)) {
      const Tensor& g = ctx.grad_out();
      double gs = 0.0;
      for (double v : g.data()) gs += v;
      for (std::size_t i = 0; i < g.size(); ++i) (*d)[i] += g[i] - probs[i] * gs;
    }
  });
}

Var logsumexp(Var a) {
  if (a.shape().size() != 1 || a.size() == 0) rank_error("logsumexp", a.shape());
  const Groups gr{1, a.size(), 1, 0};
  Tensor probs = softmax_values(a.value(), gr, nullptr);
  const double mx = *std::max_element(a.value().data().begin(), a.value().data().end());
  double total = 0.0;
  for (double v : a.value().data()) total += std::exp(v - mx);
  Tensor out = Tensor::scalar(mx + std::log(total));
  return emit(a, std::move(out), {a}, [a, probs = std::move(probs)](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(a)) ks().axpy(ctx.grad_out()[0], probs.data().data(), d->data().data(), d->size());
  });
}

Var sum(Var a) {
  double total = 0.0;
  for (double v : a.value().data()) total += v;
  return emit(a, Tensor::scalar(total), {a}, [a](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(a)) {
      const double g = ctx.grad_out()[0];
      for (double& v : d->data()) v += g;
    }
  });
}

Var mean(Var a) {
  if (a.size() == 0) rank_error("mean", a.shape());
  return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Var pick(Var a, std::size_t index) {
  if (index >= a.size()) {
    throw ConfigError("pick: index " + std::to_string(index) + " outside shape " +
                      shape_string(a.shape()));
  }
  return emit(a, Tensor::scalar(a.value()[index]), {a}, [a, index](BackwardContext& ctx) {
    if (Tensor* d = ctx.grad(a)) (*d)[index] += ctx.grad_out()[0];
  });
}

Var nll_loss(Var log_probs, std::size_t target) { return scale(pick(log_probs, target), -1.0); }

Var mask_normalize(Var p, const std::vector<bool>& mask) {
  if (p.shape().size() != 1 || mask.size() != p.size()) {
    throw ConfigError("mask_normalize: mask length " + std::to_string(mask.size()) +
                      " vs shape " + shape_string(p.shape()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) total += p.value()[i];
  }
  if (!(total > 0.0)) throw ConfigError("mask_normalize: no probability mass under mask");
  Tensor out(p.shape());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out[i] = p.value()[i] / total;
  }
  Tensor cache = out;
  return emit(p, std::move(out), {p},
              [p, mask, total, cache = std::move(cache)](BackwardContext& ctx) {
                if (Tensor* d = ctx.grad(p)) {
                  const Tensor& g = ctx.grad_out();
                  double gq = 0.0;
                  for (std::size_t i = 0; i < g.size(); ++i) gq += g[i] * cache[i];
                  for (std::size_t i = 0; i < g.size(); ++i) {
                    if (mask[i]) (*d)[i] += (g[i] - gq) / total;
                  }
                }
              });
}

Var pairwise_additive_scores(Var h, Var w, Var v) {
  const Shape& hs = h.shape();
  const Shape& ws = w.shape();
  if (hs.size() != 2 || ws.size() != 2 || ws[1] != 2 * hs[1]) {
    shape_error("pairwise_additive_scores", hs, ws);
  }
  if (v.shape().size() != 1 || v.shape()[0] != ws[0]) {
    shape_error("pairwise_additive_scores", ws, v.shape());
  }
  const std::size_t n = hs[0], d = hs[1], k = ws[0];
  // Split W = [W_left | W_right] and project every entity once.
  Tensor wl({k, d}), wr({k, d});
  for (std::size_t r = 0; r < k; ++r) {
    const auto src = w.value().row(r);
    std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(d), wl.row(r).begin());
    std::copy(src.begin() + static_cast<std::ptrdiff_t>(d), src.end(), wr.row(r).begin());
  }
  Tensor left({n, k}), right({n, k});
  kernels::gemm_nt(ks(), n, d, k, h.value().data().data(), wl.data().data(), left.data().data(), false);
  kernels::gemm_nt(ks(), n, d, k, h.value().data().data(), wr.data().data(), right.data().data(), false);

  Tensor out({n, n});
  Tensor act({n * n, k});
  const double* vv = v.value().data().data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double* t = act.row(i * n + j).data();
      for (std::size_t c = 0; c < k; ++c) t[c] = std::tanh(left.at(i, c) + right.at(j, c));
      out.at(i, j) = ks().dot(t, vv, k);
    }
  }
  if (!h.tape()->recording()) return emit(h, std::move(out), {h, w, v}, {});

  return emit(h, std::move(out), {h, w, v},
              [h, w, v, n, d, k, wl = std::move(wl), wr = std::move(wr),
               act = std::move(act)](BackwardContext& ctx) {
                const Tensor& g = ctx.grad_out();
                Tensor dleft({n, k}), dright({n, k});
                Tensor* dv = ctx.grad(v);
                const double* vv = v.value().data().data();
                std::vector<double> pre(k);
                for (std::size_t i = 0; i < n; ++i) {
                  for (std::size_t j = 0; j < n; ++j) {
                    const double gij = g.at(i, j);
                    if (gij == 0.0) continue;
                    const double* t = act.row(i * n + j).data();
                    if (dv) ks().axpy(gij, t, dv->data().data(), k);
                    for (std::size_t c = 0; c < k; ++c) pre[c] = gij * vv[c] * (1.0 - t[c] * t[c]);
                    ks().axpy(1.0, pre.data(), dleft.row(i).data(), k);
                    ks().axpy(1.0, pre.data(), dright.row(j).data(), k);
                  }
                }
                if (Tensor* dh = ctx.grad(h)) {
                  kernels::gemm_nn(ks(), n, k, d, dleft.data().data(), wl.data().data(), dh->data().data(), true);
                  kernels::gemm_nn(ks(), n, k, d, dright.data().data(), wr.data().data(), dh->data().data(), true);
                }
                if (Tensor* dw = ctx.grad(w)) {
                  Tensor dwl({k, d}), dwr({k, d});
                  kernels::gemm_tn(ks(), k, n, d, dleft.data().data(), h.value().data().data(), dwl.data().data(), false);
                  kernels::gemm_tn(ks(), k, n, d, dright.data().data(), h.value().data().data(), dwr.data().data(), false);
                  for (std::size_t r = 0; r < k; ++r) {
                    ks().axpy(1.0, dwl.row(r).data(), dw->row(r).data(), d);
                    ks().axpy(1.0, dwr.row(r).data(), dw->row(r).data() + d, d);
                  }
                }
              });
}

}  // namespace linkgate::ops
