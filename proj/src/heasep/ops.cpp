#include "heasep/ops.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace heasep::nc {

namespace {

bool recording(std::initializer_list<const Tensor*> inputs) {
  if (Tape::active() == nullptr) return false;
  for (const Tensor* t : inputs)
    if (t->requires_grad()) return true;
  return false;
}

std::vector<double>& ensure_grad(TensorData& d) {
  if (d.grad.size() != d.value.size()) d.grad.assign(d.value.size(), 0.0);
  return d.grad;
}

// Output gradient, or nullptr when this node was never reached by backward
// (a dead branch); closures bail out in that case.
const std::vector<double>* out_grad(const TensorData& d) {
  if (d.grad.size() != d.value.size()) return nullptr;
  return &d.grad;
}

using Ptr = std::shared_ptr<TensorData>;

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.rank() == 2 && b.rank() == 2 && a.cols() == b.rows(), ErrorKind::contract,
          "matmul: incompatible shapes");
  const int m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out = make_tensor({m, n}, recording({&a, &b}));
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l < k; ++l) {
      const double av = pa[i * k + l];
      if (av == 0.0) continue;
      const double* brow = pb + l * n;
      double* orow = po + i * n;
      for (int j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  if (out.requires_grad()) {
    Tape::active()->push([ad = a.ptr(), bd = b.ptr(), od = out.ptr(), m, k, n] {
      const auto* g = out_grad(*od);
      if (!g) return;
      if (ad->requires_grad) {
        auto& ga = ensure_grad(*ad);
        for (int i = 0; i < m; ++i)
          for (int l = 0; l < k; ++l) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += (*g)[i * n + j] * bd->value[l * n + j];
            ga[i * k + l] += acc;
          }
      }
      if (bd->requires_grad) {
        auto& gb = ensure_grad(*bd);
        for (int l = 0; l < k; ++l)
          for (int i = 0; i < m; ++i) {
            const double av = ad->value[i * k + l];
            if (av == 0.0) continue;
            for (int j = 0; j < n; ++j) gb[l * n + j] += av * (*g)[i * n + j];
          }
      }
    });
  }
  return out;
}

Tensor matvec(const Tensor& a, const Tensor& x) {
  require(a.rank() == 2 && x.rank() == 1 && a.cols() == x.rows(), ErrorKind::contract,
          "matvec: incompatible shapes");
  const int m = a.rows(), n = a.cols();
  Tensor out = make_tensor({m}, recording({&a, &x}));
  const double* pa = a.data();
  const double* px = x.data();
  double* po = out.data();
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    const double* arow = pa + i * n;
    for (int j = 0; j < n; ++j) acc += arow[j] * px[j];
    po[i] = acc;
  }
  if (out.requires_grad()) {
    Tape::active()->push([ad = a.ptr(), xd = x.ptr(), od = out.ptr(), m, n] {
      const auto* g = out_grad(*od);
      if (!g) return;
      if (ad->requires_grad) {
        auto& ga = ensure_grad(*ad);
        for (int i = 0; i < m; ++i) {
          const double gi = (*g)[i];
          if (gi == 0.0) continue;
          for (int j = 0; j < n; ++j) ga[i * n + j] += gi * xd->value[j];
        }
      }
      if (xd->requires_grad) {
        auto& gx = ensure_grad(*xd);
        for (int i = 0; i < m; ++i) {
          const double gi = (*g)[i];
          if (gi == 0.0) continue;
          const double* arow = ad->value.data() + i * n;
          for (int j = 0; j < n; ++j) gx[j] += gi * arow[j];
        }
      }
    });
  }
  return out;
}

Tensor matvec_t(const Tensor& a, const Tensor& x) {
  require(a.rank() == 2 && x.rank() == 1 && a.rows() == x.rows(), ErrorKind::contract,
          "matvec_t: incompatible shapes");
  const int m = a.rows(), n = a.cols();
  Tensor out = make_tensor({n}, recording({&a, &x}));
  const double* pa = a.data();
  const double* px = x.data();
  double* po = out.data();
  for (int i = 0; i < m; ++i) {
    const double xi = px[i];
    if (xi == 0.0) continue;
    const double* arow = pa + i * n;
    for (int j = 0; j < n; ++j) po[j] += xi * arow[j];
  }
  if (out.requires_grad()) {
    Tape::active()->push([ad = a.ptr(), xd = x.ptr(), od = out.ptr(), m, n] {
      const auto* g = out_grad(*od);
      if (!g) return;
      if (ad->requires_grad) {
        auto& ga = ensure_grad(*ad);
        for (int i = 0; i < m; ++i) {
          const double xi = xd->value[i];
          if (xi == 0.0) continue;
          for (int j = 0; j < n; ++j) ga[i * n + j] += xi * (*g)[j];
        }
      }
      if (xd->requires_grad) {
        auto& gx = ensure_grad(*xd);
        for (int i = 0; i < m; ++i) {
          double acc = 0.0;
          const double* arow = ad->value.data() + i * n;
          for (int j = 0; j < n; ++j) acc += arow[j] * (*g)[j];
          gx[i] += acc;
        }
      }
    });
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  require(a.rank() == 2, ErrorKind::contract, "transpose: rank-2 tensor required");
  const int m = a.rows(), n = a.cols();
  Tensor out = make_tensor({n, m}, recording({&a}));
  const double* pa = a.data();
  double* po = out.data();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) po[j * m + i] = pa[i * n + j];
  if (out.requires_grad()) {
    Tape::active()->push([ad = a.ptr(), od = out.ptr(), m, n] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& ga = ensure_grad(*ad);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) ga[i * n + j] += (*g)[j * m + i];
    });
  }
  return out;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  require(a.shape() == b.shape(), ErrorKind::contract,
          std::string(op) + ": shapes differ");
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  Tensor out = make_tensor(a.shape(), recording({&a, &b}));
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) out.data()[i] = a.data()[i] + b.data()[i];
  if (out.requires_grad()) {
    Tape::active()->push([ad = a.ptr(), bd = b.ptr(), od = out.ptr()] {
      const auto* g = out_grad(*od);
      if (!g) return;
      if (ad->requires_grad) {
        auto& ga = ensure_grad(*ad);
        for (std::size_t i = 0; i < g->size(); ++i) ga[i] += (*g)[i];
      }
      if (bd->requires_grad) {
        auto& gb = ensure_grad(*bd);
        for (std::size_t i = 0; i < g->size(); ++i) gb[i] += (*g)[i];
      }
    });
  }
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  Tensor out = make_tensor(a.shape(), recording({&a, &b}));
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) out.data()[i] = a.data()[i] - b.data()[i];
  if (out.requires_grad()) {
    Tape::active()->push([ad = a.ptr(), bd = b.ptr(), od = out.ptr()] {
      const auto* g = out_grad(*od);
      if (!g) return;
      if (ad->requires_grad) {
        auto& ga = ensure_grad(*ad);
        for (std::size_t i = 0; i < g->size(); ++i) ga[i] += (*g)[i];
      }
      if (bd->requires_grad) {
        auto& gb = ensure_grad(*bd);
        for (std::size_t i = 0; i < g->size(); ++i) gb[i] -= (*g)[i];
      }
    });
  }
  return out;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out = make_tensor(a.shape(), recording({&a}));
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = c * a.data()[i];
  if (out.requires_grad()) {
    Tape::active()->push([ad = a.ptr(), od = out.ptr(), c] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& ga = ensure_grad(*ad);
      for (std::size_t i = 0; i < g->size(); ++i) ga[i] += c * (*g)[i];
    });
  }
  return out;
}

Tensor elementwise_mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "elementwise_mul");
  Tensor out = make_tensor(a.shape(), recording({&a, &b}));
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
  if (out.requires_grad()) {
    Tape::active()->push([ad = a.ptr(), bd = b.ptr(), od = out.ptr()] {
      const auto* g = out_grad(*od);
      if (!g) return;
      if (ad->requires_grad) {
        auto& ga = ensure_grad(*ad);
        for (std::size_t i = 0; i < g->size(); ++i) ga[i] += (*g)[i] * bd->value[i];
      }
      if (bd->requires_grad) {
        auto& gb = ensure_grad(*bd);
        for (std::size_t i = 0; i < g->size(); ++i) gb[i] += (*g)[i] * ad->value[i];
      }
    });
  }
  return out;
}

Tensor row_scale(const Tensor& a, const Tensor& s) {
  require(a.rank() == 2 && s.rank() == 1 && s.rows() == a.rows(), ErrorKind::contract,
          "row_scale: s must have one entry per row of a");
  const int m = a.rows(), n = a.cols();
  Tensor out = make_tensor({m, n}, recording({&a, &s}));
  for (int i = 0; i < m; ++i) {
    const double si = s.data()[i];
    for (int j = 0; j < n; ++j) out.data()[i * n + j] = a.data()[i * n + j] * si;
  }
  if (out.requires_grad()) {
    Tape::active()->push([ad = a.ptr(), sd = s.ptr(), od = out.ptr(), m, n] {
      const auto* g = out_grad(*od);
      if (!g) return;
      if (ad->requires_grad) {
        auto& ga = ensure_grad(*ad);
        for (int i = 0; i < m; ++i) {
          const double si = sd->value[i];
          if (si == 0.0) continue;
          for (int j = 0; j < n; ++j) ga[i * n + j] += (*g)[i * n + j] * si;
        }
      }
      if (sd->requires_grad) {
        auto& gs = ensure_grad(*sd);
        for (int i = 0; i < m; ++i) {
          double acc = 0.0;
          for (int j = 0; j < n; ++j) acc += (*g)[i * n + j] * ad->value[i * n + j];
          gs[i] += acc;
        }
      }
    });
  }
  return out;
}

Tensor concat(std::span<const Tensor> parts, int axis) {
  require(!parts.empty(), ErrorKind::contract, "concat: no inputs");
  require(axis == 0, ErrorKind::contract, "concat: only axis 0 is supported");
  const int rank = parts[0].rank();
  require(rank == 1 || rank == 2, ErrorKind::contract, "concat: rank-1 or rank-2 inputs");
  const int cols = parts[0].cols();
  int total_rows = 0;
  bool rec = false;
  for (const Tensor& p : parts) {
    require(p.rank() == rank && p.cols() == cols, ErrorKind::contract,
            "concat: inputs disagree in rank or width");
    total_rows += p.rows();
    rec = rec || p.requires_grad();
  }
  rec = rec && Tape::active() != nullptr;
  std::vector<int> shape = rank == 1 ? std::vector<int>{total_rows}
                                     : std::vector<int>{total_rows, cols};
  Tensor out = make_tensor(std::move(shape), rec);
  std::size_t offset = 0;
  for (const Tensor& p : parts) {
    std::copy(p.data(), p.data() + p.size(), out.data() + offset);
    offset += p.size();
  }
  if (out.requires_grad()) {
    std::vector<Ptr> inputs;
    inputs.reserve(parts.size());
    for (const Tensor& p : parts) inputs.push_back(p.ptr());
    Tape::active()->push([inputs = std::move(inputs), od = out.ptr()] {
      const auto* g = out_grad(*od);
      if (!g) return;
      std::size_t off = 0;
      for (const auto& in : inputs) {
        if (in->requires_grad) {
          auto& gi = ensure_grad(*in);
          for (std::size_t i = 0; i < in->value.size(); ++i) gi[i] += (*g)[off + i];
        }
        off += in->value.size();
      }
    });
  }
  return out;
}

Tensor slice(const Tensor& v, int start, int len) {
  require(v.rank() == 1, ErrorKind::contract, "slice: rank-1 tensor required");
  require(start >= 0 && len >= 0 && start + len <= v.rows(), ErrorKind::contract,
          "slice: range out of bounds");
  Tensor out = make_tensor({len}, recording({&v}));
  std::copy(v.data() + start, v.data() + start + len, out.data());
  if (out.requires_grad()) {
    Tape::active()->push([vd = v.ptr(), od = out.ptr(), start, len] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& gv = ensure_grad(*vd);
      for (int i = 0; i < len; ++i) gv[static_cast<std::size_t>(start + i)] += (*g)[i];
    });
  }
  return out;
}

Tensor lookup(const Tensor& table, int index) {
  require(table.rank() == 2, ErrorKind::contract, "lookup: rank-2 table required");
  require(index >= 0 && index < table.rows(), ErrorKind::contract,
          "lookup: index out of range");
  const int n = table.cols();
  Tensor out = make_tensor({n}, recording({&table}));
  std::copy(table.data() + index * n, table.data() + (index + 1) * n, out.data());
  if (out.requires_grad()) {
    Tape::active()->push([td = table.ptr(), od = out.ptr(), index, n] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& gt = ensure_grad(*td);
      for (int j = 0; j < n; ++j) gt[index * n + j] += (*g)[j];
    });
  }
  return out;
}

Tensor lookup_rows(const Tensor& table, std::span<const int> idx) {
  require(table.rank() == 2, ErrorKind::contract, "lookup_rows: rank-2 table required");
  const int n = table.cols();
  for (int i : idx)
    require(i >= 0 && i < table.rows(), ErrorKind::contract, "lookup_rows: index out of range");
  Tensor out = make_tensor({static_cast<int>(idx.size()), n}, recording({&table}));
  for (std::size_t r = 0; r < idx.size(); ++r)
    std::copy(table.data() + idx[r] * n, table.data() + (idx[r] + 1) * n,
              out.data() + r * static_cast<std::size_t>(n));
  if (out.requires_grad()) {
    std::vector<int> indices(idx.begin(), idx.end());
    Tape::active()->push([td = table.ptr(), od = out.ptr(), indices = std::move(indices), n] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& gt = ensure_grad(*td);
      for (std::size_t r = 0; r < indices.size(); ++r)
        for (int j = 0; j < n; ++j)
          gt[indices[r] * n + j] += (*g)[r * static_cast<std::size_t>(n) + j];
    });
  }
  return out;
}

Tensor softmax(const Tensor& v) {
  require(v.rank() == 1 && v.rows() > 0, ErrorKind::contract, "softmax: nonempty vector required");
  const int n = v.rows();
  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double x = v.data()[i];
    require(!std::isnan(x) && x < std::numeric_limits<double>::infinity(), ErrorKind::numeric,
            "softmax: input must not be NaN or +inf");
    if (x > mx) mx = x;
  }
  require(std::isfinite(mx), ErrorKind::contract, "softmax: all inputs are -inf");
  Tensor out = make_tensor({n}, recording({&v}));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = std::exp(v.data()[i] - mx);
    out.data()[i] = e;
    total += e;
  }
  for (int i = 0; i < n; ++i) out.data()[i] /= total;
  if (out.requires_grad()) {
    Tape::active()->push([vd = v.ptr(), od = out.ptr(), n] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& gv = ensure_grad(*vd);
      double dotp = 0.0;
      for (int i = 0; i < n; ++i) dotp += (*g)[i] * od->value[i];
      for (int i = 0; i < n; ++i) gv[i] += od->value[i] * ((*g)[i] - dotp);
    });
  }
  return out;
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = make_tensor(x.shape(), recording({&x}));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x.data()[i];
    out.data()[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v))
                             : std::exp(v) / (1.0 + std::exp(v));
  }
  if (out.requires_grad()) {
    Tape::active()->push([xd = x.ptr(), od = out.ptr()] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& gx = ensure_grad(*xd);
      for (std::size_t i = 0; i < g->size(); ++i) {
        const double y = od->value[i];
        gx[i] += (*g)[i] * y * (1.0 - y);
      }
    });
  }
  return out;
}

Tensor tanh(const Tensor& x) {
  Tensor out = make_tensor(x.shape(), recording({&x}));
  for (std::size_t i = 0; i < x.size(); ++i) out.data()[i] = std::tanh(x.data()[i]);
  if (out.requires_grad()) {
    Tape::active()->push([xd = x.ptr(), od = out.ptr()] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& gx = ensure_grad(*xd);
      for (std::size_t i = 0; i < g->size(); ++i) {
        const double y = od->value[i];
        gx[i] += (*g)[i] * (1.0 - y * y);
      }
    });
  }
  return out;
}

Tensor sum(const Tensor& x) {
  Tensor out = make_tensor({}, recording({&x}));
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x.data()[i];
  out.data()[0] = acc;
  if (out.requires_grad()) {
    Tape::active()->push([xd = x.ptr(), od = out.ptr()] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& gx = ensure_grad(*xd);
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += (*g)[0];
    });
  }
  return out;
}

Tensor dot(const Tensor& a, const Tensor& b) {
  require(a.rank() == 1 && b.rank() == 1 && a.rows() == b.rows(), ErrorKind::contract,
          "dot: rank-1 tensors of equal length required");
  Tensor out = make_tensor({}, recording({&a, &b}));
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * b.data()[i];
  out.data()[0] = acc;
  if (out.requires_grad()) {
    Tape::active()->push([ad = a.ptr(), bd = b.ptr(), od = out.ptr()] {
      const auto* g = out_grad(*od);
      if (!g) return;
      const double gv = (*g)[0];
      if (ad->requires_grad) {
        auto& ga = ensure_grad(*ad);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gv * bd->value[i];
      }
      if (bd->requires_grad) {
        auto& gb = ensure_grad(*bd);
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += gv * ad->value[i];
      }
    });
  }
  return out;
}

Tensor mask_fill(const Tensor& v, std::span<const std::uint8_t> keep, double fill) {
  require(v.rank() == 1, ErrorKind::contract, "mask_fill: rank-1 tensor required");
  require(keep.size() == v.size(), ErrorKind::contract, "mask_fill: mask length mismatch");
  Tensor out = make_tensor(v.shape(), recording({&v}));
  for (std::size_t i = 0; i < v.size(); ++i) out.data()[i] = keep[i] ? v.data()[i] : fill;
  if (out.requires_grad()) {
    std::vector<std::uint8_t> mask(keep.begin(), keep.end());
    Tape::active()->push([vd = v.ptr(), od = out.ptr(), mask = std::move(mask)] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& gv = ensure_grad(*vd);
      for (std::size_t i = 0; i < gv.size(); ++i)
        if (mask[i]) gv[i] += (*g)[i];
    });
  }
  return out;
}

Tensor zero_rows(const Tensor& a, std::span<const std::uint8_t> keep) {
  require(a.rank() == 2, ErrorKind::contract, "zero_rows: rank-2 tensor required");
  require(keep.size() == static_cast<std::size_t>(a.rows()), ErrorKind::contract,
          "zero_rows: mask length mismatch");
  const int m = a.rows(), n = a.cols();
  Tensor out = make_tensor({m, n}, recording({&a}));
  for (int i = 0; i < m; ++i) {
    if (!keep[static_cast<std::size_t>(i)]) continue;
    std::copy(a.data() + i * n, a.data() + (i + 1) * n, out.data() + i * n);
  }
  if (out.requires_grad()) {
    std::vector<std::uint8_t> mask(keep.begin(), keep.end());
    Tape::active()->push([ad = a.ptr(), od = out.ptr(), mask = std::move(mask), m, n] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& ga = ensure_grad(*ad);
      for (int i = 0; i < m; ++i) {
        if (!mask[static_cast<std::size_t>(i)]) continue;
        for (int j = 0; j < n; ++j) ga[i * n + j] += (*g)[i * n + j];
      }
    });
  }
  return out;
}

Tensor bce(const Tensor& prob, double target, double eps) {
  require(prob.size() == 1, ErrorKind::contract, "bce: scalar probability required");
  require(target == 0.0 || target == 1.0, ErrorKind::contract, "bce: target must be 0 or 1");
  const double p_raw = prob.data()[0];
  const double p = p_raw < eps ? eps : (p_raw > 1.0 - eps ? 1.0 - eps : p_raw);
  Tensor out = make_tensor({}, recording({&prob}));
  out.data()[0] = -(target * std::log(p) + (1.0 - target) * std::log(1.0 - p));
  if (out.requires_grad()) {
    Tape::active()->push([pd = prob.ptr(), od = out.ptr(), target, eps] {
      const auto* g = out_grad(*od);
      if (!g) return;
      auto& gp = ensure_grad(*pd);
      const double p_now = pd->value[0];
      if (p_now < eps || p_now > 1.0 - eps) return;  // clamped: flat
      gp[0] += (*g)[0] * (p_now - target) / (p_now * (1.0 - p_now));
    });
  }
  return out;
}

}  // namespace heasep::nc
