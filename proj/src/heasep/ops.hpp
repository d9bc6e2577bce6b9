#ifndef HEASEP_OPS_HPP
#define HEASEP_OPS_HPP

#include <cstdint>
#include <span>

#include "heasep/tensor.hpp"

namespace heasep::nc {

// Differentiable primitives. Each computes its forward value and, when a
// tape is active and any input requires a gradient, records a backward
// closure on it. Shape violations raise ErrorKind::contract.

Tensor matmul(const Tensor& a, const Tensor& b);      // (m,k)x(k,n) -> (m,n)
Tensor matvec(const Tensor& a, const Tensor& x);      // (m,n)x(n)   -> (m)
Tensor matvec_t(const Tensor& a, const Tensor& x);    // (m,n)^T x(m)-> (n)
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);         // same shape
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor elementwise_mul(const Tensor& a, const Tensor& b);

// out[i][j] = a[i][j] * s[i]; the per-row scalar scaling of a value table.
Tensor row_scale(const Tensor& a, const Tensor& s);

Tensor concat(std::span<const Tensor> parts, int axis = 0);
Tensor slice(const Tensor& v, int start, int len);    // rank-1

Tensor lookup(const Tensor& table, int index);                      // one row
Tensor lookup_rows(const Tensor& table, std::span<const int> idx);  // (k, cols)

Tensor softmax(const Tensor& v);  // rank-1; -inf entries allowed, get weight 0
Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);

Tensor sum(const Tensor& x);               // scalar
Tensor dot(const Tensor& a, const Tensor& b);

// out[i] = keep[i] ? v[i] : fill. Filled positions pass no gradient.
Tensor mask_fill(const Tensor& v, std::span<const std::uint8_t> keep, double fill);

// Zeroes whole rows of a matrix where keep[i] == 0.
Tensor zero_rows(const Tensor& a, std::span<const std::uint8_t> keep);

// Binary cross entropy of a scalar probability against a 0/1 target, with
// the probability clamped to [eps, 1-eps] before the logs.
Tensor bce(const Tensor& prob, double target, double eps = 1e-7);

}  // namespace heasep::nc

#endif
