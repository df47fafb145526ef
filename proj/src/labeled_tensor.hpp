#pragma once

// Small dense tensor with named axes, used by the fully dense contraction
// path. Every axis has the same extent d. Data is row-major in label order.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace tnqudo::detail {

struct LabeledTensor {
  int d = 2;
  std::vector<int> labels;
  std::vector<double> data;

  std::size_t axis_of(int label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw std::logic_error("label not found");
    return static_cast<std::size_t>(it - labels.begin());
  }
  bool has(int label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
  }
};

inline std::size_t power(int d, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= static_cast<std::size_t>(d);
  return r;
}

// Sums over all labels shared by a and b; result axes are a's free labels
// followed by b's free labels.
inline LabeledTensor contract(const LabeledTensor& a, const LabeledTensor& b) {
  const int d = a.d;
  std::vector<int> free_a, free_b, shared;
  for (int l : a.labels) (b.has(l) ? shared : free_a).push_back(l);
  for (int l : b.labels)
    if (!a.has(l)) free_b.push_back(l);

  LabeledTensor out;
  out.d = d;
  out.labels = free_a;
  out.labels.insert(out.labels.end(), free_b.begin(), free_b.end());
  out.data.assign(power(d, out.labels.size()), 0.0);

  // Iterate over every assignment of (out labels, shared labels).
  std::vector<int> all = out.labels;
  all.insert(all.end(), shared.begin(), shared.end());
  std::vector<std::size_t> stride_a(all.size(), 0), stride_b(all.size(), 0);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (a.has(all[i])) stride_a[i] = power(d, a.labels.size() - 1 - a.axis_of(all[i]));
    if (b.has(all[i])) stride_b[i] = power(d, b.labels.size() - 1 - b.axis_of(all[i]));
  }
  const std::size_t n_out = out.labels.size();
  const std::size_t total = power(d, all.size());
  const std::size_t shared_block = power(d, shared.size());
  std::vector<int> idx(all.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t ia = 0, ib = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
      ia += idx[i] * stride_a[i];
      ib += idx[i] * stride_b[i];
    }
    out.data[flat / shared_block] += a.data[ia] * b.data[ib];
    for (std::size_t i = all.size(); i-- > 0;) {
      if (++idx[i] < d) break;
      idx[i] = 0;
    }
  }
  (void)n_out;
  return out;
}

// Fixes one axis to a value, removing it.
inline LabeledTensor slice(const LabeledTensor& t, int label, int value) {
  const std::size_t ax = t.axis_of(label);
  const std::size_t inner = power(t.d, t.labels.size() - 1 - ax);
  const std::size_t outer = power(t.d, ax);
  LabeledTensor out;
  out.d = t.d;
  out.labels = t.labels;
  out.labels.erase(out.labels.begin() + static_cast<std::ptrdiff_t>(ax));
  out.data.resize(outer * inner);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < inner; ++i)
      out.data[o * inner + i] = t.data[(o * t.d + value) * inner + i];
  return out;
}

// Reorders axes to `order` (a permutation of t.labels).
inline LabeledTensor permute(const LabeledTensor& t, const std::vector<int>& order) {
  LabeledTensor out;
  out.d = t.d;
  out.labels = order;
  out.data.resize(t.data.size());
  const std::size_t r = order.size();
  std::vector<std::size_t> stride(r);
  for (std::size_t i = 0; i < r; ++i) stride[i] = power(t.d, r - 1 - t.axis_of(order[i]));
  std::vector<int> idx(r, 0);
  for (std::size_t flat = 0; flat < out.data.size(); ++flat) {
    std::size_t src = 0;
    for (std::size_t i = 0; i < r; ++i) src += idx[i] * stride[i];
    out.data[flat] = t.data[src];
    for (std::size_t i = r; i-- > 0;) {
      if (++idx[i] < t.d) break;
      idx[i] = 0;
    }
  }
  return out;
}

}  // namespace tnqudo::detail
