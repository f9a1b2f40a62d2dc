#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qric {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using Labels = std::vector<std::string>;

inline std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

inline int mod(int x, int d) {
  int r = x % d;
  return r < 0 ? r + d : r;
}

// Pure state over an ordered list of labeled d-level subsystems.
// Indexing is big-endian: the first label is the most significant base-d digit.
struct State {
  int d = 0;
  Labels labels;
  Vec v;

  State() = default;
  State(int dim, Labels ls, Vec amplitudes)
      : d(dim), labels(std::move(ls)), v(std::move(amplitudes)) {
    if (d < 2) throw std::invalid_argument("dimension must be at least 2");
    if (v.size() != ipow(d, static_cast<int>(labels.size())))
      throw std::invalid_argument("amplitude count does not match label count");
    Labels sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("duplicate subsystem label");
  }

  int subsystems() const { return static_cast<int>(labels.size()); }
  std::int64_t dim() const { return v.size(); }

  int position(const std::string& label) const {
    for (int i = 0; i < subsystems(); ++i)
      if (labels[i] == label) return i;
    throw std::invalid_argument("no subsystem labeled " + label);
  }
};

inline bool labels_disjoint(const Labels& a, const Labels& b) {
  for (const auto& x : a)
    for (const auto& y : b)
      if (x == y) return false;
  return true;
}

inline State tensor(const State& a, const State& b) {
  if (a.d != b.d) throw std::invalid_argument("dimension mismatch in tensor");
  if (!labels_disjoint(a.labels, b.labels))
    throw std::invalid_argument("duplicate labels in tensor");
  Labels ls = a.labels;
  ls.insert(ls.end(), b.labels.begin(), b.labels.end());
  Vec out(a.dim() * b.dim());
  for (std::int64_t i = 0; i < a.dim(); ++i)
    out.segment(i * b.dim(), b.dim()) = a.v[i] * b.v;
  return State(a.d, std::move(ls), std::move(out));
}

namespace detail {

// positions[i] = where order[i] sits in `labels`; throws unless a permutation.
inline std::vector<int> permutation_positions(const Labels& labels, const Labels& order) {
  if (labels.size() != order.size())
    throw std::invalid_argument("label order has wrong length");
  std::vector<int> pos(order.size());
  std::vector<bool> used(labels.size(), false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (!used[j] && labels[j] == order[i]) {
        pos[i] = static_cast<int>(j);
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("label order is not a permutation");
  }
  return pos;
}

}  // namespace detail

inline State permute(const State& s, const Labels& order) {
  const std::vector<int> pos = detail::permutation_positions(s.labels, order);
  const int k = s.subsystems();
  const std::int64_t n = s.dim();
  std::vector<std::int64_t> src_stride(k), dst_stride_of_src(k);
  for (int i = 0; i < k; ++i) src_stride[i] = ipow(s.d, k - 1 - i);
  for (int i = 0; i < k; ++i) dst_stride_of_src[pos[i]] = ipow(s.d, k - 1 - i);
  Vec out(n);
  for (std::int64_t idx = 0; idx < n; ++idx) {
    std::int64_t rem = idx, dst = 0;
    for (int i = 0; i < k; ++i) {
      const std::int64_t digit = rem / src_stride[i];
      rem -= digit * src_stride[i];
      dst += digit * dst_stride_of_src[i];
    }
    out[dst] = s.v[idx];
  }
  return State(s.d, order, std::move(out));
}

inline State apply_local(const State& s, const std::string& label, const Mat& u) {
  if (u.rows() != s.d || u.cols() != s.d)
    throw std::invalid_argument("operator size does not match subsystem dimension");
  const int i = s.position(label);
  const std::int64_t stride = ipow(s.d, s.subsystems() - 1 - i);
  const std::int64_t block = stride * s.d;
  Vec out(s.dim());
  Vec x(s.d), y(s.d);
  for (std::int64_t base = 0; base < s.dim(); base += block)
    for (std::int64_t off = 0; off < stride; ++off) {
      for (int t = 0; t < s.d; ++t) x[t] = s.v[base + off + t * stride];
      y.noalias() = u * x;
      for (int t = 0; t < s.d; ++t) out[base + off + t * stride] = y[t];
    }
  return State(s.d, s.labels, std::move(out));
}

constexpr double kProjectionCutoff = 1e-14;

struct Projection {
  double prob = 0.0;
  State rest;      // empty when prob < kProjectionCutoff
  bool kept = false;
};

// Projects the listed subsystems (in the given order) onto `target` and
// returns the outcome probability together with the renormalized remainder.
inline Projection project(const State& s, const Labels& sub, const Vec& target) {
  Labels order = sub;
  for (const auto& l : s.labels)
    if (std::find(sub.begin(), sub.end(), l) == sub.end()) order.push_back(l);
  const State sp = permute(s, order);
  const std::int64_t rows = ipow(s.d, static_cast<int>(sub.size()));
  const std::int64_t cols = sp.dim() / rows;
  if (target.size() != rows)
    throw std::invalid_argument("projection target has wrong dimension");
  Vec amp = Vec::Zero(cols);
  for (std::int64_t r = 0; r < rows; ++r)
    amp += std::conj(target[r]) * sp.v.segment(r * cols, cols);
  Projection out;
  out.prob = amp.squaredNorm();
  if (out.prob < kProjectionCutoff) return out;
  out.kept = true;
  Labels rest(order.begin() + sub.size(), order.end());
  out.rest = State(s.d, std::move(rest), amp / std::sqrt(out.prob));
  return out;
}

inline Mat density(const State& s) { return s.v * s.v.adjoint(); }

inline Mat permute_density(const Mat& rho, int d, const Labels& labels, const Labels& order) {
  const std::vector<int> pos = detail::permutation_positions(labels, order);
  const int k = static_cast<int>(labels.size());
  const std::int64_t n = rho.rows();
  std::vector<std::int64_t> src_stride(k), dst_stride_of_src(k);
  for (int i = 0; i < k; ++i) src_stride[i] = ipow(d, k - 1 - i);
  for (int i = 0; i < k; ++i) dst_stride_of_src[pos[i]] = ipow(d, k - 1 - i);
  std::vector<std::int64_t> map(n);
  for (std::int64_t idx = 0; idx < n; ++idx) {
    std::int64_t rem = idx, dst = 0;
    for (int i = 0; i < k; ++i) {
      const std::int64_t digit = rem / src_stride[i];
      rem -= digit * src_stride[i];
      dst += digit * dst_stride_of_src[i];
    }
    map[idx] = dst;
  }
  Mat out(n, n);
  for (std::int64_t r = 0; r < n; ++r)
    for (std::int64_t c = 0; c < n; ++c) out(map[r], map[c]) = rho(r, c);
  return out;
}

inline std::pair<Mat, Labels> partial_trace(const Mat& rho, int d, const Labels& labels,
                                            const Labels& keep) {
  Labels kept, rest;
  for (const auto& l : labels) {
    if (std::find(keep.begin(), keep.end(), l) != keep.end())
      kept.push_back(l);
    else
      rest.push_back(l);
  }
  Labels order = kept;
  order.insert(order.end(), rest.begin(), rest.end());
  const Mat rp = permute_density(rho, d, labels, order);
  const std::int64_t nk = ipow(d, static_cast<int>(kept.size()));
  const std::int64_t nr = rp.rows() / nk;
  Mat out = Mat::Zero(nk, nk);
  for (std::int64_t t = 0; t < nr; ++t)
    for (std::int64_t a = 0; a < nk; ++a)
      for (std::int64_t b = 0; b < nk; ++b) out(a, b) += rp(a * nr + t, b * nr + t);
  return {std::move(out), std::move(kept)};
}

// Transposes the listed subsystems in place (label order unchanged).
inline Mat partial_transpose(const Mat& rho, int d, const Labels& labels,
                             const Labels& flipped) {
  const int k = static_cast<int>(labels.size());
  const std::int64_t n = rho.rows();
  std::vector<std::int64_t> stride(k);
  std::vector<bool> flip(k, false);
  for (int i = 0; i < k; ++i) {
    stride[i] = ipow(d, k - 1 - i);
    flip[i] = std::find(flipped.begin(), flipped.end(), labels[i]) != flipped.end();
  }
  Mat out(n, n);
  for (std::int64_t r = 0; r < n; ++r)
    for (std::int64_t c = 0; c < n; ++c) {
      std::int64_t rr = r, cc = c, nr = 0, nc = 0;
      for (int i = 0; i < k; ++i) {
        std::int64_t dr = rr / stride[i], dc = cc / stride[i];
        rr -= dr * stride[i];
        cc -= dc * stride[i];
        if (flip[i]) std::swap(dr, dc);
        nr += dr * stride[i];
        nc += dc * stride[i];
      }
      out(nr, nc) = rho(r, c);
    }
  return out;
}

inline Eigen::VectorXd schmidt_values(const State& s, const Labels& cut) {
  Labels order = cut;
  for (const auto& l : s.labels)
    if (std::find(cut.begin(), cut.end(), l) == cut.end()) order.push_back(l);
  const State sp = permute(s, order);
  const std::int64_t rows = ipow(s.d, static_cast<int>(cut.size()));
  const std::int64_t cols = sp.dim() / rows;
  Mat m(rows, cols);
  for (std::int64_t r = 0; r < rows; ++r) m.row(r) = sp.v.segment(r * cols, cols).transpose();
  return m.jacobiSvd().singularValues();
}

inline int schmidt_rank(const State& s, const Labels& cut, double tol = 1e-10) {
  const Eigen::VectorXd sv = schmidt_values(s, cut);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol) ++rank;
  return rank;
}

}  // namespace qric
