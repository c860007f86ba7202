#pragma once

// Naive matrix-chain reference for the controller nets. Walks the flat
// parameter vector with its own cursor and builds every matrix explicitly,
// sharing no code with the library forward pass.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mpnet/nets.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

struct Cursor {
  const std::vector<double>& theta;
  std::size_t at = 0;

  Mat mat(int rows, int cols) {
    Mat m(static_cast<std::size_t>(rows), Vec(static_cast<std::size_t>(cols)));
    for (auto& row : m)
      for (auto& v : row) v = theta.at(at++);
    return m;
  }
  Vec vec(int n) {
    Vec v(static_cast<std::size_t>(n));
    for (auto& x : v) x = theta.at(at++);
    return v;
  }
};

inline Vec vec_mat(const Vec& v, const Mat& m) {
  Vec out(m.front().size(), 0.0);
  for (std::size_t r = 0; r < m.size(); ++r)
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += v[r] * m[r][c];
  return out;
}

inline Vec add(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline std::array<double, 2> forward(const mpnet::NetSpec& spec, const std::vector<double>& theta, const Vec& s) {
  const auto& N = spec.layers;
  const int Nl = static_cast<int>(N.size()) - 1;
  Cursor cur{theta};
  std::vector<Mat> W;
  std::vector<Vec> b;
  for (int l = 0; l < Nl; ++l) {
    W.push_back(cur.mat(N[l], N[l + 1]));
    b.push_back(cur.vec(N[l + 1]));
  }
  // K[l][j] for hidden targets l = 1..Nl-1 and the output target Nl.
  std::vector<std::vector<Mat>> K(static_cast<std::size_t>(Nl) + 1);
  if (spec.arch == mpnet::Arch::fscn) {
    for (int l = 1; l < Nl; ++l)
      for (int j = 0; j < l; ++j) K[l].push_back(cur.mat(N[j], N[l]));
    for (int j = 0; j < Nl; ++j) K[Nl].push_back(cur.mat(N[j], N.back()));
  } else if (spec.arch == mpnet::Arch::scn) {
    K[Nl].push_back(cur.mat(N[0], N.back()));
  }
  Vec c(2, 0.0);
  if (spec.arch != mpnet::Arch::mlp) c = cur.vec(2);
  if (spec.with_vvc) cur.vec(1);
  if (cur.at != theta.size()) return {NAN, NAN};

  std::vector<Vec> s_in{s};
  Vec s_out;
  for (int l = 0; l < Nl; ++l) {
    if (l > 0) {
      Vec in = s_out;
      for (std::size_t j = 0; j < K[l].size(); ++j) in = add(in, vec_mat(s_in[j], K[l][j]));
      s_in.push_back(in);
    }
    s_out = add(vec_mat(s_in[l], W[l]), b[l]);
    for (auto& v : s_out) v = mpnet::tanh_approx(v);
  }
  Vec a = s_out;
  for (std::size_t j = 0; j < K[Nl].size(); ++j) a = add(a, vec_mat(s_in[j], K[Nl][j]));
  a = add(a, c);
  return {a[0], a[1]};
}

}  // namespace oracle
