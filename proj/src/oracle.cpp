#include "tiling/oracle.hpp"

#include <Eigen/Dense>

#include "tiling/height.hpp"

namespace tiling::oracle {

namespace {
void require_balanced(const HexSubgraph& g) {
  if (!g.balanced())
    throw Error("Unbalanced", std::to_string(g.whites.size()) + " whites vs " + std::to_string(g.blacks.size()) + " blacks");
}

Eigen::MatrixXd kasteleyn(const HexSubgraph& g) {
  const int n = static_cast<int>(g.whites.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < 3; ++t)
      if (g.white_nb[i][t] >= 0) K(i, g.white_nb[i][t]) = g.weight[i][t];
  return K;
}
}  // namespace

BigInt count_matchings(const HexSubgraph& g) {
  require_balanced(g);
  const int n = static_cast<int>(g.whites.size());
  if (n == 0) return 1;
  std::vector<std::vector<BigInt>> M(n, std::vector<BigInt>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j : g.white_nb[i])
      if (j >= 0) M[i][j] = 1;
  BigInt prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (M[k][k] == 0) {
      int r = k + 1;
      while (r < n && M[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(M[k], M[r]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev;
      M[i][k] = 0;
    }
    prev = M[k][k];
  }
  BigInt det = M[n - 1][n - 1] * sign;
  return det < 0 ? BigInt(-det) : det;
}

double weighted_partition(const HexSubgraph& g) {
  require_balanced(g);
  if (g.whites.empty()) return 1;
  return std::abs(kasteleyn(g).partialPivLu().determinant());
}

uint64_t enumerate_matchings(const HexSubgraph& g, const std::function<void(const HexMatching&)>& visit,
                             uint64_t limit) {
  require_balanced(g);
  const int n = static_cast<int>(g.whites.size());
  HexMatching m(n, -1);
  std::vector<char> used(g.blacks.size(), 0);
  uint64_t count = 0;
  std::function<void()> rec = [&]() {
    int best = -1, best_deg = 4;
    for (int i = 0; i < n; ++i) {
      if (m[i] >= 0) continue;
      int d = 0;
      for (int b : g.white_nb[i]) d += b >= 0 && !used[b];
      if (d < best_deg) {
        best = i;
        best_deg = d;
        if (d <= 1) break;
      }
    }
    if (best < 0) {
      if (++count > limit) throw Error("TooLarge", "more than " + std::to_string(limit) + " matchings");
      if (visit) visit(m);
      return;
    }
    for (int b : g.white_nb[best]) {
      if (b < 0 || used[b]) continue;
      m[best] = b;
      used[b] = 1;
      rec();
      used[b] = 0;
      m[best] = -1;
    }
  };
  rec();
  return count;
}

std::vector<std::array<double, 3>> edge_probabilities(const HexSubgraph& g) {
  require_balanced(g);
  const int n = static_cast<int>(g.whites.size());
  std::vector<std::array<double, 3>> out(n, {0, 0, 0});
  if (n == 0) return out;
  Eigen::MatrixXd K = kasteleyn(g);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  if (lu.rank() < n) throw Error("Singular", "region has no perfect matching");
  Eigen::MatrixXd Kinv = lu.inverse();
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < 3; ++t) {
      const int j = g.white_nb[i][t];
      if (j >= 0) out[i][t] = K(i, j) * Kinv(j, i);
    }
  return out;
}

double edge_probability(const HexSubgraph& g, int white, int black) {
  for (int t = 0; t < 3; ++t)
    if (g.white_nb.at(white)[t] == black) return edge_probabilities(g)[white][t];
  return 0;
}

HeightMoments exact_height_moments(const HexSubgraph& g, const std::vector<hex::HexCoord>& faces,
                                   const hex::HexCoord& base, uint64_t limit) {
  HeightMoments r;
  r.faces = faces;
  const size_t k = faces.size();
  std::vector<double> s1(k, 0);
  std::vector<std::vector<double>> s2(k, std::vector<double>(k, 0));
  r.matchings = enumerate_matchings(
      g,
      [&](const HexMatching& m) {
        auto h = height_from_matching(g, m, base);
        std::vector<double> v(k);
        for (size_t i = 0; i < k; ++i) v[i] = h.value(faces[i]);
        for (size_t i = 0; i < k; ++i) {
          s1[i] += v[i];
          for (size_t j = 0; j < k; ++j) s2[i][j] += v[i] * v[j];
        }
      },
      limit);
  const double N = static_cast<double>(r.matchings);
  r.mean.resize(k);
  r.cov.assign(k, std::vector<double>(k, 0));
  for (size_t i = 0; i < k; ++i) r.mean[i] = s1[i] / N;
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) r.cov[i][j] = s2[i][j] / N - r.mean[i] * r.mean[j];
  return r;
}

BigInt macmahon(int a, int b, int c) {
  BigInt num = 1, den = 1;
  for (int i = 1; i <= a; ++i)
    for (int j = 1; j <= b; ++j)
      for (int k = 1; k <= c; ++k) {
        num *= i + j + k - 1;
        den *= i + j + k - 2;
      }
  return num / den;
}

}  // namespace tiling::oracle
