#include "complexity_reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include <Eigen/Dense>

#include "ipfaudit/rng.hpp"

namespace ipfaudit::testing {
namespace {

using Rows = std::vector<std::vector<double>>;

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

int cls(Label l) { return l == Label::malicious ? 1 : 0; }

struct Svm {
  std::vector<double> w;
  double b = 0.0;
  double f(const std::vector<double>& x) const {
    double v = b;
    for (std::size_t j = 0; j < x.size(); ++j) v += w[j] * x[j];
    return v;
  }
};

Svm train_svm(const Rows& z, const std::vector<Label>& y, const ComplexityOptions& o) {
  const std::size_t n = z.size(), m = z[0].size();
  Svm s{std::vector<double>(m, 0.0), 0.0};
  for (std::size_t t = 1; t <= o.svm_iterations; ++t) {
    std::vector<double> g(m, 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = y[i] == Label::malicious ? 1.0 : -1.0;
      if (yi * s.f(z[i]) < 1.0) {
        for (std::size_t j = 0; j < m; ++j) g[j] -= yi * z[i][j];
        gb -= yi;
      }
    }
    const double eta = 1.0 / (o.svm_lambda * static_cast<double>(t));
    for (std::size_t j = 0; j < m; ++j)
      s.w[j] -= eta * (o.svm_lambda * s.w[j] + g[j] / static_cast<double>(n));
    s.b -= eta * gb / static_cast<double>(n);
  }
  return s;
}

void interpolate(const Rows& z, const std::vector<Label>& y, const ComplexityOptions& o,
                 Rows& pts, std::vector<Label>& lab) {
  for (Label c : {Label::benign, Label::malicious}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == c) idx.push_back(i);
    Rng rng(derive_seed(derive_seed(o.seed, "interpolate"), idx[0]));
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& a = z[idx[rng.below(idx.size())]];
      const auto& b = z[idx[rng.below(idx.size())]];
      const double t = rng.unit();
      std::vector<double> p(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) p[j] = a[j] + t * (b[j] - a[j]);
      pts.push_back(p);
      lab.push_back(c);
    }
  }
}

}  // namespace

Rows standardise(const Rows& rows) {
  const std::size_t n = rows.size(), m = rows[0].size();
  Rows z(n, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += rows[i][j];
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += (rows[i][j] - mean) * (rows[i][j] - mean);
    const double sd = std::sqrt(sq / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      z[i][j] = sd > 0.0 ? std::ldexp(std::nearbyint(std::ldexp((rows[i][j] - mean) / sd, 32)), -32)
                         : 0.0;
  }
  return z;
}

std::size_t kruskal_cross_edges(const Rows& pts, const std::vector<Label>& y) {
  const std::size_t n = pts.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = i + 1; k < n; ++k) edges.emplace_back(dist(pts[i], pts[k]), i, k);
  std::sort(edges.begin(), edges.end());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t cross = 0;
  for (const auto& [d, a, b] : edges) {
    const std::size_t ra = find(a), rb = find(b);
    if (ra == rb) continue;
    parent[ra] = rb;
    if (y[a] != y[b]) ++cross;
  }
  return cross;
}

double brute_force_n3(const Rows& pts, const std::vector<Label>& y) {
  std::size_t errors = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t who = 0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (k == i) continue;
      const double d = dist(pts[i], pts[k]);
      if (d < best) {
        best = d;
        who = k;
      }
    }
    if (y[who] != y[i]) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(pts.size());
}

ReferenceResult reference_measures(const Rows& rows, const std::vector<Label>& y,
                                   const ComplexityOptions& o) {
  const Rows z = standardise(rows);
  const std::size_t n = z.size(), m = z[0].size();
  const double nd = static_cast<double>(n);
  ReferenceResult out;
  auto& s = out.scores;

  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < n; ++i) members[cls(y[i])].push_back(i);
  const double nb = static_cast<double>(members[0].size());
  const double nm = static_cast<double>(members[1].size());

  // F1: two-class Fisher ratio n_b n_m / n (mu_b - mu_m)^2 over pooled
  // within-class scatter.
  {
    double best = 0.0;
    bool infinite = false;
    for (std::size_t j = 0; j < m; ++j) {
      std::array<double, 2> mu{}, ss{};
      for (int c = 0; c < 2; ++c) {
        for (auto i : members[c]) mu[c] += z[i][j];
        mu[c] /= static_cast<double>(members[c].size());
        for (auto i : members[c]) ss[c] += (z[i][j] - mu[c]) * (z[i][j] - mu[c]);
      }
      const double between = nb * nm / nd * (mu[0] - mu[1]) * (mu[0] - mu[1]);
      const double within = ss[0] + ss[1];
      if (within == 0.0) {
        if (between > 0.0) infinite = true;
        continue;
      }
      best = std::max(best, between / within);
    }
    s["F1"] = infinite ? 0.0 : 1.0 / (1.0 + best);
  }

  // F1v with a pseudo-inverse from a complete orthogonal decomposition.
  {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    Eigen::VectorXd mu[2];
    for (int c = 0; c < 2; ++c) {
      mu[c] = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
      for (auto i : members[c])
        for (std::size_t j = 0; j < m; ++j) mu[c](static_cast<Eigen::Index>(j)) += z[i][j];
      mu[c] /= static_cast<double>(members[c].size());
      Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(W.rows(), W.cols());
      for (auto i : members[c]) {
        Eigen::VectorXd d(static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < m; ++j)
          d(static_cast<Eigen::Index>(j)) = z[i][j] - mu[c](static_cast<Eigen::Index>(j));
        cov += d * d.transpose();
      }
      cov /= static_cast<double>(members[c].size());
      W += static_cast<double>(members[c].size()) / nd * cov;
    }
    const Eigen::VectorXd delta = mu[0] - mu[1];
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(W);
    cod.setThreshold(1e-12 / std::max(1.0, W.cwiseAbs().maxCoeff()));
    const Eigen::VectorXd d = cod.pseudoInverse() * delta;
    if ((delta - W * d).norm() > 1e-9)
      s["F1v"] = 0.0;
    else
      s["F1v"] = 1.0 / (1.0 + std::max(0.0, delta.dot(d)));
  }

  auto bounds = [&](std::size_t j, const std::vector<std::size_t>& rowset) {
    std::array<double, 2> lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (auto i : rowset) {
      lo[cls(y[i])] = std::min(lo[cls(y[i])], z[i][j]);
      hi[cls(y[i])] = std::max(hi[cls(y[i])], z[i][j]);
    }
    return std::pair{std::max(lo[0], lo[1]), std::min(hi[0], hi[1])};
  };
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  {
    double prod = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      double lo = 1e300, hi = -1e300;
      for (std::size_t i = 0; i < n; ++i) {
        lo = std::min(lo, z[i][j]);
        hi = std::max(hi, z[i][j]);
      }
      if (hi - lo <= 0.0) continue;
      const auto [a, b] = bounds(j, all);
      prod *= std::max(0.0, b - a) / (hi - lo);
    }
    s["F2"] = prod;
  }

  auto in_overlap = [&](std::size_t j, const std::vector<std::size_t>& rowset) {
    const auto [a, b] = bounds(j, rowset);
    std::vector<std::size_t> keep;
    if (a <= b)
      for (auto i : rowset)
        if (z[i][j] >= a && z[i][j] <= b) keep.push_back(i);
    return keep;
  };

  {
    std::size_t best = n;
    for (std::size_t j = 0; j < m; ++j) best = std::min(best, in_overlap(j, all).size());
    s["F3"] = static_cast<double>(best) / nd;
  }

  {
    std::vector<std::size_t> cur = all;
    std::vector<bool> used(m, false);
    auto mixed = [&] {
      bool b = false, mm = false;
      for (auto i : cur) (y[i] == Label::malicious ? mm : b) = true;
      return b && mm;
    };
    double result = -1.0;
    for (std::size_t round = 0; round < m; ++round) {
      if (!mixed()) {
        result = 0.0;
        break;
      }
      std::size_t pick = m;
      std::vector<std::size_t> kept;
      for (std::size_t j = 0; j < m; ++j) {
        if (used[j]) continue;
        auto k = in_overlap(j, cur);
        if (pick == m || k.size() < kept.size()) {
          pick = j;
          kept = std::move(k);
        }
      }
      used[pick] = true;
      cur = std::move(kept);
    }
    if (result < 0.0) result = mixed() ? static_cast<double>(cur.size()) / nd : 0.0;
    s["F4"] = result;
  }

  {
    const Svm svm = train_svm(z, y, o);
    double sum = 0.0;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double yi = y[i] == Label::malicious ? 1.0 : -1.0;
      const double f = svm.f(z[i]);
      if (yi * f <= 0.0) {
        sum += std::abs(f);
        ++errors;
      }
    }
    s["L1"] = (sum / nd) / (1.0 + sum / nd);
    s["L2"] = static_cast<double>(errors) / nd;
    Rows pts;
    std::vector<Label> lab;
    interpolate(z, y, o, pts, lab);
    std::size_t e3 = 0, e4 = 0;
    for (std::size_t p = 0; p < pts.size(); ++p) {
      const double yp = lab[p] == Label::malicious ? 1.0 : -1.0;
      if (yp * svm.f(pts[p]) <= 0.0) ++e3;
      double best = 1e300;
      std::size_t who = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = dist(pts[p], z[i]);
        if (d < best) {
          best = d;
          who = i;
        }
      }
      if (y[who] != lab[p]) ++e4;
    }
    s["L3"] = static_cast<double>(e3) / static_cast<double>(pts.size());
    s["N4"] = static_cast<double>(e4) / static_cast<double>(pts.size());
  }

  s["N1"] = static_cast<double>(kruskal_cross_edges(z, y)) / (nd - 1.0);
  s["N3"] = brute_force_n3(z, y);

  std::vector<double> enemy(n, 1e300);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (y[i] != y[k]) enemy[i] = std::min(enemy[i], dist(z[i], z[k]));

  {
    double intra = 0.0, extra = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double near = 1e300;
      for (std::size_t k = 0; k < n; ++k)
        if (k != i && y[k] == y[i]) near = std::min(near, dist(z[i], z[k]));
      intra += near;
      extra += enemy[i];
    }
    s["N2"] = extra == 0.0 ? 1.0 : (intra / extra) / (1.0 + intra / extra);
  }

  {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      bool inside_other = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == j || y[i] != y[j]) continue;
        const double d = dist(z[i], z[j]);
        const bool i_holds_j = d + enemy[j] <= enemy[i];
        const bool j_holds_i = d + enemy[i] <= enemy[j];
        if (i_holds_j && (!j_holds_i || i < j)) inside_other = true;
      }
      if (!inside_other) ++count;
    }
    s["T1"] = static_cast<double>(count) / nd;
  }

  {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (y[i] == y[k] && dist(z[i], z[k]) < enemy[i]) total += 1.0;
    s["LSC"] = 1.0 - total / (nd * nd);
  }

  {
    double maxd = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) maxd = std::max(maxd, dist(z[i], z[k]));
    auto linked = [&](std::size_t i, std::size_t k) {
      if (i == k) return false;
      const double d = maxd > 0.0 ? dist(z[i], z[k]) / maxd : 0.0;
      return d < o.epsilon;
    };
    std::size_t edges = 0;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        if (linked(i, k)) {
          A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = 1.0;
          if (i < k) ++edges;
        }
    s["Density"] = 1.0 - 2.0 * static_cast<double>(edges) / (nd * (nd - 1.0));

    double coef = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> nb_i;
      for (std::size_t k = 0; k < n; ++k)
        if (y[k] == y[i] && linked(i, k)) nb_i.push_back(k);
      if (nb_i.size() < 2) continue;
      std::size_t tri = 0;
      for (std::size_t a = 0; a < nb_i.size(); ++a)
        for (std::size_t b = a + 1; b < nb_i.size(); ++b)
          if (linked(nb_i[a], nb_i[b])) ++tri;
      const double k = static_cast<double>(nb_i.size());
      coef += static_cast<double>(tri) / (k * (k - 1.0) / 2.0);
    }
    s["ClsCoef"] = 1.0 - coef / nd;

    if (edges == 0) {
      s["Hubs"] = 1.0;
      out.hub_eigen_gap = 1.0;
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
          A + Eigen::MatrixXd::Identity(A.rows(), A.cols()));
      const auto& vals = eig.eigenvalues();
      Eigen::VectorXd v = eig.eigenvectors().col(vals.size() - 1).cwiseAbs();
      out.hub_eigen_gap = vals.size() > 1 ? vals(vals.size() - 1) - vals(vals.size() - 2) : 1.0;
      v /= v.maxCoeff();
      s["Hubs"] = 1.0 - v.mean();
    }
  }

  {
    Eigen::MatrixXd Z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z[i][j];
    const Eigen::MatrixXd C = Z.transpose() * Z / nd;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
    std::vector<double> ev(eig.eigenvalues().data(), eig.eigenvalues().data() + m);
    for (double& v : ev) v = std::max(0.0, v);
    std::sort(ev.rbegin(), ev.rend());
    const double total = std::accumulate(ev.begin(), ev.end(), 0.0);
    std::size_t comps = 1;
    if (total > 0.0) {
      double acc = 0.0;
      for (comps = 0; comps < m;) {
        acc += ev[comps++];
        if (acc >= o.pca_variance * total - 1e-12 * total) break;
      }
    }
    s["T2"] = std::min(1.0, static_cast<double>(m) / nd);
    s["T3"] = std::min(1.0, static_cast<double>(comps) / nd);
    s["T4"] = static_cast<double>(comps) / static_cast<double>(m);
  }

  {
    const double pb = nb / nd, pm = nm / nd;
    const double h = -(pb * std::log(pb) + pm * std::log(pm));
    s["C1"] = 1.0 - h / std::log(2.0);
    const double ir = 0.5 * (nb / nm + nm / nb);
    s["C2"] = 1.0 - 1.0 / ir;
  }
  for (auto& [k, v] : s) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace ipfaudit::testing
