#include "ipfaudit/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <bit>
#include <numeric>

#include <Eigen/Dense>

#include "ipfaudit/errors.hpp"
#include "ipfaudit/rng.hpp"

namespace ipfaudit {
namespace {

using MC = MeasureCategory;

constexpr std::array<MeasureInfo, kMeasureCount> kMeasures{{
    {"F1", MC::feature},          {"F1v", MC::feature},
    {"F2", MC::feature},          {"F3", MC::feature},
    {"F4", MC::feature},          {"L1", MC::linearity},
    {"L2", MC::linearity},        {"L3", MC::linearity},
    {"N1", MC::neighborhood},     {"N2", MC::neighborhood},
    {"N3", MC::neighborhood},     {"N4", MC::neighborhood},
    {"T1", MC::neighborhood},     {"LSC", MC::neighborhood},
    {"Density", MC::network},     {"ClsCoef", MC::network},
    {"Hubs", MC::network},        {"T2", MC::dimensionality},
    {"T3", MC::dimensionality},   {"T4", MC::dimensionality},
    {"C1", MC::imbalance},        {"C2", MC::imbalance},
}};

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames{
    "feature", "linearity", "neighborhood", "network", "dimensionality", "imbalance"};

struct Linear {
  std::vector<double> w;
  double b = 0.0;
};

class Context {
 public:
  Context(const FeatureMatrix& x, std::span<const Label> y, const ComplexityOptions& opt)
      : opt_(opt), n_(x.rows()), m_(x.cols()), y_(y.begin(), y.end()), z_(n_ * m_) {
    for (std::size_t j = 0; j < m_; ++j) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n_; ++i) sum += x.at(i, j);
      const double mean = sum / static_cast<double>(n_);
      double sq = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const double d = x.at(i, j) - mean;
        sq += d * d;
      }
      const double sd = std::sqrt(sq / static_cast<double>(n_));
      // Snapped to a 2^-32 grid: rescaled columns give bit-identical
      // z-scores, so distance ties and sphere containment survive rescaling.
      for (std::size_t i = 0; i < n_; ++i)
        z_[i * m_ + j] =
            sd > 0.0 ? std::ldexp(std::nearbyint(std::ldexp((x.at(i, j) - mean) / sd, 32)), -32)
                     : 0.0;
    }
    for (Label l : y_) ++counts_[static_cast<std::size_t>(l)];
  }

  double measure(std::size_t index) {
    switch (index) {
      case 0: return f1();
      case 1: return f1v();
      case 2: return f2();
      case 3: return f3();
      case 4: return f4();
      case 5: return l1();
      case 6: return l2();
      case 7: return l3();
      case 8: return n1();
      case 9: return n2();
      case 10: return n3();
      case 11: return n4();
      case 12: return t1();
      case 13: return lsc();
      case 14: return density();
      case 15: return cls_coef();
      case 16: return hubs();
      case 17: return t2();
      case 18: return t3();
      case 19: return t4();
      case 20: return c1();
      default: return c2();
    }
  }

 private:
  double z(std::size_t i, std::size_t j) const { return z_[i * m_ + j]; }
  bool same(std::size_t i, std::size_t j) const { return y_[i] == y_[j]; }
  double nd() const { return static_cast<double>(n_); }

  // ---- feature-based ----

  double f1() const {
    double best = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      std::array<double, 2> sum{}, mean{};
      for (std::size_t i = 0; i < n_; ++i) sum[cls(i)] += z(i, j);
      double total = 0.0;
      for (int c = 0; c < 2; ++c) {
        mean[c] = sum[c] / static_cast<double>(counts_[c]);
        total += sum[c];
      }
      const double mu = total / nd();
      double between = 0.0;
      for (int c = 0; c < 2; ++c)
        between += static_cast<double>(counts_[c]) * (mean[c] - mu) * (mean[c] - mu);
      double within = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const double d = z(i, j) - mean[cls(i)];
        within += d * d;
      }
      if (within == 0.0) {
        if (between > 0.0) return 0.0;
        continue;
      }
      best = std::max(best, between / within);
    }
    return 1.0 / (1.0 + best);
  }

  double f1v() const {
    const auto mm = static_cast<Eigen::Index>(m_);
    std::array<Eigen::VectorXd, 2> mu{Eigen::VectorXd::Zero(mm), Eigen::VectorXd::Zero(mm)};
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < m_; ++j) mu[cls(i)](static_cast<Eigen::Index>(j)) += z(i, j);
    for (int c = 0; c < 2; ++c) mu[c] /= static_cast<double>(counts_[c]);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(mm, mm);
    Eigen::VectorXd row(mm);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j)
        row(static_cast<Eigen::Index>(j)) = z(i, j) - mu[cls(i)](static_cast<Eigen::Index>(j));
      // p_c * Sigma_c = (n_c / n) * (1 / n_c) * sum = sum / n
      w.noalias() += row * row.transpose();
    }
    w /= nd();
    const Eigen::VectorXd delta = mu[0] - mu[1];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k)
      if (s(k) > 1e-12) inv(k) = 1.0 / s(k);
    const Eigen::MatrixXd pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    const Eigen::VectorXd d = pinv * delta;
    // A mean difference outside the span of W is separable with zero
    // within-class spread along it.
    const Eigen::VectorXd null_part = delta - w * d;
    if (null_part.norm() > 1e-9) return 0.0;
    const double ratio = std::max(0.0, delta.dot(d));
    return 1.0 / (1.0 + ratio);
  }

  struct Range {
    double lo_overlap, hi_overlap;
    bool overlaps;
  };

  Range overlap(std::size_t j, std::span<const std::size_t> rows) const {
    std::array<double, 2> lo{std::numeric_limits<double>::infinity(),
                             std::numeric_limits<double>::infinity()};
    std::array<double, 2> hi{-lo[0], -lo[1]};
    for (std::size_t i : rows) {
      lo[cls(i)] = std::min(lo[cls(i)], z(i, j));
      hi[cls(i)] = std::max(hi[cls(i)], z(i, j));
    }
    Range r{std::max(lo[0], lo[1]), std::min(hi[0], hi[1]), false};
    r.overlaps = r.lo_overlap <= r.hi_overlap;
    return r;
  }

  std::size_t overlap_count(std::size_t j, std::span<const std::size_t> rows) const {
    const Range r = overlap(j, rows);
    if (!r.overlaps) return 0;
    std::size_t count = 0;
    for (std::size_t i : rows)
      if (z(i, j) >= r.lo_overlap && z(i, j) <= r.hi_overlap) ++count;
    return count;
  }

  std::vector<std::size_t> all_rows() const {
    std::vector<std::size_t> rows(n_);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
  }

  double f2() const {
    double product = 1.0;
    for (std::size_t j = 0; j < m_; ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = 0; i < n_; ++i) {
        lo = std::min(lo, z(i, j));
        hi = std::max(hi, z(i, j));
      }
      const double range = hi - lo;
      if (range <= 0.0) continue;
      const Range r = overlap(j, all_rows());
      product *= std::max(0.0, r.hi_overlap - r.lo_overlap) / range;
    }
    return product;
  }

  double f3() const {
    const auto rows = all_rows();
    std::size_t best = n_;
    for (std::size_t j = 0; j < m_; ++j) best = std::min(best, overlap_count(j, rows));
    return static_cast<double>(best) / nd();
  }

  double f4() const {
    std::vector<std::size_t> rows = all_rows();
    std::vector<bool> used(m_, false);
    auto two_classes = [&] {
      std::array<bool, 2> seen{};
      for (std::size_t i : rows) seen[cls(i)] = true;
      return seen[0] && seen[1];
    };
    for (std::size_t step = 0; step < m_; ++step) {
      if (!two_classes()) return 0.0;
      std::size_t best_j = m_, best_count = 0;
      for (std::size_t j = 0; j < m_; ++j) {
        if (used[j]) continue;
        const std::size_t c = overlap_count(j, rows);
        if (best_j == m_ || c < best_count) {
          best_j = j;
          best_count = c;
        }
      }
      used[best_j] = true;
      const Range r = overlap(best_j, rows);
      std::vector<std::size_t> keep;
      if (r.overlaps)
        for (std::size_t i : rows)
          if (z(i, best_j) >= r.lo_overlap && z(i, best_j) <= r.hi_overlap) keep.push_back(i);
      rows = std::move(keep);
    }
    if (!two_classes()) return 0.0;
    return static_cast<double>(rows.size()) / nd();
  }

  // ---- linearity ----

  // Full-batch subgradient descent on the L2-regularised mean hinge loss,
  // step 1/(lambda t), zero start, unregularised bias; malicious = +1.
  const Linear& linear() {
    if (linear_) return *linear_;
    Linear model;
    model.w.assign(m_, 0.0);
    std::vector<double> grad(m_);
    const double lambda = opt_.svm_lambda;
    for (std::size_t t = 1; t <= opt_.svm_iterations; ++t) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double grad_b = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        const double yi = sign(i);
        if (yi * decision(model, &z_[i * m_]) < 1.0) {
          for (std::size_t j = 0; j < m_; ++j) grad[j] -= yi * z(i, j);
          grad_b -= yi;
        }
      }
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      for (std::size_t j = 0; j < m_; ++j)
        model.w[j] -= eta * (lambda * model.w[j] + grad[j] / nd());
      model.b -= eta * grad_b / nd();
    }
    linear_ = std::move(model);
    return *linear_;
  }

  double decision(const Linear& model, const double* row) const {
    double f = model.b;
    for (std::size_t j = 0; j < m_; ++j) f += model.w[j] * row[j];
    return f;
  }

  double l1() {
    const Linear& model = linear();
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double f = decision(model, &z_[i * m_]);
      if (sign(i) * f <= 0.0) sum += std::abs(f);
    }
    const double s = sum / nd();
    return s / (1.0 + s);
  }

  double l2() {
    const Linear& model = linear();
    std::size_t errors = 0;
    for (std::size_t i = 0; i < n_; ++i)
      if (sign(i) * decision(model, &z_[i * m_]) <= 0.0) ++errors;
    return static_cast<double>(errors) / nd();
  }

  struct Synthetic {
    std::vector<double> points;  // row-major, m_ columns
    std::vector<Label> labels;
  };

  // n_c interpolations between random same-class pairs per class. Each
  // class's stream is keyed by its smallest row index so that renaming the
  // classes leaves the points unchanged.
  const Synthetic& synthetic() {
    if (synth_) return *synth_;
    Synthetic s;
    for (Label c : {Label::benign, Label::malicious}) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < n_; ++i)
        if (y_[i] == c) members.push_back(i);
      Rng rng(derive_seed(derive_seed(opt_.seed, "interpolate"), members.front()));
      for (std::size_t k = 0; k < members.size(); ++k) {
        const std::size_t a = members[rng.below(members.size())];
        const std::size_t b = members[rng.below(members.size())];
        const double alpha = rng.unit();
        for (std::size_t j = 0; j < m_; ++j)
          s.points.push_back(z(a, j) + alpha * (z(b, j) - z(a, j)));
        s.labels.push_back(c);
      }
    }
    synth_ = std::move(s);
    return *synth_;
  }

  double l3() {
    const Linear& model = linear();
    const Synthetic& s = synthetic();
    std::size_t errors = 0;
    for (std::size_t k = 0; k < s.labels.size(); ++k) {
      const double yk = s.labels[k] == Label::malicious ? 1.0 : -1.0;
      if (yk * decision(model, &s.points[k * m_]) <= 0.0) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(s.labels.size());
  }

  // ---- neighbourhood ----

  double euclid(const double* a, const double* b) const {
    double sq = 0.0;
    for (std::size_t j = 0; j < m_; ++j) {
      const double d = a[j] - b[j];
      sq += d * d;
    }
    return std::sqrt(sq);
  }

  const std::vector<double>& dist() {
    if (!dist_.empty() || n_ == 0) return dist_;
    dist_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = i + 1; k < n_; ++k) {
        const double d = euclid(&z_[i * m_], &z_[k * m_]);
        dist_[i * n_ + k] = d;
        dist_[k * n_ + i] = d;
      }
    return dist_;
  }
  double d(std::size_t i, std::size_t k) { return dist()[i * n_ + k]; }

  const std::vector<double>& enemy_radius() {
    if (!enemy_.empty()) return enemy_;
    enemy_.assign(n_, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < n_; ++k)
        if (!same(i, k)) enemy_[i] = std::min(enemy_[i], d(i, k));
    return enemy_;
  }

  // Prim's algorithm under the strict edge order (length, lower endpoint,
  // higher endpoint), which makes the spanning tree unique.
  double n1() {
    struct Key {
      double len;
      std::size_t a, b;
      bool operator<(const Key& o) const {
        if (len != o.len) return len < o.len;
        if (a != o.a) return a < o.a;
        return b < o.b;
      }
    };
    std::vector<bool> in(n_, false);
    std::vector<Key> key(n_, Key{std::numeric_limits<double>::infinity(), n_, n_});
    in[0] = true;
    for (std::size_t v = 1; v < n_; ++v) key[v] = {d(0, v), 0, v};
    std::size_t cross = 0;
    for (std::size_t step = 1; step < n_; ++step) {
      std::size_t u = n_;
      for (std::size_t v = 0; v < n_; ++v)
        if (!in[v] && (u == n_ || key[v] < key[u])) u = v;
      in[u] = true;
      if (y_[key[u].a] != y_[key[u].b]) ++cross;
      for (std::size_t v = 0; v < n_; ++v) {
        if (in[v]) continue;
        const Key k{d(u, v), std::min(u, v), std::max(u, v)};
        if (k < key[v]) key[v] = k;
      }
    }
    return static_cast<double>(cross) / (nd() - 1.0);
  }

  double n2() {
    double intra = 0.0, extra = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double near_same = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n_; ++k)
        if (k != i && same(i, k)) near_same = std::min(near_same, d(i, k));
      intra += near_same;
      extra += enemy_radius()[i];
    }
    if (extra == 0.0) return 1.0;
    const double r = intra / extra;
    return r / (1.0 + r);
  }

  double n3() {
    std::size_t errors = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t best = n_;
      for (std::size_t k = 0; k < n_; ++k)
        if (k != i && (best == n_ || d(i, k) < d(i, best))) best = k;
      if (!same(i, best)) ++errors;
    }
    return static_cast<double>(errors) / nd();
  }

  double n4() {
    const Synthetic& s = synthetic();
    std::size_t errors = 0;
    for (std::size_t p = 0; p < s.labels.size(); ++p) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n_; ++k) {
        const double dk = euclid(&s.points[p * m_], &z_[k * m_]);
        if (dk < best_d) {
          best_d = dk;
          best = k;
        }
      }
      if (y_[best] != s.labels[p]) ++errors;
    }
    return static_cast<double>(errors) / static_cast<double>(s.labels.size());
  }

  // Hyperspheres centred on each point with radius equal to the distance
  // of the nearest enemy. Sphere j is absorbed by a same-class sphere i
  // that contains it; of two identical spheres the lower index survives.
  double t1() {
    const auto& r = enemy_radius();
    std::size_t maximal = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      bool absorbed = false;
      for (std::size_t i = 0; i < n_ && !absorbed; ++i) {
        if (i == j || !same(i, j)) continue;
        if (d(i, j) + r[j] > r[i]) continue;
        const bool mutual = d(i, j) + r[i] <= r[j];
        absorbed = !mutual || i < j;
      }
      if (!absorbed) ++maximal;
    }
    return static_cast<double>(maximal) / nd();
  }

  double lsc() {
    const auto& r = enemy_radius();
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < n_; ++k)
        if (same(i, k) && d(i, k) < r[i]) total += 1.0;
    return 1.0 - total / (nd() * nd());
  }

  // ---- network ----

  struct Graph {
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;  // n_ rows of `words` words
    std::vector<std::vector<std::size_t>> adj;
    std::size_t edges = 0;
  };

  Graph build_graph(bool same_class_only) {
    Graph g;
    g.words = (n_ + 63) / 64;
    g.bits.assign(n_ * g.words, 0);
    g.adj.resize(n_);
    double max_d = 0.0;
    for (double v : dist()) max_d = std::max(max_d, v);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = i + 1; k < n_; ++k) {
        if (same_class_only && !same(i, k)) continue;
        const double norm = max_d > 0.0 ? d(i, k) / max_d : 0.0;
        if (!(norm < opt_.epsilon)) continue;
        g.bits[i * g.words + k / 64] |= std::uint64_t{1} << (k % 64);
        g.bits[k * g.words + i / 64] |= std::uint64_t{1} << (i % 64);
        g.adj[i].push_back(k);
        g.adj[k].push_back(i);
        ++g.edges;
      }
    return g;
  }

  const Graph& full_graph() {
    if (!graph_) graph_ = build_graph(false);
    return *graph_;
  }

  double density() {
    const double pairs = nd() * (nd() - 1.0) / 2.0;
    return 1.0 - static_cast<double>(full_graph().edges) / pairs;
  }

  double cls_coef() {
    const Graph g = build_graph(true);
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t k = g.adj[i].size();
      if (k < 2) continue;
      // Every linked neighbour pair is seen from both of its endpoints.
      std::size_t links = 0;
      for (std::size_t j : g.adj[i])
        for (std::size_t w = 0; w < g.words; ++w)
          links += static_cast<std::size_t>(
              std::popcount(g.bits[i * g.words + w] & g.bits[j * g.words + w]));
      const double possible = static_cast<double>(k) * static_cast<double>(k - 1);
      sum += static_cast<double>(links) / possible;
    }
    return 1.0 - sum / nd();
  }

  double hubs() {
    const Graph& g = full_graph();
    if (g.edges == 0) return 1.0;
    std::vector<double> v(n_, 1.0 / std::sqrt(nd())), next(n_);
    for (int iter = 0; iter < 1000; ++iter) {
      double norm = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        double s = v[i];
        for (std::size_t k : g.adj[i]) s += v[k];
        next[i] = s;
        norm += s * s;
      }
      norm = std::sqrt(norm);
      double change = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        next[i] /= norm;
        change = std::max(change, std::abs(next[i] - v[i]));
      }
      v.swap(next);
      if (change < 1e-10) break;
    }
    const double top = *std::max_element(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x / top;
    return 1.0 - mean / nd();
  }

  // ---- dimensionality ----

  std::size_t pca_components() const {
    const auto mm = static_cast<Eigen::Index>(m_);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(mm, mm);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> zm(
        z_.data(), static_cast<Eigen::Index>(n_), mm);
    cov.noalias() = zm.transpose() * zm / nd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    std::vector<double> values(eig.eigenvalues().data(), eig.eigenvalues().data() + mm);
    std::sort(values.rbegin(), values.rend());
    double total = 0.0;
    for (double& v : values) {
      v = std::max(v, 0.0);
      total += v;
    }
    if (total <= 0.0) return 1;
    double acc = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      acc += values[k];
      if (acc >= opt_.pca_variance * total - 1e-12 * total) return k + 1;
    }
    return values.size();
  }

  double t2() const { return std::min(1.0, static_cast<double>(m_) / nd()); }
  double t3() const { return std::min(1.0, static_cast<double>(pca_components()) / nd()); }
  double t4() const {
    return static_cast<double>(pca_components()) / static_cast<double>(m_);
  }

  // ---- imbalance ----

  double c1() const {
    double h = 0.0;
    for (auto c : counts_) {
      const double p = static_cast<double>(c) / nd();
      if (p > 0.0) h -= p * std::log(p);
    }
    return 1.0 - h / std::log(2.0);
  }

  double c2() const {
    const double b = static_cast<double>(counts_[0]);
    const double mcount = static_cast<double>(counts_[1]);
    const double ir = 0.5 * (b / mcount + mcount / b);
    return 1.0 - 1.0 / ir;
  }

  std::size_t cls(std::size_t i) const { return static_cast<std::size_t>(y_[i]); }
  double sign(std::size_t i) const { return y_[i] == Label::malicious ? 1.0 : -1.0; }

  const ComplexityOptions& opt_;
  std::size_t n_;
  std::size_t m_;
  std::vector<Label> y_;
  std::vector<double> z_;
  std::array<std::size_t, 2> counts_{};
  std::optional<Linear> linear_;
  std::optional<Synthetic> synth_;
  std::vector<double> dist_;
  std::vector<double> enemy_;
  std::optional<Graph> graph_;
};

void check_inputs(const FeatureMatrix& x, std::span<const Label> y, bool need_pairs) {
  if (y.size() != x.rows())
    throw PreconditionError("complexity: " + std::to_string(x.rows()) + " rows but " +
                            std::to_string(y.size()) + " labels");
  if (x.cols() == 0) throw PreconditionError("complexity: no features");
  std::array<std::size_t, 2> counts{};
  for (Label l : y) ++counts[static_cast<std::size_t>(l)];
  if (counts[0] == 0 || counts[1] == 0)
    throw PreconditionError("complexity: both classes must be present");
  if (need_pairs && (counts[0] < 2 || counts[1] < 2))
    throw PreconditionError(
        "complexity: neighbourhood and network measures need two samples per class");
}

bool needs_pairs(MeasureCategory c) {
  return c == MeasureCategory::neighborhood || c == MeasureCategory::network;
}

double finish(double v, std::string_view name) {
  if (!std::isfinite(v))
    throw Error("complexity: measure " + std::string(name) + " is not finite");
  return std::clamp(v, 0.0, 1.0);
}

struct Prepared {
  FeatureMatrix x;
  std::vector<Label> y;
};

// Applies the optional sample cap; returns nullopt when no cap applies.
std::optional<Prepared> cap_samples(const FeatureMatrix& x, std::span<const Label> y,
                                    const ComplexityOptions& options) {
  if (!options.max_samples || x.rows() <= *options.max_samples) return std::nullopt;
  const auto idx = stratified_subsample(y, *options.max_samples, options.seed);
  Prepared p{x.select_rows(idx), {}};
  p.y.reserve(idx.size());
  for (std::size_t i : idx) p.y.push_back(y[i]);
  return p;
}

}  // namespace

std::string_view to_string(MeasureCategory c) noexcept {
  return kCategoryNames[static_cast<std::size_t>(c)];
}

std::span<const MeasureInfo> measures() noexcept { return kMeasures; }

std::optional<std::size_t> find_measure(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kMeasures.size(); ++i)
    if (kMeasures[i].name == name) return i;
  return std::nullopt;
}

double ComplexityReport::score(std::string_view name) const {
  auto i = find_measure(name);
  if (!i) throw SchemaError("unknown complexity measure '" + std::string(name) + "'");
  return scores[*i];
}

std::vector<std::size_t> stratified_subsample(std::span<const Label> y,
                                              std::size_t max_samples,
                                              std::uint64_t seed) {
  std::vector<std::size_t> out;
  if (y.size() <= max_samples) {
    out.resize(y.size());
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  for (Label c : {Label::benign, Label::malicious}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == c) members.push_back(i);
    if (members.empty()) continue;
    const double share = static_cast<double>(members.size()) * static_cast<double>(max_samples) /
                         static_cast<double>(y.size());
    std::size_t take = static_cast<std::size_t>(std::llround(share));
    take = std::clamp<std::size_t>(take, std::min<std::size_t>(2, members.size()),
                                   members.size());
    Rng rng(derive_seed(derive_seed(seed, "subsample"), static_cast<std::uint64_t>(c)));
    rng.shuffle(std::span<std::size_t>(members));
    out.insert(out.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(out.begin(), out.end());
  return out;
}

double compute_measure(std::string_view name, const FeatureMatrix& x,
                       std::span<const Label> y, const ComplexityOptions& options) {
  const auto index = find_measure(name);
  if (!index) throw SchemaError("unknown complexity measure '" + std::string(name) + "'");
  const auto capped = cap_samples(x, y, options);
  const FeatureMatrix& xs = capped ? capped->x : x;
  const std::span<const Label> ys = capped ? std::span<const Label>(capped->y) : y;
  check_inputs(xs, ys, needs_pairs(kMeasures[*index].category));
  Context ctx(xs, ys, options);
  return finish(ctx.measure(*index), name);
}

ComplexityReport compute_report(const FeatureMatrix& x, std::span<const Label> y,
                                const ComplexityOptions& options) {
  const auto capped = cap_samples(x, y, options);
  const FeatureMatrix& xs = capped ? capped->x : x;
  const std::span<const Label> ys = capped ? std::span<const Label>(capped->y) : y;
  check_inputs(xs, ys, true);
  Context ctx(xs, ys, options);
  ComplexityReport r;
  r.samples = xs.rows();
  r.features = xs.cols();
  std::array<std::size_t, kCategoryCount> per_category{};
  double total = 0.0;
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    r.scores[i] = finish(ctx.measure(i), kMeasures[i].name);
    const auto c = static_cast<std::size_t>(kMeasures[i].category);
    r.category_means[c] += r.scores[i];
    ++per_category[c];
    total += r.scores[i];
  }
  for (std::size_t c = 0; c < kCategoryCount; ++c)
    r.category_means[c] /= static_cast<double>(per_category[c]);
  r.aggregate = 100.0 * total / static_cast<double>(kMeasureCount);
  return r;
}

nlohmann::json to_json(const ComplexityReport& r) {
  nlohmann::json scores = nlohmann::json::object();
  for (std::size_t i = 0; i < kMeasureCount; ++i)
    scores[std::string(kMeasures[i].name)] = r.scores[i];
  nlohmann::json cats = nlohmann::json::object();
  for (std::size_t c = 0; c < kCategoryCount; ++c)
    cats[std::string(kCategoryNames[c])] = r.category_means[c];
  return {{"measures", scores},
          {"categories", cats},
          {"aggregate", r.aggregate},
          {"samples", r.samples},
          {"features", r.features}};
}

std::string complexity_csv_header() {
  std::string out;
  for (const auto& m : kMeasures) {
    out += m.name;
    out += ',';
  }
  for (auto c : kCategoryNames) {
    out += c;
    out += ',';
  }
  return out + "aggregate";
}

std::string complexity_csv_row(const ComplexityReport& r) {
  std::string out;
  for (double v : r.scores) out += format_double(v) + ",";
  for (double v : r.category_means) out += format_double(v) + ",";
  return out + format_double(r.aggregate);
}

}  // namespace ipfaudit
