#pragma once

// Helpers shared by the unit and acceptance tests: random fixtures and
// brute-force reference implementations that deliberately avoid the library
// code paths they check.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rmis/mask.hpp"

namespace testutil {

using Point = std::pair<int, int>;  // (row, col)
using PointSet = std::set<Point>;

/// Random mask with `instances` distinct labels drawn from 1..20, each an
/// axis-aligned rectangle, a disc or a random walk. Later instances paint
/// over earlier ones, so an instance may end up partially or fully hidden.
inline rmis::LabelMask random_mask(std::mt19937& rng, int width, int height, int instances) {
  auto mask = rmis::LabelMask::zeros(width, height);
  std::vector<int> labels(20);
  std::iota(labels.begin(), labels.end(), 1);
  std::shuffle(labels.begin(), labels.end(), rng);
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int k = 0; k < instances; ++k) {
    const auto label = static_cast<rmis::Label>(labels[k]);
    switch (uni(0, 2)) {
      case 0: {
        const int r0 = uni(0, height - 1), c0 = uni(0, width - 1);
        const int r1 = std::min(height - 1, r0 + uni(0, height / 2));
        const int c1 = std::min(width - 1, c0 + uni(0, width / 2));
        for (int r = r0; r <= r1; ++r)
          for (int c = c0; c <= c1; ++c) mask.at(r, c) = label;
        break;
      }
      case 1: {
        const int cr = uni(0, height - 1), cc = uni(0, width - 1), rad = uni(1, width / 4 + 1);
        for (int r = 0; r < height; ++r)
          for (int c = 0; c < width; ++c)
            if ((r - cr) * (r - cr) + (c - cc) * (c - cc) <= rad * rad) mask.at(r, c) = label;
        break;
      }
      default: {
        int r = uni(0, height - 1), c = uni(0, width - 1);
        for (int step = uni(5, 4 * width); step > 0; --step) {
          mask.at(r, c) = label;
          switch (uni(0, 3)) {
            case 0: r = std::max(0, r - 1); break;
            case 1: r = std::min(height - 1, r + 1); break;
            case 2: c = std::max(0, c - 1); break;
            default: c = std::min(width - 1, c + 1); break;
          }
        }
      }
    }
  }
  return mask;
}

/// Copy of `mask` with a fraction of pixels flipped or relabeled.
inline rmis::LabelMask perturb(std::mt19937& rng, const rmis::LabelMask& mask, double rate) {
  auto out = mask;
  std::bernoulli_distribution flip(rate);
  std::uniform_int_distribution<int> label(0, 3);
  for (int r = 0; r < mask.height(); ++r)
    for (int c = 0; c < mask.width(); ++c)
      if (flip(rng)) out.at(r, c) = static_cast<rmis::Label>(label(rng));
  return out;
}

inline PointSet foreground(const rmis::LabelMask& m) {
  PointSet s;
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c)
      if (m.at(r, c) != 0) s.insert({r, c});
  return s;
}

inline PointSet with_label(const rmis::LabelMask& m, rmis::Label l) {
  PointSet s;
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c)
      if (m.at(r, c) == l) s.insert({r, c});
  return s;
}

inline std::size_t intersection_size(const PointSet& a, const PointSet& b) {
  std::vector<Point> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.size();
}

inline std::size_t union_size(const PointSet& a, const PointSet& b) {
  std::vector<Point> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.size();
}

inline double dice_oracle(const PointSet& a, const PointSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  return 2.0 * static_cast<double>(intersection_size(a, b)) / static_cast<double>(a.size() + b.size());
}

inline double iou_oracle(const PointSet& a, const PointSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  return static_cast<double>(intersection_size(a, b)) / static_cast<double>(union_size(a, b));
}

/// Members of `s` with at least one 4-neighbour outside `s`.
inline PointSet boundary_oracle(const PointSet& s) {
  PointSet out;
  for (auto [r, c] : s) {
    if (!s.contains({r - 1, c}) || !s.contains({r + 1, c}) || !s.contains({r, c - 1}) ||
        !s.contains({r, c + 1})) {
      out.insert({r, c});
    }
  }
  return out;
}

inline double min_squared_distance(Point p, const PointSet& to) {
  double best = std::numeric_limits<double>::infinity();
  for (auto [r, c] : to) {
    const double dr = p.first - r, dc = p.second - c;
    best = std::min(best, dr * dr + dc * dc);
  }
  return best;
}

/// All-pairs surface dice on the boundaries of two pixel sets.
inline double nsd_oracle(const PointSet& a, const PointSet& b, double tau) {
  const auto ba = boundary_oracle(a);
  const auto bb = boundary_oracle(b);
  if (ba.empty() && bb.empty()) return 1.0;
  if (ba.empty() || bb.empty()) return 0.0;
  std::size_t within = 0;
  for (const auto& p : ba) within += std::sqrt(min_squared_distance(p, bb)) <= tau;
  for (const auto& p : bb) within += std::sqrt(min_squared_distance(p, ba)) <= tau;
  return static_cast<double>(within) / static_cast<double>(ba.size() + bb.size());
}

/// Best total over all injective row-to-column maps of an n x m matrix
/// (row-major). The total is accumulated in ascending row order.
inline double brute_force_best(const std::vector<double>& s, int n, int m) {
  if (n == 0 || m == 0) return 0.0;
  if (n > m) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -1.0;
    do {
      // perm[j] is the original row assigned to column j for j < m.
      std::vector<std::pair<int, int>> picked;
      for (int j = 0; j < m; ++j) picked.emplace_back(perm[j], j);
      std::sort(picked.begin(), picked.end());
      double total = 0.0;
      for (auto [i, j] : picked) total += s[i * m + j];
      best = std::max(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += s[i * m + perm[i]];
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// P(W+ >= observed) by enumerating every sign assignment of ranks 1..n.
inline double wilcoxon_enumeration_p(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] != y[i]) d.push_back(x[i] - y[i]);
  const std::size_t n = d.size();
  if (n == 0) return 1.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::fabs(d[a]) < std::fabs(d[b]); });
  std::vector<int> rank(n);
  for (std::size_t k = 0; k < n; ++k) rank[order[k]] = static_cast<int>(k + 1);
  int observed = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (d[i] > 0) observed += rank[i];
  std::uint64_t hits = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    int w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) w += static_cast<int>(i + 1);
    hits += w >= observed;
  }
  return static_cast<double>(hits) / std::ldexp(1.0, static_cast<int>(n));
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("rmis-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
             std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void spit(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

/// Runs a shell command; returns its exit status (or -1 if it did not exit).
inline int run(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

inline std::string quote(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace testutil
