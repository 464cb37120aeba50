// Iterated function systems of contractive similitudes: words, cut sets,
// the Moran equation, anchor points and unit-cube normalization.
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "selfsim/core.hpp"

namespace selfsim {

inline constexpr double kOrthogonalityTolerance = 1e-9;

/// x -> ratio * O * x + t, with O orthogonal (row-major, d x d).
///
/// The ratio lies in (0, 1]; ratio 1 only arises for the identity produced by
/// composing the empty word. IfsSystem enforces the strict contraction bound.
class Similitude {
 public:
  Similitude(double ratio, std::vector<double> orthogonal, Point translation)
      : ratio_(ratio), orthogonal_(std::move(orthogonal)), translation_(std::move(translation)) {
    const std::size_t d = translation_.size();
    if (d == 0) throw InputError("similitude: dimension must be positive");
    if (!(ratio_ > 0.0 && ratio_ <= 1.0)) {
      throw InputError("similitude: ratio must lie in (0,1], got " + std::to_string(ratio_));
    }
    if (orthogonal_.size() != d * d) throw InputError("similitude: matrix is not d x d");
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < d; ++k) dot += orthogonal_[i * d + k] * orthogonal_[j * d + k];
        const double expected = (i == j) ? 1.0 : 0.0;
        if (std::abs(dot - expected) > kOrthogonalityTolerance) {
          throw InputError("similitude: matrix is not orthogonal (O*O^T differs from I at (" +
                           std::to_string(i) + "," + std::to_string(j) + "))");
        }
      }
    }
  }

  static Similitude scaling(double ratio, Point translation) {
    const std::size_t d = translation.size();
    return Similitude(ratio, identity_matrix(d), std::move(translation));
  }

  static Similitude identity(std::size_t dim) { return scaling(1.0, Point(dim, 0.0)); }

  std::size_t dimension() const { return translation_.size(); }
  double ratio() const { return ratio_; }
  const std::vector<double>& orthogonal() const { return orthogonal_; }
  const Point& translation() const { return translation_; }

  Point apply(std::span<const double> x) const {
    Point out(dimension());
    apply_into(x, out);
    return out;
  }

  void apply_into(std::span<const double> x, std::span<double> out) const {
    const std::size_t d = dimension();
    if (x.size() != d || out.size() != d) {
      throw InputError("similitude: point has dimension " + std::to_string(x.size()) +
                       ", expected " + std::to_string(d));
    }
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += orthogonal_[i * d + k] * x[k];
      out[i] = ratio_ * acc + translation_[i];
    }
  }

  /// (*this) o inner.
  Similitude compose(const Similitude& inner) const {
    const std::size_t d = dimension();
    if (inner.dimension() != d) throw InputError("similitude: composing different dimensions");
    std::vector<double> product(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) acc += orthogonal_[i * d + k] * inner.orthogonal_[k * d + j];
        product[i * d + j] = acc;
      }
    }
    Point t = apply(inner.translation_);
    return Similitude(ratio_ * inner.ratio_, std::move(product), std::move(t), Unchecked{});
  }

  /// Unique fixed point of a strict contraction: solves (I - ratio*O) x = t.
  Point fixed_point() const {
    const std::size_t d = dimension();
    if (ratio_ >= 1.0) throw InputError("fixed_point: map is not a strict contraction");
    std::vector<double> a(d * d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        a[i * d + j] = (i == j ? 1.0 : 0.0) - ratio_ * orthogonal_[i * d + j];
      }
    }
    Point b = translation_;
    // Gaussian elimination with partial pivoting; I - rO is well conditioned.
    for (std::size_t col = 0; col < d; ++col) {
      std::size_t pivot = col;
      for (std::size_t r = col + 1; r < d; ++r) {
        if (std::abs(a[r * d + col]) > std::abs(a[pivot * d + col])) pivot = r;
      }
      if (pivot != col) {
        for (std::size_t k = 0; k < d; ++k) std::swap(a[col * d + k], a[pivot * d + k]);
        std::swap(b[col], b[pivot]);
      }
      for (std::size_t r = col + 1; r < d; ++r) {
        const double f = a[r * d + col] / a[col * d + col];
        for (std::size_t k = col; k < d; ++k) a[r * d + k] -= f * a[col * d + k];
        b[r] -= f * b[col];
      }
    }
    Point x(d);
    for (std::size_t i = d; i-- > 0;) {
      double acc = b[i];
      for (std::size_t k = i + 1; k < d; ++k) acc -= a[i * d + k] * x[k];
      x[i] = acc / a[i * d + i];
    }
    return x;
  }

 private:
  struct Unchecked {};
  Similitude(double ratio, std::vector<double> orthogonal, Point translation, Unchecked)
      : ratio_(ratio), orthogonal_(std::move(orthogonal)), translation_(std::move(translation)) {}

  static std::vector<double> identity_matrix(std::size_t d) {
    std::vector<double> m(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) m[i * d + i] = 1.0;
    return m;
  }

  double ratio_;
  std::vector<double> orthogonal_;
  Point translation_;
};

inline Point similitude_apply(const Similitude& map, std::span<const double> x) { return map.apply(x); }

/// A finite word over the alphabet {0, ..., p-1}. Printed 1-based.
struct Word {
  std::vector<std::uint32_t> letters;
  double ratio = 1.0;      // product of letter ratios
  double log_ratio = 0.0;  // sum of log letter ratios; used for comparisons

  std::size_t size() const { return letters.size(); }
  bool empty() const { return letters.empty(); }

  bool is_prefix_of(const Word& other) const {
    return letters.size() <= other.letters.size() &&
           std::equal(letters.begin(), letters.end(), other.letters.begin());
  }

  std::string to_string() const {
    const bool compact = std::all_of(letters.begin(), letters.end(), [](auto l) { return l < 9; });
    std::string out;
    for (std::size_t i = 0; i < letters.size(); ++i) {
      if (!compact && i > 0) out += '.';
      out += std::to_string(letters[i] + 1);
    }
    return out;
  }

  friend bool operator==(const Word& a, const Word& b) { return a.letters == b.letters; }
  friend bool operator<(const Word& a, const Word& b) { return a.letters < b.letters; }
};

class IfsSystem {
 public:
  IfsSystem(std::string name, std::size_t dimension, std::vector<Similitude> maps, bool declared_osc)
      : name_(std::move(name)), dimension_(dimension), maps_(std::move(maps)), declared_osc_(declared_osc) {
    if (dimension_ == 0) throw InputError("ifs: dimension must be positive");
    if (maps_.empty()) throw InputError("ifs: at least one map is required");
    for (std::size_t i = 0; i < maps_.size(); ++i) {
      if (maps_[i].dimension() != dimension_) {
        throw InputError("ifs: map " + std::to_string(i + 1) + " has the wrong dimension");
      }
      if (!(maps_[i].ratio() < 1.0)) {
        throw InputError("ifs: map " + std::to_string(i + 1) + " is not a strict contraction");
      }
    }
  }

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return maps_.size(); }
  const std::vector<Similitude>& maps() const { return maps_; }
  const Similitude& map(std::size_t i) const { return maps_.at(i); }
  bool declared_osc() const { return declared_osc_; }

  std::vector<double> ratios() const {
    std::vector<double> r;
    r.reserve(maps_.size());
    for (const auto& m : maps_) r.push_back(m.ratio());
    return r;
  }

  /// Builds a word from 0-based letters, validating the range.
  Word word(std::span<const std::uint32_t> letters) const {
    Word w;
    for (auto l : letters) w = extend(w, l);
    return w;
  }
  Word word(std::initializer_list<std::uint32_t> letters) const {
    return word(std::span<const std::uint32_t>(letters.begin(), letters.size()));
  }

  Word extend(const Word& w, std::uint32_t letter) const {
    if (letter >= maps_.size()) {
      throw InputError("word letter " + std::to_string(letter + 1) + " out of range 1.." +
                       std::to_string(maps_.size()));
    }
    Word out = w;
    out.letters.push_back(letter);
    out.ratio *= maps_[letter].ratio();
    out.log_ratio += std::log(maps_[letter].ratio());
    return out;
  }

 private:
  std::string name_;
  std::size_t dimension_;
  std::vector<Similitude> maps_;
  bool declared_osc_;
};

/// Parses "12" or "1.12.3" (1-based letters) against an IFS.
inline Word parse_word(const IfsSystem& ifs, const std::string& text) {
  std::vector<std::uint32_t> letters;
  if (text.find('.') != std::string::npos) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t next = std::min(text.find('.', pos), text.size());
      const std::string token = text.substr(pos, next - pos);
      if (token.empty()) throw InputError("word: empty letter in '" + text + "'");
      letters.push_back(static_cast<std::uint32_t>(std::stoul(token) - 1));
      pos = next + 1;
    }
  } else {
    for (char c : text) {
      if (c < '1' || c > '9') throw InputError("word: invalid letter in '" + text + "'");
      letters.push_back(static_cast<std::uint32_t>(c - '1'));
    }
  }
  return ifs.word(letters);
}

/// S_w = S_{w1} o ... o S_{wn}; the empty word gives the identity.
inline Similitude compose_word(const IfsSystem& ifs, const Word& w) {
  Similitude out = Similitude::identity(ifs.dimension());
  for (auto letter : w.letters) {
    if (letter >= ifs.size()) {
      throw InputError("word letter " + std::to_string(letter + 1) + " out of range 1.." +
                       std::to_string(ifs.size()));
    }
    out = out.compose(ifs.map(letter));
  }
  return out;
}

/// Root s of sum_k r_k^s = 1.
///
/// Bracketed on [0, log p / log(1/max r) + 1], bisected to width 1e-13, then
/// polished with at most five Newton steps that are kept only when they stay
/// inside the bracket and reduce the residual.
inline double moran_dimension(std::span<const double> ratios, double tol = 1e-12) {
  if (ratios.empty()) throw InputError("moran_dimension: empty ratio list");
  if (!(tol > 0.0)) throw InputError("moran_dimension: tol must be positive");
  double max_ratio = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) {
      throw InputError("moran_dimension: ratio " + std::to_string(r) + " outside (0,1)");
    }
    max_ratio = std::max(max_ratio, r);
  }
  if (ratios.size() == 1) return 0.0;

  auto residual = [&](double s) {
    CompensatedSum acc;
    for (double r : ratios) acc.add(std::pow(r, s));
    return acc.value() - 1.0;
  };
  auto derivative = [&](double s) {
    CompensatedSum acc;
    for (double r : ratios) acc.add(std::pow(r, s) * std::log(r));
    return acc.value();
  };

  double lo = 0.0;
  double hi = std::log(static_cast<double>(ratios.size())) / std::log(1.0 / max_ratio) + 1.0;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid) > 0.0) lo = mid; else hi = mid;
  }
  double s = 0.5 * (lo + hi);
  double best = std::abs(residual(s));
  for (int step = 0; step < 5 && best > 0.0; ++step) {
    const double next = s - residual(s) / derivative(s);
    if (!(next >= lo - 1e-12 && next <= hi + 1e-12)) break;
    const double r = std::abs(residual(next));
    if (r >= best) break;
    s = next;
    best = r;
  }
  if (best > tol) {
    throw InternalError("moran_dimension: residual " + std::to_string(best) + " above tolerance");
  }
  return s;
}

inline double similarity_dimension(const IfsSystem& ifs) {
  const auto r = ifs.ratios();
  return moran_dimension(r);
}

struct CutSetOptions {
  std::size_t max_words = 10'000'000;
};

/// Stopping family I(R): words with ratio <= R whose parent has ratio > R.
struct CutSet {
  double resolution = 1.0;
  std::vector<Word> words;  // lexicographic order

  std::size_t size() const { return words.size(); }
  std::size_t max_length() const {
    std::size_t m = 0;
    for (const auto& w : words) m = std::max(m, w.size());
    return m;
  }
};

// Relative slack on ratio comparisons so that R = 3^-m and a product of m
// factors 1/3 compare equal despite rounding.
inline constexpr double kRatioLogSlack = 1e-12;

inline bool ratio_at_most(double log_ratio, double log_resolution) {
  return log_ratio <= log_resolution + kRatioLogSlack;
}

/// Depth-first enumeration of I(R). The root is always expanded, so
/// I(1) consists of the p words of length one.
inline CutSet cut_set(const IfsSystem& ifs, double resolution, const CutSetOptions& options = {}) {
  if (!(resolution > 0.0 && resolution <= 1.0)) {
    throw InputError("cut_set: resolution must lie in (0,1], got " + std::to_string(resolution));
  }
  const double s = similarity_dimension(ifs);
  // sum_{I(R)} a_w^s = 1 with a_w <= R gives #I(R) >= R^-s.
  const double lower_bound = std::pow(resolution, -s);
  if (lower_bound > static_cast<double>(options.max_words)) {
    throw ResourceError("cut_set: at least " + std::to_string(lower_bound) +
                        " words at resolution " + std::to_string(resolution) + " (cap " +
                        std::to_string(options.max_words) + ")");
  }

  const double log_r = std::log(resolution);
  CutSet out;
  out.resolution = resolution;
  // Preorder DFS: children pushed in reverse so words pop in lexicographic order.
  std::vector<Word> stack;
  auto push_children = [&](const Word& w) {
    for (std::size_t letter = ifs.size(); letter-- > 0;) {
      stack.push_back(ifs.extend(w, static_cast<std::uint32_t>(letter)));
    }
  };
  push_children(Word{});
  while (!stack.empty()) {
    Word w = std::move(stack.back());
    stack.pop_back();
    if (ratio_at_most(w.log_ratio, log_r)) {
      out.words.push_back(std::move(w));
      if (out.words.size() > options.max_words) {
        throw ResourceError("cut_set: more than " + std::to_string(options.max_words) +
                            " words at resolution " + std::to_string(resolution));
      }
    } else {
      push_children(w);
    }
  }
  return out;
}

/// S_w(base). With base in K, the result lies in K_w.
inline Point anchor_point(const IfsSystem& ifs, const Word& w, std::span<const double> base) {
  if (base.size() != ifs.dimension()) throw InputError("anchor_point: base has the wrong dimension");
  Point x(base.begin(), base.end());
  Point tmp(x.size());
  for (std::size_t k = w.size(); k-- > 0;) {
    const auto letter = w.letters[k];
    if (letter >= ifs.size()) throw InputError("anchor_point: letter out of range");
    ifs.map(letter).apply_into(x, tmp);
    std::swap(x, tmp);
  }
  return x;
}

/// Default anchor base: the fixed point of S_1, which lies in K.
inline Point default_base(const IfsSystem& ifs) { return ifs.map(0).fixed_point(); }

inline std::vector<Point> cut_set_anchors(const IfsSystem& ifs, const CutSet& cut,
                                          std::span<const double> base) {
  std::vector<Point> out;
  out.reserve(cut.size());
  for (const auto& w : cut.words) out.push_back(anchor_point(ifs, w, base));
  return out;
}

/// Anchors of I(R); every point of K lies within |K| R of one of them.
inline std::vector<Point> sample_attractor(const IfsSystem& ifs, double resolution,
                                           std::optional<Point> base = std::nullopt,
                                           const CutSetOptions& options = {}) {
  const Point b = base ? *base : default_base(ifs);
  return cut_set_anchors(ifs, cut_set(ifs, resolution, options), b);
}

struct BoundingBox {
  Point lo;
  Point hi;

  double diameter() const {
    double acc = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) acc += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    return std::sqrt(acc);
  }
  double max_side() const {
    double m = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) m = std::max(m, hi[i] - lo[i]);
    return m;
  }
};

/// Box image of a box under a similitude (exact when O is a signed permutation).
inline BoundingBox image_box(const Similitude& map, const BoundingBox& box) {
  const std::size_t d = map.dimension();
  Point center(d);
  Point half(d);
  for (std::size_t i = 0; i < d; ++i) {
    center[i] = 0.5 * (box.lo[i] + box.hi[i]);
    half[i] = 0.5 * (box.hi[i] - box.lo[i]);
  }
  const Point c = map.apply(center);
  BoundingBox out{Point(d), Point(d)};
  const auto& o = map.orthogonal();
  for (std::size_t i = 0; i < d; ++i) {
    double h = 0.0;
    for (std::size_t k = 0; k < d; ++k) h += std::abs(o[i * d + k]) * half[k];
    h *= map.ratio();
    out.lo[i] = c[i] - h;
    out.hi[i] = c[i] + h;
  }
  return out;
}

/// Fixed point of B -> box(U S_i(B)); contains K, equals its bounding box for
/// axis-aligned systems.
inline BoundingBox attractor_bounding_box(const IfsSystem& ifs) {
  const std::size_t d = ifs.dimension();
  const Point c = default_base(ifs);
  double radius = 0.0;
  for (const auto& m : ifs.maps()) {
    radius = std::max(radius, distance(m.apply(c), c) / (1.0 - m.ratio()));
  }
  BoundingBox box{Point(d), Point(d)};
  for (std::size_t i = 0; i < d; ++i) {
    box.lo[i] = c[i] - radius;
    box.hi[i] = c[i] + radius;
  }
  for (int iter = 0; iter < 100000; ++iter) {
    BoundingBox next{Point(d, std::numeric_limits<double>::infinity()),
                     Point(d, -std::numeric_limits<double>::infinity())};
    for (const auto& m : ifs.maps()) {
      const BoundingBox img = image_box(m, box);
      for (std::size_t i = 0; i < d; ++i) {
        next.lo[i] = std::min(next.lo[i], img.lo[i]);
        next.hi[i] = std::max(next.hi[i], img.hi[i]);
      }
    }
    double change = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      change = std::max({change, std::abs(next.lo[i] - box.lo[i]), std::abs(next.hi[i] - box.hi[i])});
    }
    box = std::move(next);
    if (change <= 1e-15 * std::max(1.0, box.max_side())) break;
  }
  return box;
}

/// Upper bound for |K|: the diagonal of the attractor bounding box.
inline double attractor_diameter(const IfsSystem& ifs) { return attractor_bounding_box(ifs).diameter(); }

/// y = (x - offset) / scale, with one scale for all axes so distances scale uniformly.
struct AffineNormalization {
  Point offset;
  double scale = 1.0;

  bool is_identity() const {
    return scale == 1.0 && std::all_of(offset.begin(), offset.end(), [](double v) { return v == 0.0; });
  }
  Point forward(std::span<const double> x) const {
    Point y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = (x[i] - offset[i]) / scale;
    return y;
  }
  Point inverse(std::span<const double> y) const {
    Point x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] * scale + offset[i];
    return x;
  }
};

struct NormalizedIfs {
  IfsSystem ifs;
  AffineNormalization map;
};

inline constexpr double kUnitCubeSlack = 1e-12;

/// Conjugates the system by an affine map placing K inside [0,1]^d. Systems
/// already inside the unit cube are returned unchanged with the identity map.
inline NormalizedIfs normalize_to_unit_cube(const IfsSystem& ifs) {
  const std::size_t d = ifs.dimension();
  const BoundingBox box = attractor_bounding_box(ifs);
  bool inside = true;
  for (std::size_t i = 0; i < d; ++i) {
    inside = inside && box.lo[i] >= -kUnitCubeSlack && box.hi[i] <= 1.0 + kUnitCubeSlack;
  }
  if (inside) return {ifs, AffineNormalization{Point(d, 0.0), 1.0}};

  AffineNormalization norm{box.lo, box.max_side() > 0.0 ? box.max_side() : 1.0};
  std::vector<Similitude> maps;
  maps.reserve(ifs.size());
  for (const auto& m : ifs.maps()) {
    // A S A^-1 (y) = r O y + (r O offset + t - offset) / scale
    Point shifted = m.apply(norm.offset);
    for (std::size_t i = 0; i < d; ++i) shifted[i] = (shifted[i] - norm.offset[i]) / norm.scale;
    maps.emplace_back(m.ratio(), m.orthogonal(), std::move(shifted));
  }
  return {IfsSystem(ifs.name(), d, std::move(maps), ifs.declared_osc()), norm};
}

}  // namespace selfsim
