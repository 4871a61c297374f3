#pragma once

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fitfree/common.hpp"

namespace fitfree {

/// A permutation of {0,...,m-1} in image form. Points are 0-based internally;
/// all file formats and printed output are 1-based.
class Perm {
public:
  Perm() = default;

  explicit Perm(int degree) : img_(degree) {
    std::iota(img_.begin(), img_.end(), 0);
  }

  explicit Perm(std::vector<int> images) : img_(std::move(images)) {
    std::vector<char> seen(img_.size(), 0);
    for (int x : img_) {
      require(x >= 0 && x < degree() && !seen[x], "NotAPermutation",
              "image list is not a bijection");
      seen[x] = 1;
    }
  }

  static Perm identity(int degree) { return Perm(degree); }

  // Cycle notation helper, 0-based points: {{0,1,2}} = (1 2 3) in 1-based.
  static Perm from_cycles(int degree, const std::vector<std::vector<int>> &cycles) {
    std::vector<int> img(degree);
    std::iota(img.begin(), img.end(), 0);
    for (const auto &cyc : cycles) {
      for (std::size_t i = 0; i < cyc.size(); ++i) {
        int from = cyc[i], to = cyc[(i + 1) % cyc.size()];
        require(from >= 0 && from < degree && img[from] == from, "BadCycle",
                "cycle reuses or exceeds points");
        img[from] = to;
      }
    }
    return Perm(std::move(img));
  }

  int degree() const { return static_cast<int>(img_.size()); }
  int operator[](int x) const { return img_[x]; }
  const std::vector<int> &images() const { return img_; }

  bool is_identity() const {
    for (int i = 0; i < degree(); ++i)
      if (img_[i] != i)
        return false;
    return true;
  }

  // Left-to-right composition: x^(a*b) = (x^a)^b.
  friend Perm operator*(const Perm &a, const Perm &b) {
    require(a.degree() == b.degree(), "DegreeMismatch", "composing permutations");
    std::vector<int> img(a.degree());
    for (int i = 0; i < a.degree(); ++i)
      img[i] = b.img_[a.img_[i]];
    Perm r;
    r.img_ = std::move(img);
    return r;
  }

  Perm inverse() const {
    std::vector<int> img(degree());
    for (int i = 0; i < degree(); ++i)
      img[img_[i]] = i;
    Perm r;
    r.img_ = std::move(img);
    return r;
  }

  // f^-1 * g * f, the conjugate of g transported through f.
  static Perm conjugate(const Perm &g, const Perm &f) {
    return f.inverse() * g * f;
  }

  bool operator==(const Perm &o) const { return img_ == o.img_; }
  bool operator!=(const Perm &o) const { return img_ != o.img_; }
  bool operator<(const Perm &o) const { return img_ < o.img_; }

  int first_moved() const {
    for (int i = 0; i < degree(); ++i)
      if (img_[i] != i)
        return i;
    return -1;
  }

  bool is_even() const {
    // parity from cycle structure
    std::vector<char> seen(img_.size(), 0);
    int transpositions = 0;
    for (int i = 0; i < degree(); ++i) {
      if (seen[i])
        continue;
      int len = 0;
      for (int j = i; !seen[j]; j = img_[j]) {
        seen[j] = 1;
        ++len;
      }
      transpositions += len - 1;
    }
    return transpositions % 2 == 0;
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0x42ULL;
    for (int x : img_)
      h = hash_mix(h, static_cast<std::uint64_t>(x));
    return h;
  }

  std::string str() const {
    std::ostringstream os;
    for (int i = 0; i < degree(); ++i) {
      if (i)
        os << ' ';
      os << img_[i] + 1;
    }
    return os.str();
  }

private:
  std::vector<int> img_;
};

struct PermHash {
  std::size_t operator()(const Perm &p) const { return p.hash(); }
};

inline int perm_order(const Perm &p) {
  Perm q = p;
  int ord = 1;
  while (!q.is_identity()) {
    q = q * p;
    ++ord;
  }
  return ord;
}

// 1-based image list, e.g. "2 3 1" = (1 2 3). Commas are accepted too.
inline Perm parse_perm(const std::string &text, int degree) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::istringstream is(cleaned);
  std::vector<int> img;
  int v;
  while (is >> v) {
    require(v >= 1 && v <= degree, "NotAPermutation",
            "point " + std::to_string(v) + " outside 1.." + std::to_string(degree));
    img.push_back(v - 1);
  }
  require(static_cast<int>(img.size()) == degree, "NotAPermutation",
          "expected " + std::to_string(degree) + " images");
  return Perm(std::move(img));
}

} // namespace fitfree
