#include "neb/mis/path_pdfs.hpp"

#include "neb/math/types.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace neb {

namespace {

constexpr PathDensity kInvalid{0.0, -1};

double forward_product(const PdfChain& c, int begin, int end) {
  double p = 1.0;
  for (int i = begin; i < end; ++i) p *= c.forward[i];
  return p;
}

double reverse_product(const PdfChain& c, int begin, int end) {
  double p = 1.0;
  for (int i = begin; i < end; ++i) p *= c.reverse[i];
  return p;
}

// Specular vertices in [begin, end), each a Dirac factor of the sampler
// that scatters through it.
int specular_count(const PdfChain& c, int begin, int end) {
  int n = 0;
  for (int j = begin; j < end; ++j) n += c.specular[j] ? 1 : 0;
  return n;
}

void check_length(const PdfChain& c) {
  if (c.length < 1 || c.length > kMaxPathLength) {
    throw std::out_of_range("path length " + std::to_string(c.length) + " outside [1, " +
                            std::to_string(kMaxPathLength) + "]");
  }
}

double merge_chance(const MergeContext& m) {
  if (m.vertex_count <= 0.0) return 0.0;
  return m.rho_emitter * kPi * m.radius * m.radius / m.vertex_count;
}

}  // namespace

double MisWeights::sum(int length) const {
  double s = random_hit + nee;
  for (int k = 1; k < length; ++k) s += photon[k] + light_photon[k];
  return s;
}

PathDensity pdf_random_hit(const PdfChain& c) {
  check_length(c);
  if (c.light_delta) return kInvalid;
  return {forward_product(c, 0, c.length), specular_count(c, 1, c.length)};
}

PathDensity pdf_nee(const PdfChain& c) {
  check_length(c);
  const int l = c.length;
  if (l < 2 || c.specular[l - 1]) return kInvalid;
  return {c.light_pdf * forward_product(c, 0, l - 1),
          specular_count(c, 1, l - 1) + (c.light_delta ? 1 : 0)};
}

PathDensity pdf_neb_photon(const PdfChain& c, const MergeContext& merge, int k) {
  check_length(c);
  const int l = c.length;
  if (k < 1 || k > l - 2) {
    throw std::out_of_range("photon merge vertex " + std::to_string(k) + " outside [1, " +
                            std::to_string(l - 2) + "]");
  }
  if (c.specular[k] || c.specular[l - 1]) return kInvalid;
  const double value = c.light_pdf * merge_chance(merge) * reverse_product(c, k, l - 1) *
                       forward_product(c, 0, k);
  return {value, specular_count(c, 1, k) + specular_count(c, k + 1, l - 1) + (c.light_delta ? 1 : 0)};
}

PathDensity pdf_light_photon(const PdfChain& c, double radius, int k) {
  check_length(c);
  const int l = c.length;
  if (k < 1 || k > l - 1) {
    throw std::out_of_range("light photon merge vertex " + std::to_string(k) + " outside [1, " +
                            std::to_string(l - 1) + "]");
  }
  if (c.specular[k]) return kInvalid;
  const double value =
      c.light_pdf * kPi * radius * radius * reverse_product(c, k, l) * forward_product(c, 0, k);
  return {value, specular_count(c, 1, k) + specular_count(c, k + 1, l) + (c.light_delta ? 1 : 0)};
}

namespace {

// Balance heuristic over candidates with the highest Dirac order. Index 0 is
// the random hit, 1 NEE, 2..2+K photon merges, 2+K.. light photon merges.
struct Candidates {
  std::array<double, 2 + 2 * kMaxPathLength> weighted{};
  std::array<int, 2 + 2 * kMaxPathLength> deltas{};
  int n = 0;

  void add(PathDensity p, double count) {
    weighted[n] = count * p.value;
    deltas[n] = count > 0.0 ? p.deltas : -1;
    ++n;
  }

  void normalize() {
    int best = -1;
    for (int i = 0; i < n; ++i) best = std::max(best, deltas[i]);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      if (deltas[i] != best || best < 0) weighted[i] = 0.0;
      total += weighted[i];
    }
    for (int i = 0; i < n; ++i) weighted[i] = total > 0.0 ? weighted[i] / total : 0.0;
  }
};

MisWeights unpack(const Candidates& c, int length) {
  MisWeights w;
  w.random_hit = c.weighted[0];
  w.nee = c.weighted[1];
  int idx = 2;
  for (int k = 1; k <= length - 2; ++k) w.photon[k] = c.weighted[idx++];
  for (int k = 1; k <= length - 1; ++k) w.light_photon[k] = c.weighted[idx++];
  return w;
}

}  // namespace

MisWeights mis_weights(const PdfChain& chain, const MergeContext& merge, const SamplerCounts& counts) {
  check_length(chain);
  const int l = chain.length;
  Candidates c;
  c.add(pdf_random_hit(chain), 1.0);
  c.add(pdf_nee(chain), counts.n_nee);
  for (int k = 1; k <= l - 2; ++k) c.add(pdf_neb_photon(chain, merge, k), counts.n_photon);
  for (int k = 1; k <= l - 1; ++k) c.add(pdf_light_photon(chain, merge.radius, k), counts.n_light_photon);
  c.normalize();
  return unpack(c, l);
}

MisWeights mis_weights_incremental(const PdfChain& chain, const MergeContext& merge,
                                   const SamplerCounts& counts) {
  check_length(chain);
  const int l = chain.length;
  const int light_delta = chain.light_delta ? 1 : 0;

  // prefix[k] = prod_{i<k} forward[i], spec_prefix[k] = specular in [1, k)
  std::array<double, kMaxPathLength + 1> prefix{};
  std::array<int, kMaxPathLength + 1> spec_prefix{};
  prefix[0] = 1.0;
  spec_prefix[0] = 0;
  for (int i = 0; i < l; ++i) {
    prefix[i + 1] = prefix[i] * chain.forward[i];
    spec_prefix[i + 1] = spec_prefix[i] + (i >= 1 && chain.specular[i] ? 1 : 0);
  }
  // suffix[k] = prod_{k <= i < l} reverse[i], the walk from the light back
  // to k; backtrack[k] stops before the emission segment.
  std::array<double, kMaxPathLength + 1> suffix{};
  std::array<double, kMaxPathLength + 1> backtrack{};
  suffix[l] = 1.0;
  backtrack[l - 1] = 1.0;
  for (int i = l - 1; i >= 0; --i) {
    suffix[i] = suffix[i + 1] * chain.reverse[i];
    if (i < l - 1) backtrack[i] = backtrack[i + 1] * chain.reverse[i];
  }
  const auto spec_between = [&](int begin, int end) {
    return begin >= end ? 0 : spec_prefix[end] - spec_prefix[begin];
  };

  Candidates c;
  c.add(light_delta ? kInvalid : PathDensity{prefix[l], spec_prefix[l]}, 1.0);
  if (l >= 2 && !chain.specular[l - 1]) {
    c.add({chain.light_pdf * prefix[l - 1], spec_prefix[l - 1] + light_delta}, counts.n_nee);
  } else {
    c.add(kInvalid, counts.n_nee);
  }
  const double chance = merge_chance(merge);
  for (int k = 1; k <= l - 2; ++k) {
    if (chain.specular[k] || chain.specular[l - 1]) {
      c.add(kInvalid, counts.n_photon);
      continue;
    }
    c.add({chain.light_pdf * chance * backtrack[k] * prefix[k],
           spec_prefix[k] + spec_between(k + 1, l - 1) + light_delta},
          counts.n_photon);
  }
  const double area = kPi * merge.radius * merge.radius;
  for (int k = 1; k <= l - 1; ++k) {
    if (chain.specular[k]) {
      c.add(kInvalid, counts.n_light_photon);
      continue;
    }
    c.add({chain.light_pdf * area * suffix[k] * prefix[k],
           spec_prefix[k] + spec_between(k + 1, l) + light_delta},
          counts.n_light_photon);
  }
  c.normalize();
  return unpack(c, l);
}

}  // namespace neb
