#include "mobcache/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mobcache/rng.hpp"

namespace mobcache {

ZipfPopularity zipf_pmf(std::size_t num_files, double gamma) {
  if (num_files == 0) throw std::invalid_argument("zipf_pmf: num_files must be positive");
  if (!std::isfinite(gamma) || gamma < 0.0)
    throw std::invalid_argument("zipf_pmf: gamma must be finite and nonnegative");

  ZipfPopularity pop;
  pop.num_files = num_files;
  pop.gamma = gamma;
  pop.pmf.resize(num_files);
  double norm = 0.0;
  for (std::size_t f = 0; f < num_files; ++f) {
    pop.pmf[f] = std::pow(static_cast<double>(f + 1), -gamma);
    norm += pop.pmf[f];
  }
  for (double& p : pop.pmf) p /= norm;
  return pop;
}

std::size_t sample_request(const ZipfPopularity& pop, std::mt19937_64& rng) {
  if (pop.pmf.empty()) throw std::invalid_argument("sample_request: empty pmf");
  return sample_from_pmf(pop.pmf, rng);
}

RequestSampler::RequestSampler(const ZipfPopularity& pop) {
  if (pop.pmf.empty()) throw std::invalid_argument("RequestSampler: empty pmf");
  cdf_.resize(pop.pmf.size());
  double acc = 0.0;
  for (std::size_t f = 0; f < pop.pmf.size(); ++f) {
    acc += pop.pmf[f];
    cdf_[f] = acc;
  }
  cdf_.back() = 1.0;
}

std::size_t RequestSampler::operator()(std::mt19937_64& rng) const {
  const double u = uniform01(rng);
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::size_t>(it - cdf_.begin());
}

DiscretePlacement mpc_placement(const ZipfPopularity& pop, const Capacities& caps,
                                std::size_t num_nodes) {
  if (caps.per_node.size() != num_nodes)
    throw std::invalid_argument("mpc_placement: capacity vector length mismatch");

  const std::size_t num_files = pop.num_files;

  // Popularity order with ties toward the lower index. The Zipf pmf is
  // already nonincreasing, but mpc accepts any valid pmf.
  std::vector<std::size_t> order(num_files);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pop.pmf[a] > pop.pmf[b]; });

  DiscretePlacement placement;
  placement.stored.assign(num_nodes, std::vector<std::uint8_t>(num_files, 0));
  for (std::size_t n = 0; n < num_nodes; ++n) {
    const double c = caps.per_node[n];
    if (c < 0.0 || std::floor(c) != c)
      throw std::invalid_argument("mpc_placement: capacities must be nonnegative integers");
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(c), num_files);
    for (std::size_t k = 0; k < take; ++k) placement.stored[n][order[k]] = 1;
  }
  return placement;
}

}  // namespace mobcache
