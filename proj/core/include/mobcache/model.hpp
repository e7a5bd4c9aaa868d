#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace mobcache {

/// File-request law: pmf[f] proportional to (f+1)^-gamma, so file 0 is the
/// most popular and the pmf is nonincreasing in the file index.
struct ZipfPopularity {
  std::size_t num_files = 0;
  double gamma = 0.0;
  std::vector<double> pmf;
};

/// Fractional storage under fountain coding: x[n][f] is the fraction of
/// file f's coded symbols held at node n, in [0, 1].
struct CodedPlacement {
  std::vector<std::vector<double>> x;

  std::size_t num_nodes() const { return x.size(); }
  std::size_t num_files() const { return x.empty() ? 0 : x[0].size(); }
};

/// Whole-file storage: stored[n][f] is 1 when node n holds all of file f.
struct DiscretePlacement {
  std::vector<std::vector<std::uint8_t>> stored;

  std::size_t num_nodes() const { return stored.size(); }
  std::size_t num_files() const { return stored.empty() ? 0 : stored[0].size(); }
};

/// Cache sizes in file-size units (file size is normalized to 1).
struct Capacities {
  std::vector<double> per_node;
};

/// Builds the normalized Zipf pmf over num_files ranks.
/// Rejects num_files == 0 and negative or non-finite gamma.
ZipfPopularity zipf_pmf(std::size_t num_files, double gamma);

/// Draws one file index distributed by pop.pmf.
std::size_t sample_request(const ZipfPopularity& pop, std::mt19937_64& rng);

/// Precomputed-CDF request sampler for tight loops.
class RequestSampler {
 public:
  explicit RequestSampler(const ZipfPopularity& pop);
  std::size_t operator()(std::mt19937_64& rng) const;

 private:
  std::vector<double> cdf_;
};

/// Most-popular-content baseline: every node stores its top-floor(capacity)
/// files by popularity, ties broken toward the lower file index.
/// Capacities must be integer-valued.
DiscretePlacement mpc_placement(const ZipfPopularity& pop, const Capacities& caps,
                                std::size_t num_nodes);

}  // namespace mobcache
