#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "auctk/matrix.hpp"

namespace auctk {

struct Sample {
  long id = 0;
  std::vector<double> features;
  int label = 0;
};

// Immutable after construction. Sample ids are stable across subsampling
// and splits so that Lagrange multipliers can be keyed by them.
struct Dataset {
  std::vector<Sample> samples;
  std::set<int> critical_classes;
  std::uint64_t seed = 0;

  std::size_t size() const { return samples.size(); }
  std::size_t feature_dim() const {
    return samples.empty() ? 0 : samples.front().features.size();
  }
  std::map<int, long> class_counts() const;
  int num_classes() const;
  std::vector<long> counts_vector() const;

  Matrix feature_matrix() const;
  std::vector<int> labels() const;

  void validate() const;
};

Dataset gen_gaussians(const std::vector<std::size_t>& n_per_class,
                      const std::vector<std::vector<double>>& means,
                      const std::vector<std::vector<double>>& diag_covs,
                      std::uint64_t seed);

// Keep the majority class, randomly thin the minority down to
// round_half_up(majority / ratio).
Dataset subsample_to_ratio(const Dataset& data, int minority_class,
                           double ratio, std::uint64_t seed);

// Exponentially decaying counts n_c = round(base * imbalance^(-c/(C-1))).
std::vector<long> long_tailed_profile(long base_count, int num_classes,
                                      double imbalance);

struct SplitPair {
  Dataset train;
  Dataset validation;
};

// k independent stratified shuffles; `fraction` of each class goes to train.
std::vector<SplitPair> stratified_splits(const Dataset& data, int k,
                                         double fraction, std::uint64_t seed);

// CSV schema: header `id,label,f0..f{d-1}`; a sidecar `<path>.meta.json`
// carries the critical set and generator seed.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& data, const std::string& path);

long round_half_up(double x);

}  // namespace auctk
