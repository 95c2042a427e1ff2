#include "auctk/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "auctk/rng.hpp"
#include "json.hpp"

namespace auctk {

long round_half_up(double x) {
  return static_cast<long>(std::floor(x + 0.5));
}

std::map<int, long> Dataset::class_counts() const {
  std::map<int, long> counts;
  for (const auto& s : samples) counts[s.label] += 1;
  return counts;
}

int Dataset::num_classes() const {
  int top = -1;
  for (const auto& s : samples) top = std::max(top, s.label);
  return top + 1;
}

std::vector<long> Dataset::counts_vector() const {
  std::vector<long> v(static_cast<std::size_t>(num_classes()), 0);
  for (const auto& s : samples) v[static_cast<std::size_t>(s.label)] += 1;
  return v;
}

Matrix Dataset::feature_matrix() const {
  Matrix m(samples.size(), feature_dim());
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = 0; j < samples[i].features.size(); ++j)
      m(i, j) = samples[i].features[j];
  return m;
}

std::vector<int> Dataset::labels() const {
  std::vector<int> y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) y[i] = samples[i].label;
  return y;
}

void Dataset::validate() const {
  std::set<long> ids;
  for (const auto& s : samples) {
    if (!ids.insert(s.id).second)
      throw std::invalid_argument("duplicate sample id " +
                                  std::to_string(s.id));
    if (s.features.size() != feature_dim())
      throw std::invalid_argument("ragged feature vectors");
  }
  auto counts = class_counts();
  if (critical_classes.empty())
    throw std::invalid_argument("critical class set must be non-empty");
  if (critical_classes.size() >= counts.size())
    throw std::invalid_argument(
        "critical classes must be a strict subset of the classes");
}

Dataset gen_gaussians(const std::vector<std::size_t>& n_per_class,
                      const std::vector<std::vector<double>>& means,
                      const std::vector<std::vector<double>>& diag_covs,
                      std::uint64_t seed) {
  if (n_per_class.size() != means.size() || means.size() != diag_covs.size())
    throw std::invalid_argument("per-class parameter lists must align");
  if (means.empty()) throw std::invalid_argument("need at least one class");
  const std::size_t dim = means.front().size();
  for (std::size_t c = 0; c < means.size(); ++c) {
    if (means[c].size() != dim || diag_covs[c].size() != dim)
      throw std::invalid_argument("inconsistent feature dimension");
    for (double v : diag_covs[c])
      if (!(v > 0.0))
        throw std::invalid_argument("covariance diagonal must be positive");
  }

  Dataset data;
  data.seed = seed;
  Rng rng(seed);
  long next_id = 0;
  for (std::size_t c = 0; c < means.size(); ++c) {
    for (std::size_t i = 0; i < n_per_class[c]; ++i) {
      Sample s;
      s.id = next_id++;
      s.label = static_cast<int>(c);
      s.features.resize(dim);
      for (std::size_t d = 0; d < dim; ++d)
        s.features[d] = means[c][d] + std::sqrt(diag_covs[c][d]) * rng.normal();
      data.samples.push_back(std::move(s));
    }
  }
  // smallest class is the critical one by default
  auto counts = data.class_counts();
  int smallest = counts.begin()->first;
  for (const auto& [cls, n] : counts)
    if (n < counts[smallest]) smallest = cls;
  data.critical_classes = {smallest};
  if (counts.size() == 2) data.critical_classes = {1};
  return data;
}

Dataset subsample_to_ratio(const Dataset& data, int minority_class,
                           double ratio, std::uint64_t seed) {
  if (!(ratio >= 1.0)) throw std::invalid_argument("ratio must be >= 1");
  auto counts = data.class_counts();
  if (!counts.count(minority_class))
    throw std::invalid_argument("minority class not present");
  long majority = 0;
  for (const auto& [cls, n] : counts)
    if (cls != minority_class) majority = std::max(majority, n);
  long target = round_half_up(static_cast<double>(majority) / ratio);
  long have = counts[minority_class];
  if (target > have)
    throw std::invalid_argument("ratio unachievable: want " +
                                std::to_string(target) + " minority, have " +
                                std::to_string(have));
  if (target < 1) throw std::invalid_argument("ratio leaves no minority samples");

  std::vector<std::size_t> minority_idx;
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    if (data.samples[i].label == minority_class) minority_idx.push_back(i);
  Rng rng(seed);
  rng.shuffle(minority_idx);
  minority_idx.resize(static_cast<std::size_t>(target));
  std::set<std::size_t> keep(minority_idx.begin(), minority_idx.end());

  Dataset out;
  out.critical_classes = data.critical_classes;
  out.seed = seed;
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    if (data.samples[i].label != minority_class || keep.count(i))
      out.samples.push_back(data.samples[i]);
  return out;
}

std::vector<long> long_tailed_profile(long base_count, int num_classes,
                                      double imbalance) {
  if (!(imbalance >= 1.0))
    throw std::invalid_argument("imbalance ratio must be >= 1");
  if (num_classes < 2) throw std::invalid_argument("need >= 2 classes");
  std::vector<long> counts;
  for (int c = 0; c < num_classes; ++c) {
    double expo = -static_cast<double>(c) / static_cast<double>(num_classes - 1);
    long n = round_half_up(static_cast<double>(base_count) *
                           std::pow(imbalance, expo));
    if (n < 1)
      throw std::invalid_argument("profile drops class " + std::to_string(c) +
                                  " below one sample");
    counts.push_back(n);
  }
  return counts;
}

std::vector<SplitPair> stratified_splits(const Dataset& data, int k,
                                         double fraction, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("fraction must be in (0,1)");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    by_class[data.samples[i].label].push_back(i);
  for (const auto& [cls, idx] : by_class)
    if (idx.size() < 2)
      throw std::invalid_argument("class " + std::to_string(cls) +
                                  " too small to stratify");

  std::vector<SplitPair> out;
  for (int split = 0; split < k; ++split) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(split)));
    SplitPair pair;
    pair.train.critical_classes = data.critical_classes;
    pair.validation.critical_classes = data.critical_classes;
    pair.train.seed = pair.validation.seed = data.seed;
    for (auto& [cls, idx] : by_class) {
      std::vector<std::size_t> shuffled = idx;
      rng.shuffle(shuffled);
      long n_train = round_half_up(fraction * static_cast<double>(idx.size()));
      n_train = std::clamp<long>(n_train, 1, static_cast<long>(idx.size()) - 1);
      for (std::size_t i = 0; i < shuffled.size(); ++i) {
        auto& dest = (i < static_cast<std::size_t>(n_train)) ? pair.train
                                                             : pair.validation;
        dest.samples.push_back(data.samples[shuffled[i]]);
      }
    }
    out.push_back(std::move(pair));
  }
  return out;
}

void save_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "id,label";
  for (std::size_t d = 0; d < data.feature_dim(); ++d) out << ",f" << d;
  out << "\n";
  char buf[64];
  for (const auto& s : data.samples) {
    out << s.id << "," << s.label;
    for (double v : s.features) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out << buf;
    }
    out << "\n";
  }

  nlohmann::json meta;
  meta["critical_classes"] = std::vector<int>(data.critical_classes.begin(),
                                              data.critical_classes.end());
  meta["seed"] = data.seed;
  nlohmann::json counts = nlohmann::json::object();
  for (const auto& [cls, n] : data.class_counts())
    counts[std::to_string(cls)] = n;
  meta["class_counts"] = counts;
  std::ofstream mout(path + ".meta.json", std::ios::binary);
  if (!mout) throw std::runtime_error("cannot write " + path + ".meta.json");
  mout << meta.dump(2) << "\n";
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw std::runtime_error(path + ": empty file");
  // header sanity only; feature count is taken from the rows
  if (line.rfind("id,label", 0) != 0)
    throw std::runtime_error(path + ": line 1: expected header id,label,f0..");

  Dataset data;
  std::size_t line_no = 1;
  std::size_t dim = static_cast<std::size_t>(-1);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 3)
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected id,label and features");
    if (dim == static_cast<std::size_t>(-1)) dim = fields.size() - 2;
    if (fields.size() - 2 != dim)
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected " + std::to_string(dim) +
                               " features, got " +
                               std::to_string(fields.size() - 2));
    Sample s;
    try {
      s.id = std::stol(fields[0]);
      s.label = std::stoi(fields[1]);
      for (std::size_t d = 0; d < dim; ++d) {
        double v = std::stod(fields[2 + d]);
        if (!std::isfinite(v))
          throw std::runtime_error("non-finite value");
        s.features.push_back(v);
      }
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": " + e.what());
    }
    data.samples.push_back(std::move(s));
  }
  if (data.samples.empty())
    throw std::runtime_error(path + ": no data rows");

  std::ifstream min(path + ".meta.json", std::ios::binary);
  if (min) {
    nlohmann::json meta = nlohmann::json::parse(min);
    for (int c : meta.at("critical_classes").get<std::vector<int>>())
      data.critical_classes.insert(c);
    data.seed = meta.value("seed", 0ULL);
  } else {
    // no sidecar: default to the smallest class
    auto counts = data.class_counts();
    int smallest = counts.begin()->first;
    for (const auto& [cls, n] : counts)
      if (n < counts[smallest]) smallest = cls;
    data.critical_classes = {smallest};
  }
  data.validate();
  return data;
}

}  // namespace auctk
