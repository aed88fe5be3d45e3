#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bfequiv/rng.hpp"

namespace bfe {

// One randomized instance. `data` and `n` are the parts the shrinker halves;
// `params` and `variant` stay fixed.
struct PropertyInstance {
  int n = 0;
  int variant = 0;
  std::uint64_t seed = 0;
  std::vector<double> params;
  std::vector<double> data;
};

struct PropertyVerdict {
  bool pass = true;
  std::string detail;
  std::vector<std::pair<std::string, double>> values;
};

struct PropertySpec {
  std::string name;
  std::string claim;
  std::function<PropertyInstance(RngStream&)> generate;
  std::function<PropertyVerdict(const PropertyInstance&)> check;
  int trials = 200;
  int min_n = 1;
  // data.size() as a function of n, so shrinking n can drop observations
  std::function<std::size_t(const PropertyInstance&)> data_size;
};

struct PropertyFailure {
  std::size_t trial = 0;
  PropertyInstance original;
  PropertyInstance shrunk;
  int shrink_steps = 0;
  PropertyVerdict verdict;  // verdict on the shrunk instance
};

struct PropertyResult {
  std::string name;
  std::string claim;
  int trials = 0;
  int passed = 0;
  int inconclusive = 0;
  std::vector<PropertyFailure> failures;
  bool ok() const { return passed == trials; }
};

PropertyResult run_property(const PropertySpec& spec, std::uint64_t seed, int workers = 1);

// Greedy shrinking: halve data magnitudes, then n, while the check still fails.
PropertyInstance shrink_instance(const PropertySpec& spec, PropertyInstance inst, int& steps);

std::vector<PropertySpec> catalogue();

inline constexpr std::uint64_t kDefaultPropertySeed = 20240601;

std::string property_transcript(const std::vector<PropertyResult>& results);
std::string describe_instance(const PropertyInstance& inst);

}  // namespace bfe
