#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ceids/core.hpp"
#include "ceids/dataset.hpp"

// Shared test data builders. The synthetic NSL-KDD files reproduce the real
// distribution's per-attack-name record counts and carry class-conditional
// feature patterns, so ingestion totals and end-to-end learnability can both
// be exercised without the (non-redistributable) original files.
namespace fixtures {

struct AttackCount {
  const char* name;
  std::size_t count;
};

// Per-attack-name record counts of KDDTrain+ (125,973 records).
std::span<const AttackCount> train_attack_counts();
// Per-attack-name record counts matching the published test-set totals
// (22,543 records).
std::span<const AttackCount> test_attack_counts();

// One synthetic record line for the given attack name. test_set switches the
// nominal vocabulary to include categories unseen in training.
std::string synthetic_line(const std::string& attack, std::mt19937_64& rng, bool test_set);

// Writes a full synthetic train or test file with the exact per-name counts
// above, shuffled under seed.
void write_synthetic_nslkdd(const std::string& path, bool test_set, std::uint64_t seed);

// Writes `lines` synthetic records sampled from the train distribution.
void write_synthetic_subset(const std::string& path, std::size_t lines, std::uint64_t seed);

// A learnable 5-class dataset whose numeric features form three well
// separated blobs; classes are separable within each blob.
std::vector<ceids::LabeledRecord> blob_records(std::size_t per_class, std::uint64_t seed,
                                               bool test_variant = false);

// Isotropic Gaussian blobs where sigma is the radial scale: per-coordinate
// deviation sigma / sqrt(dim), so a typical point sits at distance ~sigma
// from its center regardless of dimension.
ceids::Matrix gaussian_blobs(const std::vector<std::vector<double>>& centers,
                             std::size_t per_blob, double sigma, std::uint64_t seed);

// Unique scratch directory for this test process.
std::string temp_dir();
std::string temp_path(const std::string& name);

void write_text(const std::string& path, const std::string& content);

}  // namespace fixtures
