#pragma once

#include "kong/export.hpp"
#include "kong/feature_map.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace kong {

struct TrainOptions {
    /// Objective: ||w||^2 / (2C) + mean hinge loss. C = 0 gives w = 0.
    double C = 1.0;
    std::size_t epochs = 50;
    std::uint64_t seed = 1;
};

/// One separating hyperplane: score(x) = <w, x> + bias.
struct BinaryModel {
    std::vector<double> weights;
    double bias = 0.0;

    double score(const SparseRow& x) const;
    bool operator==(const BinaryModel&) const = default;
};

/// Linear classifier. Two classes use one model (positive = classes[1]); more classes use one
/// model per class, one-vs-rest. Score ties go to the more frequent class, then the smaller one.
struct LinearModel {
    std::vector<int> classes;               ///< ascending
    std::vector<std::size_t> class_counts;  ///< training frequency per class
    std::size_t dimension = 0;
    double C = 1.0;
    std::vector<BinaryModel> models;

    int predict(const SparseRow& x) const;
    std::vector<int> predict(std::span<const SparseRow> rows) const;

    /// Text format: "kong-linear-model 1", then classes, counts, dimension, C and every model's
    /// bias and weights, one item per line.
    void save(std::ostream& out) const;
    static LinearModel load(std::istream& in);

    bool operator==(const LinearModel&) const = default;
};

/// Stochastic subgradient descent on the hinge loss with seeded shuffling. The weights are the
/// average of the end-of-epoch iterates over the second half of the epochs; the unregularized
/// bias is set to its exact minimizer after every epoch. Throws DataError for fewer than two
/// classes or mismatched inputs.
LinearModel train(std::span<const SparseRow> rows, std::size_t dimension, std::span<const int> classes,
                  const TrainOptions& options = {});
LinearModel train(std::span<const FeatureMap> maps, std::span<const int> classes, const TrainOptions& options = {});

double accuracy(const LinearModel& model, std::span<const SparseRow> rows, std::span<const int> classes);

/// Assigns every item to one of `folds` folds so each class is spread evenly; returns the item
/// indices of each fold.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> classes, std::size_t folds,
                                                       std::uint64_t seed);

struct CrossValidationOptions {
    std::size_t folds = 10;
    std::vector<double> c_grid{0.1, 1.0, 10.0};
    /// Folds of the inner split that picks C on each training part (ignored for a single C).
    std::size_t inner_folds = 3;
    std::size_t repetitions = 1;
    std::size_t epochs = 50;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

struct CrossValidationResult {
    /// Test accuracy of every repetition, pooled over its folds.
    std::vector<double> accuracies;
    double mean = 0.0;
    /// Sample standard deviation over repetitions (0 for one repetition).
    double stddev = 0.0;
    /// C picked for each outer fold, repetition-major.
    std::vector<double> chosen_c;
};

CrossValidationResult cross_validate(std::span<const SparseRow> rows, std::size_t dimension,
                                     std::span<const int> classes, const CrossValidationOptions& options = {});
CrossValidationResult cross_validate(const GraphDataset& dataset, const FeatureConfig& config,
                                     const CrossValidationOptions& options = {});

}  // namespace kong
