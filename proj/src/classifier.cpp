#include "kong/classifier.hpp"

#include "kong/hash.hpp"
#include "kong/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace kong {

namespace {

double sparse_dot(const std::vector<double>& w, const SparseRow& x) {
    double s = 0.0;
    for (const auto& [j, value] : x) s += w[j] * value;
    return s;
}

/// argmin_b mean_i max(0, 1 - y_i (s_i + b)): the slope on (t_j, t_{j+1}) of the sorted
/// breakpoints t = y - s is j - #positives, so any b between t_P and t_{P+1} is optimal.
double optimal_bias(std::span<const double> scores, std::span<const double> labels) {
    std::vector<double> breakpoints(scores.size());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        breakpoints[i] = labels[i] - scores[i];
        if (labels[i] > 0) ++positives;
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    if (positives == 0) return breakpoints.front();
    if (positives == breakpoints.size()) return breakpoints.back();
    return 0.5 * (breakpoints[positives - 1] + breakpoints[positives]);
}

BinaryModel train_binary(std::span<const SparseRow> rows, std::span<const double> labels, std::size_t dimension,
                         const TrainOptions& options, std::uint64_t seed) {
    const std::size_t n = rows.size();
    BinaryModel model{std::vector<double>(dimension, 0.0), 0.0};
    std::vector<double> scores(n, 0.0);
    auto refit_bias = [&](const std::vector<double>& w) {
        for (std::size_t i = 0; i < n; ++i) scores[i] = sparse_dot(w, rows[i]);
        return optimal_bias(scores, labels);
    };
    if (options.C <= 0.0 || options.epochs == 0) {
        model.bias = refit_bias(model.weights);
        return model;
    }

    const double lambda = 1.0 / options.C;
    const double radius = 1.0 / std::sqrt(lambda);
    // w = scale * v, so the shrink step is O(1) and updates touch only the row's nonzeros.
    std::vector<double> v(dimension, 0.0);
    double scale = 1.0;
    double v_norm2 = 0.0;
    double bias = refit_bias(v);

    std::vector<double> average(dimension, 0.0);
    std::size_t averaged = 0;
    const std::size_t first_averaged = options.epochs / 2;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::vector<double> w(dimension);
    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const double margin = labels[i] * (scale * sparse_dot(v, rows[i]) + bias);
            const double shrink = 1.0 - eta * lambda;
            if (shrink <= 0.0) {
                std::fill(v.begin(), v.end(), 0.0);
                scale = 1.0;
                v_norm2 = 0.0;
            } else {
                scale *= shrink;
            }
            if (margin < 1.0) {
                const double step = eta * labels[i] / scale;
                for (const auto& [j, value] : rows[i]) {
                    const double delta = step * value;
                    v_norm2 += delta * (2.0 * v[j] + delta);
                    v[j] += delta;
                }
            }
            const double norm = scale * std::sqrt(std::max(v_norm2, 0.0));
            if (norm > radius) scale *= radius / norm;
            if (scale < 1e-100) {
                for (double& x : v) x *= scale;
                v_norm2 *= scale * scale;
                scale = 1.0;
            }
        }
        for (std::size_t j = 0; j < dimension; ++j) w[j] = scale * v[j];
        bias = refit_bias(w);
        if (epoch >= first_averaged) {
            for (std::size_t j = 0; j < dimension; ++j) average[j] += w[j];
            ++averaged;
        }
    }
    for (double& x : average) x /= static_cast<double>(averaged);
    model.weights = std::move(average);
    model.bias = refit_bias(model.weights);
    return model;
}

void require_rows(std::span<const SparseRow> rows, std::size_t dimension, std::span<const int> classes) {
    if (rows.size() != classes.size()) throw DataError("feature rows and classes differ in length");
    for (const auto& row : rows)
        for (const auto& [j, value] : row)
            if (j >= dimension) throw DataError("feature index beyond the model dimension");
}

template <class T>
std::vector<T> pick(std::span<const T> items, std::span<const std::size_t> indices) {
    std::vector<T> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(items[i]);
    return out;
}

double mean_of(std::span<const double> xs) {
    return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

double BinaryModel::score(const SparseRow& x) const { return sparse_dot(weights, x) + bias; }

int LinearModel::predict(const SparseRow& x) const {
    if (classes.empty() || models.empty()) throw Error("model is empty");
    auto better = [&](std::size_t a, std::size_t b) {
        return class_counts[a] != class_counts[b] ? class_counts[a] > class_counts[b] : classes[a] < classes[b];
    };
    if (classes.size() == 2) {
        const double s = models[0].score(x);
        if (s > 0.0) return classes[1];
        if (s < 0.0) return classes[0];
        return better(1, 0) ? classes[1] : classes[0];
    }
    std::size_t best = 0;
    double best_score = models[0].score(x);
    for (std::size_t c = 1; c < classes.size(); ++c) {
        const double s = models[c].score(x);
        if (s > best_score || (s == best_score && better(c, best))) {
            best = c;
            best_score = s;
        }
    }
    return classes[best];
}

std::vector<int> LinearModel::predict(std::span<const SparseRow> rows) const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(predict(row));
    return out;
}

void LinearModel::save(std::ostream& out) const {
    out << "kong-linear-model 1\n";
    out << "classes";
    for (int c : classes) out << ' ' << c;
    out << "\ncounts";
    for (auto c : class_counts) out << ' ' << c;
    out << "\ndimension " << dimension << "\nC " << format_number(C) << "\nmodels " << models.size() << '\n';
    for (const auto& m : models) {
        out << "bias " << format_number(m.bias) << "\nweights";
        for (double w : m.weights) out << ' ' << format_number(w);
        out << '\n';
    }
    if (!out) throw Error("failed to write model");
}

LinearModel LinearModel::load(std::istream& in) {
    auto line_of = [&](const std::string& key) {
        std::string line;
        if (!std::getline(in, line)) throw DataError("model file ends before '" + key + "'");
        std::istringstream fields(line);
        std::string found;
        fields >> found;
        if (found != key) throw DataError("model file: expected '" + key + "', found '" + found + "'");
        return fields;
    };
    {
        auto header = line_of("kong-linear-model");
        int version = 0;
        header >> version;
        if (version != 1) throw DataError("unsupported model version " + std::to_string(version));
    }
    LinearModel model;
    auto classes = line_of("classes");
    for (int c; classes >> c;) model.classes.push_back(c);
    auto counts = line_of("counts");
    for (std::size_t c; counts >> c;) model.class_counts.push_back(c);
    line_of("dimension") >> model.dimension;
    auto c_line = line_of("C");
    std::string c_text;
    c_line >> c_text;
    model.C = std::stod(c_text);
    std::size_t count = 0;
    line_of("models") >> count;
    for (std::size_t m = 0; m < count; ++m) {
        BinaryModel binary;
        std::string text;
        line_of("bias") >> text;
        binary.bias = std::stod(text);
        auto weights = line_of("weights");
        while (weights >> text) binary.weights.push_back(std::stod(text));
        if (binary.weights.size() != model.dimension) throw DataError("model weight count does not match dimension");
        model.models.push_back(std::move(binary));
    }
    const std::size_t expected = model.classes.size() == 2 ? 1 : model.classes.size();
    if (model.classes.size() < 2 || model.class_counts.size() != model.classes.size() || model.models.size() != expected)
        throw DataError("inconsistent model file");
    return model;
}

LinearModel train(std::span<const SparseRow> rows, std::size_t dimension, std::span<const int> classes,
                  const TrainOptions& options) {
    require_rows(rows, dimension, classes);
    if (options.C < 0.0 || !std::isfinite(options.C)) throw ConfigError("C must be finite and non-negative");
    std::map<int, std::size_t> counts;
    for (int c : classes) ++counts[c];
    if (counts.size() < 2) throw DataError("training needs at least two classes");

    LinearModel model;
    model.dimension = dimension;
    model.C = options.C;
    for (const auto& [c, count] : counts) {
        model.classes.push_back(c);
        model.class_counts.push_back(count);
    }
    const std::size_t binaries = counts.size() == 2 ? 1 : counts.size();
    for (std::size_t m = 0; m < binaries; ++m) {
        const int positive = binaries == 1 ? model.classes[1] : model.classes[m];
        std::vector<double> labels(classes.size());
        for (std::size_t i = 0; i < classes.size(); ++i) labels[i] = classes[i] == positive ? 1.0 : -1.0;
        model.models.push_back(train_binary(rows, labels, dimension, options, hash_combine(options.seed, m)));
    }
    return model;
}

LinearModel train(std::span<const FeatureMap> maps, std::span<const int> classes, const TrainOptions& options) {
    std::size_t dimension = 0;
    const auto rows = feature_rows(maps, &dimension);
    return train(rows, dimension, classes, options);
}

double accuracy(const LinearModel& model, std::span<const SparseRow> rows, std::span<const int> classes) {
    if (rows.size() != classes.size()) throw DataError("feature rows and classes differ in length");
    if (rows.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) correct += model.predict(rows[i]) == classes[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(rows.size());
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> classes, std::size_t folds,
                                                       std::uint64_t seed) {
    if (folds < 2) throw ConfigError("cross-validation needs at least two folds");
    if (classes.size() < folds) throw DataError("fewer items than folds");
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < classes.size(); ++i) by_class[classes[i]].push_back(i);
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> out(folds);
    std::size_t next = 0;
    for (auto& [c, items] : by_class) {
        std::shuffle(items.begin(), items.end(), rng);
        // Continue the round robin across classes so fold sizes differ by at most one.
        for (std::size_t i : items) out[next++ % folds].push_back(i);
    }
    for (auto& fold : out) std::sort(fold.begin(), fold.end());
    return out;
}

CrossValidationResult cross_validate(std::span<const SparseRow> rows, std::size_t dimension,
                                     std::span<const int> classes, const CrossValidationOptions& options) {
    require_rows(rows, dimension, classes);
    if (options.c_grid.empty()) throw ConfigError("the C grid is empty");
    if (options.repetitions == 0) throw ConfigError("repetitions must be at least 1");
    if (options.folds < 2) throw ConfigError("cross-validation needs at least two folds");
    if (rows.size() < options.folds) throw DataError("fewer graphs than folds");

    auto fit = [&](std::span<const std::size_t> train_idx, double C, std::uint64_t seed) {
        const auto train_rows = pick<SparseRow>(rows, train_idx);
        const auto train_classes = pick<int>(classes, train_idx);
        return train(train_rows, dimension, train_classes, {C, options.epochs, seed});
    };
    auto single_class = [&](std::span<const std::size_t> idx) {
        for (std::size_t i : idx)
            if (classes[i] != classes[idx.front()]) return false;
        return true;
    };

    auto select_c = [&](const std::vector<std::size_t>& train_idx, std::uint64_t seed) {
        if (options.c_grid.size() == 1) return options.c_grid.front();
        const auto train_classes = pick<int>(classes, train_idx);
        const std::size_t inner = std::min(options.inner_folds, train_idx.size());
        if (inner < 2) return options.c_grid.front();
        const auto inner_folds = stratified_folds(train_classes, inner, seed);
        double best_c = options.c_grid.front();
        double best_accuracy = -1.0;
        for (double C : options.c_grid) {
            std::size_t correct = 0;
            for (std::size_t f = 0; f < inner_folds.size(); ++f) {
                std::vector<std::size_t> fit_idx;
                for (std::size_t g = 0; g < inner_folds.size(); ++g)
                    if (g != f)
                        for (std::size_t local : inner_folds[g]) fit_idx.push_back(train_idx[local]);
                if (fit_idx.empty() || single_class(fit_idx)) continue;
                const auto model = fit(fit_idx, C, hash_combine(seed, f));
                for (std::size_t local : inner_folds[f])
                    correct += model.predict(rows[train_idx[local]]) == classes[train_idx[local]] ? 1 : 0;
            }
            const double acc = static_cast<double>(correct) / static_cast<double>(train_idx.size());
            if (acc > best_accuracy) {
                best_accuracy = acc;
                best_c = C;
            }
        }
        return best_c;
    };

    CrossValidationResult result;
    for (std::size_t rep = 0; rep < options.repetitions; ++rep) {
        const std::uint64_t rep_seed = hash_combine(options.seed, rep);
        const auto folds = stratified_folds(classes, options.folds, rep_seed);
        std::vector<std::size_t> correct(folds.size(), 0);
        std::vector<double> chosen(folds.size(), 0.0);
        parallel_for(folds.size(), options.threads, [&](std::size_t f) {
            std::vector<std::size_t> train_idx;
            for (std::size_t g = 0; g < folds.size(); ++g)
                if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
            std::sort(train_idx.begin(), train_idx.end());
            const std::uint64_t fold_seed = hash_combine(rep_seed, f);
            if (single_class(train_idx)) {
                for (std::size_t i : folds[f]) correct[f] += classes[i] == classes[train_idx.front()] ? 1 : 0;
                chosen[f] = options.c_grid.front();
                return;
            }
            chosen[f] = select_c(train_idx, fold_seed);
            const auto model = fit(train_idx, chosen[f], fold_seed);
            for (std::size_t i : folds[f]) correct[f] += model.predict(rows[i]) == classes[i] ? 1 : 0;
        });
        const std::size_t total = std::accumulate(correct.begin(), correct.end(), std::size_t{0});
        result.accuracies.push_back(static_cast<double>(total) / static_cast<double>(rows.size()));
        result.chosen_c.insert(result.chosen_c.end(), chosen.begin(), chosen.end());
    }
    result.mean = mean_of(result.accuracies);
    if (result.accuracies.size() > 1) {
        double ss = 0.0;
        for (double a : result.accuracies) ss += (a - result.mean) * (a - result.mean);
        result.stddev = std::sqrt(ss / static_cast<double>(result.accuracies.size() - 1));
    }
    return result;
}

CrossValidationResult cross_validate(const GraphDataset& dataset, const FeatureConfig& config,
                                     const CrossValidationOptions& options) {
    const auto maps = dataset_feature_maps(dataset, config, options.threads);
    std::size_t dimension = 0;
    const auto rows = feature_rows(maps, &dimension);
    return cross_validate(rows, dimension, dataset.classes, options);
}

}  // namespace kong
