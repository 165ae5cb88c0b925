#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iotsec/features.hpp"
#include "iotsec/nvd.hpp"

namespace iotsec::clf {

struct TaskSpec {
    enum class Kind { MultiClass, Binary };

    std::string name;
    Kind kind = Kind::MultiClass;
    std::vector<std::string> labels;  // label domain, canonical order
};

// The nine prediction tasks: six 3-class CVSS metrics followed by the three
// binary privilege flags.
std::vector<TaskSpec> standard_tasks();

// Ground-truth label of a scored record for one task ("NETWORK", "true", ...).
std::string task_label(const nvd::CveRecord& record, const TaskSpec& spec);

struct Example {
    FeatureVector features;
    std::string label;
};

struct EvalScores {
    double accuracy = 0.0;
    std::optional<double> f1;           // binary: F1 of the positive ("true") label
    std::optional<double> f1_macro;     // multi-class
    std::optional<double> f1_weighted;  // multi-class

    // Metric the grid search optimizes: f1 for binary, f1_weighted otherwise.
    double selection_metric(TaskSpec::Kind kind) const;
};

EvalScores evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& truth, TaskSpec::Kind kind);

// Duplicates minority-class examples uniformly at random (with replacement)
// until every class matches the majority count. Originals are kept in input
// order; duplicates are appended per label in lexicographic label order.
std::vector<Example> oversample(const std::vector<Example>& examples, std::uint64_t seed);

// One grid point. The linear backend reads "l2" and "epochs".
using Hyperparams = std::map<std::string, double>;

std::vector<Hyperparams> default_grid();

// A trained per-task model.
class Model {
public:
    virtual ~Model() = default;
    virtual const std::vector<std::string>& labels() const = 0;
    // Per-label scores, same order as labels().
    virtual std::vector<double> label_scores(const FeatureVector& features) const = 0;
    virtual nlohmann::ordered_json to_json() const = 0;

    // Argmax of label_scores; ties go to the earliest label in domain order.
    std::string predict(const FeatureVector& features) const;
};

using ModelPtr = std::unique_ptr<Model>;

// Training backend. "linear" (regularized one-vs-rest logistic regression
// trained by gradient descent) is the self-contained default; alternative
// backends such as boosted trees can be added to the registry in
// classifier.cpp behind the same interface.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string name() const = 0;
    virtual ModelPtr train(const std::vector<Example>& train, const TaskSpec& spec,
                           const Hyperparams& hp, std::size_t dim, std::uint64_t seed) const = 0;
    virtual ModelPtr model_from_json(const nlohmann::json& j) const = 0;
};

const Backend& backend_by_name(std::string_view name);

// Trains one model. Empty training sets and constant-label inputs are errors.
ModelPtr train_task(const std::vector<Example>& train, const TaskSpec& spec, const Hyperparams& hp,
                    std::size_t dim, const Backend& backend, std::uint64_t seed);

struct GridPointResult {
    Hyperparams hp;
    EvalScores validation;
};

struct GridSearchResult {
    std::size_t best_index = 0;
    Hyperparams best;
    std::vector<GridPointResult> points;
};

// Trains one model per grid point on `train`, scores each on `validation`,
// returns the argmax of the selection metric (ties: first in grid order).
GridSearchResult grid_search(const std::vector<Example>& train,
                             const std::vector<Example>& validation, const TaskSpec& spec,
                             const std::vector<Hyperparams>& grid, std::size_t dim,
                             const Backend& backend, std::uint64_t seed);

struct TaskResult {
    TaskSpec spec;
    ModelPtr model;
    Hyperparams chosen;
    std::vector<GridPointResult> grid_points;
    EvalScores validation;  // best grid point, on the validation split
    EvalScores test;        // final model, on the test split
};

struct FitConfig {
    std::uint64_t seed = 42;
    std::size_t min_df = 2;
    NgramRange ngram_range{1, 3};
    std::string backend = "linear";
    std::vector<Hyperparams> grid = default_grid();
};

struct Prediction {
    cvss::Categories categories;
    cvss::PrivilegeFlags privileges;
    bool low_evidence = false;  // description had no in-vocabulary term
};

// Vocabulary plus the nine trained tasks plus the training manifest.
class Bundle {
public:
    Bundle() = default;

    const Vocabulary& vocabulary() const { return vocab_; }
    const std::vector<TaskResult>& tasks() const { return tasks_; }
    const nlohmann::ordered_json& manifest() const { return manifest_; }

    Prediction predict(std::string_view description) const;

    // Directory layout: vocabulary.tsv, model_<task>.json, manifest.json.
    void save(const std::filesystem::path& dir) const;
    static Bundle load(const std::filesystem::path& dir);

    friend Bundle fit_bundle(const nvd::CorpusSplit& split, const FitConfig& config);

private:
    Vocabulary vocab_;
    std::vector<TaskResult> tasks_;
    nlohmann::ordered_json manifest_;
};

// Full pipeline per task: oversample the training portion, grid-search
// against validation, retrain the chosen point on train+validation, evaluate
// on test. Task failures are reported with the task name.
Bundle fit_bundle(const nvd::CorpusSplit& split, const FitConfig& config);

}  // namespace iotsec::clf
