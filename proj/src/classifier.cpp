#include "iotsec/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "iotsec/util.hpp"

namespace iotsec::clf {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<TaskSpec> standard_tasks() {
    std::vector<TaskSpec> tasks;
    for (const auto metric : cvss::kMetricNames) {
        const auto domain = cvss::label_domain(metric);
        tasks.push_back(TaskSpec{std::string(metric),
                                 TaskSpec::Kind::MultiClass,
                                 {domain.begin(), domain.end()}});
    }
    for (const char* flag : {"all_privilege", "user_privilege", "other_privilege"}) {
        tasks.push_back(TaskSpec{flag, TaskSpec::Kind::Binary, {"false", "true"}});
    }
    return tasks;
}

std::string task_label(const nvd::CveRecord& record, const TaskSpec& spec) {
    if (!record.scored()) {
        throw Error("record " + record.id + " is not scored; no label for task " + spec.name);
    }
    if (spec.kind == TaskSpec::Kind::MultiClass) {
        return cvss::label_of(*record.cvss_v2, spec.name);
    }
    const auto& p = *record.privileges;
    bool value = false;
    if (spec.name == "all_privilege") value = p.all_privilege;
    else if (spec.name == "user_privilege") value = p.user_privilege;
    else if (spec.name == "other_privilege") value = p.other_privilege;
    else throw Error("unknown task: " + spec.name);
    return value ? "true" : "false";
}

double EvalScores::selection_metric(TaskSpec::Kind kind) const {
    if (kind == TaskSpec::Kind::Binary) return f1.value_or(0.0);
    return f1_weighted.value_or(0.0);
}

EvalScores evaluate(const std::vector<std::string>& predictions,
                    const std::vector<std::string>& truth, TaskSpec::Kind kind) {
    if (predictions.size() != truth.size()) {
        throw Error("evaluate: prediction/truth length mismatch (" +
                    std::to_string(predictions.size()) + " vs " + std::to_string(truth.size()) + ")");
    }
    if (truth.empty()) throw Error("evaluate: empty input");

    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predictions[i] == truth[i]) ++correct;
    }

    // Per-label precision/recall/F1 over labels present in the truth.
    std::map<std::string, std::size_t> support, true_pos, pred_pos;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++support[truth[i]];
        ++pred_pos[predictions[i]];
        if (predictions[i] == truth[i]) ++true_pos[truth[i]];
    }
    auto f1_of = [&](const std::string& label) {
        const double tp = static_cast<double>(true_pos.count(label) ? true_pos.at(label) : 0);
        const double pp = static_cast<double>(pred_pos.count(label) ? pred_pos.at(label) : 0);
        const double sp = static_cast<double>(support.at(label));
        const double precision = pp > 0 ? tp / pp : 0.0;
        const double recall = sp > 0 ? tp / sp : 0.0;
        return precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    };

    EvalScores scores;
    scores.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    if (kind == TaskSpec::Kind::Binary) {
        // F1 of the positive class; 0 when "true" never occurs in the truth.
        const double tp = static_cast<double>(true_pos.count("true") ? true_pos.at("true") : 0);
        const double pp = static_cast<double>(pred_pos.count("true") ? pred_pos.at("true") : 0);
        const double sp = static_cast<double>(support.count("true") ? support.at("true") : 0);
        const double precision = pp > 0 ? tp / pp : 0.0;
        const double recall = sp > 0 ? tp / sp : 0.0;
        scores.f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    } else {
        double macro = 0.0, weighted = 0.0;
        for (const auto& [label, count] : support) {
            const double f1 = f1_of(label);
            macro += f1;
            weighted += f1 * static_cast<double>(count);
        }
        scores.f1_macro = macro / static_cast<double>(support.size());
        scores.f1_weighted = weighted / static_cast<double>(truth.size());
    }
    return scores;
}

std::vector<Example> oversample(const std::vector<Example>& examples, std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        by_label[examples[i].label].push_back(i);
    }
    if (by_label.size() < 2) {
        throw Error("oversample needs at least 2 distinct labels, got " +
                    std::to_string(by_label.size()));
    }
    std::size_t majority = 0;
    for (const auto& [label, idxs] : by_label) majority = std::max(majority, idxs.size());

    std::vector<Example> out = examples;
    Rng rng(seed);
    for (const auto& [label, idxs] : by_label) {  // lexicographic label order
        for (std::size_t n = idxs.size(); n < majority; ++n) {
            out.push_back(examples[idxs[rng.bounded(idxs.size())]]);
        }
    }
    return out;
}

std::vector<Hyperparams> default_grid() {
    std::vector<Hyperparams> grid;
    for (const double l2 : {1e-4, 1e-3, 1e-2}) {
        for (const double epochs : {100.0, 200.0, 300.0}) {
            grid.push_back({{"l2", l2}, {"epochs", epochs}});
        }
    }
    return grid;
}

std::string Model::predict(const FeatureVector& features) const {
    const auto scores = label_scores(features);
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;
    }
    return labels()[best];
}

namespace {

// One-vs-rest logistic regression, full-batch gradient descent. Weights
// start at zero, so training is deterministic without a seed.
class LinearModel final : public Model {
public:
    LinearModel(std::vector<std::string> labels, std::vector<std::vector<double>> weights,
                std::vector<double> bias)
        : labels_(std::move(labels)), weights_(std::move(weights)), bias_(std::move(bias)) {}

    const std::vector<std::string>& labels() const override { return labels_; }

    std::vector<double> label_scores(const FeatureVector& features) const override {
        std::vector<double> scores(labels_.size());
        for (std::size_t k = 0; k < labels_.size(); ++k) {
            double z = bias_[k];
            for (const auto& [idx, w] : features.entries) {
                if (idx < weights_[k].size()) z += weights_[k][idx] * w;
            }
            scores[k] = 1.0 / (1.0 + std::exp(-z));
        }
        return scores;
    }

    ordered_json to_json() const override {
        ordered_json j;
        j["backend"] = "linear";
        j["labels"] = labels_;
        j["bias"] = bias_;
        j["weights"] = weights_;
        return j;
    }

private:
    std::vector<std::string> labels_;
    std::vector<std::vector<double>> weights_;  // one row per label
    std::vector<double> bias_;
};

constexpr double kLearningRate = 2.0;

class LinearBackend final : public Backend {
public:
    std::string name() const override { return "linear"; }

    ModelPtr train(const std::vector<Example>& train, const TaskSpec& spec, const Hyperparams& hp,
                   std::size_t dim, std::uint64_t /*seed*/) const override {
        const double l2 = hp.at("l2");
        const int epochs = static_cast<int>(hp.at("epochs"));
        const double n = static_cast<double>(train.size());

        std::vector<std::vector<double>> weights(spec.labels.size(), std::vector<double>(dim, 0.0));
        std::vector<double> bias(spec.labels.size(), 0.0);
        std::vector<double> grad(dim);

        for (std::size_t k = 0; k < spec.labels.size(); ++k) {
            auto& w = weights[k];
            for (int epoch = 0; epoch < epochs; ++epoch) {
                std::fill(grad.begin(), grad.end(), 0.0);
                double grad_b = 0.0;
                for (const auto& example : train) {
                    double z = bias[k];
                    for (const auto& [idx, x] : example.features.entries) z += w[idx] * x;
                    const double p = 1.0 / (1.0 + std::exp(-z));
                    const double err = p - (example.label == spec.labels[k] ? 1.0 : 0.0);
                    for (const auto& [idx, x] : example.features.entries) grad[idx] += err * x;
                    grad_b += err;
                }
                for (std::size_t d = 0; d < dim; ++d) {
                    w[d] -= kLearningRate * (grad[d] / n + l2 * w[d]);
                }
                bias[k] -= kLearningRate * grad_b / n;
            }
        }
        return std::make_unique<LinearModel>(spec.labels, std::move(weights), std::move(bias));
    }

    ModelPtr model_from_json(const json& j) const override {
        return std::make_unique<LinearModel>(j.at("labels").get<std::vector<std::string>>(),
                                             j.at("weights").get<std::vector<std::vector<double>>>(),
                                             j.at("bias").get<std::vector<double>>());
    }
};

}  // namespace

const Backend& backend_by_name(std::string_view name) {
    static const LinearBackend linear;
    // Registry of available backends; boosted trees would slot in here.
    if (name == "linear") return linear;
    throw Error("unknown classifier backend: " + std::string(name));
}

ModelPtr train_task(const std::vector<Example>& train, const TaskSpec& spec, const Hyperparams& hp,
                    std::size_t dim, const Backend& backend, std::uint64_t seed) {
    if (train.empty()) throw Error("empty training set");
    std::set<std::string> domain(spec.labels.begin(), spec.labels.end());
    std::set<std::string> seen;
    for (const auto& example : train) {
        if (domain.find(example.label) == domain.end()) {
            throw Error("label '" + example.label + "' outside domain of task " + spec.name);
        }
        seen.insert(example.label);
    }
    if (seen.size() < 2) {
        throw Error("training set for task " + spec.name + " has a single label '" +
                    *seen.begin() + "'");
    }
    return backend.train(train, spec, hp, dim, seed);
}

GridSearchResult grid_search(const std::vector<Example>& train,
                             const std::vector<Example>& validation, const TaskSpec& spec,
                             const std::vector<Hyperparams>& grid, std::size_t dim,
                             const Backend& backend, std::uint64_t seed) {
    if (grid.empty()) throw Error("hyperparameter grid must not be empty");

    std::vector<std::string> truth;
    truth.reserve(validation.size());
    for (const auto& example : validation) truth.push_back(example.label);

    GridSearchResult result;
    double best_metric = -1.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto model = train_task(train, spec, grid[g], dim, backend, seed);
        std::vector<std::string> predictions;
        predictions.reserve(validation.size());
        for (const auto& example : validation) predictions.push_back(model->predict(example.features));
        const EvalScores scores = evaluate(predictions, truth, spec.kind);
        result.points.push_back({grid[g], scores});
        const double metric = scores.selection_metric(spec.kind);
        if (metric > best_metric) {  // strict: ties keep the earlier grid point
            best_metric = metric;
            result.best_index = g;
        }
    }
    result.best = grid[result.best_index];
    return result;
}

namespace {

ordered_json scores_to_json(const EvalScores& scores) {
    ordered_json j;
    j["accuracy"] = scores.accuracy;
    if (scores.f1) j["f1"] = *scores.f1;
    if (scores.f1_macro) j["f1_macro"] = *scores.f1_macro;
    if (scores.f1_weighted) j["f1_weighted"] = *scores.f1_weighted;
    return j;
}

std::vector<std::string> ids_of(const std::vector<nvd::CveRecord>& records) {
    std::vector<std::string> ids;
    ids.reserve(records.size());
    for (const auto& record : records) ids.push_back(record.id);
    return ids;
}

}  // namespace

Bundle fit_bundle(const nvd::CorpusSplit& split, const FitConfig& config) {
    const Backend& backend = backend_by_name(config.backend);

    auto tokenize_all = [](const std::vector<nvd::CveRecord>& records) {
        std::vector<std::vector<std::string>> out;
        out.reserve(records.size());
        for (const auto& record : records) out.push_back(preprocess(record.description));
        return out;
    };
    const auto train_tokens = tokenize_all(split.train);
    const auto validation_tokens = tokenize_all(split.validation);
    const auto test_tokens = tokenize_all(split.test);

    // Vocabulary comes from the training portion only.
    Bundle bundle;
    bundle.vocab_ = build_vocabulary(train_tokens, config.ngram_range, config.min_df);
    const std::size_t dim = bundle.vocab_.size();

    auto vectorize_all = [&](const std::vector<std::vector<std::string>>& tokens) {
        std::vector<FeatureVector> out;
        out.reserve(tokens.size());
        for (const auto& t : tokens) out.push_back(vectorize(t, bundle.vocab_));
        return out;
    };
    const auto train_features = vectorize_all(train_tokens);
    const auto validation_features = vectorize_all(validation_tokens);
    const auto test_features = vectorize_all(test_tokens);

    ordered_json manifest;
    manifest["seed"] = config.seed;
    manifest["backend"] = config.backend;
    manifest["min_df"] = config.min_df;
    manifest["ngram_range"] = {config.ngram_range.lo, config.ngram_range.hi};
    manifest["tuning_protocol"] = "single-split";
    manifest["vocabulary"] = {{"terms", bundle.vocab_.size()},
                              {"corpus_size", bundle.vocab_.corpus_size()}};
    manifest["split"] = {{"train_ids", ids_of(split.train)},
                         {"validation_ids", ids_of(split.validation)},
                         {"test_ids", ids_of(split.test)}};
    manifest["tasks"] = ordered_json::array();

    auto examples_for = [&](const std::vector<nvd::CveRecord>& records,
                            const std::vector<FeatureVector>& features, const TaskSpec& spec) {
        std::vector<Example> out;
        out.reserve(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            out.push_back({features[i], task_label(records[i], spec)});
        }
        return out;
    };

    for (const TaskSpec& spec : standard_tasks()) {
        try {
            const std::uint64_t task_seed = derive_seed(config.seed, spec.name);
            const auto train_examples = examples_for(split.train, train_features, spec);
            const auto validation_examples =
                examples_for(split.validation, validation_features, spec);
            const auto test_examples = examples_for(split.test, test_features, spec);

            const auto balanced_train = oversample(train_examples, task_seed);
            auto search = grid_search(balanced_train, validation_examples, spec, config.grid, dim,
                                      backend, task_seed);

            // Final model: chosen point retrained on train+validation.
            std::vector<Example> final_train = train_examples;
            final_train.insert(final_train.end(), validation_examples.begin(),
                               validation_examples.end());
            const auto balanced_final = oversample(final_train, derive_seed(task_seed, "final"));
            auto model = train_task(balanced_final, spec, search.best, dim, backend, task_seed);

            std::vector<std::string> test_predictions, test_truth;
            for (const auto& example : test_examples) {
                test_predictions.push_back(model->predict(example.features));
                test_truth.push_back(example.label);
            }
            const EvalScores test_scores = evaluate(test_predictions, test_truth, spec.kind);

            ordered_json task_json;
            task_json["name"] = spec.name;
            task_json["kind"] = spec.kind == TaskSpec::Kind::Binary ? "binary" : "multi_class";
            task_json["labels"] = spec.labels;
            task_json["seed"] = task_seed;
            task_json["oversampled_train_size"] = balanced_train.size();
            task_json["grid"] = ordered_json::array();
            for (const auto& point : search.points) {
                task_json["grid"].push_back(
                    {{"hp", point.hp}, {"validation", scores_to_json(point.validation)}});
            }
            task_json["chosen"] = search.best;
            task_json["validation"] = scores_to_json(search.points[search.best_index].validation);
            task_json["test"] = scores_to_json(test_scores);
            manifest["tasks"].push_back(std::move(task_json));

            bundle.tasks_.push_back(TaskResult{spec, std::move(model), search.best,
                                               std::move(search.points),
                                               search.points.empty()
                                                   ? EvalScores{}
                                                   : search.points[search.best_index].validation,
                                               test_scores});
        } catch (const Error& e) {
            throw Error("task " + spec.name + ": " + e.what());
        }
    }

    bundle.manifest_ = std::move(manifest);
    return bundle;
}

Prediction Bundle::predict(std::string_view description) const {
    if (tasks_.size() != 9) throw Error("bundle is not fully trained (9 tasks required)");
    const auto features = vectorize(preprocess(description), vocab_);

    std::array<std::string, 6> metric_labels;
    Prediction out;
    out.low_evidence = features.empty();
    for (std::size_t t = 0; t < tasks_.size(); ++t) {
        const std::string label = tasks_[t].model->predict(features);
        if (t < 6) {
            metric_labels[t] = label;
        } else {
            const bool value = label == "true";
            if (tasks_[t].spec.name == "all_privilege") out.privileges.all_privilege = value;
            if (tasks_[t].spec.name == "user_privilege") out.privileges.user_privilege = value;
            if (tasks_[t].spec.name == "other_privilege") out.privileges.other_privilege = value;
        }
    }
    out.categories = cvss::categories_from_labels(metric_labels);
    return out;
}

void Bundle::save(const std::filesystem::path& dir) const {
    atomic_write(dir / "vocabulary.tsv", vocab_.to_tsv());
    for (const auto& task : tasks_) {
        atomic_write(dir / ("model_" + task.spec.name + ".json"), task.model->to_json().dump(2) + "\n");
    }
    atomic_write(dir / "manifest.json", manifest_.dump(2) + "\n");
}

Bundle Bundle::load(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    if (!std::filesystem::exists(manifest_path)) {
        throw UsageError("no trained bundle at " + dir.string() + " (missing manifest.json)");
    }
    Bundle bundle;
    bundle.manifest_ = ordered_json::parse(read_file(manifest_path));
    bundle.vocab_ = Vocabulary::from_tsv(read_file(dir / "vocabulary.tsv"));
    const Backend& backend = backend_by_name(bundle.manifest_.at("backend").get<std::string>());

    for (const TaskSpec& spec : standard_tasks()) {
        const auto model_path = dir / ("model_" + spec.name + ".json");
        if (!std::filesystem::exists(model_path)) {
            throw UsageError("bundle at " + dir.string() + " is missing " +
                             model_path.filename().string());
        }
        const json model_json = json::parse(read_file(model_path));
        TaskResult task;
        task.spec = spec;
        task.model = backend.model_from_json(model_json);
        bundle.tasks_.push_back(std::move(task));
    }
    return bundle;
}

}  // namespace iotsec::clf
