// xofm: train, predict, evaluate, cross-validate and explain ordinal factorization models.
//
// Exit codes: 0 success, 2 bad flags, 3 data/model-file errors, 4 training or inference errors.

#include "xofm/xofm.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace {

constexpr int exit_bad_flags = 2;
constexpr int exit_data = 3;
constexpr int exit_training = 4;

struct hyper_flags {
    std::string gamma{"4"};
    double tau{0.1};
    int k{5};
    double lr{0.01};
    int iters{100};
    double l1{0.0};
    double l2{0.0};
    double sigma{0.1};
    std::string monotone;
};

struct bad_flag : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void add_hyper_flags(CLI::App* cmd, hyper_flags& h) {
    cmd->add_option("--gamma", h.gamma, "Sub-intervals per attribute: one value, or a comma list with one per attribute")
        ->capture_default_str();
    cmd->add_option("--tau", h.tau, "Pairwise margin")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--k", h.k, "Factor dimension")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--lr", h.lr, "SGD learning rate")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--iters", h.iters, "Training epochs")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--l1", h.l1, "L2 penalty weight on the score increments")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--l2", h.l2, "L2 penalty weight on the factor matrix")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--sigma", h.sigma, "Std. dev. of the factor initialization")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--monotone", h.monotone, "Monotone attributes: comma list of names, or `all` (default: none)");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string{} : item.substr(b, e - b + 1));
    }
    return out;
}

xofm::hyperparams to_hyperparams(const hyper_flags& h, const std::vector<std::string>& attr_names, std::uint64_t seed) {
    xofm::hyperparams hp;
    hp.tau = h.tau;
    hp.k = h.k;
    hp.eta = h.lr;
    hp.iters = h.iters;
    hp.lambda1 = h.l1;
    hp.lambda2 = h.l2;
    hp.sigma = h.sigma;
    hp.seed = seed;
    hp.gammas.clear();
    for (const auto& g : split_list(h.gamma)) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(g, &used);
            if (used != g.size() || v < 1) throw std::invalid_argument(g);
            hp.gammas.push_back(v);
        } catch (const std::exception&) {
            throw bad_flag("--gamma: '" + g + "' is not a positive integer");
        }
    }
    if (hp.gammas.size() != 1 && hp.gammas.size() != attr_names.size()) {
        throw bad_flag("--gamma: expected 1 or " + std::to_string(attr_names.size()) + " values");
    }
    if (!h.monotone.empty()) {
        hp.monotone.assign(attr_names.size(), false);
        if (h.monotone == "all") {
            hp.monotone.assign(attr_names.size(), true);
        } else {
            for (const auto& name : split_list(h.monotone)) {
                const auto it = std::find(attr_names.begin(), attr_names.end(), name);
                if (it == attr_names.end()) {
                    throw bad_flag("--monotone: unknown attribute '" + name + "'");
                }
                hp.monotone[static_cast<std::size_t>(it - attr_names.begin())] = true;
            }
        }
    }
    return hp;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw xofm::error("cannot write '" + path + "'");
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Explainable ordinal factorization model"};
    app.require_subcommand(1);

    std::string data_path;
    std::string label_col{"label"};
    std::string model_path;
    std::string out_path;
    std::uint64_t seed = 0;
    hyper_flags hf;

    auto* train_cmd = app.add_subcommand("train", "Train a model and write it as JSON");
    train_cmd->add_option("--data", data_path, "Training CSV")->required();
    train_cmd->add_option("--label", label_col, "Label column name")->capture_default_str();
    train_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    train_cmd->add_option("--out", out_path, "Model file")->default_str("model.json");
    add_hyper_flags(train_cmd, hf);

    auto* predict_cmd = app.add_subcommand("predict", "Predict labels for every row of a CSV");
    predict_cmd->add_option("--model", model_path, "Model file")->required();
    predict_cmd->add_option("--data", data_path, "CSV with the model's attribute columns")->required();
    predict_cmd->add_option("--out", out_path, "Predictions CSV (default: standard output)");

    int trials = 30;
    unsigned threads = 1;
    bool with_cv = false;
    int folds = 5;
    auto* eval_cmd = app.add_subcommand("evaluate", "Repeated random 80/20 train/test evaluation");
    eval_cmd->add_option("--data", data_path, "Labelled CSV")->required();
    eval_cmd->add_option("--label", label_col, "Label column name")->capture_default_str();
    eval_cmd->add_option("--trials", trials, "Number of trials")->capture_default_str()->check(CLI::PositiveNumber);
    eval_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    eval_cmd->add_option("--threads", threads, "Worker threads, 0 = all cores (results do not depend on it)")
        ->capture_default_str();
    eval_cmd->add_flag("--cv", with_cv, "Select gamma and tau by cross validation on the default grid first");
    eval_cmd->add_option("--folds", folds, "Folds for --cv")->capture_default_str()->check(CLI::Range(2, 1000));
    eval_cmd->add_option("--out", out_path, "Results CSV")->default_str("results.csv");
    add_hyper_flags(eval_cmd, hf);

    auto* cv_cmd = app.add_subcommand("cv", "Cross-validate the default gamma x tau grid");
    cv_cmd->add_option("--data", data_path, "Labelled CSV")->required();
    cv_cmd->add_option("--label", label_col, "Label column name")->capture_default_str();
    cv_cmd->add_option("--folds", folds, "Number of folds")->capture_default_str()->check(CLI::Range(2, 1000));
    cv_cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cv_cmd->add_option("--out", out_path, "Grid results CSV (optional)");
    add_hyper_flags(cv_cmd, hf);

    std::vector<std::string> pair_flags;
    auto* explain_cmd = app.add_subcommand("explain", "Export score functions and interaction grids");
    explain_cmd->add_option("--model", model_path, "Model file")->required();
    explain_cmd->add_option("--out", out_path, "Report JSON; CSV tables are written next to it")->default_str("report.json");
    explain_cmd->add_option("--pair", pair_flags, "Attribute pair `a,b` for an interaction grid (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        std::cerr << (subs.empty() ? app.help() : subs.front()->help());
        return exit_bad_flags;
    }

    // Data and model loading errors map to exit 3, everything else raised after that to 4.
    auto load_data = [&] { return xofm::load_csv(data_path, label_col); };

    try {
        if (train_cmd->parsed()) {
            const auto ds = load_data();
            const auto hp = to_hyperparams(hf, ds.attr_names(), seed);
            const auto model = xofm::train(ds, hp);
            if (out_path.empty()) out_path = "model.json";
            xofm::save_model(model, out_path);
            std::cout << "final training loss: " << xofm::format_real(xofm::training_loss(model, ds, hp)) << '\n';
            std::cout << "model written to " << out_path << '\n';
        } else if (predict_cmd->parsed()) {
            const auto model = xofm::load_model(model_path);
            const auto table = xofm::read_numeric_csv(data_path);
            const auto objects = xofm::select_columns(table, model.attr_names);
            std::vector<xofm::prediction> preds;
            preds.reserve(objects.rows());
            for (std::size_t i = 0; i < objects.rows(); ++i) {
                preds.push_back(xofm::predict(objects.row(i), model));
            }
            if (out_path.empty()) {
                xofm::write_predictions_csv(std::cout, preds, model.n_classes);
            } else {
                auto out = open_out(out_path);
                xofm::write_predictions_csv(out, preds, model.n_classes);
            }
        } else if (eval_cmd->parsed()) {
            const auto ds = load_data();
            auto hp = to_hyperparams(hf, ds.attr_names(), seed);
            if (with_cv) {
                const auto cv = xofm::cross_validate(ds, xofm::default_cv_grid(hp), folds, seed);
                hp = cv.best;
                std::cout << "cv selected gamma=" << hp.gammas.front() << " tau=" << xofm::format_real(hp.tau) << '\n';
            }
            xofm::split_spec spec;
            spec.seed = seed;
            spec.n_trials = trials;
            const auto summary = xofm::run_trials(ds, hp, spec, threads);
            if (out_path.empty()) out_path = "results.csv";
            {
                auto out = open_out(out_path);
                xofm::write_trials_csv(out, summary);
            }
            xofm::write_trials_csv(std::cout, summary);
            std::cout << "summary: acc " << xofm::format_real(summary.mean_acc) << " +- "
                      << xofm::format_real(summary.std_acc) << ", mae " << xofm::format_real(summary.mean_mae) << " +- "
                      << xofm::format_real(summary.std_mae) << " over " << summary.trials.size() << " trials\n";
        } else if (cv_cmd->parsed()) {
            const auto ds = load_data();
            const auto hp = to_hyperparams(hf, ds.attr_names(), seed);
            const auto cv = xofm::cross_validate(ds, xofm::default_cv_grid(hp), folds, seed);
            std::ostringstream table;
            table << "gamma,tau,mean_acc,mean_mae\n";
            for (const auto& pt : cv.points) {
                table << pt.hp.gammas.front() << ',' << xofm::format_real(pt.hp.tau) << ','
                      << xofm::format_real(pt.mean_acc) << ',' << xofm::format_real(pt.mean_mae) << '\n';
            }
            std::cout << table.str();
            if (!out_path.empty()) {
                auto out = open_out(out_path);
                out << table.str();
            }
            std::cout << "best: gamma=" << cv.best.gammas.front() << " tau=" << xofm::format_real(cv.best.tau) << '\n';
        } else if (explain_cmd->parsed()) {
            const auto model = xofm::load_model(model_path);
            std::vector<std::pair<std::size_t, std::size_t>> pairs;
            for (const auto& pf : pair_flags) {
                const auto names = split_list(pf);
                if (names.size() != 2) {
                    throw bad_flag("--pair expects `a,b`, got '" + pf + "'");
                }
                try {
                    pairs.emplace_back(xofm::attribute_index(model, names[0]), xofm::attribute_index(model, names[1]));
                } catch (const xofm::data_error& e) {
                    throw bad_flag(std::string{"--pair: "} + e.what());
                }
                if (pairs.back().first == pairs.back().second) {
                    throw bad_flag("--pair needs two distinct attributes");
                }
            }
            if (out_path.empty()) out_path = "report.json";
            xofm::export_report(model, out_path, pairs);
            std::cout << "report written to " << out_path << '\n';
        }
    } catch (const bad_flag& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_bad_flags;
    } catch (const xofm::data_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const xofm::format_error& e) {
        std::cerr << "model file error: " << e.what() << '\n';
        return exit_data;
    } catch (const xofm::training_error& e) {
        std::cerr << "training error: " << e.what() << '\n';
        return exit_training;
    } catch (const xofm::inference_error& e) {
        std::cerr << "inference error: " << e.what() << '\n';
        return exit_training;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
