#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tweetlab/commands.hpp"
#include "tweetlab/config.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::int64_t seed = -1;
    std::string out;
};

tweetlab::ExperimentConfig effective_config(const CommonOpts& opts) {
    auto cfg = tweetlab::ExperimentConfig::load(opts.config_path);
    if (opts.seed >= 0) cfg.set("seed", std::to_string(opts.seed));
    if (!opts.out.empty()) cfg.set("paths.out", opts.out);
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file")->required();
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--out", opts.out, "override the output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"small-data abusive-tweet classification laboratory"};
    app.require_subcommand(1);

    CommonOpts opts;
    auto* pretrain = app.add_subcommand("pretrain", "pre-filter a corpus and train word vectors");
    auto* train = app.add_subcommand("train", "split, train and checkpoint the classifier");
    auto* eval = app.add_subcommand("eval", "metrics for the checkpoint and selected baselines");
    auto* augment = app.add_subcommand("augment", "emit the AT0..AT6 dataset variants");
    auto* crossval = app.add_subcommand("crossval", "k-fold cross-validation sweep");
    auto* predict = app.add_subcommand("predict", "JSONL tweets on stdin, CSV on stdout");
    for (auto* cmd : {pretrain, train, eval, augment, crossval, predict}) add_common(cmd, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = effective_config(opts);
        if (pretrain->parsed()) tweetlab::run_pretrain(cfg);
        if (train->parsed()) tweetlab::run_train(cfg);
        if (eval->parsed()) tweetlab::run_eval(cfg);
        if (augment->parsed()) tweetlab::run_augment(cfg);
        if (crossval->parsed()) tweetlab::run_crossval(cfg);
        if (predict->parsed()) tweetlab::run_predict(cfg, std::cin, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
