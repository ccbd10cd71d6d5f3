#pragma once

#include <iosfwd>

#include "tweetlab/config.hpp"

namespace tweetlab {

// Each command reads its inputs from the config, writes its artifacts plus
// a manifest under paths.out and throws on any contract violation; the CLI
// maps exceptions to a nonzero exit status.
void run_pretrain(const ExperimentConfig& config);
void run_train(const ExperimentConfig& config);
void run_eval(const ExperimentConfig& config);
void run_augment(const ExperimentConfig& config);
void run_crossval(const ExperimentConfig& config);
// JSON Lines tweets on `in`, "id,probability,label" CSV on `out`
void run_predict(const ExperimentConfig& config, std::istream& in, std::ostream& out);

}  // namespace tweetlab
