#pragma once

#include <iosfwd>

#include "config.hpp"

namespace iwoa::cli {

void cmd_bench(const ExperimentConfig& cfg, std::ostream& out);
void cmd_gen_data(const ExperimentConfig& cfg, std::ostream& out);
void cmd_tune(const ExperimentConfig& cfg, std::ostream& out);
void cmd_eval(const ExperimentConfig& cfg, std::ostream& out);
/// Warnings about extrapolation go to err.
void cmd_predict(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace iwoa::cli
