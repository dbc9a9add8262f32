#pragma once

#include <ostream>

#include "config.hpp"

namespace fbem::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kInconclusive = 3, kNumericFailure = 4 };

/// Screen selected by family and level.
PanelSet make_screen(const ExperimentConfig& config, int level);

int cmd_generate(const ExperimentConfig& config, std::ostream& out);
int cmd_solve_sequence(const ExperimentConfig& config, std::ostream& out);
int cmd_capacity(const ExperimentConfig& config, std::ostream& out);
int cmd_predict(const ExperimentConfig& config, std::ostream& out);
int cmd_norms(const ExperimentConfig& config, std::ostream& out);

/// Dispatches on config.command.
int run_command(const ExperimentConfig& config, std::ostream& out);

/// Full command line entry point; errors are reported as JSON on `err`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fbem::cli
