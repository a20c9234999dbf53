#pragma once

#include <CLI11.hpp>

namespace sdm::cli {

// Each function registers one subcommand; the callback runs the command and
// throws sdm::Error on failure.
void add_synth(CLI::App& app);
void add_fuse(CLI::App& app);
void add_select(CLI::App& app);
void add_fit(CLI::App& app);
void add_evaluate(CLI::App& app);
void add_ablate(CLI::App& app);
void add_whatif(CLI::App& app);
void add_serve(CLI::App& app);

}  // namespace sdm::cli
