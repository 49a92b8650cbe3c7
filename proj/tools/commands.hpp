#pragma once

#include "CLI11.hpp"

namespace swapforge::cli {

void add_curate(CLI::App& app);
void add_image_commands(CLI::App& app);  // metric, blend, align, synth
void add_train(CLI::App& app);
void add_pipeline_commands(CLI::App& app);  // convert, review

}  // namespace swapforge::cli
