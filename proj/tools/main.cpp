#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"swapforge: faceset curation, swap-model training, conversion and blending"};
    app.require_subcommand(1);
    swapforge::cli::add_curate(app);
    swapforge::cli::add_image_commands(app);
    swapforge::cli::add_train(app);
    swapforge::cli::add_pipeline_commands(app);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
