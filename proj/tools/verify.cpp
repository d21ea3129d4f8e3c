// verify: run the field-identity suite and write its report. Uses built-in
// model parameters unless a config is given. Exit codes as in simulate.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gaugelens/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"field and connection identity checks"};
    std::string out_dir, config_path;
    app.add_option("--out", out_dir, "output root directory")->required();
    auto* opt_cfg = app.add_option("--config", config_path, "optional config override");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = *opt_cfg ? gaugelens::Config::from_file(config_path)
                                  : gaugelens::default_verify_config();
        const auto outcome = gaugelens::run_verify_fields(cfg, out_dir, {});
        std::cout << outcome.report << "run directory: " << outcome.run_dir.string() << "\n";
        return outcome.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
