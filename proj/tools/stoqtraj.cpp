// Copyright 2026 The stoqtraj Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// stoqtraj: run a stochastic-trajectory config and write its artifacts.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "stoq/config.hpp"
#include "stoq/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stochastic Hamiltonian trajectory solver"};
    std::string config_path;
    stoq::RunOptions options;
    std::string out_dir = ".";
    app.add_option("--config", config_path, "Run configuration (JSON)")->required();
    app.add_option("--out-dir", out_dir, "Directory for output artifacts");
    app.add_option("--threads", options.threads, "Worker threads (speed only; results are identical)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quiet", options.quiet, "Suppress progress messages");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : stoq::kExitConfigError;
    }
    options.out_dir = out_dir;

    stoq::RunConfig config;
    try {
        std::ifstream in(config_path);
        if (!in) throw stoq::Error(stoq::ErrorCode::IoError, "cannot read config '" + config_path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        config = stoq::parse_config(text.str());
    } catch (const stoq::Error& e) {
        std::cerr << stoq::error_line(e) << '\n';
        return stoq::kExitConfigError;
    }

    try {
        return stoq::run(config, options, std::cerr);
    } catch (const stoq::Error& e) {
        std::cerr << stoq::error_line(e) << '\n';
        return stoq::kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "ERROR Internal " << e.what() << '\n';
        return stoq::kExitFailure;
    }
}
