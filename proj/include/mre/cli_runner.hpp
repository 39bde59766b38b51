#pragma once

#include <cstdint>
#include <string>

#include "mre/io.hpp"

namespace mre::cli {

struct RunOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool quiet = false;
};

int run_forward(const RunOptions& opt);
int run_reconstruct(const RunOptions& opt);
int run_certify(const RunOptions& opt);
int run_stability(const RunOptions& opt);

/// Full argument parsing + dispatch; returns the process exit code.
/// Module errors are written as JSON (kind, message) to out/error.json and
/// stderr, with exit code 2.
int run_cli(int argc, char** argv);

}  // namespace mre::cli
