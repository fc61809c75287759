#pragma once
// CLI operations, exposed as functions so they can be driven from tests.
// Each prints human-readable progress to `out` and throws the module errors
// that the binary maps onto exit codes.

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include "sans/run_config.hpp"
#include "sans/types.hpp"

namespace sans {

struct PreprocessArgs {
    std::string dataset;
    uint32_t k = 2;
    bool random_walks = false;
    uint32_t omega = 1000;
    uint64_t seed = 1;
    bool directed = false;           // fill-study escape hatch; default symmetrized
    uint64_t max_entries = 2'000'000'000;
    int threads = 1;
    std::filesystem::path output;    // SANSKHOP file
    std::filesystem::path dict_dir;  // optional entities.dict/relations.dict dump
};

// Builds the neighborhood, prints its fill report, writes the file.
FillReport cmd_preprocess(const PreprocessArgs& args, std::ostream& out);

// Trains per config; writes best.ckpt, metrics.tsv, effective.conf and the
// validation report into config.output. Returns best validation MRR.
double cmd_train(const RunConfig& config, std::ostream& out);

struct EvalArgs {
    std::filesystem::path checkpoint;
    std::string dataset;
    Split split = Split::Test;
    bool filtered = true;
    int threads = 1;
    std::filesystem::path report_path;  // optional key=value dump
};

void cmd_eval(const EvalArgs& args, std::ostream& out);

struct InspectArgs {
    std::string dataset;
    std::filesystem::path neighborhood;
    std::string anchor;
    uint32_t count = 5;
    uint64_t seed = 1;
};

// Prints SANS candidates for the anchor next to uniform draws.
void cmd_inspect(const InspectArgs& args, std::ostream& out);

// Materializes the bundled synthetic dataset.
void cmd_synth(const std::filesystem::path& dir, std::ostream& out);

}  // namespace sans
