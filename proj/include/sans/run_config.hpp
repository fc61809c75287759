#pragma once
// Textual run configuration: `key = value` lines, '#' comments. Files are
// the primary interface; CLI flags override individual keys. Unknown keys
// are rejected. The effective config (after defaults) round-trips through
// dump() so a run can be reproduced from its output directory.

#include <cstdint>
#include <filesystem>
#include <string>

#include "sans/model.hpp"
#include "sans/sampling.hpp"
#include "sans/training.hpp"

namespace sans {

struct RunConfig {
    std::string dataset;       // dataset directory (or name under SANS_DATA_DIR)
    std::string output = "run_out";
    std::string neighborhood;  // SANSKHOP file; required for SANS variants

    ModelKind model = ModelKind::TransE;
    bool transe_l2 = false;
    uint32_t dim = 200;
    double gamma = 9.0;

    SamplerVariant sampler = SamplerVariant::Uniform;
    bool adversarial = false;
    double adv_temperature = 1.0;
    uint32_t negatives = 128;
    uint32_t k = 2;
    FallbackPolicy fallback = FallbackPolicy::UniformFallback;
    ObservedFilter filter = ObservedFilter::AllSplits;

    uint64_t batch_size = 1000;
    uint64_t steps = 10000;
    double learning_rate = 5e-5;
    uint64_t eval_every = 0;
    uint64_t seed = 1;
    uint64_t sampler_seed = 0;  // 0 = derive from seed
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int threads = 1;

    // Applies one `key=value` assignment; unknown keys or bad values raise
    // ConfigError.
    void set(const std::string& key, const std::string& value);

    // Effective config as a reloadable key=value document.
    std::string dump() const;

    TrainConfig train_config() const;
    SamplerConfig sampler_config() const;
};

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::string& origin);

// Resolves a dataset argument: an existing directory wins; otherwise the
// name is looked up under $SANS_DATA_DIR.
std::filesystem::path resolve_dataset_dir(const std::string& dataset);

}  // namespace sans
