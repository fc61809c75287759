#include "sans/run_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "sans/errors.hpp"
#include "sans/rng.hpp"

namespace sans {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected unsigned integer, got '" + value +
                          "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "dataset") dataset = value;
    else if (key == "output") output = value;
    else if (key == "neighborhood") neighborhood = value;
    else if (key == "model") {
        if (value == "transe") model = ModelKind::TransE;
        else if (value == "distmult") model = ModelKind::DistMult;
        else if (value == "rotate") model = ModelKind::RotatE;
        else throw ConfigError("config key 'model': expected transe|distmult|rotate, got '" +
                               value + "'");
    } else if (key == "transe_norm") {
        if (value == "l1") transe_l2 = false;
        else if (value == "l2") transe_l2 = true;
        else throw ConfigError("config key 'transe_norm': expected l1|l2, got '" + value + "'");
    } else if (key == "dim") dim = static_cast<uint32_t>(parse_u64(key, value));
    else if (key == "gamma") gamma = parse_double(key, value);
    else if (key == "sampler") {
        if (value == "uniform") sampler = SamplerVariant::Uniform;
        else if (value == "sans") sampler = SamplerVariant::Sans;
        else if (value == "rw-sans") sampler = SamplerVariant::RwSans;
        else throw ConfigError("config key 'sampler': expected uniform|sans|rw-sans, got '" +
                               value + "'");
    } else if (key == "adversarial") adversarial = parse_bool(key, value);
    else if (key == "adv_temperature") adv_temperature = parse_double(key, value);
    else if (key == "negatives") negatives = static_cast<uint32_t>(parse_u64(key, value));
    else if (key == "k") k = static_cast<uint32_t>(parse_u64(key, value));
    else if (key == "fallback") {
        if (value == "uniform") fallback = FallbackPolicy::UniformFallback;
        else if (value == "skip") fallback = FallbackPolicy::SkipPositive;
        else throw ConfigError("config key 'fallback': expected uniform|skip, got '" + value + "'");
    } else if (key == "filter_splits") {
        if (value == "all") filter = ObservedFilter::AllSplits;
        else if (value == "train") filter = ObservedFilter::TrainOnly;
        else throw ConfigError("config key 'filter_splits': expected all|train, got '" + value +
                               "'");
    } else if (key == "batch_size") batch_size = parse_u64(key, value);
    else if (key == "steps") steps = parse_u64(key, value);
    else if (key == "learning_rate") learning_rate = parse_double(key, value);
    else if (key == "eval_every") eval_every = parse_u64(key, value);
    else if (key == "seed") seed = parse_u64(key, value);
    else if (key == "sampler_seed") sampler_seed = parse_u64(key, value);
    else if (key == "adam_beta1") adam_beta1 = parse_double(key, value);
    else if (key == "adam_beta2") adam_beta2 = parse_double(key, value);
    else if (key == "adam_epsilon") adam_epsilon = parse_double(key, value);
    else if (key == "threads") threads = static_cast<int>(parse_u64(key, value));
    else throw ConfigError("unknown config key '" + key + "'");
}

std::string RunConfig::dump() const {
    std::ostringstream out;
    out << "dataset = " << dataset << '\n';
    out << "output = " << output << '\n';
    out << "neighborhood = " << neighborhood << '\n';
    out << "model = " << model_kind_name(model) << '\n';
    out << "transe_norm = " << (transe_l2 ? "l2" : "l1") << '\n';
    out << "dim = " << dim << '\n';
    out << "gamma = " << fmt_double(gamma) << '\n';
    out << "sampler = " << sampler_variant_name(sampler) << '\n';
    out << "adversarial = " << (adversarial ? "true" : "false") << '\n';
    out << "adv_temperature = " << fmt_double(adv_temperature) << '\n';
    out << "negatives = " << negatives << '\n';
    out << "k = " << k << '\n';
    out << "fallback = " << (fallback == FallbackPolicy::UniformFallback ? "uniform" : "skip")
        << '\n';
    out << "filter_splits = " << (filter == ObservedFilter::AllSplits ? "all" : "train") << '\n';
    out << "batch_size = " << batch_size << '\n';
    out << "steps = " << steps << '\n';
    out << "learning_rate = " << fmt_double(learning_rate) << '\n';
    out << "eval_every = " << eval_every << '\n';
    out << "seed = " << seed << '\n';
    out << "sampler_seed = " << sampler_seed << '\n';
    out << "adam_beta1 = " << fmt_double(adam_beta1) << '\n';
    out << "adam_beta2 = " << fmt_double(adam_beta2) << '\n';
    out << "adam_epsilon = " << fmt_double(adam_epsilon) << '\n';
    out << "threads = " << threads << '\n';
    return out.str();
}

SamplerConfig RunConfig::sampler_config() const {
    SamplerConfig s;
    s.variant = sampler;
    s.adversarial = adversarial;
    s.n = negatives;
    s.k = k;
    s.adv_temperature = adv_temperature;
    s.fallback = fallback;
    s.filter = filter;
    s.seed = sampler_seed != 0 ? sampler_seed : mix_seed(seed, 1);
    return s;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig t;
    t.batch_size = batch_size;
    t.steps = steps;
    t.learning_rate = learning_rate;
    t.sampler = sampler_config();
    t.eval_every = eval_every;
    t.seed = seed;
    t.adam_beta1 = adam_beta1;
    t.adam_beta2 = adam_beta2;
    t.adam_epsilon = adam_epsilon;
    t.threads = threads;
    return t;
}

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = trim(line.substr(0, line.find('#')));
        if (stripped.empty()) continue;
        size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) +
                              ": expected `key = value`, got '" + stripped + "'");
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        try {
            config.set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(), path.string());
}

std::filesystem::path resolve_dataset_dir(const std::string& dataset) {
    if (dataset.empty()) throw ConfigError("no dataset configured");
    std::filesystem::path direct(dataset);
    if (std::filesystem::is_directory(direct)) return direct;
    if (const char* root = std::getenv("SANS_DATA_DIR")) {
        std::filesystem::path under_root = std::filesystem::path(root) / dataset;
        if (std::filesystem::is_directory(under_root)) return under_root;
    }
    throw DataError("dataset directory not found: " + dataset +
                    " (also tried $SANS_DATA_DIR)");
}

}  // namespace sans
