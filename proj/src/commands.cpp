#include "sans/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <vector>

#include "sans/errors.hpp"
#include "sans/evaluation.hpp"
#include "sans/neighborhood.hpp"
#include "sans/rng.hpp"
#include "sans/sampling.hpp"
#include "sans/synthetic.hpp"
#include "sans/training.hpp"

namespace sans {

namespace {

std::string percent(double fraction) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f%%", fraction * 100.0);
    return buf;
}

size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (size_t j = 1; j <= b.size(); ++j) {
            size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::vector<std::string> nearest_names(const Vocabulary& vocab, const std::string& query,
                                       size_t count) {
    std::vector<std::pair<size_t, std::string>> scored;
    scored.reserve(vocab.size());
    for (const std::string& name : vocab.names())
        scored.emplace_back(edit_distance(query, name), name);
    std::partial_sort(scored.begin(), scored.begin() + std::min(count, scored.size()),
                      scored.end());
    std::vector<std::string> out;
    for (size_t i = 0; i < std::min(count, scored.size()); ++i) out.push_back(scored[i].second);
    return out;
}

}  // namespace

FillReport cmd_preprocess(const PreprocessArgs& args, std::ostream& out) {
    std::filesystem::path dir = resolve_dataset_dir(args.dataset);
    out << "loading " << dir.string() << "\n";
    TripleStore store = load_dataset(dir);
    out << "|E| = " << store.num_entities() << ", |R| = " << store.num_relations()
        << ", |train| = " << store.train.size() << "\n";

    KHopNeighborhood hood;
    if (args.random_walks) {
        out << "building random-walk neighborhood, k = " << args.k << ", omega = " << args.omega
            << ", seed = " << args.seed << "\n";
        hood = build_rw_khop(store, args.k, args.omega, args.seed, args.threads);
    } else {
        ExactBuildOptions options;
        options.direction = args.directed ? Directedness::Directed : Directedness::Symmetric;
        options.max_entries = args.max_entries;
        options.threads = args.threads;
        out << "building exact neighborhood, k = " << args.k
            << (args.directed ? " (directed)" : "") << "\n";
        hood = build_exact_khop(store, args.k, options);
    }

    FillReport fill = fill_percentage(hood, store.num_entities());
    out << "k = " << fill.k << ": " << hood.total_entries() << " entries, fill = "
        << percent(fill.filled_fraction) << "\n";

    if (!args.output.empty()) {
        save_neighborhood(hood, args.output);
        out << "wrote " << args.output.string() << "\n";
    }
    if (!args.dict_dir.empty()) {
        std::filesystem::create_directories(args.dict_dir);
        write_dict(store.entities, args.dict_dir / "entities.dict");
        write_dict(store.relations, args.dict_dir / "relations.dict");
        out << "wrote dictionaries under " << args.dict_dir.string() << "\n";
    }
    return fill;
}

double cmd_train(const RunConfig& config, std::ostream& out) {
    // Resolve every path up front; training is the long phase.
    std::filesystem::path dataset_dir = resolve_dataset_dir(config.dataset);
    std::filesystem::path out_dir(config.output);
    std::filesystem::create_directories(out_dir);

    TripleStore store = load_dataset(dataset_dir);
    out << "loaded " << dataset_dir.string() << ": |E| = " << store.num_entities()
        << ", |train| = " << store.train.size() << "\n";

    KHopNeighborhood hood;
    const KHopNeighborhood* hood_ptr = nullptr;
    SamplerConfig sampler = config.sampler_config();
    if (sampler.needs_neighborhood()) {
        if (config.neighborhood.empty())
            throw ConfigError("sampler '" + std::string(sampler_variant_name(sampler.variant)) +
                              "' requires the `neighborhood` key");
        hood = load_neighborhood(config.neighborhood);
        if (hood.num_entities != store.num_entities())
            throw DataError("neighborhood entity count " + std::to_string(hood.num_entities) +
                            " does not match dataset |E| = " +
                            std::to_string(store.num_entities()));
        bool wants_walks = sampler.variant == SamplerVariant::RwSans;
        if (wants_walks != (hood.kind == NeighborhoodKind::Walks))
            throw ConfigError("sampler variant does not match neighborhood kind (exact vs walks)");
        if (hood.k != config.k)
            throw ConfigError("config k = " + std::to_string(config.k) +
                              " but neighborhood was built with k = " + std::to_string(hood.k));
        hood_ptr = &hood;
    }

    EmbeddingModel model = init_model(config.model, store.num_entities(), store.num_relations(),
                                      config.dim, config.gamma, config.seed, config.transe_l2);

    std::ofstream conf_out(out_dir / "effective.conf");
    conf_out << config.dump();
    conf_out.close();

    std::ofstream metrics(out_dir / "metrics.tsv");
    if (!metrics) throw DataError("cannot open metrics log under " + out_dir.string());
    LogSink sink = [&metrics](const std::string& line) { metrics << line << '\n'; };

    out << "training " << model_kind_name(config.model) << " d = " << config.dim << " with "
        << sampler_variant_name(sampler.variant) << (sampler.adversarial ? " (self-adv.)" : "")
        << " for " << config.steps << " steps\n";
    TrainResult result = train(store, model, config.train_config(), hood_ptr, sink);
    metrics.close();

    save_checkpoint(result.best_model, out_dir / "best.ckpt");
    out << "best validation MRR " << result.best_valid_mrr << " at step " << result.best_step
        << "; checkpoint written to " << (out_dir / "best.ckpt").string() << "\n";

    if (!store.valid.empty()) {
        EvalOptions opts;
        opts.threads = config.threads;
        EvalReport report = evaluate(result.best_model, store, Split::Valid, opts);
        out << format_report(report, Split::Valid);
        std::ofstream kv(out_dir / "valid_report.txt");
        kv << report_key_values(report, Split::Valid);
    }
    return result.best_valid_mrr;
}

void cmd_eval(const EvalArgs& args, std::ostream& out) {
    std::filesystem::path dataset_dir = resolve_dataset_dir(args.dataset);
    EmbeddingModel model = load_checkpoint(args.checkpoint);
    TripleStore store = load_dataset(dataset_dir);
    if (model.num_entities != store.num_entities() || model.num_relations != store.num_relations())
        throw DataError("checkpoint was trained over |E| = " + std::to_string(model.num_entities) +
                        ", |R| = " + std::to_string(model.num_relations) +
                        " but dataset has |E| = " + std::to_string(store.num_entities()) +
                        ", |R| = " + std::to_string(store.num_relations()));

    EvalOptions opts;
    opts.threads = args.threads;
    opts.filtered = args.filtered;
    EvalReport report = evaluate(model, store, args.split, opts);
    out << format_report(report, args.split);
    if (!args.report_path.empty()) {
        std::ofstream kv(args.report_path);
        kv << report_key_values(report, args.split);
    }
}

void cmd_inspect(const InspectArgs& args, std::ostream& out) {
    std::filesystem::path dataset_dir = resolve_dataset_dir(args.dataset);
    TripleStore store = load_dataset(dataset_dir);
    KHopNeighborhood hood = load_neighborhood(args.neighborhood);
    if (hood.num_entities != store.num_entities())
        throw DataError("neighborhood entity count does not match dataset");

    auto anchor_id = store.entities.lookup(args.anchor);
    if (!anchor_id) {
        std::string message = "unknown entity '" + args.anchor + "'; closest names:";
        for (const std::string& name : nearest_names(store.entities, args.anchor, 3))
            message += " " + name;
        throw DataError(message);
    }

    auto row = hood.row(*anchor_id);
    out << "anchor '" << args.anchor << "' (id " << *anchor_id << "), "
        << (hood.kind == NeighborhoodKind::Walks ? "walks" : "exact") << " k = " << hood.k
        << ", row size = " << row.size() << "\n";

    Rng rng(args.seed);
    std::vector<std::string> sans_picks, uniform_picks;
    if (row.empty()) {
        out << "row is empty: SANS would fall back for this anchor\n";
    } else {
        auto cum = hood.kind == NeighborhoodKind::Walks ? hood.row_count_cum(*anchor_id)
                                                        : std::span<const uint64_t>{};
        for (uint32_t i = 0; i < args.count; ++i) {
            size_t idx;
            if (hood.kind == NeighborhoodKind::Walks) {
                uint64_t pick = rng.uniform(cum.back());
                idx = static_cast<size_t>(std::upper_bound(cum.begin(), cum.end(), pick) -
                                          cum.begin());
                sans_picks.push_back(store.entities.name(row[idx]) + " (x" +
                                     std::to_string(hood.row_counts(*anchor_id)[idx]) + ")");
            } else {
                idx = static_cast<size_t>(rng.uniform(row.size()));
                sans_picks.push_back(store.entities.name(row[idx]));
            }
        }
    }
    for (uint32_t i = 0; i < args.count; ++i)
        uniform_picks.push_back(
            store.entities.name(static_cast<EntityId>(rng.uniform(store.num_entities()))));

    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-40s %-40s\n", "uniform", "sans");
    out << buf;
    for (uint32_t i = 0; i < args.count; ++i) {
        std::snprintf(buf, sizeof(buf), "%-40s %-40s\n", uniform_picks[i].c_str(),
                      i < sans_picks.size() ? sans_picks[i].c_str() : "-");
        out << buf;
    }
}

void cmd_synth(const std::filesystem::path& dir, std::ostream& out) {
    write_synthetic_dataset(dir);
    TripleStore store = load_dataset(dir);
    out << "wrote synthetic dataset to " << dir.string() << ": |E| = " << store.num_entities()
        << ", |R| = " << store.num_relations() << ", splits " << store.train.size() << "/"
        << store.valid.size() << "/" << store.test.size() << "\n";
}

}  // namespace sans
