// sans: train and evaluate knowledge-graph embeddings with structure-aware
// negative sampling. Subcommands: preprocess, train, eval, inspect, synth.

#include <CLI11.hpp>
#include <iostream>

#include "sans/commands.hpp"
#include "sans/errors.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric error.
int run(int argc, char** argv) {
    CLI::App app{"knowledge-graph embedding trainer with k-hop negative sampling"};
    app.require_subcommand(1);

    sans::PreprocessArgs pre;
    auto* preprocess = app.add_subcommand(
        "preprocess", "build a k-hop neighborhood file and print its fill");
    preprocess->add_option("dataset", pre.dataset, "dataset directory or name under $SANS_DATA_DIR")
        ->required();
    preprocess->add_option("--k", pre.k, "hop radius")->check(CLI::PositiveNumber);
    preprocess->add_flag("--rw", pre.random_walks, "approximate with random walks");
    preprocess->add_option("--omega", pre.omega, "walks per entity (with --rw)");
    preprocess->add_option("--seed", pre.seed, "walk seed (with --rw)");
    preprocess->add_flag("--directed", pre.directed,
                         "expand over out-edges only instead of the symmetrized graph");
    preprocess->add_option("--max-entries", pre.max_entries,
                           "abort exact construction above this many stored cells");
    preprocess->add_option("--threads", pre.threads, "worker threads");
    preprocess->add_option("--out", pre.output, "output SANSKHOP file");
    preprocess->add_option("--dump-dicts", pre.dict_dir,
                           "also write entities.dict/relations.dict here");

    std::string train_config_path;
    std::vector<std::string> overrides;
    int train_threads = 0;
    auto* train = app.add_subcommand("train", "train a model from a key=value config file");
    train->add_option("config", train_config_path, "run config file")->required();
    train->add_option("--set", overrides, "override `key=value` pairs")->take_all();
    train->add_option("--threads", train_threads, "override the config's worker thread count");

    sans::EvalArgs eval_args;
    std::string split_name = "test";
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint (filtered ranking)");
    eval->add_option("checkpoint", eval_args.checkpoint, "SANSCKPT file")->required();
    eval->add_option("dataset", eval_args.dataset, "dataset directory or name")->required();
    eval->add_option("--split", split_name, "valid|test")
        ->check(CLI::IsMember({"valid", "test"}));
    eval->add_flag("!--raw", eval_args.filtered, "disable filtering (debug)");
    eval->add_option("--threads", eval_args.threads, "worker threads");
    eval->add_option("--report", eval_args.report_path, "write key=value report here");

    sans::InspectArgs inspect_args;
    auto* inspect = app.add_subcommand(
        "inspect", "show SANS candidates for an anchor entity next to uniform draws");
    inspect->add_option("dataset", inspect_args.dataset, "dataset directory or name")->required();
    inspect->add_option("neighborhood", inspect_args.neighborhood, "SANSKHOP file")->required();
    inspect->add_option("anchor", inspect_args.anchor, "entity name")->required();
    inspect->add_option("--n", inspect_args.count, "candidates per column");
    inspect->add_option("--seed", inspect_args.seed, "draw seed");

    std::string synth_dir;
    auto* synth = app.add_subcommand("synth", "write the bundled synthetic dataset");
    synth->add_option("dir", synth_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (preprocess->parsed()) {
            sans::cmd_preprocess(pre, std::cout);
        } else if (train->parsed()) {
            sans::RunConfig config = sans::load_run_config(train_config_path);
            for (const std::string& kv : overrides) {
                size_t eq = kv.find('=');
                if (eq == std::string::npos)
                    throw sans::ConfigError("--set expects key=value, got '" + kv + "'");
                config.set(kv.substr(0, eq), kv.substr(eq + 1));
            }
            if (train_threads > 0) config.threads = train_threads;
            sans::cmd_train(config, std::cout);
        } else if (eval->parsed()) {
            eval_args.split = split_name == "valid" ? sans::Split::Valid : sans::Split::Test;
            sans::cmd_eval(eval_args, std::cout);
        } else if (inspect->parsed()) {
            sans::cmd_inspect(inspect_args, std::cout);
        } else if (synth->parsed()) {
            sans::cmd_synth(synth_dir, std::cout);
        }
    } catch (const sans::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const sans::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const sans::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
