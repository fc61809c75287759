#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "sans/commands.hpp"
#include "sans/evaluation.hpp"
#include "sans/run_config.hpp"
#include "sans/synthetic.hpp"
#include "testutil.hpp"

using namespace sans;
using test::TempDir;

TEST_SUITE("cli") {

TEST_CASE("config parses key=value lines with comments and whitespace") {
    RunConfig cfg = parse_run_config(
        "# a comment\n"
        "dataset = /data/toy   # trailing comment\n"
        "model=rotate\n"
        "  dim = 32\n"
        "steps = 123\n"
        "adversarial = true\n",
        "inline");
    CHECK(cfg.dataset == "/data/toy");
    CHECK(cfg.model == ModelKind::RotatE);
    CHECK(cfg.dim == 32);
    CHECK(cfg.steps == 123);
    CHECK(cfg.adversarial);
}

TEST_CASE("unknown keys and malformed values are config errors with location") {
    CHECK_THROWS_WITH_AS(parse_run_config("frobnicate = 1\n", "x"),
                         doctest::Contains("unknown config key"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config("dim = banana\n", "x"), doctest::Contains("x:1"),
                         ConfigError);
    CHECK_THROWS_AS(parse_run_config("just words\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("model = bert\n", "x"), ConfigError);
    CHECK_THROWS_AS(parse_run_config("sampler = cached\n", "x"), ConfigError);
}

TEST_CASE("effective config round-trips to an identical run") {
    RunConfig cfg;
    cfg.dataset = "somewhere";
    cfg.model = ModelKind::DistMult;
    cfg.dim = 48;
    cfg.gamma = 200.0;
    cfg.sampler = SamplerVariant::RwSans;
    cfg.adversarial = true;
    cfg.adv_temperature = 0.5;
    cfg.negatives = 17;
    cfg.k = 4;
    cfg.fallback = FallbackPolicy::SkipPositive;
    cfg.filter = ObservedFilter::TrainOnly;
    cfg.learning_rate = 1e-3;
    cfg.sampler_seed = 99;
    cfg.threads = 3;

    RunConfig reloaded = parse_run_config(cfg.dump(), "dump");
    CHECK(reloaded.dump() == cfg.dump());

    // And the derived configs agree.
    SamplerConfig s1 = cfg.sampler_config(), s2 = reloaded.sampler_config();
    CHECK(s1.variant == s2.variant);
    CHECK(s1.n == s2.n);
    CHECK(s1.seed == s2.seed);
    CHECK(s1.adv_temperature == s2.adv_temperature);
    TrainConfig t1 = cfg.train_config(), t2 = reloaded.train_config();
    CHECK(t1.learning_rate == t2.learning_rate);
    CHECK(t1.seed == t2.seed);
}

TEST_CASE("full-scale transe settings parse and initialize") {
    // d=1024, gamma=9, batch 1000, lr 5e-5: the config must parse and the
    // model must initialize with those shapes (no training here).
    RunConfig cfg = parse_run_config(
        "dataset = unused\nmodel = transe\ndim = 1024\ngamma = 9\n"
        "batch_size = 1000\nlearning_rate = 5e-05\nnegatives = 128\n",
        "fullscale");
    CHECK(cfg.dim == 1024);
    CHECK(cfg.gamma == 9.0);
    CHECK(cfg.batch_size == 1000);
    CHECK(cfg.learning_rate == 5e-5);
    EmbeddingModel m = init_model(cfg.model, 40943, 11, cfg.dim, cfg.gamma, cfg.seed);
    CHECK(m.entity_params.size() == 40943ull * 1024);
    CHECK(m.relation_params.size() == 11ull * 1024);
}

TEST_CASE("bundled preset configs parse, and the transe preset starts training") {
    auto configs_dir = std::filesystem::path(__FILE__).parent_path().parent_path() / "configs";
    REQUIRE(std::filesystem::is_directory(configs_dir));
    int parsed = 0;
    for (const auto& entry : std::filesystem::directory_iterator(configs_dir)) {
        if (entry.path().extension() != ".conf") continue;
        RunConfig cfg = load_run_config(entry.path());
        CHECK(!cfg.dataset.empty());
        CHECK(cfg.dim >= 1);
        ++parsed;
    }
    CHECK(parsed >= 4);

    // The d=1024 settings must actually start; retarget the dataset at the
    // synthetic KG and stop after two steps.
    TempDir dir("preset");
    std::ostringstream out;
    cmd_synth(dir.path() / "kg", out);
    PreprocessArgs pre;
    pre.dataset = (dir.path() / "kg").string();
    pre.k = 2;
    pre.output = dir.path() / "k2.khop";
    cmd_preprocess(pre, out);

    RunConfig cfg = load_run_config(configs_dir / "transe_full.conf");
    CHECK(cfg.dim == 1024);
    CHECK(cfg.gamma == 9.0);
    CHECK(cfg.batch_size == 1000);
    CHECK(cfg.learning_rate == 5e-5);
    cfg.dataset = (dir.path() / "kg").string();
    cfg.neighborhood = (dir.path() / "k2.khop").string();
    cfg.output = (dir.path() / "out").string();
    cfg.steps = 2;
    cfg.eval_every = 0;
    cmd_train(cfg, out);
    CHECK(std::filesystem::exists(dir.path() / "out" / "best.ckpt"));
}

TEST_CASE("dataset resolution: direct path, then SANS_DATA_DIR, then error") {
    TempDir root("data_root");
    std::filesystem::create_directories(root.path() / "toy");
    test::write_file(root.path() / "toy" / "train.txt", "a\tr\tb\n");

    CHECK(resolve_dataset_dir((root.path() / "toy").string()) == root.path() / "toy");

    setenv("SANS_DATA_DIR", root.path().c_str(), 1);
    CHECK(resolve_dataset_dir("toy") == root.path() / "toy");
    unsetenv("SANS_DATA_DIR");
    CHECK_THROWS_AS(resolve_dataset_dir("toy"), DataError);
}

TEST_CASE("synth writes a loadable 50-entity dataset, deterministically") {
    TempDir dir("synth");
    std::ostringstream out;
    cmd_synth(dir.path() / "kg", out);
    CHECK(out.str().find("|E| = 50") != std::string::npos);

    TripleStore store = load_dataset(dir.path() / "kg");
    CHECK(store.num_entities() == 50);
    CHECK(store.num_relations() == 3);
    CHECK(store.train.size() == 88);
    CHECK(store.valid.size() == 12);
    CHECK(store.test.size() == 13);

    // Regenerating produces byte-identical files.
    cmd_synth(dir.path() / "kg2", out);
    for (const char* name : {"train.txt", "valid.txt", "test.txt"}) {
        std::ifstream a(dir.path() / "kg" / name), b(dir.path() / "kg2" / name);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
    }
}

TEST_CASE("preprocess on the synthetic toy: k=1 fill equals symmetrized edge density") {
    TempDir dir("pre");
    std::ostringstream out;
    cmd_synth(dir.path() / "kg", out);

    PreprocessArgs args;
    args.dataset = (dir.path() / "kg").string();
    args.k = 1;
    args.output = dir.path() / "k1.khop";
    FillReport fill = cmd_preprocess(args, out);

    // Oracle: count distinct symmetrized train pairs (u, v), u != v.
    TripleStore store = load_dataset(dir.path() / "kg");
    std::set<std::pair<EntityId, EntityId>> pairs;
    for (const Triple& t : store.train) {
        if (t.head != t.tail) {
            pairs.emplace(t.head, t.tail);
            pairs.emplace(t.tail, t.head);
        }
    }
    double expected = static_cast<double>(pairs.size()) / (50.0 * 50.0);
    CHECK(fill.filled_fraction == doctest::Approx(expected).epsilon(1e-12));

    KHopNeighborhood hood = load_neighborhood(dir.path() / "k1.khop");
    CHECK(hood.k == 1);
    CHECK(hood.num_entities == 50);
}

TEST_CASE("preprocess --rw writes a walks file whose support stays within exact k") {
    TempDir dir("pre_rw");
    std::ostringstream out;
    cmd_synth(dir.path() / "kg", out);

    PreprocessArgs args;
    args.dataset = (dir.path() / "kg").string();
    args.k = 3;
    args.random_walks = true;
    args.omega = 50;
    args.seed = 9;
    args.output = dir.path() / "rw.khop";
    FillReport rw_fill = cmd_preprocess(args, out);

    PreprocessArgs exact_args;
    exact_args.dataset = args.dataset;
    exact_args.k = 3;
    FillReport exact_fill = cmd_preprocess(exact_args, out);
    CHECK(rw_fill.filled_fraction <= exact_fill.filled_fraction);

    KHopNeighborhood hood = load_neighborhood(dir.path() / "rw.khop");
    CHECK(hood.kind == NeighborhoodKind::Walks);
    CHECK(hood.omega == 50);
    CHECK(hood.construction_seed == 9);
}

TEST_CASE("preprocess --dump-dicts writes both dictionaries") {
    TempDir dir("dicts");
    std::ostringstream out;
    cmd_synth(dir.path() / "kg", out);
    PreprocessArgs args;
    args.dataset = (dir.path() / "kg").string();
    args.k = 1;
    args.dict_dir = dir.path() / "dicts";
    cmd_preprocess(args, out);
    CHECK(std::filesystem::exists(dir.path() / "dicts" / "entities.dict"));
    CHECK(std::filesystem::exists(dir.path() / "dicts" / "relations.dict"));
}

TEST_CASE("train command produces checkpoint, metrics, and reloadable config") {
    TempDir dir("train_cmd");
    std::ostringstream out;
    cmd_synth(dir.path() / "kg", out);

    PreprocessArgs pre;
    pre.dataset = (dir.path() / "kg").string();
    pre.k = 2;
    pre.output = dir.path() / "k2.khop";
    cmd_preprocess(pre, out);

    RunConfig cfg;
    cfg.dataset = (dir.path() / "kg").string();
    cfg.output = (dir.path() / "out").string();
    cfg.neighborhood = (dir.path() / "k2.khop").string();
    cfg.model = ModelKind::TransE;
    cfg.dim = 8;
    cfg.gamma = 4.0;
    cfg.sampler = SamplerVariant::Sans;
    cfg.negatives = 8;
    cfg.k = 2;
    cfg.batch_size = 32;
    cfg.steps = 120;
    cfg.learning_rate = 0.01;
    cfg.eval_every = 60;
    double best = cmd_train(cfg, out);
    CHECK(best > 0.0);

    CHECK(std::filesystem::exists(dir.path() / "out" / "best.ckpt"));
    CHECK(std::filesystem::exists(dir.path() / "out" / "metrics.tsv"));
    CHECK(std::filesystem::exists(dir.path() / "out" / "valid_report.txt"));
    RunConfig reloaded = load_run_config(dir.path() / "out" / "effective.conf");
    CHECK(reloaded.dump() == cfg.dump());

    // lr = 0 lands exactly on the initialization: checkpoints byte-identical
    // across two runs.
    RunConfig frozen = cfg;
    frozen.learning_rate = 0.0;
    frozen.output = (dir.path() / "f1").string();
    cmd_train(frozen, out);
    frozen.output = (dir.path() / "f2").string();
    cmd_train(frozen, out);
    std::ifstream a(dir.path() / "f1" / "best.ckpt", std::ios::binary);
    std::ifstream b(dir.path() / "f2" / "best.ckpt", std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());

    SUBCASE("eval command replays the best checkpoint's validation MRR") {
        EvalArgs eval;
        eval.checkpoint = dir.path() / "out" / "best.ckpt";
        eval.dataset = (dir.path() / "kg").string();
        eval.split = Split::Valid;
        eval.report_path = dir.path() / "replay.txt";
        std::ostringstream eval_out;
        cmd_eval(eval, eval_out);

        std::ifstream kv(dir.path() / "replay.txt");
        std::string line, mrr_line;
        while (std::getline(kv, line))
            if (line.rfind("valid.both.mrr=", 0) == 0) mrr_line = line;
        REQUIRE(!mrr_line.empty());
        double replayed = std::stod(mrr_line.substr(mrr_line.find('=') + 1));
        CHECK(replayed == doctest::Approx(best).epsilon(1e-6));
    }

    SUBCASE("eval on both splits reports matching query counts") {
        for (Split split : {Split::Valid, Split::Test}) {
            EvalArgs eval;
            eval.checkpoint = dir.path() / "out" / "best.ckpt";
            eval.dataset = (dir.path() / "kg").string();
            eval.split = split;
            std::ostringstream eval_out;
            cmd_eval(eval, eval_out);
            // 2 queries per triple: 24 for valid (12), 26 for test (13).
            CHECK(eval_out.str().find(split == Split::Valid ? "24" : "26") != std::string::npos);
        }
    }

    SUBCASE("config errors: missing neighborhood, k mismatch, kind mismatch") {
        RunConfig bad = cfg;
        bad.neighborhood.clear();
        CHECK_THROWS_AS(cmd_train(bad, out), ConfigError);

        bad = cfg;
        bad.k = 3;
        CHECK_THROWS_AS(cmd_train(bad, out), ConfigError);

        bad = cfg;
        bad.sampler = SamplerVariant::RwSans;  // file is Exact
        CHECK_THROWS_AS(cmd_train(bad, out), ConfigError);
    }

    SUBCASE("checkpoint/dataset vocabulary mismatch is a data error") {
        TempDir other("mismatch");
        test::write_file(other.path() / "train.txt", "a\tr\tb\n");
        test::write_file(other.path() / "valid.txt", "a\tr\tb\n");
        test::write_file(other.path() / "test.txt", "a\tr\tb\n");
        EvalArgs eval;
        eval.checkpoint = dir.path() / "out" / "best.ckpt";
        eval.dataset = other.path().string();
        std::ostringstream eval_out;
        CHECK_THROWS_AS(cmd_eval(eval, eval_out), DataError);
    }
}

TEST_CASE("inspect lists in-row candidates and suggests names for typos") {
    TempDir dir("inspect");
    std::ostringstream out;
    cmd_synth(dir.path() / "kg", out);
    PreprocessArgs pre;
    pre.dataset = (dir.path() / "kg").string();
    pre.k = 2;
    pre.output = dir.path() / "k2.khop";
    cmd_preprocess(pre, out);

    InspectArgs args;
    args.dataset = (dir.path() / "kg").string();
    args.neighborhood = dir.path() / "k2.khop";
    args.anchor = "a03";
    args.count = 5;
    std::ostringstream listing;
    cmd_inspect(args, listing);
    CHECK(listing.str().find("anchor 'a03'") != std::string::npos);
    CHECK(listing.str().find("uniform") != std::string::npos);

    args.anchor = "a3";  // typo
    std::ostringstream typo_out;
    CHECK_THROWS_WITH_AS(cmd_inspect(args, typo_out), doctest::Contains("closest names"),
                         DataError);
}

TEST_CASE("exact candidate rows grow monotonically with k") {
    TempDir dir("grow");
    std::ostringstream out;
    cmd_synth(dir.path() / "kg", out);
    TripleStore store = load_dataset(dir.path() / "kg");

    KHopNeighborhood prev;
    for (uint32_t k = 1; k <= 4; ++k) {
        KHopNeighborhood cur = build_exact_khop(store, k);
        if (k > 1) {
            for (EntityId e = 0; e < store.num_entities(); ++e) {
                auto small = prev.row(e);
                for (EntityId member : small) CHECK(cur.contains(e, member));
            }
        }
        prev = std::move(cur);
    }
}

}  // TEST_SUITE
