// Command-line front end: ingest / train / evaluate / analyze / gradcheck /
// verify-appendix. Exit codes: 0 success, 1 validation error, 2 runtime
// failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rate/rate.hpp"

#ifndef RATE_BUILD_ID
#define RATE_BUILD_ID "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string output_dir = "out";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "config file (key=value lines)");
    cmd->add_option("--output-dir", args.output_dir, "directory for reports and manifests");
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--threads", args.threads, "worker threads for ranking");
    cmd->add_option("overrides", args.overrides, "key=value config overrides");
}

rate::RunConfig resolve_config(const CommonArgs& args) {
    rate::RunConfig cfg;
    if (!args.config_path.empty()) cfg = rate::load_run_config(args.config_path, cfg);
    for (const std::string& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw rate::ParseError("override must look like key=value: " + kv);
        rate::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.seed) cfg.model.seed = *args.seed;
    if (args.threads) cfg.threads = *args.threads;
    cfg.training.threads = cfg.threads;
    return cfg;
}

std::string file_checksum_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw rate::IoError("cannot open for checksum: " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h = rate::fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

struct Dataset {
    rate::TripleStore train, valid, test;
    json files = json::object();

    const rate::TripleStore& split(rate::Split s) const {
        switch (s) {
            case rate::Split::train: return train;
            case rate::Split::valid: return valid;
            case rate::Split::test: return test;
        }
        throw rate::ContractError("unknown split");
    }
};

std::string resolve_split_path(const std::string& data_dir, const char* split) {
    for (const char* ext : {".tsv", ".txt"}) {
        const fs::path p = fs::path(data_dir) / (std::string(split) + ext);
        if (fs::exists(p)) return p.string();
    }
    throw rate::IoError("no " + std::string(split) + ".tsv or " + split + ".txt under " +
                        data_dir);
}

Dataset load_dataset(const rate::RunConfig& cfg, bool need_valid, bool need_test) {
    Dataset ds;
    const std::string train_path = resolve_split_path(cfg.data_dir, "train");
    {
        std::ifstream in(train_path);
        if (!in) throw rate::IoError("cannot open " + train_path);
        ds.train = rate::load_triples(in, {rate::Split::train, false, rate::UnknownPolicy::error});
    }
    ds.files["train"] = {{"path", train_path},
                         {"fnv1a64", file_checksum_hex(train_path)},
                         {"triples", ds.train.triples.size()}};

    const rate::UnknownPolicy policy =
        cfg.allow_unknown ? rate::UnknownPolicy::skip : rate::UnknownPolicy::error;
    auto load_aux = [&](const char* name, rate::Split split, rate::TripleStore& out) {
        const std::string path = resolve_split_path(cfg.data_dir, name);
        std::ifstream in(path);
        if (!in) throw rate::IoError("cannot open " + path);
        out = rate::load_triples(in, {split, true, policy}, &ds.train);
        ds.files[name] = {{"path", path},
                          {"fnv1a64", file_checksum_hex(path)},
                          {"triples", out.triples.size()}};
    };
    if (need_valid) load_aux("valid", rate::Split::valid, ds.valid);
    if (need_test) load_aux("test", rate::Split::test, ds.test);
    return ds;
}

rate::GraphIndex build_filter_index(const Dataset& ds) {
    std::vector<const rate::TripleStore*> filters;
    if (!ds.valid.triples.empty()) filters.push_back(&ds.valid);
    if (!ds.test.triples.empty()) filters.push_back(&ds.test);
    return rate::GraphIndex(ds.train, filters);
}

void write_manifest(const CommonArgs& args, const std::string& command,
                    const rate::RunConfig& cfg, const json& datasets, const json& outputs) {
    fs::create_directories(args.output_dir);
    json m{{"command", command},
           {"build", RATE_BUILD_ID},
           {"seed", cfg.model.seed},
           {"threads", cfg.threads},
           {"config", rate::dump_run_config(cfg)},
           {"datasets", datasets},
           {"outputs", outputs}};
    std::ofstream out(fs::path(args.output_dir) / (command + ".manifest.json"));
    out << m.dump(2) << '\n';
}

void print_stats(const char* name, const rate::TripleStore& s) {
    std::cout << name << ": lines " << s.stats.lines << ", loaded " << s.stats.loaded
              << ", duplicates " << s.stats.duplicates << ", skipped_unknown "
              << s.stats.skipped_unknown << '\n';
}

int cmd_ingest(const CommonArgs& args) {
    const rate::RunConfig cfg = resolve_config(args);
    Dataset ds = load_dataset(cfg, true, true);
    std::cout << "entities " << ds.train.num_entities() << ", relations "
              << ds.train.num_relations() << '\n';
    print_stats("train", ds.train);
    print_stats("valid", ds.valid);
    print_stats("test", ds.test);

    fs::create_directories(args.output_dir);
    const fs::path ent_path = fs::path(args.output_dir) / "entities.tsv";
    const fs::path rel_path = fs::path(args.output_dir) / "relations.tsv";
    {
        std::ofstream out(ent_path);
        ds.train.entities.dump(out);
    }
    {
        std::ofstream out(rel_path);
        ds.train.relations.dump(out);
    }
    write_manifest(args, "ingest", cfg, ds.files,
                   {{"entities", ent_path.string()}, {"relations", rel_path.string()}});
    return 0;
}

int cmd_train(const CommonArgs& args) {
    const rate::RunConfig cfg = resolve_config(args);
    const bool want_valid = cfg.training.eval_every != 0;
    Dataset ds = load_dataset(cfg, want_valid, false);
    rate::GraphIndex index = build_filter_index(ds);

    rate::TrainCallbacks cb;
    cb.on_epoch = [](const rate::EpochLog& log) { std::cout << rate::format_epoch(log) << '\n'; };

    fs::create_directories(args.output_dir);
    const fs::path ckpt_dir = args.output_dir;
    cb.on_checkpoint = [&](std::size_t epoch, const rate::ParameterStore& p) {
        rate::save_checkpoint_file(p, (ckpt_dir / ("epoch" + std::to_string(epoch) + ".ckpt")).string());
    };

    const rate::TrainResult result =
        rate::train(ds.train, index, cfg.model, cfg.training,
                    want_valid ? &ds.valid.triples : nullptr, cb);

    const fs::path final_path = ckpt_dir / "model.ckpt";
    rate::save_checkpoint_file(result.params, final_path.string());
    json outputs{{"checkpoint", final_path.string()}, {"steps", result.steps}};
    if (!std::isnan(result.best_valid_mrr)) {
        const fs::path best_path = ckpt_dir / "model.best.ckpt";
        rate::save_checkpoint_file(result.best_params, best_path.string());
        outputs["best_checkpoint"] = best_path.string();
        outputs["best_valid_mrr"] = result.best_valid_mrr;
    }

    const fs::path log_path = ckpt_dir / "training_log.tsv";
    {
        std::ofstream out(log_path);
        out << "epoch\tloss\tgamma\tmeanScoreN\tmeanScoreNbar\n";
        char row[160];
        for (const auto& log : result.log) {
            std::snprintf(row, sizeof(row), "%zu\t%.6f\t%.6f\t%.6f\t%.6f\n", log.epoch,
                          log.mean_loss, log.gamma, log.mean_score_n, log.mean_score_nbar);
            out << row;
        }
    }
    outputs["training_log"] = log_path.string();

    write_manifest(args, "train", cfg, ds.files, outputs);
    std::cout << "saved " << final_path.string() << '\n';
    return 0;
}

rate::ParameterStore load_checkpoint_for(const Dataset& ds, const std::string& path) {
    rate::ParameterStore p = rate::load_checkpoint_file(path);
    if (p.num_entities != ds.train.num_entities() || p.num_relations != ds.train.num_relations())
        throw rate::ContractError("checkpoint shape does not match the dataset vocabulary");
    return p;
}

std::vector<rate::MetricsRow> side_rows(const rate::ParameterStore& p,
                                        const rate::GraphIndex& index,
                                        std::span<const rate::Triple> triples,
                                        const std::string& split_label, std::size_t threads) {
    std::vector<rate::MetricsRow> rows;
    const auto events = rate::rank_events(p, index, triples, rate::SideFilter::both, threads);
    std::vector<rate::RankedEvent> head_ev, tail_ev;
    for (const auto& ev : events)
        (ev.side == rate::CorruptSide::head ? head_ev : tail_ev).push_back(ev);
    rows.push_back({split_label, "all", "head", rate::aggregate_metrics(head_ev)});
    rows.push_back({split_label, "all", "tail", rate::aggregate_metrics(tail_ev)});
    rows.push_back({split_label, "all", "both", rate::aggregate_metrics(events)});
    return rows;
}

void print_metrics_rows(const std::vector<rate::MetricsRow>& rows) {
    std::ostringstream os;
    rate::write_metrics_tsv(os, rows);
    std::cout << os.str();
}

int cmd_evaluate(const CommonArgs& args, const std::string& checkpoint,
                 const std::string& split_name) {
    const rate::RunConfig cfg = resolve_config(args);
    rate::Split split;
    if (split_name == "valid")
        split = rate::Split::valid;
    else if (split_name == "test")
        split = rate::Split::test;
    else
        throw rate::ParseError("--split must be valid or test, got '" + split_name + "'");

    Dataset ds = load_dataset(cfg, true, true);
    rate::GraphIndex index = build_filter_index(ds);
    const rate::ParameterStore p = load_checkpoint_for(ds, checkpoint);

    const auto& triples = ds.split(split).triples;
    const auto rows = side_rows(p, index, triples, split_name, cfg.threads);
    print_metrics_rows(rows);

    fs::create_directories(args.output_dir);
    const fs::path tsv_path = fs::path(args.output_dir) / "metrics.tsv";
    const fs::path json_path = fs::path(args.output_dir) / "metrics.json";
    {
        std::ofstream out(tsv_path);
        rate::write_metrics_tsv(out, rows);
    }
    {
        std::ofstream out(json_path);
        rate::write_metrics_json(out, rows);
    }
    write_manifest(args, "evaluate", cfg, ds.files,
                   {{"metrics_tsv", tsv_path.string()},
                    {"metrics_json", json_path.string()},
                    {"checkpoint", checkpoint}});
    return 0;
}

int cmd_analyze(const CommonArgs& args, const std::string& checkpoint,
                const std::string& split_name) {
    const rate::RunConfig cfg = resolve_config(args);
    const rate::Split split = split_name == "valid" ? rate::Split::valid : rate::Split::test;
    if (split_name != "valid" && split_name != "test")
        throw rate::ParseError("--split must be valid or test, got '" + split_name + "'");

    Dataset ds = load_dataset(cfg, true, true);
    rate::GraphIndex index = build_filter_index(ds);
    const rate::ParameterStore p = load_checkpoint_for(ds, checkpoint);

    auto profiles = rate::classify_relation_types(ds.train);
    const bool has_norms = p.kind == rate::ModelKind::rate;
    if (has_norms)
        for (auto& prof : profiles) prof.w_l1 = p.weights(prof.relation).l1();

    const auto& triples = ds.split(split).triples;
    auto by_relation =
        rate::metrics_by_group(p, index, triples, rate::Grouping::relation,
                               rate::SideFilter::both, profiles, &ds.train.relations, cfg.threads);
    auto by_type =
        rate::metrics_by_group(p, index, triples, rate::Grouping::relation_type,
                               rate::SideFilter::both, profiles, &ds.train.relations, cfg.threads);

    std::vector<rate::MetricsRow> rows;
    for (const auto& g : by_relation) rows.push_back({split_name, g.group, g.side, g.metrics});
    for (const auto& g : by_type) rows.push_back({split_name, g.group, g.side, g.metrics});
    print_metrics_rows(rows);

    fs::create_directories(args.output_dir);
    json outputs{{"checkpoint", checkpoint}};
    {
        const fs::path path = fs::path(args.output_dir) / "relation_profiles.tsv";
        std::ofstream out(path);
        rate::write_relation_profiles_tsv(out, profiles, &ds.train.relations, has_norms);
        outputs["relation_profiles_tsv"] = path.string();
    }
    {
        const fs::path path = fs::path(args.output_dir) / "relation_profiles.json";
        std::ofstream out(path);
        rate::write_relation_profiles_json(out, profiles, &ds.train.relations, has_norms);
        outputs["relation_profiles_json"] = path.string();
    }
    if (has_norms) {
        const auto norms = rate::weight_norm_report(p);
        const fs::path tsv_path = fs::path(args.output_dir) / "weight_norms.tsv";
        const fs::path json_path = fs::path(args.output_dir) / "weight_norms.json";
        {
            std::ofstream out(tsv_path);
            rate::write_weight_norms_tsv(out, norms, &ds.train.relations);
        }
        {
            std::ofstream out(json_path);
            rate::write_weight_norms_json(out, norms, &ds.train.relations);
        }
        outputs["weight_norms_tsv"] = tsv_path.string();
        outputs["weight_norms_json"] = json_path.string();
    }
    {
        const fs::path tsv_path = fs::path(args.output_dir) / "grouped_metrics.tsv";
        const fs::path json_path = fs::path(args.output_dir) / "grouped_metrics.json";
        {
            std::ofstream out(tsv_path);
            rate::write_metrics_tsv(out, rows);
        }
        {
            std::ofstream out(json_path);
            rate::write_metrics_json(out, rows);
        }
        outputs["grouped_metrics_tsv"] = tsv_path.string();
        outputs["grouped_metrics_json"] = json_path.string();
    }
    write_manifest(args, "analyze", cfg, ds.files, outputs);
    return 0;
}

int cmd_gradcheck(const CommonArgs& args, std::size_t batches, std::size_t dim,
                  std::size_t negatives, double tolerance) {
    rate::RunConfig cfg = resolve_config(args);
    cfg.model.dim = dim;

    // Small random graph; no dataset needed for a derivative check.
    auto synth_rng = rate::make_rng(cfg.model.seed, rate::RngStream::synth);
    constexpr std::size_t kEntities = 30, kRelations = 4, kTriples = 150;
    rate::TripleStore store;
    for (std::size_t e = 0; e < kEntities; ++e) store.entities.add("e" + std::to_string(e));
    for (std::size_t r = 0; r < kRelations; ++r) store.relations.add("r" + std::to_string(r));
    std::unordered_set<std::uint64_t> seen;
    while (store.triples.size() < kTriples) {
        rate::Triple x{static_cast<rate::EntityId>(rate::uniform_index(synth_rng, kEntities)),
                       static_cast<rate::RelationId>(rate::uniform_index(synth_rng, kRelations)),
                       static_cast<rate::EntityId>(rate::uniform_index(synth_rng, kEntities))};
        if (x.head == x.tail) continue;
        if (seen.insert(rate::pack_triple(x)).second) store.triples.push_back(x);
    }
    rate::GraphIndex index(store);

    double worst = 0.0;
    std::string worst_desc;
    for (rate::ModelKind kind :
         {rate::ModelKind::transe, rate::ModelKind::rotate, rate::ModelKind::rate}) {
        rate::ModelConfig mc = cfg.model;
        mc.kind = kind;
        rate::ParameterStore p = rate::init_parameters(mc, kEntities, kRelations);
        auto sampler_rng = rate::make_rng(mc.seed, rate::RngStream::sampler);
        rate::SamplerConfig scfg;
        scfg.num_negatives = negatives;
        rate::SamplerState sstate;

        double model_worst = 0.0;
        for (std::size_t b = 0; b < batches; ++b) {
            std::vector<rate::BatchItem> batch;
            for (std::size_t i = 0; i < 4; ++i) {
                const rate::Triple& x =
                    store.triples[rate::uniform_index(sampler_rng, store.triples.size())];
                rate::BatchItem item;
                item.positive = x;
                item.negatives = rate::sample_negatives(index, x, negatives, sstate, sampler_rng, scfg);
                auto& nb = item.negatives;
                std::vector<rate::EntityId> ids(nb.size());
                for (std::size_t k = 0; k < nb.size(); ++k) ids[k] = nb.entity(k);
                nb.scores.resize(nb.size());
                if (nb.side == rate::CorruptSide::tail)
                    rate::score_tail_candidates(p, x.head, x.relation, ids, nb.scores);
                else
                    rate::score_head_candidates(p, ids, x.relation, x.tail, nb.scores);
                nb.beta = rate::adversarial_weights(nb.scores);
                batch.push_back(std::move(item));
            }
            const rate::FdReport rep = rate::finite_difference_check(p, batch, {});
            if (rep.max_rel_error > model_worst) model_worst = rep.max_rel_error;
            if (rep.max_rel_error > worst) {
                worst = rep.max_rel_error;
                worst_desc = std::string(rate::model_name(kind)) + " batch " + std::to_string(b) +
                             " at " + rep.worst_coordinate;
            }
        }
        std::cout << rate::model_name(kind) << ": max relative error " << model_worst << " over "
                  << batches << " batches\n";
    }
    std::cout << "overall max relative error " << worst;
    if (!worst_desc.empty()) std::cout << " (" << worst_desc << ")";
    std::cout << ", tolerance " << tolerance << '\n';

    write_manifest(args, "gradcheck", cfg, json::object(),
                   {{"max_rel_error", worst}, {"tolerance", tolerance}});
    if (worst >= tolerance) {
        std::cerr << "gradient check failed\n";
        return 1;
    }
    return 0;
}

int cmd_verify_appendix(const CommonArgs& args, std::size_t cases) {
    const rate::RunConfig cfg = resolve_config(args);
    auto rng = rate::make_rng(cfg.model.seed, rate::RngStream::synth);
    const rate::SpatialReport rep = rate::verify_spatial_transformation(cases, rng);
    std::cout << rep.summary();
    write_manifest(args, "verify-appendix", cfg, json::object(),
                   {{"cases", rep.cases},
                    {"violations", rep.violations()},
                    {"expansion", rep.expansion},
                    {"preservation", rep.preservation},
                    {"contraction", rep.contraction}});
    return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-graph embeddings with relation-adaptive weighted complex products"};
    app.require_subcommand(1);

    CommonArgs ingest_args, train_args, eval_args, analyze_args, grad_args, verify_args;

    CLI::App* ingest = app.add_subcommand("ingest", "load and validate a dataset");
    add_common(ingest, ingest_args);

    CLI::App* train = app.add_subcommand("train", "train a model and write checkpoints");
    add_common(train, train_args);

    CLI::App* evaluate = app.add_subcommand("evaluate", "filtered link-prediction metrics");
    add_common(evaluate, eval_args);
    std::string eval_checkpoint, eval_split = "test";
    evaluate->add_option("--checkpoint", eval_checkpoint, "trained model file")->required();
    evaluate->add_option("--split", eval_split, "valid or test");

    CLI::App* analyze = app.add_subcommand(
        "analyze", "relation types, weight norms, and per-group metrics");
    add_common(analyze, analyze_args);
    std::string analyze_checkpoint, analyze_split = "test";
    analyze->add_option("--checkpoint", analyze_checkpoint, "trained model file")->required();
    analyze->add_option("--split", analyze_split, "valid or test");

    CLI::App* gradcheck = app.add_subcommand(
        "gradcheck", "compare analytic gradients against finite differences");
    add_common(gradcheck, grad_args);
    std::size_t gc_batches = 20, gc_dim = 8, gc_negatives = 4;
    double gc_tolerance = 1e-4;
    gradcheck->add_option("--batches", gc_batches, "number of random minibatches");
    gradcheck->add_option("--dim", gc_dim, "embedding dimension");
    gradcheck->add_option("--negatives", gc_negatives, "negatives per positive");
    gradcheck->add_option("--tolerance", gc_tolerance, "max allowed relative error");

    CLI::App* verify = app.add_subcommand("verify-appendix",
                                          "check the spatial-transformation identities");
    add_common(verify, verify_args);
    std::size_t cases = 10000;
    verify->add_option("--cases", cases, "number of random cases");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n' << app.help();
        return 1;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(ingest_args);
        if (train->parsed()) return cmd_train(train_args);
        if (evaluate->parsed()) return cmd_evaluate(eval_args, eval_checkpoint, eval_split);
        if (analyze->parsed()) return cmd_analyze(analyze_args, analyze_checkpoint, analyze_split);
        if (gradcheck->parsed())
            return cmd_gradcheck(grad_args, gc_batches, gc_dim, gc_negatives, gc_tolerance);
        if (verify->parsed()) return cmd_verify_appendix(verify_args, cases);
    } catch (const rate::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const rate::ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
