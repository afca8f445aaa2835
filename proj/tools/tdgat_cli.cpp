// Command-line harness for the sentiment classifier. Talks to the core
// exclusively through the C API in tdgat/tdgat.h.
//
// Exit codes: 0 success, 1 usage, 2 input/format, 3 numeric failure.

#include "tdgat/tdgat.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(tdgat_status status) {
    switch (status) {
        case TDGAT_OK: return 0;
        case TDGAT_ERR_INVALID_ARGUMENT: return kExitUsage;
        case TDGAT_ERR_NUMERIC: return kExitNumeric;
        default: return kExitInput;
    }
}

[[noreturn]] void die(tdgat_status status, const std::string& context) {
    std::cerr << "tdgat: " << context << ": " << tdgat_last_error() << "\n";
    std::exit(exit_code_for(status));
}

void require_ok(tdgat_status status, const std::string& context) {
    if (status != TDGAT_OK) die(status, context);
}

struct CorpusHandle {
    tdgat_corpus* p = nullptr;
    ~CorpusHandle() { tdgat_corpus_free(p); }
};
struct EmbeddingsHandle {
    tdgat_embeddings* p = nullptr;
    ~EmbeddingsHandle() { tdgat_embeddings_free(p); }
};
struct ModelHandle {
    tdgat_model* p = nullptr;
    ~ModelHandle() { tdgat_model_free(p); }
};
struct OwnedString {
    char* s = nullptr;
    ~OwnedString() { tdgat_string_free(s); }
};

// Dataset flags shared by the training-style subcommands.
struct DatasetArgs {
    std::string dataset;
    std::string aspects;    // sidecar for CoNLL-U input
    std::string embeddings; // GloVe-format path ("synth:<dim>" for the synthetic table)
    int dev_size = 0;
    std::string dev_sidecar;
    unsigned long long seed = 0;
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void open_corpus(const DatasetArgs& args, CorpusHandle& corpus) {
    if (ends_with(args.dataset, ".conllu")) {
        if (args.aspects.empty()) {
            std::cerr << "tdgat: CoNLL-U input needs --aspects <sidecar.jsonl>\n";
            std::exit(kExitUsage);
        }
        require_ok(tdgat_corpus_open_conllu(args.dataset.c_str(), args.aspects.c_str(), &corpus.p),
                   "loading " + args.dataset);
    } else {
        require_ok(tdgat_corpus_open_jsonl(args.dataset.c_str(), &corpus.p), "loading " + args.dataset);
    }
    if (args.dev_size > 0 || !args.dev_sidecar.empty()) {
        const char* sidecar = args.dev_sidecar.empty() ? nullptr : args.dev_sidecar.c_str();
        require_ok(tdgat_corpus_split_dev(corpus.p, args.dev_size, args.seed, sidecar),
                   "splitting dev set");
    }
}

void open_embeddings(const std::string& spec, unsigned long long seed, EmbeddingsHandle& emb) {
    if (spec.rfind("synth:", 0) == 0) {
        const int dim = std::atoi(spec.c_str() + 6);
        require_ok(tdgat_embeddings_synth(dim, seed, &emb.p), "building synthetic embeddings");
    } else {
        require_ok(tdgat_embeddings_open(spec.c_str(), 0, &emb.p), "loading " + spec);
    }
}

void add_dataset_flags(CLI::App* cmd, DatasetArgs& args, bool need_embeddings) {
    cmd->add_option("--dataset", args.dataset, "dataset JSONL (or .conllu with --aspects)")->required();
    cmd->add_option("--aspects", args.aspects, "aspects sidecar JSONL for CoNLL-U input");
    if (need_embeddings)
        cmd->add_option("--embeddings", args.embeddings,
                        "GloVe-format word vectors; gzip input is detected; synth:<dim> uses the "
                        "synthetic table")
            ->required();
    cmd->add_option("--dev-size", args.dev_size, "tag a seeded dev sample of this size");
    cmd->add_option("--dev-sidecar", args.dev_sidecar, "published dev split: one example index per line");
}

struct ModelFlags {
    int layers = -1, dim = -1, heads = -1, embed_dim = -1;
    std::string variant;
    std::optional<bool> self_loop;
    std::optional<bool> lstm_target_only;
    double leaky_slope = -1.0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags) {
    cmd->add_option("--layers", flags.layers, "number of propagation layers L");
    cmd->add_option("--dim", flags.dim, "hidden state dimension D");
    cmd->add_option("--heads", flags.heads, "attention heads K");
    cmd->add_option("--embed-dim", flags.embed_dim, "input word vector dimension");
    cmd->add_option("--variant", flags.variant, "TDGAT (default) or GAT (the no-LSTM ablation)");
    cmd->add_flag("--no-self-loop,!--self-loop",
                  [&flags](int64_t count) { flags.self_loop = count <= 0; },
                  "exclude each node from its own neighborhood");
    cmd->add_flag("--lstm-target-only",
                  [&flags](int64_t) { flags.lstm_target_only = true; },
                  "apply the cross-layer LSTM to the target row only");
    cmd->add_option("--leaky-slope", flags.leaky_slope, "attention LeakyReLU slope");
}

tdgat_model_config build_model_config(const ModelFlags& flags, int embeddings_dim) {
    tdgat_model_config mc;
    tdgat_model_config_init(&mc);
    if (flags.layers > 0) mc.layers = flags.layers;
    if (flags.dim > 0) mc.hidden_dim = flags.dim;
    if (flags.heads > 0) mc.heads = flags.heads;
    mc.embed_dim = flags.embed_dim > 0 ? flags.embed_dim : embeddings_dim;
    if (!flags.variant.empty()) {
        if (flags.variant == "TDGAT" || flags.variant == "tdgat")
            mc.variant = TDGAT_VARIANT_TDGAT;
        else if (flags.variant == "GAT" || flags.variant == "gat")
            mc.variant = TDGAT_VARIANT_GAT;
        else {
            std::cerr << "tdgat: unknown variant '" << flags.variant << "' (TDGAT or GAT)\n";
            std::exit(kExitUsage);
        }
    }
    if (flags.self_loop) mc.self_loop = *flags.self_loop ? 1 : 0;
    if (flags.lstm_target_only) mc.lstm_target_only = 1;
    if (flags.leaky_slope >= 0.0) mc.leaky_slope = flags.leaky_slope;
    return mc;
}

struct TrainFlags {
    int batch_size = -1, max_epochs = -1, switch_patience = -1, switch_epoch = -2;
    double lambda_l2 = -1.0, dropout = -1.0, adam_lr = -1.0, sgd_lr = -1.0;
    bool final_mode = false;
};

void add_train_flags(CLI::App* cmd, TrainFlags& flags) {
    cmd->add_option("--batch-size", flags.batch_size, "mini-batch size");
    cmd->add_option("--epochs", flags.max_epochs, "training epochs");
    cmd->add_option("--lambda", flags.lambda_l2, "L2 regularization strength");
    cmd->add_option("--dropout", flags.dropout, "input embedding dropout rate");
    cmd->add_option("--adam-lr", flags.adam_lr, "Adam learning rate");
    cmd->add_option("--sgd-lr", flags.sgd_lr, "SGD learning rate after the switch");
    cmd->add_option("--switch-patience", flags.switch_patience,
                    "epochs without dev improvement before switching to SGD");
    cmd->add_option("--switch-epoch", flags.switch_epoch, "fixed Adam-to-SGD switch epoch");
    cmd->add_flag("--final", flags.final_mode,
                  "final-model mode: train on everything, select by train loss");
}

tdgat_train_config build_train_config(const TrainFlags& flags, unsigned long long seed) {
    tdgat_train_config tc;
    tdgat_train_config_init(&tc);
    if (flags.batch_size > 0) tc.batch_size = flags.batch_size;
    if (flags.max_epochs >= 0) tc.max_epochs = flags.max_epochs;
    if (flags.lambda_l2 >= 0.0) tc.lambda_l2 = flags.lambda_l2;
    if (flags.dropout >= 0.0) tc.dropout_rate = flags.dropout;
    if (flags.adam_lr > 0.0) tc.adam_lr = flags.adam_lr;
    if (flags.sgd_lr > 0.0) tc.sgd_lr = flags.sgd_lr;
    if (flags.switch_patience > 0) tc.switch_patience = flags.switch_patience;
    if (flags.switch_epoch >= -1) tc.switch_epoch = flags.switch_epoch;
    tc.final_mode = flags.final_mode ? 1 : 0;
    tc.seed = seed;
    return tc;
}

unsigned long long default_seed() {
    if (const char* env = std::getenv("TDGAT_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

void print_train_log(const char* log_jsonl) {
    std::istringstream is(log_jsonl ? log_jsonl : "");
    std::string line;
    std::cout << "epoch  phase  train_loss  train_acc  dev_acc\n";
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        std::cout << std::setw(5) << j["epoch"].get<int>() << "  " << std::setw(5)
                  << j["phase"].get<std::string>() << "  " << std::fixed << std::setprecision(6)
                  << std::setw(10) << j["train_loss"].get<double>() << "  " << std::setprecision(4)
                  << std::setw(9) << j["train_accuracy"].get<double>() << "  ";
        if (j["dev_accuracy"].is_null())
            std::cout << std::setw(7) << "-";
        else
            std::cout << std::setw(7) << j["dev_accuracy"].get<double>();
        std::cout << "\n";
        std::cout.unsetf(std::ios::fixed);
    }
}

void write_text_file(const std::string& path, const std::string& content, const char* what) {
    std::ofstream out(path);
    if (!out) {
        std::cerr << "tdgat: cannot write " << what << ": " << path << "\n";
        std::exit(kExitInput);
    }
    out << content;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"target-dependent graph attention sentiment classifier"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    unsigned long long seed = default_seed();
    app.add_option("--seed", seed, "seed for all randomness (default $TDGAT_SEED or 0)");

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train a model and write a model file");
    DatasetArgs train_data;
    ModelFlags train_model_flags;
    TrainFlags train_flags;
    std::string train_out, train_log_out;
    add_dataset_flags(train_cmd, train_data, true);
    add_model_flags(train_cmd, train_model_flags);
    add_train_flags(train_cmd, train_flags);
    train_cmd->add_option("--out", train_out, "output model file")->required();
    train_cmd->add_option("--log-out", train_log_out, "write the per-epoch log as JSONL");

    // ---- eval ----
    auto* eval_cmd = app.add_subcommand("eval", "print accuracy of a saved model on a dataset");
    DatasetArgs eval_data;
    std::string eval_model, eval_split = "all";
    add_dataset_flags(eval_cmd, eval_data, true);
    eval_cmd->add_option("--model", eval_model, "model file")->required();
    eval_cmd->add_option("--split", eval_split, "all (default), train, dev or test");

    // ---- predict ----
    auto* predict_cmd = app.add_subcommand("predict", "classify JSONL records with a saved model");
    std::string predict_model, predict_in, predict_out = "-", predict_emb;
    predict_cmd->add_option("--model", predict_model, "model file")->required();
    predict_cmd->add_option("--embeddings", predict_emb, "word vectors (synth:<dim> allowed)")->required();
    predict_cmd->add_option("--in", predict_in, "input JSONL (polarity optional)")->required();
    predict_cmd->add_option("--out", predict_out, "output JSONL, '-' for stdout");

    // ---- ablate ----
    auto* ablate_cmd = app.add_subcommand("ablate", "train GAT and TD-GAT arms under identical seeds");
    DatasetArgs ablate_data;
    ModelFlags ablate_model_flags;
    TrainFlags ablate_flags;
    std::vector<int> ablate_depths;
    std::string ablate_json_out;
    add_dataset_flags(ablate_cmd, ablate_data, true);
    add_model_flags(ablate_cmd, ablate_model_flags);
    add_train_flags(ablate_cmd, ablate_flags);
    ablate_cmd->add_option("--depths", ablate_depths, "layer counts to compare (default: --layers)");
    ablate_cmd->add_option("--json-out", ablate_json_out, "write the report as JSON");

    // ---- sweep-depth ----
    auto* sweep_cmd = app.add_subcommand("sweep-depth", "accuracy as a function of model depth");
    DatasetArgs sweep_data;
    ModelFlags sweep_model_flags;
    TrainFlags sweep_flags;
    int sweep_min = 1, sweep_max = 6;
    std::string sweep_json_out;
    add_dataset_flags(sweep_cmd, sweep_data, true);
    add_model_flags(sweep_cmd, sweep_model_flags);
    add_train_flags(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--min", sweep_min, "smallest depth (default 1)");
    sweep_cmd->add_option("--max", sweep_max, "largest depth (default 6)");
    sweep_cmd->add_option("--json-out", sweep_json_out, "write the table as JSON");

    // ---- params ----
    auto* params_cmd = app.add_subcommand("params", "parameter count for a configuration");
    ModelFlags params_flags;
    add_model_flags(params_cmd, params_flags);

    // ---- stats ----
    auto* stats_cmd = app.add_subcommand("stats", "per-split class counts of a dataset");
    DatasetArgs stats_data;
    std::string stats_json_out;
    add_dataset_flags(stats_cmd, stats_data, false);
    stats_cmd->add_option("--json-out", stats_json_out, "write the counts as JSON");

    // ---- gradcheck ----
    auto* grad_cmd = app.add_subcommand("gradcheck", "full-model finite-difference gradient check");
    ModelFlags grad_flags;
    grad_flags.dim = 12;
    grad_flags.heads = 3;
    grad_flags.layers = 2;
    grad_flags.embed_dim = 8;
    int grad_nodes = 6;
    double grad_lambda = 1e-4, grad_step = 1e-5, grad_tol = 1e-4;
    add_model_flags(grad_cmd, grad_flags);
    grad_cmd->add_option("--nodes", grad_nodes, "graph size (default 6)");
    grad_cmd->add_option("--lambda", grad_lambda, "L2 strength in the checked loss");
    grad_cmd->add_option("--step", grad_step, "finite-difference step");
    grad_cmd->add_option("--tol", grad_tol, "maximum relative error accepted");

    // ---- synth ----
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic corpus and matching embeddings");
    int synth_size = 40, synth_dim = 16;
    std::string synth_out, synth_emb_out;
    synth_cmd->add_option("--size", synth_size, "number of examples (default 40)");
    synth_cmd->add_option("--dim", synth_dim, "embedding dimension (default 16)");
    synth_cmd->add_option("--out", synth_out, "corpus JSONL path")->required();
    synth_cmd->add_option("--emb-out", synth_emb_out, "embeddings path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    if (train_cmd->parsed()) {
        train_data.seed = seed;
        CorpusHandle corpus;
        open_corpus(train_data, corpus);
        EmbeddingsHandle emb;
        open_embeddings(train_data.embeddings, seed, emb);
        const tdgat_model_config mc = build_model_config(train_model_flags, tdgat_embeddings_dim(emb.p));
        ModelHandle model;
        require_ok(tdgat_model_create(&mc, seed, &model.p), "creating model");
        const tdgat_train_config tc = build_train_config(train_flags, seed);
        OwnedString log;
        require_ok(tdgat_train(model.p, corpus.p, emb.p, &tc, &log.s), "training");
        require_ok(tdgat_model_save(model.p, train_out.c_str()), "saving " + train_out);
        print_train_log(log.s);
        if (!train_log_out.empty()) write_text_file(train_log_out, log.s ? log.s : "", "log");
        std::cout << "model written to " << train_out << "\n";
        return 0;
    }

    if (eval_cmd->parsed()) {
        eval_data.seed = seed;
        CorpusHandle corpus;
        open_corpus(eval_data, corpus);
        EmbeddingsHandle emb;
        open_embeddings(eval_data.embeddings, seed, emb);
        ModelHandle model;
        require_ok(tdgat_model_open(eval_model.c_str(), &model.p), "loading " + eval_model);
        tdgat_split split = TDGAT_SPLIT_ALL;
        if (eval_split == "train") split = TDGAT_SPLIT_TRAIN;
        else if (eval_split == "dev") split = TDGAT_SPLIT_DEV;
        else if (eval_split == "test") split = TDGAT_SPLIT_TEST;
        else if (eval_split != "all") {
            std::cerr << "tdgat: unknown split '" << eval_split << "'\n";
            return kExitUsage;
        }
        double accuracy = 0.0;
        require_ok(tdgat_evaluate(model.p, corpus.p, split, emb.p, &accuracy), "evaluating");
        std::cout << std::fixed << std::setprecision(4) << "accuracy " << accuracy << "\n";
        return 0;
    }

    if (predict_cmd->parsed()) {
        ModelHandle model;
        require_ok(tdgat_model_open(predict_model.c_str(), &model.p), "loading " + predict_model);
        EmbeddingsHandle emb;
        open_embeddings(predict_emb, seed, emb);
        require_ok(tdgat_predict_file(model.p, emb.p, predict_in.c_str(), predict_out.c_str()),
                   "predicting");
        return 0;
    }

    if (ablate_cmd->parsed()) {
        ablate_data.seed = seed;
        CorpusHandle corpus;
        open_corpus(ablate_data, corpus);
        EmbeddingsHandle emb;
        open_embeddings(ablate_data.embeddings, seed, emb);
        const tdgat_model_config mc = build_model_config(ablate_model_flags, tdgat_embeddings_dim(emb.p));
        const tdgat_train_config tc = build_train_config(ablate_flags, seed);
        OwnedString report;
        require_ok(tdgat_ablate(&mc, corpus.p, emb.p, &tc,
                                ablate_depths.empty() ? nullptr : ablate_depths.data(),
                                static_cast<int>(ablate_depths.size()), &report.s),
                   "ablating");
        const json j = json::parse(report.s);
        std::cout << "layers      ";
        for (const auto& d : j["depths"]) std::cout << std::setw(8) << d.get<int>();
        std::cout << "\n";
        for (const char* variant : {"GAT", "TDGAT"}) {
            std::cout << std::left << std::setw(12) << (std::string(variant) == "GAT" ? "GAT" : "TD-GAT")
                      << std::right;
            for (const auto& d : j["depths"])
                for (const auto& arm : j["arms"])
                    if (arm["variant"] == variant && arm["layers"] == d)
                        std::cout << std::fixed << std::setprecision(4) << std::setw(8)
                                  << arm["accuracy"].get<double>();
            std::cout << "\n";
            std::cout.unsetf(std::ios::fixed);
        }
        if (!ablate_json_out.empty()) write_text_file(ablate_json_out, j.dump() + "\n", "report");
        return 0;
    }

    if (sweep_cmd->parsed()) {
        if (sweep_min < 1 || sweep_max < sweep_min) {
            std::cerr << "tdgat: bad depth range [" << sweep_min << ", " << sweep_max << "]\n";
            return kExitUsage;
        }
        sweep_data.seed = seed;
        CorpusHandle corpus;
        open_corpus(sweep_data, corpus);
        EmbeddingsHandle emb;
        open_embeddings(sweep_data.embeddings, seed, emb);

        json rows = json::array();
        std::cout << "depth  accuracy\n";
        for (int depth = sweep_min; depth <= sweep_max; ++depth) {
            ModelFlags flags = sweep_model_flags;
            flags.layers = depth;
            const tdgat_model_config mc = build_model_config(flags, tdgat_embeddings_dim(emb.p));
            // per-arm derived seed keeps arms independent and reproducible
            const unsigned long long arm_seed = seed + static_cast<unsigned long long>(depth);
            ModelHandle model;
            require_ok(tdgat_model_create(&mc, arm_seed, &model.p), "creating model");
            tdgat_train_config tc = build_train_config(sweep_flags, arm_seed);
            require_ok(tdgat_train(model.p, corpus.p, emb.p, &tc, nullptr), "training depth " +
                                                                                std::to_string(depth));
            double accuracy = 0.0;
            const tdgat_split eval_split = tc.final_mode ? TDGAT_SPLIT_ALL : TDGAT_SPLIT_DEV;
            require_ok(tdgat_evaluate(model.p, corpus.p, eval_split, emb.p, &accuracy), "evaluating");
            std::cout << std::setw(5) << depth << "  " << std::fixed << std::setprecision(4) << accuracy
                      << "\n";
            std::cout.unsetf(std::ios::fixed);
            rows.push_back(json{{"depth", depth}, {"accuracy", accuracy}});
        }
        if (!sweep_json_out.empty()) write_text_file(sweep_json_out, rows.dump() + "\n", "table");
        return 0;
    }

    if (params_cmd->parsed()) {
        ModelFlags flags = params_flags;
        if (flags.embed_dim <= 0) flags.embed_dim = flags.dim > 0 ? flags.dim : 300;
        const tdgat_model_config mc = build_model_config(flags, flags.embed_dim);
        const long long count = tdgat_param_count(&mc);
        if (count < 0) die(TDGAT_ERR_INVALID_ARGUMENT, "counting parameters");
        tdgat_model_config prev = mc;
        prev.layers = mc.layers - 1;
        std::cout << "parameters " << count << "\n";
        if (prev.layers >= 1) {
            const long long prev_count = tdgat_param_count(&prev);
            if (prev_count >= 0) std::cout << "per-layer delta " << count - prev_count << "\n";
        }
        return 0;
    }

    if (stats_cmd->parsed()) {
        stats_data.seed = seed;
        CorpusHandle corpus;
        open_corpus(stats_data, corpus);
        OwnedString stats;
        require_ok(tdgat_corpus_stats_json(corpus.p, &stats.s), "computing stats");
        const json j = json::parse(stats.s);
        std::cout << std::left << std::setw(8) << "split" << std::right << std::setw(10) << "positive"
                  << std::setw(9) << "neutral" << std::setw(10) << "negative" << std::setw(8) << "total"
                  << "\n";
        for (const char* split : {"train", "dev", "test"}) {
            const auto& row = j["splits"][split];
            if (row["total"] == 0) continue;
            std::cout << std::left << std::setw(8) << split << std::right << std::setw(10)
                      << row["positive"].get<long>() << std::setw(9) << row["neutral"].get<long>()
                      << std::setw(10) << row["negative"].get<long>() << std::setw(8)
                      << row["total"].get<long>() << "\n";
        }
        std::cout << "total " << j["total"].get<long>() << "\n";
        if (!stats_json_out.empty()) write_text_file(stats_json_out, j.dump() + "\n", "stats");
        return 0;
    }

    if (grad_cmd->parsed()) {
        const tdgat_model_config mc = build_model_config(grad_flags, grad_flags.embed_dim);
        double max_err = 0.0;
        OwnedString report;
        require_ok(tdgat_gradcheck(&mc, grad_nodes, grad_lambda, seed, grad_step, &max_err, &report.s),
                   "gradient check");
        const json j = json::parse(report.s);
        std::cout << "components " << j["components_checked"].get<long long>() << "\n"
                  << "max relative error " << std::scientific << std::setprecision(3) << max_err << "\n";
        std::cout.unsetf(std::ios::scientific);
        if (max_err >= grad_tol) {
            std::cerr << "tdgat: gradient check failed: " << max_err << " >= " << grad_tol << "\n";
            return kExitNumeric;
        }
        std::cout << "within tolerance " << grad_tol << "\n";
        return 0;
    }

    if (synth_cmd->parsed()) {
        CorpusHandle corpus;
        require_ok(tdgat_corpus_synth(synth_size, seed, &corpus.p), "generating corpus");
        require_ok(tdgat_corpus_save_jsonl(corpus.p, synth_out.c_str()), "writing " + synth_out);
        EmbeddingsHandle emb;
        require_ok(tdgat_embeddings_synth(synth_dim, seed, &emb.p), "generating embeddings");
        require_ok(tdgat_embeddings_save(emb.p, synth_emb_out.c_str()), "writing " + synth_emb_out);
        std::cout << "wrote " << synth_out << " (" << tdgat_corpus_size(corpus.p) << " examples) and "
                  << synth_emb_out << "\n";
        return 0;
    }

    return kExitUsage;
}
