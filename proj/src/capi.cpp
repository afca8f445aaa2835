// extern "C" bindings over the core. Exceptions are caught at this
// boundary and mapped to status codes plus a thread-local message.

#include "tdgat/tdgat.h"

#include "datasets.hpp"
#include "embeddings.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "training.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

using nlohmann::json;

struct tdgat_corpus {
    tdgat::Corpus corpus;
};

struct tdgat_embeddings {
    tdgat::EmbeddingTable table;
};

struct tdgat_model {
    tdgat::ModelParams params;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
tdgat_status guarded(Fn&& fn) {
    try {
        fn();
        return TDGAT_OK;
    } catch (const tdgat::ParseError& e) {
        g_last_error = e.what();
        return TDGAT_ERR_PARSE;
    } catch (const tdgat::IoError& e) {
        g_last_error = e.what();
        return TDGAT_ERR_IO;
    } catch (const tdgat::NumericError& e) {
        g_last_error = e.what();
        return TDGAT_ERR_NUMERIC;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return TDGAT_ERR_INVALID_ARGUMENT;
    } catch (const std::out_of_range& e) {
        g_last_error = e.what();
        return TDGAT_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TDGAT_ERR_INTERNAL;
    }
}

tdgat_status fail_invalid(const char* message) {
    g_last_error = message;
    return TDGAT_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

tdgat::ModelConfig to_core(const tdgat_model_config& c) {
    tdgat::ModelConfig mc;
    mc.hidden_dim = c.hidden_dim;
    mc.heads = c.heads;
    mc.layers = c.layers;
    mc.embed_dim = c.embed_dim;
    mc.classes = c.classes;
    mc.leaky_slope = c.leaky_slope;
    mc.self_loop = c.self_loop != 0;
    mc.variant = c.variant == TDGAT_VARIANT_GAT ? tdgat::Variant::GAT : tdgat::Variant::TDGAT;
    mc.lstm_scope = c.lstm_target_only ? tdgat::LstmScope::target_only : tdgat::LstmScope::all_nodes;
    return mc;
}

tdgat_model_config from_core(const tdgat::ModelConfig& mc) {
    tdgat_model_config c;
    c.hidden_dim = mc.hidden_dim;
    c.heads = mc.heads;
    c.layers = mc.layers;
    c.embed_dim = mc.embed_dim;
    c.classes = mc.classes;
    c.leaky_slope = mc.leaky_slope;
    c.self_loop = mc.self_loop ? 1 : 0;
    c.variant = mc.variant == tdgat::Variant::GAT ? TDGAT_VARIANT_GAT : TDGAT_VARIANT_TDGAT;
    c.lstm_target_only = mc.lstm_scope == tdgat::LstmScope::target_only ? 1 : 0;
    return c;
}

tdgat::TrainConfig to_core(const tdgat_train_config& c) {
    tdgat::TrainConfig tc;
    tc.batch_size = c.batch_size;
    tc.lambda_l2 = c.lambda_l2;
    tc.dropout_rate = c.dropout_rate;
    tc.adam_lr = c.adam_lr;
    tc.adam_beta1 = c.adam_beta1;
    tc.adam_beta2 = c.adam_beta2;
    tc.adam_eps = c.adam_eps;
    tc.sgd_lr = c.sgd_lr;
    tc.switch_patience = c.switch_patience;
    tc.switch_epoch = c.switch_epoch;
    tc.max_epochs = c.max_epochs;
    tc.seed = c.seed;
    tc.final_mode = c.final_mode != 0;
    return tc;
}

} // namespace

extern "C" {

const char* tdgat_version(void) { return "1.0.0"; }

const char* tdgat_last_error(void) { return g_last_error.c_str(); }

void tdgat_string_free(char* s) { delete[] s; }

void tdgat_model_config_init(tdgat_model_config* config) {
    if (!config) return;
    *config = from_core(tdgat::ModelConfig{});
}

void tdgat_train_config_init(tdgat_train_config* config) {
    if (!config) return;
    tdgat::TrainConfig tc;
    config->batch_size = tc.batch_size;
    config->lambda_l2 = tc.lambda_l2;
    config->dropout_rate = tc.dropout_rate;
    config->adam_lr = tc.adam_lr;
    config->adam_beta1 = tc.adam_beta1;
    config->adam_beta2 = tc.adam_beta2;
    config->adam_eps = tc.adam_eps;
    config->sgd_lr = tc.sgd_lr;
    config->switch_patience = tc.switch_patience;
    config->switch_epoch = tc.switch_epoch;
    config->max_epochs = tc.max_epochs;
    config->seed = tc.seed;
    config->final_mode = tc.final_mode ? 1 : 0;
}

tdgat_status tdgat_corpus_open_jsonl(const char* path, tdgat_corpus** out) {
    if (!path || !out) return fail_invalid("corpus_open_jsonl: null argument");
    return guarded([&] {
        auto handle = std::make_unique<tdgat_corpus>();
        handle->corpus = tdgat::load_corpus_jsonl(path, path);
        *out = handle.release();
    });
}

tdgat_status tdgat_corpus_open_conllu(const char* conllu_path, const char* aspects_jsonl_path,
                                      tdgat_corpus** out) {
    if (!conllu_path || !aspects_jsonl_path || !out) return fail_invalid("corpus_open_conllu: null argument");
    return guarded([&] {
        auto handle = std::make_unique<tdgat_corpus>();
        handle->corpus = tdgat::load_corpus_conllu(conllu_path, aspects_jsonl_path, conllu_path);
        *out = handle.release();
    });
}

tdgat_status tdgat_corpus_synth(int size, unsigned long long seed, tdgat_corpus** out) {
    if (!out) return fail_invalid("corpus_synth: null argument");
    return guarded([&] {
        auto handle = std::make_unique<tdgat_corpus>();
        handle->corpus = tdgat::synth_corpus(size, tdgat::default_synth_vocab(), seed);
        *out = handle.release();
    });
}

int tdgat_corpus_size(const tdgat_corpus* corpus) {
    return corpus ? static_cast<int>(corpus->corpus.size()) : 0;
}

tdgat_status tdgat_corpus_split_dev(tdgat_corpus* corpus, int dev_size, unsigned long long seed,
                                    const char* sidecar_path) {
    if (!corpus) return fail_invalid("corpus_split_dev: null corpus");
    return guarded([&] {
        std::vector<size_t> dev_indices;
        if (sidecar_path) {
            std::ifstream in(sidecar_path);
            if (!in) throw tdgat::IoError(std::string("cannot open split sidecar: ") + sidecar_path);
            dev_indices = tdgat::load_split_sidecar(in);
        } else {
            dev_indices = tdgat::sample_dev_indices(corpus->corpus.size(), dev_size, seed);
        }
        std::vector<char> is_dev(corpus->corpus.size(), 0);
        for (size_t i : dev_indices) {
            if (i >= corpus->corpus.size())
                throw std::invalid_argument("dev split: index " + std::to_string(i) + " out of range");
            is_dev[i] = 1;
        }
        for (size_t i = 0; i < corpus->corpus.size(); ++i)
            corpus->corpus.examples[i].split = is_dev[i] ? tdgat::Split::dev : tdgat::Split::train;
    });
}

tdgat_status tdgat_corpus_merge(tdgat_corpus* dst, const tdgat_corpus* src, tdgat_split tag_as) {
    if (!dst || !src) return fail_invalid("corpus_merge: null argument");
    return guarded([&] {
        for (tdgat::Example e : src->corpus.examples) {
            if (tag_as != TDGAT_SPLIT_ALL) e.split = static_cast<tdgat::Split>(tag_as);
            dst->corpus.examples.push_back(std::move(e));
        }
    });
}

tdgat_status tdgat_corpus_stats_json(const tdgat_corpus* corpus, char** json_out) {
    if (!corpus || !json_out) return fail_invalid("corpus_stats_json: null argument");
    return guarded([&] {
        const tdgat::DatasetStats stats = tdgat::dataset_stats(corpus->corpus);
        json splits = json::object();
        for (int s = 0; s < 3; ++s) {
            long total = 0;
            json row = json::object();
            for (int p = 0; p < 3; ++p) {
                row[tdgat::to_string(static_cast<tdgat::Polarity>(p))] = stats.counts[s][p];
                total += stats.counts[s][p];
            }
            row["total"] = total;
            splits[tdgat::to_string(static_cast<tdgat::Split>(s))] = row;
        }
        json j{{"name", corpus->corpus.name}, {"splits", splits}, {"total", stats.total}};
        *json_out = copy_string(j.dump());
    });
}

tdgat_status tdgat_corpus_save_jsonl(const tdgat_corpus* corpus, const char* path) {
    if (!corpus || !path) return fail_invalid("corpus_save_jsonl: null argument");
    return guarded([&] {
        std::ofstream out(path);
        if (!out) throw tdgat::IoError(std::string("cannot write: ") + path);
        tdgat::save_corpus_jsonl(corpus->corpus, out);
        if (!out) throw tdgat::IoError(std::string("write failed: ") + path);
    });
}

void tdgat_corpus_free(tdgat_corpus* corpus) { delete corpus; }

tdgat_status tdgat_embeddings_open(const char* path, int expected_dim, tdgat_embeddings** out) {
    if (!path || !out) return fail_invalid("embeddings_open: null argument");
    return guarded([&] {
        auto handle = std::make_unique<tdgat_embeddings>();
        handle->table = tdgat::load_glove_file(path, expected_dim);
        *out = handle.release();
    });
}

tdgat_status tdgat_embeddings_synth(int dim, unsigned long long seed, tdgat_embeddings** out) {
    if (!out) return fail_invalid("embeddings_synth: null argument");
    return guarded([&] {
        auto handle = std::make_unique<tdgat_embeddings>();
        handle->table = tdgat::synth_embeddings(tdgat::default_synth_vocab(), dim, seed);
        *out = handle.release();
    });
}

tdgat_status tdgat_embeddings_save(const tdgat_embeddings* embeddings, const char* path) {
    if (!embeddings || !path) return fail_invalid("embeddings_save: null argument");
    return guarded([&] {
        std::ofstream out(path);
        if (!out) throw tdgat::IoError(std::string("cannot write: ") + path);
        tdgat::save_glove(embeddings->table, out);
        if (!out) throw tdgat::IoError(std::string("write failed: ") + path);
    });
}

int tdgat_embeddings_dim(const tdgat_embeddings* embeddings) {
    return embeddings ? embeddings->table.dim : 0;
}

void tdgat_embeddings_free(tdgat_embeddings* embeddings) { delete embeddings; }

tdgat_status tdgat_model_create(const tdgat_model_config* config, unsigned long long seed,
                                tdgat_model** out) {
    if (!config || !out) return fail_invalid("model_create: null argument");
    return guarded([&] {
        auto handle = std::make_unique<tdgat_model>();
        handle->params = tdgat::init_params(to_core(*config), seed);
        *out = handle.release();
    });
}

tdgat_status tdgat_model_open(const char* path, tdgat_model** out) {
    if (!path || !out) return fail_invalid("model_open: null argument");
    return guarded([&] {
        auto handle = std::make_unique<tdgat_model>();
        handle->params = tdgat::load_model(path);
        *out = handle.release();
    });
}

tdgat_status tdgat_model_save(const tdgat_model* model, const char* path) {
    if (!model || !path) return fail_invalid("model_save: null argument");
    return guarded([&] { tdgat::save_model(model->params, path); });
}

tdgat_status tdgat_model_config_of(const tdgat_model* model, tdgat_model_config* out) {
    if (!model || !out) return fail_invalid("model_config_of: null argument");
    *out = from_core(model->params.config);
    return TDGAT_OK;
}

long long tdgat_param_count(const tdgat_model_config* config) {
    if (!config) return -1;
    try {
        return tdgat::param_count(to_core(*config));
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return -1;
    }
}

void tdgat_model_free(tdgat_model* model) { delete model; }

tdgat_status tdgat_train(tdgat_model* model, const tdgat_corpus* corpus,
                         const tdgat_embeddings* embeddings, const tdgat_train_config* config,
                         char** log_jsonl_out) {
    if (!model || !corpus || !embeddings || !config) return fail_invalid("train: null argument");
    return guarded([&] {
        const tdgat::Corpus train_set = corpus->corpus.subset(tdgat::Split::train);
        const tdgat::Corpus dev_set = corpus->corpus.subset(tdgat::Split::dev);
        tdgat::TrainResult result =
            tdgat::train(model->params.config, train_set, dev_set, embeddings->table, to_core(*config));
        model->params = std::move(result.params);
        if (log_jsonl_out) {
            std::ostringstream os;
            result.log.write_jsonl(os);
            *log_jsonl_out = copy_string(os.str());
        }
    });
}

tdgat_status tdgat_evaluate(const tdgat_model* model, const tdgat_corpus* corpus, tdgat_split split,
                            const tdgat_embeddings* embeddings, double* accuracy_out) {
    if (!model || !corpus || !embeddings || !accuracy_out) return fail_invalid("evaluate: null argument");
    return guarded([&] {
        const tdgat::Corpus subset = split == TDGAT_SPLIT_ALL
                                         ? corpus->corpus
                                         : corpus->corpus.subset(static_cast<tdgat::Split>(split));
        *accuracy_out = tdgat::evaluate(model->params, subset, embeddings->table);
    });
}

tdgat_status tdgat_predict_file(const tdgat_model* model, const tdgat_embeddings* embeddings,
                                const char* jsonl_in, const char* jsonl_out) {
    if (!model || !embeddings || !jsonl_in) return fail_invalid("predict_file: null argument");
    return guarded([&] {
        std::ifstream in(jsonl_in);
        if (!in) throw tdgat::IoError(std::string("cannot open input: ") + jsonl_in);
        std::vector<tdgat::ParsedSentence> sentences;
        try {
            sentences = tdgat::load_jsonl(in);
        } catch (const tdgat::ParseError& e) {
            throw tdgat::ParseError(std::string(jsonl_in) + ": " + e.what());
        }

        std::ofstream file_out;
        const bool to_stdout = !jsonl_out || std::strcmp(jsonl_out, "-") == 0;
        if (!to_stdout) {
            file_out.open(jsonl_out);
            if (!file_out) throw tdgat::IoError(std::string("cannot write output: ") + jsonl_out);
        }
        std::ostream& out = to_stdout ? std::cout : file_out;

        for (size_t i = 0; i < sentences.size(); ++i) {
            const tdgat::DepGraph graph = tdgat::build_graph(sentences[i]);
            const tdgat::Prediction p = tdgat::predict(model->params, graph, embeddings->table);
            json probs = json::object();
            for (int c = 0; c < static_cast<int>(p.probs.size()); ++c)
                probs[tdgat::to_string(static_cast<tdgat::Polarity>(c))] = p.probs[c];
            json j{{"index", i},
                   {"predicted", tdgat::to_string(static_cast<tdgat::Polarity>(p.label))},
                   {"probs", probs}};
            if (sentences[i].polarity) j["gold"] = tdgat::to_string(*sentences[i].polarity);
            out << j.dump() << '\n';
        }
        if (!out) throw tdgat::IoError("write failed");
    });
}

tdgat_status tdgat_ablate(const tdgat_model_config* config, const tdgat_corpus* corpus,
                          const tdgat_embeddings* embeddings, const tdgat_train_config* train_config,
                          const int* depths, int depth_count, char** report_json_out) {
    if (!config || !corpus || !embeddings || !train_config || !report_json_out)
        return fail_invalid("ablate: null argument");
    if (depth_count > 0 && !depths) return fail_invalid("ablate: depth_count without depths");
    return guarded([&] {
        const tdgat::Corpus train_set = corpus->corpus.subset(tdgat::Split::train);
        const tdgat::Corpus dev_set = corpus->corpus.subset(tdgat::Split::dev);
        const tdgat::Corpus test_set = corpus->corpus.subset(tdgat::Split::test);
        // eval preference: test split, else dev, else the train split itself
        const tdgat::Corpus& eval_set =
            !test_set.examples.empty() ? test_set : (!dev_set.examples.empty() ? dev_set : train_set);

        std::vector<int> depth_list(depths, depths + std::max(0, depth_count));
        tdgat::AblationReport report = tdgat::ablate(to_core(*config), train_set, dev_set, eval_set,
                                                     embeddings->table, to_core(*train_config), depth_list);
        json arms = json::array();
        for (const tdgat::AblationArm& arm : report.arms)
            arms.push_back(json{{"variant", tdgat::to_string(arm.variant)},
                                {"layers", arm.layers},
                                {"accuracy", arm.accuracy}});
        json j{{"depths", report.depths}, {"arms", arms}};
        *report_json_out = copy_string(j.dump());
    });
}

tdgat_status tdgat_gradcheck(const tdgat_model_config* config, int graph_nodes, double lambda,
                             unsigned long long seed, double step, double* max_rel_err_out,
                             char** report_json_out) {
    if (!config || !max_rel_err_out) return fail_invalid("gradcheck: null argument");
    return guarded([&] {
        const tdgat::ad::GradCheckReport report =
            tdgat::model_grad_check(to_core(*config), graph_nodes, lambda, seed, step);
        *max_rel_err_out = report.max_rel_err;
        if (report_json_out) {
            json j{{"max_rel_err", report.max_rel_err},
                   {"components_checked", report.components_checked},
                   {"worst",
                    {{"param_index", report.worst.param_index},
                     {"component", report.worst.component},
                     {"analytic", report.worst.analytic},
                     {"numeric", report.worst.numeric},
                     {"rel_err", report.worst.rel_err}}}};
            *report_json_out = copy_string(j.dump());
        }
    });
}

} // extern "C"
