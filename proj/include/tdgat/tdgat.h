#ifndef TDGAT_H
#define TDGAT_H

/*
 * C API for the target-dependent graph attention sentiment classifier.
 *
 * All objects are opaque handles created and destroyed through this
 * interface. Functions return TDGAT_OK on success; on failure they
 * return an error code and tdgat_last_error() describes the problem
 * (the message is thread-local and valid until the next failing call
 * on the same thread).
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tdgat_status {
    TDGAT_OK = 0,
    TDGAT_ERR_INVALID_ARGUMENT = 1,
    TDGAT_ERR_IO = 2,
    TDGAT_ERR_PARSE = 3,
    TDGAT_ERR_NUMERIC = 4,
    TDGAT_ERR_INTERNAL = 5
} tdgat_status;

typedef enum tdgat_split {
    TDGAT_SPLIT_ALL = -1,
    TDGAT_SPLIT_TRAIN = 0,
    TDGAT_SPLIT_DEV = 1,
    TDGAT_SPLIT_TEST = 2
} tdgat_split;

typedef enum tdgat_variant { TDGAT_VARIANT_TDGAT = 0, TDGAT_VARIANT_GAT = 1 } tdgat_variant;

typedef struct tdgat_corpus tdgat_corpus;
typedef struct tdgat_embeddings tdgat_embeddings;
typedef struct tdgat_model tdgat_model;

typedef struct tdgat_model_config {
    int hidden_dim;       /* D, divisible by heads */
    int heads;            /* K */
    int layers;           /* L */
    int embed_dim;        /* input word vector dimension */
    int classes;          /* 3: positive, neutral, negative */
    double leaky_slope;   /* attention nonlinearity slope */
    int self_loop;        /* include each node in its own neighborhood */
    int variant;          /* tdgat_variant */
    int lstm_target_only; /* restrict the cross-layer LSTM to the target row */
} tdgat_model_config;

typedef struct tdgat_train_config {
    int batch_size;
    double lambda_l2;
    double dropout_rate;
    double adam_lr;
    double adam_beta1;
    double adam_beta2;
    double adam_eps;
    double sgd_lr;
    int switch_patience; /* epochs without improvement before SGD */
    int switch_epoch;    /* fixed switch point, -1 = patience-driven */
    int max_epochs;
    unsigned long long seed;
    int final_mode; /* select by best train loss instead of dev accuracy */
} tdgat_train_config;

const char* tdgat_version(void);
const char* tdgat_last_error(void);
void tdgat_string_free(char* s);

void tdgat_model_config_init(tdgat_model_config* config);
void tdgat_train_config_init(tdgat_train_config* config);

/* ---- corpus ---- */

tdgat_status tdgat_corpus_open_jsonl(const char* path, tdgat_corpus** out);
/* CoNLL-U sentences completed by an aligned aspects sidecar (JSONL with
 * aspect_span and polarity per sentence). */
tdgat_status tdgat_corpus_open_conllu(const char* conllu_path, const char* aspects_jsonl_path,
                                      tdgat_corpus** out);
tdgat_status tdgat_corpus_synth(int size, unsigned long long seed, tdgat_corpus** out);
int tdgat_corpus_size(const tdgat_corpus* corpus);
/* Tags dev_size examples as dev (seeded sample, or the sidecar file's
 * indices when sidecar_path is non-NULL). */
tdgat_status tdgat_corpus_split_dev(tdgat_corpus* corpus, int dev_size, unsigned long long seed,
                                    const char* sidecar_path);
/* Appends src's examples to dst, re-tagged as tag_as (TDGAT_SPLIT_ALL
 * keeps src's own tags). */
tdgat_status tdgat_corpus_merge(tdgat_corpus* dst, const tdgat_corpus* src, tdgat_split tag_as);
/* Per-split, per-polarity counts as a JSON string (caller frees). */
tdgat_status tdgat_corpus_stats_json(const tdgat_corpus* corpus, char** json_out);
tdgat_status tdgat_corpus_save_jsonl(const tdgat_corpus* corpus, const char* path);
void tdgat_corpus_free(tdgat_corpus* corpus);

/* ---- embeddings ---- */

/* expected_dim 0 infers the dimension; gzip input is detected by magic
 * bytes. */
tdgat_status tdgat_embeddings_open(const char* path, int expected_dim, tdgat_embeddings** out);
tdgat_status tdgat_embeddings_synth(int dim, unsigned long long seed, tdgat_embeddings** out);
tdgat_status tdgat_embeddings_save(const tdgat_embeddings* embeddings, const char* path);
int tdgat_embeddings_dim(const tdgat_embeddings* embeddings);
void tdgat_embeddings_free(tdgat_embeddings* embeddings);

/* ---- model ---- */

tdgat_status tdgat_model_create(const tdgat_model_config* config, unsigned long long seed,
                                tdgat_model** out);
tdgat_status tdgat_model_open(const char* path, tdgat_model** out);
tdgat_status tdgat_model_save(const tdgat_model* model, const char* path);
tdgat_status tdgat_model_config_of(const tdgat_model* model, tdgat_model_config* out);
long long tdgat_param_count(const tdgat_model_config* config);
void tdgat_model_free(tdgat_model* model);

/* ---- training and inference ---- */

/* Trains on the corpus's train split against its dev split and stores
 * the selected parameters in the model handle. log_jsonl_out (optional)
 * receives one JSON object per epoch, caller frees. */
tdgat_status tdgat_train(tdgat_model* model, const tdgat_corpus* corpus,
                         const tdgat_embeddings* embeddings, const tdgat_train_config* config,
                         char** log_jsonl_out);

tdgat_status tdgat_evaluate(const tdgat_model* model, const tdgat_corpus* corpus, tdgat_split split,
                            const tdgat_embeddings* embeddings, double* accuracy_out);

/* JSONL records in (polarity optional), one JSON object per line out
 * with the predicted class and class probabilities. */
tdgat_status tdgat_predict_file(const tdgat_model* model, const tdgat_embeddings* embeddings,
                                const char* jsonl_in, const char* jsonl_out);

/* Trains GAT and TD-GAT arms under identical seeds/configs for each
 * depth (depths==NULL uses config->layers) and reports eval-split
 * accuracy as JSON (caller frees). */
tdgat_status tdgat_ablate(const tdgat_model_config* config, const tdgat_corpus* corpus,
                          const tdgat_embeddings* embeddings, const tdgat_train_config* train_config,
                          const int* depths, int depth_count, char** report_json_out);

/* Full-model finite-difference check on a random graph with the given
 * node count. Reports the maximum relative error over all parameter
 * components; report_json_out (optional) carries the details. */
tdgat_status tdgat_gradcheck(const tdgat_model_config* config, int graph_nodes, double lambda,
                             unsigned long long seed, double step, double* max_rel_err_out,
                             char** report_json_out);

#ifdef __cplusplus
}
#endif

#endif /* TDGAT_H */
