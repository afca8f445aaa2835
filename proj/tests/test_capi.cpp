#include "tdgat/tdgat.h"

#include <doctest.h>
#include <json.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

struct OwnedString {
    char* s = nullptr;
    ~OwnedString() { tdgat_string_free(s); }
};

} // namespace

TEST_CASE("version and config defaults") {
    CHECK(tdgat_version() != nullptr);

    tdgat_model_config mc;
    tdgat_model_config_init(&mc);
    CHECK(mc.hidden_dim == 300);
    CHECK(mc.heads == 6);
    CHECK(mc.layers == 3);
    CHECK(mc.classes == 3);
    CHECK(mc.self_loop == 1);
    CHECK(mc.variant == TDGAT_VARIANT_TDGAT);

    tdgat_train_config tc;
    tdgat_train_config_init(&tc);
    CHECK(tc.batch_size == 32);
    CHECK(tc.lambda_l2 == 1e-4);
    CHECK(tc.dropout_rate == 0.7);
    CHECK(tc.adam_lr == 1e-3);
    CHECK(tc.sgd_lr == 1e-4);
    CHECK(tc.switch_patience == 5);
}

TEST_CASE("corpus lifecycle through the C API") {
    tdgat_corpus* corpus = nullptr;
    REQUIRE(tdgat_corpus_synth(30, 5, &corpus) == TDGAT_OK);
    CHECK(tdgat_corpus_size(corpus) == 30);

    CHECK(tdgat_corpus_split_dev(corpus, 6, 1, nullptr) == TDGAT_OK);
    OwnedString stats;
    REQUIRE(tdgat_corpus_stats_json(corpus, &stats.s) == TDGAT_OK);
    json j = json::parse(stats.s);
    CHECK(j["total"] == 30);
    CHECK(j["splits"]["dev"]["total"] == 6);
    CHECK(j["splits"]["train"]["total"] == 24);

    const auto path = temp_path("tdgat_capi_corpus.jsonl");
    REQUIRE(tdgat_corpus_save_jsonl(corpus, path.string().c_str()) == TDGAT_OK);

    tdgat_corpus* reloaded = nullptr;
    REQUIRE(tdgat_corpus_open_jsonl(path.string().c_str(), &reloaded) == TDGAT_OK);
    CHECK(tdgat_corpus_size(reloaded) == 30);

    // merge re-tags
    tdgat_corpus* extra = nullptr;
    REQUIRE(tdgat_corpus_synth(6, 8, &extra) == TDGAT_OK);
    REQUIRE(tdgat_corpus_merge(reloaded, extra, TDGAT_SPLIT_TEST) == TDGAT_OK);
    CHECK(tdgat_corpus_size(reloaded) == 36);
    OwnedString stats2;
    REQUIRE(tdgat_corpus_stats_json(reloaded, &stats2.s) == TDGAT_OK);
    CHECK(json::parse(stats2.s)["splits"]["test"]["total"] == 6);

    tdgat_corpus_free(corpus);
    tdgat_corpus_free(reloaded);
    tdgat_corpus_free(extra);
    std::filesystem::remove(path);
}

TEST_CASE("error reporting carries a message and a typed status") {
    tdgat_corpus* corpus = nullptr;
    CHECK(tdgat_corpus_open_jsonl("/nonexistent/path.jsonl", &corpus) == TDGAT_ERR_IO);
    CHECK(std::strlen(tdgat_last_error()) > 0);
    CHECK(tdgat_corpus_open_jsonl(nullptr, &corpus) == TDGAT_ERR_INVALID_ARGUMENT);

    const auto bad = temp_path("tdgat_capi_bad.jsonl");
    {
        std::ofstream out(bad);
        out << "{\"tokens\":[\"a\"],\"heads\":[-1]}\n";
    }
    CHECK(tdgat_corpus_open_jsonl(bad.string().c_str(), &corpus) == TDGAT_ERR_PARSE);
    CHECK(std::string(tdgat_last_error()).find("aspect_span") != std::string::npos);
    std::filesystem::remove(bad);

    tdgat_model_config mc;
    tdgat_model_config_init(&mc);
    mc.hidden_dim = 10;
    mc.heads = 3;
    tdgat_model* model = nullptr;
    CHECK(tdgat_model_create(&mc, 1, &model) == TDGAT_ERR_INVALID_ARGUMENT);
    CHECK(tdgat_param_count(&mc) == -1);
}

TEST_CASE("model round trip and parameter counting") {
    tdgat_model_config mc;
    tdgat_model_config_init(&mc);
    mc.hidden_dim = 12;
    mc.heads = 3;
    mc.layers = 2;
    mc.embed_dim = 8;

    CHECK(tdgat_param_count(&mc) == 108 + 2 * 168 + 1200 + 39);
    mc.layers = 3;
    const long long l3 = tdgat_param_count(&mc);
    mc.layers = 4;
    CHECK(tdgat_param_count(&mc) - l3 == 168);

    // published per-layer delta at paper scale
    tdgat_model_config big;
    tdgat_model_config_init(&big);
    big.layers = 3;
    const long long big3 = tdgat_param_count(&big);
    big.layers = 4;
    CHECK(tdgat_param_count(&big) - big3 == 90600);

    mc.layers = 2;
    tdgat_model* model = nullptr;
    REQUIRE(tdgat_model_create(&mc, 99, &model) == TDGAT_OK);
    const auto path = temp_path("tdgat_capi_model.json");
    REQUIRE(tdgat_model_save(model, path.string().c_str()) == TDGAT_OK);

    tdgat_model* loaded = nullptr;
    REQUIRE(tdgat_model_open(path.string().c_str(), &loaded) == TDGAT_OK);
    tdgat_model_config out;
    REQUIRE(tdgat_model_config_of(loaded, &out) == TDGAT_OK);
    CHECK(out.hidden_dim == 12);
    CHECK(out.embed_dim == 8);

    tdgat_model_free(model);
    tdgat_model_free(loaded);
    std::filesystem::remove(path);
}

TEST_CASE("train, evaluate and predict through the C API") {
    tdgat_corpus* corpus = nullptr;
    REQUIRE(tdgat_corpus_synth(24, 3, &corpus) == TDGAT_OK);
    REQUIRE(tdgat_corpus_split_dev(corpus, 6, 3, nullptr) == TDGAT_OK);

    tdgat_embeddings* emb = nullptr;
    REQUIRE(tdgat_embeddings_synth(8, 3, &emb) == TDGAT_OK);
    CHECK(tdgat_embeddings_dim(emb) == 8);

    tdgat_model_config mc;
    tdgat_model_config_init(&mc);
    mc.hidden_dim = 12;
    mc.heads = 3;
    mc.layers = 2;
    mc.embed_dim = 8;
    tdgat_model* model = nullptr;
    REQUIRE(tdgat_model_create(&mc, 5, &model) == TDGAT_OK);

    tdgat_train_config tc;
    tdgat_train_config_init(&tc);
    tc.batch_size = 4;
    tc.dropout_rate = 0.0;
    tc.max_epochs = 5;
    tc.seed = 5;
    OwnedString log;
    REQUIRE(tdgat_train(model, corpus, emb, &tc, &log.s) == TDGAT_OK);
    int epochs = 0;
    {
        std::istringstream is{std::string(log.s)};
        std::string line;
        while (std::getline(is, line))
            if (!line.empty()) {
                json j = json::parse(line);
                CHECK(j.contains("train_loss"));
                ++epochs;
            }
    }
    CHECK(epochs == 5);

    double acc = -1.0;
    REQUIRE(tdgat_evaluate(model, corpus, TDGAT_SPLIT_DEV, emb, &acc) == TDGAT_OK);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    double acc_all = -1.0;
    REQUIRE(tdgat_evaluate(model, corpus, TDGAT_SPLIT_ALL, emb, &acc_all) == TDGAT_OK);

    // predict over a small unlabeled file
    const auto in_path = temp_path("tdgat_capi_pred_in.jsonl");
    const auto out_path = temp_path("tdgat_capi_pred_out.jsonl");
    {
        std::ofstream out(in_path);
        out << R"({"tokens":["coffee","stellar"],"heads":[-1,0],"aspect_span":[0,1]})" << "\n";
        out << R"({"tokens":["pasta","was","dreadful"],"heads":[-1,0,1],"aspect_span":[0,1],"polarity":"negative"})"
            << "\n";
    }
    REQUIRE(tdgat_predict_file(model, emb, in_path.string().c_str(), out_path.string().c_str()) ==
            TDGAT_OK);
    {
        std::ifstream in(out_path);
        std::string line;
        REQUIRE(std::getline(in, line));
        json j = json::parse(line);
        CHECK(j.contains("predicted"));
        CHECK(j["probs"].size() == 3);
        CHECK_FALSE(j.contains("gold"));
        REQUIRE(std::getline(in, line));
        j = json::parse(line);
        CHECK(j["gold"] == "negative");
    }

    tdgat_model_free(model);
    tdgat_embeddings_free(emb);
    tdgat_corpus_free(corpus);
    std::filesystem::remove(in_path);
    std::filesystem::remove(out_path);
}

TEST_CASE("embeddings io through the C API") {
    tdgat_embeddings* emb = nullptr;
    REQUIRE(tdgat_embeddings_synth(6, 11, &emb) == TDGAT_OK);
    const auto path = temp_path("tdgat_capi_emb.txt");
    REQUIRE(tdgat_embeddings_save(emb, path.string().c_str()) == TDGAT_OK);

    tdgat_embeddings* loaded = nullptr;
    REQUIRE(tdgat_embeddings_open(path.string().c_str(), 6, &loaded) == TDGAT_OK);
    CHECK(tdgat_embeddings_dim(loaded) == 6);
    tdgat_embeddings* wrong_dim = nullptr;
    CHECK(tdgat_embeddings_open(path.string().c_str(), 300, &wrong_dim) == TDGAT_ERR_PARSE);

    tdgat_embeddings_free(emb);
    tdgat_embeddings_free(loaded);
    std::filesystem::remove(path);
}

TEST_CASE("ablate and gradcheck through the C API") {
    tdgat_corpus* corpus = nullptr;
    REQUIRE(tdgat_corpus_synth(18, 9, &corpus) == TDGAT_OK);
    REQUIRE(tdgat_corpus_split_dev(corpus, 6, 9, nullptr) == TDGAT_OK);
    tdgat_embeddings* emb = nullptr;
    REQUIRE(tdgat_embeddings_synth(8, 9, &emb) == TDGAT_OK);

    tdgat_model_config mc;
    tdgat_model_config_init(&mc);
    mc.hidden_dim = 12;
    mc.heads = 3;
    mc.layers = 1;
    mc.embed_dim = 8;
    tdgat_train_config tc;
    tdgat_train_config_init(&tc);
    tc.batch_size = 6;
    tc.dropout_rate = 0.0;
    tc.max_epochs = 2;
    tc.seed = 9;

    OwnedString report;
    REQUIRE(tdgat_ablate(&mc, corpus, emb, &tc, nullptr, 0, &report.s) == TDGAT_OK);
    json j = json::parse(report.s);
    CHECK(j["depths"] == json::array({1}));
    REQUIRE(j["arms"].size() == 2);
    CHECK(j["arms"][0]["variant"] == "GAT");
    CHECK(j["arms"][1]["variant"] == "TDGAT");

    double max_err = 1.0;
    OwnedString gc;
    tdgat_model_config gc_config = mc;
    gc_config.layers = 2;
    REQUIRE(tdgat_gradcheck(&gc_config, 6, 1e-4, 7, 1e-5, &max_err, &gc.s) == TDGAT_OK);
    CHECK(max_err < 1e-4);
    CHECK(json::parse(gc.s)["components_checked"].get<long long>() > 0);

    tdgat_corpus_free(corpus);
    tdgat_embeddings_free(emb);
}
