// Command-line front end. Everything goes through the public C API so the
// binary exercises the same surface as any other embedder.
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "chainsift.h"

namespace {

int fail(sift_status status) {
    std::fprintf(stderr, "chainsift: %s\n", sift_last_error());
    return static_cast<int>(status);
}

#define CHECK(call)                                    \
    do {                                               \
        sift_status status_ = (call);                  \
        if (status_ != SIFT_OK) return fail(status_);  \
    } while (0)

struct CorpusDeleter {
    void operator()(sift_corpus* p) const { sift_corpus_free(p); }
};
struct SchemaDeleter {
    void operator()(sift_schema* p) const { sift_schema_free(p); }
};
struct FeaturesDeleter {
    void operator()(sift_features* p) const { sift_features_free(p); }
};
struct ReportDeleter {
    void operator()(sift_report* p) const { sift_report_free(p); }
};

using CorpusPtr = std::unique_ptr<sift_corpus, CorpusDeleter>;
using SchemaPtr = std::unique_ptr<sift_schema, SchemaDeleter>;
using FeaturesPtr = std::unique_ptr<sift_features, FeaturesDeleter>;
using ReportPtr = std::unique_ptr<sift_report, ReportDeleter>;

struct SynthArgs {
    uint64_t seed = 42;
    int64_t good = 0;
    int64_t malicious = 0;
    std::string out;
    std::string labels;
    bool no_fraud_profile = false;
};

int run_synth(const SynthArgs& args) {
    sift_corpus* raw = nullptr;
    CHECK(sift_synth_corpus(args.seed, args.good, args.malicious,
                            args.no_fraud_profile ? 0 : 1, &raw));
    CorpusPtr corpus(raw);
    CHECK(sift_corpus_save_events(corpus.get(), args.out.c_str()));
    CHECK(sift_corpus_save_labels(corpus.get(), args.labels.c_str()));
    std::printf("wrote %lld events to %s\n",
                static_cast<long long>(sift_corpus_event_count(corpus.get())),
                args.out.c_str());
    return 0;
}

struct FeaturizeArgs {
    std::string events;
    std::string schema_in;
    std::string schema_out;
    std::string out;
    std::string corr_out;
    std::string dist_out;
    bool skip_unknown = false;
};

int run_featurize(const FeaturizeArgs& args) {
    sift_corpus* raw_corpus = nullptr;
    CHECK(sift_corpus_load(args.events.c_str(), args.skip_unknown ? 1 : 0, &raw_corpus));
    CorpusPtr corpus(raw_corpus);
    if (args.skip_unknown) {
        int64_t skipped = sift_corpus_skipped_count(corpus.get());
        if (skipped > 0) {
            std::fprintf(stderr, "chainsift: skipped %lld unknown records\n",
                         static_cast<long long>(skipped));
        }
    }

    sift_schema* raw_schema = nullptr;
    if (!args.schema_in.empty()) {
        CHECK(sift_schema_load(args.schema_in.c_str(), &raw_schema));
    } else {
        CHECK(sift_schema_derive(corpus.get(), &raw_schema));
    }
    SchemaPtr schema(raw_schema);
    if (!args.schema_out.empty()) {
        CHECK(sift_schema_save(schema.get(), args.schema_out.c_str()));
    }

    sift_features* raw_features = nullptr;
    CHECK(sift_features_extract(corpus.get(), schema.get(), &raw_features));
    FeaturesPtr features(raw_features);
    CHECK(sift_features_save(features.get(), args.out.c_str()));
    if (!args.corr_out.empty()) {
        CHECK(sift_features_save_correlation(features.get(), args.corr_out.c_str()));
    }
    if (!args.dist_out.empty()) {
        CHECK(sift_features_save_distribution(features.get(), args.dist_out.c_str()));
    }
    std::printf("featurized %lld addresses -> %s\n",
                static_cast<long long>(sift_features_row_count(features.get())),
                args.out.c_str());
    return 0;
}

struct EvalArgs {
    std::string features;
    std::string labels;
    std::string model = "gbt";
    int folds = 5;
    uint64_t seed = 42;
    int smote_k = 5;
    double smote_ratio = 1.0;
    std::string normalize = "auto";
    uint64_t good_sample = 10000;
    bool transactional_only = false;
    bool record_runtime = false;
    std::string model_out;
    std::string report;
};

int run_eval(const EvalArgs& args) {
    sift_eval_options options;
    sift_eval_options_init(&options);
    options.model = args.model.c_str();
    options.folds = args.folds;
    options.seed = args.seed;
    options.smote_k = args.smote_k;
    options.smote_ratio = args.smote_ratio;
    options.normalize = args.normalize.c_str();
    options.good_sample = args.good_sample;
    options.transactional_only = args.transactional_only ? 1 : 0;
    options.record_runtime = args.record_runtime ? 1 : 0;
    options.model_out = args.model_out.empty() ? nullptr : args.model_out.c_str();

    sift_report* raw = nullptr;
    CHECK(sift_eval(args.features.c_str(), args.labels.c_str(), &options, &raw));
    ReportPtr report(raw);
    CHECK(sift_report_save(report.get(), args.report.c_str()));

    double f1_malicious = 0.0;
    CHECK(sift_report_average(report.get(), "malicious", "f1", &f1_malicious));
    std::printf("report written to %s (avg malicious F1 %.4f)\n", args.report.c_str(),
                f1_malicious);
    return 0;
}

int run_importance(const std::string& artifact, const std::string& out) {
    CHECK(sift_importance_export(artifact.c_str(), out.c_str()));
    std::printf("importance written to %s\n", out.c_str());
    return 0;
}

int run_report(const std::string& in, const std::string& plots_out) {
    sift_report* raw = nullptr;
    CHECK(sift_report_load(in.c_str(), &raw));
    ReportPtr report(raw);
    CHECK(sift_report_write_plots(report.get(), plots_out.c_str()));
    std::printf("plot tables written to %s\n", plots_out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chainsift: fraud detection over decoded DeFi event logs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sift_version()));

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a labeled synthetic corpus");
    synth_cmd->add_option("--seed", synth.seed, "rng seed")->capture_default_str();
    synth_cmd->add_option("--good", synth.good, "benign address count")->required();
    synth_cmd->add_option("--malicious", synth.malicious, "malicious address count")->required();
    synth_cmd->add_option("--out", synth.out, "event log output path")->required();
    synth_cmd->add_option("--labels", synth.labels, "label registry output path")->required();
    synth_cmd->add_flag("--no-fraud-profile", synth.no_fraud_profile,
                        "draw both classes from the benign behavior model");

    FeaturizeArgs feat;
    auto* feat_cmd = app.add_subcommand("featurize", "extract per-address features");
    feat_cmd->add_option("--events", feat.events, "event log input path")->required();
    feat_cmd->add_option("--schema", feat.schema_in, "use an existing schema file");
    feat_cmd->add_option("--schema-out", feat.schema_out, "write the schema used");
    feat_cmd->add_option("--out", feat.out, "feature matrix output path")->required();
    feat_cmd->add_option("--corr-out", feat.corr_out, "feature correlation matrix CSV");
    feat_cmd->add_option("--dist-out", feat.dist_out, "per-feature distribution summary CSV");
    feat_cmd->add_flag("--skip-unknown", feat.skip_unknown,
                       "drop records with unknown chain/protocol/event type");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "cross-validated model evaluation");
    eval_cmd->add_option("--features", eval.features, "feature matrix CSV")->required();
    eval_cmd->add_option("--labels", eval.labels, "label registry CSV")->required();
    eval_cmd->add_option("--model", eval.model, "logreg|rf|gbt|svm|mlp")->capture_default_str();
    eval_cmd->add_option("--folds", eval.folds, "cross-validation folds")->capture_default_str();
    eval_cmd->add_option("--seed", eval.seed, "rng seed")->capture_default_str();
    eval_cmd->add_option("--smote-k", eval.smote_k, "SMOTE nearest neighbors")
        ->capture_default_str();
    eval_cmd->add_option("--smote-ratio", eval.smote_ratio, "target minority/majority ratio")
        ->capture_default_str();
    eval_cmd->add_option("--normalize", eval.normalize, "auto|on|off")->capture_default_str();
    eval_cmd->add_option("--good-sample", eval.good_sample, "cap on sampled benign rows")
        ->capture_default_str();
    eval_cmd->add_flag("--transactional-only", eval.transactional_only,
                       "restrict to the 8 transactional features");
    eval_cmd->add_flag("--record-runtime", eval.record_runtime,
                       "embed wall-clock runtime in the report");
    eval_cmd->add_option("--model-out", eval.model_out,
                         "also fit on all rows and save a model artifact");
    eval_cmd->add_option("--report", eval.report, "report output path")->required();

    std::string imp_artifact;
    std::string imp_out;
    auto* imp_cmd = app.add_subcommand("importance", "export feature importances");
    imp_cmd->add_option("--model-artifact", imp_artifact, "model artifact path")->required();
    imp_cmd->add_option("--out", imp_out, "importance CSV output path")->required();

    std::string rep_in;
    std::string rep_plots;
    auto* rep_cmd = app.add_subcommand("report", "export plot-ready tables from a report");
    rep_cmd->add_option("--in", rep_in, "report path")->required();
    rep_cmd->add_option("--plots-out", rep_plots, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad usage is an input error
    }

    if (synth_cmd->parsed()) return run_synth(synth);
    if (feat_cmd->parsed()) return run_featurize(feat);
    if (eval_cmd->parsed()) return run_eval(eval);
    if (imp_cmd->parsed()) return run_importance(imp_artifact, imp_out);
    if (rep_cmd->parsed()) return run_report(rep_in, rep_plots);
    return 2;
}
