#include "cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "deeplcp/baselines.hpp"
#include "deeplcp/cleaning.hpp"
#include "deeplcp/metrics.hpp"
#include "deeplcp/nn.hpp"
#include "deeplcp/pipeline.hpp"
#include "deeplcp/records.hpp"
#include "deeplcp/rules.hpp"
#include "deeplcp/schema.hpp"
#include "deeplcp/semantic.hpp"
#include "deeplcp/synth.hpp"
#include "deeplcp/text_format.hpp"

namespace deeplcp::cli {

namespace {

namespace fs = std::filesystem;

constexpr std::string_view kEnvPrefix = "DEEPLCP_";

std::string env_name(std::string_view long_name) {
    std::string name(kEnvPrefix);
    for (char c : long_name) {
        name += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return name;
}

bool env_is_set(std::string_view long_name) {
    const char* v = std::getenv(env_name(long_name).c_str());
    return v != nullptr && *v != '\0';
}

void collect_paths(const CLI::App* app, std::vector<std::string>& prefix,
                   std::vector<std::pair<std::vector<std::string>, const CLI::App*>>& out) {
    out.emplace_back(prefix, app);
    for (const auto* sub : app->get_subcommands({})) {
        prefix.push_back(sub->get_name());
        collect_paths(sub, prefix, out);
        prefix.pop_back();
    }
}

// Settings file in the key/value block dialect. Top-level entries apply to
// every subcommand that has the option; a block "<command> [<sub>]" scopes its
// entries. Entries whose DEEPLCP_ variable is set are dropped so the
// environment outranks the file.
class BlockConfig : public CLI::Config {
public:
    explicit BlockConfig(const CLI::App* root) : root_(root) {}

    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        std::ostringstream os;
        for (const auto* opt : app->get_options()) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const auto& results = opt->results();
            if (!results.empty()) {
                os << opt->get_lnames().front() << ": " << CLI::detail::join(results, ",") << '\n';
            } else if (default_also && !opt->get_default_str().empty()) {
                os << opt->get_lnames().front() << ": " << opt->get_default_str() << '\n';
            }
        }
        return os.str();
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        std::stringstream buffer;
        buffer << input.rdbuf();
        KvDocument doc;
        try {
            doc = parse_kv_document(buffer.str(), "run-config");
        } catch (const deeplcp::ConfigError& e) {
            throw CLI::ConversionError(e.what());
        }

        std::vector<std::pair<std::vector<std::string>, const CLI::App*>> apps;
        std::vector<std::string> prefix;
        collect_paths(root_, prefix, apps);

        std::vector<CLI::ConfigItem> items;
        for (const auto& e : doc.top.entries) {
            if (env_is_set(e.key)) continue;
            bool placed = false;
            for (const auto& [path, app] : apps) {
                if (app->get_option_no_throw("--" + e.key) == nullptr) continue;
                items.push_back({path, e.key, {e.value}});
                placed = true;
            }
            if (!placed) items.push_back({{}, e.key, {e.value}});
        }
        for (const auto& block : doc.blocks) {
            std::vector<std::string> parents{block.kind};
            if (!block.name.empty()) parents.push_back(block.name);
            for (const auto& e : block.entries) {
                if (env_is_set(e.key)) continue;
                items.push_back({parents, e.key, {e.value}});
            }
        }
        return items;
    }

private:
    const CLI::App* root_;
};

void attach_env(CLI::App* app) {
    for (auto* opt : app->get_options()) {
        if (opt->get_lnames().empty()) continue;
        const auto& name = opt->get_lnames().front();
        if (name == "help" || name == "run-config") continue;
        opt->envname(env_name(name));
    }
    for (auto* sub : app->get_subcommands({})) attach_env(sub);
}

// Output paths must land in an existing directory.
const auto kWritablePath = CLI::Validator(
    [](std::string& path) -> std::string {
        const auto parent = fs::path(path).parent_path();
        if (!parent.empty() && !fs::is_directory(parent)) return "directory '" + parent.string() + "' does not exist";
        if (fs::is_directory(path)) return "'" + path + "' is a directory";
        return {};
    },
    "PATH");

// ---------------------------------------------------------------------------
// Shared inputs
// ---------------------------------------------------------------------------

struct ContextFlags {
    std::string schema;
    std::string rules;
    std::string plan;
};

void add_context_flags(CLI::App* app, ContextFlags& f) {
    app->add_option("--schema", f.schema, "Schema file (default: built-in)")->check(CLI::ExistingFile);
    app->add_option("--rules", f.rules, "Rule file (default: built-in)")->check(CLI::ExistingFile);
    app->add_option("--plan", f.plan, "Grouping plan file (default: derived from rule widths)")
        ->check(CLI::ExistingFile);
}

SemanticContext load_context(const ContextFlags& f) {
    auto schema = f.schema.empty() ? default_schema() : load_schema(f.schema);
    auto rules = f.rules.empty() ? default_ruleset(schema) : load_ruleset(f.rules, schema);
    if (f.plan.empty()) return SemanticContext::make(std::move(schema), std::move(rules));
    auto plan = parse_plan(read_text_file(f.plan), schema, f.plan);
    validate_plan(plan, schema, rules);
    return SemanticContext{std::move(schema), std::move(rules), std::move(plan)};
}

CleaningConfig load_cleaning(const std::string& path, const Schema& schema) {
    return path.empty() ? default_cleaning_config(schema) : load_cleaning_config(path, schema);
}

struct Dataset {
    std::vector<PersonRecord> records;
    std::vector<std::size_t> lines;
    std::size_t issues = 0;
    std::size_t rejected = 0;
};

// Parses, cleans and transforms-checks a record file. Row-level problems are
// reported on `err` and the row is skipped.
Dataset load_dataset(const std::string& path, const SemanticContext& ctx, const CleaningConfig& cleaning,
                     bool require_labels, std::ostream& err) {
    auto set = parse_records_file(path, ctx.schema);
    if (require_labels && !set.has_labels) {
        throw HeaderMismatch(path, 1, "a 'label' column is required");
    }
    Dataset data;
    data.issues = set.issues.size();
    for (const auto& issue : set.issues) err << path << ':' << issue.line << ": " << issue.message << '\n';
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        try {
            auto cleaned = clean_record(set.records[i], cleaning, ctx.schema);
            ctx.transform(cleaned);
            data.records.push_back(std::move(cleaned));
            data.lines.push_back(set.record_lines[i]);
        } catch (const Error& e) {
            err << path << ':' << set.record_lines[i] << ": " << e.what() << '\n';
            ++data.rejected;
        }
    }
    return data;
}

std::vector<Example> to_examples(const Dataset& data, const SemanticContext& ctx) {
    std::vector<Example> out;
    out.reserve(data.records.size());
    for (const auto& r : data.records) out.push_back({ctx.transform(r).values, *r.label});
    return out;
}

std::vector<Sample> to_samples(const Dataset& data, const SemanticContext& ctx) {
    std::vector<Sample> out;
    out.reserve(data.records.size());
    for (const auto& r : data.records) out.push_back({to_features(featurize(ctx.transform(r))), *r.label});
    return out;
}

std::vector<Label> labels_of(const Dataset& data) {
    std::vector<Label> out;
    for (const auto& r : data.records) out.push_back(*r.label);
    return out;
}

void open_output(std::ofstream& f, const std::string& path) {
    f.open(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
}

// ---------------------------------------------------------------------------
// Training flags
// ---------------------------------------------------------------------------

struct TrainFlags {
    std::uint64_t seed = 0;
    std::optional<std::size_t> epochs;
    std::optional<double> lr;
    std::optional<std::size_t> batch;
    std::string optimizer;
};

void add_train_flags(CLI::App* app, TrainFlags& f) {
    app->add_option("--seed", f.seed, "Random seed");
    app->add_option("--epochs", f.epochs, "Training epochs (default 200)")->check(CLI::PositiveNumber);
    app->add_option("--lr", f.lr, "Learning rate (default 0.001)")->check(CLI::PositiveNumber);
    app->add_option("--batch", f.batch, "Mini-batch size (default 16)")->check(CLI::PositiveNumber);
    app->add_option("--optimizer", f.optimizer, "sgd or adam (default adam)")->check(CLI::IsMember({"sgd", "adam"}));
}

TrainConfig train_config(const TrainFlags& f) {
    TrainConfig c;
    c.seed = f.seed;
    if (f.epochs) c.epochs = *f.epochs;
    if (f.lr) c.learning_rate = *f.lr;
    if (f.batch) c.batch_size = *f.batch;
    if (!f.optimizer.empty()) c.optimizer = *parse_optimizer(f.optimizer);
    c.validate();
    return c;
}

void report_history(std::ostream& err, const TrainHistory& h) {
    const std::size_t n = h.train_loss.size();
    for (std::size_t e = 0; e < n; ++e) {
        if ((e + 1) % 10 != 0 && e + 1 != n && e != 0) continue;
        err << "progress epoch=" << e + 1 << " train_loss=" << format_fixed(h.train_loss[e], 6)
            << " train_accuracy=" << format_fixed(h.train_accuracy[e], 4);
        if (!std::isnan(h.valid_loss[e])) {
            err << " valid_loss=" << format_fixed(h.valid_loss[e], 6)
                << " valid_accuracy=" << format_fixed(h.valid_accuracy[e], 4);
        }
        err << '\n';
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct IngestArgs {
    ContextFlags ctx;
    std::string in, clean, out;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
    const auto schema = a.ctx.schema.empty() ? default_schema() : load_schema(a.ctx.schema);
    const auto cleaning = load_cleaning(a.clean, schema);
    auto set = parse_records_file(a.in, schema);
    for (const auto& issue : set.issues) err << a.in << ':' << issue.line << ": " << issue.message << '\n';
    std::vector<PersonRecord> cleaned;
    std::size_t rejected = 0;
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        try {
            cleaned.push_back(clean_record(set.records[i], cleaning, schema));
        } catch (const CleaningError& e) {
            err << a.in << ':' << set.record_lines[i] << ": " << e.what() << '\n';
            ++rejected;
        }
    }
    write_records_file(a.out, cleaned, schema, set.has_labels);
    out << "rows=" << set.data_rows << '\n'
        << "records=" << set.records.size() << '\n'
        << "issues=" << set.issues.size() << '\n'
        << "cleaned=" << cleaned.size() << '\n'
        << "rejected=" << rejected << '\n'
        << "out=" << a.out << '\n';
    return kExitOk;
}

struct RulesCheckArgs {
    std::string schema, rules;
};

int cmd_rules_check(const RulesCheckArgs& a, std::ostream& out, std::ostream& err) {
    const auto schema = a.schema.empty() ? default_schema() : load_schema(a.schema);
    const auto text = read_text_file(a.rules);
    const auto result = parse_ruleset(text, schema);
    for (const auto& d : result.diagnostics) err << format_diagnostic(d, a.rules) << '\n';
    out << "rules=" << (result.ok() ? result.ruleset->size() : 0) << '\n'
        << "diagnostics=" << result.diagnostics.size() << '\n'
        << "status=" << (result.ok() ? "ok" : "error") << '\n';
    if (result.ok()) {
        const auto plan = make_plan(schema, *result.ruleset);
        std::size_t widest = 0;
        for (const auto& g : plan.groups) {
            std::size_t w = 0;
            for (const auto& p : g) w = std::max(w, p.offset + p.width);
            widest = std::max(widest, w);
        }
        out << "widest_group=" << widest << '\n';
    }
    return result.ok() ? kExitOk : kExitData;
}

struct TransformArgs {
    ContextFlags ctx;
    std::string in, clean, out;
    bool raw = false;
};

int cmd_transform(const TransformArgs& a, std::ostream& out, std::ostream& err) {
    const auto ctx = load_context(a.ctx);
    const auto data = load_dataset(a.in, ctx, load_cleaning(a.clean, ctx.schema), false, err);
    fs::create_directories(a.out);
    std::ofstream index;
    open_output(index, (fs::path(a.out) / "index.txt").string());
    index << "# file source_line label\n";
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        std::ostringstream name;
        name << "record_" << std::setw(5) << std::setfill('0') << i + 1 << ".txt";
        const auto m = a.raw ? build_raw_matrix(data.records[i], ctx.rules, ctx.schema) : ctx.transform(data.records[i]);
        std::ofstream f;
        open_output(f, (fs::path(a.out) / name.str()).string());
        write_matrix(f, m.values);
        const auto& label = data.records[i].label;
        index << name.str() << ' ' << data.lines[i] << ' ' << (label ? std::string(to_string(*label)) : "-") << '\n';
    }
    std::ofstream plan;
    open_output(plan, (fs::path(a.out) / "plan.txt").string());
    plan << format_plan(ctx.plan, ctx.schema);
    out << "matrices=" << data.records.size() << '\n'
        << "form=" << (a.raw ? "raw" : "reduced") << '\n'
        << "issues=" << data.issues << '\n'
        << "rejected=" << data.rejected << '\n'
        << "out=" << a.out << '\n';
    return kExitOk;
}

struct SynthArgs {
    ContextFlags ctx;
    std::string config, out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> count;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream&) {
    const auto ctx = load_context(a.ctx);
    auto cfg = a.config.empty() ? benchmark_config(ctx.schema) : load_synth_config(a.config, ctx.schema);
    if (a.seed) cfg.seed = *a.seed;
    if (a.count) cfg.record_count = *a.count;
    const auto set = generate(cfg, ctx);
    write_records_file(a.out, set.records, ctx.schema, true);
    const auto affected = std::count_if(set.records.begin(), set.records.end(),
                                        [](const PersonRecord& r) { return r.label == Label::affected; });
    out << "records=" << set.records.size() << '\n'
        << "affected=" << affected << '\n'
        << "unaffected=" << set.records.size() - static_cast<std::size_t>(affected) << '\n'
        << "seed=" << cfg.seed << '\n'
        << "intercept=" << format_double(set.intercept) << '\n'
        << "out=" << a.out << '\n';
    return kExitOk;
}

struct TrainArgs {
    ContextFlags ctx;
    TrainFlags train;
    std::string data, valid, clean, out, history;
};

int cmd_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
    const auto ctx = load_context(a.ctx);
    const auto cleaning = load_cleaning(a.clean, ctx.schema);
    const auto config = train_config(a.train);
    const auto data = load_dataset(a.data, ctx, cleaning, true, err);
    const auto train_set = to_examples(data, ctx);
    std::vector<Example> valid_set;
    if (!a.valid.empty()) valid_set = to_examples(load_dataset(a.valid, ctx, cleaning, true, err), ctx);

    err << "progress stage=train records=" << train_set.size() << " epochs=" << config.epochs << '\n';
    const auto result = train(config, train_set, valid_set);
    report_history(err, result.history);
    save_model(result.model, a.out);

    const auto& h = result.history;
    out << "train.records=" << train_set.size() << '\n'
        << "epochs=" << config.epochs << '\n'
        << "train.loss=" << format_fixed(h.train_loss.back(), 6) << '\n'
        << "train.accuracy=" << format_fixed(h.train_accuracy.back(), 6) << '\n';
    if (!valid_set.empty()) {
        out << "valid.records=" << valid_set.size() << '\n'
            << "valid.loss=" << format_fixed(h.valid_loss.back(), 6) << '\n'
            << "valid.accuracy=" << format_fixed(h.valid_accuracy.back(), 6) << '\n';
    }
    out << "model=" << a.out << '\n';

    if (!a.history.empty()) {
        std::ofstream f;
        open_output(f, a.history);
        f << "epoch train_loss train_accuracy valid_loss valid_accuracy\n";
        for (std::size_t e = 0; e < h.train_loss.size(); ++e) {
            f << e + 1 << ' ' << format_double(h.train_loss[e]) << ' ' << format_double(h.train_accuracy[e]) << ' '
              << (std::isnan(h.valid_loss[e]) ? "nan" : format_double(h.valid_loss[e])) << ' '
              << (std::isnan(h.valid_accuracy[e]) ? "nan" : format_double(h.valid_accuracy[e])) << '\n';
        }
    }
    return kExitOk;
}

struct PredictArgs {
    ContextFlags ctx;
    std::string model, record, clean;
};

int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
    const auto ctx = load_context(a.ctx);
    const auto model = load_model(a.model);
    const auto data = load_dataset(a.record, ctx, load_cleaning(a.clean, ctx.schema), false, err);
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        const auto p = predict(model, ctx.transform(data.records[i]).values);
        out << "line=" << data.lines[i] << " p_affected=" << format_fixed(p.p_affected, 6)
            << " p_unaffected=" << format_fixed(p.p_unaffected, 6) << " decision=" << to_string(p.decision()) << '\n';
    }
    return data.rejected + data.issues == 0 ? kExitOk : kExitData;
}

struct EvaluateArgs {
    ContextFlags ctx;
    std::string model, data, clean, roc;
};

void write_roc_file(const std::string& path, const EvalReport& report) {
    std::ofstream f;
    open_output(f, path);
    write_roc(f, report.roc);
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
    const auto ctx = load_context(a.ctx);
    const auto model = load_model(a.model);
    const auto data = load_dataset(a.data, ctx, load_cleaning(a.clean, ctx.schema), true, err);
    std::vector<double> scores;
    for (const auto& r : data.records) scores.push_back(predict(model, ctx.transform(r).values).p_affected);
    const auto report = evaluate(scores, labels_of(data));
    out << "records=" << report.size << '\n';
    write_eval_report(out, "test", report);
    out << "roc.points=" << report.roc.size() << '\n';
    if (!a.roc.empty()) write_roc_file(a.roc, report);
    return kExitOk;
}

struct BaselineArgs {
    ContextFlags ctx;
    std::string algo, data, test, clean, roc;
    std::uint64_t seed = 0;
    double train_frac = 490.0 / 601.0;
    std::size_t k = 5;
    std::size_t trees = 100;
    std::size_t max_depth = 8;
    std::optional<std::size_t> epochs;
    std::optional<double> lr;
    std::optional<std::size_t> batch;
};

int cmd_baseline(const BaselineArgs& a, std::ostream& out, std::ostream& err) {
    const auto ctx = load_context(a.ctx);
    const auto cleaning = load_cleaning(a.clean, ctx.schema);
    const auto data = load_dataset(a.data, ctx, cleaning, true, err);
    std::vector<Sample> train_samples, test_samples;
    if (!a.test.empty()) {
        train_samples = to_samples(data, ctx);
        test_samples = to_samples(load_dataset(a.test, ctx, cleaning, true, err), ctx);
    } else {
        const auto samples = to_samples(data, ctx);
        const auto labels = labels_of(data);
        std::tie(train_samples, test_samples) =
            split(std::span<const Sample>(samples), derive_seed(a.seed, 1), a.train_frac, labels);
    }

    BaselineOptions opt;
    opt.knn_k = a.k;
    opt.tree.max_depth = a.max_depth;
    opt.forest.n_trees = a.trees;
    opt.forest.max_depth = a.max_depth;
    if (a.epochs) opt.ann.epochs = *a.epochs;
    if (a.lr) opt.ann.learning_rate = *a.lr;
    if (a.batch) opt.ann.batch_size = *a.batch;
    opt.ann.validate();

    const auto kind = *parse_baseline_kind(a.algo);
    err << "progress stage=" << a.algo << " train=" << train_samples.size() << " test=" << test_samples.size() << '\n';
    const auto scores = baseline_scores(kind, train_samples, test_samples, opt, derive_seed(a.seed, 2));
    std::vector<Label> test_labels;
    for (const auto& s : test_samples) test_labels.push_back(s.label);
    const auto report = evaluate(scores, test_labels);
    out << "algo=" << a.algo << '\n' << "train=" << train_samples.size() << '\n' << "test=" << test_samples.size() << '\n';
    write_eval_report(out, "test", report);
    if (!a.roc.empty()) write_roc_file(a.roc, report);
    return kExitOk;
}

struct PipelineArgs {
    ContextFlags ctx;
    TrainFlags train;
    std::string config, out;
    bool seed_given = false;
    std::size_t k = 5;
    bool no_baselines = false;
};

void print_table(std::ostream& err, const PipelineResult& r) {
    auto row = [&](std::string_view name, const EvalReport& e) {
        err << std::left << std::setw(8) << name << std::right << std::setw(10) << format_fixed(e.accuracy, 4)
            << std::setw(10) << format_fixed(e.error_rate, 4) << std::setw(10) << format_fixed(e.auc, 4) << '\n';
    };
    err << std::left << std::setw(8) << "model" << std::right << std::setw(10) << "accuracy" << std::setw(10)
        << "error" << std::setw(10) << "auc" << '\n';
    row("cnn", r.cnn);
    for (std::size_t b = 0; b < kBaselineKinds.size(); ++b) {
        if (r.baselines[b]) row(to_string(kBaselineKinds[b]), *r.baselines[b]);
    }
    err << std::left << std::setw(8) << "bayes" << std::right << std::setw(30) << format_fixed(r.bayes_auc, 4) << '\n';
}

int cmd_pipeline(const PipelineArgs& a, std::ostream& out, std::ostream& err) {
    const auto ctx = load_context(a.ctx);
    PipelineOptions opt;
    opt.synth = a.config.empty() ? benchmark_config(ctx.schema) : load_synth_config(a.config, ctx.schema);
    opt.train = train_config(a.train);
    opt.baselines.knn_k = a.k;
    opt.run_baselines = !a.no_baselines;
    const std::uint64_t seed = a.seed_given ? a.train.seed : opt.synth.seed;

    err << "progress stage=pipeline seed=" << seed << " records=" << opt.synth.record_count << '\n';
    const auto result = run_pipeline(opt, ctx, seed);
    report_history(err, result.history);
    print_table(err, result);

    std::ostringstream report;
    write_pipeline_report(report, result);
    out << report.str();
    if (!a.out.empty()) {
        std::ofstream f;
        open_output(f, a.out);
        f << report.str();
    }
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lung-cancer risk screening pipeline: semantic matrices and a small CNN", "deeplcp"};
    app.require_subcommand(1);
    app.fallthrough();
    app.config_formatter(std::make_shared<BlockConfig>(&app));
    app.set_config("--run-config", "", "Settings file (key: value blocks)")->check(CLI::ExistingFile);

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse and clean a record file");
    ingest_cmd->add_option("--schema", ingest.ctx.schema, "Schema file (default: built-in)")->check(CLI::ExistingFile);
    ingest_cmd->add_option("--in", ingest.in, "Input records")->required()->check(CLI::ExistingFile);
    ingest_cmd->add_option("--clean", ingest.clean, "Cleaning config (default: built-in)")->check(CLI::ExistingFile);
    ingest_cmd->add_option("--out", ingest.out, "Cleaned output records")->required()->check(kWritablePath);

    RulesCheckArgs rules_check;
    auto* rules_cmd = app.add_subcommand("rules", "Rule file tools");
    rules_cmd->require_subcommand(1);
    auto* check_cmd = rules_cmd->add_subcommand("check", "Validate a rule file against a schema");
    check_cmd->add_option("--schema", rules_check.schema, "Schema file (default: built-in)")->check(CLI::ExistingFile);
    check_cmd->add_option("--rules", rules_check.rules, "Rule file")->required()->check(CLI::ExistingFile);

    TransformArgs transform_args;
    auto* transform_cmd = app.add_subcommand("transform", "Write one semantic matrix per record");
    add_context_flags(transform_cmd, transform_args.ctx);
    transform_cmd->add_option("--in", transform_args.in, "Input records")->required()->check(CLI::ExistingFile);
    transform_cmd->add_option("--clean", transform_args.clean, "Cleaning config")->check(CLI::ExistingFile);
    transform_cmd->add_option("--out", transform_args.out, "Output directory")->required();
    transform_cmd->add_flag("--raw", transform_args.raw, "Write 31x13 raw matrices instead of reduced ones");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate labelled synthetic records");
    add_context_flags(synth_cmd, synth.ctx);
    synth_cmd->add_option("--config", synth.config, "Synthetic data config (default: built-in benchmark)")
        ->check(CLI::ExistingFile);
    synth_cmd->add_option("--seed", synth.seed, "Override the config seed");
    synth_cmd->add_option("--count", synth.count, "Override the record count")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--out", synth.out, "Output records")->required()->check(kWritablePath);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train the CNN on labelled records");
    add_context_flags(train_cmd, train_args.ctx);
    add_train_flags(train_cmd, train_args.train);
    train_cmd->add_option("--data", train_args.data, "Training records")->required()->check(CLI::ExistingFile);
    train_cmd->add_option("--valid", train_args.valid, "Validation records")->check(CLI::ExistingFile);
    train_cmd->add_option("--clean", train_args.clean, "Cleaning config")->check(CLI::ExistingFile);
    train_cmd->add_option("--out", train_args.out, "Model file to write")->required()->check(kWritablePath);
    train_cmd->add_option("--history", train_args.history, "Per-epoch history file")->check(kWritablePath);

    PredictArgs predict_args;
    auto* predict_cmd = app.add_subcommand("predict", "Score records with a trained model");
    add_context_flags(predict_cmd, predict_args.ctx);
    predict_cmd->add_option("--model", predict_args.model, "Model file")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--record", predict_args.record, "Records to score")->required()->check(CLI::ExistingFile);
    predict_cmd->add_option("--clean", predict_args.clean, "Cleaning config")->check(CLI::ExistingFile);

    EvaluateArgs evaluate_args;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a trained model on labelled records");
    add_context_flags(evaluate_cmd, evaluate_args.ctx);
    evaluate_cmd->add_option("--model", evaluate_args.model, "Model file")->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--data", evaluate_args.data, "Labelled records")->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--clean", evaluate_args.clean, "Cleaning config")->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--roc", evaluate_args.roc, "Write ROC points (fpr tpr) here")->check(kWritablePath);

    BaselineArgs baseline;
    auto* baseline_cmd = app.add_subcommand("baseline", "Fit and evaluate a classical baseline");
    add_context_flags(baseline_cmd, baseline.ctx);
    baseline_cmd->add_option("--algo", baseline.algo, "knn, tree, forest or ann")
        ->required()
        ->check(CLI::IsMember({"knn", "tree", "forest", "ann"}));
    baseline_cmd->add_option("--data", baseline.data, "Labelled records")->required()->check(CLI::ExistingFile);
    baseline_cmd->add_option("--test", baseline.test, "Held-out records (default: split --data)")
        ->check(CLI::ExistingFile);
    baseline_cmd->add_option("--clean", baseline.clean, "Cleaning config")->check(CLI::ExistingFile);
    baseline_cmd->add_option("--seed", baseline.seed, "Random seed");
    baseline_cmd->add_option("--train-frac", baseline.train_frac, "Training share when splitting")
        ->check(CLI::Range(0.0, 1.0));
    baseline_cmd->add_option("--k", baseline.k, "Neighbours for knn")->check(CLI::PositiveNumber);
    baseline_cmd->add_option("--trees", baseline.trees, "Trees in the forest")->check(CLI::PositiveNumber);
    baseline_cmd->add_option("--max-depth", baseline.max_depth, "Tree depth limit");
    baseline_cmd->add_option("--epochs", baseline.epochs, "ANN epochs")->check(CLI::PositiveNumber);
    baseline_cmd->add_option("--lr", baseline.lr, "ANN learning rate")->check(CLI::PositiveNumber);
    baseline_cmd->add_option("--batch", baseline.batch, "ANN batch size")->check(CLI::PositiveNumber);
    baseline_cmd->add_option("--roc", baseline.roc, "Write ROC points (fpr tpr) here")->check(kWritablePath);

    PipelineArgs pipeline;
    auto* pipeline_cmd = app.add_subcommand("pipeline", "Synthesize, train and evaluate in one run");
    add_context_flags(pipeline_cmd, pipeline.ctx);
    add_train_flags(pipeline_cmd, pipeline.train);
    pipeline_cmd->add_option("--config", pipeline.config, "Synthetic data config (default: built-in benchmark)")
        ->check(CLI::ExistingFile);
    pipeline_cmd->add_option("--k", pipeline.k, "Neighbours for knn")->check(CLI::PositiveNumber);
    pipeline_cmd->add_flag("--no-baselines", pipeline.no_baselines, "Skip the classical baselines");
    pipeline_cmd->add_option("--out", pipeline.out, "Also write the report here")->check(kWritablePath);

    attach_env(&app);

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        const CLI::App* target = &app;
        while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
        err << target->help();
        return kExitUsage;
    }
    pipeline.seed_given = pipeline_cmd->count("--seed") > 0;

    try {
        if (*ingest_cmd) return cmd_ingest(ingest, out, err);
        if (*check_cmd) return cmd_rules_check(rules_check, out, err);
        if (*transform_cmd) return cmd_transform(transform_args, out, err);
        if (*synth_cmd) return cmd_synth(synth, out, err);
        if (*train_cmd) return cmd_train(train_args, out, err);
        if (*predict_cmd) return cmd_predict(predict_args, out, err);
        if (*evaluate_cmd) return cmd_evaluate(evaluate_args, out, err);
        if (*baseline_cmd) return cmd_baseline(baseline, out, err);
        if (*pipeline_cmd) return cmd_pipeline(pipeline, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    err << app.help();
    return kExitUsage;
}

}  // namespace deeplcp::cli
