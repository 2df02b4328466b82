#include "eegbench/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>

#include "eegbench/errors.hpp"
#include "eegbench/hash.hpp"

namespace eegbench {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSelectionFormat = "eegbench-selection";
constexpr const char* kResultsFormat = "eegbench-results";
constexpr int kStageVersion = 1;

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json(const fs::path& p) {
    const auto text = read_bytes(p);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw MalformedInputError(p.string() + ": " + e.what());
    }
}

// Stage files: {"format", "version", "hash", ...}. Returns nullopt when absent.
std::optional<json> read_stage(const fs::path& p, const char* format) {
    if (!fs::exists(p)) return std::nullopt;
    json j = read_json(p);
    if (!j.is_object() || j.value("format", "") != format)
        throw VersionError(p.string() + " is not a " + std::string(format) + " file; regenerate upstream");
    if (j.value("version", -1) != kStageVersion)
        throw VersionError(p.string() + " was written by an incompatible version; regenerate upstream");
    return j;
}

std::string selection_hash(const RunConfig& c, const std::string& feature_hash, const ClassifierSpec& spec) {
    const json key = {{"features", feature_hash},
                      {"selection", to_json(c.selection)},
                      {"evaluation", to_json(c.evaluation)},
                      {"classifier", {{"kind", to_string(spec.kind)}, {"hyperparams", to_json(spec.hp)}}},
                      {"seed", c.seed}};
    return hex(fnv1a(key.dump()));
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

// Runs `body`, translating exceptions into exit codes.
template <class F>
int guarded(std::ostream& log, F&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        log << "eegbench: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

// Cached features of one dataset, checked against the current config.
PreparedDataset load_features(const RunConfig& c, const DatasetEntry& d, std::string* hash_out) {
    const auto path = feature_cache_path(c, d.spec.name);
    if (!fs::exists(path))
        throw IoError("no feature cache for dataset '" + d.spec.name + "'; run `eegbench extract` first");
    auto cache = read_feature_cache(path);
    const auto expected = feature_hash(c, d);
    if (cache.hash != expected)
        throw VersionError("feature cache for '" + d.spec.name + "' is stale; regenerate upstream with `eegbench extract`");
    if (hash_out) *hash_out = cache.hash;
    return std::move(cache.data);
}

std::string read_cache_hash(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string header, meta;
    if (!in || !std::getline(in, header) || header != kFeatureCacheHeader || !std::getline(in, meta)) return {};
    try {
        return json::parse(meta).value("hash", "");
    } catch (const json::exception&) {
        return {};
    }
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const VersionError*>(&e) ||
        dynamic_cast<const MalformedInputError*>(&e))
        return 3;
    return 1;
}

RunConfig resolve_config(const CliOptions& opts) {
    if (opts.config.empty()) throw ConfigError("--config", "a config file is required");
    RunConfig c = load_run_config(opts.config);
    if (opts.seed) c.seed = *opts.seed;
    if (opts.jobs) {
        if (*opts.jobs < 0) throw ConfigError("--jobs", "must be non-negative");
        c.jobs = *opts.jobs;
    }
    if (opts.paper_faithful) c.selection.wrapper.protocol = Protocol::PaperFaithful;
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) c.output_dir = dir;
    return c;
}

std::vector<Trial> ingest(const DatasetEntry& d, const PreprocessConfig& p) {
    validate(d.spec);
    std::vector<Trial> all;
    auto process = [&](Recording rec) {
        validate(rec);
        if (p.bandpass) rec = bandpass(rec, p.low, p.high);
        if (rec.fs != p.target_fs) rec = downsample(rec, p.target_fs);
        auto t = segment(rec, p.window_s, p.hop_s);
        all.insert(all.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
    };
    if (d.synth) {
        Recording rec = synth_recording(*d.synth, d.synth_seed);
        rec.id = d.spec.name;
        process(std::move(rec));
    } else {
        for (const auto& f : d.spec.files) process(load_recording(f, d.load));
    }
    return select_task_pair(all, d.spec.tasks);
}

std::string feature_hash(const RunConfig& c, const DatasetEntry& d) {
    const json key = {{"cache", kFeatureCacheHeader},
                      {"dataset", to_json(d)},
                      {"preprocessing", to_json(c.preprocessing)},
                      {"features", to_json(c.features)}};
    std::uint64_t h = fnv1a(key.dump());
    for (const auto& f : d.spec.files) h = fnv1a(read_bytes(f), h);
    return hex(h);
}

fs::path feature_cache_path(const RunConfig& c, const std::string& dataset) {
    return c.output_dir / "cache" / ("features-" + dataset + ".bin");
}

fs::path selection_path(const RunConfig& c, const std::string& dataset, const std::string& classifier) {
    return c.output_dir / "selections" / (dataset + "__" + classifier + ".json");
}

fs::path results_path(const RunConfig& c, const std::string& dataset, const std::string& classifier) {
    return c.output_dir / "results" / (dataset + "__" + classifier + ".json");
}

void write_feature_cache(const fs::path& path, const FeatureCache& cache) {
    const auto& m = cache.data.matrix;
    json desc = json::array(), spans = json::array();
    for (const auto& d : m.descriptors) desc.push_back(d.key());
    for (const auto& s : cache.data.spans) spans.push_back({s.recording_id, s.start, s.length});
    const json meta = {{"hash", cache.hash},
                       {"dataset", cache.data.name},
                       {"rows", m.rows()},
                       {"cols", m.cols()},
                       {"labels", m.labels},
                       {"descriptors", desc},
                       {"spans", spans}};
    std::string out = std::string(kFeatureCacheHeader) + "\n" + meta.dump() + "\n";
    const auto bytes = static_cast<std::size_t>(m.values.size()) * sizeof(double);
    const auto at = out.size();
    out.resize(at + bytes);
    std::memcpy(out.data() + at, m.values.data(), bytes);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
    write_atomic(path, out);
}

FeatureCache read_feature_cache(const fs::path& path) {
    const auto text = read_bytes(path);
    const auto eol = text.find('\n');
    if (eol == std::string::npos || text.compare(0, eol, kFeatureCacheHeader) != 0)
        throw VersionError(path.string() + ": unrecognised feature cache header; regenerate upstream with `eegbench extract`");
    const auto eol2 = text.find('\n', eol + 1);
    if (eol2 == std::string::npos) throw MalformedInputError(path.string() + ": truncated feature cache");
    FeatureCache c;
    try {
        const json meta = json::parse(text.substr(eol + 1, eol2 - eol - 1));
        c.hash = meta.at("hash").get<std::string>();
        c.data.name = meta.at("dataset").get<std::string>();
        const auto rows = meta.at("rows").get<Index>(), cols = meta.at("cols").get<Index>();
        auto& m = c.data.matrix;
        m.labels = meta.at("labels").get<Labels>();
        for (const auto& k : meta.at("descriptors")) m.descriptors.push_back(FeatureDescriptor::parse(k.get<std::string>()));
        for (const auto& s : meta.at("spans"))
            c.data.spans.push_back({s.at(0).get<std::string>(), s.at(1).get<Index>(), s.at(2).get<Index>()});
        const auto bytes = static_cast<std::size_t>(rows * cols) * sizeof(double);
        if (text.size() - eol2 - 1 != bytes) throw MalformedInputError(path.string() + ": feature cache body has the wrong size");
        m.values.resize(rows, cols);
        std::memcpy(m.values.data(), text.data() + eol2 + 1, bytes);
    } catch (const json::exception& e) {
        throw MalformedInputError(path.string() + ": " + e.what());
    }
    validate(c.data.matrix);
    return c;
}

int cmd_extract(const CliOptions& opts, std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig c = resolve_config(opts);
        const int jobs = benchmark_config(c).jobs;
        std::vector<std::string> lines(c.datasets.size());
        std::vector<std::exception_ptr> errors(c.datasets.size());
        parallel_for(c.datasets.size(), jobs, [&](std::size_t i) {
            try {
                const auto& d = c.datasets[i];
                const auto path = feature_cache_path(c, d.spec.name);
                const auto hash = feature_hash(c, d);
                if (fs::exists(path) && read_cache_hash(path) == hash) {
                    lines[i] = "extract " + d.spec.name + ": cache hit";
                    return;
                }
                const auto trials = ingest(d, c.preprocessing);
                FeatureCache cache{hash, {d.spec.name, build_feature_matrix(trials, c.features), spans_of(trials)}};
                write_feature_cache(path, cache);
                lines[i] = "extract " + d.spec.name + ": " + std::to_string(cache.data.matrix.rows()) + " trials x " +
                           std::to_string(cache.data.matrix.cols()) + " features";
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (errors[i]) std::rethrow_exception(errors[i]);
            log << lines[i] << "\n";
        }
        return 0;
    });
}

int cmd_select(const CliOptions& opts, std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig c = resolve_config(opts);
        const BenchmarkConfig b = benchmark_config(c);
        int failures = 0;
        for (const auto& d : c.datasets) {
            std::string fhash;
            std::vector<std::size_t> todo;
            std::vector<std::string> hashes;
            for (std::size_t k = 0; k < c.classifiers.size(); ++k) hashes.push_back({});
            const PreparedDataset data = load_features(c, d, &fhash);
            for (std::size_t k = 0; k < c.classifiers.size(); ++k) {
                const auto& spec = c.classifiers[k];
                hashes[k] = selection_hash(c, fhash, spec);
                const auto path = selection_path(c, d.spec.name, std::string(to_string(spec.kind)));
                std::optional<json> prev;
                try {
                    prev = read_stage(path, kSelectionFormat);
                } catch (const Error&) {
                    prev.reset();  // unreadable or foreign: recompute
                }
                if (prev && prev->value("hash", "") == hashes[k]) {
                    log << "select " << d.spec.name << " " << to_string(spec.kind) << ": cache hit\n";
                    for (const auto& r : prev->at("records")) failures += !selection_from_json(r).error.empty();
                    continue;
                }
                todo.push_back(k);
            }
            if (todo.empty()) continue;
            const DatasetContext ctx = prepare_dataset(data, b);
            std::vector<std::vector<SelectionRecord>> out(todo.size());
            parallel_for(todo.size(), b.jobs, [&](std::size_t t) { out[t] = select_cell(ctx, c.classifiers[todo[t]], b); });
            for (std::size_t t = 0; t < todo.size(); ++t) {
                const auto& spec = c.classifiers[todo[t]];
                json records = json::array();
                for (const auto& r : out[t]) {
                    records.push_back(to_json(r));
                    if (!r.error.empty()) {
                        ++failures;
                        log << "select " << d.spec.name << " " << to_string(spec.kind) << " " << r.feature_set
                            << " failed: " << r.error << "\n";
                    }
                }
                const json j = {{"format", kSelectionFormat}, {"version", kStageVersion}, {"hash", hashes[todo[t]]},
                                {"feature_hash", fhash},     {"records", records}};
                const auto path = selection_path(c, d.spec.name, std::string(to_string(spec.kind)));
                fs::create_directories(path.parent_path());
                write_atomic(path, j.dump(2) + "\n");
                log << "select " << d.spec.name << " " << to_string(spec.kind) << ": done\n";
            }
        }
        return opts.strict && failures ? 1 : 0;
    });
}

int cmd_train(const CliOptions& opts, std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig c = resolve_config(opts);
        const BenchmarkConfig b = benchmark_config(c);
        int failures = 0;
        for (const auto& d : c.datasets) {
            std::string fhash;
            const PreparedDataset data = load_features(c, d, &fhash);
            std::optional<DatasetContext> ctx;
            struct Job {
                std::size_t k;
                std::string hash;
                std::vector<SelectionRecord> records;
            };
            std::vector<Job> todo;
            for (std::size_t k = 0; k < c.classifiers.size(); ++k) {
                const auto& spec = c.classifiers[k];
                const std::string cls(to_string(spec.kind));
                const auto expected = selection_hash(c, fhash, spec);
                const auto sel = read_stage(selection_path(c, d.spec.name, cls), kSelectionFormat);
                if (!sel) throw IoError("no selection for " + d.spec.name + " / " + cls + "; run `eegbench select` first");
                if (sel->value("hash", "") != expected)
                    throw VersionError("selection for " + d.spec.name + " / " + cls +
                                       " is stale; regenerate upstream with `eegbench select`");
                std::optional<json> prev;
                try {
                    prev = read_stage(results_path(c, d.spec.name, cls), kResultsFormat);
                } catch (const Error&) {
                    prev.reset();
                }
                if (prev && prev->value("hash", "") == expected) {
                    log << "train " << d.spec.name << " " << cls << ": cache hit\n";
                    for (const auto& cell : prev->at("cells")) failures += !cell_from_json(cell).accuracy;
                    continue;
                }
                Job job{k, expected, {}};
                for (const auto& r : sel->at("records")) job.records.push_back(selection_from_json(r));
                todo.push_back(std::move(job));
            }
            if (todo.empty()) continue;
            ctx = prepare_dataset(data, b, false);
            std::vector<std::vector<CellResult>> cells(todo.size());
            std::vector<std::vector<std::optional<TrainedModel>>> models(todo.size());
            parallel_for(todo.size(), b.jobs, [&](std::size_t t) {
                const auto& spec = c.classifiers[todo[t].k];
                cells[t] = score_cell(*ctx, spec, todo[t].records, cell_seed(*ctx, spec), &models[t]);
            });
            for (std::size_t t = 0; t < todo.size(); ++t) {
                const std::string cls(to_string(c.classifiers[todo[t].k].kind));
                json cj = json::array();
                for (std::size_t s = 0; s < cells[t].size(); ++s) {
                    const auto& cell = cells[t][s];
                    cj.push_back(to_json(cell));
                    if (!cell.accuracy) {
                        ++failures;
                        log << "train " << d.spec.name << " " << cls << " " << cell.feature_set << " failed: " << cell.error
                            << "\n";
                    }
                    if (models[t][s]) {
                        const auto mp = c.output_dir / "models" / (d.spec.name + "__" + cls + "__" + cell.feature_set + ".json");
                        fs::create_directories(mp.parent_path());
                        write_atomic(mp, to_json(*models[t][s]).dump() + "\n");
                    }
                }
                const json j = {{"format", kResultsFormat}, {"version", kStageVersion}, {"hash", todo[t].hash}, {"cells", cj}};
                const auto path = results_path(c, d.spec.name, cls);
                fs::create_directories(path.parent_path());
                write_atomic(path, j.dump(2) + "\n");
                log << "train " << d.spec.name << " " << cls << ": done\n";
            }
        }
        return opts.strict && failures ? 1 : 0;
    });
}

int cmd_report(const CliOptions& opts, std::ostream& log) {
    return guarded(log, [&] {
        const RunConfig c = resolve_config(opts);
        const auto dir = c.output_dir / "results";
        if (!fs::is_directory(dir)) throw IoError("no results in " + dir.string() + "; run `eegbench train` first");
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir))
            if (e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());

        std::vector<CellResult> cells;
        std::set<std::string> dataset_names, classifier_names;
        for (const auto& f : files) {
            const auto j = read_stage(f, kResultsFormat);
            for (const auto& cj : j->at("cells")) {
                cells.push_back(cell_from_json(cj));
                dataset_names.insert(cells.back().dataset);
                classifier_names.insert(cells.back().classifier);
            }
        }
        if (cells.empty()) throw IoError("no results in " + dir.string());

        std::vector<std::string> datasets, classifiers;
        for (const auto& d : c.datasets)
            if (dataset_names.erase(d.spec.name)) datasets.push_back(d.spec.name);
        datasets.insert(datasets.end(), dataset_names.begin(), dataset_names.end());
        for (auto k : kClassifierKinds)
            if (classifier_names.erase(std::string(to_string(k)))) classifiers.emplace_back(to_string(k));
        classifiers.insert(classifiers.end(), classifier_names.begin(), classifier_names.end());

        std::map<std::string, std::uint64_t> seeds;
        for (const auto& d : datasets) seeds[d] = dataset_seed(c.seed, d);
        const auto report = assemble_report(std::move(cells), datasets, classifiers, result_config(c), seeds);
        check_aggregates(report);
        emit_report(report, c.output_dir);
        const json meta = {{"generated_at", utc_now()},
                           {"output_dir", c.output_dir.string()},
                           {"jobs", benchmark_config(c).jobs},
                           {"result_files", files.size()}};
        write_atomic(c.output_dir / "run_meta.json", meta.dump(2) + "\n");

        int failed = 0;
        for (const auto& cell : report.cells) failed += !cell.accuracy;
        log << "report: " << report.datasets.size() << " datasets x " << report.classifiers.size() << " classifiers, "
            << failed << " failed cells -> " << c.output_dir.string() << "\n";
        return opts.strict && failed ? 1 : 0;
    });
}

int cmd_run(const CliOptions& opts, std::ostream& log) {
    static const std::vector<std::string> order{"extract", "select", "train", "report"};
    for (const auto& s : opts.stages)
        if (std::find(order.begin(), order.end(), s) == order.end()) {
            log << "eegbench: --stage: unknown stage '" << s << "'\n";
            return 2;
        }
    int worst = 0;
    for (const auto& s : order) {
        if (!opts.stages.empty() && !opts.stages.count(s)) continue;
        int rc = 0;
        if (s == "extract") rc = cmd_extract(opts, log);
        if (s == "select") rc = cmd_select(opts, log);
        if (s == "train") rc = cmd_train(opts, log);
        if (s == "report") rc = cmd_report(opts, log);
        if (rc > 1) return rc;
        worst = std::max(worst, rc);
    }
    return worst;
}

int cmd_synth(const fs::path& spec_path, std::uint64_t seed, const fs::path& out, std::ostream& log) {
    return guarded(log, [&] {
        json j;
        try {
            j = json::parse(read_bytes(spec_path));
        } catch (const json::parse_error& e) {
            throw ConfigError("spec", std::string("not valid JSON: ") + e.what());
        }
        const SynthSpec spec = synth_spec_from_json(j, "spec");
        Recording rec = synth_recording(spec, seed);
        rec.id = out.stem().string();
        if (out.has_parent_path()) {
            std::error_code ec;
            fs::create_directories(out.parent_path(), ec);
            if (ec) throw IoError("cannot create " + out.parent_path().string() + ": " + ec.message());
        }
        auto tmp = out;
        tmp += ".tmp";
        save_recording(tmp, rec, FileFormat::Csv);
        std::error_code ec;
        fs::rename(tmp, out, ec);
        if (ec) throw IoError("cannot write " + out.string() + ": " + ec.message());
        log << "synth: " << rec.channels() << " channels x " << rec.length() << " samples -> " << out.string() << "\n";
        return 0;
    });
}

}  // namespace eegbench
