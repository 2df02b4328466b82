#include "eegbench/config.hpp"

#include <fstream>
#include <set>
#include <thread>

#include "eegbench/errors.hpp"
#include "json_fields.hpp"

namespace eegbench {

using nlohmann::json;
using detail::Fields;

namespace {

std::string rest_of(const ConfigError& e) {
    const std::string w = e.what();
    const auto prefix = e.field() + ": ";
    return w.rfind(prefix, 0) == 0 ? w.substr(prefix.size()) : w;
}

// Re-roots a ConfigError raised by a nested parser under `path`.
template <class F>
auto nested(const std::string& path, const std::string& own_root, F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        std::string field = e.field();
        if (field.rfind(own_root, 0) == 0) field = field.substr(own_root.size());
        throw ConfigError(path + field, rest_of(e));
    }
}

const char* kind_name(SignalComponent::Kind k) {
    switch (k) {
        case SignalComponent::Kind::WhiteNoise: return "white_noise";
        case SignalComponent::Kind::Sine: return "sine";
        case SignalComponent::Kind::BandNoise: return "band_noise";
        case SignalComponent::Kind::Autoregressive: return "autoregressive";
        case SignalComponent::Kind::CommonNoise: return "common_noise";
    }
    return "?";
}

bool safe_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) return false;
    return true;
}

}  // namespace

json to_json(const SynthSpec& s) {
    json classes = json::array();
    for (const auto& c : s.classes) {
        json comps = json::array();
        for (const auto& k : c.components) {
            json cj = {{"kind", kind_name(k.kind)}, {"amplitude", k.amplitude}};
            if (k.kind == SignalComponent::Kind::Sine) cj["frequency"] = k.frequency;
            if (k.kind == SignalComponent::Kind::BandNoise) {
                cj["low"] = k.low;
                cj["high"] = k.high;
            }
            if (k.kind == SignalComponent::Kind::Autoregressive) cj["coefficients"] = k.coefficients;
            comps.push_back(cj);
        }
        classes.push_back({{"label", c.label}, {"components", comps}});
    }
    return {{"fs", s.fs},
            {"channels", s.channels},
            {"segment_seconds", s.segment_seconds},
            {"segments", s.segments},
            {"shuffle_blocks", s.shuffle_blocks},
            {"classes", classes}};
}

SynthSpec synth_spec_from_json(const json& j, const std::string& path) {
    SynthSpec s;
    Fields f(j, path);
    f.get("fs", s.fs);
    f.get("channels", s.channels);
    f.get("segment_seconds", s.segment_seconds);
    f.get("segments", s.segments);
    f.get("shuffle_blocks", s.shuffle_blocks);
    const json& classes = f.at("classes");
    if (!classes.is_array()) throw ConfigError(f.path("classes"), "expected an array");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const std::string cp = f.path("classes") + "[" + std::to_string(i) + "]";
        Fields cf(classes[i], cp);
        ClassModel cm;
        cf.get("label", cm.label);
        const json& comps = cf.at("components");
        if (!comps.is_array()) throw ConfigError(cf.path("components"), "expected an array");
        for (std::size_t k = 0; k < comps.size(); ++k) {
            Fields kf(comps[k], cf.path("components") + "[" + std::to_string(k) + "]");
            SignalComponent sc;
            const auto kind = kf.require<std::string>("kind");
            bool found = false;
            for (auto kk : {SignalComponent::Kind::WhiteNoise, SignalComponent::Kind::Sine, SignalComponent::Kind::BandNoise,
                            SignalComponent::Kind::Autoregressive, SignalComponent::Kind::CommonNoise})
                if (kind == kind_name(kk)) {
                    sc.kind = kk;
                    found = true;
                }
            if (!found) throw ConfigError(kf.path("kind"), "unknown component kind '" + kind + "'");
            kf.get("amplitude", sc.amplitude);
            kf.get("frequency", sc.frequency);
            kf.get("low", sc.low);
            kf.get("high", sc.high);
            kf.get("coefficients", sc.coefficients);
            kf.finish();
            cm.components.push_back(sc);
        }
        cf.finish();
        s.classes.push_back(cm);
    }
    f.finish();
    try {
        validate(s);
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
    return s;
}

json to_json(const FeatureConfig& c) {
    json groups = json::array();
    for (auto g : c.groups) groups.push_back(to_string(g));
    json bands = json::array();
    for (const auto& [lo, hi] : c.energy.bands) bands.push_back({lo, hi});
    json families = json::array();
    for (auto w : c.wavelet.families) families.push_back(to_string(w));
    return {{"groups", groups},
            {"seed", c.seed},
            {"statistics",
             {{"max_moment_order", c.statistics.max_moment_order},
              {"max_joint_order", c.statistics.max_joint_order},
              {"triple_cap", c.statistics.triple_cap},
              {"quadruple_cap", c.statistics.quadruple_cap}}},
            {"entropy",
             {{"bins", c.entropy.bins},
              {"q_grid", c.entropy.q_grid},
              {"apen_m", c.entropy.apen_m},
              {"apen_r", c.entropy.apen_r},
              {"neural_complexity", c.entropy.neural_complexity}}},
            {"ar", {{"orders", c.ar.orders}}},
            {"energy", {{"bands", bands}}},
            {"dct_dst", {{"k", c.dct_dst.k}}},
            {"wavelet", {{"families", families}, {"levels", c.wavelet.levels}}}};
}

FeatureConfig feature_config_from_json(const json& j) {
    FeatureConfig c;
    Fields f(j, "features");
    if (f.has("groups")) {
        c.groups.clear();
        const auto names = f.require<std::vector<std::string>>("groups");
        for (std::size_t i = 0; i < names.size(); ++i) {
            try {
                c.groups.insert(group_from_string(names[i]));
            } catch (const DomainError& e) {
                throw ConfigError(f.path("groups") + "[" + std::to_string(i) + "]", e.what());
            }
        }
        if (c.groups.empty()) throw ConfigError(f.path("groups"), "at least one group is required");
    }
    f.get("seed", c.seed);
    auto need = [](bool ok, const std::string& field, const char* what) {
        if (!ok) throw ConfigError(field, what);
    };
    if (f.has("statistics")) {
        Fields s(f.at("statistics"), f.path("statistics"));
        s.get("max_moment_order", c.statistics.max_moment_order);
        s.get("max_joint_order", c.statistics.max_joint_order);
        s.get("triple_cap", c.statistics.triple_cap);
        s.get("quadruple_cap", c.statistics.quadruple_cap);
        s.finish();
        need(c.statistics.max_moment_order >= 2, s.path("max_moment_order"), "must be at least 2");
        need(c.statistics.max_joint_order >= 2, s.path("max_joint_order"), "must be at least 2");
        need(c.statistics.triple_cap >= 0, s.path("triple_cap"), "must be non-negative");
        need(c.statistics.quadruple_cap >= 0, s.path("quadruple_cap"), "must be non-negative");
    }
    if (f.has("entropy")) {
        Fields e(f.at("entropy"), f.path("entropy"));
        e.get("bins", c.entropy.bins);
        e.get("q_grid", c.entropy.q_grid);
        e.get("apen_m", c.entropy.apen_m);
        e.get("apen_r", c.entropy.apen_r);
        e.get("neural_complexity", c.entropy.neural_complexity);
        e.finish();
        need(c.entropy.bins >= 2, e.path("bins"), "must be at least 2");
        need(c.entropy.apen_m >= 1, e.path("apen_m"), "must be at least 1");
        need(c.entropy.apen_r > 0, e.path("apen_r"), "must be positive");
    }
    if (f.has("ar")) {
        Fields a(f.at("ar"), f.path("ar"));
        a.get("orders", c.ar.orders);
        a.finish();
        for (int o : c.ar.orders) need(o >= 1, a.path("orders"), "orders must be at least 1");
    }
    if (f.has("energy")) {
        Fields e(f.at("energy"), f.path("energy"));
        const auto bands = e.require<std::vector<std::vector<double>>>("bands");
        c.energy.bands.clear();
        for (std::size_t i = 0; i < bands.size(); ++i) {
            const auto& b = bands[i];
            need(b.size() == 2 && b[0] >= 0 && b[1] > b[0], e.path("bands") + "[" + std::to_string(i) + "]",
                 "expected [low, high] with 0 <= low < high");
            c.energy.bands.emplace_back(b[0], b[1]);
        }
        e.finish();
    }
    if (f.has("dct_dst")) {
        Fields d(f.at("dct_dst"), f.path("dct_dst"));
        d.get("k", c.dct_dst.k);
        d.finish();
        need(c.dct_dst.k >= 1, d.path("k"), "must be at least 1");
    }
    if (f.has("wavelet")) {
        Fields w(f.at("wavelet"), f.path("wavelet"));
        if (w.has("families")) {
            c.wavelet.families.clear();
            const auto names = w.require<std::vector<std::string>>("families");
            for (std::size_t i = 0; i < names.size(); ++i) {
                try {
                    c.wavelet.families.push_back(wavelet_from_string(names[i]));
                } catch (const DomainError& e) {
                    throw ConfigError(w.path("families") + "[" + std::to_string(i) + "]", e.what());
                }
            }
        }
        w.get("levels", c.wavelet.levels);
        w.finish();
        need(c.wavelet.levels >= 1, w.path("levels"), "must be at least 1");
    }
    f.finish();
    return c;
}

json to_json(const PreprocessConfig& c) {
    return {{"bandpass", c.bandpass ? json{c.low, c.high} : json(false)},
            {"target_fs", c.target_fs},
            {"window_s", c.window_s},
            {"hop_s", c.hop_s}};
}

namespace {

PreprocessConfig preprocess_from_json(const json& j) {
    PreprocessConfig c;
    Fields f(j, "preprocessing");
    if (f.has("bandpass")) {
        const json& b = f.at("bandpass");
        if (b.is_boolean() && !b.get<bool>()) {
            c.bandpass = false;
        } else {
            const auto edges = Fields::convert<std::vector<double>>(b, f.path("bandpass"));
            if (edges.size() != 2 || !(edges[0] > 0) || !(edges[1] > edges[0]))
                throw ConfigError(f.path("bandpass"), "expected [low, high] with 0 < low < high, or false");
            c.low = edges[0];
            c.high = edges[1];
        }
    }
    f.get("target_fs", c.target_fs);
    f.get("window_s", c.window_s);
    f.get("hop_s", c.hop_s);
    f.finish();
    if (!(c.target_fs > 0)) throw ConfigError(f.path("target_fs"), "must be positive");
    if (!(c.window_s > 0)) throw ConfigError(f.path("window_s"), "must be positive");
    if (!(c.hop_s > 0)) throw ConfigError(f.path("hop_s"), "must be positive");
    return c;
}

DatasetEntry dataset_from_json(const json& j, const std::string& path, const std::filesystem::path& base) {
    DatasetEntry d;
    Fields f(j, path);
    d.spec.name = f.require<std::string>("name");
    if (!safe_name(d.spec.name)) throw ConfigError(f.path("name"), "use letters, digits, '-', '_' or '.'");
    f.get("subject", d.spec.subject);
    if (f.has("tasks")) {
        const auto t = f.require<std::vector<int>>("tasks");
        if (t.size() != 2 || t[0] == t[1]) throw ConfigError(f.path("tasks"), "expected two distinct task codes");
        d.spec.tasks = {t[0], t[1]};
    }
    if (f.has("synth")) {
        d.synth = synth_spec_from_json(f.at("synth"), f.path("synth"));
        f.get("synth_seed", d.synth_seed);
    } else {
        if (!f.has("files")) throw ConfigError(f.path("files"), "missing (give files or synth)");
        const auto files = f.require<std::vector<std::string>>("files");
        if (files.empty()) throw ConfigError(f.path("files"), "at least one file is required");
        for (const auto& p : files) {
            std::filesystem::path fp(p);
            d.spec.files.push_back(fp.is_relative() && !base.empty() ? base / fp : fp);
        }
    }
    if (f.has("format")) {
        const auto fmt = f.require<std::string>("format");
        if (fmt == "csv") d.load.format = FileFormat::Csv;
        else if (fmt == "ascii") d.load.format = FileFormat::AsciiMatrix;
        else throw ConfigError(f.path("format"), "expected 'csv' or 'ascii'");
    }
    d.load.label_column = -1;
    f.get("fs", d.load.fs);
    f.get("has_header", d.load.has_header);
    if (f.has("label_column")) d.load.label_column = f.require<int>("label_column");
    if (!(d.load.fs > 0)) throw ConfigError(f.path("fs"), "must be positive");
    f.finish();
    return d;
}

}  // namespace

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir) {
    RunConfig c;
    Fields f(j, "");
    f.get("seed", c.seed);
    f.get("jobs", c.jobs);
    if (c.jobs < 0) throw ConfigError("jobs", "must be non-negative");
    if (f.has("output_dir")) {
        std::filesystem::path out(f.require<std::string>("output_dir"));
        c.output_dir = out.is_relative() && !base_dir.empty() ? base_dir / out : out;
    }

    const json& ds = f.at("datasets");
    if (!ds.is_array() || ds.empty()) throw ConfigError("datasets", "expected a non-empty array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string p = "datasets[" + std::to_string(i) + "]";
        c.datasets.push_back(dataset_from_json(ds[i], p, base_dir));
        if (!names.insert(c.datasets.back().spec.name).second) throw ConfigError(p + ".name", "duplicate dataset name");
    }

    if (f.has("preprocessing")) c.preprocessing = preprocess_from_json(f.at("preprocessing"));
    if (f.has("features")) c.features = feature_config_from_json(f.at("features"));
    if (f.has("selection")) c.selection = selection_config_from_json(f.at("selection"));
    if (f.has("evaluation")) c.evaluation = evaluation_config_from_json(f.at("evaluation"));

    Hyperparams defaults;
    if (f.has("hyperparams")) defaults = hyperparams_from_json(f.at("hyperparams"));
    if (f.has("classifiers")) {
        const json& cl = f.at("classifiers");
        if (!cl.is_array() || cl.empty()) throw ConfigError("classifiers", "expected a non-empty array");
        std::set<ClassifierKind> seen;
        for (std::size_t i = 0; i < cl.size(); ++i) {
            const std::string p = "classifiers[" + std::to_string(i) + "]";
            ClassifierSpec spec;
            spec.hp = defaults;
            std::string kind;
            if (cl[i].is_string()) {
                kind = cl[i].get<std::string>();
            } else {
                Fields cf(cl[i], p);
                kind = cf.require<std::string>("kind");
                if (cf.has("hyperparams"))
                    spec.hp = nested(p + ".hyperparams", "hyperparams",
                                     [&] { return hyperparams_from_json(cf.at("hyperparams"), defaults); });
                cf.finish();
            }
            try {
                spec.kind = classifier_from_string(kind);
            } catch (const DomainError& e) {
                throw ConfigError(cl[i].is_string() ? p : p + ".kind", e.what());
            }
            if (!seen.insert(spec.kind).second) throw ConfigError(p, "classifier listed twice");
            nested(p + ".hyperparams", "hyperparams", [&] {
                spec.validate();
                return 0;
            });
            c.classifiers.push_back(spec);
        }
    } else {
        for (auto k : kClassifierKinds) {
            ClassifierSpec spec{k, defaults};
            nested("hyperparams", "hyperparams", [&] {
                spec.validate();
                return 0;
            });
            c.classifiers.push_back(spec);
        }
    }
    f.finish();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("not valid JSON: ") + e.what());
    }
    return run_config_from_json(j, path.parent_path());
}

json to_json(const DatasetEntry& d) {
    json dj = {{"name", d.spec.name}, {"subject", d.spec.subject}, {"tasks", {d.spec.tasks.first, d.spec.tasks.second}}};
    if (d.synth) {
        dj["synth"] = to_json(*d.synth);
        dj["synth_seed"] = d.synth_seed;
    } else {
        json files = json::array();
        for (const auto& p : d.spec.files) files.push_back(p.filename().string());
        dj["files"] = files;
        dj["format"] = d.load.format == FileFormat::Csv ? "csv" : "ascii";
        dj["fs"] = d.load.fs;
        dj["has_header"] = d.load.has_header;
        dj["label_column"] = d.load.label_column.value_or(-1);
    }
    return dj;
}

json to_json(const RunConfig& c) {
    json j = result_config(c);
    j["output_dir"] = c.output_dir.string();
    j["jobs"] = c.jobs;
    return j;
}

json result_config(const RunConfig& c) {
    json ds = json::array();
    for (const auto& d : c.datasets) ds.push_back(to_json(d));
    json cls = json::array();
    for (const auto& s : c.classifiers) cls.push_back({{"kind", to_string(s.kind)}, {"hyperparams", to_json(s.hp)}});
    return {{"seed", c.seed},
            {"datasets", ds},
            {"preprocessing", to_json(c.preprocessing)},
            {"features", to_json(c.features)},
            {"selection", to_json(c.selection)},
            {"evaluation", to_json(c.evaluation)},
            {"classifiers", cls}};
}

BenchmarkConfig benchmark_config(const RunConfig& c) {
    BenchmarkConfig b;
    b.evaluation = c.evaluation;
    b.selection = c.selection;
    b.classifiers = c.classifiers;
    b.seed = c.seed;
    b.jobs = c.jobs > 0 ? c.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return b;
}

}  // namespace eegbench
