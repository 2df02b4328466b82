#include "eegbench/signal_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <algorithm>
#include <sstream>

#include "eegbench/errors.hpp"
#include "eegbench/filter.hpp"
#include "eegbench/rng.hpp"

namespace eegbench {

void validate(const Recording& rec) {
    if (rec.samples.rows() < 1 || rec.samples.cols() < 1)
        throw StructuralError("recording needs at least one channel and one sample");
    if (!(rec.fs > 0.0) || !std::isfinite(rec.fs)) throw DomainError("sampling rate must be positive");
    if (!rec.channel_names.empty() && static_cast<Eigen::Index>(rec.channel_names.size()) != rec.samples.rows())
        throw StructuralError("channel name count does not match channel count");
    if (rec.labels && static_cast<Eigen::Index>(rec.labels->size()) != rec.samples.cols())
        throw StructuralError("label count does not match sample count");
    if (rec.labels)
        for (int l : *rec.labels)
            if (l < 0) throw DomainError("labels must be non-negative");
}

const std::vector<std::string>& default_montage() {
    static const std::vector<std::string> montage{
        "Fp1", "AF3", "F7", "F3", "FC1", "FC5", "T7", "C3", "CP1", "CP5", "P7",  "P3", "Pz",  "PO3", "O1", "Oz",
        "O2",  "PO4", "P4", "P8", "CP6", "CP2", "C4", "T8", "FC6", "FC2", "F4", "F8", "AF4", "Fp2", "Fz", "Cz"};
    return montage;
}

void validate(const DatasetSpec& spec) {
    if (spec.tasks.first == spec.tasks.second) throw DomainError("dataset '" + spec.name + "' task pair must be two distinct tasks");
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, FileFormat format) {
    std::vector<std::string_view> out;
    auto is_sep = [&](char c) {
        return format == FileFormat::Csv ? c == ',' || c == ';' : c == ' ' || c == '\t';
    };
    std::size_t i = 0;
    if (format == FileFormat::Csv) {
        while (true) {
            std::size_t j = i;
            while (j < line.size() && !is_sep(line[j])) ++j;
            auto f = line.substr(i, j - i);
            while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
            while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.remove_suffix(1);
            out.push_back(f);
            if (j >= line.size()) break;
            i = j + 1;
        }
    } else {
        while (i < line.size()) {
            while (i < line.size() && is_sep(line[i])) ++i;
            if (i >= line.size()) break;
            std::size_t j = i;
            while (j < line.size() && !is_sep(line[j])) ++j;
            out.push_back(line.substr(i, j - i));
            i = j;
        }
    }
    return out;
}

double parse_double(std::string_view f, long line_no) {
    if (!f.empty() && f.front() == '+') f.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size())
        throw MalformedInputError("cannot parse '" + std::string(f) + "' as a number", line_no);
    return v;
}

}  // namespace

Recording load_recording(const std::filesystem::path& path, const LoadOptions& opts) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::vector<std::vector<double>> rows;
    std::vector<std::string> header;
    std::string line;
    long line_no = 0;
    std::size_t width = 0;
    bool header_pending = opts.has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto fields = split_fields(line, opts.format);
        if (header_pending) {
            for (auto f : fields) header.emplace_back(f);
            width = header.size();
            header_pending = false;
            continue;
        }
        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw StructuralError("row width " + std::to_string(fields.size()) + " differs from " + std::to_string(width) +
                                  " at line " + std::to_string(line_no));
        std::vector<double> row;
        row.reserve(fields.size());
        for (auto f : fields) row.push_back(parse_double(f, line_no));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw MalformedInputError("no data rows in " + path.string());

    std::optional<std::size_t> label_col;
    if (opts.label_column) {
        const int c = *opts.label_column;
        const long idx = c < 0 ? static_cast<long>(width) + c : c;
        if (idx < 0 || idx >= static_cast<long>(width)) throw DomainError("label column out of range");
        label_col = static_cast<std::size_t>(idx);
    }
    const std::size_t n_channels = width - (label_col ? 1 : 0);
    if (n_channels == 0) throw StructuralError("no channel columns");

    Recording rec;
    rec.fs = opts.fs;
    rec.id = path.stem().string();
    rec.samples.resize(static_cast<Eigen::Index>(n_channels), static_cast<Eigen::Index>(rows.size()));
    if (label_col) rec.labels = Labels(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        Eigen::Index ch = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (label_col && c == *label_col) {
                const double v = rows[t][c];
                if (v != std::round(v) || v < 0)
                    throw MalformedInputError("label must be a non-negative integer",
                                              static_cast<long>(t) + 1 + (opts.has_header ? 1 : 0));
                (*rec.labels)[t] = static_cast<int>(v);
            } else {
                rec.samples(ch++, static_cast<Eigen::Index>(t)) = rows[t][c];
            }
        }
    }
    if (!header.empty()) {
        for (std::size_t c = 0; c < width; ++c)
            if (!label_col || c != *label_col) rec.channel_names.push_back(header[c]);
    } else if (n_channels == default_montage().size()) {
        rec.channel_names = default_montage();
    } else {
        for (std::size_t c = 0; c < n_channels; ++c) rec.channel_names.push_back("ch" + std::to_string(c + 1));
    }
    validate(rec);
    return rec;
}

void save_recording(const std::filesystem::path& path, const Recording& rec, FileFormat format) {
    validate(rec);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    const char sep = format == FileFormat::Csv ? ',' : ' ';
    char buf[32];
    for (Eigen::Index t = 0; t < rec.length(); ++t) {
        for (Eigen::Index c = 0; c < rec.channels(); ++c) {
            if (c) out << sep;
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, rec.samples(c, t));
            out.write(buf, p - buf);
        }
        if (rec.labels) out << sep << (*rec.labels)[static_cast<std::size_t>(t)];
        out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
}

Recording bandpass(const Recording& rec, double low_hz, double high_hz) {
    validate(rec);
    if (!(low_hz > 0.0) || !(high_hz > low_hz) || !(high_hz < rec.fs / 2.0))
        throw DomainError("band edges must satisfy 0 < low < high < fs/2");
    // The low-pass side is steep enough to keep 40 Hz within 5% after a 45 Hz
    // edge while rejecting 60 Hz mains.
    auto sos = butterworth<double>(4, low_hz, rec.fs, FilterType::HighPass);
    auto lp = butterworth<double>(12, high_hz, rec.fs, FilterType::LowPass);
    sos.insert(sos.end(), lp.begin(), lp.end());

    Recording out = rec;
    for (Eigen::Index c = 0; c < rec.channels(); ++c) out.samples.row(c) = sosfiltfilt(sos, rec.samples.row(c).transpose()).transpose();
    return out;
}

Recording downsample(const Recording& rec, double target_fs) {
    validate(rec);
    if (!(target_fs > 0.0)) throw DomainError("target rate must be positive");
    const double ratio = rec.fs / target_fs;
    const auto step = static_cast<Eigen::Index>(std::llround(ratio));
    if (step < 1 || std::abs(ratio - static_cast<double>(step)) > 1e-9 * ratio)
        throw DomainError("sampling rate ratio must be an integer");

    const Eigen::Index n = (rec.length() + step - 1) / step;
    Recording out;
    out.fs = target_fs;
    out.id = rec.id;
    out.channel_names = rec.channel_names;
    out.samples.resize(rec.channels(), n);
    for (Eigen::Index i = 0; i < n; ++i) out.samples.col(i) = rec.samples.col(i * step);
    if (rec.labels) {
        out.labels = Labels(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) (*out.labels)[i] = (*rec.labels)[static_cast<std::size_t>(i * step)];
    }
    return out;
}

Eigen::Index window_count(Eigen::Index length, Eigen::Index window, Eigen::Index hop) {
    if (window <= 0 || hop <= 0) throw DomainError("window and hop must be positive");
    if (length < window) return 0;
    return (length - window) / hop + 1;
}

std::vector<Trial> segment(const Recording& rec, double window_s, double hop_s) {
    validate(rec);
    if (!(window_s > 0.0) || !(hop_s > 0.0) || hop_s > window_s) throw DomainError("need window > 0 and 0 < hop <= window");
    if (!rec.labels) throw DomainError("segmenting requires per-sample labels");
    const auto window = static_cast<Eigen::Index>(std::llround(window_s * rec.fs));
    const auto hop = static_cast<Eigen::Index>(std::llround(hop_s * rec.fs));
    const Eigen::Index count = window_count(rec.length(), window, hop);

    std::vector<Trial> trials;
    trials.reserve(static_cast<std::size_t>(count));
    const Labels& labels = *rec.labels;
    for (Eigen::Index w = 0; w < count; ++w) {
        const Eigen::Index start = w * hop;
        std::map<int, Eigen::Index> votes;
        for (Eigen::Index t = start; t < start + window; ++t) ++votes[labels[static_cast<std::size_t>(t)]];
        int best = -1;
        Eigen::Index best_count = -1;
        bool tie = false;
        for (auto [label, n] : votes) {
            if (n > best_count) {
                best = label;
                best_count = n;
                tie = false;
            } else if (n == best_count) {
                tie = true;
            }
        }
        if (tie) continue;
        trials.push_back(Trial{rec.samples.middleCols(start, window), rec.fs, best, rec.id, start});
    }
    return trials;
}

std::vector<Trial> select_task_pair(const std::vector<Trial>& trials, std::pair<int, int> tasks) {
    if (tasks.first == tasks.second) throw DomainError("task pair must be two distinct tasks");
    std::vector<Trial> out;
    for (const auto& t : trials) {
        if (t.label != tasks.first && t.label != tasks.second) continue;
        Trial copy = t;
        copy.label = t.label == tasks.first ? 0 : 1;
        out.push_back(std::move(copy));
    }
    return out;
}

void validate(const SynthSpec& spec) {
    if (!(spec.fs > 0.0)) throw DomainError("synth fs must be positive");
    if (spec.channels < 1) throw DomainError("synth needs at least one channel");
    if (!(spec.segment_seconds > 0.0)) throw DomainError("synth segment length must be positive");
    if (spec.segments < 1) throw DomainError("synth needs at least one segment");
    if (spec.classes.empty()) throw DomainError("synth needs at least one class model");
    for (const auto& cls : spec.classes) {
        if (cls.label < 0) throw DomainError("synth class labels must be non-negative");
        for (const auto& c : cls.components) {
            if (!(c.amplitude >= 0.0)) throw DomainError("component amplitude must be non-negative");
            switch (c.kind) {
                case SignalComponent::Kind::Sine:
                    if (!(c.frequency > 0.0) || !(c.frequency < spec.fs / 2)) throw DomainError("sine frequency outside (0, fs/2)");
                    break;
                case SignalComponent::Kind::BandNoise:
                    if (!(c.low > 0.0) || !(c.high > c.low) || !(c.high < spec.fs / 2))
                        throw DomainError("band noise edges must satisfy 0 < low < high < fs/2");
                    break;
                case SignalComponent::Kind::Autoregressive:
                    if (c.coefficients.empty()) throw DomainError("AR component needs coefficients");
                    break;
                default:
                    break;
            }
        }
    }
}

namespace {

Eigen::VectorXd white(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

Eigen::VectorXd render(const SignalComponent& c, const SynthSpec& spec, Eigen::Index n, Eigen::Index offset,
                       const Eigen::VectorXd& common, Rng& rng) {
    using K = SignalComponent::Kind;
    switch (c.kind) {
        case K::WhiteNoise:
            return c.amplitude * white(rng, n);
        case K::CommonNoise:
            return c.amplitude * common;
        case K::Sine: {
            const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            Eigen::VectorXd v(n);
            for (Eigen::Index i = 0; i < n; ++i)
                v(i) = c.amplitude *
                       std::sin(2.0 * std::numbers::pi * c.frequency * static_cast<double>(offset + i) / spec.fs + phase);
            return v;
        }
        case K::BandNoise: {
            // Filter a longer stretch and keep the middle to avoid edge transients.
            const Eigen::Index guard = static_cast<Eigen::Index>(std::ceil(2.0 * spec.fs));
            Eigen::VectorXd raw = white(rng, n + 2 * guard);
            auto sos = butterworth<double>(4, c.low, spec.fs, FilterType::HighPass);
            auto lp = butterworth<double>(8, c.high, spec.fs, FilterType::LowPass);
            sos.insert(sos.end(), lp.begin(), lp.end());
            Eigen::VectorXd v = sosfiltfilt(sos, raw).segment(guard, n);
            const double rms = std::sqrt(v.squaredNorm() / static_cast<double>(n));
            return rms > 0.0 ? Eigen::VectorXd(v * (c.amplitude / rms)) : v;
        }
        case K::Autoregressive: {
            const auto p = static_cast<Eigen::Index>(c.coefficients.size());
            const Eigen::Index burn = 500;
            Eigen::VectorXd x = Eigen::VectorXd::Zero(n + burn);
            for (Eigen::Index t = 0; t < n + burn; ++t) {
                double v = c.amplitude * rng.normal();
                for (Eigen::Index k = 1; k <= p && k <= t; ++k) v += c.coefficients[k - 1] * x(t - k);
                x(t) = v;
            }
            return x.tail(n);
        }
    }
    return Eigen::VectorXd::Zero(n);
}

}  // namespace

Recording synth_recording(const SynthSpec& spec, std::uint64_t seed) {
    validate(spec);
    Rng rng(seed);
    const auto seg_len = static_cast<Eigen::Index>(std::llround(spec.segment_seconds * spec.fs));
    const Eigen::Index total = seg_len * spec.segments;

    std::vector<int> order(static_cast<std::size_t>(spec.segments));
    for (int s = 0; s < spec.segments; ++s) order[static_cast<std::size_t>(s)] = s % static_cast<int>(spec.classes.size());
    if (spec.shuffle_blocks) rng.shuffle(order.begin(), order.end());

    Recording rec;
    rec.fs = spec.fs;
    rec.samples = Eigen::MatrixXd::Zero(spec.channels, total);
    rec.labels = Labels(static_cast<std::size_t>(total));
    for (int c = 0; c < spec.channels; ++c) rec.channel_names.push_back("ch" + std::to_string(c + 1));

    for (int s = 0; s < spec.segments; ++s) {
        const ClassModel& model = spec.classes[static_cast<std::size_t>(order[static_cast<std::size_t>(s)])];
        const Eigen::Index offset = s * seg_len;
        const Eigen::VectorXd common = white(rng, seg_len);
        for (int ch = 0; ch < spec.channels; ++ch)
            for (const auto& comp : model.components)
                rec.samples.row(ch).segment(offset, seg_len) += render(comp, spec, seg_len, offset, common, rng).transpose();
        std::fill_n(rec.labels->begin() + offset, seg_len, model.label);
    }
    return rec;
}

}  // namespace eegbench
