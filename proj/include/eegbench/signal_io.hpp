#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eegbench {

using Labels = std::vector<int>;
using Index = Eigen::Index;

// Multichannel uniformly-sampled signal. `samples` is channel x time.
struct Recording {
    Eigen::MatrixXd samples;
    double fs = 0.0;
    std::vector<std::string> channel_names;
    std::optional<Labels> labels;
    std::string id;

    Eigen::Index channels() const { return samples.rows(); }
    Eigen::Index length() const { return samples.cols(); }
    double duration() const { return static_cast<double>(length()) / fs; }
};

// Throws StructuralError / DomainError when the recording invariants do not hold.
void validate(const Recording& rec);

// The 32-electrode montage of the reference recordings, in file order.
const std::vector<std::string>& default_montage();

struct Trial {
    Eigen::MatrixXd samples;  // channel x window
    double fs = 0.0;
    int label = 0;
    std::string recording_id;
    Eigen::Index start = 0;
};

// One two-class dataset: a subject and a pair of task codes taken from the
// label column of its source files. Trials labelled tasks.first map to class 0.
struct DatasetSpec {
    std::string name;
    std::string subject;
    std::pair<int, int> tasks{0, 1};
    std::vector<std::filesystem::path> files;
};

void validate(const DatasetSpec& spec);

enum class FileFormat { AsciiMatrix, Csv };

struct LoadOptions {
    FileFormat format = FileFormat::Csv;
    double fs = 512.0;
    bool has_header = false;
    // Column holding per-sample labels; negative values count from the end
    // (-1 = last column). Empty means no label column.
    std::optional<int> label_column;
};

Recording load_recording(const std::filesystem::path& path, const LoadOptions& opts);
// Columns are channels, followed by the label column when labels are present.
void save_recording(const std::filesystem::path& path, const Recording& rec, FileFormat format = FileFormat::Csv);

// Zero-phase band-pass. Requires 0 < low < high < fs/2.
Recording bandpass(const Recording& rec, double low_hz, double high_hz);
// Keeps every (fs/target_fs)-th sample. The ratio must be an integer.
Recording downsample(const Recording& rec, double target_fs);

Eigen::Index window_count(Eigen::Index length, Eigen::Index window, Eigen::Index hop);
// Majority-labelled windows; windows whose label vote ties are dropped.
std::vector<Trial> segment(const Recording& rec, double window_s, double hop_s);

// Keep trials whose label is one of the pair and relabel them 0/1.
std::vector<Trial> select_task_pair(const std::vector<Trial>& trials, std::pair<int, int> tasks);

// --- synthetic recordings ---------------------------------------------------

struct SignalComponent {
    enum class Kind { WhiteNoise, Sine, BandNoise, Autoregressive, CommonNoise };
    Kind kind = Kind::WhiteNoise;
    double amplitude = 1.0;  // std for noise kinds, peak for sine
    double frequency = 0.0;  // sine
    double low = 0.0, high = 0.0;  // band noise
    std::vector<double> coefficients;  // AR: x_t = sum_k c_k x_{t-k} + e_t
};

struct ClassModel {
    int label = 0;
    std::vector<SignalComponent> components;
};

struct SynthSpec {
    double fs = 128.0;
    int channels = 1;
    double segment_seconds = 10.0;
    int segments = 2;  // class blocks, cycled through `classes` in order
    std::vector<ClassModel> classes;
    bool shuffle_blocks = false;
};

void validate(const SynthSpec& spec);
Recording synth_recording(const SynthSpec& spec, std::uint64_t seed);

}  // namespace eegbench
