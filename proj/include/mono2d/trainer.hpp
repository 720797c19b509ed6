// Desk-scale joint-training demonstration: synthetic band-segmentation data
// with scripted domain shifts, a minimal pixelwise head, soft-Dice +
// cross-entropy loss, Adam with cosine annealing, and an SSDG-style
// evaluation of raw-input vs layer-feature models.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mono2d/autodiff.hpp"

namespace mono2d {

// Which degradations a shifted domain applies and with what ranges. With
// preserve_range set, contrast/offset are drawn jointly so the affine map
// keeps the image inside [0,1] without clipping (the invariance-backed
// domains rely on this).
struct DomainSpec {
    std::string name = "source";
    bool use_contrast = false;
    double contrast_lo = 0.4, contrast_hi = 1.6;
    bool use_offset = false;
    double offset_lo = -0.2, offset_hi = 0.2;
    bool preserve_range = false;
    bool use_gamma = false;
    double gamma_lo = 0.5, gamma_hi = 2.0;
    bool use_speckle = false;
    double speckle_lo = 0.1, speckle_hi = 0.3;

    void validate() const;

    static DomainSpec identity();
    static DomainSpec contrast_offset();
    static DomainSpec gamma_only();
    static DomainSpec speckle_only();
    static DomainSpec mixed();
    // The default shifted-domain suite, in reporting order.
    static std::vector<DomainSpec> default_shifted();
};

struct SyntheticSample {
    RealField image; // [0,1]
    RealField mask;  // {0,1}
    std::string domain_id;
};

// Deterministic per (seed, index); the clean rendering of sample i does not
// depend on the domain spec, so differently shifted sets stay pixel-paired.
std::vector<SyntheticSample> generate_dataset(int count, int height, int width, const DomainSpec& spec,
                                              std::uint64_t seed);

// 2|A.B| / (|A| + |B|); 1.0 when both masks are empty.
double dice_score(const RealField& pred_mask, const RealField& true_mask);

struct TrainConfig {
    double learning_rate = 1e-3;
    double min_lr = 1e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    int epochs = 200;
    int batch_size = 8;
    std::uint64_t seed = 42;

    void validate() const;
};

// Cosine annealing from lr to min_lr across epochs; epoch 0 gives lr, the
// final epoch gives exactly min_lr.
double cosine_lr(int epoch, int total_epochs, double lr, double min_lr);

class Adam {
public:
    Adam(std::size_t n, double beta1, double beta2, double eps = 1e-8);
    void set_lr(double lr) { lr_ = lr; }
    void step(std::vector<double>& params, const std::vector<double>& grads);
    long steps_taken() const { return t_; }

private:
    double lr_ = 1e-3, beta1_, beta2_, eps_;
    std::vector<double> m_, v_;
    long t_ = 0;
};

// Pixelwise affine map over channels, a fixed 3x3 binomial smoothing
// convolution, and a logistic output.
class HeadModel {
public:
    HeadModel() = default;
    explicit HeadModel(int channels);

    int channels() const { return static_cast<int>(weights_.size()); }
    double weight(int c) const { return weights_[c]; }
    double bias() const { return bias_; }
    double& weight(int c) { return weights_[c]; }
    double& bias() { return bias_; }

    RealField logits(const std::vector<const RealField*>& features) const;
    RealField probabilities(const std::vector<const RealField*>& features) const;

    void save(std::ostream& out, const std::string& prefix = "head.") const;
    static HeadModel load(std::istream& in, const std::string& prefix = "head.");
    static HeadModel from_kv(const kvtext::Map& kv, const std::string& prefix = "head.");

    bool operator==(const HeadModel&) const = default;

private:
    std::vector<double> weights_;
    double bias_ = 0.0;
};

// Zero-padded 3x3 binomial smoothing; self-adjoint, used by both the head
// forward pass and its backward pass.
RealField smooth3x3(const RealField& field);

// Feature-extraction settings shared by training, evaluation and the CLI.
struct FeatureSetup {
    bool use_mono2d = true;
    ChannelMode mode = ChannelMode::Both;
    bool freeze_bank = false;
    bool concat_input = false;
    bool rescale_per_image = true;
    LowPassSpec lpf;
    double epsilon = 1e-12;

    int channel_count() const {
        if (!use_mono2d) return 1;
        return (mode == ChannelMode::Both ? 2 : 1) + (concat_input ? 1 : 0);
    }
    ForwardOptions forward_options() const { return ForwardOptions{lpf, mode, epsilon}; }
};

struct EpochLog {
    int epoch = 0;
    double lr = 0.0;
    double train_loss = 0.0;
    double val_dice = 0.0;
};

struct TrainResult {
    FilterBank bank;
    HeadModel head;
    double best_val_dice = 0.0;
    int best_epoch = -1;
    std::vector<EpochLog> log;
};

// Minimizes mean soft-Dice + binary cross-entropy with Adam; the bank is
// updated only when use_mono2d and not freeze_bank. Keeps the best epoch by
// validation Dice. Throws DivergenceError on a non-finite loss.
TrainResult train(const TrainConfig& config, const FeatureSetup& setup, const FilterBank& initial_bank,
                  const std::vector<SyntheticSample>& train_set, const std::vector<SyntheticSample>& val_set);

struct DomainDice {
    std::string domain;
    double mean_dice = 0.0;
};

struct SsdgReport {
    double source_val_dice = 0.0;
    std::vector<DomainDice> domains;
    double shifted_mean_dice = 0.0;
};

SsdgReport evaluate_ssdg(const FeatureSetup& setup, const FilterBank& bank, const HeadModel& head,
                         const std::vector<SyntheticSample>& source_val,
                         const std::vector<std::pair<std::string, std::vector<SyntheticSample>>>& shifted_sets);

// Source train/val split plus per-domain shifted copies of the val samples.
struct SsdgSuite {
    std::vector<SyntheticSample> train;
    std::vector<SyntheticSample> val;
    std::vector<std::pair<std::string, std::vector<SyntheticSample>>> shifted_val;
};

SsdgSuite make_ssdg_suite(int count, int height, int width, std::uint64_t seed, double val_fraction,
                          const std::vector<DomainSpec>& shifted_domains);

// Per-sample prediction helper (probabilities thresholded at 0.5).
RealField predict_mask(const FeatureSetup& setup, const FilterBank& bank, const HeadModel& head,
                       const RealField& image);

void write_metrics_csv(std::ostream& out, std::uint64_t seed, const std::string& label,
                       const std::vector<EpochLog>& log, const SsdgReport* report);

} // namespace mono2d
