#include "mono2d/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "mono2d/kvtext.hpp"
#include "mono2d/parallel.hpp"

namespace mono2d {

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

void DomainSpec::validate() const {
    if (use_contrast && !(contrast_lo > 0.0 && contrast_lo <= contrast_hi))
        throw ConfigError("domain '" + name + "': contrast range invalid");
    if (use_offset && !(offset_lo <= offset_hi))
        throw ConfigError("domain '" + name + "': offset range invalid");
    if (use_gamma && !(gamma_lo > 0.0 && gamma_lo <= gamma_hi))
        throw ConfigError("domain '" + name + "': gamma range invalid");
    if (use_speckle && !(speckle_lo >= 0.0 && speckle_lo <= speckle_hi && speckle_hi < 1.0))
        throw ConfigError("domain '" + name + "': speckle range invalid");
}

DomainSpec DomainSpec::identity() { return DomainSpec{}; }

DomainSpec DomainSpec::contrast_offset() {
    DomainSpec d;
    d.name = "contrast_offset";
    d.use_contrast = true;
    d.use_offset = true;
    d.preserve_range = true;
    return d;
}

DomainSpec DomainSpec::gamma_only() {
    DomainSpec d;
    d.name = "gamma";
    d.use_gamma = true;
    return d;
}

DomainSpec DomainSpec::speckle_only() {
    DomainSpec d;
    d.name = "speckle";
    d.use_speckle = true;
    return d;
}

DomainSpec DomainSpec::mixed() {
    DomainSpec d;
    d.name = "mixed";
    d.use_contrast = true;
    d.use_offset = true;
    d.use_gamma = true;
    d.use_speckle = true;
    return d;
}

std::vector<DomainSpec> DomainSpec::default_shifted() {
    return {contrast_offset(), gamma_only(), speckle_only(), mixed()};
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (a + 1) + 0xBF58476D1CE4E5B9ull * (b + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

constexpr std::uint64_t kRenderStream = 0xC1EA5ull;
constexpr std::uint64_t kDomainStream = 0xD0Dull;

// Smooth dark band on a brighter speckled background. The clean rendering
// stays inside [0.3, 0.7] so the contrast/offset domains can always find a
// range-preserving affine map.
SyntheticSample render_clean(int height, int width, std::uint64_t seed, int index) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(index), kRenderStream));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double cycles = 0.6 + 0.8 * u01(rng);
    const double phase = 2.0 * M_PI * u01(rng);
    const double center = 0.42 + 0.16 * u01(rng); // fraction of height
    const double amp = 0.06 + 0.08 * u01(rng);    // fraction of height
    const double thickness = (0.09 + 0.07 * u01(rng)) * height;
    const double edge = 0.75; // px, softness of the rendered band edge
    const double background = 0.62, band_level = 0.36, speckle_amp = 0.10;

    SyntheticSample s;
    s.image = RealField(height, width);
    s.mask = RealField(height, width);
    s.domain_id = "source";
    std::vector<double> centerline(width);
    for (int c = 0; c < width; ++c)
        centerline[c] = height * (center + amp * std::sin(2.0 * M_PI * cycles * c / width + phase));
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const double d = std::abs(r - centerline[c]) - 0.5 * thickness;
            const double band_weight = 1.0 / (1.0 + std::exp(d / edge));
            double v = background + (band_level - background) * band_weight;
            v *= 1.0 + speckle_amp * (2.0 * u01(rng) - 1.0);
            s.image(r, c) = std::min(std::max(v, 0.0), 1.0);
            s.mask(r, c) = d <= 0.0 ? 1.0 : 0.0;
        }
    }
    return s;
}

void apply_domain(RealField& img, const DomainSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    if (spec.use_gamma) {
        const double g = spec.gamma_lo + u01(rng) * (spec.gamma_hi - spec.gamma_lo);
        for (auto& v : img.values()) v = std::pow(v, g);
    }
    double a = 1.0, b = 0.0;
    if (spec.use_contrast) a = spec.contrast_lo + u01(rng) * (spec.contrast_hi - spec.contrast_lo);
    if (spec.use_offset) {
        if (spec.preserve_range) {
            const auto [m, big] = min_max(img);
            const double feas_lo = -a * m, feas_hi = 1.0 - a * big;
            const double lo = std::max(spec.offset_lo, feas_lo);
            const double hi = std::min(spec.offset_hi, feas_hi);
            // Prefer range preservation over the configured offset window if
            // the two cannot both hold.
            b = (lo <= hi) ? lo + u01(rng) * (hi - lo) : 0.5 * (feas_lo + feas_hi);
        } else {
            b = spec.offset_lo + u01(rng) * (spec.offset_hi - spec.offset_lo);
        }
    }
    if (spec.use_contrast || spec.use_offset)
        for (auto& v : img.values()) v = a * v + b;
    if (spec.use_speckle) {
        const double s = spec.speckle_lo + u01(rng) * (spec.speckle_hi - spec.speckle_lo);
        for (auto& v : img.values()) v *= 1.0 + s * (2.0 * u01(rng) - 1.0);
    }
    for (auto& v : img.values()) v = std::min(std::max(v, 0.0), 1.0);
}

} // namespace

std::vector<SyntheticSample> generate_dataset(int count, int height, int width, const DomainSpec& spec,
                                              std::uint64_t seed) {
    if (count < 1) throw ConfigError("dataset count must be >= 1");
    spec.validate();
    std::vector<SyntheticSample> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        SyntheticSample s = render_clean(height, width, seed, i);
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(i), kDomainStream));
        apply_domain(s.image, spec, rng);
        s.domain_id = spec.name;
        out.push_back(std::move(s));
    }
    return out;
}

double dice_score(const RealField& pred_mask, const RealField& true_mask) {
    if (!pred_mask.same_shape(true_mask)) throw InvalidShapeError("dice_score: shape mismatch");
    double inter = 0.0, total = 0.0;
    for (std::size_t i = 0; i < pred_mask.size(); ++i) {
        const bool a = pred_mask[i] > 0.5, b = true_mask[i] > 0.5;
        inter += (a && b) ? 1.0 : 0.0;
        total += (a ? 1.0 : 0.0) + (b ? 1.0 : 0.0);
    }
    if (total == 0.0) return 1.0;
    return 2.0 * inter / total;
}

// ---------------------------------------------------------------------------
// Optimizer and schedule
// ---------------------------------------------------------------------------

void TrainConfig::validate() const {
    if (!(learning_rate > min_lr && min_lr > 0.0)) throw ConfigError("need learning_rate > min_lr > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
        throw ConfigError("Adam betas must be in [0,1)");
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

double cosine_lr(int epoch, int total_epochs, double lr, double min_lr) {
    if (total_epochs <= 1) return lr;
    const double t = static_cast<double>(epoch) / (total_epochs - 1);
    return min_lr + 0.5 * (lr - min_lr) * (1.0 + std::cos(M_PI * t));
}

Adam::Adam(std::size_t n, double beta1, double beta2, double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw InvalidShapeError("Adam: parameter/gradient size mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
        const double mhat = m_[i] / bc1;
        const double vhat = v_[i] / bc2;
        params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
}

// ---------------------------------------------------------------------------
// Head model
// ---------------------------------------------------------------------------

HeadModel::HeadModel(int channels) {
    if (channels < 1) throw ConfigError("head needs at least one channel");
    weights_.assign(channels, 0.0);
}

RealField smooth3x3(const RealField& field) {
    static constexpr double k[3][3] = {{1.0 / 16, 2.0 / 16, 1.0 / 16},
                                       {2.0 / 16, 4.0 / 16, 2.0 / 16},
                                       {1.0 / 16, 2.0 / 16, 1.0 / 16}};
    const int h = field.height(), w = field.width();
    RealField out(h, w, 0.0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int dr = -1; dr <= 1; ++dr) {
                const int rr = r + dr;
                if (rr < 0 || rr >= h) continue;
                for (int dc = -1; dc <= 1; ++dc) {
                    const int cc = c + dc;
                    if (cc < 0 || cc >= w) continue;
                    acc += k[dr + 1][dc + 1] * field(rr, cc);
                }
            }
            out(r, c) = acc;
        }
    }
    return out;
}

RealField HeadModel::logits(const std::vector<const RealField*>& features) const {
    if (features.size() != weights_.size())
        throw InvalidShapeError("head: feature channel count mismatch");
    RealField z(features[0]->height(), features[0]->width(), bias_);
    for (std::size_t c = 0; c < features.size(); ++c) {
        if (!features[c]->same_shape(z)) throw InvalidShapeError("head: feature shape mismatch");
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += weights_[c] * (*features[c])[i];
    }
    return smooth3x3(z);
}

RealField HeadModel::probabilities(const std::vector<const RealField*>& features) const {
    RealField z = logits(features);
    for (auto& v : z.values()) v = stable_sigmoid(v);
    return z;
}

void HeadModel::save(std::ostream& out, const std::string& prefix) const {
    using kvtext::format_double;
    out << prefix << "channels " << channels() << "\n";
    for (int c = 0; c < channels(); ++c)
        out << prefix << "weight." << c << " " << format_double(weights_[c]) << "\n";
    out << prefix << "bias " << format_double(bias_) << "\n";
}

HeadModel HeadModel::load(std::istream& in, const std::string& prefix) {
    return from_kv(kvtext::parse(in), prefix);
}

HeadModel HeadModel::from_kv(const kvtext::Map& kv, const std::string& prefix) {
    const long channels = kvtext::require_long(kv, prefix + "channels");
    if (channels < 1) throw CheckpointError("head checkpoint has invalid channel count");
    HeadModel head(static_cast<int>(channels));
    for (long c = 0; c < channels; ++c)
        head.weights_[c] = kvtext::require_double(kv, prefix + "weight." + std::to_string(c));
    head.bias_ = kvtext::require_double(kv, prefix + "bias");
    return head;
}

// ---------------------------------------------------------------------------
// Feature extraction for the head
// ---------------------------------------------------------------------------

namespace {

struct SampleFeatures {
    std::vector<RealField> channels;
    std::optional<TangentBundle> bundle;
    int phase_idx = -1;
    int asym_idx = -1;

    std::vector<const RealField*> channel_ptrs() const {
        std::vector<const RealField*> out;
        out.reserve(channels.size());
        for (const auto& c : channels) out.push_back(&c);
        return out;
    }
};

// Features (and tangents when requested) for a batch of images sharing one
// compiled kernel snapshot. Honors per-image vs per-batch rescaling.
std::vector<SampleFeatures> batch_features(const FeatureSetup& setup, const CompiledFilters* filters,
                                           const std::vector<const RealField*>& images, bool want_tangents) {
    std::vector<SampleFeatures> out(images.size());
    if (!setup.use_mono2d) {
        for (std::size_t i = 0; i < images.size(); ++i) out[i].channels = {*images[i]};
        return out;
    }
    const ForwardOptions options = setup.forward_options();
    std::vector<PhaseFeatures> feats(images.size());
    parallel_for(images.size(), [&](std::size_t i) {
        const ComplexField spectrum = fft2(*images[i]);
        if (want_tangents) {
            auto [f, bundle] = forward_with_tangents(spectrum, *filters, options);
            feats[i] = std::move(f);
            out[i].bundle = std::move(bundle);
        } else {
            feats[i] = forward(spectrum, *filters, options);
        }
    });
    double phase_lo = 0.0, phase_hi = 0.0, asym_lo = 0.0, asym_hi = 0.0;
    if (!setup.rescale_per_image) {
        phase_lo = asym_lo = std::numeric_limits<double>::infinity();
        phase_hi = asym_hi = -phase_lo;
        for (const auto& f : feats) {
            phase_lo = std::min(phase_lo, f.phase_lo);
            phase_hi = std::max(phase_hi, f.phase_hi);
            asym_lo = std::min(asym_lo, f.asym_lo);
            asym_hi = std::max(asym_hi, f.asym_hi);
        }
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        PhaseFeatures& f = feats[i];
        SampleFeatures& s = out[i];
        if (!setup.rescale_per_image) {
            if (f.has_phase()) f.phase = rescale_with_stats(f.raw_phase, phase_lo, phase_hi);
            if (f.has_asym()) f.asym = rescale_with_stats(f.raw_asym, asym_lo, asym_hi);
            if (s.bundle) s.bundle->set_ranges(phase_hi - phase_lo, asym_hi - asym_lo);
        }
        if (f.has_phase()) {
            s.phase_idx = static_cast<int>(s.channels.size());
            s.channels.push_back(std::move(f.phase));
        }
        if (f.has_asym()) {
            s.asym_idx = static_cast<int>(s.channels.size());
            s.channels.push_back(std::move(f.asym));
        }
        if (setup.concat_input) s.channels.push_back(*images[i]);
    }
    return out;
}

struct LossGrad {
    double loss = 0.0;
    RealField dlogits; // dL/d(smoothed logits)
};

// Soft-Dice + binary cross-entropy on probabilities, equally weighted.
LossGrad segmentation_loss(const RealField& logits, const RealField& mask) {
    const std::size_t n = logits.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    constexpr double smooth = 1e-7;
    RealField prob(logits.height(), logits.width());
    double bce = 0.0, sum_p = 0.0, sum_m = 0.0, sum_pm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = logits[i], m = mask[i];
        bce += std::max(z, 0.0) - z * m + std::log1p(std::exp(-std::abs(z)));
        const double p = stable_sigmoid(z);
        prob[i] = p;
        sum_p += p;
        sum_m += m;
        sum_pm += p * m;
    }
    bce *= inv_n;
    const double denom = sum_p + sum_m + smooth;
    const double soft_dice = (2.0 * sum_pm + smooth) / denom;
    LossGrad out;
    out.loss = bce + (1.0 - soft_dice);
    out.dlogits = RealField(logits.height(), logits.width());
    for (std::size_t i = 0; i < n; ++i) {
        const double p = prob[i], m = mask[i];
        const double d_bce = (p - m) * inv_n;
        const double d_dice_dp = -(2.0 * m * denom - (2.0 * sum_pm + smooth)) / (denom * denom);
        out.dlogits[i] = d_bce + d_dice_dp * p * (1.0 - p);
    }
    return out;
}

struct SampleGrad {
    double loss = 0.0;
    std::vector<double> d_weights;
    double d_bias = 0.0;
    std::vector<double> d_bank;
};

SampleGrad sample_loss_and_grads(const HeadModel& head, const SampleFeatures& features,
                                 const RealField& mask, bool want_bank_grads) {
    const auto ptrs = features.channel_ptrs();
    const RealField z = head.logits(ptrs);
    LossGrad lg = segmentation_loss(z, mask);
    SampleGrad out;
    out.loss = lg.loss;
    // The smoothing kernel is symmetric with zero padding, so the backward
    // pass through it is the same convolution.
    const RealField g = smooth3x3(lg.dlogits);
    out.d_weights.assign(ptrs.size(), 0.0);
    for (std::size_t c = 0; c < ptrs.size(); ++c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * (*ptrs[c])[i];
        out.d_weights[c] = acc;
    }
    out.d_bias = field_sum(g);
    if (want_bank_grads && features.bundle) {
        RealField d_phase, d_asym;
        const RealField* d_phase_ptr = nullptr;
        const RealField* d_asym_ptr = nullptr;
        if (features.phase_idx >= 0) {
            d_phase = g;
            const double w = head.weight(features.phase_idx);
            for (auto& v : d_phase.values()) v *= w;
            d_phase_ptr = &d_phase;
        }
        if (features.asym_idx >= 0) {
            d_asym = g;
            const double w = head.weight(features.asym_idx);
            for (auto& v : d_asym.values()) v *= w;
            d_asym_ptr = &d_asym;
        }
        out.d_bank = grad_of_scalar(*features.bundle, d_phase_ptr, d_asym_ptr);
    }
    return out;
}

double mean_val_dice(const FeatureSetup& setup, const FilterBank& bank, const HeadModel& head,
                     const std::vector<SyntheticSample>& val_set) {
    if (val_set.empty()) return 0.0;
    const int h = val_set[0].image.height(), w = val_set[0].image.width();
    CompiledFilters filters;
    if (setup.use_mono2d) filters = compile_filters(h, w, bank, setup.lpf, false);
    std::vector<const RealField*> images;
    images.reserve(val_set.size());
    for (const auto& s : val_set) images.push_back(&s.image);
    const auto features = batch_features(setup, &filters, images, false);
    std::vector<double> dices(val_set.size());
    parallel_for(val_set.size(), [&](std::size_t i) {
        RealField prob = head.probabilities(features[i].channel_ptrs());
        for (auto& v : prob.values()) v = v >= 0.5 ? 1.0 : 0.0;
        dices[i] = dice_score(prob, val_set[i].mask);
    });
    return std::accumulate(dices.begin(), dices.end(), 0.0) / static_cast<double>(dices.size());
}

} // namespace

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

TrainResult train(const TrainConfig& config, const FeatureSetup& setup, const FilterBank& initial_bank,
                  const std::vector<SyntheticSample>& train_set, const std::vector<SyntheticSample>& val_set) {
    config.validate();
    if (train_set.empty()) throw ConfigError("train: empty training set");
    const int h = train_set[0].image.height(), w = train_set[0].image.width();
    for (const auto& s : train_set)
        if (!s.image.same_shape(h, w) || !s.mask.same_shape(h, w))
            throw InvalidShapeError("train: inconsistent sample shapes");

    const bool train_bank = setup.use_mono2d && !setup.freeze_bank;
    const int channel_count = setup.channel_count();
    const int head_np = channel_count + 1;
    const int bank_np = train_bank ? initial_bank.parameter_count() : 0;

    TrainResult result;
    result.bank = initial_bank;
    result.head = HeadModel(channel_count);
    Adam adam(static_cast<std::size_t>(head_np + bank_np), config.beta1, config.beta2);

    // With a fixed bank (frozen or raw input) features never change; extract
    // them once. Valid only for per-image rescaling, which has no cross-batch
    // coupling.
    std::vector<SampleFeatures> cached_features;
    const bool can_cache = !train_bank && setup.rescale_per_image;
    std::vector<const RealField*> all_images;
    all_images.reserve(train_set.size());
    for (const auto& s : train_set) all_images.push_back(&s.image);
    CompiledFilters fixed_filters;
    if (!train_bank && setup.use_mono2d) fixed_filters = compile_filters(h, w, result.bank, setup.lpf, false);
    if (can_cache) cached_features = batch_features(setup, &fixed_filters, all_images, false);

    FilterBank best_bank = result.bank;
    HeadModel best_head = result.head;
    double best_dice = -1.0;
    int best_epoch = -1;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double lr = cosine_lr(epoch, config.epochs, config.learning_rate, config.min_lr);
        adam.set_lr(lr);
        std::mt19937_64 shuffle_rng(mix_seed(config.seed, static_cast<std::uint64_t>(epoch), 0x5E0Full));
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t stop = std::min(order.size(), start + config.batch_size);
            const std::size_t bsz = stop - start;

            std::vector<SampleFeatures> scratch;
            std::vector<const SampleFeatures*> batch(bsz);
            CompiledFilters step_filters;
            if (can_cache) {
                for (std::size_t k = 0; k < bsz; ++k) batch[k] = &cached_features[order[start + k]];
            } else {
                std::vector<const RealField*> images(bsz);
                for (std::size_t k = 0; k < bsz; ++k) images[k] = &train_set[order[start + k]].image;
                const CompiledFilters* filters = &fixed_filters;
                if (train_bank) {
                    step_filters = compile_filters(h, w, result.bank, setup.lpf, true);
                    filters = &step_filters;
                }
                scratch = batch_features(setup, filters, images, train_bank);
                for (std::size_t k = 0; k < bsz; ++k) batch[k] = &scratch[k];
            }

            std::vector<SampleGrad> grads(bsz);
            parallel_for(bsz, [&](std::size_t k) {
                grads[k] = sample_loss_and_grads(result.head, *batch[k], train_set[order[start + k]].mask,
                                                 train_bank);
            });

            double batch_loss = 0.0;
            std::vector<double> g(static_cast<std::size_t>(head_np + bank_np), 0.0);
            for (const auto& sg : grads) {
                batch_loss += sg.loss;
                for (int c = 0; c < channel_count; ++c) g[c] += sg.d_weights[c];
                g[channel_count] += sg.d_bias;
                for (int p = 0; p < bank_np; ++p) g[head_np + p] += sg.d_bank[p];
            }
            const double inv_b = 1.0 / static_cast<double>(bsz);
            batch_loss *= inv_b;
            for (auto& v : g) v *= inv_b;
            if (!std::isfinite(batch_loss)) throw DivergenceError("train: non-finite loss");

            std::vector<double> params(g.size());
            for (int c = 0; c < channel_count; ++c) params[c] = result.head.weight(c);
            params[channel_count] = result.head.bias();
            for (int p = 0; p < bank_np; ++p) params[head_np + p] = result.bank.parameter(p);
            adam.step(params, g);
            for (int c = 0; c < channel_count; ++c) result.head.weight(c) = params[c];
            result.head.bias() = params[channel_count];
            for (int p = 0; p < bank_np; ++p) result.bank.set_parameter(p, params[head_np + p]);

            epoch_loss += batch_loss * static_cast<double>(bsz);
            seen += bsz;
        }
        epoch_loss /= static_cast<double>(seen);

        const double val_dice = mean_val_dice(setup, result.bank, result.head, val_set);
        result.log.push_back(EpochLog{epoch, lr, epoch_loss, val_dice});
        if (val_dice > best_dice) {
            best_dice = val_dice;
            best_epoch = epoch;
            best_bank = result.bank;
            best_head = result.head;
        }
    }

    if (config.epochs == 0) {
        best_dice = mean_val_dice(setup, result.bank, result.head, val_set);
        best_bank = result.bank;
        best_head = result.head;
    }
    result.bank = best_bank;
    result.head = best_head;
    result.best_val_dice = best_dice;
    result.best_epoch = best_epoch;
    return result;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

RealField predict_mask(const FeatureSetup& setup, const FilterBank& bank, const HeadModel& head,
                       const RealField& image) {
    CompiledFilters filters;
    if (setup.use_mono2d) filters = compile_filters(image.height(), image.width(), bank, setup.lpf, false);
    const auto features = batch_features(setup, &filters, {&image}, false);
    RealField prob = head.probabilities(features[0].channel_ptrs());
    for (auto& v : prob.values()) v = v >= 0.5 ? 1.0 : 0.0;
    return prob;
}

SsdgReport evaluate_ssdg(const FeatureSetup& setup, const FilterBank& bank, const HeadModel& head,
                         const std::vector<SyntheticSample>& source_val,
                         const std::vector<std::pair<std::string, std::vector<SyntheticSample>>>& shifted_sets) {
    SsdgReport report;
    report.source_val_dice = mean_val_dice(setup, bank, head, source_val);
    double acc = 0.0;
    for (const auto& [name, set] : shifted_sets) {
        const double d = mean_val_dice(setup, bank, head, set);
        report.domains.push_back(DomainDice{name, d});
        acc += d;
    }
    report.shifted_mean_dice = shifted_sets.empty() ? 0.0 : acc / static_cast<double>(shifted_sets.size());
    return report;
}

SsdgSuite make_ssdg_suite(int count, int height, int width, std::uint64_t seed, double val_fraction,
                          const std::vector<DomainSpec>& shifted_domains) {
    if (count < 2) throw ConfigError("suite needs at least 2 samples");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction must be in (0,1)");
    auto source = generate_dataset(count, height, width, DomainSpec::identity(), seed);
    int val_n = std::max(1, static_cast<int>(std::lround(count * val_fraction)));
    if (val_n >= count) val_n = count - 1;
    const int train_n = count - val_n;
    SsdgSuite suite;
    suite.train.assign(source.begin(), source.begin() + train_n);
    suite.val.assign(source.begin() + train_n, source.end());
    for (const auto& domain : shifted_domains) {
        auto full = generate_dataset(count, height, width, domain, seed);
        std::vector<SyntheticSample> val_slice(full.begin() + train_n, full.end());
        suite.shifted_val.emplace_back(domain.name, std::move(val_slice));
    }
    return suite;
}

void write_metrics_csv(std::ostream& out, std::uint64_t seed, const std::string& label,
                       const std::vector<EpochLog>& log, const SsdgReport* report) {
    using kvtext::format_double;
    out << "# mono2d-run seed=" << seed << " label=" << label << "\n";
    out << "epoch,lr,train_loss,val_dice\n";
    for (const auto& e : log) {
        out << e.epoch << "," << format_double(e.lr) << "," << format_double(e.train_loss) << ","
            << format_double(e.val_dice) << "\n";
    }
    if (report) {
        out << "domain,test_dice\n";
        out << "source_val," << format_double(report->source_val_dice) << "\n";
        for (const auto& d : report->domains) out << d.domain << "," << format_double(d.mean_dice) << "\n";
        out << "shifted_mean," << format_double(report->shifted_mean_dice) << "\n";
    }
}

} // namespace mono2d
