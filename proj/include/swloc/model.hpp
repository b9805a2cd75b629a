#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "swloc/error.hpp"
#include "swloc/nn.hpp"
#include "swloc/rng.hpp"

namespace swloc::model {

enum class Variant { combined, gcc_only, cepstral_only };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

// ---------------------------------------------------------------------------
// Multi-task localization loss. With predicted (t, phi) and true (y, theta),
// y normalized by the same range scale as t:
//   E = alpha*(y^2 + t^2 - 2*y*t*cos(theta-phi)) + (1-alpha)*(theta-phi)^2
// The first term is the squared polar distance, the second keeps bearing
// predictions on the first turn.
// ---------------------------------------------------------------------------
template <class T>
struct LossTerms {
    T e;
    T de_dt;
    T de_dphi;
};

template <class T>
inline LossTerms<T> localization_loss(T t, T phi, T y_norm, T theta, T alpha) {
    const T d = theta - phi;
    const T c = std::cos(d);
    const T s = std::sin(d);
    LossTerms<T> out;
    out.e = alpha * (y_norm * y_norm + t * t - T{2} * y_norm * t * c) + (T{1} - alpha) * d * d;
    out.de_dt = alpha * (T{2} * t - T{2} * y_norm * c);
    out.de_dphi = -T{2} * alpha * y_norm * t * s + T{2} * (T{1} - alpha) * (phi - theta);
    return out;
}

struct LossParams {
    double alpha = 0.5;
    double range_scale_m = 500.0;
};

struct NetShapes {
    int cep_len = 0;
    int cep_height = 3;
    int gcc_len = 0;
    int gcc_height = 2;
};

struct NetHyper {
    int conv_filters = 48;
    int kernel_length = 10;
    int dense_units = 256;
    bool batchnorm_conv = true;
    bool batchnorm_dense = true;
    double dropout_rate = 0.5;
};

// ---------------------------------------------------------------------------
// Dual-branch localization network. Each branch: three valid conv layers
// (kernel x 1, shared across the sensor/pair axis) and two dense layers.
// The combined variant concatenates [gcc_dense_out || cepstral_dense_out]
// into two more dense layers; single-branch variants feed their branch's
// dense output straight into the two regression neurons. All hidden
// activations are relu; the two output neurons are linear.
// ---------------------------------------------------------------------------
template <class T>
class LocalizationNet {
public:
    LocalizationNet(Variant variant, const NetShapes& shapes, const NetHyper& hyper,
                    std::uint64_t seed)
        : variant_(variant), shapes_(shapes), hyper_(hyper), seed_(seed) {
        std::uint64_t idx = 0;
        auto next_seed = [&]() { return derive_seed(seed, "net-init", idx++); };

        if (uses_gcc())
            build_branch(gcc_, "gcc", shapes.gcc_len, shapes.gcc_height, next_seed);
        if (uses_cepstral())
            build_branch(cep_, "cepstral", shapes.cep_len, shapes.cep_height, next_seed);

        int head_in = hyper.dense_units;
        if (variant == Variant::combined) {
            head_in = 2 * hyper.dense_units;
            add_dense_block(head_, "head.fc1", head_in, hyper.dense_units, next_seed);
            add_dense_block(head_, "head.fc2", hyper.dense_units, hyper.dense_units, next_seed);
            head_in = hyper.dense_units;
        }
        out_t_ = std::make_unique<nn::Dense<T>>(head_in, 1, next_seed());
        out_phi_ = std::make_unique<nn::Dense<T>>(head_in, 1, next_seed());
    }

    Variant variant() const { return variant_; }
    const NetShapes& shapes() const { return shapes_; }
    const NetHyper& hyper() const { return hyper_; }
    std::uint64_t seed() const { return seed_; }
    bool uses_gcc() const { return variant_ != Variant::cepstral_only; }
    bool uses_cepstral() const { return variant_ != Variant::gcc_only; }

    // cep: [N, cep_len, 3, 1]; gcc: [N, gcc_len, 2, 1]. Returns [N, 2] with
    // column 0 = t (normalized range), column 1 = phi (radians, raw).
    nn::Tensor<T> forward(const nn::Tensor<T>& cep, const nn::Tensor<T>& gcc, nn::Mode mode) {
        check_input(cep, gcc);
        nn::Tensor<T> g, c;
        if (uses_gcc()) {
            g = gcc;
            for (auto& l : gcc_.layers) g = l->forward(g, mode);
        }
        if (uses_cepstral()) {
            c = cep;
            for (auto& l : cep_.layers) c = l->forward(c, mode);
        }
        nn::Tensor<T> h;
        if (variant_ == Variant::combined) {
            h = concat_features(g, c);
            for (auto& l : head_.layers) h = l->forward(h, mode);
        } else {
            h = uses_gcc() ? std::move(g) : std::move(c);
        }
        nn::Tensor<T> t_out = out_t_->forward(h, mode);
        nn::Tensor<T> p_out = out_phi_->forward(h, mode);
        nn::Tensor<T> y({h.shape[0], 2});
        for (int i = 0; i < h.shape[0]; ++i) {
            y.v[static_cast<std::size_t>(2 * i)] = t_out.v[static_cast<std::size_t>(i)];
            y.v[static_cast<std::size_t>(2 * i + 1)] = p_out.v[static_cast<std::size_t>(i)];
        }
        return y;
    }

    // gy: [N, 2] gradients w.r.t. (t, phi).
    void backward(const nn::Tensor<T>& gy) {
        const int n = gy.shape[0];
        nn::Tensor<T> gt({n, 1}), gp({n, 1});
        for (int i = 0; i < n; ++i) {
            gt.v[static_cast<std::size_t>(i)] = gy.v[static_cast<std::size_t>(2 * i)];
            gp.v[static_cast<std::size_t>(i)] = gy.v[static_cast<std::size_t>(2 * i + 1)];
        }
        nn::Tensor<T> ht = out_t_->backward(gt);
        nn::Tensor<T> hp = out_phi_->backward(gp);
        nn::Tensor<T> gh(ht.shape);
        for (std::size_t i = 0; i < gh.v.size(); ++i) gh.v[i] = ht.v[i] + hp.v[i];

        if (variant_ == Variant::combined) {
            for (auto it = head_.layers.rbegin(); it != head_.layers.rend(); ++it)
                gh = (*it)->backward(gh);
            auto [ggcc, gcep] = split_features(gh);
            back_branch(gcc_, ggcc);
            back_branch(cep_, gcep);
        } else if (uses_gcc()) {
            back_branch(gcc_, gh);
        } else {
            back_branch(cep_, gh);
        }
    }

    std::vector<nn::Param<T>*> params() {
        std::vector<nn::Param<T>*> out;
        for (auto& l : gcc_.layers) l->collect_params(out);
        for (auto& l : cep_.layers) l->collect_params(out);
        for (auto& l : head_.layers) l->collect_params(out);
        out_t_->collect_params(out);
        out_phi_->collect_params(out);
        return out;
    }

    // Persistent state (trainable params + batch-norm running stats) in a
    // deterministic order, used for checkpoints and best-epoch snapshots.
    std::vector<nn::StateTensor<T>> state() {
        std::vector<nn::StateTensor<T>> out;
        collect_branch_state(gcc_, "gcc", out);
        collect_branch_state(cep_, "cepstral", out);
        collect_branch_state(head_, "head", out);
        out_t_->collect_state(out, "out.range");
        out_phi_->collect_state(out, "out.bearing");
        return out;
    }

    std::vector<std::vector<T>> snapshot() {
        std::vector<std::vector<T>> s;
        for (auto& st : state()) s.push_back(st.tensor->v);
        return s;
    }
    void restore(const std::vector<std::vector<T>>& s) {
        auto st = state();
        if (s.size() != st.size()) throw StateError("snapshot does not match network");
        for (std::size_t i = 0; i < st.size(); ++i) {
            if (s[i].size() != st[i].tensor->v.size())
                throw StateError("snapshot tensor size mismatch at " + st[i].name);
            st[i].tensor->v = s[i];
        }
    }

    void set_dropout_frozen(bool frozen) {
        for (auto* d : dropouts_) d->freeze_mask(frozen);
    }

    std::int64_t parameter_count() {
        std::int64_t n = 0;
        for (auto* p : params()) n += p->value.numel();
        return n;
    }

private:
    struct Branch {
        std::vector<std::unique_ptr<nn::Layer<T>>> layers;
        std::vector<std::string> names;
    };

    void check_input(const nn::Tensor<T>& cep, const nn::Tensor<T>& gcc) const {
        if (uses_cepstral()) {
            if (cep.shape.size() != 4 || cep.shape[1] != shapes_.cep_len ||
                cep.shape[2] != shapes_.cep_height || cep.shape[3] != 1)
                throw ShapeError("cepstral input " + nn::shape_str(cep.shape) + " wants [N," +
                                 std::to_string(shapes_.cep_len) + "," +
                                 std::to_string(shapes_.cep_height) + ",1]");
        }
        if (uses_gcc()) {
            if (gcc.shape.size() != 4 || gcc.shape[1] != shapes_.gcc_len ||
                gcc.shape[2] != shapes_.gcc_height || gcc.shape[3] != 1)
                throw ShapeError("gcc input " + nn::shape_str(gcc.shape) + " wants [N," +
                                 std::to_string(shapes_.gcc_len) + "," +
                                 std::to_string(shapes_.gcc_height) + ",1]");
        }
        if (uses_gcc() && uses_cepstral() && cep.shape[0] != gcc.shape[0])
            throw ShapeError("cepstral/gcc batch size mismatch");
    }

    template <class SeedFn>
    void add_dense_block(Branch& br, const std::string& name, int in_f, int out_f, SeedFn next) {
        br.layers.push_back(std::make_unique<nn::Dense<T>>(in_f, out_f, next()));
        br.names.push_back(name);
        if (hyper_.batchnorm_dense) {
            br.layers.push_back(std::make_unique<nn::BatchNorm<T>>(out_f));
            br.names.push_back(name + ".bn");
        }
        br.layers.push_back(std::make_unique<nn::ReLU<T>>());
        br.names.push_back(name + ".relu");
        auto drop = std::make_unique<nn::Dropout<T>>(hyper_.dropout_rate, next());
        dropouts_.push_back(drop.get());
        br.layers.push_back(std::move(drop));
        br.names.push_back(name + ".drop");
    }

    template <class SeedFn>
    void build_branch(Branch& br, const std::string& tag, int len, int height, SeedFn next) {
        const int k = hyper_.kernel_length;
        const int f = hyper_.conv_filters;
        int cur_len = len;
        int in_ch = 1;
        for (int ci = 1; ci <= 3; ++ci) {
            const std::string name = tag + ".conv" + std::to_string(ci);
            br.layers.push_back(std::make_unique<nn::Conv1d<T>>(k, in_ch, f, next()));
            br.names.push_back(name);
            if (hyper_.batchnorm_conv) {
                br.layers.push_back(std::make_unique<nn::BatchNorm<T>>(f));
                br.names.push_back(name + ".bn");
            }
            br.layers.push_back(std::make_unique<nn::ReLU<T>>());
            br.names.push_back(name + ".relu");
            cur_len = cur_len - k + 1;
            if (cur_len < 1)
                throw ConfigError("feature map too short for three valid convolutions");
            in_ch = f;
        }
        br.layers.push_back(std::make_unique<nn::Flatten<T>>());
        br.names.push_back(tag + ".flatten");
        const int flat = cur_len * height * f;
        add_dense_block(br, tag + ".fc1", flat, hyper_.dense_units, next);
        add_dense_block(br, tag + ".fc2", hyper_.dense_units, hyper_.dense_units, next);
    }

    void back_branch(Branch& br, nn::Tensor<T>& g) {
        for (auto it = br.layers.rbegin(); it != br.layers.rend(); ++it) g = (*it)->backward(g);
    }

    void collect_branch_state(Branch& br, const std::string&, std::vector<nn::StateTensor<T>>& out) {
        for (std::size_t i = 0; i < br.layers.size(); ++i)
            br.layers[i]->collect_state(out, br.names[i]);
    }

    nn::Tensor<T> concat_features(const nn::Tensor<T>& a, const nn::Tensor<T>& b) {
        const int n = a.shape[0];
        const int fa = a.shape[1], fb = b.shape[1];
        nn::Tensor<T> y({n, fa + fb});
        for (int i = 0; i < n; ++i) {
            std::copy_n(a.data() + static_cast<std::int64_t>(i) * fa, fa,
                        y.data() + static_cast<std::int64_t>(i) * (fa + fb));
            std::copy_n(b.data() + static_cast<std::int64_t>(i) * fb, fb,
                        y.data() + static_cast<std::int64_t>(i) * (fa + fb) + fa);
        }
        return y;
    }

    std::pair<nn::Tensor<T>, nn::Tensor<T>> split_features(const nn::Tensor<T>& g) {
        const int n = g.shape[0];
        const int f = hyper_.dense_units;
        nn::Tensor<T> a({n, f}), b({n, f});
        for (int i = 0; i < n; ++i) {
            std::copy_n(g.data() + static_cast<std::int64_t>(i) * 2 * f, f,
                        a.data() + static_cast<std::int64_t>(i) * f);
            std::copy_n(g.data() + static_cast<std::int64_t>(i) * 2 * f + f, f,
                        b.data() + static_cast<std::int64_t>(i) * f);
        }
        return {std::move(a), std::move(b)};
    }

    Variant variant_;
    NetShapes shapes_;
    NetHyper hyper_;
    std::uint64_t seed_;
    Branch gcc_, cep_, head_;
    std::unique_ptr<nn::Dense<T>> out_t_, out_phi_;
    std::vector<nn::Dropout<T>*> dropouts_;
};

// ---------------------------------------------------------------------------
// Early stopping on validation loss: stop once `patience` consecutive epochs
// fail to improve the best value by more than min_delta.
// ---------------------------------------------------------------------------
class EarlyStopper {
public:
    EarlyStopper(int patience, double min_delta) : patience_(patience), min_delta_(min_delta) {
        if (patience < 1) throw ConfigError("patience must be >= 1");
    }

    // Returns true when training should stop after this epoch.
    bool update(int epoch, double val_loss) {
        if (val_loss < best_ - min_delta_) {
            best_ = val_loss;
            best_epoch_ = epoch;
            since_best_ = 0;
            improved_ = true;
            return false;
        }
        improved_ = false;
        ++since_best_;
        return since_best_ >= patience_;
    }

    bool improved() const { return improved_; }
    int best_epoch() const { return best_epoch_; }
    double best() const { return best_; }

private:
    int patience_;
    double min_delta_;
    double best_ = std::numeric_limits<double>::infinity();
    int best_epoch_ = -1;
    int since_best_ = 0;
    bool improved_ = false;
};

struct TrainConfig {
    int batch_size = 32;
    double learning_rate = 1e-3;
    double momentum = 0.9;
    double weight_decay = 1e-5;
    int max_epochs = 12;
    int patience = 3;
    double min_delta = 1e-4;
    LossParams loss;
    std::uint64_t seed = 0;

    void validate() const {
        if (batch_size < 2) throw ConfigError("batch_size must be >= 2 (batch norm)");
        if (patience < 1) throw ConfigError("patience must be >= 1");
        if (!(loss.alpha >= 0.0 && loss.alpha <= 1.0)) throw ConfigError("alpha must be in [0, 1]");
        if (!(loss.range_scale_m > 0.0)) throw ConfigError("range_scale_m must be > 0");
    }
};

// Flat sample storage for training/eval: one row per frame.
struct DataSet {
    int cep_size = 0;  // cep_len * 3
    int gcc_size = 0;  // gcc_len * 2
    std::vector<float> cep;      // [n, cep_size]
    std::vector<float> gcc;      // [n, gcc_size]
    std::vector<float> range_m;
    std::vector<float> bearing_rad;

    std::size_t size() const { return range_m.size(); }
};

struct HistoryRow {
    int epoch = 0;
    double train_e = 0.0;
    double val_e = 0.0;
    double lr = 0.0;
    bool best = false;
};

struct TrainResult {
    std::vector<HistoryRow> history;
    int best_epoch = -1;
    double best_val_e = 0.0;
    bool stopped_early = false;
};

template <class T>
void fill_batch(const DataSet& ds, const std::vector<std::size_t>& idx, std::size_t first,
                std::size_t count, const NetShapes& shapes, nn::Tensor<T>& cep,
                nn::Tensor<T>& gcc, std::vector<T>& y_norm, std::vector<T>& theta,
                double range_scale) {
    cep = nn::Tensor<T>({static_cast<int>(count), shapes.cep_len, shapes.cep_height, 1});
    gcc = nn::Tensor<T>({static_cast<int>(count), shapes.gcc_len, shapes.gcc_height, 1});
    y_norm.resize(count);
    theta.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t r = idx[first + i];
        const float* c = ds.cep.data() + r * static_cast<std::size_t>(ds.cep_size);
        const float* g = ds.gcc.data() + r * static_cast<std::size_t>(ds.gcc_size);
        T* cd = cep.data() + static_cast<std::int64_t>(i) * ds.cep_size;
        T* gd = gcc.data() + static_cast<std::int64_t>(i) * ds.gcc_size;
        for (int k = 0; k < ds.cep_size; ++k) cd[k] = static_cast<T>(c[k]);
        for (int k = 0; k < ds.gcc_size; ++k) gd[k] = static_cast<T>(g[k]);
        y_norm[i] = static_cast<T>(ds.range_m[r] / range_scale);
        theta[i] = static_cast<T>(ds.bearing_rad[r]);
    }
}

// Mean loss and (optionally) the per-output gradient of the mean.
template <class T>
double batch_loss(const nn::Tensor<T>& out, const std::vector<T>& y_norm,
                  const std::vector<T>& theta, T alpha, nn::Tensor<T>* grad) {
    const std::size_t n = y_norm.size();
    if (grad) *grad = nn::Tensor<T>({static_cast<int>(n), 2});
    double e = 0.0;
    const T invn = T{1} / static_cast<T>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const T t = out.v[2 * i];
        const T phi = out.v[2 * i + 1];
        auto lt = localization_loss(t, phi, y_norm[i], theta[i], alpha);
        e += static_cast<double>(lt.e);
        if (grad) {
            grad->v[2 * i] = lt.de_dt * invn;
            grad->v[2 * i + 1] = lt.de_dphi * invn;
        }
    }
    return e / static_cast<double>(n);
}

template <class T>
double evaluate_mean_loss(LocalizationNet<T>& net, const DataSet& ds, const TrainConfig& cfg,
                          int eval_batch = 256) {
    if (ds.size() == 0) throw ConfigError("empty evaluation set");
    std::vector<std::size_t> idx(ds.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    double total = 0.0;
    std::size_t done = 0;
    nn::Tensor<T> cep, gcc;
    std::vector<T> y, th;
    while (done < idx.size()) {
        const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(eval_batch),
                                                        idx.size() - done);
        fill_batch(ds, idx, done, count, net.shapes(), cep, gcc, y, th, cfg.loss.range_scale_m);
        nn::Tensor<T> out = net.forward(cep, gcc, nn::Mode::infer);
        total += batch_loss<T>(out, y, th, static_cast<T>(cfg.loss.alpha), nullptr) *
                 static_cast<double>(count);
        done += count;
    }
    return total / static_cast<double>(idx.size());
}

// Mini-batch momentum SGD with per-epoch validation and early stopping.
// Returns with the network restored to its best-validation state. Incomplete
// trailing batches are dropped (batch statistics need >= 2 rows and epoch
// boundaries stay deterministic).
template <class T>
TrainResult train(LocalizationNet<T>& net, const DataSet& train_set, const DataSet& val_set,
                  const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.size() < static_cast<std::size_t>(cfg.batch_size))
        throw ConfigError("training set smaller than one batch");
    if (val_set.size() == 0) throw ConfigError("empty validation set");

    auto params = net.params();
    nn::SgdMomentum<T> opt(cfg.learning_rate, cfg.momentum, cfg.weight_decay);
    EarlyStopper stopper(cfg.patience, cfg.min_delta);

    TrainResult res;
    std::vector<std::size_t> idx(train_set.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    std::vector<std::vector<T>> best_state = net.snapshot();
    nn::Tensor<T> cep, gcc, grad;
    std::vector<T> y, th;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(idx.begin(), idx.end());

        double epoch_loss = 0.0;
        std::size_t batches = 0;
        const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
        for (std::size_t first = 0; first + bs <= idx.size(); first += bs) {
            fill_batch(train_set, idx, first, bs, net.shapes(), cep, gcc, y, th,
                       cfg.loss.range_scale_m);
            nn::zero_grads(params);
            nn::Tensor<T> out = net.forward(cep, gcc, nn::Mode::train);
            const double e = batch_loss<T>(out, y, th, static_cast<T>(cfg.loss.alpha), &grad);
            if (!std::isfinite(e))
                throw TrainingError("training diverged: non-finite loss at epoch " +
                                    std::to_string(epoch) + ", batch " + std::to_string(batches));
            net.backward(grad);
            opt.step(params);
            epoch_loss += e;
            ++batches;
        }
        epoch_loss /= static_cast<double>(batches);

        const double val_e = evaluate_mean_loss(net, val_set, cfg);
        const bool stop = stopper.update(epoch, val_e);
        if (stopper.improved()) best_state = net.snapshot();
        res.history.push_back({epoch, epoch_loss, val_e, opt.lr(), stopper.improved()});
        if (stop) {
            res.stopped_early = true;
            break;
        }
    }

    net.restore(best_state);
    res.best_epoch = stopper.best_epoch();
    res.best_val_e = stopper.best();
    return res;
}

// Evaluation-time bearing fold into [0, pi]: absolute value of the principal
// angle, the triangle-wave equivalent of acos(cos(phi)).
inline double fold_bearing(double phi) {
    const double two_pi = 6.283185307179586476925286766559;
    double w = std::fmod(phi, two_pi);
    if (w < 0.0) w += two_pi;
    return (w > 3.14159265358979323846) ? two_pi - w : w;
}

}  // namespace swloc::model
