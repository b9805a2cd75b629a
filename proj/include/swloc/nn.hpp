#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "swloc/error.hpp"
#include "swloc/rng.hpp"

namespace swloc::nn {

enum class Mode { train, infer };

template <class T>
struct Tensor {
    std::vector<int> shape;
    std::vector<T> v;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        v.assign(static_cast<std::size_t>(numel_of(shape)), T{0});
    }

    static std::int64_t numel_of(const std::vector<int>& s) {
        std::int64_t n = 1;
        for (int d : s) n *= d;
        return n;
    }
    std::int64_t numel() const { return static_cast<std::int64_t>(v.size()); }
    T* data() { return v.data(); }
    const T* data() const { return v.data(); }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline std::string shape_str(const std::vector<int>& s) {
    std::string r = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) r += ",";
        r += std::to_string(s[i]);
    }
    return r + "]";
}

template <class T>
struct Param {
    std::string name;
    Tensor<T> value;
    Tensor<T> grad;

    void init_grad() { grad = Tensor<T>(value.shape); }
};

// Persistent non-trainable state (batch-norm running stats).
template <class T>
struct StateTensor {
    std::string name;
    Tensor<T>* tensor = nullptr;
};

template <class T>
class Layer {
public:
    virtual ~Layer() = default;
    virtual Tensor<T> forward(const Tensor<T>& x, Mode mode) = 0;
    // Input gradient for the most recent forward; param grads accumulate.
    virtual Tensor<T> backward(const Tensor<T>& gy) = 0;
    virtual void collect_params(std::vector<Param<T>*>&) {}
    virtual void collect_state(std::vector<StateTensor<T>>&, const std::string&) {}
};

// ---------------------------------------------------------------------------
// Conv1d: valid correlation along the length axis of [N, L, H, C] tensors,
// stride 1, kernel extent 1 along H (weights shared across it).
// ---------------------------------------------------------------------------
template <class T>
class Conv1d final : public Layer<T> {
public:
    Conv1d(int kernel, int in_ch, int out_ch, std::uint64_t seed)
        : kernel_(kernel), in_ch_(in_ch), out_ch_(out_ch) {
        if (kernel < 1 || in_ch < 1 || out_ch < 1) throw ConfigError("bad conv1d geometry");
        w_.name = "w";
        w_.value = Tensor<T>({kernel, in_ch, out_ch});
        b_.name = "b";
        b_.value = Tensor<T>({out_ch});
        Rng rng(seed);
        const double bound = std::sqrt(6.0 / static_cast<double>(kernel * in_ch));
        for (auto& x : w_.value.v) x = static_cast<T>(rng.uniform(-bound, bound));
        w_.init_grad();
        b_.init_grad();
    }

    Tensor<T> forward(const Tensor<T>& x, Mode) override {
        if (x.shape.size() != 4 || x.shape[3] != in_ch_)
            throw ShapeError("conv1d input shape " + shape_str(x.shape) + " wants [N,L,H," +
                             std::to_string(in_ch_) + "]");
        if (x.shape[1] < kernel_) throw ShapeError("conv1d input shorter than kernel");
        in_ = x;
        const int n = x.shape[0], l = x.shape[1], h = x.shape[2];
        const int ol = l - kernel_ + 1;
        Tensor<T> y({n, ol, h, out_ch_});
        const T* xp = x.data();
        T* yp = y.data();
        const T* wp = w_.value.data();
        const T* bp = b_.value.data();
        for (int ni = 0; ni < n; ++ni) {
            for (int li = 0; li < ol; ++li) {
                for (int hi = 0; hi < h; ++hi) {
                    T* orow = yp + (((static_cast<std::int64_t>(ni) * ol + li) * h + hi) * out_ch_);
                    for (int oc = 0; oc < out_ch_; ++oc) orow[oc] = bp[oc];
                    for (int k = 0; k < kernel_; ++k) {
                        const T* xrow =
                            xp + (((static_cast<std::int64_t>(ni) * l + li + k) * h + hi) * in_ch_);
                        const T* wk = wp + static_cast<std::int64_t>(k) * in_ch_ * out_ch_;
                        for (int ic = 0; ic < in_ch_; ++ic) {
                            const T xv = xrow[ic];
                            const T* wrow = wk + static_cast<std::int64_t>(ic) * out_ch_;
                            for (int oc = 0; oc < out_ch_; ++oc) orow[oc] += xv * wrow[oc];
                        }
                    }
                }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy) override {
        if (in_.shape.empty()) throw StateError("conv1d backward before forward");
        const int n = in_.shape[0], l = in_.shape[1], h = in_.shape[2];
        const int ol = l - kernel_ + 1;
        if (gy.shape != std::vector<int>{n, ol, h, out_ch_})
            throw ShapeError("conv1d upstream grad shape mismatch");
        Tensor<T> gx(in_.shape);
        const T* xp = in_.data();
        const T* gp = gy.data();
        T* gxp = gx.data();
        const T* wp = w_.value.data();
        T* gwp = w_.grad.data();
        T* gbp = b_.grad.data();
        for (int ni = 0; ni < n; ++ni) {
            for (int li = 0; li < ol; ++li) {
                for (int hi = 0; hi < h; ++hi) {
                    const T* grow = gp + (((static_cast<std::int64_t>(ni) * ol + li) * h + hi) * out_ch_);
                    for (int oc = 0; oc < out_ch_; ++oc) gbp[oc] += grow[oc];
                    for (int k = 0; k < kernel_; ++k) {
                        const std::int64_t xoff =
                            ((static_cast<std::int64_t>(ni) * l + li + k) * h + hi) * in_ch_;
                        const T* xrow = xp + xoff;
                        T* gxrow = gxp + xoff;
                        const T* wk = wp + static_cast<std::int64_t>(k) * in_ch_ * out_ch_;
                        T* gwk = gwp + static_cast<std::int64_t>(k) * in_ch_ * out_ch_;
                        for (int ic = 0; ic < in_ch_; ++ic) {
                            const T xv = xrow[ic];
                            const T* wrow = wk + static_cast<std::int64_t>(ic) * out_ch_;
                            T* gwrow = gwk + static_cast<std::int64_t>(ic) * out_ch_;
                            T acc{0};
                            for (int oc = 0; oc < out_ch_; ++oc) {
                                acc += grow[oc] * wrow[oc];
                                gwrow[oc] += xv * grow[oc];
                            }
                            gxrow[ic] += acc;
                        }
                    }
                }
            }
        }
        return gx;
    }

    void collect_params(std::vector<Param<T>*>& out) override {
        out.push_back(&w_);
        out.push_back(&b_);
    }
    void collect_state(std::vector<StateTensor<T>>& out, const std::string& prefix) override {
        out.push_back({prefix + ".w", &w_.value});
        out.push_back({prefix + ".b", &b_.value});
    }

    int kernel() const { return kernel_; }
    Param<T>& weights() { return w_; }
    Param<T>& biases() { return b_; }

private:
    int kernel_, in_ch_, out_ch_;
    Param<T> w_, b_;
    Tensor<T> in_;
};

// ---------------------------------------------------------------------------
// Dense: fully connected [N, F] -> [N, U].
// ---------------------------------------------------------------------------
template <class T>
class Dense final : public Layer<T> {
public:
    Dense(int in_features, int out_features, std::uint64_t seed)
        : in_f_(in_features), out_f_(out_features) {
        if (in_features < 1 || out_features < 1) throw ConfigError("bad dense geometry");
        w_.name = "w";
        w_.value = Tensor<T>({in_features, out_features});
        b_.name = "b";
        b_.value = Tensor<T>({out_features});
        Rng rng(seed);
        const double bound = std::sqrt(6.0 / static_cast<double>(in_features));
        for (auto& x : w_.value.v) x = static_cast<T>(rng.uniform(-bound, bound));
        w_.init_grad();
        b_.init_grad();
    }

    Tensor<T> forward(const Tensor<T>& x, Mode) override {
        if (x.shape.size() != 2 || x.shape[1] != in_f_)
            throw ShapeError("dense input shape " + shape_str(x.shape) + " wants [N," +
                             std::to_string(in_f_) + "]");
        in_ = x;
        const int n = x.shape[0];
        Tensor<T> y({n, out_f_});
        const T* xp = x.data();
        T* yp = y.data();
        const T* wp = w_.value.data();
        const T* bp = b_.value.data();
        for (int ni = 0; ni < n; ++ni) {
            T* orow = yp + static_cast<std::int64_t>(ni) * out_f_;
            for (int u = 0; u < out_f_; ++u) orow[u] = bp[u];
            const T* xrow = xp + static_cast<std::int64_t>(ni) * in_f_;
            for (int f = 0; f < in_f_; ++f) {
                const T xv = xrow[f];
                if (xv == T{0}) continue;
                const T* wrow = wp + static_cast<std::int64_t>(f) * out_f_;
                for (int u = 0; u < out_f_; ++u) orow[u] += xv * wrow[u];
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy) override {
        if (in_.shape.empty()) throw StateError("dense backward before forward");
        const int n = in_.shape[0];
        if (gy.shape != std::vector<int>{n, out_f_})
            throw ShapeError("dense upstream grad shape mismatch");
        Tensor<T> gx(in_.shape);
        const T* xp = in_.data();
        const T* gp = gy.data();
        T* gxp = gx.data();
        const T* wp = w_.value.data();
        T* gwp = w_.grad.data();
        T* gbp = b_.grad.data();
        for (int ni = 0; ni < n; ++ni) {
            const T* grow = gp + static_cast<std::int64_t>(ni) * out_f_;
            for (int u = 0; u < out_f_; ++u) gbp[u] += grow[u];
            const T* xrow = xp + static_cast<std::int64_t>(ni) * in_f_;
            T* gxrow = gxp + static_cast<std::int64_t>(ni) * in_f_;
            for (int f = 0; f < in_f_; ++f) {
                const T* wrow = wp + static_cast<std::int64_t>(f) * out_f_;
                T* gwrow = gwp + static_cast<std::int64_t>(f) * out_f_;
                const T xv = xrow[f];
                T acc{0};
                for (int u = 0; u < out_f_; ++u) {
                    acc += grow[u] * wrow[u];
                    gwrow[u] += xv * grow[u];
                }
                gxrow[f] = acc;
            }
        }
        return gx;
    }

    void collect_params(std::vector<Param<T>*>& out) override {
        out.push_back(&w_);
        out.push_back(&b_);
    }
    void collect_state(std::vector<StateTensor<T>>& out, const std::string& prefix) override {
        out.push_back({prefix + ".w", &w_.value});
        out.push_back({prefix + ".b", &b_.value});
    }

    Param<T>& weights() { return w_; }
    Param<T>& biases() { return b_; }

private:
    int in_f_, out_f_;
    Param<T> w_, b_;
    Tensor<T> in_;
};

template <class T>
class ReLU final : public Layer<T> {
public:
    Tensor<T> forward(const Tensor<T>& x, Mode) override {
        mask_.assign(x.v.size(), 0);
        Tensor<T> y(x.shape);
        for (std::size_t i = 0; i < x.v.size(); ++i) {
            if (x.v[i] > T{0}) {
                y.v[i] = x.v[i];
                mask_[i] = 1;
            }
        }
        fwd_done_ = true;
        return y;
    }
    Tensor<T> backward(const Tensor<T>& gy) override {
        if (!fwd_done_) throw StateError("relu backward before forward");
        if (gy.v.size() != mask_.size()) throw ShapeError("relu grad shape mismatch");
        Tensor<T> gx(gy.shape);
        for (std::size_t i = 0; i < gy.v.size(); ++i) gx.v[i] = mask_[i] ? gy.v[i] : T{0};
        return gx;
    }

private:
    std::vector<unsigned char> mask_;
    bool fwd_done_ = false;
};

// ---------------------------------------------------------------------------
// BatchNorm over the last (feature) dimension; reduces across every other
// dimension. Train mode uses batch statistics and updates running stats,
// inference uses the running stats.
// ---------------------------------------------------------------------------
template <class T>
class BatchNorm final : public Layer<T> {
public:
    explicit BatchNorm(int features, double eps = 1e-5, double momentum = 0.1)
        : features_(features), eps_(static_cast<T>(eps)), momentum_(static_cast<T>(momentum)) {
        gamma_.name = "gamma";
        gamma_.value = Tensor<T>({features});
        beta_.name = "beta";
        beta_.value = Tensor<T>({features});
        for (auto& g : gamma_.value.v) g = T{1};
        gamma_.init_grad();
        beta_.init_grad();
        running_mean_ = Tensor<T>({features});
        running_var_ = Tensor<T>({features});
        for (auto& rv : running_var_.v) rv = T{1};
    }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) override {
        if (x.shape.empty() || x.shape.back() != features_)
            throw ShapeError("batchnorm input shape " + shape_str(x.shape) + " wants trailing " +
                             std::to_string(features_));
        if (mode == Mode::train && x.shape[0] < 2)
            throw ConfigError("batchnorm train mode needs batch size >= 2");
        const std::int64_t c = features_;
        const std::int64_t rows = x.numel() / c;
        Tensor<T> y(x.shape);
        if (mode == Mode::train) {
            mean_.assign(static_cast<std::size_t>(c), T{0});
            var_.assign(static_cast<std::size_t>(c), T{0});
            for (std::int64_t r = 0; r < rows; ++r) {
                const T* row = x.data() + r * c;
                for (std::int64_t i = 0; i < c; ++i) mean_[static_cast<std::size_t>(i)] += row[i];
            }
            const T inv_rows = T{1} / static_cast<T>(rows);
            for (auto& m : mean_) m *= inv_rows;
            for (std::int64_t r = 0; r < rows; ++r) {
                const T* row = x.data() + r * c;
                for (std::int64_t i = 0; i < c; ++i) {
                    const T d = row[i] - mean_[static_cast<std::size_t>(i)];
                    var_[static_cast<std::size_t>(i)] += d * d;
                }
            }
            for (auto& vv : var_) vv *= inv_rows;
            inv_std_.resize(static_cast<std::size_t>(c));
            for (std::int64_t i = 0; i < c; ++i)
                inv_std_[static_cast<std::size_t>(i)] =
                    T{1} / std::sqrt(var_[static_cast<std::size_t>(i)] + eps_);
            xhat_ = Tensor<T>(x.shape);
            for (std::int64_t r = 0; r < rows; ++r) {
                const T* row = x.data() + r * c;
                T* hrow = xhat_.data() + r * c;
                T* yrow = y.data() + r * c;
                for (std::int64_t i = 0; i < c; ++i) {
                    const std::size_t ci = static_cast<std::size_t>(i);
                    hrow[i] = (row[i] - mean_[ci]) * inv_std_[ci];
                    yrow[i] = gamma_.value.v[ci] * hrow[i] + beta_.value.v[ci];
                }
            }
            for (std::int64_t i = 0; i < c; ++i) {
                const std::size_t ci = static_cast<std::size_t>(i);
                running_mean_.v[ci] =
                    (T{1} - momentum_) * running_mean_.v[ci] + momentum_ * mean_[ci];
                running_var_.v[ci] = (T{1} - momentum_) * running_var_.v[ci] + momentum_ * var_[ci];
            }
            train_cached_ = true;
        } else {
            for (std::int64_t r = 0; r < rows; ++r) {
                const T* row = x.data() + r * c;
                T* yrow = y.data() + r * c;
                for (std::int64_t i = 0; i < c; ++i) {
                    const std::size_t ci = static_cast<std::size_t>(i);
                    yrow[i] = gamma_.value.v[ci] * (row[i] - running_mean_.v[ci]) /
                                  std::sqrt(running_var_.v[ci] + eps_) +
                              beta_.value.v[ci];
                }
            }
            train_cached_ = false;
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy) override {
        if (!train_cached_) throw StateError("batchnorm backward without train-mode forward");
        if (gy.shape != xhat_.shape) throw ShapeError("batchnorm grad shape mismatch");
        const std::int64_t c = features_;
        const std::int64_t rows = gy.numel() / c;
        std::vector<T> sum_g(static_cast<std::size_t>(c), T{0});
        std::vector<T> sum_gh(static_cast<std::size_t>(c), T{0});
        for (std::int64_t r = 0; r < rows; ++r) {
            const T* grow = gy.data() + r * c;
            const T* hrow = xhat_.data() + r * c;
            for (std::int64_t i = 0; i < c; ++i) {
                sum_g[static_cast<std::size_t>(i)] += grow[i];
                sum_gh[static_cast<std::size_t>(i)] += grow[i] * hrow[i];
            }
        }
        for (std::int64_t i = 0; i < c; ++i) {
            const std::size_t ci = static_cast<std::size_t>(i);
            beta_.grad.v[ci] += sum_g[ci];
            gamma_.grad.v[ci] += sum_gh[ci];
        }
        Tensor<T> gx(gy.shape);
        const T inv_rows = T{1} / static_cast<T>(rows);
        for (std::int64_t r = 0; r < rows; ++r) {
            const T* grow = gy.data() + r * c;
            const T* hrow = xhat_.data() + r * c;
            T* gxrow = gx.data() + r * c;
            for (std::int64_t i = 0; i < c; ++i) {
                const std::size_t ci = static_cast<std::size_t>(i);
                gxrow[i] = gamma_.value.v[ci] * inv_std_[ci] *
                           (grow[i] - sum_g[ci] * inv_rows - hrow[i] * sum_gh[ci] * inv_rows);
            }
        }
        return gx;
    }

    void collect_params(std::vector<Param<T>*>& out) override {
        out.push_back(&gamma_);
        out.push_back(&beta_);
    }
    void collect_state(std::vector<StateTensor<T>>& out, const std::string& prefix) override {
        out.push_back({prefix + ".gamma", &gamma_.value});
        out.push_back({prefix + ".beta", &beta_.value});
        out.push_back({prefix + ".running_mean", &running_mean_});
        out.push_back({prefix + ".running_var", &running_var_});
    }

    const Tensor<T>& running_mean() const { return running_mean_; }
    const Tensor<T>& running_var() const { return running_var_; }
    Tensor<T>& running_mean() { return running_mean_; }
    Tensor<T>& running_var() { return running_var_; }

private:
    int features_;
    T eps_, momentum_;
    Param<T> gamma_, beta_;
    Tensor<T> running_mean_, running_var_;
    std::vector<T> mean_, var_, inv_std_;
    Tensor<T> xhat_;
    bool train_cached_ = false;
};

// ---------------------------------------------------------------------------
// Inverted dropout: train zeroes with probability rate and scales survivors
// by 1/(1-rate); inference is the identity. freeze_mask() reuses one mask
// across forwards, for finite-difference checks.
// ---------------------------------------------------------------------------
template <class T>
class Dropout final : public Layer<T> {
public:
    Dropout(double rate, std::uint64_t seed) : rate_(rate), rng_(seed) {
        if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must be in [0, 1)");
    }

    void freeze_mask(bool frozen) {
        frozen_ = frozen;
        mask_.clear();
    }

    Tensor<T> forward(const Tensor<T>& x, Mode mode) override {
        fwd_train_ = false;
        if (mode == Mode::infer || rate_ == 0.0) {
            identity_ = true;
            fwd_size_ = x.v.size();
            return x;
        }
        identity_ = false;
        fwd_train_ = true;
        if (!frozen_ || mask_.size() != x.v.size()) {
            mask_.resize(x.v.size());
            for (auto& m : mask_) m = rng_.uniform() >= rate_ ? 1 : 0;
        }
        const T scale = T{1} / static_cast<T>(1.0 - rate_);
        Tensor<T> y(x.shape);
        for (std::size_t i = 0; i < x.v.size(); ++i)
            y.v[i] = mask_[i] ? x.v[i] * scale : T{0};
        fwd_size_ = x.v.size();
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy) override {
        if (gy.v.size() != fwd_size_) throw StateError("dropout backward before forward");
        if (identity_) return gy;
        const T scale = T{1} / static_cast<T>(1.0 - rate_);
        Tensor<T> gx(gy.shape);
        for (std::size_t i = 0; i < gy.v.size(); ++i)
            gx.v[i] = mask_[i] ? gy.v[i] * scale : T{0};
        return gx;
    }

    const std::vector<unsigned char>& mask() const { return mask_; }

private:
    double rate_;
    Rng rng_;
    std::vector<unsigned char> mask_;
    bool frozen_ = false;
    bool identity_ = true;
    bool fwd_train_ = false;
    std::size_t fwd_size_ = static_cast<std::size_t>(-1);
};

template <class T>
class Flatten final : public Layer<T> {
public:
    Tensor<T> forward(const Tensor<T>& x, Mode) override {
        if (x.shape.empty()) throw ShapeError("flatten on scalar");
        in_shape_ = x.shape;
        Tensor<T> y;
        y.shape = {x.shape[0], static_cast<int>(x.numel() / x.shape[0])};
        y.v = x.v;
        return y;
    }
    Tensor<T> backward(const Tensor<T>& gy) override {
        if (in_shape_.empty()) throw StateError("flatten backward before forward");
        Tensor<T> gx;
        gx.shape = in_shape_;
        gx.v = gy.v;
        return gx;
    }

private:
    std::vector<int> in_shape_;
};

// ---------------------------------------------------------------------------
// Momentum SGD with coupled weight decay:
//   v <- momentum*v + grad + weight_decay*param;  param <- param - lr*v
// ---------------------------------------------------------------------------
template <class T>
class SgdMomentum {
public:
    SgdMomentum(double lr, double momentum, double weight_decay)
        : lr_(static_cast<T>(lr)), momentum_(static_cast<T>(momentum)),
          weight_decay_(static_cast<T>(weight_decay)) {}

    void step(const std::vector<Param<T>*>& params) {
        if (velocity_.empty()) {
            velocity_.reserve(params.size());
            for (auto* p : params) velocity_.emplace_back(p->value.shape);
        }
        if (velocity_.size() != params.size()) throw StateError("optimizer bound to different params");
        for (std::size_t pi = 0; pi < params.size(); ++pi) {
            Param<T>& p = *params[pi];
            Tensor<T>& vel = velocity_[pi];
            if (!vel.same_shape(p.value)) throw ShapeError("velocity shape mismatch");
            for (std::size_t i = 0; i < p.value.v.size(); ++i) {
                const T g = p.grad.v[i];
                if (!std::isfinite(static_cast<double>(g)))
                    throw TrainingError("non-finite gradient in parameter '" + p.name + "'");
                vel.v[i] = momentum_ * vel.v[i] + g + weight_decay_ * p.value.v[i];
                p.value.v[i] -= lr_ * vel.v[i];
            }
        }
    }

    void set_lr(double lr) { lr_ = static_cast<T>(lr); }
    double lr() const { return static_cast<double>(lr_); }

private:
    T lr_, momentum_, weight_decay_;
    std::vector<Tensor<T>> velocity_;
};

template <class T>
inline void zero_grads(const std::vector<Param<T>*>& params) {
    for (auto* p : params) std::fill(p->grad.v.begin(), p->grad.v.end(), T{0});
}

}  // namespace swloc::nn
