#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "glyphguide/geometry.hpp"
#include "glyphguide/image.hpp"

namespace glyphguide::ad {

using Shape = std::vector<int>;

std::string to_string(const Shape& shape);
std::size_t numel(const Shape& shape);

namespace detail {
struct Node;
}

/// Dense double-precision array with define-by-run reverse-mode gradients.
///
/// A Tensor is a cheap handle; copies share storage. Operations on tensors
/// that require gradients record a backward closure and their inputs. The
/// tape is released by backward(). Shapes used here are scalars {}, vectors
/// {n}, feature maps {C, H, W} and conv weights {O, C, k, k}.
class Tensor {
public:
    Tensor();
    Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    const Shape& shape() const;
    int dim(int i) const { return shape()[static_cast<std::size_t>(i)]; }
    std::size_t numel() const;
    bool requires_grad() const;
    std::uint64_t id() const;

    std::span<const double> values() const;
    /// Mutable access for leaves (parameter updates, initialization).
    std::span<double> mutable_values();
    double item() const;

    /// Gradient accumulated by backward(); empty until materialized.
    std::span<const double> grad() const;
    bool has_grad() const;
    void zero_grad();

    /// Same values, no gradient tracking.
    Tensor detach() const;

    detail::Node* node() const { return node_.get(); }
    const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

private:
    explicit Tensor(std::shared_ptr<detail::Node> node);
    friend struct Ops;

    std::shared_ptr<detail::Node> node_;
};

// ---- differentiable operations -------------------------------------------

/// Zero-padded "same" cross-correlation. input {C,H,W}, weight {O,C,k,k},
/// bias {O}, k in {1, 3}.
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias);

/// relu'(0) is 0.
Tensor relu(const Tensor& t);
Tensor sigmoid(const Tensor& t);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& t, double factor);
/// Adds a constant; gradient flows only to `t`.
Tensor add_constant(const Tensor& t, double c);
Tensor concat_channels(const Tensor& a, const Tensor& b);
/// Channels [first, first + count) of a {C,H,W} tensor.
Tensor slice_channels(const Tensor& t, int first, int count);
Tensor sum(const Tensor& t);
Tensor mean(const Tensor& t);

/// Mean of squared differences over all elements.
Tensor mse(const Tensor& a, const Tensor& b);

/// MSE of (m . a, m . b) with the denominator equal to the full element
/// count. `m` is an H x W mask broadcast over channels.
Tensor masked_mse(const Tensor& a, const Tensor& b, const Mask& m);

/// Runs reverse accumulation from a scalar loss. Gradients accumulate into
/// every requires_grad leaf reachable from `loss`; the tape is freed.
void backward(const Tensor& loss);

// ---- non-differentiable helpers -------------------------------------------

Tensor from_image(const Image& img, bool requires_grad = false);
/// Clamps to [0, 1]; inference only.
Image to_image(const Tensor& t);
Tensor clamp01(const Tensor& t);

// ---- parameters and optimization ------------------------------------------

/// Trainable leaf plus Adam moment accumulators.
struct Parameter {
    std::string name;
    Tensor value;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    long steps = 0;

    Parameter() = default;
    Parameter(std::string name, Tensor value);
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One bias-corrected Adam update using each parameter's accumulated
/// gradient (a missing gradient counts as zero). `grad_scale` multiplies the
/// gradients first, e.g. 1/batch for mean reduction.
void adam_step(std::span<Parameter*> params, const AdamConfig& cfg, double grad_scale = 1.0);

// ---- TBWT snapshot container ------------------------------------------------

struct NamedTensor {
    std::string name;
    Shape shape;
    std::vector<double> values;

    friend bool operator==(const NamedTensor&, const NamedTensor&) = default;
};

/// "TBWT" | u8 version | u32 count | per tensor: u32 name length, name,
/// u32 rank, u32 dims[rank], f64 values. Little-endian throughout.
std::vector<std::uint8_t> save_tensors(std::span<const NamedTensor> tensors);
std::vector<NamedTensor> load_tensors(std::span<const std::uint8_t> bytes);

}  // namespace glyphguide::ad
