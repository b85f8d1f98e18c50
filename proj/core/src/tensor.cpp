#include "glyphguide/tensor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unordered_set>

#include "glyphguide/byte_io.hpp"
#include "glyphguide/errors.hpp"

namespace glyphguide::ad {

namespace detail {

struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    bool requires_grad = false;
    std::uint64_t id = 0;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;

    bool is_leaf() const { return parents.empty(); }

    std::vector<double>& ensure_grad() {
        if (grad.empty()) grad.assign(value.size(), 0.0);
        return grad;
    }
};

}  // namespace detail

using detail::Node;

struct Ops {
    static Tensor wrap(std::shared_ptr<Node> n) { return Tensor(std::move(n)); }
};

namespace {

std::uint64_t next_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

std::shared_ptr<Node> make_node(Shape shape, std::vector<double> value, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->value = std::move(value);
    n->requires_grad = requires_grad;
    n->id = next_id();
    return n;
}

// Builds an op result; records parents and the closure only when some input
// needs gradients.
std::shared_ptr<Node> make_result(Shape shape, std::vector<double> value,
                                  std::initializer_list<const Tensor*> inputs,
                                  std::function<void(Node&)> backward) {
    bool needs = false;
    for (const Tensor* t : inputs) needs = needs || t->requires_grad();
    auto n = make_node(std::move(shape), std::move(value), needs);
    if (needs) {
        for (const Tensor* t : inputs) n->parents.push_back(t->node_ptr());
        n->backward = std::move(backward);
    }
    return n;
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape())
        throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                         to_string(b.shape()));
}

void require_rank(const Tensor& t, std::size_t rank, const char* op, const char* what) {
    if (t.shape().size() != rank)
        throw ShapeError(std::string(op) + ": " + what + " must have rank " + std::to_string(rank) + ", got " +
                         to_string(t.shape()));
}

}  // namespace

std::string to_string(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

// ---- Tensor ------------------------------------------------------------------

Tensor::Tensor() : node_(make_node({}, {0.0}, false)) {}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad) {
    for (int d : shape)
        if (d <= 0) throw ShapeError("tensor dimensions must be positive, got " + to_string(shape));
    if (values.size() != ad::numel(shape))
        throw ShapeError("tensor value count " + std::to_string(values.size()) + " does not match shape " +
                         to_string(shape));
    node_ = make_node(std::move(shape), std::move(values), requires_grad);
}

Tensor::Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    std::size_t n = ad::numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) { return Tensor({}, {value}, requires_grad); }

const Shape& Tensor::shape() const { return node_->shape; }
std::size_t Tensor::numel() const { return node_->value.size(); }
bool Tensor::requires_grad() const { return node_->requires_grad; }
std::uint64_t Tensor::id() const { return node_->id; }
std::span<const double> Tensor::values() const { return node_->value; }
std::span<double> Tensor::mutable_values() { return node_->value; }
std::span<const double> Tensor::grad() const { return node_->grad; }
bool Tensor::has_grad() const { return !node_->grad.empty(); }
void Tensor::zero_grad() { node_->grad.clear(); }

double Tensor::item() const {
    if (numel() != 1) throw ShapeError("item() on non-scalar tensor " + to_string(shape()));
    return node_->value[0];
}

Tensor Tensor::detach() const { return Ops::wrap(make_node(node_->shape, node_->value, false)); }

// ---- operations ----------------------------------------------------------------

namespace {

// Row bands keep the working set of a conv pass in cache.
constexpr int kBandRows = 8;

struct ConvGeometry {
    int in_c, out_c, k, h, w;
};

void conv_forward(const ConvGeometry& g, const double* in, const double* weight, const double* bias,
                  double* out) {
    const int r = g.k / 2;
    const std::size_t hw = static_cast<std::size_t>(g.h) * g.w;
    for (int o = 0; o < g.out_c; ++o) std::fill_n(out + o * hw, hw, bias[o]);
    for (int y0 = 0; y0 < g.h; y0 += kBandRows) {
        const int y1 = std::min(g.h, y0 + kBandRows);
        for (int o = 0; o < g.out_c; ++o) {
            double* outp = out + o * hw;
            for (int c = 0; c < g.in_c; ++c) {
                const double* inp = in + c * hw;
                const double* wk = weight + (static_cast<std::size_t>(o) * g.in_c + c) * g.k * g.k;
                for (int ky = 0; ky < g.k; ++ky) {
                    const int dy = ky - r;
                    const int ya = std::max(y0, -dy), yb = std::min(y1, g.h - dy);
                    for (int kx = 0; kx < g.k; ++kx) {
                        const int dx = kx - r;
                        const double wv = wk[ky * g.k + kx];
                        const int xa = std::max(0, -dx), xb = std::min(g.w, g.w - dx);
                        for (int y = ya; y < yb; ++y) {
                            double* dst = outp + static_cast<std::size_t>(y) * g.w;
                            const double* src = inp + static_cast<std::size_t>(y + dy) * g.w + dx;
                            for (int x = xa; x < xb; ++x) dst[x] += wv * src[x];
                        }
                    }
                }
            }
        }
    }
}

void conv_backward(const ConvGeometry& g, const double* in, const double* weight, const double* gout,
                   double* gin, double* gweight, double* gbias) {
    const int r = g.k / 2;
    const std::size_t hw = static_cast<std::size_t>(g.h) * g.w;
    if (gbias)
        for (int o = 0; o < g.out_c; ++o) {
            double s = 0.0;
            const double* go = gout + o * hw;
            for (std::size_t i = 0; i < hw; ++i) s += go[i];
            gbias[o] += s;
        }
    for (int y0 = 0; y0 < g.h; y0 += kBandRows) {
        const int y1 = std::min(g.h, y0 + kBandRows);
        for (int o = 0; o < g.out_c; ++o) {
            const double* go = gout + o * hw;
            for (int c = 0; c < g.in_c; ++c) {
                const double* inp = in + c * hw;
                double* gi = gin ? gin + c * hw : nullptr;
                const std::size_t wbase = (static_cast<std::size_t>(o) * g.in_c + c) * g.k * g.k;
                for (int ky = 0; ky < g.k; ++ky) {
                    const int dy = ky - r;
                    const int ya = std::max(y0, -dy), yb = std::min(y1, g.h - dy);
                    for (int kx = 0; kx < g.k; ++kx) {
                        const int dx = kx - r;
                        const double wv = weight[wbase + ky * g.k + kx];
                        const int xa = std::max(0, -dx), xb = std::min(g.w, g.w - dx);
                        double acc = 0.0;
                        for (int y = ya; y < yb; ++y) {
                            const double* gorow = go + static_cast<std::size_t>(y) * g.w;
                            const std::size_t off = static_cast<std::size_t>(y + dy) * g.w + dx;
                            const double* src = inp + off;
                            if (gi) {
                                double* dst = gi + off;
                                for (int x = xa; x < xb; ++x) dst[x] += wv * gorow[x];
                            }
                            if (gweight)
                                for (int x = xa; x < xb; ++x) acc += gorow[x] * src[x];
                        }
                        if (gweight) gweight[wbase + ky * g.k + kx] += acc;
                    }
                }
            }
        }
    }
}

template <class F, class G>
Tensor unary(const Tensor& t, F forward, G derivative) {
    std::vector<double> out(t.numel());
    auto in = t.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = forward(in[i]);
    auto node = make_result(t.shape(), std::move(out), {&t}, [derivative](Node& self) {
        Node& p = *self.parents[0];
        if (!p.requires_grad) return;
        auto& gp = p.ensure_grad();
        for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += self.grad[i] * derivative(p.value[i], self.value[i]);
    });
    return Ops::wrap(node);
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias) {
    require_rank(input, 3, "conv2d", "input");
    require_rank(weight, 4, "conv2d", "weight");
    require_rank(bias, 1, "conv2d", "bias");
    const int k = weight.dim(2);
    if (weight.dim(3) != k || k % 2 == 0)
        throw ShapeError("conv2d: kernel must be square with odd size, got " + to_string(weight.shape()));
    if (weight.dim(1) != input.dim(0) || bias.dim(0) != weight.dim(0))
        throw ShapeError("conv2d: shape mismatch input " + to_string(input.shape()) + " weight " +
                         to_string(weight.shape()) + " bias " + to_string(bias.shape()));
    ConvGeometry g{input.dim(0), weight.dim(0), k, input.dim(1), input.dim(2)};
    std::vector<double> out(static_cast<std::size_t>(g.out_c) * g.h * g.w);
    conv_forward(g, input.values().data(), weight.values().data(), bias.values().data(), out.data());
    auto node = make_result({g.out_c, g.h, g.w}, std::move(out), {&input, &weight, &bias}, [g](Node& self) {
        Node& in = *self.parents[0];
        Node& w = *self.parents[1];
        Node& b = *self.parents[2];
        conv_backward(g, in.value.data(), w.value.data(), self.grad.data(),
                      in.requires_grad ? in.ensure_grad().data() : nullptr,
                      w.requires_grad ? w.ensure_grad().data() : nullptr,
                      b.requires_grad ? b.ensure_grad().data() : nullptr);
    });
    return Ops::wrap(node);
}

Tensor relu(const Tensor& t) {
    return unary(
        t, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& t) {
    return unary(
        t,
        [](double x) {
            if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
            double e = std::exp(x);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "hadamard");
    std::vector<double> out(a.numel());
    auto av = a.values(), bv = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
    auto node = make_result(a.shape(), std::move(out), {&a, &b}, [](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        if (pa.requires_grad) {
            auto& g = pa.ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb.value[i];
        }
        if (pb.requires_grad) {
            auto& g = pb.ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa.value[i];
        }
    });
    return Ops::wrap(node);
}

namespace {

Tensor linear_combination(const Tensor& a, const Tensor& b, double sb, const char* op) {
    require_same_shape(a, b, op);
    std::vector<double> out(a.numel());
    auto av = a.values(), bv = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + sb * bv[i];
    auto node = make_result(a.shape(), std::move(out), {&a, &b}, [sb](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        if (pa.requires_grad) {
            auto& g = pa.ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
        if (pb.requires_grad) {
            auto& g = pb.ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += sb * self.grad[i];
        }
    });
    return Ops::wrap(node);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return linear_combination(a, b, 1.0, "add"); }
Tensor sub(const Tensor& a, const Tensor& b) { return linear_combination(a, b, -1.0, "sub"); }

Tensor scale(const Tensor& t, double factor) {
    return unary(t, [factor](double x) { return factor * x; }, [factor](double, double) { return factor; });
}

Tensor add_constant(const Tensor& t, double c) {
    return unary(t, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    require_rank(a, 3, "concat_channels", "first input");
    require_rank(b, 3, "concat_channels", "second input");
    if (a.dim(1) != b.dim(1) || a.dim(2) != b.dim(2))
        throw ShapeError("concat_channels: spatial mismatch " + to_string(a.shape()) + " vs " +
                         to_string(b.shape()));
    std::vector<double> out;
    out.reserve(a.numel() + b.numel());
    out.insert(out.end(), a.values().begin(), a.values().end());
    out.insert(out.end(), b.values().begin(), b.values().end());
    const std::size_t split = a.numel();
    auto node = make_result({a.dim(0) + b.dim(0), a.dim(1), a.dim(2)}, std::move(out), {&a, &b},
                            [split](Node& self) {
                                Node& pa = *self.parents[0];
                                Node& pb = *self.parents[1];
                                if (pa.requires_grad) {
                                    auto& g = pa.ensure_grad();
                                    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
                                }
                                if (pb.requires_grad) {
                                    auto& g = pb.ensure_grad();
                                    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[split + i];
                                }
                            });
    return Ops::wrap(node);
}

Tensor slice_channels(const Tensor& t, int first, int count) {
    require_rank(t, 3, "slice_channels", "input");
    if (first < 0 || count <= 0 || first + count > t.dim(0))
        throw ShapeError("slice_channels: range [" + std::to_string(first) + ", " + std::to_string(first + count) +
                         ") outside " + to_string(t.shape()));
    const std::size_t plane = static_cast<std::size_t>(t.dim(1)) * t.dim(2);
    const std::size_t offset = first * plane;
    std::vector<double> out(t.values().begin() + offset, t.values().begin() + offset + count * plane);
    auto node = make_result({count, t.dim(1), t.dim(2)}, std::move(out), {&t}, [offset](Node& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[offset + i] += self.grad[i];
    });
    return Ops::wrap(node);
}

Tensor sum(const Tensor& t) {
    double s = 0.0;
    for (double v : t.values()) s += v;
    auto node = make_result({}, {s}, {&t}, [](Node& self) {
        auto& g = self.parents[0]->ensure_grad();
        for (double& v : g) v += self.grad[0];
    });
    return Ops::wrap(node);
}

Tensor mean(const Tensor& t) { return scale(sum(t), 1.0 / static_cast<double>(t.numel())); }

Tensor mse(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mse");
    const std::size_t n = a.numel();
    auto av = a.values(), bv = b.values();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = av[i] - bv[i];
        s += d * d;
    }
    auto node = make_result({}, {s / static_cast<double>(n)}, {&a, &b}, [n](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        const double k = 2.0 * self.grad[0] / static_cast<double>(n);
        if (pa.requires_grad) {
            auto& g = pa.ensure_grad();
            for (std::size_t i = 0; i < n; ++i) g[i] += k * (pa.value[i] - pb.value[i]);
        }
        if (pb.requires_grad) {
            auto& g = pb.ensure_grad();
            for (std::size_t i = 0; i < n; ++i) g[i] -= k * (pa.value[i] - pb.value[i]);
        }
    });
    return Ops::wrap(node);
}

Tensor masked_mse(const Tensor& a, const Tensor& b, const Mask& m) {
    require_same_shape(a, b, "masked_mse");
    require_rank(a, 3, "masked_mse", "input");
    if (m.height != a.dim(1) || m.width != a.dim(2))
        throw ShapeError("masked_mse: mask " + std::to_string(m.height) + "x" + std::to_string(m.width) +
                         " does not match " + to_string(a.shape()));
    const std::size_t n = a.numel();
    const std::size_t plane = m.bits.size();
    auto av = a.values(), bv = b.values();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!m.bits[i % plane]) continue;
        double d = av[i] - bv[i];
        s += d * d;
    }
    auto bits = m.bits;
    auto node = make_result({}, {s / static_cast<double>(n)}, {&a, &b}, [n, plane, bits](Node& self) {
        Node& pa = *self.parents[0];
        Node& pb = *self.parents[1];
        const double k = 2.0 * self.grad[0] / static_cast<double>(n);
        if (pa.requires_grad) {
            auto& g = pa.ensure_grad();
            for (std::size_t i = 0; i < n; ++i)
                if (bits[i % plane]) g[i] += k * (pa.value[i] - pb.value[i]);
        }
        if (pb.requires_grad) {
            auto& g = pb.ensure_grad();
            for (std::size_t i = 0; i < n; ++i)
                if (bits[i % plane]) g[i] -= k * (pa.value[i] - pb.value[i]);
        }
    });
    return Ops::wrap(node);
}

void backward(const Tensor& loss) {
    if (loss.numel() != 1 || !loss.shape().empty())
        throw UsageError("backward: loss must be a scalar, got shape " + to_string(loss.shape()));
    Node* root = loss.node();
    if (!root->requires_grad) return;

    // Iterative post-order DFS gives a topological order (inputs first).
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack{{root, 0}};
    seen.insert(root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* p = node->parents[next++].get();
            if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    root->ensure_grad()[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward && !n->grad.empty()) n->backward(*n);
    }
    // Release the tape: interior nodes drop their inputs and gradients.
    for (Node* n : order) {
        if (n->is_leaf()) continue;
        n->parents.clear();
        n->backward = nullptr;
        n->grad.clear();
        n->grad.shrink_to_fit();
    }
}

// ---- helpers -------------------------------------------------------------------

Tensor from_image(const Image& img, bool requires_grad) {
    return Tensor({img.channels(), img.height(), img.width()},
                  std::vector<double>(img.data().begin(), img.data().end()), requires_grad);
}

Image to_image(const Tensor& t) {
    require_rank(t, 3, "to_image", "input");
    std::vector<double> v(t.values().begin(), t.values().end());
    return image_from_clamped(t.dim(1), t.dim(2), t.dim(0), std::move(v));
}

Tensor clamp01(const Tensor& t) {
    std::vector<double> v(t.values().begin(), t.values().end());
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    return Tensor(t.shape(), std::move(v), false);
}

// ---- parameters -----------------------------------------------------------------

Parameter::Parameter(std::string n, Tensor v)
    : name(std::move(n)),
      value(std::move(v)),
      first_moment(value.numel(), 0.0),
      second_moment(value.numel(), 0.0) {
    if (!value.requires_grad()) throw UsageError("parameter '" + name + "' must require gradients");
}

void adam_step(std::span<Parameter*> params, const AdamConfig& cfg, double grad_scale) {
    for (Parameter* p : params) {
        auto grad = p->value.grad();
        if (p->first_moment.size() != p->value.numel() || p->second_moment.size() != p->value.numel())
            throw ShapeError("adam: optimizer state shape mismatch for '" + p->name + "'");
        ++p->steps;
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(p->steps));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(p->steps));
        auto w = p->value.mutable_values();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double g = grad.empty() ? 0.0 : grad[i] * grad_scale;
            p->first_moment[i] = cfg.beta1 * p->first_moment[i] + (1.0 - cfg.beta1) * g;
            p->second_moment[i] = cfg.beta2 * p->second_moment[i] + (1.0 - cfg.beta2) * g * g;
            const double mhat = p->first_moment[i] / bc1;
            const double vhat = p->second_moment[i] / bc2;
            w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

// ---- TBWT ----------------------------------------------------------------------

namespace {
constexpr std::uint8_t kWeightsMagic[4] = {'T', 'B', 'W', 'T'};
constexpr std::uint8_t kWeightsVersion = 1;
}  // namespace

std::vector<std::uint8_t> save_tensors(std::span<const NamedTensor> tensors) {
    std::vector<std::uint8_t> out(std::begin(kWeightsMagic), std::end(kWeightsMagic));
    bytes::put_u8(out, kWeightsVersion);
    bytes::put_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const NamedTensor& t : tensors) {
        if (t.values.size() != ad::numel(t.shape))
            throw ShapeError("save_tensors: '" + t.name + "' value count does not match " + to_string(t.shape));
        bytes::put_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out.insert(out.end(), t.name.begin(), t.name.end());
        bytes::put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
        for (int d : t.shape) bytes::put_u32(out, static_cast<std::uint32_t>(d));
        for (double v : t.values) bytes::put_f64(out, v);
    }
    return out;
}

std::vector<NamedTensor> load_tensors(std::span<const std::uint8_t> data) {
    if (data.size() < 4 || !std::equal(std::begin(kWeightsMagic), std::end(kWeightsMagic), data.begin()))
        throw DecodeError("TBWT: bad magic");
    bytes::Reader in(data.subspan(4));
    if (in.u8("version") != kWeightsVersion) throw DecodeError("TBWT: unsupported version");
    std::uint32_t count = in.u32("tensor count");
    std::vector<NamedTensor> out;
    for (std::uint32_t i = 0; i < count; ++i) {
        NamedTensor t;
        std::uint32_t len = in.u32("name length");
        auto name = in.take(len, "name");
        t.name.assign(name.begin(), name.end());
        std::uint32_t rank = in.u32(t.name + ".rank");
        if (rank > 8) throw DecodeError("TBWT: '" + t.name + "' rank too large");
        std::size_t n = 1;
        for (std::uint32_t r = 0; r < rank; ++r) {
            std::uint32_t d = in.u32(t.name + ".dims");
            if (d == 0 || d > (1u << 24)) throw DecodeError("TBWT: '" + t.name + "' has invalid dimension");
            t.shape.push_back(static_cast<int>(d));
            n *= d;
        }
        if (n > in.remaining() / 8) throw DecodeError("truncated stream reading TBWT values of '" + t.name + "'");
        t.values.resize(n);
        for (double& v : t.values) v = in.f64(t.name + ".values");
        out.push_back(std::move(t));
    }
    if (!in.done()) throw DecodeError("TBWT: trailing bytes");
    return out;
}

}  // namespace glyphguide::ad
