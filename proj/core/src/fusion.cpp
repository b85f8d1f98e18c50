#include "glyphguide/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "glyphguide/errors.hpp"
#include "glyphguide/random.hpp"

namespace glyphguide {

using ad::Parameter;
using ad::Tensor;

namespace {

Parameter make_param(const std::string& name, ad::Shape shape, std::vector<double> values) {
    return Parameter(name, Tensor(std::move(shape), std::move(values), true));
}

Parameter zeros(const std::string& name, ad::Shape shape) {
    std::size_t n = ad::numel(shape);
    return make_param(name, std::move(shape), std::vector<double>(n, 0.0));
}

Parameter gaussian(const std::string& name, ad::Shape shape, double stddev, Rng& rng) {
    std::vector<double> v(ad::numel(shape));
    for (double& x : v) x = rng.normal(0.0, stddev);
    return make_param(name, std::move(shape), std::move(v));
}

std::string unit_name(int i, const char* leaf) { return "attention.trunk." + std::to_string(i) + "." + leaf; }

template <class Self, class Out>
void collect(Self& p, std::vector<Out>& out) {
    out.insert(out.end(), {&p.expand_w, &p.expand_b});
    for (auto& u : p.trunk)
        out.insert(out.end(),
                   {&u.reduce_w, &u.reduce_b, &u.spatial_w, &u.spatial_b, &u.restore_w, &u.restore_b});
    out.insert(out.end(), {&p.mask1_w, &p.mask1_b, &p.mask2_w, &p.mask2_b, &p.project_w, &p.project_b});
}

// Fresh parameters with the same names/shapes/values; `trainable` controls
// gradient tracking (false for inference).
FusionParams copy_params(const FusionParams& src, bool trainable) {
    FusionParams dst = init_identity(0);
    auto from = src.all();
    auto to = dst.all();
    for (std::size_t i = 0; i < from.size(); ++i) {
        const Tensor& v = from[i]->value;
        Tensor t(v.shape(), std::vector<double>(v.values().begin(), v.values().end()), trainable);
        to[i]->name = from[i]->name;
        to[i]->value = t;
        to[i]->first_moment.assign(t.numel(), 0.0);
        to[i]->second_moment.assign(t.numel(), 0.0);
        to[i]->steps = 0;
    }
    return dst;
}

}  // namespace

std::vector<Parameter*> FusionParams::all() {
    std::vector<Parameter*> out;
    collect(*this, out);
    return out;
}

std::vector<const Parameter*> FusionParams::all() const {
    std::vector<const Parameter*> out;
    collect(*this, out);
    return out;
}

std::size_t FusionParams::parameter_count() const {
    std::size_t n = 0;
    for (const Parameter* p : all()) n += p->value.numel();
    return n;
}

std::vector<ad::NamedTensor> FusionParams::to_named() const {
    std::vector<ad::NamedTensor> out;
    for (const Parameter* p : all())
        out.push_back({p->name, p->value.shape(), {p->value.values().begin(), p->value.values().end()}});
    return out;
}

FusionParams FusionParams::from_named(const std::vector<ad::NamedTensor>& tensors) {
    std::map<std::string, const ad::NamedTensor*> by_name;
    for (const auto& t : tensors) by_name[t.name] = &t;
    FusionParams out = init_identity(0);
    for (Parameter* p : out.all()) {
        auto it = by_name.find(p->name);
        if (it == by_name.end()) throw DecodeError("fusion weights: missing tensor '" + p->name + "'");
        const ad::NamedTensor& t = *it->second;
        if (t.shape != p->value.shape())
            throw DecodeError("fusion weights: '" + p->name + "' has shape " + ad::to_string(t.shape) +
                              ", expected " + ad::to_string(p->value.shape()));
        for (double v : t.values)
            if (!std::isfinite(v)) throw DecodeError("fusion weights: '" + p->name + "' is not finite");
        std::copy(t.values.begin(), t.values.end(), p->value.mutable_values().begin());
    }
    if (by_name.size() != out.all().size()) throw DecodeError("fusion weights: unexpected extra tensors");
    return out;
}

FusionParams FusionParams::clone() const { return copy_params(*this, true); }

FusionGroup group_of(const std::string& name) {
    if (name.starts_with("expand.")) return FusionGroup::expand;
    if (name.starts_with("attention.trunk.")) return FusionGroup::trunk;
    if (name.starts_with("attention.mask.")) return FusionGroup::mask;
    if (name.starts_with("project.")) return FusionGroup::project;
    throw ValidationError("unknown fusion parameter '" + name + "'");
}

FusionParams init_identity(std::uint64_t seed) {
    Rng rng(seed);
    FusionParams p;

    std::vector<double> expand(kExpandedChannels * 3, 0.0);
    for (int o = 0; o < kExpandedChannels; ++o)
        for (int c = 0; c < 3; ++c) expand[o * 3 + c] = o < 3 ? (o == c ? 1.0 : 0.0) : rng.normal(0.0, 1e-2);
    p.expand_w = make_param("expand.weight", {kExpandedChannels, 3, 1, 1}, std::move(expand));
    p.expand_b = zeros("expand.bias", {kExpandedChannels});

    // He-style scales for layers that feed relus; final convs start at zero.
    for (int i = 0; i < kResidualUnits; ++i) {
        ResidualUnit& u = p.trunk[static_cast<std::size_t>(i)];
        u.reduce_w = gaussian(unit_name(i, "reduce.weight"), {kTrunkWidth, kFusedChannels, 1, 1},
                              std::sqrt(2.0 / kFusedChannels), rng);
        u.reduce_b = zeros(unit_name(i, "reduce.bias"), {kTrunkWidth});
        u.spatial_w = gaussian(unit_name(i, "spatial.weight"), {kTrunkWidth, kTrunkWidth, 3, 3},
                               std::sqrt(2.0 / (9 * kTrunkWidth)), rng);
        u.spatial_b = zeros(unit_name(i, "spatial.bias"), {kTrunkWidth});
        u.restore_w = zeros(unit_name(i, "restore.weight"), {kFusedChannels, kTrunkWidth, 1, 1});
        u.restore_b = zeros(unit_name(i, "restore.bias"), {kFusedChannels});
    }

    p.mask1_w = gaussian("attention.mask.conv1.weight", {kFusedChannels, kFusedChannels, 1, 1},
                         std::sqrt(2.0 / kFusedChannels), rng);
    p.mask1_b = zeros("attention.mask.conv1.bias", {kFusedChannels});
    p.mask2_w = zeros("attention.mask.conv2.weight", {kFusedChannels, kFusedChannels, 1, 1});
    p.mask2_b = make_param("attention.mask.conv2.bias", {kFusedChannels},
                           std::vector<double>(kFusedChannels, kMaskGateBias));

    const double gate = 1.0 / (1.0 + std::exp(-kMaskGateBias));
    std::vector<double> project(3 * kFusedChannels, 0.0);
    for (int c = 0; c < 3; ++c) project[c * kFusedChannels + c] = 1.0 / (1.0 + gate);
    p.project_w = make_param("project.weight", {3, kFusedChannels, 1, 1}, std::move(project));
    p.project_b = zeros("project.bias", {3});
    return p;
}

FusionOutput fuse(const Tensor& decoded, const Tensor& guidance, const FusionParams& p) {
    if (decoded.shape().size() != 3 || decoded.dim(0) != 3)
        throw ShapeError("fuse: decoded must be 3xHxW, got " + ad::to_string(decoded.shape()));
    if (guidance.shape() != decoded.shape())
        throw ShapeError("fuse: guidance " + ad::to_string(guidance.shape()) + " does not match decoded " +
                         ad::to_string(decoded.shape()));

    Tensor modulated = ad::hadamard(guidance, decoded);
    Tensor features = ad::concat_channels(ad::conv2d(decoded, p.expand_w.value, p.expand_b.value), modulated);

    Tensor trunk = features;
    for (const ResidualUnit& u : p.trunk) {
        Tensor h = ad::relu(ad::conv2d(trunk, u.reduce_w.value, u.reduce_b.value));
        h = ad::relu(ad::conv2d(h, u.spatial_w.value, u.spatial_b.value));
        h = ad::conv2d(h, u.restore_w.value, u.restore_b.value);
        trunk = ad::add(trunk, h);
    }
    Tensor gate = ad::relu(ad::conv2d(features, p.mask1_w.value, p.mask1_b.value));
    gate = ad::sigmoid(ad::conv2d(gate, p.mask2_w.value, p.mask2_b.value));

    Tensor attended = ad::add(ad::hadamard(trunk, gate), features);
    return {ad::conv2d(attended, p.project_w.value, p.project_b.value), gate};
}

Image fuse_image(const Image& decoded, const Image& guidance, const FusionParams& params) {
    FusionParams frozen = copy_params(params, false);
    FusionOutput out = fuse(ad::from_image(decoded), ad::from_image(guidance), frozen);
    return ad::to_image(out.image);
}

}  // namespace glyphguide
