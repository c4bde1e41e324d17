#include "radnas/graph.hpp"

namespace radnas::arch {

const char* to_string(PrimKind k) {
    switch (k) {
        case PrimKind::input: return "input";
        case PrimKind::conv: return "conv";
        case PrimKind::sepconv: return "sepconv";
        case PrimKind::pool_max: return "pool_max";
        case PrimKind::pool_avg: return "pool_avg";
        case PrimKind::subsample2: return "subsample2";
        case PrimKind::upsample2x: return "upsample2x";
        case PrimKind::add: return "add";
        case PrimKind::concat: return "concat";
        case PrimKind::project1x1: return "project1x1";
        case PrimKind::head1x1: return "head1x1";
    }
    return "?";
}

namespace {

class Builder {
public:
    Builder(const ArchitectureSpec& spec, int in_h, int in_w) : spec_(spec) {
        LayerNode input;
        input.kind = PrimKind::input;
        input.out_ch = spec.macro.in_channels;
        input.out_h = in_h;
        input.out_w = in_w;
        input.label = "input";
        nodes_.push_back(input);
        prev_ = prevprev_ = 0;
    }

    LayerGraph run() {
        const MacroConfig& m = spec_.macro;
        std::vector<int> skips;
        for (int stage = 0; stage < m.reduction_stages; ++stage) {
            const int width = m.base_channels << stage;
            for (int j = 0; j < m.normals_per_stage; ++j) {
                apply_cell(spec_.normal, width, "enc" + std::to_string(stage));
            }
            skips.push_back(prev_);
            apply_cell(spec_.reduction, m.base_channels << (stage + 1),
                       "enc" + std::to_string(stage));
        }
        for (int j = 0; j < m.normals_per_stage; ++j) {
            apply_cell(spec_.normal, m.base_channels << m.reduction_stages, "bottleneck");
        }
        for (int stage = m.reduction_stages - 1; stage >= 0; --stage) {
            const int width = m.base_channels << stage;
            const std::string tag = "dec" + std::to_string(stage);
            apply_cell(spec_.upsample, width, tag);
            // U-Net skip: concatenate the matching encoder feature.
            const int skip = align(skips.back(), nodes_[prev_].out_h, nodes_[prev_].out_w);
            skips.pop_back();
            const int joined = emit_combine(prev_, skip, CombineKind::concat, tag + ".skip");
            prevprev_ = prev_;
            prev_ = joined;
            for (int j = 0; j < m.normals_per_stage; ++j) {
                apply_cell(spec_.normal, width, tag);
            }
        }
        if (spec_.with_head) {
            LayerNode head;
            head.kind = PrimKind::head1x1;
            head.in_a = prev_;
            head.kernel = 1;
            head.params = static_cast<long long>(nodes_[prev_].out_ch) + 1;
            head.label = "head";
            set_dims(head, prev_, 1, nodes_[prev_].out_h, nodes_[prev_].out_w);
            prev_ = push(std::move(head));
        }

        LayerGraph g;
        g.nodes = std::move(nodes_);
        g.output = prev_;
        for (const LayerNode& n : g.nodes) {
            g.total_params += n.params;
            if (n.relu) {
                g.relu_units += static_cast<long long>(n.out_ch) * n.out_h * n.out_w;
            }
        }
        return g;
    }

private:
    int push(LayerNode&& n) {
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    void set_dims(LayerNode& n, int src, int out_ch, int out_h, int out_w) {
        n.in_ch = nodes_[src].out_ch;
        n.in_h = nodes_[src].out_h;
        n.in_w = nodes_[src].out_w;
        n.out_ch = out_ch;
        n.out_h = out_h;
        n.out_w = out_w;
    }

    // Parameter-free spatial alignment: halve or double until the source
    // matches (ref_h, ref_w). Only power-of-two ratios are reachable.
    int align(int src, int ref_h, int ref_w) {
        int guard = 0;
        while (nodes_[src].out_h != ref_h || nodes_[src].out_w != ref_w) {
            if (++guard > 16) break;
            const LayerNode& s = nodes_[src];
            LayerNode n;
            if (s.out_h > ref_h && s.out_w > ref_w) {
                n.kind = PrimKind::subsample2;
                n.stride = 2;
                set_dims(n, src, s.out_ch, (s.out_h + 1) / 2, (s.out_w + 1) / 2);
            } else if (s.out_h < ref_h && s.out_w < ref_w) {
                n.kind = PrimKind::upsample2x;
                set_dims(n, src, s.out_ch, s.out_h * 2, s.out_w * 2);
            } else {
                break;
            }
            n.in_a = src;
            n.label = nodes_[src].label + ":align";
            src = push(std::move(n));
        }
        if (nodes_[src].out_h != ref_h || nodes_[src].out_w != ref_w) {
            throw ShapeError("cannot align " + std::to_string(nodes_[src].out_h) + "x" +
                             std::to_string(nodes_[src].out_w) + " to " + std::to_string(ref_h) +
                             "x" + std::to_string(ref_w) + " near " + nodes_[src].label);
        }
        return src;
    }

    // One branch op. Reduction cells put stride 2 in the op itself; upsample
    // cells resize by nearest-neighbor 2x before the op.
    int emit_op(int src, OpKind op, CellKind cell, int target_ch, const std::string& label) {
        if (cell == CellKind::upsample) {
            LayerNode up;
            up.kind = PrimKind::upsample2x;
            up.in_a = src;
            up.label = label + ":up2x";
            set_dims(up, src, nodes_[src].out_ch, nodes_[src].out_h * 2, nodes_[src].out_w * 2);
            src = push(std::move(up));
        }
        const int stride = cell == CellKind::reduction ? 2 : 1;
        const LayerNode& s = nodes_[src];

        LayerNode n;
        n.in_a = src;
        n.stride = stride;
        n.label = label + ":" + to_string(op);
        switch (op) {
            case OpKind::identity: {
                if (stride == 1) return src;  // no-op, reuse the producer
                n.kind = PrimKind::subsample2;
                set_dims(n, src, s.out_ch, (s.out_h + 1) / 2, (s.out_w + 1) / 2);
                return push(std::move(n));
            }
            case OpKind::conv3x3:
            case OpKind::conv5x5:
            case OpKind::dilconv3x3: {
                n.kind = PrimKind::conv;
                n.kernel = op == OpKind::conv5x5 ? 5 : 3;
                n.dilation = op == OpKind::dilconv3x3 ? 2 : 1;
                n.padding = n.dilation * (n.kernel - 1) / 2;
                n.relu = true;
                n.params = static_cast<long long>(n.kernel) * n.kernel * s.out_ch * target_ch +
                           target_ch;
                set_dims(n, src, target_ch,
                         conv_out_dim(s.out_h, n.kernel, stride, n.dilation, n.padding),
                         conv_out_dim(s.out_w, n.kernel, stride, n.dilation, n.padding));
                return push(std::move(n));
            }
            case OpKind::sepconv3x3:
            case OpKind::sepconv5x5: {
                n.kind = PrimKind::sepconv;
                n.kernel = op == OpKind::sepconv5x5 ? 5 : 3;
                n.padding = (n.kernel - 1) / 2;
                n.relu = true;  // after the pointwise stage
                n.params = static_cast<long long>(n.kernel) * n.kernel * s.out_ch +
                           static_cast<long long>(s.out_ch) * target_ch + target_ch;
                set_dims(n, src, target_ch, conv_out_dim(s.out_h, n.kernel, stride, 1, n.padding),
                         conv_out_dim(s.out_w, n.kernel, stride, 1, n.padding));
                return push(std::move(n));
            }
            case OpKind::maxpool3x3:
            case OpKind::avgpool3x3: {
                n.kind = op == OpKind::maxpool3x3 ? PrimKind::pool_max : PrimKind::pool_avg;
                n.kernel = 3;
                n.padding = 1;
                set_dims(n, src, s.out_ch, conv_out_dim(s.out_h, 3, stride, 1, 1),
                         conv_out_dim(s.out_w, 3, stride, 1, 1));
                return push(std::move(n));
            }
        }
        throw ShapeError("unreachable op kind");
    }

    int emit_combine(int a, int b, CombineKind combine, const std::string& label) {
        if (nodes_[a].out_h != nodes_[b].out_h || nodes_[a].out_w != nodes_[b].out_w) {
            throw ShapeError("combine spatial mismatch at " + label);
        }
        if (combine == CombineKind::add && nodes_[a].out_ch != nodes_[b].out_ch) {
            // Project the thinner branch to the wider width so every decision
            // sequence stays legal. Counted in parameters. Like the head, the
            // projection is alignment plumbing rather than a searched op, so
            // it stays linear; a ReLU here would also compound the positive
            // post-activation means at every add.
            const bool a_thin = nodes_[a].out_ch < nodes_[b].out_ch;
            const int thin = a_thin ? a : b;
            const int wide_ch = nodes_[a_thin ? b : a].out_ch;
            LayerNode p;
            p.kind = PrimKind::project1x1;
            p.in_a = thin;
            p.kernel = 1;
            p.params = static_cast<long long>(nodes_[thin].out_ch) * wide_ch + wide_ch;
            p.label = label + ":project";
            set_dims(p, thin, wide_ch, nodes_[thin].out_h, nodes_[thin].out_w);
            const int projected = push(std::move(p));
            (a_thin ? a : b) = projected;
        }
        LayerNode n;
        n.kind = combine == CombineKind::add ? PrimKind::add : PrimKind::concat;
        n.in_a = a;
        n.in_b = b;
        n.label = label + ":" + to_string(combine);
        const int out_ch = combine == CombineKind::add ? nodes_[a].out_ch
                                                       : nodes_[a].out_ch + nodes_[b].out_ch;
        set_dims(n, a, out_ch, nodes_[a].out_h, nodes_[a].out_w);
        return push(std::move(n));
    }

    void apply_cell(const CellSpec& cell, int target_ch, const std::string& tag) {
        const std::string label = tag + "." + to_string(cell.kind);
        const int ref_h = nodes_[prev_].out_h;
        const int ref_w = nodes_[prev_].out_w;
        const int src_a = align(cell.block.input_a == 0 ? prev_ : prevprev_, ref_h, ref_w);
        const int src_b = align(cell.block.input_b == 0 ? prev_ : prevprev_, ref_h, ref_w);
        const int branch_a = emit_op(src_a, cell.block.op_a, cell.kind, target_ch, label + ".a");
        const int branch_b = emit_op(src_b, cell.block.op_b, cell.kind, target_ch, label + ".b");
        const int out = emit_combine(branch_a, branch_b, cell.block.combine, label);
        prevprev_ = prev_;
        prev_ = out;
    }

    const ArchitectureSpec& spec_;
    std::vector<LayerNode> nodes_;
    int prev_ = 0;
    int prevprev_ = 0;
};

}  // namespace

LayerGraph expand(const ArchitectureSpec& spec, int in_h, int in_w) {
    if (in_h < 1 || in_w < 1) throw ShapeError("input dims must be positive");
    if (spec.macro.reduction_stages < 0 || spec.macro.normals_per_stage < 0 ||
        spec.macro.base_channels < 1 || spec.macro.in_channels < 1) {
        throw ShapeError("invalid macro config");
    }
    return Builder(spec, in_h, in_w).run();
}

}  // namespace radnas::arch
