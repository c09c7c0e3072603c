#include "medtext/model.hpp"

#include <cmath>

#include "medtext/error.hpp"
#include "medtext/rng.hpp"

namespace medtext {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

constexpr double kLeakySlope = 0.01;

double leaky_relu(double x) { return x > 0.0 ? x : kLeakySlope * x; }

struct TensorRef {
    std::string name;
    Matrix* matrix;
    std::size_t fan_in;
};

std::vector<TensorRef> tensor_table(ParamSet& p) {
    std::vector<TensorRef> refs;
    auto dir = [&](const std::string& prefix, LstmDirParams& d) {
        refs.push_back({prefix + ".w_in", &d.w_in, d.w_in.rows()});
        refs.push_back({prefix + ".w_rec", &d.w_rec, d.w_rec.rows()});
        refs.push_back({prefix + ".bias", &d.bias, d.w_in.rows()});
    };
    refs.push_back({"gcn.w0", &p.gcn.w0, p.gcn.w0.rows()});
    refs.push_back({"gcn.w1", &p.gcn.w1, p.gcn.w1.rows()});
    refs.push_back({"readout.f1_w", &p.readout.f1_w, p.readout.f1_w.rows()});
    refs.push_back({"readout.f1_b", &p.readout.f1_b, p.readout.f1_w.rows()});
    refs.push_back({"readout.f2_w", &p.readout.f2_w, p.readout.f2_w.rows()});
    refs.push_back({"readout.f2_b", &p.readout.f2_b, p.readout.f2_w.rows()});
    dir("seq.l1.fwd", p.seq.layer1.fwd);
    dir("seq.l1.bwd", p.seq.layer1.bwd);
    dir("seq.l2.fwd", p.seq.layer2.fwd);
    dir("seq.l2.bwd", p.seq.layer2.bwd);
    refs.push_back({"seq.dec_w", &p.seq.dec_w, p.seq.dec_w.rows()});
    refs.push_back({"seq.dec_b", &p.seq.dec_b, p.seq.dec_w.rows()});
    refs.push_back({"clf.w1", &p.clf.w1, p.clf.w1.rows()});
    refs.push_back({"clf.b1", &p.clf.b1, p.clf.w1.rows()});
    refs.push_back({"clf.w2", &p.clf.w2, p.clf.w2.rows()});
    refs.push_back({"clf.b2", &p.clf.b2, p.clf.w2.rows()});
    return refs;
}

} // namespace

void ModelConfig::validate() const {
    if (d <= 0 || h <= 0 || h_s <= 0 || h_t <= 0 || h_c <= 0) {
        throw Error(ErrorKind::InvalidArgument, "model dimensions must be positive");
    }
}

ParamSet zero_params(const ModelConfig& config) {
    config.validate();
    const auto d = static_cast<std::size_t>(config.d);
    const auto h = static_cast<std::size_t>(config.h);
    const auto hs = static_cast<std::size_t>(config.h_s);
    const auto ht = static_cast<std::size_t>(config.h_t);
    const auto hc = static_cast<std::size_t>(config.h_c);

    ParamSet p;
    p.gcn.w0 = Matrix(d, h);
    p.gcn.w1 = Matrix(h, h);
    p.readout.f1_w = Matrix(h, h);
    p.readout.f1_b = Matrix(1, h);
    p.readout.f2_w = Matrix(h, h);
    p.readout.f2_b = Matrix(1, h);
    auto dir = [&](std::size_t in) {
        LstmDirParams dp;
        dp.w_in = Matrix(in, 4 * hs);
        dp.w_rec = Matrix(hs, 4 * hs);
        dp.bias = Matrix(1, 4 * hs);
        return dp;
    };
    p.seq.layer1.fwd = dir(d);
    p.seq.layer1.bwd = dir(d);
    p.seq.layer2.fwd = dir(2 * hs);
    p.seq.layer2.bwd = dir(2 * hs);
    p.seq.dec_w = Matrix(2 * hs, ht);
    p.seq.dec_b = Matrix(1, ht);
    p.clf.w1 = Matrix(h + ht, hc);
    p.clf.b1 = Matrix(1, hc);
    p.clf.w2 = Matrix(hc, 2);
    p.clf.b2 = Matrix(1, 2);
    return p;
}

ModelState init_model(const ModelConfig& config, std::uint64_t seed) {
    ModelState state;
    state.config = config;
    state.seed = seed;
    state.params = zero_params(config);
    Rng rng(seed);
    for (const TensorRef& ref : tensor_table(state.params)) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(ref.fan_in));
        for (double& v : ref.matrix->data()) {
            v = rng.uniform(-bound, bound);
        }
    }
    return state;
}

std::vector<std::pair<std::string, Matrix*>> named_tensors(ParamSet& params) {
    std::vector<std::pair<std::string, Matrix*>> out;
    for (TensorRef& ref : tensor_table(params)) {
        out.emplace_back(std::move(ref.name), ref.matrix);
    }
    return out;
}

std::vector<std::pair<std::string, const Matrix*>> named_tensors(const ParamSet& params) {
    std::vector<std::pair<std::string, const Matrix*>> out;
    for (auto& [name, matrix] : named_tensors(const_cast<ParamSet&>(params))) {
        out.emplace_back(name, matrix);
    }
    return out;
}

// ---- forward ----

Matrix gcn_forward(const Matrix& a_norm, const Matrix& x0, const GcnParams& params,
                   GcnTrace* trace) {
    if (a_norm.rows() != a_norm.cols() || a_norm.cols() != x0.rows()) {
        throw Error(ErrorKind::ShapeMismatch, "gcn: adjacency and features disagree");
    }
    if (x0.cols() != params.w0.rows() || params.w0.cols() != params.w1.rows()) {
        throw Error(ErrorKind::ShapeMismatch, "gcn: weight shapes disagree");
    }
    GcnTrace local;
    GcnTrace& t = trace ? *trace : local;
    t.ax0 = matmul(a_norm, x0);
    t.m1 = matmul(t.ax0, params.w0);
    t.x1 = t.m1;
    for (double& v : t.x1.data()) v = v > 0.0 ? v : 0.0;
    t.ax1 = matmul(a_norm, t.x1);
    t.m2 = matmul(t.ax1, params.w1);
    t.x2 = t.m2;
    for (double& v : t.x2.data()) v = v > 0.0 ? v : 0.0;
    return t.x2;
}

std::vector<double> readout(const Matrix& x2, const ReadoutParams& params, ReadoutTrace* trace) {
    const std::size_t n = x2.rows();
    if (n == 0) throw Error(ErrorKind::EmptyGraph, "readout over zero nodes");
    const std::size_t h = params.f1_w.cols();
    ReadoutTrace local;
    ReadoutTrace& t = trace ? *trace : local;

    t.p1 = matmul(x2, params.f1_w);
    t.p2 = matmul(x2, params.f2_w);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < h; ++j) {
            t.p1(i, j) += params.f1_b(0, j);
            t.p2(i, j) += params.f2_b(0, j);
        }
    }
    t.s = t.p1;
    for (double& v : t.s.data()) v = sigmoid(v);
    t.l = t.p2;
    for (double& v : t.l.data()) v = leaky_relu(v);
    t.xg = Matrix(n, h);
    for (std::size_t k = 0; k < t.xg.data().size(); ++k) {
        t.xg.data()[k] = t.s.data()[k] * t.l.data()[k];
    }

    t.argmax.assign(h, 0);
    t.d_g.assign(h, 0.0);
    for (std::size_t j = 0; j < h; ++j) {
        double sum = 0.0;
        double best = t.xg(0, j);
        std::size_t best_row = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = t.xg(i, j);
            sum += v;
            if (v > best) {
                best = v;
                best_row = i;
            }
        }
        t.argmax[j] = best_row;
        t.d_g[j] = sum / static_cast<double>(n) + best;
    }
    return t.d_g;
}

namespace {

void run_lstm_direction(const Matrix& inputs, const LstmDirParams& p, bool reverse,
                        LstmDirTrace& trace) {
    const std::size_t steps = inputs.rows();
    const std::size_t hidden = p.w_rec.rows();
    trace.gates = Matrix(steps, 4 * hidden);
    trace.cell = Matrix(steps, hidden);
    trace.cell_tanh = Matrix(steps, hidden);
    trace.hidden = Matrix(steps, hidden);

    std::vector<double> h_prev(hidden, 0.0);
    std::vector<double> c_prev(hidden, 0.0);
    std::vector<double> pre(4 * hidden);
    for (std::size_t step = 0; step < steps; ++step) {
        const std::size_t t = reverse ? steps - 1 - step : step;
        for (std::size_t j = 0; j < 4 * hidden; ++j) pre[j] = p.bias(0, j);
        const double* x = inputs.row(t);
        for (std::size_t k = 0; k < inputs.cols(); ++k) {
            const double xv = x[k];
            if (xv == 0.0) continue;
            const double* wrow = p.w_in.row(k);
            for (std::size_t j = 0; j < 4 * hidden; ++j) pre[j] += xv * wrow[j];
        }
        for (std::size_t k = 0; k < hidden; ++k) {
            const double hv = h_prev[k];
            if (hv == 0.0) continue;
            const double* urow = p.w_rec.row(k);
            for (std::size_t j = 0; j < 4 * hidden; ++j) pre[j] += hv * urow[j];
        }
        double* gates = trace.gates.row(t);
        double* cell = trace.cell.row(t);
        double* cell_tanh = trace.cell_tanh.row(t);
        double* out = trace.hidden.row(t);
        for (std::size_t u = 0; u < hidden; ++u) {
            const double gi = sigmoid(pre[u]);
            const double gf = sigmoid(pre[hidden + u]);
            const double gg = std::tanh(pre[2 * hidden + u]);
            const double go = sigmoid(pre[3 * hidden + u]);
            const double c = gf * c_prev[u] + gi * gg;
            const double tc = std::tanh(c);
            gates[u] = gi;
            gates[hidden + u] = gf;
            gates[2 * hidden + u] = gg;
            gates[3 * hidden + u] = go;
            cell[u] = c;
            cell_tanh[u] = tc;
            out[u] = go * tc;
        }
        for (std::size_t u = 0; u < hidden; ++u) {
            h_prev[u] = out[u];
            c_prev[u] = cell[u];
        }
    }
}

// d_hidden holds dL/dh_t per step; gradients accumulate into grads, input
// gradients (for the layer below) into d_inputs when given.
void backward_lstm_direction(const Matrix& inputs, const LstmDirParams& p, bool reverse,
                             const LstmDirTrace& trace, const Matrix& d_hidden,
                             LstmDirParams& grads, Matrix* d_inputs) {
    const std::size_t steps = inputs.rows();
    const std::size_t hidden = p.w_rec.rows();
    std::vector<double> dh_carry(hidden, 0.0);
    std::vector<double> dc_carry(hidden, 0.0);
    std::vector<double> da(4 * hidden);
    for (std::size_t step = 0; step < steps; ++step) {
        const std::size_t t = reverse ? step : steps - 1 - step;
        const bool first = reverse ? (t == steps - 1) : (t == 0);
        const std::size_t t_prev = reverse ? t + 1 : t - 1;
        const double* gates = trace.gates.row(t);
        const double* cell_tanh = trace.cell_tanh.row(t);
        for (std::size_t u = 0; u < hidden; ++u) {
            const double gi = gates[u];
            const double gf = gates[hidden + u];
            const double gg = gates[2 * hidden + u];
            const double go = gates[3 * hidden + u];
            const double tc = cell_tanh[u];
            const double c_prev = first ? 0.0 : trace.cell(t_prev, u);
            const double dh = d_hidden(t, u) + dh_carry[u];
            const double dc = dc_carry[u] + dh * go * (1.0 - tc * tc);
            const double dgo = dh * tc;
            const double dgi = dc * gg;
            const double dgf = dc * c_prev;
            const double dgg = dc * gi;
            dc_carry[u] = dc * gf;
            da[u] = dgi * gi * (1.0 - gi);
            da[hidden + u] = dgf * gf * (1.0 - gf);
            da[2 * hidden + u] = dgg * (1.0 - gg * gg);
            da[3 * hidden + u] = dgo * go * (1.0 - go);
        }
        const double* x = inputs.row(t);
        for (std::size_t k = 0; k < inputs.cols(); ++k) {
            const double xv = x[k];
            if (xv == 0.0) continue;
            double* wrow = grads.w_in.row(k);
            for (std::size_t j = 0; j < 4 * hidden; ++j) wrow[j] += xv * da[j];
        }
        if (!first) {
            const double* hprev = trace.hidden.row(t_prev);
            for (std::size_t k = 0; k < hidden; ++k) {
                const double hv = hprev[k];
                if (hv == 0.0) continue;
                double* urow = grads.w_rec.row(k);
                for (std::size_t j = 0; j < 4 * hidden; ++j) urow[j] += hv * da[j];
            }
        }
        for (std::size_t j = 0; j < 4 * hidden; ++j) grads.bias(0, j) += da[j];
        for (std::size_t k = 0; k < hidden; ++k) {
            const double* urow = p.w_rec.row(k);
            double acc = 0.0;
            for (std::size_t j = 0; j < 4 * hidden; ++j) acc += da[j] * urow[j];
            dh_carry[k] = acc;
        }
        if (d_inputs) {
            double* dxrow = d_inputs->row(t);
            for (std::size_t k = 0; k < inputs.cols(); ++k) {
                const double* wrow = p.w_in.row(k);
                double acc = 0.0;
                for (std::size_t j = 0; j < 4 * hidden; ++j) acc += da[j] * wrow[j];
                dxrow[k] += acc;
            }
        }
    }
}

Matrix bidir_output(const LstmDirTrace& fwd, const LstmDirTrace& bwd) {
    const std::size_t steps = fwd.hidden.rows();
    const std::size_t hidden = fwd.hidden.cols();
    Matrix out(steps, 2 * hidden);
    for (std::size_t t = 0; t < steps; ++t) {
        for (std::size_t u = 0; u < hidden; ++u) {
            out(t, u) = fwd.hidden(t, u);
            out(t, hidden + u) = bwd.hidden(t, u);
        }
    }
    return out;
}

} // namespace

std::vector<double> seq_encode(const Matrix& token_vectors, const SeqEncoderParams& params,
                               SeqTrace* trace) {
    const std::size_t steps = token_vectors.rows();
    if (steps == 0) throw Error(ErrorKind::InvalidArgument, "empty token sequence");
    if (token_vectors.cols() != params.layer1.fwd.w_in.rows()) {
        throw Error(ErrorKind::ShapeMismatch, "seq: token width disagrees with encoder");
    }
    SeqTrace local;
    SeqTrace& t = trace ? *trace : local;

    run_lstm_direction(token_vectors, params.layer1.fwd, false, t.l1f);
    run_lstm_direction(token_vectors, params.layer1.bwd, true, t.l1b);
    t.l1_out = bidir_output(t.l1f, t.l1b);
    run_lstm_direction(t.l1_out, params.layer2.fwd, false, t.l2f);
    run_lstm_direction(t.l1_out, params.layer2.bwd, true, t.l2b);
    t.l2_out = bidir_output(t.l2f, t.l2b);

    t.decoded = matmul(t.l2_out, params.dec_w);
    const std::size_t width = params.dec_w.cols();
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t j = 0; j < width; ++j) t.decoded(s, j) += params.dec_b(0, j);
    }
    t.argmax.assign(width, 0);
    t.d_t.assign(width, 0.0);
    for (std::size_t j = 0; j < width; ++j) {
        double best = t.decoded(0, j);
        std::size_t best_step = 0;
        for (std::size_t s = 1; s < steps; ++s) {
            if (t.decoded(s, j) > best) {
                best = t.decoded(s, j);
                best_step = s;
            }
        }
        t.argmax[j] = best_step;
        t.d_t[j] = best;
    }
    return t.d_t;
}

std::array<double, 2> classify(const std::vector<double>& d_g, const std::vector<double>& d_t,
                               const ClassifierParams& params, ClassifierTrace* trace) {
    ClassifierTrace local;
    ClassifierTrace& t = trace ? *trace : local;
    t.input = d_g;
    t.input.insert(t.input.end(), d_t.begin(), d_t.end());
    if (t.input.size() != params.w1.rows()) {
        throw Error(ErrorKind::ShapeMismatch, "classifier input width disagrees");
    }
    const std::size_t hidden = params.w1.cols();
    t.pre1.assign(hidden, 0.0);
    for (std::size_t j = 0; j < hidden; ++j) t.pre1[j] = params.b1(0, j);
    for (std::size_t k = 0; k < t.input.size(); ++k) {
        const double v = t.input[k];
        if (v == 0.0) continue;
        const double* wrow = params.w1.row(k);
        for (std::size_t j = 0; j < hidden; ++j) t.pre1[j] += v * wrow[j];
    }
    t.z1 = t.pre1;
    for (double& v : t.z1) v = v > 0.0 ? v : 0.0;

    t.logits = {params.b2(0, 0), params.b2(0, 1)};
    for (std::size_t k = 0; k < hidden; ++k) {
        t.logits[0] += t.z1[k] * params.w2(k, 0);
        t.logits[1] += t.z1[k] * params.w2(k, 1);
    }
    const double peak = std::max(t.logits[0], t.logits[1]);
    const double e0 = std::exp(t.logits[0] - peak);
    const double e1 = std::exp(t.logits[1] - peak);
    t.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
    return t.probs;
}

double cross_entropy(const std::array<double, 2>& probs, int label) {
    if (label != 0 && label != 1) {
        throw Error(ErrorKind::InvalidLabel, "label must be 0 or 1");
    }
    const double p = std::max(probs[static_cast<std::size_t>(label)], 1e-12);
    return -std::log(p);
}

ForwardTrace forward(const ModelState& state, const Matrix& a_norm, const Matrix& x0,
                     const Matrix& token_vectors) {
    if (x0.cols() != static_cast<std::size_t>(state.config.d) ||
        token_vectors.cols() != static_cast<std::size_t>(state.config.d)) {
        throw Error(ErrorKind::ShapeMismatch, "feature width disagrees with model config");
    }
    ForwardTrace trace;
    gcn_forward(a_norm, x0, state.params.gcn, &trace.gcn);
    readout(trace.gcn.x2, state.params.readout, &trace.readout);
    seq_encode(token_vectors, state.params.seq, &trace.seq);
    classify(trace.readout.d_g, trace.seq.d_t, state.params.clf, &trace.clf);
    return trace;
}

void backward(const ModelState& state, const ForwardTrace& trace, const Matrix& a_norm,
              const Matrix& x0, const Matrix& token_vectors, int label, double weight,
              ParamSet& grads) {
    if (label != 0 && label != 1) {
        throw Error(ErrorKind::InvalidLabel, "label must be 0 or 1");
    }
    const ParamSet& p = state.params;
    const std::size_t h = static_cast<std::size_t>(state.config.h);
    const std::size_t ht = static_cast<std::size_t>(state.config.h_t);
    const std::size_t hc = static_cast<std::size_t>(state.config.h_c);
    const std::size_t hs = static_cast<std::size_t>(state.config.h_s);
    if (trace.clf.input.size() != h + ht) {
        throw Error(ErrorKind::ShapeMismatch, "trace does not match model config");
    }

    // classifier
    std::array<double, 2> dlogits = trace.clf.probs;
    dlogits[static_cast<std::size_t>(label)] -= 1.0;
    dlogits[0] *= weight;
    dlogits[1] *= weight;

    std::vector<double> dz1(hc, 0.0);
    for (std::size_t k = 0; k < hc; ++k) {
        grads.clf.w2(k, 0) += trace.clf.z1[k] * dlogits[0];
        grads.clf.w2(k, 1) += trace.clf.z1[k] * dlogits[1];
        dz1[k] = dlogits[0] * p.clf.w2(k, 0) + dlogits[1] * p.clf.w2(k, 1);
    }
    grads.clf.b2(0, 0) += dlogits[0];
    grads.clf.b2(0, 1) += dlogits[1];

    std::vector<double> dpre1(hc, 0.0);
    for (std::size_t k = 0; k < hc; ++k) {
        dpre1[k] = trace.clf.pre1[k] > 0.0 ? dz1[k] : 0.0;
        grads.clf.b1(0, k) += dpre1[k];
    }
    std::vector<double> dinput(h + ht, 0.0);
    for (std::size_t k = 0; k < h + ht; ++k) {
        const double v = trace.clf.input[k];
        double* wrow = grads.clf.w1.row(k);
        const double* prow = p.clf.w1.row(k);
        double acc = 0.0;
        for (std::size_t j = 0; j < hc; ++j) {
            wrow[j] += v * dpre1[j];
            acc += prow[j] * dpre1[j];
        }
        dinput[k] = acc;
    }

    // readout: d_g = mean + max over rows of X_G
    const std::size_t n = trace.readout.xg.rows();
    Matrix dxg(n, h);
    for (std::size_t j = 0; j < h; ++j) {
        const double dg = dinput[j];
        const double mean_share = dg / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) dxg(i, j) = mean_share;
        dxg(trace.readout.argmax[j], j) += dg;
    }
    Matrix dp1(n, h);
    Matrix dp2(n, h);
    for (std::size_t k = 0; k < n * h; ++k) {
        const double s = trace.readout.s.data()[k];
        const double l = trace.readout.l.data()[k];
        const double d = dxg.data()[k];
        dp1.data()[k] = d * l * s * (1.0 - s);
        dp2.data()[k] = d * s * (trace.readout.p2.data()[k] > 0.0 ? 1.0 : kLeakySlope);
    }
    add_inplace(grads.readout.f1_w, matmul_tn(trace.gcn.x2, dp1));
    add_inplace(grads.readout.f2_w, matmul_tn(trace.gcn.x2, dp2));
    for (std::size_t j = 0; j < h; ++j) {
        double acc1 = 0.0, acc2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc1 += dp1(i, j);
            acc2 += dp2(i, j);
        }
        grads.readout.f1_b(0, j) += acc1;
        grads.readout.f2_b(0, j) += acc2;
    }
    Matrix dx2 = matmul_nt(dp1, p.readout.f1_w);
    add_inplace(dx2, matmul_nt(dp2, p.readout.f2_w));

    // gcn
    Matrix dm2 = std::move(dx2);
    for (std::size_t k = 0; k < dm2.data().size(); ++k) {
        if (trace.gcn.m2.data()[k] <= 0.0) dm2.data()[k] = 0.0;
    }
    add_inplace(grads.gcn.w1, matmul_tn(trace.gcn.ax1, dm2));
    Matrix dx1 = matmul_tn(a_norm, matmul_nt(dm2, p.gcn.w1));
    Matrix dm1 = std::move(dx1);
    for (std::size_t k = 0; k < dm1.data().size(); ++k) {
        if (trace.gcn.m1.data()[k] <= 0.0) dm1.data()[k] = 0.0;
    }
    add_inplace(grads.gcn.w0, matmul_tn(trace.gcn.ax0, dm1));
    (void)x0; // frozen features receive no gradient

    // sequence branch: D_T = columnwise max over decoded steps
    const std::size_t steps = token_vectors.rows();
    Matrix ddecoded(steps, ht);
    for (std::size_t j = 0; j < ht; ++j) {
        ddecoded(trace.seq.argmax[j], j) = dinput[h + j];
    }
    add_inplace(grads.seq.dec_w, matmul_tn(trace.seq.l2_out, ddecoded));
    for (std::size_t j = 0; j < ht; ++j) {
        double acc = 0.0;
        for (std::size_t s = 0; s < steps; ++s) acc += ddecoded(s, j);
        grads.seq.dec_b(0, j) += acc;
    }
    Matrix dl2_out = matmul_nt(ddecoded, p.seq.dec_w); // steps x 2hs

    Matrix dh_l2f(steps, hs);
    Matrix dh_l2b(steps, hs);
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t u = 0; u < hs; ++u) {
            dh_l2f(s, u) = dl2_out(s, u);
            dh_l2b(s, u) = dl2_out(s, hs + u);
        }
    }
    Matrix dl1_out(steps, 2 * hs);
    backward_lstm_direction(trace.seq.l1_out, p.seq.layer2.fwd, false, trace.seq.l2f, dh_l2f,
                            grads.seq.layer2.fwd, &dl1_out);
    backward_lstm_direction(trace.seq.l1_out, p.seq.layer2.bwd, true, trace.seq.l2b, dh_l2b,
                            grads.seq.layer2.bwd, &dl1_out);

    Matrix dh_l1f(steps, hs);
    Matrix dh_l1b(steps, hs);
    for (std::size_t s = 0; s < steps; ++s) {
        for (std::size_t u = 0; u < hs; ++u) {
            dh_l1f(s, u) = dl1_out(s, u);
            dh_l1b(s, u) = dl1_out(s, hs + u);
        }
    }
    backward_lstm_direction(token_vectors, p.seq.layer1.fwd, false, trace.seq.l1f, dh_l1f,
                            grads.seq.layer1.fwd, nullptr);
    backward_lstm_direction(token_vectors, p.seq.layer1.bwd, true, trace.seq.l1b, dh_l1b,
                            grads.seq.layer1.bwd, nullptr);
}

// ---- optimizers ----

OptimizerKind optimizer_from_name(const std::string& name) {
    if (name == "sgd") return OptimizerKind::Sgd;
    if (name == "adam") return OptimizerKind::Adam;
    throw Error(ErrorKind::InvalidArgument, "unknown optimizer: " + name);
}

const char* optimizer_name(OptimizerKind kind) {
    return kind == OptimizerKind::Sgd ? "sgd" : "adam";
}

Optimizer::Optimizer(OptimizerKind kind, const ModelConfig& config, double lr, double beta1,
                     double beta2, double eps)
    : kind_(kind), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    if (kind_ == OptimizerKind::Adam) {
        m_ = zero_params(config);
        v_ = zero_params(config);
    }
}

void Optimizer::step(ModelState& state, const ParamSet& grads) {
    auto params = named_tensors(state.params);
    auto gradients = named_tensors(grads);
    if (kind_ == OptimizerKind::Sgd) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto& target = params[i].second->data();
            const auto& g = gradients[i].second->data();
            for (std::size_t k = 0; k < target.size(); ++k) target[k] -= lr_ * g[k];
        }
        return;
    }
    ++step_count_;
    const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
    const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
    auto moments1 = named_tensors(m_);
    auto moments2 = named_tensors(v_);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& target = params[i].second->data();
        const auto& g = gradients[i].second->data();
        auto& m = moments1[i].second->data();
        auto& v = moments2[i].second->data();
        for (std::size_t k = 0; k < target.size(); ++k) {
            m[k] = beta1_ * m[k] + (1.0 - beta1_) * g[k];
            v[k] = beta2_ * v[k] + (1.0 - beta2_) * g[k] * g[k];
            const double m_hat = m[k] / bias1;
            const double v_hat = v[k] / bias2;
            target[k] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
        }
    }
}

} // namespace medtext
