#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "medtext/matrix.hpp"

namespace medtext {

struct ModelConfig {
    int d = 200;   // input feature width
    int h = 128;   // gcn / readout width
    int h_s = 128; // recurrent hidden size per direction
    int h_t = 128; // sequence branch output width
    int h_c = 64;  // classifier hidden width

    void validate() const;
};

struct GcnParams {
    Matrix w0; // d x h
    Matrix w1; // h x h
};

struct ReadoutParams {
    Matrix f1_w, f1_b; // h x h, 1 x h (sigmoid gate)
    Matrix f2_w, f2_b; // h x h, 1 x h (leaky rectifier transform)
};

struct LstmDirParams {
    Matrix w_in;  // in x 4H, gate order i,f,g,o
    Matrix w_rec; // H x 4H
    Matrix bias;  // 1 x 4H
};

struct LstmLayerParams {
    LstmDirParams fwd;
    LstmDirParams bwd;
};

struct SeqEncoderParams {
    LstmLayerParams layer1; // input d
    LstmLayerParams layer2; // input 2*h_s
    Matrix dec_w;           // 2*h_s x h_t
    Matrix dec_b;           // 1 x h_t
};

struct ClassifierParams {
    Matrix w1; // (h + h_t) x h_c
    Matrix b1; // 1 x h_c
    Matrix w2; // h_c x 2
    Matrix b2; // 1 x 2
};

struct ParamSet {
    GcnParams gcn;
    ReadoutParams readout;
    SeqEncoderParams seq;
    ClassifierParams clf;
};

struct ModelState {
    ModelConfig config;
    std::uint64_t seed = 0;
    ParamSet params;
};

ParamSet zero_params(const ModelConfig& config);

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)], seed-deterministic.
ModelState init_model(const ModelConfig& config, std::uint64_t seed);

// Stable traversal of all parameter tensors; order is the serialization and
// optimizer order.
std::vector<std::pair<std::string, Matrix*>> named_tensors(ParamSet& params);
std::vector<std::pair<std::string, const Matrix*>> named_tensors(const ParamSet& params);

// ---- forward traces ----

struct GcnTrace {
    Matrix ax0, m1, x1; // A*X0, pre-activation, activation
    Matrix ax1, m2, x2;
};

struct ReadoutTrace {
    Matrix p1, s;  // pre-sigmoid, sigmoid
    Matrix p2, l;  // pre-leaky, leaky
    Matrix xg;     // s ⊙ l
    std::vector<std::size_t> argmax; // per column, row of the max
    std::vector<double> d_g;
};

struct LstmDirTrace {
    Matrix gates;     // T x 4H (post-activation i,f,g,o)
    Matrix cell;      // T x H
    Matrix cell_tanh; // T x H
    Matrix hidden;    // T x H
};

struct SeqTrace {
    Matrix l1_out; // T x 2H (fwd | bwd)
    Matrix l2_out;
    LstmDirTrace l1f, l1b, l2f, l2b;
    Matrix decoded; // T x h_t
    std::vector<std::size_t> argmax; // per column, step of the max
    std::vector<double> d_t;
};

struct ClassifierTrace {
    std::vector<double> input; // concat(d_g, d_t)
    std::vector<double> pre1, z1;
    std::array<double, 2> logits{};
    std::array<double, 2> probs{};
};

struct ForwardTrace {
    GcnTrace gcn;
    ReadoutTrace readout;
    SeqTrace seq;
    ClassifierTrace clf;
};

// ---- forward ----

// X1 = relu(A X0 W0); X2 = relu(A X1 W1). A must already carry self-loops and
// degree normalization.
Matrix gcn_forward(const Matrix& a_norm, const Matrix& x0, const GcnParams& params,
                   GcnTrace* trace = nullptr);

// X_G = sigmoid(X2 f1) ⊙ leaky(X2 f2); D_G = meanpool + maxpool over rows.
std::vector<double> readout(const Matrix& x2, const ReadoutParams& params,
                            ReadoutTrace* trace = nullptr);

// Two-layer bidirectional recurrence, per-step linear decode, max pool over
// time.
std::vector<double> seq_encode(const Matrix& token_vectors, const SeqEncoderParams& params,
                               SeqTrace* trace = nullptr);

std::array<double, 2> classify(const std::vector<double>& d_g, const std::vector<double>& d_t,
                               const ClassifierParams& params, ClassifierTrace* trace = nullptr);

// -log p[label], probability clamped at 1e-12.
double cross_entropy(const std::array<double, 2>& probs, int label);

ForwardTrace forward(const ModelState& state, const Matrix& a_norm, const Matrix& x0,
                     const Matrix& token_vectors);

// Exact gradients of weight * cross_entropy w.r.t. every parameter tensor,
// accumulated into grads. X0 and token vectors are frozen.
void backward(const ModelState& state, const ForwardTrace& trace, const Matrix& a_norm,
              const Matrix& x0, const Matrix& token_vectors, int label, double weight,
              ParamSet& grads);

// ---- optimizers ----

enum class OptimizerKind { Sgd, Adam };

OptimizerKind optimizer_from_name(const std::string& name);
const char* optimizer_name(OptimizerKind kind);

class Optimizer {
  public:
    Optimizer(OptimizerKind kind, const ModelConfig& config, double lr, double beta1 = 0.9,
              double beta2 = 0.999, double eps = 1e-8);

    void step(ModelState& state, const ParamSet& grads);

  private:
    OptimizerKind kind_;
    double lr_, beta1_, beta2_, eps_;
    long step_count_ = 0;
    ParamSet m_, v_;
};

} // namespace medtext
