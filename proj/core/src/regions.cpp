#include "actembed/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace actembed {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Workspace {
  std::vector<double> tensor;
  std::vector<double> marg;
  std::vector<double> acc;
};

Workspace& tls_workspace() {
  thread_local Workspace ws;
  return ws;
}

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

std::vector<Alphabet> decoder_axes(const SourceActionProblem& p,
                                   const std::string& o_name, int o_card,
                                   int u_card) {
  return {p.x_alphabet(),
          Alphabet::indexed(o_name, static_cast<std::size_t>(o_card)),
          p.a_alphabet(),
          Alphabet::indexed("U", static_cast<std::size_t>(u_card)),
          p.y_alphabet(),
          Alphabet::indexed("Bax", p.b_alphabet().size())};
}

/// Evaluator for the decoder-side modes. Builds the joint
/// p(x) q(o,a,u|x) p(y|x,a) 1{b=f(a)} over axes (X, O, A, U, Y, B) in one
/// pass and reads every measure off precomputed marginal plans. O is Xhat2
/// for the (strictly) non-causal modes and the auxiliary V for the causal
/// one. Matches the chain_compose + pushforward route bit-for-bit on the
/// shared arithmetic; tests assert the agreement.
class DecoderSideEvaluator {
 public:
  DecoderSideEvaluator(const SourceActionProblem& p, ObservationMode mode,
                       int o_card, int u_card)
      : mode_(mode),
        nx_(static_cast<int>(p.x_alphabet().size())),
        no_(o_card),
        na_(static_cast<int>(p.a_alphabet().size())),
        nu_(u_card),
        ny_(static_cast<int>(p.y_alphabet().size())),
        nb_(static_cast<int>(p.b_alphabet().size())),
        n1_(static_cast<int>(p.xhat1.size())),
        n2_(static_cast<int>(p.xhat2.size())),
        px_(p.source.probs().begin(), p.source.probs().end()),
        side_(p.side_channel.table().begin(), p.side_channel.table().end()),
        f_(p.action_map.table().begin(), p.action_map.table().end()),
        d1_(p.d1.v),
        d2_(p.d2.v),
        cost_(p.action_cost) {
    if (mode_ != ObservationMode::Causal && no_ != n2_) {
      throw std::invalid_argument("witness output must be Xhat2");
    }
    h_x_ = entropy(std::span<const double>(px_));
    const auto axes =
        decoder_axes(p, mode_ == ObservationMode::Causal ? "V" : "O", no_, nu_);
    total_ = combination_count(axes);

    constexpr AxisMask X = 1, O = 2, A = 4, U = 8, Y = 16, B = 32;
    pl_oa_ = MarginalPlan(axes, O | A);
    pl_xoa_ = MarginalPlan(axes, X | O | A);
    pl_xoay_ = MarginalPlan(axes, X | O | A | Y);
    pl_oauy_ = MarginalPlan(axes, O | A | U | Y);
    pl_xoauy_ = MarginalPlan(axes, X | O | A | U | Y);
    pl_oay_ = MarginalPlan(axes, O | A | Y);
    pl_ob_ = MarginalPlan(axes, O | B);
    pl_xob_ = MarginalPlan(axes, X | O | B);
    pl_b_ = MarginalPlan(axes, B);
    pl_o_ = MarginalPlan(axes, O);
    pl_acc_xo_ = MarginalPlan(axes, X | O);
    pl_acc_xuy_ = MarginalPlan(axes, X | U | Y);
    pl_acc_a_ = MarginalPlan(axes, A);
    pl_acc_xob_ = MarginalPlan(axes, X | O | B);
  }

  int block_dim() const { return no_ * na_ * nu_; }
  int source_size() const { return nx_; }

  ObjectiveEval measures(std::span<const double> q) const {
    auto& ws = tls_workspace();
    ws.tensor.assign(total_, 0.0);
    for (int x = 0; x < nx_; ++x) {
      const double* blk = q.data() + static_cast<std::size_t>(x) * block_dim();
      const double px = px_[static_cast<std::size_t>(x)];
      for (int o = 0; o < no_; ++o) {
        for (int a = 0; a < na_; ++a) {
          const double* side =
              side_.data() + static_cast<std::size_t>((x * na_ + a) * ny_);
          const std::size_t b = f_[static_cast<std::size_t>(a)];
          for (int u = 0; u < nu_; ++u) {
            const double m = px * blk[(o * na_ + a) * nu_ + u];
            const std::size_t base =
                static_cast<std::size_t>(
                    ((((x * no_ + o) * na_ + a) * nu_ + u) * ny_)) *
                    static_cast<std::size_t>(nb_) +
                b;
            for (int y = 0; y < ny_; ++y) {
              ws.tensor[base + static_cast<std::size_t>(y * nb_)] =
                  m * side[y];
            }
          }
        }
      }
    }
    const std::span<const double> t(ws.tensor);
    const double h_oa = pl_oa_.entropy_of(t, ws.marg);
    const double h_xoa = pl_xoa_.entropy_of(t, ws.marg);
    const double h_xoay = pl_xoay_.entropy_of(t, ws.marg);
    const double h_oauy = pl_oauy_.entropy_of(t, ws.marg);
    const double h_xoauy = pl_xoauy_.entropy_of(t, ws.marg);
    const double h_oay = pl_oay_.entropy_of(t, ws.marg);
    const double h_ob = pl_ob_.entropy_of(t, ws.marg);
    const double h_xob = pl_xob_.entropy_of(t, ws.marg);

    ObjectiveEval ev;
    ev.rate = (h_x_ + h_oa - h_xoa) + (h_xoay + h_oauy - h_xoauy - h_oay);
    const double i_xob = h_x_ + h_ob - h_xob;
    if (mode_ == ObservationMode::NonCausal) {
      ev.embed_slack = pl_b_.entropy_of(t, ws.marg) - i_xob;
    } else {
      ev.embed_slack = (h_ob - pl_o_.entropy_of(t, ws.marg)) - i_xob;
    }

    pl_acc_a_.accumulate(t, resize(ws.acc, pl_acc_a_.dest_size));
    ev.cost = 0.0;
    for (int a = 0; a < na_; ++a) {
      ev.cost += ws.acc[static_cast<std::size_t>(a)] *
                 cost_[static_cast<std::size_t>(a)];
    }

    if (mode_ == ObservationMode::Causal) {
      pl_acc_xob_.accumulate(t, resize(ws.acc, pl_acc_xob_.dest_size));
      ev.d2 = bayes_expected_distortion(ws.acc, static_cast<std::size_t>(nx_),
                                        d2_, static_cast<std::size_t>(n2_));
    } else {
      pl_acc_xo_.accumulate(t, resize(ws.acc, pl_acc_xo_.dest_size));
      ev.d2 = 0.0;
      for (int x = 0; x < nx_; ++x) {
        for (int o = 0; o < no_; ++o) {
          ev.d2 += ws.acc[static_cast<std::size_t>(x * no_ + o)] *
                   d2_[static_cast<std::size_t>(x * n2_ + o)];
        }
      }
    }

    pl_acc_xuy_.accumulate(t, resize(ws.acc, pl_acc_xuy_.dest_size));
    ev.d1 = bayes_expected_distortion(ws.acc, static_cast<std::size_t>(nx_),
                                      d1_, static_cast<std::size_t>(n1_));
    return ev;
  }

 private:
  static std::span<double> resize(std::vector<double>& v, std::size_t n) {
    v.resize(n);
    return std::span<double>(v);
  }

  ObservationMode mode_;
  int nx_, no_, na_, nu_, ny_, nb_, n1_, n2_;
  std::vector<double> px_;
  std::vector<double> side_;
  std::vector<std::size_t> f_;
  std::vector<double> d1_, d2_, cost_;
  double h_x_ = 0.0;
  std::size_t total_ = 0;
  MarginalPlan pl_oa_, pl_xoa_, pl_xoay_, pl_oauy_, pl_xoauy_, pl_oay_;
  MarginalPlan pl_ob_, pl_xob_, pl_b_, pl_o_;
  MarginalPlan pl_acc_xo_, pl_acc_xuy_, pl_acc_a_, pl_acc_xob_;
};

/// Evaluator for the encoder-side region: joint
/// p(x) p(u|x) p(x1|u,x) p(x2|u,x) p(a) 1{w=fY(a)} 1{b=f(a)} over
/// (X, U, X1, X2, A, W, B).
class EncoderSideEvaluator {
 public:
  explicit EncoderSideEvaluator(const SourceActionProblem& p, int u_card)
      : nx_(static_cast<int>(p.x_alphabet().size())),
        nu_(u_card),
        n1_(static_cast<int>(p.xhat1.size())),
        n2_(static_cast<int>(p.xhat2.size())),
        na_(static_cast<int>(p.a_alphabet().size())),
        nw_(static_cast<int>(p.observation_map->codomain().size())),
        nb_(static_cast<int>(p.b_alphabet().size())),
        px_(p.source.probs().begin(), p.source.probs().end()),
        fy_(p.observation_map->table().begin(), p.observation_map->table().end()),
        f_(p.action_map.table().begin(), p.action_map.table().end()),
        d1_(p.d1.v),
        d2_(p.d2.v),
        cost_(p.action_cost) {
    h_x_ = entropy(std::span<const double>(px_));
    std::vector<Alphabet> axes = {
        p.x_alphabet(),
        Alphabet::indexed("U", static_cast<std::size_t>(nu_)),
        p.xhat1,
        p.xhat2,
        p.a_alphabet(),
        Alphabet::indexed("W", static_cast<std::size_t>(nw_)),
        Alphabet::indexed("Bax", static_cast<std::size_t>(nb_))};
    total_ = combination_count(axes);
    constexpr AxisMask X = 1, U = 2, X1 = 4, X2 = 8, A = 16, W = 32, B = 64;
    pl_x1u_ = MarginalPlan(axes, X1 | U);
    pl_xx1u_ = MarginalPlan(axes, X | X1 | U);
    pl_u_ = MarginalPlan(axes, U);
    pl_xu_ = MarginalPlan(axes, X | U);
    pl_x2u_ = MarginalPlan(axes, X2 | U);
    pl_xx2u_ = MarginalPlan(axes, X | X2 | U);
    pl_w_ = MarginalPlan(axes, W);
    pl_wb_ = MarginalPlan(axes, W | B);
    pl_acc_xx1_ = MarginalPlan(axes, X | X1);
    pl_acc_xx2_ = MarginalPlan(axes, X | X2);
    pl_acc_a_ = MarginalPlan(axes, A);
    // block offsets: [u|x] per x, [x1|u,x] per (u,x), [x2|u,x] per (u,x), [a]
    off_q1_ = static_cast<std::size_t>(nx_ * nu_);
    off_q2_ = off_q1_ + static_cast<std::size_t>(nu_ * nx_ * n1_);
    off_pa_ = off_q2_ + static_cast<std::size_t>(nu_ * nx_ * n2_);
    total_dim_ = off_pa_ + static_cast<std::size_t>(na_);
  }

  std::size_t total_dim() const { return total_dim_; }
  std::size_t off_q1() const { return off_q1_; }
  std::size_t off_q2() const { return off_q2_; }
  std::size_t off_pa() const { return off_pa_; }

  ObjectiveEval measures(std::span<const double> q) const {
    auto& ws = tls_workspace();
    ws.tensor.assign(total_, 0.0);
    const double* qu = q.data();
    const double* q1 = q.data() + off_q1_;
    const double* q2 = q.data() + off_q2_;
    const double* pa = q.data() + off_pa_;
    for (int x = 0; x < nx_; ++x) {
      const double px = px_[static_cast<std::size_t>(x)];
      for (int u = 0; u < nu_; ++u) {
        const double mu = px * qu[x * nu_ + u];
        const double* r1 = q1 + (u * nx_ + x) * n1_;
        const double* r2 = q2 + (u * nx_ + x) * n2_;
        for (int x1 = 0; x1 < n1_; ++x1) {
          const double m1 = mu * r1[x1];
          for (int x2 = 0; x2 < n2_; ++x2) {
            const double m2 = m1 * r2[x2];
            for (int a = 0; a < na_; ++a) {
              const std::size_t idx =
                  ((((static_cast<std::size_t>(x) * nu_ + u) * n1_ + x1) * n2_ +
                    x2) *
                       na_ +
                   a) *
                      static_cast<std::size_t>(nw_ * nb_) +
                  fy_[static_cast<std::size_t>(a)] * nb_ +
                  f_[static_cast<std::size_t>(a)];
              ws.tensor[idx] = m2 * pa[a];
            }
          }
        }
      }
    }
    const std::span<const double> t(ws.tensor);
    const double h_x1u = pl_x1u_.entropy_of(t, ws.marg);
    const double h_xx1u = pl_xx1u_.entropy_of(t, ws.marg);
    const double h_u = pl_u_.entropy_of(t, ws.marg);
    const double h_xu = pl_xu_.entropy_of(t, ws.marg);
    const double h_x2u = pl_x2u_.entropy_of(t, ws.marg);
    const double h_xx2u = pl_xx2u_.entropy_of(t, ws.marg);
    const double h_w = pl_w_.entropy_of(t, ws.marg);
    const double h_wb = pl_wb_.entropy_of(t, ws.marg);

    ObjectiveEval ev;
    ev.rate = (h_x_ + h_x1u - h_xx1u) - h_w;  // unclamped
    const double common_slack = h_w - (h_x_ + h_u - h_xu);
    const double private_slack =
        (h_wb - h_w) - (h_xu + h_x2u - h_xx2u - h_u);
    ev.extra_slacks = {{"common", common_slack}, {"private", private_slack}};
    ev.embed_slack = std::min(common_slack, private_slack);

    pl_acc_xx1_.accumulate(t, resize(ws.acc, pl_acc_xx1_.dest_size));
    ev.d1 = 0.0;
    for (std::size_t i = 0; i < ws.acc.size(); ++i) ev.d1 += ws.acc[i] * d1_[i];
    pl_acc_xx2_.accumulate(t, resize(ws.acc, pl_acc_xx2_.dest_size));
    ev.d2 = 0.0;
    for (std::size_t i = 0; i < ws.acc.size(); ++i) ev.d2 += ws.acc[i] * d2_[i];
    pl_acc_a_.accumulate(t, resize(ws.acc, pl_acc_a_.dest_size));
    ev.cost = 0.0;
    for (int a = 0; a < na_; ++a) {
      ev.cost += ws.acc[static_cast<std::size_t>(a)] *
                 cost_[static_cast<std::size_t>(a)];
    }
    return ev;
  }

 private:
  static std::span<double> resize(std::vector<double>& v, std::size_t n) {
    v.resize(n);
    return std::span<double>(v);
  }

  int nx_, nu_, n1_, n2_, na_, nw_, nb_;
  std::vector<double> px_;
  std::vector<std::size_t> fy_, f_;
  std::vector<double> d1_, d2_, cost_;
  double h_x_ = 0.0;
  std::size_t total_ = 0;
  std::size_t off_q1_ = 0, off_q2_ = 0, off_pa_ = 0, total_dim_ = 0;
  MarginalPlan pl_x1u_, pl_xx1u_, pl_u_, pl_xu_, pl_x2u_, pl_xx2u_, pl_w_,
      pl_wb_;
  MarginalPlan pl_acc_xx1_, pl_acc_xx2_, pl_acc_a_;
};

/// Evaluator for the dual encoder-side region: joint
/// p(x) p(x1,x2|x) p(a) 1{w=fY(a)} 1{b=f(a)} over (X, X1, X2, A, W, B).
class EncoderDualEvaluator {
 public:
  explicit EncoderDualEvaluator(const SourceActionProblem& p)
      : nx_(static_cast<int>(p.x_alphabet().size())),
        n1_(static_cast<int>(p.xhat1.size())),
        n2_(static_cast<int>(p.xhat2.size())),
        na_(static_cast<int>(p.a_alphabet().size())),
        nw_(static_cast<int>(p.observation_map->codomain().size())),
        nb_(static_cast<int>(p.b_alphabet().size())),
        px_(p.source.probs().begin(), p.source.probs().end()),
        fy_(p.observation_map->table().begin(), p.observation_map->table().end()),
        f_(p.action_map.table().begin(), p.action_map.table().end()),
        d1_(p.d1.v),
        d2_(p.d2.v),
        cost_(p.action_cost) {
    h_x_ = entropy(std::span<const double>(px_));
    std::vector<Alphabet> axes = {
        p.x_alphabet(), p.xhat1, p.xhat2, p.a_alphabet(),
        Alphabet::indexed("W", static_cast<std::size_t>(nw_)),
        Alphabet::indexed("Bax", static_cast<std::size_t>(nb_))};
    total_ = combination_count(axes);
    constexpr AxisMask X = 1, X1 = 2, X2 = 4, A = 8, W = 16, B = 32;
    pl_x1x2_ = MarginalPlan(axes, X1 | X2);
    pl_xx1x2_ = MarginalPlan(axes, X | X1 | X2);
    pl_x2_ = MarginalPlan(axes, X2);
    pl_xx2_ = MarginalPlan(axes, X | X2);
    pl_w_ = MarginalPlan(axes, W);
    pl_b_ = MarginalPlan(axes, B);
    pl_acc_xx1_ = MarginalPlan(axes, X | X1);
    pl_acc_a_ = MarginalPlan(axes, A);
    total_dim_ = static_cast<std::size_t>(nx_ * n1_ * n2_ + na_);
  }

  std::size_t total_dim() const { return total_dim_; }
  std::size_t off_pa() const { return static_cast<std::size_t>(nx_ * n1_ * n2_); }

  ObjectiveEval measures(std::span<const double> q) const {
    auto& ws = tls_workspace();
    ws.tensor.assign(total_, 0.0);
    const double* q12 = q.data();
    const double* pa = q.data() + off_pa();
    for (int x = 0; x < nx_; ++x) {
      const double px = px_[static_cast<std::size_t>(x)];
      for (int x1 = 0; x1 < n1_; ++x1) {
        for (int x2 = 0; x2 < n2_; ++x2) {
          const double m = px * q12[(x * n1_ + x1) * n2_ + x2];
          for (int a = 0; a < na_; ++a) {
            const std::size_t idx =
                (((static_cast<std::size_t>(x) * n1_ + x1) * n2_ + x2) * na_ +
                 a) *
                    static_cast<std::size_t>(nw_ * nb_) +
                fy_[static_cast<std::size_t>(a)] * nb_ +
                f_[static_cast<std::size_t>(a)];
            ws.tensor[idx] = m * pa[a];
          }
        }
      }
    }
    const std::span<const double> t(ws.tensor);
    ObjectiveEval ev;
    ev.rate = (h_x_ + pl_x1x2_.entropy_of(t, ws.marg) -
               pl_xx1x2_.entropy_of(t, ws.marg)) -
              pl_w_.entropy_of(t, ws.marg);
    const double i_xx2 = h_x_ + pl_x2_.entropy_of(t, ws.marg) -
                         pl_xx2_.entropy_of(t, ws.marg);
    ev.embed_slack = pl_b_.entropy_of(t, ws.marg) - i_xx2;

    pl_acc_xx1_.accumulate(t, resize(ws.acc, pl_acc_xx1_.dest_size));
    ev.d1 = 0.0;
    for (std::size_t i = 0; i < ws.acc.size(); ++i) ev.d1 += ws.acc[i] * d1_[i];
    pl_xx2_.accumulate(t, resize(ws.acc, pl_xx2_.dest_size));
    ev.d2 = 0.0;
    for (std::size_t i = 0; i < ws.acc.size(); ++i) ev.d2 += ws.acc[i] * d2_[i];
    pl_acc_a_.accumulate(t, resize(ws.acc, pl_acc_a_.dest_size));
    ev.cost = 0.0;
    for (int a = 0; a < na_; ++a) {
      ev.cost += ws.acc[static_cast<std::size_t>(a)] *
                 cost_[static_cast<std::size_t>(a)];
    }
    return ev;
  }

 private:
  static std::span<double> resize(std::vector<double>& v, std::size_t n) {
    v.resize(n);
    return std::span<double>(v);
  }

  int nx_, n1_, n2_, na_, nw_, nb_;
  std::vector<double> px_;
  std::vector<std::size_t> fy_, f_;
  std::vector<double> d1_, d2_, cost_;
  double h_x_ = 0.0;
  std::size_t total_ = 0;
  std::size_t total_dim_ = 0;
  MarginalPlan pl_x1x2_, pl_xx1x2_, pl_x2_, pl_xx2_, pl_w_, pl_b_;
  MarginalPlan pl_acc_xx1_, pl_acc_a_;
};

struct ChannelMeasures {
  double sum_rate = 0.0;
  double h_b = 0.0;
  double cost = 0.0;
};

/// Evaluator for the channel region: joint
/// p(a) p(s|a) p(u|s,a) 1{x=g(u,s)} p(y|x,s,a) 1{b=f(a)} over
/// (A, S, U, X, Y, B). The input map g is an enumerated table.
class ChannelEvaluator {
 public:
  ChannelEvaluator(const ChannelActionProblem& p, int u_card)
      : na_(static_cast<int>(p.a_alphabet().size())),
        ns_(static_cast<int>(p.s_alphabet().size())),
        nu_(u_card),
        nx_(static_cast<int>(p.x_alphabet().size())),
        ny_(static_cast<int>(p.y_alphabet().size())),
        nb_(static_cast<int>(p.b_alphabet().size())),
        state_(p.state_channel.table().begin(), p.state_channel.table().end()),
        trans_(p.transmission_channel.table().begin(),
               p.transmission_channel.table().end()),
        f_(p.action_map.table().begin(), p.action_map.table().end()),
        cost_(p.cost.v) {
    std::vector<Alphabet> axes = {
        p.a_alphabet(), p.s_alphabet(),
        Alphabet::indexed("U", static_cast<std::size_t>(nu_)),
        p.x_alphabet(), p.y_alphabet(),
        Alphabet::indexed("Bax", static_cast<std::size_t>(nb_))};
    total_ = combination_count(axes);
    constexpr AxisMask A = 1, S = 2, U = 4, X = 8, Y = 16, B = 32;
    pl_au_ = MarginalPlan(axes, A | U);
    pl_y_ = MarginalPlan(axes, Y);
    pl_auy_ = MarginalPlan(axes, A | U | Y);
    pl_sa_ = MarginalPlan(axes, S | A);
    pl_usa_ = MarginalPlan(axes, U | S | A);
    pl_a_ = MarginalPlan(axes, A);
    pl_b_ = MarginalPlan(axes, B);
    pl_acc_ax_ = MarginalPlan(axes, A | X);
  }

  int block_dim_u() const { return nu_; }
  int n_rows_u() const { return ns_ * na_; }
  int g_domain() const { return nu_ * ns_; }
  int g_codomain() const { return nx_; }
  std::size_t total_dim() const {
    return static_cast<std::size_t>(na_ + ns_ * na_ * nu_);
  }

  ChannelMeasures measures(std::span<const double> params,
                           std::span<const int> g) const {
    auto& ws = tls_workspace();
    ws.tensor.assign(total_, 0.0);
    const double* pa = params.data();
    const double* qu = params.data() + na_;
    for (int a = 0; a < na_; ++a) {
      const std::size_t b = f_[static_cast<std::size_t>(a)];
      for (int s = 0; s < ns_; ++s) {
        const double ms =
            pa[a] * state_[static_cast<std::size_t>(a * ns_ + s)];
        const double* qrow = qu + (s * na_ + a) * nu_;
        for (int u = 0; u < nu_; ++u) {
          const double m = ms * qrow[u];
          const int x = g[static_cast<std::size_t>(u * ns_ + s)];
          const double* trow =
              trans_.data() +
              static_cast<std::size_t>(((x * ns_ + s) * na_ + a) * ny_);
          const std::size_t base =
              (((static_cast<std::size_t>(a) * ns_ + s) * nu_ + u) * nx_ + x) *
                  static_cast<std::size_t>(ny_ * nb_) +
              b;
          for (int y = 0; y < ny_; ++y) {
            ws.tensor[base + static_cast<std::size_t>(y * nb_)] = m * trow[y];
          }
        }
      }
    }
    const std::span<const double> t(ws.tensor);
    const double h_au = pl_au_.entropy_of(t, ws.marg);
    const double h_y = pl_y_.entropy_of(t, ws.marg);
    const double h_auy = pl_auy_.entropy_of(t, ws.marg);
    const double h_sa = pl_sa_.entropy_of(t, ws.marg);
    const double h_usa = pl_usa_.entropy_of(t, ws.marg);
    const double h_a = pl_a_.entropy_of(t, ws.marg);

    ChannelMeasures m;
    const double i_auy = h_au + h_y - h_auy;
    const double i_usa = h_au + h_sa - h_usa - h_a;
    m.sum_rate = i_auy - i_usa;
    m.h_b = pl_b_.entropy_of(t, ws.marg);
    ws.acc.resize(pl_acc_ax_.dest_size);
    pl_acc_ax_.accumulate(t, ws.acc);
    m.cost = 0.0;
    for (std::size_t i = 0; i < ws.acc.size(); ++i) {
      m.cost += ws.acc[i] * cost_[i];
    }
    return m;
  }

 private:
  int na_, ns_, nu_, nx_, ny_, nb_;
  std::vector<double> state_, trans_;
  std::vector<std::size_t> f_;
  std::vector<double> cost_;
  std::size_t total_ = 0;
  MarginalPlan pl_au_, pl_y_, pl_auy_, pl_sa_, pl_usa_, pl_a_, pl_b_,
      pl_acc_ax_;
};

/// The symmetric three-parameter reduction of the binary Z/S example at
/// D1 = 0 (U = Xhat1 = X): joint over (X, Xhat2, A, Y) parametrized by
/// alpha = (a1, a2, a3, 1 - a1 - a2 - a3).
class BinaryExampleEvaluator {
 public:
  BinaryExampleEvaluator(double delta, bool strictly_causal)
      : strictly_causal_(strictly_causal) {
    const SourceActionProblem p = zs_example(delta);
    side_.assign(p.side_channel.table().begin(), p.side_channel.table().end());
    std::vector<Alphabet> axes = {
        Alphabet::indexed("X", 2), Alphabet::indexed("Xhat2", 2),
        Alphabet::indexed("A", 2), Alphabet::indexed("Y", 2)};
    constexpr AxisMask X = 1, X2 = 2, A = 4, Y = 8;
    pl_x2a_ = MarginalPlan(axes, X2 | A);
    pl_xx2a_ = MarginalPlan(axes, X | X2 | A);
    pl_xx2ay_ = MarginalPlan(axes, X | X2 | A | Y);
    pl_x2ay_ = MarginalPlan(axes, X2 | A | Y);
    pl_a_ = MarginalPlan(axes, A);
    pl_x2_ = MarginalPlan(axes, X2);
    pl_acc_xx2_ = MarginalPlan(axes, X | X2);
  }

  ObjectiveEval measures(std::span<const double> alpha) const {
    // q(xhat2, a | x) under the mirrored-symmetry completion
    const double a1 = alpha[0], a2 = alpha[1], a3 = alpha[2], a4 = alpha[3];
    const double q0[4] = {a4, a1, a3, a2};  // x = 0: (x2,a) = 00,01,10,11
    const double q1[4] = {a2, a3, a1, a4};  // x = 1
    auto& ws = tls_workspace();
    ws.tensor.assign(16, 0.0);
    for (int x = 0; x < 2; ++x) {
      const double* qq = (x == 0) ? q0 : q1;
      for (int x2 = 0; x2 < 2; ++x2) {
        for (int a = 0; a < 2; ++a) {
          const double m = 0.5 * qq[x2 * 2 + a];
          const double* side = side_.data() + (x * 2 + a) * 2;
          const std::size_t base = static_cast<std::size_t>(((x * 2 + x2) * 2 + a) * 2);
          ws.tensor[base] = m * side[0];
          ws.tensor[base + 1] = m * side[1];
        }
      }
    }
    const std::span<const double> t(ws.tensor);
    const double h_x2a = pl_x2a_.entropy_of(t, ws.marg);
    const double h_xx2a = pl_xx2a_.entropy_of(t, ws.marg);
    const double h_xx2ay = pl_xx2ay_.entropy_of(t, ws.marg);
    const double h_x2ay = pl_x2ay_.entropy_of(t, ws.marg);
    const double i_xx2a = 1.0 + h_x2a - h_xx2a;

    ObjectiveEval ev;
    ev.rate = i_xx2a + (h_xx2ay - h_x2ay);
    if (strictly_causal_) {
      ev.embed_slack =
          (h_x2a - pl_x2_.entropy_of(t, ws.marg)) - i_xx2a;  // H(A|X2) - I
    } else {
      ev.embed_slack = pl_a_.entropy_of(t, ws.marg) - i_xx2a;  // H(A) - I
    }
    ws.acc.resize(pl_acc_xx2_.dest_size);
    pl_acc_xx2_.accumulate(t, ws.acc);
    ev.d2 = ws.acc[1] + ws.acc[2];  // Hamming mismatch mass
    ev.d1 = 0.0;                    // lossless Decoder 1 by construction
    pl_a_.accumulate(t, std::span<double>(ws.acc.data(), 2));
    ev.cost = ws.acc[1];  // Lambda(a) = a
    return ev;
  }

 private:
  bool strictly_causal_;
  std::vector<double> side_;
  MarginalPlan pl_x2a_, pl_xx2a_, pl_xx2ay_, pl_x2ay_, pl_a_, pl_x2_,
      pl_acc_xx2_;
};

std::vector<std::pair<std::string, double>> source_slacks(
    const ObjectiveEval& ev, double d1_budget, double d2_budget,
    double cost_budget) {
  return {{"d1", d1_budget - ev.d1},
          {"d2", d2_budget - ev.d2},
          {"cost", cost_budget - ev.cost},
          {"embedding", ev.embed_slack}};
}

void check_budgets(double d1_budget, double d2_budget, double cost_budget) {
  if (d1_budget < 0.0 || d2_budget < 0.0 || cost_budget < 0.0) {
    throw std::invalid_argument("budgets must be non-negative");
  }
}

std::shared_ptr<DecoderSideEvaluator> make_decoder_evaluator(
    const SourceActionProblem& p, ObservationMode mode,
    const SolverConfig& config) {
  int o_card;
  int u_card;
  if (mode == ObservationMode::Causal) {
    o_card = config.cardinality("V", v_cardinality_bound(p));
    const int nx = static_cast<int>(p.x_alphabet().size());
    const int na = static_cast<int>(p.a_alphabet().size());
    u_card = config.cardinality("U", nx * o_card * na + 1);
  } else {
    o_card = static_cast<int>(p.xhat2.size());
    u_card = config.cardinality("U", u_cardinality_bound(p));
  }
  return std::make_shared<DecoderSideEvaluator>(p, mode, o_card, u_card);
}

SearchProblem decoder_side_search(const SourceActionProblem& p,
                                  ObservationMode mode, double d1_budget,
                                  double d2_budget, double cost_budget,
                                  const SolverConfig& config) {
  check_budgets(d1_budget, d2_budget, cost_budget);
  auto ev = make_decoder_evaluator(p, mode, config);
  SearchProblem sp;
  for (std::size_t x = 0; x < p.x_alphabet().size(); ++x) {
    sp.blocks.push_back(
        {"q|x=" + p.x_alphabet().symbol(x), ev->block_dim()});
  }
  sp.evaluate = [ev, d1_budget, d2_budget, cost_budget](const Candidate& c) {
    const ObjectiveEval m = ev->measures(c.params);
    EvalResult r;
    r.objective = m.rate;
    r.constraints = {m.d1 - d1_budget, m.d2 - d2_budget, m.cost - cost_budget,
                     -m.embed_slack};
    return r;
  };
  return sp;
}

RegionPoint decoder_side_solve(const SourceActionProblem& p,
                               ObservationMode mode, double d1_budget,
                               double d2_budget, double cost_budget,
                               const SolverConfig& config,
                               std::span<const WarmStart> warm) {
  auto ev = make_decoder_evaluator(p, mode, config);
  SearchProblem sp =
      decoder_side_search(p, mode, d1_budget, d2_budget, cost_budget, config);
  SearchOutcome out = minimize_constrained(sp, config, Sense::Minimize, warm);
  RegionPoint pt;
  pt.evaluations = out.evaluations;
  pt.feasible = out.feasible;
  if (!out.feasible) {
    pt.rate = kNaN;
    return pt;
  }
  const ObjectiveEval m = ev->measures(out.witness);
  pt.rate = out.value;
  pt.d1 = m.d1;
  pt.d2 = m.d2;
  pt.cost = m.cost;
  pt.slack = source_slacks(m, d1_budget, d2_budget, cost_budget);
  pt.witness_params = std::move(out.witness);
  return pt;
}

}  // namespace

int u_cardinality_bound(const SourceActionProblem& p) {
  const int nx = static_cast<int>(p.x_alphabet().size());
  const int na = static_cast<int>(p.a_alphabet().size());
  switch (p.mode) {
    case ObservationMode::NonCausal:
    case ObservationMode::StrictlyCausal:
      return nx * static_cast<int>(p.xhat2.size()) * na + 1;
    case ObservationMode::Causal:
      return nx * v_cardinality_bound(p) * na + 1;
    case ObservationMode::EncoderSide:
    case ObservationMode::EncoderSideDual:
      return nx * static_cast<int>(p.xhat1.size()) *
                 static_cast<int>(p.xhat2.size()) +
             3;
  }
  throw std::logic_error("unknown mode");
}

int v_cardinality_bound(const SourceActionProblem& p) {
  return static_cast<int>(p.x_alphabet().size()) + 3;
}

int u_cardinality_bound(const ChannelActionProblem& p) {
  return static_cast<int>(p.x_alphabet().size() * p.s_alphabet().size() *
                          p.a_alphabet().size()) +
         1;
}

ObjectiveEval eval_non_causal(const SourceActionProblem& p,
                              const ConditionalPmf& q) {
  if (q.outputs().size() != 3 || q.inputs().size() != 1 ||
      q.outputs()[0].size() != p.xhat2.size() ||
      q.outputs()[1].size() != p.a_alphabet().size() ||
      q.inputs()[0].size() != p.x_alphabet().size()) {
    throw std::invalid_argument("witness must be q(xhat2, a, u | x)");
  }
  const int u_card = static_cast<int>(q.outputs()[2].size());
  if (u_card > u_cardinality_bound(p)) {
    throw std::invalid_argument("auxiliary cardinality exceeds the bound");
  }
  DecoderSideEvaluator ev(p, ObservationMode::NonCausal,
                          static_cast<int>(p.xhat2.size()), u_card);
  return ev.measures(q.table());
}

ObjectiveEval eval_strictly_causal(const SourceActionProblem& p,
                                   const ConditionalPmf& q) {
  const int u_card = static_cast<int>(q.outputs().at(2).size());
  if (u_card > u_cardinality_bound(p)) {
    throw std::invalid_argument("auxiliary cardinality exceeds the bound");
  }
  DecoderSideEvaluator ev(p, ObservationMode::StrictlyCausal,
                          static_cast<int>(p.xhat2.size()), u_card);
  return ev.measures(q.table());
}

ObjectiveEval eval_causal(const SourceActionProblem& p,
                          const ConditionalPmf& q) {
  const int v_card = static_cast<int>(q.outputs().at(0).size());
  const int u_card = static_cast<int>(q.outputs().at(2).size());
  if (v_card > v_cardinality_bound(p)) {
    throw std::invalid_argument("V cardinality exceeds the bound");
  }
  DecoderSideEvaluator ev(p, ObservationMode::Causal, v_card, u_card);
  return ev.measures(q.table());
}

ObjectiveEval eval_encoder_side(const SourceActionProblem& p,
                                const ConditionalPmf& q_u,
                                const ConditionalPmf& q_xhat1,
                                const ConditionalPmf& q_xhat2,
                                const FinitePmf& p_a) {
  if (!p.observation_map) {
    throw std::invalid_argument("encoder-side evaluation needs f_Y");
  }
  const int u_card = static_cast<int>(q_u.outputs().at(0).size());
  EncoderSideEvaluator ev(p, u_card);
  std::vector<double> params;
  params.reserve(ev.total_dim());
  params.insert(params.end(), q_u.table().begin(), q_u.table().end());
  params.insert(params.end(), q_xhat1.table().begin(), q_xhat1.table().end());
  params.insert(params.end(), q_xhat2.table().begin(), q_xhat2.table().end());
  params.insert(params.end(), p_a.probs().begin(), p_a.probs().end());
  if (params.size() != ev.total_dim()) {
    throw std::invalid_argument("encoder-side witness has wrong shape");
  }
  return ev.measures(params);
}

ObjectiveEval eval_encoder_side_dual(const SourceActionProblem& p,
                                     const ConditionalPmf& q_xhat12,
                                     const FinitePmf& p_a) {
  if (!p.observation_map) {
    throw std::invalid_argument("encoder-side evaluation needs f_Y");
  }
  EncoderDualEvaluator ev(p);
  std::vector<double> params;
  params.reserve(ev.total_dim());
  params.insert(params.end(), q_xhat12.table().begin(), q_xhat12.table().end());
  params.insert(params.end(), p_a.probs().begin(), p_a.probs().end());
  if (params.size() != ev.total_dim()) {
    throw std::invalid_argument("dual witness has wrong shape");
  }
  return ev.measures(params);
}

namespace {

ObjectiveEval eval_channel_measures_to_objective(const ChannelMeasures& m) {
  ObjectiveEval ev;
  ev.rate = m.sum_rate;
  ev.cost = m.cost;
  ev.embed_slack = m.h_b;
  return ev;
}

}  // namespace

ObjectiveEval eval_channel(const ChannelActionProblem& p, const FinitePmf& p_a,
                           const ConditionalPmf& q_u,
                           const DeterministicMap& g) {
  const int u_card = static_cast<int>(q_u.outputs().at(0).size());
  ChannelEvaluator ev(p, u_card);
  std::vector<double> params;
  params.insert(params.end(), p_a.probs().begin(), p_a.probs().end());
  params.insert(params.end(), q_u.table().begin(), q_u.table().end());
  std::vector<int> gt;
  gt.reserve(g.table().size());
  for (std::size_t v : g.table()) gt.push_back(static_cast<int>(v));
  const ChannelMeasures m = ev.measures(params, gt);
  return eval_channel_measures_to_objective(m);
}

RegionPoint solve_non_causal(const SourceActionProblem& p, double d1_budget,
                             double d2_budget, double cost_budget,
                             const SolverConfig& config,
                             std::span<const WarmStart> warm) {
  return decoder_side_solve(p, ObservationMode::NonCausal, d1_budget,
                            d2_budget, cost_budget, config, warm);
}

RegionPoint solve_strictly_causal(const SourceActionProblem& p,
                                  double d1_budget, double d2_budget,
                                  double cost_budget,
                                  const SolverConfig& config,
                                  std::span<const WarmStart> warm) {
  return decoder_side_solve(p, ObservationMode::StrictlyCausal, d1_budget,
                            d2_budget, cost_budget, config, warm);
}

RegionPoint solve_causal(const SourceActionProblem& p, double d1_budget,
                         double d2_budget, double cost_budget,
                         const SolverConfig& config,
                         std::span<const WarmStart> warm) {
  return decoder_side_solve(p, ObservationMode::Causal, d1_budget, d2_budget,
                            cost_budget, config, warm);
}

namespace {

SearchProblem encoder_side_search(const SourceActionProblem& p,
                                  double d1_budget, double d2_budget,
                                  double cost_budget,
                                  const SolverConfig& config) {
  check_budgets(d1_budget, d2_budget, cost_budget);
  auto violations = validate(p);
  if (!violations.empty()) {
    throw std::invalid_argument("invalid problem: " + violations.front().field +
                                ": " + violations.front().message);
  }
  const int u_card = config.cardinality("U", u_cardinality_bound(p));
  auto ev = std::make_shared<EncoderSideEvaluator>(p, u_card);

  SearchProblem sp;
  const int nx = static_cast<int>(p.x_alphabet().size());
  for (int x = 0; x < nx; ++x) {
    sp.blocks.push_back({"u|x=" + std::to_string(x), u_card});
  }
  for (int u = 0; u < u_card; ++u) {
    for (int x = 0; x < nx; ++x) {
      sp.blocks.push_back({"x1|u=" + std::to_string(u) + ",x=" + std::to_string(x),
                           static_cast<int>(p.xhat1.size())});
    }
  }
  for (int u = 0; u < u_card; ++u) {
    for (int x = 0; x < nx; ++x) {
      sp.blocks.push_back({"x2|u=" + std::to_string(u) + ",x=" + std::to_string(x),
                           static_cast<int>(p.xhat2.size())});
    }
  }
  sp.blocks.push_back({"a", static_cast<int>(p.a_alphabet().size())});

  sp.evaluate = [ev, d1_budget, d2_budget, cost_budget](const Candidate& c) {
    const ObjectiveEval m = ev->measures(c.params);
    EvalResult r;
    r.objective = m.rate;
    r.constraints = {m.d1 - d1_budget, m.d2 - d2_budget, m.cost - cost_budget,
                     -m.extra_slacks[0].second, -m.extra_slacks[1].second};
    return r;
  };
  return sp;
}

SearchProblem encoder_dual_search(const SourceActionProblem& p,
                                  double d1_budget, double d2_budget,
                                  double cost_budget) {
  check_budgets(d1_budget, d2_budget, cost_budget);
  auto violations = validate(p);
  if (!violations.empty()) {
    throw std::invalid_argument("invalid problem: " + violations.front().field +
                                ": " + violations.front().message);
  }
  auto ev = std::make_shared<EncoderDualEvaluator>(p);

  SearchProblem sp;
  const int nx = static_cast<int>(p.x_alphabet().size());
  for (int x = 0; x < nx; ++x) {
    sp.blocks.push_back(
        {"x1x2|x=" + std::to_string(x),
         static_cast<int>(p.xhat1.size() * p.xhat2.size())});
  }
  sp.blocks.push_back({"a", static_cast<int>(p.a_alphabet().size())});

  sp.evaluate = [ev, d1_budget, d2_budget, cost_budget](const Candidate& c) {
    const ObjectiveEval m = ev->measures(c.params);
    EvalResult r;
    r.objective = m.rate;
    r.constraints = {m.d1 - d1_budget, m.d2 - d2_budget, m.cost - cost_budget,
                     -m.embed_slack};
    return r;
  };
  return sp;
}

}  // namespace

RegionPoint solve_encoder_side(const SourceActionProblem& p, double d1_budget,
                               double d2_budget, double cost_budget,
                               const SolverConfig& config,
                               std::span<const WarmStart> warm) {
  SearchProblem sp =
      encoder_side_search(p, d1_budget, d2_budget, cost_budget, config);
  const int u_card = config.cardinality("U", u_cardinality_bound(p));
  auto ev = std::make_shared<EncoderSideEvaluator>(p, u_card);
  SearchOutcome out = minimize_constrained(sp, config, Sense::Minimize, warm);
  RegionPoint pt;
  pt.evaluations = out.evaluations;
  pt.feasible = out.feasible;
  if (!out.feasible) {
    pt.rate = kNaN;
    return pt;
  }
  const ObjectiveEval m = ev->measures(out.witness);
  pt.rate = std::max(0.0, out.value);  // the nonnegative clamp
  pt.d1 = m.d1;
  pt.d2 = m.d2;
  pt.cost = m.cost;
  pt.slack = source_slacks(m, d1_budget, d2_budget, cost_budget);
  pt.slack.insert(pt.slack.end(), m.extra_slacks.begin(),
                  m.extra_slacks.end());
  pt.witness_params = std::move(out.witness);
  return pt;
}

RegionPoint solve_encoder_side_dual(const SourceActionProblem& p,
                                    double d1_budget, double d2_budget,
                                    double cost_budget,
                                    const SolverConfig& config,
                                    std::span<const WarmStart> warm) {
  SearchProblem sp = encoder_dual_search(p, d1_budget, d2_budget, cost_budget);
  auto ev = std::make_shared<EncoderDualEvaluator>(p);
  SearchOutcome out = minimize_constrained(sp, config, Sense::Minimize, warm);
  RegionPoint pt;
  pt.evaluations = out.evaluations;
  pt.feasible = out.feasible;
  if (!out.feasible) {
    pt.rate = kNaN;
    return pt;
  }
  const ObjectiveEval m = ev->measures(out.witness);
  pt.rate = std::max(0.0, out.value);
  pt.d1 = m.d1;
  pt.d2 = m.d2;
  pt.cost = m.cost;
  pt.slack = source_slacks(m, d1_budget, d2_budget, cost_budget);
  pt.witness_params = std::move(out.witness);
  return pt;
}

RegionPoint solve_source(const SourceActionProblem& p, double d1_budget,
                         double d2_budget, double cost_budget,
                         const SolverConfig& config,
                         std::span<const WarmStart> warm) {
  switch (p.mode) {
    case ObservationMode::NonCausal:
      return solve_non_causal(p, d1_budget, d2_budget, cost_budget, config,
                              warm);
    case ObservationMode::StrictlyCausal:
      return solve_strictly_causal(p, d1_budget, d2_budget, cost_budget,
                                   config, warm);
    case ObservationMode::Causal:
      return solve_causal(p, d1_budget, d2_budget, cost_budget, config, warm);
    case ObservationMode::EncoderSide:
      return solve_encoder_side(p, d1_budget, d2_budget, cost_budget, config,
                                warm);
    case ObservationMode::EncoderSideDual:
      return solve_encoder_side_dual(p, d1_budget, d2_budget, cost_budget,
                                     config, warm);
  }
  throw std::logic_error("unknown mode");
}

SearchProblem channel_search_problem(const ChannelActionProblem& p, double r1,
                                     double cost_budget,
                                     const SolverConfig& config) {
  if (r1 < 0.0 || cost_budget < 0.0) {
    throw std::invalid_argument("r1 and the cost budget must be non-negative");
  }
  const int u_card = config.cardinality("U", u_cardinality_bound(p));
  auto ev = std::make_shared<ChannelEvaluator>(p, u_card);

  SearchProblem sp;
  sp.blocks.push_back({"a", static_cast<int>(p.a_alphabet().size())});
  for (std::size_t s = 0; s < p.s_alphabet().size(); ++s) {
    for (std::size_t a = 0; a < p.a_alphabet().size(); ++a) {
      sp.blocks.push_back({"u|s=" + p.s_alphabet().symbol(s) +
                               ",a=" + p.a_alphabet().symbol(a),
                           u_card});
    }
  }
  sp.map_spaces.push_back({"g", ev->g_domain(), ev->g_codomain()});

  sp.evaluate = [ev, r1, cost_budget](const Candidate& c) {
    const ChannelMeasures m = ev->measures(c.params, c.map_tables);
    EvalResult r;
    r.objective = m.sum_rate;
    r.constraints = {r1 - m.h_b, m.cost - cost_budget};
    return r;
  };
  return sp;
}

RegionPoint channel_max_sum_rate(const ChannelActionProblem& p, double r1,
                                 double cost_budget, const SolverConfig& config,
                                 std::span<const WarmStart> warm) {
  SearchProblem sp = channel_search_problem(p, r1, cost_budget, config);
  const int u_card = config.cardinality("U", u_cardinality_bound(p));
  auto ev = std::make_shared<ChannelEvaluator>(p, u_card);
  SearchOutcome out = minimize_constrained(sp, config, Sense::Maximize, warm);
  RegionPoint pt;
  pt.evaluations = out.evaluations;
  pt.feasible = out.feasible;
  pt.r1 = r1;
  if (!out.feasible) {
    pt.rate = kNaN;
    return pt;
  }
  const ChannelMeasures m = ev->measures(out.witness, out.witness_maps);
  pt.rate = out.value;
  pt.cost = m.cost;
  pt.slack = {{"r1", m.h_b - r1}, {"cost", cost_budget - m.cost}};
  pt.witness_params = std::move(out.witness);
  pt.witness_maps = std::move(out.witness_maps);
  return pt;
}

namespace {

RegionPoint probing_point_from(const ProbingProblem& p, double r1,
                               const SearchOutcome& out) {
  RegionPoint pt;
  pt.evaluations = out.evaluations;
  pt.feasible = out.feasible;
  pt.r1 = r1;
  if (!out.feasible) {
    pt.rate = kNaN;
    return pt;
  }
  const double p1 = out.witness[1], p2 = out.witness[3], g = out.witness[5];
  const double ex = p1 * g * (1.0 - p.epsilon) + p2 * (1.0 - g);
  pt.rate = out.value;
  pt.cost = ex;
  pt.slack = {{"gamma_x", p.gamma_x_budget - ex},
              {"gamma_a", p.gamma_a_budget - g},
              {"r1", binary_entropy(g) - r1}};
  pt.witness_params = out.witness;
  return pt;
}

}  // namespace

RegionPoint probing_sum_rate(const ProbingProblem& p, double r1,
                             const SolverConfig& config,
                             std::span<const WarmStart> warm) {
  auto violations = validate(p);
  if (!violations.empty()) {
    throw std::invalid_argument("invalid problem: " + violations.front().field +
                                ": " + violations.front().message);
  }
  if (r1 < 0.0 || r1 > 1.0) {
    throw std::invalid_argument("probing r1 must lie in [0, 1]");
  }
  SearchProblem sp = probing_search_problem(p, r1);
  SearchOutcome out = minimize_constrained(sp, config, Sense::Maximize, warm);
  return probing_point_from(p, r1, out);
}

SearchProblem probing_search_problem(const ProbingProblem& p, double r1) {
  const double eps = p.epsilon;
  const double gx = p.gamma_x_budget;
  const double ga = p.gamma_a_budget;
  SearchProblem sp;
  sp.blocks = {{"p1", 2}, {"p2", 2}, {"gamma", 2}};
  sp.evaluate = [eps, gx, ga, r1](const Candidate& c) {
    const double p1 = c.params[1], p2 = c.params[3], g = c.params[5];
    EvalResult r;
    r.objective = g * (1.0 - eps) * binary_entropy(p1) +
                  (1.0 - g) * (1.0 - eps) * binary_entropy(p2);
    r.constraints = {p1 * g * (1.0 - eps) + p2 * (1.0 - g) - gx, g - ga,
                     r1 - binary_entropy(g)};
    return r;
  };
  return sp;
}

RegionPoint probing_sum_rate_convexified(const ProbingProblem& p, double r1,
                                         const SolverConfig& config) {
  auto violations = validate(p);
  if (!violations.empty()) {
    throw std::invalid_argument("invalid probing problem");
  }
  if (r1 < 0.0 || r1 > 1.0) {
    throw std::invalid_argument("probing r1 must lie in [0, 1]");
  }
  const double eps = p.epsilon;
  const double gx = p.gamma_x_budget;
  const double ga = p.gamma_a_budget;

  // Two operating tuples mixed by a time-sharing weight q: params
  // (q, p1, p2, gamma, p1', p2', gamma'), each a binary simplex block.
  SearchProblem sp;
  sp.blocks = {{"q", 2},  {"p1", 2},  {"p2", 2}, {"gamma", 2},
               {"p1b", 2}, {"p2b", 2}, {"gammab", 2}};
  sp.evaluate = [eps, gx, ga, r1](const Candidate& c) {
    const double q = c.params[1];
    const double p1 = c.params[3], p2 = c.params[5], g = c.params[7];
    const double p1b = c.params[9], p2b = c.params[11], gb = c.params[13];
    auto sum = [eps](double a1, double a2, double gg) {
      return gg * (1.0 - eps) * binary_entropy(a1) +
             (1.0 - gg) * (1.0 - eps) * binary_entropy(a2);
    };
    auto ex = [eps](double a1, double a2, double gg) {
      return a1 * gg * (1.0 - eps) + a2 * (1.0 - gg);
    };
    EvalResult r;
    r.objective = q * sum(p1, p2, g) + (1.0 - q) * sum(p1b, p2b, gb);
    r.constraints = {q * ex(p1, p2, g) + (1.0 - q) * ex(p1b, p2b, gb) - gx,
                     q * g + (1.0 - q) * gb - ga,
                     r1 - (q * binary_entropy(g) +
                           (1.0 - q) * binary_entropy(gb))};
    return r;
  };
  SearchOutcome out = minimize_constrained(sp, config, Sense::Maximize);
  RegionPoint pt;
  pt.evaluations = out.evaluations;
  pt.feasible = out.feasible;
  pt.r1 = r1;
  pt.rate = out.feasible ? out.value : kNaN;
  pt.witness_params = out.witness;
  return pt;
}

RegionPoint binary_example_point(double delta, double d2_budget,
                                 ObservationMode mode,
                                 const SolverConfig& config,
                                 std::span<const WarmStart> warm) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("delta must lie in [0, 1]");
  }
  if (!(d2_budget >= 0.0 && d2_budget <= 0.5)) {
    throw std::invalid_argument("d2 must lie in [0, 0.5]");
  }
  if (mode != ObservationMode::NonCausal &&
      mode != ObservationMode::StrictlyCausal) {
    throw std::invalid_argument(
        "the reduced binary example covers the non-causal and strictly "
        "causal modes only");
  }
  auto ev = std::make_shared<BinaryExampleEvaluator>(
      delta, mode == ObservationMode::StrictlyCausal);
  SearchProblem sp = binary_example_search_problem(delta, d2_budget, mode);
  SearchOutcome out = minimize_constrained(sp, config, Sense::Minimize, warm);
  RegionPoint pt;
  pt.evaluations = out.evaluations;
  pt.feasible = out.feasible;
  if (!out.feasible) {
    pt.rate = kNaN;
    return pt;
  }
  const ObjectiveEval m = ev->measures(out.witness);
  pt.rate = out.value;
  pt.d1 = 0.0;
  pt.d2 = m.d2;
  pt.cost = m.cost;
  pt.slack = {{"d2", d2_budget - m.d2}, {"embedding", m.embed_slack}};
  pt.witness_params = std::move(out.witness);
  return pt;
}

double binary_example_rate(double delta, double d2_budget,
                           ObservationMode mode, const SolverConfig& config) {
  return binary_example_point(delta, d2_budget, mode, config).rate;
}

SearchProblem binary_example_search_problem(double delta, double d2_budget,
                                            ObservationMode mode) {
  auto ev = std::make_shared<BinaryExampleEvaluator>(
      delta, mode == ObservationMode::StrictlyCausal);
  SearchProblem sp;
  sp.blocks = {{"alpha", 4}};
  sp.evaluate = [ev, d2_budget](const Candidate& c) {
    const ObjectiveEval m = ev->measures(c.params);
    EvalResult r;
    r.objective = m.rate;
    r.constraints = {m.d2 - d2_budget, -m.embed_slack};
    return r;
  };
  return sp;
}

SearchProblem source_search_problem(const SourceActionProblem& p,
                                    double d1_budget, double d2_budget,
                                    double cost_budget,
                                    const SolverConfig& config) {
  switch (p.mode) {
    case ObservationMode::NonCausal:
    case ObservationMode::StrictlyCausal:
    case ObservationMode::Causal:
      return decoder_side_search(p, p.mode, d1_budget, d2_budget, cost_budget,
                                 config);
    case ObservationMode::EncoderSide:
      return encoder_side_search(p, d1_budget, d2_budget, cost_budget, config);
    case ObservationMode::EncoderSideDual:
      return encoder_dual_search(p, d1_budget, d2_budget, cost_budget);
  }
  throw std::logic_error("unknown mode");
}

double decoder2_threshold(double delta, const SolverConfig& config) {
  const RegionPoint stage1 =
      binary_example_point(delta, 0.5, ObservationMode::NonCausal, config);
  const double rate_cap = stage1.rate + config.value_tol;

  auto ev = std::make_shared<BinaryExampleEvaluator>(delta, false);
  SearchProblem sp;
  sp.blocks = {{"alpha", 4}};
  sp.evaluate = [ev, rate_cap](const Candidate& c) {
    const ObjectiveEval m = ev->measures(c.params);
    EvalResult r;
    r.objective = c.params[1] + c.params[2];  // alpha2 + alpha3
    r.constraints = {m.rate - rate_cap, m.d2 - 0.5, -m.embed_slack};
    return r;
  };
  std::vector<WarmStart> warm;
  warm.push_back(WarmStart{stage1.witness_params, {}});
  SearchOutcome out = minimize_constrained(sp, config, Sense::Minimize, warm);
  if (!out.feasible) {
    // stage 1's own witness is feasible by construction, so this cannot
    // happen unless the caps are inconsistent
    throw std::runtime_error("threshold search lost feasibility");
  }
  return out.value;
}

std::vector<RatePair> region_transfer_closure(
    std::span<const RatePair> points) {
  struct Entry {
    double r1, r2, s;
  };
  std::vector<Entry> entries;
  entries.reserve(points.size());
  for (const auto& p : points) {
    if (!std::isfinite(p.r1) || !std::isfinite(p.r2) || p.r1 < 0.0 ||
        p.r2 < 0.0) {
      throw std::invalid_argument(
          "region_transfer_closure needs finite non-negative rate pairs");
    }
    entries.push_back({p.r1, p.r2, p.r1 + p.r2});
  }
  if (entries.empty()) return {};

  // Pareto filter in (r1, r1+r2) space: sweep from large r1 keeping points
  // whose sum strictly exceeds everything to their right.
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.r1 != b.r1) return a.r1 > b.r1;
    return a.s > b.s;
  });
  std::vector<Entry> kept;
  double best_s = -1.0;
  for (const auto& e : entries) {
    if (e.s > best_s) {
      kept.push_back(e);
      best_s = e.s;
    }
  }
  std::reverse(kept.begin(), kept.end());  // ascending r1, descending s

  std::vector<RatePair> corners;
  if (kept.front().r1 > 0.0) {
    corners.push_back({0.0, kept.front().s});
  }
  for (const auto& e : kept) corners.push_back({e.r1, e.r2});
  return corners;
}

TradeoffCurve trace_curve(const PointSolver& solve_at, std::string sweep_var,
                          std::span<const double> grid, double value_tol,
                          bool expect_nonincreasing) {
  if (grid.empty()) {
    throw std::invalid_argument("trace_curve needs a non-empty grid");
  }
  TradeoffCurve curve;
  curve.sweep_var = std::move(sweep_var);
  curve.grid.assign(grid.begin(), grid.end());

  std::vector<WarmStart> warm;
  for (double v : grid) {
    RegionPoint pt = solve_at(v, warm);
    if (pt.feasible) {
      warm.assign(1, WarmStart{pt.witness_params, pt.witness_maps});
    }
    curve.points.push_back(std::move(pt));
  }
  if (expect_nonincreasing) {
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      const auto& prev = curve.points[i - 1];
      const auto& cur = curve.points[i];
      if (prev.feasible && cur.feasible &&
          cur.rate > prev.rate + value_tol) {
        curve.warnings.push_back(
            curve.sweep_var + "=" + std::to_string(curve.grid[i]) +
            ": rate " + std::to_string(cur.rate) +
            " exceeds the previous point " + std::to_string(prev.rate) +
            " (solver miss)");
      }
    }
  }
  return curve;
}

ConditionalPmf source_witness_pmf(const SourceActionProblem& p,
                                  const SolverConfig& config,
                                  std::span<const double> params) {
  int o_card;
  int u_card;
  std::string o_name;
  if (p.mode == ObservationMode::Causal) {
    o_card = config.cardinality("V", v_cardinality_bound(p));
    const int nx = static_cast<int>(p.x_alphabet().size());
    const int na = static_cast<int>(p.a_alphabet().size());
    u_card = config.cardinality("U", nx * o_card * na + 1);
    o_name = "V";
  } else {
    o_card = static_cast<int>(p.xhat2.size());
    u_card = config.cardinality("U", u_cardinality_bound(p));
    o_name = "Xhat2";
  }
  std::vector<Alphabet> outputs = {
      o_name == "V" ? Alphabet::indexed("V", static_cast<std::size_t>(o_card))
                    : p.xhat2,
      p.a_alphabet(), Alphabet::indexed("U", static_cast<std::size_t>(u_card))};
  return ConditionalPmf(std::move(outputs), {p.x_alphabet()},
                        std::vector<double>(params.begin(), params.end()));
}

ObjectiveEval reevaluate_source_witness(const SourceActionProblem& p,
                                        const SolverConfig& config,
                                        std::span<const double> params) {
  switch (p.mode) {
    case ObservationMode::NonCausal:
    case ObservationMode::StrictlyCausal: {
      const int u_card = config.cardinality("U", u_cardinality_bound(p));
      DecoderSideEvaluator ev(p, p.mode, static_cast<int>(p.xhat2.size()),
                              u_card);
      return ev.measures(params);
    }
    case ObservationMode::Causal: {
      const int v_card = config.cardinality("V", v_cardinality_bound(p));
      const int nx = static_cast<int>(p.x_alphabet().size());
      const int na = static_cast<int>(p.a_alphabet().size());
      const int u_card = config.cardinality("U", nx * v_card * na + 1);
      DecoderSideEvaluator ev(p, p.mode, v_card, u_card);
      return ev.measures(params);
    }
    case ObservationMode::EncoderSide: {
      const int u_card = config.cardinality("U", u_cardinality_bound(p));
      EncoderSideEvaluator ev(p, u_card);
      return ev.measures(params);
    }
    case ObservationMode::EncoderSideDual: {
      EncoderDualEvaluator ev(p);
      return ev.measures(params);
    }
  }
  throw std::logic_error("unknown mode");
}

std::vector<double> embed_sc_witness_in_causal(const SourceActionProblem& p,
                                               std::span<const double> params,
                                               int u_card, int v_card) {
  const int nx = static_cast<int>(p.x_alphabet().size());
  const int n2 = static_cast<int>(p.xhat2.size());
  const int na = static_cast<int>(p.a_alphabet().size());
  if (v_card < n2) {
    throw std::invalid_argument("v_card must cover Xhat2");
  }
  const std::size_t in_block = static_cast<std::size_t>(n2 * na * u_card);
  if (params.size() != in_block * static_cast<std::size_t>(nx)) {
    throw std::invalid_argument("witness has wrong shape");
  }
  const std::size_t out_block = static_cast<std::size_t>(v_card * na * u_card);
  std::vector<double> out(out_block * static_cast<std::size_t>(nx), 0.0);
  for (int x = 0; x < nx; ++x) {
    for (int v = 0; v < n2; ++v) {
      for (int a = 0; a < na; ++a) {
        for (int u = 0; u < u_card; ++u) {
          out[static_cast<std::size_t>(x) * out_block +
              static_cast<std::size_t>((v * na + a) * u_card + u)] =
              params[static_cast<std::size_t>(x) * in_block +
                     static_cast<std::size_t>((v * na + a) * u_card + u)];
        }
      }
    }
  }
  return out;
}

std::vector<double> embed_causal_witness_in_non_causal(
    const SourceActionProblem& p, std::span<const double> params, int u_card,
    int v_card, int target_u_card) {
  const int nx = static_cast<int>(p.x_alphabet().size());
  const int n2 = static_cast<int>(p.xhat2.size());
  const int na = static_cast<int>(p.a_alphabet().size());
  const int nb = static_cast<int>(p.b_alphabet().size());
  if (target_u_card < u_card * v_card) {
    throw std::invalid_argument("target U cannot hold the (U, V) pair");
  }
  const std::size_t in_block = static_cast<std::size_t>(v_card * na * u_card);
  if (params.size() != in_block * static_cast<std::size_t>(nx)) {
    throw std::invalid_argument("witness has wrong shape");
  }

  // p(x, v, b) = sum_{a : f(a) = b} p(x) sum_u q(v, a, u | x)
  std::vector<double> pxvb(
      static_cast<std::size_t>(nx * v_card * nb), 0.0);
  for (int x = 0; x < nx; ++x) {
    const double px = p.source.probs()[static_cast<std::size_t>(x)];
    for (int v = 0; v < v_card; ++v) {
      for (int a = 0; a < na; ++a) {
        double qsum = 0.0;
        for (int u = 0; u < u_card; ++u) {
          qsum += params[static_cast<std::size_t>(x) * in_block +
                         static_cast<std::size_t>((v * na + a) * u_card + u)];
        }
        const int b = static_cast<int>(p.action_map.apply(
            static_cast<std::size_t>(a)));
        pxvb[static_cast<std::size_t>((x * v_card + v) * nb + b)] += px * qsum;
      }
    }
  }
  // g2(v, b): expected-distortion minimizer toward Xhat2
  std::vector<int> g2(static_cast<std::size_t>(v_card * nb), 0);
  for (int v = 0; v < v_card; ++v) {
    for (int b = 0; b < nb; ++b) {
      double best = std::numeric_limits<double>::infinity();
      int best_t = 0;
      for (int t = 0; t < n2; ++t) {
        double c = 0.0;
        for (int x = 0; x < nx; ++x) {
          c += pxvb[static_cast<std::size_t>((x * v_card + v) * nb + b)] *
               p.d2(static_cast<std::size_t>(x), static_cast<std::size_t>(t));
        }
        if (c < best) {
          best = c;
          best_t = t;
        }
      }
      g2[static_cast<std::size_t>(v * nb + b)] = best_t;
    }
  }

  // q'(xhat2, a, (u, v) | x) with the pairing u' = u * v_card + v
  const std::size_t out_block =
      static_cast<std::size_t>(n2 * na * target_u_card);
  std::vector<double> out(out_block * static_cast<std::size_t>(nx), 0.0);
  for (int x = 0; x < nx; ++x) {
    for (int v = 0; v < v_card; ++v) {
      for (int a = 0; a < na; ++a) {
        const int b = static_cast<int>(p.action_map.apply(
            static_cast<std::size_t>(a)));
        const int xhat2 = g2[static_cast<std::size_t>(v * nb + b)];
        for (int u = 0; u < u_card; ++u) {
          const int u_pair = u * v_card + v;
          out[static_cast<std::size_t>(x) * out_block +
              static_cast<std::size_t>((xhat2 * na + a) * target_u_card +
                                       u_pair)] +=
              params[static_cast<std::size_t>(x) * in_block +
                     static_cast<std::size_t>((v * na + a) * u_card + u)];
        }
      }
    }
  }
  return out;
}

}  // namespace actembed
