#include "mapforge/losses.hpp"

#include <cmath>

namespace mapforge {

namespace {

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

FocalLossResult focal_loss(const std::array<double, kNumClasses>& logits,
                           std::optional<ElementClass> target,
                           const FocalParams& fp) {
  FocalLossResult out;
  const int hot = target ? static_cast<int>(*target) : -1;
  for (int c = 0; c < kNumClasses; ++c) {
    const double x = logits[c];
    const double p = sigmoid(x);
    if (c == hot) {
      // -alpha (1-p)^gamma log p
      out.value += fp.alpha * std::pow(1.0 - p, fp.gamma) * softplus(-x);
      out.grad[c] = fp.alpha * std::pow(1.0 - p, fp.gamma) *
                    (fp.gamma * p * (-softplus(-x)) - (1.0 - p));
    } else {
      // -(1-alpha) p^gamma log(1-p)
      out.value += (1.0 - fp.alpha) * std::pow(p, fp.gamma) * softplus(x);
      out.grad[c] = (1.0 - fp.alpha) * std::pow(p, fp.gamma) *
                    (p - fp.gamma * (1.0 - p) * (-softplus(x)));
    }
  }
  return out;
}

PointLossResult p2p_loss(const std::vector<Point>& pred_points,
                         const std::vector<Point>& gt_points,
                         const Permutation& gamma) {
  const std::size_t n = pred_points.size();
  if (gt_points.size() != n || gamma.size() != n)
    throw ShapeMismatch("p2p_loss: point counts differ");
  PointLossResult out;
  out.grad.assign(n, Point{});
  for (std::size_t j = 0; j < n; ++j) {
    const Point d = pred_points[j] - gt_points[gamma[j]];
    out.value += std::abs(d.x) + std::abs(d.y) + std::abs(d.z);
    out.grad[j] = {sign0(d.x), sign0(d.y), sign0(d.z)};
  }
  return out;
}

DirLossResult dir_loss(const std::vector<Point>& pred_points,
                       const std::vector<Point>& gt_points,
                       const Permutation& gamma, bool closed,
                       bool include_wrap_for_open) {
  const std::size_t n = pred_points.size();
  if (gt_points.size() != n || gamma.size() != n)
    throw ShapeMismatch("dir_loss: point counts differ");
  DirLossResult out;
  out.grad.assign(n, Point{});
  if (n < 2) return out;

  const std::size_t edges =
      (closed || include_wrap_for_open) ? n : n - 1;
  for (std::size_t j = 0; j < edges; ++j) {
    const std::size_t jn = (j + 1) % n;
    const Point pe = pred_points[j] - pred_points[jn];
    const Point ge = gt_points[gamma[j]] - gt_points[gamma[jn]];
    const double pn = norm(pe);
    const double gn = norm(ge);
    if (gn == 0.0 || pn == 0.0) {
      ++out.skipped_edges;
      continue;
    }
    const double cos_sim = dot(pe, ge) / (pn * gn);
    out.value -= cos_sim;
    // d(-cos)/d(pe) = -ge/(|pe||ge|) + cos * pe/|pe|^2
    const Point dpe =
        ge * (-1.0 / (pn * gn)) + pe * (cos_sim / (pn * pn));
    out.grad[j] += dpe;
    out.grad[jn] -= dpe;
  }
  return out;
}

LossReport set_prediction_loss(const std::vector<Prediction>& preds,
                               const TargetSlots& slots,
                               const HierarchicalAssignment& assignment,
                               const LossWeights& w, const LossOptions& opts) {
  const std::size_t n = preds.size();
  if (slots.size() != n || assignment.pred_for_slot.size() != n)
    throw ShapeMismatch("set_prediction_loss: slot count mismatch");

  LossReport rep;
  rep.grad_points.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    rep.grad_points[i].assign(preds[i].points.size(), Point{});
  rep.grad_logits.assign(n, {});

  double cls = 0.0, p2p = 0.0, dir = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const int i = assignment.pred_for_slot[k];
    const auto& slot = slots[k];
    const auto fl = focal_loss(preds[i].logits,
                               slot ? std::optional(slot->cls) : std::nullopt,
                               opts.focal);
    cls += fl.value;
    for (int c = 0; c < kNumClasses; ++c)
      rep.grad_logits[i][c] += w.lambda_cls * fl.grad[c];
    if (!slot) continue;

    ++rep.positive_slots;
    const Permutation& gamma = *assignment.point_perm[k];
    const auto pl = p2p_loss(preds[i].points, slot->points, gamma);
    p2p += pl.value;
    const auto dl = dir_loss(preds[i].points, slot->points, gamma,
                             slot->closed, opts.dir_wrap_for_open);
    dir += dl.value;
    rep.skipped_edges += dl.skipped_edges;
    for (std::size_t j = 0; j < preds[i].points.size(); ++j) {
      rep.grad_points[i][j] += pl.grad[j] * w.lambda_p2p;
      rep.grad_points[i][j] += dl.grad[j] * w.lambda_dir;
    }
  }

  rep.terms["cls"] = cls;
  rep.terms["p2p"] = p2p;
  rep.terms["dir"] = dir;
  rep.total = w.lambda_cls * cls + w.lambda_p2p * p2p + w.lambda_dir * dir;
  return rep;
}

LossReport one2one_loss(const std::vector<Prediction>& preds,
                        const std::vector<MapElement>& gts,
                        const HierarchicalAssignment& assignment,
                        const LossWeights& weights, const LossOptions& opts) {
  return set_prediction_loss(preds, pad_targets(gts, preds.size()), assignment,
                             weights, opts);
}

LossReport one2many_loss(const std::vector<Prediction>& preds,
                         const std::vector<MapElement>& gts, int k,
                         const LossWeights& weights, const LossOptions& opts,
                         const MatchOptions& match_opts,
                         HierarchicalAssignment* out_assignment) {
  const auto slots = one_to_many_targets(gts, k, preds.size());
  auto assignment = hierarchical_match(preds, slots, match_opts);
  auto rep = set_prediction_loss(preds, slots, assignment, weights, opts);
  if (out_assignment) *out_assignment = std::move(assignment);
  return rep;
}

MaskLossResult mask_ce_loss(const std::vector<double>& logits,
                            const std::vector<std::uint8_t>& target) {
  if (logits.size() != target.size() || logits.empty())
    throw ShapeMismatch("mask_ce_loss: raster shapes differ");
  MaskLossResult out;
  out.grad.assign(logits.size(), 0.0);
  const double inv = 1.0 / static_cast<double>(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double x = logits[i];
    const double t = target[i] ? 1.0 : 0.0;
    out.value += (softplus(x) - x * t) * inv;
    out.grad[i] = (sigmoid(x) - t) * inv;
  }
  return out;
}

LossReport total_loss(const std::optional<LossReport>& one2one,
                      const std::optional<LossReport>& one2many,
                      std::optional<double> bev_mask_loss,
                      std::optional<double> pv_mask_loss,
                      const LossWeights& w) {
  LossReport rep;
  if (one2one) {
    rep.terms["one2one"] = one2one->total;
    rep.total += w.beta_one2one * one2one->total;
  }
  if (one2many) {
    rep.terms["one2many"] = one2many->total;
    rep.total += w.beta_one2many * one2many->total;
  }
  double dense = 0.0;
  if (bev_mask_loss) {
    rep.terms["bev_mask"] = *bev_mask_loss;
    dense += w.alpha_bev * *bev_mask_loss;
  }
  if (pv_mask_loss) {
    rep.terms["pv_mask"] = *pv_mask_loss;
    dense += w.alpha_pv * *pv_mask_loss;
  }
  if (bev_mask_loss || pv_mask_loss) rep.total += w.beta_dense * dense;
  return rep;
}

}  // namespace mapforge
