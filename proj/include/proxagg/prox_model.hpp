#pragma once

#include <stdexcept>

#include "proxagg/domain.hpp"
#include "proxagg/vec.hpp"

namespace proxagg {

// One quadratic prox-function built from a single oracle call:
//   p(x) = value + <grad, x - anchor> + lambda/2 * ||x - anchor||^2.
struct ProxTerm {
  Vec anchor;
  double value = 0.0;
  Vec grad;
  double lambda = 1.0;
};

inline double evaluate(const ProxTerm& t, const Vec& x) {
  check_same_dim(t.anchor, x, "evaluate(ProxTerm)");
  return t.value + dot(t.grad, sub(x, t.anchor)) +
         0.5 * t.lambda * dist_sq(x, t.anchor);
}

// Running convex combination of prox-functions, stored in monomial form
//   P(x) = lambda/2 * <x,x> + <lin, x> + cnst.
// Every mixed-in term carries the same lambda and mixing weights sum to 1,
// so the quadratic coefficient stays exactly lambda/2 and a mixing step is a
// plain affine combination of (lin, cnst). O(d) memory regardless of how
// many terms were mixed in.
struct AggregatedProxModel {
  double lambda = 1.0;
  Vec lin;
  double cnst = 0.0;
};

// Expand one prox term into monomial form.
inline AggregatedProxModel model_from_term(const ProxTerm& term) {
  AggregatedProxModel m;
  m.lambda = term.lambda;
  m.lin = add_scaled(term.grad, -term.lambda, term.anchor);
  m.cnst = term.value - dot(term.grad, term.anchor) +
           0.5 * term.lambda * norm_sq(term.anchor);
  return m;
}

// model <- (1-step)*model + step*term, in place.
inline void mix_in_place(AggregatedProxModel& model, double step,
                         const ProxTerm& term) {
  if (!(step >= 0.0 && step <= 1.0))
    throw std::invalid_argument("mix: step outside [0,1]");
  if (term.lambda != model.lambda)
    throw std::invalid_argument("mix: lambda mismatch between model and term");
  const AggregatedProxModel t = model_from_term(term);
  scale_add(model.lin, 1.0 - step, step, t.lin);
  model.cnst = (1.0 - step) * model.cnst + step * t.cnst;
}

inline AggregatedProxModel mix(const AggregatedProxModel& model, double step,
                               const ProxTerm& term) {
  AggregatedProxModel r = model;
  mix_in_place(r, step, term);
  return r;
}

inline double evaluate(const AggregatedProxModel& m, const Vec& x) {
  check_same_dim(m.lin, x, "evaluate(AggregatedProxModel)");
  return 0.5 * m.lambda * norm_sq(x) + dot(m.lin, x) + m.cnst;
}

// Constrained minimizer of P over the domain. P has Hessian lambda*I, so the
// constrained minimizer is the projection of the stationary point -lin/lambda.
inline Vec model_argmin(const AggregatedProxModel& m, const Domain& dom) {
  return project(dom, scaled(m.lin, -1.0 / m.lambda));
}

// min_domain P; for interior minimizers this equals cnst - ||lin||^2/(2*lambda).
inline double model_min_value(const AggregatedProxModel& m, const Domain& dom) {
  return evaluate(m, model_argmin(m, dom));
}

}  // namespace proxagg
