#include "haug/block.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace haug {

const char* to_string(WeightRule r) {
  switch (r) {
    case WeightRule::DisplacementProportional: return "displacement-proportional";
    case WeightRule::PureArgmax:               return "pure-argmax";
  }
  return "?";
}

BlockConfig BlockConfig::with_block_size(int M) {
  BlockConfig cfg;
  cfg.M = M;
  cfg.delta = 0.5 / static_cast<double>(M);
  return cfg;
}

void BlockConfig::validate() const {
  if (M < 1) throw std::invalid_argument("BlockConfig: M must be >= 1");
  if (!(delta > 0.0 && delta < 1.0 / static_cast<double>(M))) {
    throw std::invalid_argument("BlockConfig: delta must lie in (0, 1/M)");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("BlockConfig: epsilon must lie in (0, 1]");
  }
  if (!(lambda >= epsilon && lambda <= 1.0)) {
    throw std::invalid_argument("BlockConfig: lambda must lie in [epsilon, 1]");
  }
}

namespace {

// Relative tie tolerance for the argmax displacement set.
constexpr double kTieTol = 1e-12;

// Coincidence tolerance of the extrapolation indicator.
constexpr double kCoincidenceTol = 1e-14;

void weights_into(const std::vector<double>& d, double delta, WeightRule rule,
                  std::vector<double>& beta) {
  const std::size_t M = d.size();
  if (M == 0) throw std::invalid_argument("block_weights: empty displacement list");
  if (!(delta > 0.0 && delta < 1.0 / static_cast<double>(M))) {
    throw std::invalid_argument("block_weights: delta must lie in (0, 1/M)");
  }
  double dmax = 0.0;
  for (double v : d) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("block_weights: displacements must be finite and >= 0");
    }
    dmax = std::max(dmax, v);
  }
  beta.assign(M, 0.0);
  if (M == 1) {  // the constraints force beta = (1) outright
    beta[0] = 1.0;
    return;
  }
  if (rule == WeightRule::PureArgmax) {
    // all mass on the first index attaining the maximum
    for (std::size_t i = 0; i < M; ++i) {
      if (d[i] >= dmax * (1.0 - kTieTol)) {
        beta[i] = 1.0;
        return;
      }
    }
  }
  double sum_sq = 0.0;
  for (double v : d) sum_sq += v * v;
  if (sum_sq == 0.0) {
    beta.assign(M, 1.0 / static_cast<double>(M));
    return;
  }
  std::size_t tie_count = 0;
  const double cut = dmax * (1.0 - kTieTol);
  for (double v : d) {
    if (v >= cut) tie_count += 1;
  }
  const double spread = 1.0 - delta * static_cast<double>(tie_count);
  for (std::size_t i = 0; i < M; ++i) {
    beta[i] = (d[i] >= cut ? delta : 0.0) + spread * (d[i] * d[i] / sum_sq);
  }
}

// Shared core of the extrapolation ratio, taking squared quantities so
// callers that already hold exact squared norms lose nothing to rounding.
double extrapolation_sq(const std::vector<double>& d_sq,
                        const std::vector<double>& beta, double p_minus_x_sq,
                        bool coincide) {
  double num = 0.0;
  for (std::size_t i = 0; i < d_sq.size(); ++i) num += beta[i] * d_sq[i];
  double den = p_minus_x_sq;
  if (coincide) {
    num += 1.0;
    den += 1.0;
  }
  return num / den;
}

}  // namespace

std::vector<double> block_weights(const std::vector<double>& displacements,
                                  double delta, WeightRule rule) {
  std::vector<double> beta;
  weights_into(displacements, delta, rule, beta);
  return beta;
}

double extrapolation(const std::vector<double>& displacements,
                     const std::vector<double>& weights, const Vec& p_minus_x,
                     double x_norm) {
  if (displacements.size() != weights.size()) {
    throw std::invalid_argument("extrapolation: displacement/weight size mismatch");
  }
  std::vector<double> d_sq(displacements.size());
  for (std::size_t i = 0; i < displacements.size(); ++i) {
    d_sq[i] = displacements[i] * displacements[i];
  }
  const double pn = p_minus_x.norm();
  const bool coincide = pn <= kCoincidenceTol * (1.0 + x_norm);
  return extrapolation_sq(d_sq, weights, p_minus_x.squaredNorm(), coincide);
}

// ---------------------------------------------------------------------------
// Solver wrappers.
// ---------------------------------------------------------------------------

namespace {

void check_family(const std::vector<FqneOperator>& family, const Vec& x0,
                  const char* where) {
  if (family.empty()) {
    throw std::invalid_argument(std::string(where) + ": empty operator family");
  }
  for (const FqneOperator& op : family) {
    if (!op.valid()) {
      throw std::invalid_argument(std::string(where) + ": empty operator in family");
    }
    if (op.dim() != x0.size()) {
      throw std::invalid_argument(std::string(where) +
                                  ": operator dimension does not match the start point");
    }
  }
}

// Mutable per-run scratch of the block oracle.
struct BlockScratch {
  const BlockProblem* problem = nullptr;
  BlockConfig cfg;
  RngStream* rng = nullptr;
  BlockObserver observer;

  std::vector<Vec> points;      // p_i
  std::vector<Vec> deltas;      // p_i - x, kept at displacement scale
  std::vector<double> d;        // |p_i - x|
  std::vector<double> d_sq;     // exact squared displacements
  std::vector<double> beta;
  Vec combined;
  Vec p_minus_x;
  BlockIterationReport report;

  void run(const SolverState& st, CutProposal& out) {
    const std::size_t M = static_cast<std::size_t>(cfg.M);
    const Vec& x = st.iterate;
    out.indices.resize(M);
    d.resize(M);
    d_sq.resize(M);
    if (points.size() != M) {
      points.resize(M);
      deltas.resize(M);
    }

    for (std::size_t i = 0; i < M; ++i) {
      const std::uint64_t k = problem->dist.draw(*rng);
      out.indices[i] = k;
      problem->family[static_cast<std::size_t>(k)].eval_into(x, points[i]);
      deltas[i] = points[i] - x;
      d_sq[i] = deltas[i].squaredNorm();
      d[i] = std::sqrt(d_sq[i]);
    }

    double L;
    if (M == 1) {
      // Exact single-draw identities: the weight vector is forced to (1),
      // so p = p_1 verbatim and the extrapolation ratio has numerator and
      // denominator equal, i.e. L = 1 to the last bit (the coincidence
      // indicator only ever adds 1 to both sides).  Taking these shortcuts
      // keeps the path bit-identical to a plain projection-cut loop.
      beta.assign(1, 1.0);
      combined = points[0];
      L = 1.0;
      out.a = combined;
      out.max_displacement = d[0];
    } else {
      weights_into(d, cfg.delta, cfg.weight_rule, beta);
      // p - x = sum_i beta_i (p_i - x), summed at displacement scale.  The
      // naive route (form p, subtract x) loses |x|/|p - x| digits to
      // cancellation whenever the displacements are small next to the
      // iterate, which is the normal endgame regime, and the extrapolation
      // ratio below would inherit that noise.
      p_minus_x = beta[0] * deltas[0];
      for (std::size_t i = 1; i < M; ++i) p_minus_x += beta[i] * deltas[i];
      combined = x + p_minus_x;
      const double dmax = *std::max_element(d.begin(), d.end());

      const double psq = p_minus_x.squaredNorm();
      // (1e-14 (1 + |x|))^2 <= 2e-28 (1 + |x|^2): test the cheap bound
      // first, take the square root only when the indicator could fire.
      const double xsq = x.squaredNorm();
      const bool coincide = psq <= 2e-28 * (1.0 + xsq) &&
                            std::sqrt(psq) <= kCoincidenceTol * (1.0 + std::sqrt(xsq));
      // Even the stable sum carries rounding noise of order
      // eps * sum_i beta_i d_i, so once |p - x| drops below 1e-8 * dmax the
      // computed direction may be mostly noise.  Extrapolating a noise
      // direction by dmax^2/|p - x|^2 manufactures arbitrarily wrong cuts;
      // the plain averaged cut (the convex combination of the sampled
      // images is itself a valid image) is the honest step instead.
      const bool cancelled = psq <= 1e-16 * dmax * dmax;
      if (coincide || cancelled) {
        L = 1.0;
        out.a = combined;
      } else {
        L = extrapolation_sq(d_sq, beta, psq, false);
        if (!(L >= 1.0 - 1e-12)) {
          throw NumericalFailure("block extrapolation fell below 1", st.n);
        }
        // a = x + L (p - x); for L = 1 that is p itself, taken verbatim.
        if (L == 1.0) {
          out.a = combined;
        } else {
          out.a = x + L * p_minus_x;
        }
      }
      out.max_displacement = dmax;
    }
    out.lambda = cfg.lambda;
    out.extrapolation = L;

    if (observer) {
      report.n = st.n;
      report.indices = out.indices;
      report.displacements = d;
      report.weights = beta;
      report.extrapolation = L;
      report.combined = combined;
      observer(report);
    }
  }
};

}  // namespace

SolveResult run_block_solver(const BlockProblem& problem, const Vec& x0,
                             const BlockConfig& cfg, RngStream& rng,
                             const BlockRunOptions& opt) {
  cfg.validate();
  check_family(problem.family, x0, "run_block_solver");
  if (problem.dist.size() != problem.family.size()) {
    throw std::invalid_argument(
        "run_block_solver: index distribution does not match the family size");
  }

  auto scratch = std::make_shared<BlockScratch>();
  scratch->problem = &problem;
  scratch->cfg = cfg;
  scratch->rng = &rng;
  scratch->observer = opt.block_observer;

  SolverOptions sopt = opt.solver;
  sopt.lambda_min = std::min(sopt.lambda_min, cfg.epsilon);
  return run_stochastic_haugazeau(
      x0, [scratch](const SolverState& st, CutProposal& out) { scratch->run(st, out); },
      sopt);
}

SolveResult run_cyclic_haugazeau(const std::vector<FqneOperator>& sets, const Vec& x0,
                                 const SolverOptions& opt) {
  check_family(sets, x0, "run_cyclic_haugazeau");
  const std::size_t p = sets.size();
  CutOracle oracle = [&sets, p](const SolverState& st, CutProposal& out) {
    const std::size_t k = static_cast<std::size_t>(st.n) % p;
    out.a = sets[k](st.iterate);
    out.lambda = 1.0;
    out.extrapolation = 1.0;
    out.max_displacement = (out.a - st.iterate).norm();
    out.indices.assign(1, static_cast<std::uint64_t>(k));
  };
  return run_stochastic_haugazeau(x0, oracle, opt);
}

SolveResult run_randomized_single(const std::vector<FqneOperator>& sets,
                                  const IndexDistribution& dist, const Vec& x0,
                                  RngStream& rng, const SolverOptions& opt) {
  if (dist.kind() != IndexDistribution::Kind::FiniteCategorical) {
    throw std::invalid_argument("run_randomized_single: distribution must be categorical");
  }
  BlockProblem problem{sets, dist};
  BlockConfig cfg;  // M = 1, lambda = 1
  BlockRunOptions ropt;
  ropt.solver = opt;
  return run_block_solver(problem, x0, cfg, rng, ropt);
}

}  // namespace haug
