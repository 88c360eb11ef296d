#include "haug/solver.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace haug {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged:      return "converged";
    case SolveStatus::IterationLimit: return "iteration-limit";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// CSV sink.
// ---------------------------------------------------------------------------

struct CsvTraceSink::Impl {
  std::FILE* f = nullptr;
};

CsvTraceSink::CsvTraceSink(const std::string& path) : impl_(new Impl) {
  impl_->f = std::fopen(path.c_str(), "wb");
  if (impl_->f == nullptr) {
    throw std::runtime_error("CsvTraceSink: cannot open '" + path + "' for writing");
  }
  const std::string h = header();
  std::fwrite(h.data(), 1, h.size(), impl_->f);
}

CsvTraceSink::~CsvTraceSink() {
  if (impl_->f != nullptr) std::fclose(impl_->f);
}

std::string CsvTraceSink::header() {
  return "n,anchor_dist,step_norm,max_displacement,L_n,lambda_n,empty_cut_count,sampled_indices\n";
}

std::string CsvTraceSink::format_row(const TraceRecord& rec) {
  // %.17g keeps full double precision and is locale-independent with the
  // C locale the process runs in; values round-trip exactly.
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%ld,",
                rec.n, rec.anchor_dist, rec.step_norm, rec.max_displacement,
                rec.extrapolation, rec.lambda, rec.empty_cut_count);
  std::string line(buf);
  for (size_t i = 0; i < rec.sampled_indices.size(); ++i) {
    if (i > 0) line += ';';
    line += std::to_string(rec.sampled_indices[i]);
  }
  line += '\n';
  return line;
}

void CsvTraceSink::row(const TraceRecord& rec) {
  const std::string line = format_row(rec);
  std::fwrite(line.data(), 1, line.size(), impl_->f);
}

// ---------------------------------------------------------------------------
// Driver.
// ---------------------------------------------------------------------------

SolveResult run_stochastic_haugazeau(const Vec& x0, const CutOracle& oracle,
                                     const SolverOptions& opt) {
  if (!oracle) throw std::invalid_argument("run_stochastic_haugazeau: empty oracle");
  require_finite(x0, "run_stochastic_haugazeau");
  if (!(opt.lambda_min > 0.0 && opt.lambda_min <= 1.0)) {
    throw std::invalid_argument("run_stochastic_haugazeau: lambda_min must be in (0,1]");
  }
  if (opt.stop.max_iter < 0 || opt.stop.window < 0) {
    throw std::invalid_argument("run_stochastic_haugazeau: negative stopping parameter");
  }

  SolveResult result;
  SolverState& st = result.state;
  st.anchor = x0;
  st.iterate = x0;

  CutProposal prop;
  Vec r(x0.size());
  Vec x_next(x0.size());
  QCaseReport rep;
  TraceRecord rec;
  int quiet = 0;

  while (st.n < opt.stop.max_iter) {
    oracle(st, prop);
    if (prop.a.size() != x0.size()) {
      throw std::invalid_argument("cut oracle returned a point of wrong dimension");
    }
    if (!prop.a.allFinite()) {
      throw NumericalFailure("cut oracle returned a non-finite point", st.n);
    }
    if (!(prop.lambda >= opt.lambda_min && prop.lambda <= 1.0)) {
      throw std::invalid_argument("cut oracle relaxation " + std::to_string(prop.lambda) +
                                  " outside [" + std::to_string(opt.lambda_min) + ", 1]");
    }

    const double res = (prop.a - st.iterate).norm();

    // r_n = x_n + lambda (a_n - x_n); for lambda = 1 that is a_n exactly,
    // and taking it verbatim avoids a pointless rounding detour.
    if (prop.lambda == 1.0) {
      r = prop.a;
    } else {
      r = st.iterate + prop.lambda * (prop.a - st.iterate);
    }

    q_step_into(st.anchor, st.iterate, r, x_next, &rep);
    if (!x_next.allFinite()) {
      throw NumericalFailure("iterate became non-finite", st.n);
    }
    if (rep.branch == QBranch::EmptyIntersection) st.empty_cut_count += 1;

    const double step = (x_next - st.iterate).norm();
    const double iterate_scale = 1.0 + st.iterate.norm();

    if (opt.observer) {
      const IterationView view{st.n,   st.anchor, st.iterate,       prop.a,
                               r,      x_next,    prop.lambda,
                               prop.extrapolation, rep.branch};
      opt.observer(view);
    }

    st.iterate.swap(x_next);
    st.n += 1;
    st.cum_sq_step += step * step;
    st.anchor_dist = (st.iterate - st.anchor).norm();

    if (opt.trace != nullptr) {
      rec.n = st.n - 1;
      rec.anchor_dist = st.anchor_dist;
      rec.step_norm = step;
      rec.max_displacement = prop.max_displacement;
      rec.extrapolation = prop.extrapolation;
      rec.lambda = prop.lambda;
      rec.empty_cut_count = st.empty_cut_count;
      rec.sampled_indices = prop.indices;
      opt.trace->row(rec);
    }

    if (opt.stop.window > 0) {
      if (step <= opt.stop.tol_step * iterate_scale && res <= opt.stop.tol_res) {
        quiet += 1;
        if (quiet >= opt.stop.window) {
          result.status = SolveStatus::Converged;
          return result;
        }
      } else {
        quiet = 0;
      }
    }
  }

  result.status = SolveStatus::IterationLimit;
  return result;
}

}  // namespace haug
