#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "haug/operators.hpp"
#include "haug/qstep.hpp"
#include "haug/solver.hpp"
#include "haug/vec.hpp"

using namespace haug;

namespace {

Vec make2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Cyclic exact-projection oracle over a family of sets, the simplest
// deterministic driver client.
CutOracle cycling_oracle(std::vector<FqneOperator> sets) {
  return [sets = std::move(sets)](const SolverState& st, CutProposal& out) {
    const auto k = static_cast<std::size_t>(st.n) % sets.size();
    out.a = sets[k](st.iterate);
    out.lambda = 1.0;
    out.extrapolation = 1.0;
    out.max_displacement = (out.a - st.iterate).norm();
    out.indices.assign(1, k);
  };
}

}  // namespace

TEST_CASE("oracle returning the iterate stops at the window") {
  CutOracle idle = [](const SolverState& st, CutProposal& out) {
    out.a = st.iterate;
    out.lambda = 1.0;
  };
  SolverOptions opt;
  opt.stop.window = 20;
  const SolveResult res = run_stochastic_haugazeau(make2(3, -1), idle, opt);
  CHECK(res.status == SolveStatus::Converged);
  CHECK(res.state.n == 20);
  CHECK(res.state.iterate == make2(3, -1));
  CHECK(res.state.cum_sq_step == 0.0);
  CHECK(res.state.anchor_dist == 0.0);
}

TEST_CASE("window zero runs the whole budget") {
  CutOracle idle = [](const SolverState& st, CutProposal& out) {
    out.a = st.iterate;
    out.lambda = 1.0;
  };
  SolverOptions opt;
  opt.stop.window = 0;
  opt.stop.max_iter = 37;
  const SolveResult res = run_stochastic_haugazeau(make2(1, 1), idle, opt);
  CHECK(res.status == SolveStatus::IterationLimit);
  CHECK(res.state.n == 37);
}

TEST_CASE("single half-space resolves in one exact step") {
  std::vector<FqneOperator> sets;
  sets.push_back(halfspace_projector(Halfspace{make2(1, 0), 0.0}));
  Vec first_iterate;
  SolverOptions opt;
  opt.observer = [&](const IterationView& v) {
    if (v.n == 0) first_iterate = v.x_next;
  };
  const SolveResult res = run_stochastic_haugazeau(make2(2, 0), cycling_oracle(sets), opt);
  CHECK(res.status == SolveStatus::Converged);
  CHECK(first_iterate == make2(0, 0));
  CHECK(res.state.iterate == make2(0, 0));
  CHECK(res.state.empty_cut_count == 0);
}

TEST_CASE("alternating corner cuts with run invariants") {
  std::vector<FqneOperator> sets;
  sets.push_back(halfspace_projector(Halfspace{make2(-1, 0), -1.0}));  // a >= 1
  sets.push_back(halfspace_projector(Halfspace{make2(0, -1), -1.0}));  // b >= 1
  const Vec x0 = make2(0, 0);
  const double target_dist = std::sqrt(2.0);

  double prev_anchor_dist = 0.0;
  SolverOptions opt;
  opt.stop.tol_step = 1e-12;
  opt.stop.tol_res = 1e-12;
  opt.observer = [&](const IterationView& v) {
    const double ad = (v.x_next - v.anchor).norm();
    // Anchor distance may only grow, and never beyond the distance to the
    // true nearest feasible point.
    CHECK(ad >= prev_anchor_dist - 1e-10 * (1.0 + prev_anchor_dist));
    CHECK(ad <= target_dist + 1e-8);
    prev_anchor_dist = ad;
    // The new iterate stays inside both cuts of its construction.
    CHECK(in_halfspace(v.anchor, v.x_prev, v.x_next));
    CHECK(in_halfspace(v.x_prev, v.r, v.x_next));
  };

  const SolveResult res = run_stochastic_haugazeau(x0, cycling_oracle(sets), opt);
  CHECK(res.status == SolveStatus::Converged);
  CHECK((res.state.iterate - make2(1, 1)).norm() <= 1e-6);
  CHECK(res.state.cum_sq_step <= 2.0 + 1e-8);
  CHECK(res.state.anchor_dist <= target_dist + 1e-8);
}

TEST_CASE("relaxed single-set steps contract geometrically") {
  // With relaxation 0.9 each cut closes 90 percent of the remaining gap,
  // so the iterate decays with ratio 0.1 per step.
  FqneOperator wall = halfspace_projector(Halfspace{make2(1, 0), 0.0});
  CutOracle relaxed = [wall](const SolverState& st, CutProposal& out) {
    out.a = wall(st.iterate);
    out.lambda = 0.9;
  };
  SolverOptions opt;
  const SolveResult res = run_stochastic_haugazeau(make2(2, 0), relaxed, opt);
  CHECK(res.status == SolveStatus::Converged);
  CHECK(res.state.iterate.norm() <= 1e-6);
}

TEST_CASE("relaxed corner still converges at its slower rate") {
  // Relaxed cuts land strictly inside each half-space, which throttles the
  // corner approach to a harmonic rate; the stopping rule is loosened to
  // match.
  std::vector<FqneOperator> sets;
  sets.push_back(halfspace_projector(Halfspace{make2(-1, 0), -1.0}));
  sets.push_back(halfspace_projector(Halfspace{make2(0, -1), -1.0}));
  CutOracle relaxed = [sets](const SolverState& st, CutProposal& out) {
    const auto k = static_cast<std::size_t>(st.n) % sets.size();
    out.a = sets[k](st.iterate);
    out.lambda = 0.9;
  };
  SolverOptions opt;
  opt.stop.tol_step = 1e-4;
  opt.stop.tol_res = 1e-4;
  opt.stop.max_iter = 60000;
  const SolveResult res = run_stochastic_haugazeau(make2(0, 0), relaxed, opt);
  CHECK(res.status == SolveStatus::Converged);
  CHECK((res.state.iterate - make2(1, 1)).norm() <= 1e-2);
}

TEST_CASE("relaxation outside the configured range is rejected") {
  CutOracle lam = [](const SolverState& st, CutProposal& out) {
    out.a = st.iterate;
    out.lambda = 1e-5;
  };
  SolverOptions opt;  // lambda_min 1e-3
  CHECK_THROWS_AS(run_stochastic_haugazeau(make2(0, 0), lam, opt), std::invalid_argument);

  CutOracle big = [](const SolverState& st, CutProposal& out) {
    out.a = st.iterate;
    out.lambda = 1.5;
  };
  CHECK_THROWS_AS(run_stochastic_haugazeau(make2(0, 0), big, opt), std::invalid_argument);

  CHECK_THROWS_AS(run_stochastic_haugazeau(make2(0, 0), CutOracle{}, opt),
                  std::invalid_argument);
}

TEST_CASE("non-finite oracle output raises a numerical failure") {
  CutOracle nan_oracle = [](const SolverState& st, CutProposal& out) {
    out.a = st.iterate;
    if (st.n == 3) out.a[0] = std::numeric_limits<double>::quiet_NaN();
    out.lambda = 1.0;
  };
  SolverOptions opt;
  opt.stop.window = 0;
  opt.stop.max_iter = 10;
  try {
    run_stochastic_haugazeau(make2(0, 0), nan_oracle, opt);
    FAIL("expected NumericalFailure");
  } catch (const NumericalFailure& e) {
    CHECK(e.iteration() == 3);
  }

  CutOracle wrong_dim = [](const SolverState&, CutProposal& out) {
    out.a = Vec(3);
    out.a.setZero();
    out.lambda = 1.0;
  };
  CHECK_THROWS_AS(run_stochastic_haugazeau(make2(0, 0), wrong_dim, opt),
                  std::invalid_argument);
}

TEST_CASE("opposed cut is counted and falls back") {
  // First step lands on (1,0); the second proposal pulls straight back
  // toward the anchor, which the two-cut geometry rejects.
  CutOracle oracle = [](const SolverState& st, CutProposal& out) {
    out.a = (st.n == 0) ? make2(1, 0) : make2(0.5, 0);
    out.lambda = 1.0;
  };
  SolverOptions opt;
  opt.stop.window = 0;
  opt.stop.max_iter = 3;
  const SolveResult res = run_stochastic_haugazeau(make2(0, 0), oracle, opt);
  CHECK(res.state.iterate == make2(1, 0));
  CHECK(res.state.empty_cut_count == 2);
}

TEST_CASE("memory trace mirrors the run") {
  std::vector<FqneOperator> sets;
  sets.push_back(halfspace_projector(Halfspace{make2(-1, 0), -1.0}));
  sets.push_back(halfspace_projector(Halfspace{make2(0, -1), -1.0}));

  std::vector<double> anchor_dists;
  MemoryTraceSink trace;
  SolverOptions opt;
  opt.trace = &trace;
  opt.observer = [&](const IterationView& v) {
    anchor_dists.push_back((v.x_next - v.anchor).norm());
  };
  const SolveResult res = run_stochastic_haugazeau(make2(0, 0), cycling_oracle(sets), opt);

  REQUIRE(trace.rows().size() == static_cast<std::size_t>(res.state.n));
  for (std::size_t i = 0; i < trace.rows().size(); ++i) {
    const TraceRecord& rec = trace.rows()[i];
    CHECK(rec.n == static_cast<long>(i));
    CHECK(rec.anchor_dist == doctest::Approx(anchor_dists[i]).epsilon(1e-15));
    CHECK(rec.lambda == 1.0);
    REQUIRE(rec.sampled_indices.size() == 1);
    CHECK(rec.sampled_indices[0] == i % 2);
  }
}

TEST_CASE("csv trace format and round trip") {
  CHECK(CsvTraceSink::header() ==
        "n,anchor_dist,step_norm,max_displacement,L_n,lambda_n,empty_cut_count,"
        "sampled_indices\n");

  TraceRecord rec;
  rec.n = 12;
  rec.anchor_dist = 1.0 / 3.0;
  rec.step_norm = 2.2250738585072014e-308;
  rec.max_displacement = 3.141592653589793;
  rec.extrapolation = 1.0000000000000002;
  rec.lambda = 0.1;
  rec.empty_cut_count = 4;
  rec.sampled_indices = {7, 0, 7};
  const std::string line = CsvTraceSink::format_row(rec);
  CHECK(line.back() == '\n');

  std::stringstream ss(line);
  std::string field;
  std::getline(ss, field, ',');
  CHECK(std::stol(field) == 12);
  std::getline(ss, field, ',');
  CHECK(std::stod(field) == rec.anchor_dist);
  std::getline(ss, field, ',');
  CHECK(std::stod(field) == rec.step_norm);
  std::getline(ss, field, ',');
  CHECK(std::stod(field) == rec.max_displacement);
  std::getline(ss, field, ',');
  CHECK(std::stod(field) == rec.extrapolation);
  std::getline(ss, field, ',');
  CHECK(std::stod(field) == rec.lambda);
  std::getline(ss, field, ',');
  CHECK(std::stol(field) == 4);
  std::getline(ss, field);
  CHECK(field == "7;0;7");

  const std::string path = "trace_roundtrip_test.csv";
  {
    CsvTraceSink sink(path);
    sink.row(rec);
    sink.row(rec);
  }
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header_line, row1, row2;
  std::getline(in, header_line);
  std::getline(in, row1);
  std::getline(in, row2);
  CHECK(header_line + "\n" == CsvTraceSink::header());
  CHECK(row1 == row2);
  CHECK(row1 + "\n" == line);
  std::remove(path.c_str());
}

TEST_CASE("csv sink rejects an unwritable path") {
  CHECK_THROWS_AS(CsvTraceSink("/nonexistent-dir/trace.csv"), std::runtime_error);
}
