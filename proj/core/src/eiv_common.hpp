#pragma once

// Pieces shared by the three iteration schemes.

#include <string>
#include <vector>

#include "dqhelmert/linalg.hpp"
#include "dqhelmert/problem.hpp"
#include "dqhelmert/quaternion.hpp"
#include "dqhelmert/solve_result.hpp"

namespace dqhelmert::detail {

// Throws kInvalidProblem for validation errors and kDegenerateGeometry for
// collinear point sets.
void RequireSolvable(const Problem& problem);

struct CorrectedPoints {
  std::vector<Vec3> source;
  std::vector<Vec3> target;
};

CorrectedPoints Correct(const Problem& problem, const DenseVector& v);

// A = [blockdiag(−λR) : I], or [0 : I] in asymmetric mode.
DenseMatrix ResidualCoefficients(const Problem& problem, double lambda,
                                 const Quaternion& r);

// w = f − A v from the observed coordinates in extended precision. f is
// linear in the coordinates, so this equals f(x + v) − A v up to rounding;
// only source corrections left out of A in asymmetric mode remain.
// The translation is passed as t or, for a dual quaternion model, as (r, s).
DenseVector Misclosure(const Problem& problem, double lambda,
                       const Quaternion& r, const Vec3& t, const DenseVector& v);
DenseVector Misclosure(const Problem& problem, double lambda,
                       const Quaternion& r, const Quaternion& s,
                       const DenseVector& v);

// (r∘k, s∘k) with k the half turn about z, sign-flipped so r4 ≥ 0. Together
// with −λ it maps every point of the plane z = 0 exactly as (λ, r, s) does.
DualQuaternion PlanarTwin(const DualQuaternion& dq);

// Fills the problem-derived fields shared by every solver.
void InitResult(SolveResult& result, const Problem& problem, Method method,
                QuatForm form);

void FinishStatistics(SolveResult& result, const DenseMatrix& weight);

std::string FormatTrace(const std::vector<IterationRecord>& trace);

SolverError SingularNormal(const Error& cause,
                           std::vector<IterationRecord> trace);

}  // namespace dqhelmert::detail
